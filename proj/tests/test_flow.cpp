#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lsnm/errors.hpp"
#include "lsnm/flow.hpp"
#include "lsnm/rng.hpp"
#include "lsnm/scm.hpp"
#include "oracles.hpp"

using namespace lsnm;

namespace {

FlowConfig small_config(int subflows, int hidden, PriorKind prior) {
    FlowConfig cfg;
    cfg.n_subflows = subflows;
    cfg.hidden_width = hidden;
    cfg.prior = prior;
    return cfg;
}

FlowModel random_flow(const FlowConfig& cfg, std::uint64_t seed, double scale = 0.3) {
    FlowModel m = init_flow(Direction::Forward, cfg, seed);
    Rng rng(derive_seed(seed, 0xAB));
    for (Eigen::Index i = 0; i < m.params.size(); ++i) m.params[i] = scale * rng.gaussian();
    return m;
}

FlowModel identity_flow(PriorKind prior) {
    FlowConfig cfg = small_config(1, 5, prior);
    FlowModel m = init_flow(Direction::Forward, cfg, 1);
    m.params.setZero();
    return m;
}

PairDataset from_columns(std::vector<double> x, std::vector<double> y) {
    PairDataset d;
    d.x = std::move(x);
    d.y = std::move(y);
    d.name = "flow-test";
    return d;
}

}  // namespace

TEST_CASE("identity flow maps points to themselves") {
    FlowModel m = identity_flow(PriorKind::Gaussian);
    auto [c, e] = forward_map(m, 0.7, -1.3);
    CHECK(c == 0.7);
    CHECK(e == -1.3);
    auto [ic, ie] = inverse_map(m, 0.7, -1.3);
    CHECK(ic == 0.7);
    CHECK(ie == -1.3);
}

TEST_CASE("bijection: inverse of forward is the identity") {
    for (int rep = 0; rep < 3; ++rep) {
        FlowConfig cfg = small_config(rep + 1, 5, PriorKind::Laplace);
        FlowModel m = random_flow(cfg, 100 + static_cast<std::uint64_t>(rep));
        Rng rng(200 + static_cast<std::uint64_t>(rep));
        for (int i = 0; i < 50; ++i) {
            const double ec = rng.gaussian(), ee = rng.gaussian();
            auto [c, e] = forward_map(m, ec, ee);
            auto [ic, ie] = inverse_map(m, c, e);
            CHECK(std::abs(ic - ec) <= 1e-9);
            CHECK(std::abs(ie - ee) <= 1e-9);
        }
    }
}

TEST_CASE("composed stack stays affine in the effect latent at fixed cause") {
    FlowModel m = random_flow(small_config(2, 5, PriorKind::Gaussian), 7, 0.5);
    const double ec = 0.42;
    std::vector<double> ys;
    const double h = 0.25;
    for (int i = 0; i <= 20; ++i) ys.push_back(forward_map(m, ec, -2.5 + h * i).second);
    for (std::size_t i = 1; i + 1 < ys.size(); ++i) {
        const double second_diff = ys[i + 1] - 2.0 * ys[i] + ys[i - 1];
        CHECK(std::abs(second_diff) <= 1e-8);
    }
}

TEST_CASE("identity flow log-likelihood at the origin") {
    PairDataset at_origin = from_columns({0.0, 0.0}, {0.0, 0.0});
    FlowModel gauss = identity_flow(PriorKind::Gaussian);
    LogLik lg = log_likelihood(gauss, at_origin);
    CHECK(lg.per_point[0] == doctest::Approx(-1.8378770664093453).epsilon(1e-12));
    FlowModel lap = identity_flow(PriorKind::Laplace);
    LogLik ll = log_likelihood(lap, at_origin);
    CHECK(ll.per_point[0] == doctest::Approx(-1.3862943611198906).epsilon(1e-12));
}

TEST_CASE("single sub-flow log-likelihood equals the direct conditional-density oracle") {
    // Independent evaluation of the two-factor density: the cause is affine in
    // its latent, the effect conditionally affine, each contributing its prior
    // density minus the log scale.
    for (PriorKind prior : {PriorKind::Gaussian, PriorKind::Laplace}) {
        FlowConfig cfg = small_config(1, 5, prior);
        FlowModel m = random_flow(cfg, prior == PriorKind::Gaussian ? 11 : 12);
        const double t1 = m.params[0];
        const double s1 = m.params[1];
        const std::vector<int> sizes = {1, 5, 5, 5, 1};
        const std::size_t mlp_params = (param_count(cfg) - 2) / 2;
        const double* t2 = m.params.data() + 2;
        const double* s2 = m.params.data() + 2 + mlp_params;

        Rng rng(77);
        std::vector<double> xs, ys;
        for (int i = 0; i < 20; ++i) {
            xs.push_back(rng.gaussian());
            ys.push_back(rng.gaussian());
        }
        LogLik ll = log_likelihood(m, from_columns(xs, ys));
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double x = xs[i], y = ys[i];
            const double sx = std::clamp(s1, -7.0, 7.0);
            const double sy = std::clamp(oracles::mlp_forward_flat(sizes, s2, x), -7.0, 7.0);
            const double ty = oracles::mlp_forward_flat(sizes, t2, x);
            const double expected = prior_log_density(prior, std::exp(-sx) * (x - t1)) - sx +
                                    prior_log_density(prior, std::exp(-sy) * (y - ty)) - sy;
            CHECK(std::abs(ll.per_point[i] - expected) <= 1e-10);
        }
    }
}

TEST_CASE("two independent code paths agree on the log-likelihood") {
    // Path B rebuilds the density from public pieces: latents from inverse_map,
    // the cause scale from the affine forward map, the effect scale from
    // conditional_moments.
    Rng rng(31);
    for (int rep = 0; rep < 100; ++rep) {
        FlowConfig cfg = small_config(1 + rep % 3, 2 + (rep % 2) * 3,
                                      rep % 2 ? PriorKind::Laplace : PriorKind::Gaussian);
        FlowModel m = random_flow(cfg, 500 + static_cast<std::uint64_t>(rep), 0.4);
        const double x = 2.0 * rng.gaussian(), y = 2.0 * rng.gaussian();
        LogLik ll = log_likelihood(m, from_columns({x, x}, {y, y}));

        auto [ec, ee] = inverse_map(m, x, y);
        const double cause_scale = forward_map(m, 1.0, 0.0).first - forward_map(m, 0.0, 0.0).first;
        ConditionalMoments cm = conditional_moments(m, {x});
        const double expected = prior_log_density(cfg.prior, ec) + prior_log_density(cfg.prior, ee) -
                                std::log(cause_scale) - std::log(cm.scale[0]);
        CHECK(std::abs(ll.per_point[0] - expected) <= 1e-10);

        // bijection at the same tolerance budget as the likelihood check
        auto [c2, e2] = forward_map(m, ec, ee);
        CHECK(std::abs(c2 - x) <= 1e-9);
        CHECK(std::abs(e2 - y) <= 1e-9);
    }
}

TEST_CASE("gradient matches central finite differences") {
    int coords_checked = 0;
    for (int k : {1, 2}) {
        for (int width : {2, 5}) {
            for (PriorKind prior : {PriorKind::Gaussian, PriorKind::Laplace}) {
                FlowConfig cfg = small_config(k, width, prior);
                FlowModel m = random_flow(cfg, static_cast<std::uint64_t>(k * 100 + width), 0.4);
                Rng rng(static_cast<std::uint64_t>(k * 7 + width));
                std::vector<double> xs, ys;
                for (int i = 0; i < 12; ++i) {
                    xs.push_back(rng.gaussian());
                    ys.push_back(rng.gaussian());
                }
                PairDataset d = from_columns(xs, ys);
                Eigen::VectorXd g = gradient(m, d);

                const double h = 1e-5;
                Rng pick(static_cast<std::uint64_t>(k * 31 + width));
                for (int c = 0; c < 25; ++c) {
                    const auto i = static_cast<Eigen::Index>(
                        pick.next_u64() % static_cast<std::uint64_t>(m.params.size()));
                    FlowModel plus = m, minus = m;
                    plus.params[i] += h;
                    minus.params[i] -= h;
                    const double fd =
                        (log_likelihood(plus, d).total - log_likelihood(minus, d).total) / (2 * h);
                    const double rel = std::abs(g[i] - fd) / std::max(1.0, std::abs(fd));
                    CHECK(rel <= 1e-4);
                    ++coords_checked;
                }
            }
        }
    }
    CHECK(coords_checked >= 100);
}

TEST_CASE("fit recovers a linear conditional mean (OLS oracle)") {
    Rng rng(555);
    std::vector<double> xs, ys;
    for (int i = 0; i < 2000; ++i) {
        const double x = rng.gaussian();
        xs.push_back(x);
        ys.push_back(2.0 * x + 0.5 * rng.gaussian());
    }
    PairDataset d = from_columns(xs, ys);
    FlowConfig cfg;
    cfg.prior = PriorKind::Gaussian;
    FlowModel m = fit(d, Direction::Forward, cfg, 9);

    std::vector<double> probe;
    for (int i = 0; i <= 20; ++i) probe.push_back(-1.5 + 0.15 * i);
    ConditionalMoments cm = conditional_moments(m, probe);
    const double flow_slope = oracles::ols_slope(probe, cm.mean);
    const double data_slope = oracles::ols_slope(xs, ys);
    CHECK(std::abs(flow_slope - data_slope) <= 0.1);
    CHECK(std::abs(flow_slope - 2.0) <= 0.1);
}

TEST_CASE("ANM restriction freezes the scale at one") {
    Rng rng(777);
    std::vector<double> xs, ys;
    for (int i = 0; i < 600; ++i) {
        const double x = rng.gaussian();
        xs.push_back(x);
        ys.push_back(std::sin(x) + (0.2 + std::abs(x)) * rng.gaussian());  // heteroscedastic
    }
    FlowConfig cfg;
    cfg.anm_restricted = true;
    cfg.epochs = 150;
    FlowModel m = fit(from_columns(xs, ys), Direction::Forward, cfg, 4);
    std::vector<double> probe;
    for (int i = 0; i <= 30; ++i) probe.push_back(-2.0 + 0.13 * i);
    ConditionalMoments cm = conditional_moments(m, probe);
    for (double g : cm.scale) CHECK(g == 1.0);
    double lo = cm.scale[0], hi = cm.scale[0];
    for (double g : cm.scale) {
        lo = std::min(lo, g);
        hi = std::max(hi, g);
    }
    CHECK(hi - lo < 1e-6);
}

TEST_CASE("training makes progress on every synthetic family") {
    const ScmFamily families[] = {ScmFamily::LsnmTanhExpCosine, ScmFamily::LsnmSineTanh,
                                  ScmFamily::LsnmSigmoidSigmoid, ScmFamily::AnmSine,
                                  ScmFamily::AnmTanh, ScmFamily::AnmSigmoid};
    for (const ScmFamily family : families) {
        for (int s = 0; s < 10; ++s) {
            const auto seed = static_cast<std::uint64_t>(s);
            ScmSpec spec = sample_scm_spec(family, NoiseFamily::gaussian(), 1.0, seed);
            GeneratedData gen = generate(spec, 300, derive_seed(seed, 1));
            PairDataset d = standardize(gen.data);
            FlowConfig cfg;
            cfg.epochs = 120;
            FitTrace trace;
            (void)fit(d, Direction::Forward, cfg, derive_seed(seed, 2), &trace);
            REQUIRE(trace.epoch_loss.size() == 120);
            CHECK(trace.epoch_loss.back() <= trace.epoch_loss.front());
        }
    }
}

TEST_CASE("identity flow residuals reproduce the data") {
    FlowModel m = identity_flow(PriorKind::Gaussian);
    PairDataset d = from_columns({0.5, -1.0, 2.0}, {0.5, -1.0, 2.0});
    std::vector<double> r = residuals(m, d);
    CHECK(r == d.x);
    ConditionalMoments cm = conditional_moments(m, d.x);
    for (double f : cm.mean) CHECK(f == 0.0);
    for (double g : cm.scale) CHECK(g == 1.0);
}

TEST_CASE("residuals recover the generating noise of a flow-generated dataset") {
    FlowModel truth = random_flow(small_config(2, 5, PriorKind::Gaussian), 42, 0.5);
    Rng rng(43);
    PairDataset d;
    std::vector<double> eps;
    for (int i = 0; i < 400; ++i) {
        const double ec = rng.gaussian(), ee = rng.gaussian();
        auto [x, y] = forward_map(truth, ec, ee);
        d.x.push_back(x);
        d.y.push_back(y);
        eps.push_back(ee);
    }
    d.name = "flow-generated";
    std::vector<double> r = residuals(truth, d);
    for (std::size_t i = 0; i < eps.size(); ++i) CHECK(std::abs(r[i] - eps[i]) <= 1e-9);
    CHECK(std::abs(oracles::pearson(r, eps)) >= 0.999);

    // cross-check of two independent code paths: (y - fhat)/ghat vs inverse_map
    ConditionalMoments cm = conditional_moments(truth, d.x);
    for (std::size_t i = 0; i < d.size(); ++i)
        CHECK(std::abs((d.y[i] - cm.mean[i]) / cm.scale[i] - r[i]) <= 1e-9);
}

TEST_CASE("constant-effect residuals stay bounded under a fitted model") {
    Rng rng(88);
    std::vector<double> xs(500), ys(500, 0.3);
    for (double& x : xs) x = rng.gaussian();
    FlowConfig cfg;
    cfg.epochs = 200;
    FlowModel m = fit(from_columns(xs, ys), Direction::Forward, cfg, 5);
    std::vector<double> r = residuals(m, from_columns(xs, ys));
    double mean = 0.0;
    for (double v : r) {
        REQUIRE(std::isfinite(v));
        mean += v;
    }
    mean /= static_cast<double>(r.size());
    double var = 0.0;
    for (double v : r) var += (v - mean) * (v - mean);
    var /= static_cast<double>(r.size());
    CHECK(var <= 10.0);
}

TEST_CASE("likelihood-equivalent standardized model (closed form)") {
    // LSNM with noise N(mu, sigma^2) vs the standardized rewrite
    // f' = f + mu g, g' = sigma g with noise N(0, 1): identical conditional
    // log-densities.
    auto log_normal = [](double z, double mu, double sigma) {
        const double c = (z - mu) / sigma;
        return -std::log(sigma) - 0.91893853320467274 - 0.5 * c * c;
    };
    Rng rng(61);
    for (int rep = 0; rep < 10; ++rep) {
        const double a = rng.uniform(0.5, 2.0), b = rng.uniform(0.5, 2.0);
        const double c = rng.uniform(0.2, 1.5), e = rng.uniform(0.5, 2.0);
        const double mu = rng.uniform(-2.0, 2.0), sigma = rng.uniform(0.3, 3.0);
        auto f = [&](double x) { return a * std::sin(b * x); };
        auto g = [&](double x) { return std::exp(c * std::cos(e * x)); };
        for (int i = 0; i < 100; ++i) {
            const double x = -3.0 + 0.06 * i;
            const double y = rng.uniform(-4.0, 4.0);
            const double lhs = log_normal((y - f(x)) / g(x), mu, sigma) - std::log(g(x));
            const double fp = f(x) + mu * g(x);
            const double gp = sigma * g(x);
            const double rhs = log_normal((y - fp) / gp, 0.0, 1.0) - std::log(gp);
            CHECK(std::abs(lhs - rhs) <= 1e-9);
        }
    }
}

TEST_CASE("conditional log-density falls as the scale grows (closed form)") {
    // With log p(y|x) = log p_eps(eps) - log g and eps held fixed, scaling g by
    // c > 1 lowers the log-density by exactly log c.
    for (PriorKind prior : {PriorKind::Gaussian, PriorKind::Laplace}) {
        for (double eps : {-1.5, 0.0, 0.7}) {
            for (double g : {0.5, 1.0, 3.0}) {
                for (double c : {1.5, 2.0, 10.0}) {
                    const double before = prior_log_density(prior, eps) - std::log(g);
                    const double after = prior_log_density(prior, eps) - std::log(c * g);
                    CHECK(std::abs((before - after) - std::log(c)) <= 1e-12);
                    CHECK(after < before);
                }
            }
        }
    }
}

TEST_CASE("fit is deterministic given the seed") {
    Rng rng(91);
    std::vector<double> xs, ys;
    for (int i = 0; i < 200; ++i) {
        xs.push_back(rng.gaussian());
        ys.push_back(0.5 * xs.back() + rng.gaussian());
    }
    PairDataset d = from_columns(xs, ys);
    FlowConfig cfg;
    cfg.epochs = 50;
    FlowModel a = fit(d, Direction::Forward, cfg, 12345);
    FlowModel b = fit(d, Direction::Forward, cfg, 12345);
    CHECK(a.params == b.params);
    FlowModel c = fit(d, Direction::Forward, cfg, 12346);
    CHECK(a.params != c.params);
}

TEST_CASE("mini-batch training is deterministic and trains") {
    Rng rng(92);
    std::vector<double> xs, ys;
    for (int i = 0; i < 300; ++i) {
        xs.push_back(rng.gaussian());
        ys.push_back(std::tanh(xs.back()) + 0.3 * rng.gaussian());
    }
    PairDataset d = from_columns(xs, ys);
    FlowConfig cfg;
    cfg.epochs = 30;
    cfg.batch_size = 64;
    FitTrace trace;
    FlowModel a = fit(d, Direction::Forward, cfg, 7, &trace);
    FlowModel b = fit(d, Direction::Forward, cfg, 7);
    CHECK(a.params == b.params);
    CHECK(trace.epoch_loss.back() < trace.epoch_loss.front());
}

TEST_CASE("diverging configurations raise an error") {
    Rng rng(93);
    std::vector<double> xs, ys;
    for (int i = 0; i < 50; ++i) {
        xs.push_back(rng.gaussian());
        ys.push_back(rng.gaussian());
    }
    FlowConfig cfg;
    cfg.epochs = 5;
    cfg.learning_rate = 1e160;
    cfg.prior = PriorKind::Gaussian;  // the squared latent overflows to -inf
    CHECK_THROWS_AS(fit(from_columns(xs, ys), Direction::Forward, cfg, 1),
                    DivergedTrainingError);
}

TEST_CASE("checkpoint JSON round-trips the model") {
    FlowModel m = random_flow(small_config(3, 4, PriorKind::Laplace), 77);
    m.direction = Direction::Backward;
    const std::string j = save_checkpoint(m);
    FlowModel back = load_checkpoint(j);
    CHECK(back.direction == m.direction);
    CHECK(back.config.n_subflows == m.config.n_subflows);
    CHECK(back.config.hidden_width == m.config.hidden_width);
    REQUIRE(back.params.size() == m.params.size());
    PairDataset d = from_columns({0.1, -0.4, 1.2, 0.9}, {0.3, 0.8, -1.1, 0.0});
    CHECK(log_likelihood(back, d).total ==
          doctest::Approx(log_likelihood(m, d).total).epsilon(1e-12));
}

TEST_CASE("backward direction swaps the roles of the columns") {
    FlowModel fwd = random_flow(small_config(2, 5, PriorKind::Gaussian), 3);
    FlowModel bwd = fwd;
    bwd.direction = Direction::Backward;
    PairDataset d = from_columns({0.2, 1.4, -0.7, 0.1}, {1.0, -0.2, 0.5, -1.3});
    PairDataset swapped = d;
    std::swap(swapped.x, swapped.y);
    CHECK(log_likelihood(bwd, d).total ==
          doctest::Approx(log_likelihood(fwd, swapped).total).epsilon(1e-14));
}
