#include "lsnm/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "lsnm/errors.hpp"
#include "lsnm/rng.hpp"

namespace lsnm {

namespace {

constexpr double kSClamp = 7.0;  // s-outputs clamped to [-7, 7] before exp
constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;
constexpr double kLog2 = 0.69314718055994530941723212145818;

double clamp_s(double s) { return std::clamp(s, -kSClamp, kSClamp); }

// tanh written as 1 - 2/(exp(2z)+1); the batch path uses Eigen's vectorized
// exp, which is several times faster than scalar std::tanh.
double hidden_act(double z) { return 1.0 - 2.0 / (std::exp(2.0 * z) + 1.0); }

// ---- parameter layout ------------------------------------------------------

struct MlpLayout {
    std::vector<int> sizes;  // {1, h, ..., h, 1}, mlp_layers weight matrices
    std::size_t params = 0;

    explicit MlpLayout(const FlowConfig& cfg) {
        sizes.push_back(1);
        for (int l = 0; l < cfg.mlp_layers - 1; ++l) sizes.push_back(cfg.hidden_width);
        sizes.push_back(1);
        for (std::size_t l = 0; l + 1 < sizes.size(); ++l)
            params += static_cast<std::size_t>(sizes[l + 1]) * sizes[l] + sizes[l + 1];
    }
    int layers() const { return static_cast<int>(sizes.size()) - 1; }
};

struct FlowLayout {
    MlpLayout mlp;
    std::size_t per_subflow;
    int n_subflows;

    explicit FlowLayout(const FlowConfig& cfg) : mlp(cfg), n_subflows(cfg.n_subflows) {
        per_subflow = 2 + 2 * mlp.params;  // t1, s1, t2 net, s2 net
    }
    std::size_t total() const { return per_subflow * n_subflows; }
    std::size_t t1(int k) const { return per_subflow * k; }
    std::size_t s1(int k) const { return per_subflow * k + 1; }
    std::size_t t2(int k) const { return per_subflow * k + 2; }
    std::size_t s2(int k) const { return per_subflow * k + 2 + mlp.params; }
};

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapW = Eigen::Map<const RowMat>;
using MapWMut = Eigen::Map<RowMat>;
using MapV = Eigen::Map<const Eigen::VectorXd>;
using MapVMut = Eigen::Map<Eigen::VectorXd>;

// ---- batched MLP -----------------------------------------------------------

struct MlpCache {
    std::vector<Eigen::MatrixXd> z;  // pre-activations, one per layer
    std::vector<Eigen::MatrixXd> a;  // activations (a[last] is the raw output)
};

// Forward pass over a batch; x is n x 1. Caches live in `cache` for backward.
void mlp_forward(const MlpLayout& lay, const double* p, const Eigen::VectorXd& x,
                 MlpCache& cache) {
    const int L = lay.layers();
    cache.z.resize(L);
    cache.a.resize(L);
    const double* cur = p;
    for (int l = 0; l < L; ++l) {
        const int nin = lay.sizes[l], nout = lay.sizes[l + 1];
        MapW W(cur, nout, nin);
        cur += static_cast<std::size_t>(nout) * nin;
        MapV b(cur, nout);
        cur += nout;
        if (l == 0)
            cache.z[l].noalias() = x * W.transpose();
        else
            cache.z[l].noalias() = cache.a[l - 1] * W.transpose();
        cache.z[l].rowwise() += b.transpose();
        if (l + 1 < L)
            cache.a[l] = 1.0 - 2.0 / ((2.0 * cache.z[l].array()).exp() + 1.0);
        else
            cache.a[l] = cache.z[l];
    }
}

// Backward pass: upstream gradient d_out (n vector, w.r.t. the scalar output),
// accumulates parameter gradients into g and returns the input gradient.
Eigen::VectorXd mlp_backward(const MlpLayout& lay, const double* p, const Eigen::VectorXd& x,
                             const MlpCache& cache, const Eigen::VectorXd& d_out, double* g) {
    const int L = lay.layers();
    // offsets of each layer
    std::vector<std::size_t> w_off(L), b_off(L);
    std::size_t off = 0;
    for (int l = 0; l < L; ++l) {
        const int nin = lay.sizes[l], nout = lay.sizes[l + 1];
        w_off[l] = off;
        off += static_cast<std::size_t>(nout) * nin;
        b_off[l] = off;
        off += nout;
    }
    Eigen::MatrixXd delta = d_out;  // n x 1 at the output layer
    for (int l = L - 1; l >= 0; --l) {
        const int nin = lay.sizes[l], nout = lay.sizes[l + 1];
        MapW W(p + w_off[l], nout, nin);
        MapWMut gW(g + w_off[l], nout, nin);
        MapVMut gb(g + b_off[l], nout);
        gb.noalias() += delta.colwise().sum().transpose();
        if (l == 0) {
            gW.noalias() += delta.transpose() * x;
            return (delta * W).col(0);
        }
        gW.noalias() += delta.transpose() * cache.a[l - 1];
        Eigen::MatrixXd d_in = delta * W;  // n x nin
        // tanh' from the cached activation: 1 - a^2
        delta = d_in.cwiseProduct(
            cache.a[l - 1].unaryExpr([](double a) { return 1.0 - a * a; }));
    }
    return Eigen::VectorXd();  // unreachable
}

// Scalar MLP evaluation for the pointwise maps.
double mlp_eval(const MlpLayout& lay, const double* p, double x) {
    const int L = lay.layers();
    Eigen::VectorXd a(1);
    a[0] = x;
    const double* cur = p;
    for (int l = 0; l < L; ++l) {
        const int nin = lay.sizes[l], nout = lay.sizes[l + 1];
        MapW W(cur, nout, nin);
        cur += static_cast<std::size_t>(nout) * nin;
        MapV b(cur, nout);
        cur += nout;
        Eigen::VectorXd z = W * a + b;
        if (l + 1 < L)
            for (int i = 0; i < nout; ++i) z[i] = hidden_act(z[i]);
        a = z;
    }
    return a[0];
}

// ---- priors ----------------------------------------------------------------

double prior_dlogp(PriorKind p, double z) {
    if (p == PriorKind::Gaussian) return -z;
    return z > 0.0 ? -1.0 : (z < 0.0 ? 1.0 : 0.0);
}

// ---- direction mapping -----------------------------------------------------

void cause_effect(const FlowModel& m, const PairDataset& d, Eigen::VectorXd& cause,
                  Eigen::VectorXd& effect) {
    const std::size_t n = d.size();
    cause.resize(static_cast<Eigen::Index>(n));
    effect.resize(static_cast<Eigen::Index>(n));
    const bool fwd = m.direction == Direction::Forward;
    for (std::size_t i = 0; i < n; ++i) {
        cause[static_cast<Eigen::Index>(i)] = fwd ? d.x[i] : d.y[i];
        effect[static_cast<Eigen::Index>(i)] = fwd ? d.y[i] : d.x[i];
    }
}

// ---- batched evaluation (log-likelihood and gradient) -----------------------

struct EvalWorkspace {
    std::vector<Eigen::VectorXd> c;           // cause chain, c[K] = data
    std::vector<Eigen::VectorXd> d;           // effect chain
    std::vector<Eigen::VectorXd> m_out;       // t2 outputs per sub-flow
    std::vector<Eigen::VectorXd> s_clamped;   // clamped s2 outputs
    std::vector<Eigen::VectorXd> exp_neg_s;   // exp(-s_clamped)
    std::vector<Eigen::ArrayXd> s_active;     // 1 where the clamp is inactive
    std::vector<MlpCache> t2_cache, s2_cache;
};

struct EvalResult {
    double total_ll = 0.0;
    bool finite = true;
    std::uint64_t clamped = 0;
};

// Runs data -> latent, fills the workspace, computes the total log-likelihood
// and (optionally) the gradient of the total w.r.t. the flat parameters.
EvalResult eval_flow(const FlowLayout& lay, const FlowConfig& cfg, const Eigen::VectorXd& params,
                     const Eigen::VectorXd& cause, const Eigen::VectorXd& effect,
                     EvalWorkspace& ws, std::vector<double>* per_point, Eigen::VectorXd* grad) {
    const int K = lay.n_subflows;
    const auto n = cause.size();
    const double* p = params.data();

    ws.c.resize(K + 1);
    ws.d.resize(K + 1);
    ws.m_out.resize(K + 1);
    ws.s_clamped.resize(K + 1);
    ws.exp_neg_s.resize(K + 1);
    ws.s_active.resize(K + 1);
    ws.t2_cache.resize(K + 1);
    ws.s2_cache.resize(K + 1);

    ws.c[K] = cause;
    ws.d[K] = effect;
    double logdet_const = 0.0;  // sum over sub-flows of clamped s1
    for (int k = K; k >= 1; --k) {
        const double s1c = clamp_s(p[lay.s1(k - 1)]);
        const double t1 = p[lay.t1(k - 1)];
        logdet_const += s1c;
        ws.c[k - 1] = (ws.c[k].array() - t1).matrix() * std::exp(-s1c);

        mlp_forward(lay.mlp, p + lay.t2(k - 1), ws.c[k], ws.t2_cache[k]);
        mlp_forward(lay.mlp, p + lay.s2(k - 1), ws.c[k], ws.s2_cache[k]);
        ws.m_out[k] = ws.t2_cache[k].a.back().col(0);
        const Eigen::VectorXd& s_raw = ws.s2_cache[k].a.back().col(0);
        ws.s_clamped[k] = s_raw.unaryExpr([](double v) { return clamp_s(v); });
        ws.s_active[k] =
            s_raw.array().unaryExpr([](double v) { return std::abs(v) < kSClamp ? 1.0 : 0.0; });
        ws.exp_neg_s[k] = (-ws.s_clamped[k].array()).exp().matrix();
        ws.d[k - 1] = (ws.d[k] - ws.m_out[k]).cwiseProduct(ws.exp_neg_s[k]);
    }

    const PriorKind prior = cfg.prior;
    double total = 0.0;
    Eigen::ArrayXd s_sum = Eigen::ArrayXd::Zero(n);
    for (int k = 1; k <= K; ++k) s_sum += ws.s_clamped[k].array();
    if (per_point) per_point->resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double ll = prior_log_density(prior, ws.c[0][i]) +
                          prior_log_density(prior, ws.d[0][i]) - logdet_const - s_sum[i];
        if (per_point) (*per_point)[static_cast<std::size_t>(i)] = ll;
        total += ll;
    }
    EvalResult res;
    res.total_ll = total;
    res.finite = std::isfinite(total);
    for (int k = 1; k <= K; ++k) {
        res.clamped += static_cast<std::uint64_t>(
            static_cast<double>(n) - ws.s_active[k].sum());
        if (std::abs(p[lay.s1(k - 1)]) >= kSClamp) res.clamped += static_cast<std::uint64_t>(n);
    }
    if (!grad || !res.finite) return res;

    grad->setZero(params.size());
    double* g = grad->data();
    Eigen::VectorXd gc(n), gd(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        gc[i] = prior_dlogp(prior, ws.c[0][i]);
        gd[i] = prior_dlogp(prior, ws.d[0][i]);
    }
    for (int k = 1; k <= K; ++k) {
        // effect chain: d[k-1] = (d[k] - m_k) * exp(-s_k)
        Eigen::VectorXd gd_next = gd.cwiseProduct(ws.exp_neg_s[k]);
        Eigen::VectorXd gm = -gd_next;
        // d(total)/d(s_k,i): transform term -gd_i * d[k-1]_i, det term -1
        Eigen::VectorXd gs =
            ((-gd.array() * ws.d[k - 1].array() - 1.0) * ws.s_active[k]).matrix();
        Eigen::VectorXd gin_t =
            mlp_backward(lay.mlp, p + lay.t2(k - 1), ws.c[k], ws.t2_cache[k], gm, g + lay.t2(k - 1));
        Eigen::VectorXd gin_s =
            mlp_backward(lay.mlp, p + lay.s2(k - 1), ws.c[k], ws.s2_cache[k], gs, g + lay.s2(k - 1));

        // cause chain: c[k-1] = (c[k] - t1) * exp(-s1)
        const double s1_raw = p[lay.s1(k - 1)];
        const double s1_active = std::abs(s1_raw) < kSClamp ? 1.0 : 0.0;
        const double e1 = std::exp(-clamp_s(s1_raw));
        g[lay.t1(k - 1)] += -e1 * gc.sum();
        g[lay.s1(k - 1)] += (-gc.dot(ws.c[k - 1]) - static_cast<double>(n)) * s1_active;
        gc = (gc * e1 + gin_t + gin_s).eval();
        gd = std::move(gd_next);
    }
    return res;
}

Eigen::ArrayXd trainable_mask(const FlowConfig& cfg, const FlowLayout& lay) {
    Eigen::ArrayXd mask = Eigen::ArrayXd::Ones(static_cast<Eigen::Index>(lay.total()));
    if (cfg.anm_restricted) {
        for (int k = 0; k < lay.n_subflows; ++k) {
            mask[static_cast<Eigen::Index>(lay.s1(k))] = 0.0;
            for (std::size_t i = 0; i < lay.mlp.params; ++i)
                mask[static_cast<Eigen::Index>(lay.s2(k) + i)] = 0.0;
        }
    }
    return mask;
}

}  // namespace

// ---- public API -------------------------------------------------------------

const char* to_string(PriorKind p) { return p == PriorKind::Laplace ? "laplace" : "gaussian"; }

PriorKind parse_prior(const std::string& text) {
    if (text == "laplace") return PriorKind::Laplace;
    if (text == "gaussian" || text == "normal") return PriorKind::Gaussian;
    throw InvalidParamsError("unknown prior '" + text + "'");
}

double prior_log_density(PriorKind p, double z) {
    if (p == PriorKind::Gaussian) return -kLogSqrt2Pi - 0.5 * z * z;
    return -kLog2 - std::abs(z);
}

void FlowConfig::check() const {
    if (n_subflows < 1 || hidden_width < 1 || mlp_layers < 1 || epochs < 1)
        throw InvalidParamsError("flow config: counts must be >= 1");
    if (!(learning_rate > 0.0)) throw InvalidParamsError("flow config: learning rate must be > 0");
    if (l2_penalty < 0.0) throw InvalidParamsError("flow config: l2 penalty must be >= 0");
    if (batch_size < 0) throw InvalidParamsError("flow config: batch size must be >= 0");
}

std::size_t param_count(const FlowConfig& cfg) {
    cfg.check();
    return FlowLayout(cfg).total();
}

FlowModel init_flow(Direction dir, const FlowConfig& cfg, std::uint64_t seed) {
    cfg.check();
    if (dir == Direction::NoConclusion)
        throw InvalidParamsError("flow direction must be Forward or Backward");
    FlowLayout lay(cfg);
    FlowModel m;
    m.direction = dir;
    m.config = cfg;
    m.params.setZero(static_cast<Eigen::Index>(lay.total()));
    Rng rng(derive_seed(seed, /*stream=*/0x171F));
    for (int k = 0; k < cfg.n_subflows; ++k) {
        for (std::size_t which = 0; which < 2; ++which) {
            double* base = m.params.data() + (which == 0 ? lay.t2(k) : lay.s2(k));
            std::size_t off = 0;
            for (int l = 0; l < lay.mlp.layers(); ++l) {
                const int nin = lay.mlp.sizes[l], nout = lay.mlp.sizes[l + 1];
                const double bound = 1.0 / std::sqrt(static_cast<double>(nin));
                for (int i = 0; i < nout * nin; ++i) base[off++] = rng.uniform(-bound, bound);
                for (int i = 0; i < nout; ++i) base[off++] = rng.uniform(-bound, bound);
            }
        }
    }
    if (cfg.anm_restricted) {
        const Eigen::ArrayXd mask = trainable_mask(cfg, lay);
        m.params.array() *= mask;
    }
    return m;
}

std::pair<double, double> forward_map(const FlowModel& m, double eps_cause, double eps_effect) {
    FlowLayout lay(m.config);
    const double* p = m.params.data();
    double c = eps_cause, e = eps_effect;
    for (int k = 0; k < lay.n_subflows; ++k) {
        c = p[lay.t1(k)] + std::exp(clamp_s(p[lay.s1(k)])) * c;
        const double t2 = mlp_eval(lay.mlp, p + lay.t2(k), c);
        const double s2 = clamp_s(mlp_eval(lay.mlp, p + lay.s2(k), c));
        e = t2 + std::exp(s2) * e;
    }
    return {c, e};
}

std::pair<double, double> inverse_map(const FlowModel& m, double obs_cause, double obs_effect) {
    FlowLayout lay(m.config);
    const double* p = m.params.data();
    double c = obs_cause, e = obs_effect;
    for (int k = lay.n_subflows - 1; k >= 0; --k) {
        const double t2 = mlp_eval(lay.mlp, p + lay.t2(k), c);
        const double s2 = clamp_s(mlp_eval(lay.mlp, p + lay.s2(k), c));
        e = (e - t2) * std::exp(-s2);
        c = (c - p[lay.t1(k)]) * std::exp(-clamp_s(p[lay.s1(k)]));
    }
    return {c, e};
}

LogLik log_likelihood(const FlowModel& m, const PairDataset& d) {
    validate(d);
    FlowLayout lay(m.config);
    Eigen::VectorXd cause, effect;
    cause_effect(m, d, cause, effect);
    EvalWorkspace ws;
    LogLik out;
    EvalResult res = eval_flow(lay, m.config, m.params, cause, effect, ws, &out.per_point, nullptr);
    if (!res.finite) throw NonFiniteError("log-likelihood evaluation overflowed");
    out.total = res.total_ll;
    return out;
}

Eigen::VectorXd gradient(const FlowModel& m, const PairDataset& d) {
    validate(d);
    FlowLayout lay(m.config);
    Eigen::VectorXd cause, effect;
    cause_effect(m, d, cause, effect);
    EvalWorkspace ws;
    Eigen::VectorXd grad;
    EvalResult res = eval_flow(lay, m.config, m.params, cause, effect, ws, nullptr, &grad);
    if (!res.finite) throw NonFiniteError("log-likelihood evaluation overflowed");
    return grad;
}

FlowModel fit(const PairDataset& train, Direction dir, const FlowConfig& cfg, std::uint64_t seed,
              FitTrace* trace, const Deadline* deadline) {
    validate(train);
    cfg.check();
    FlowLayout lay(cfg);
    FlowModel model = init_flow(dir, cfg, seed);
    const Eigen::ArrayXd mask = trainable_mask(cfg, lay);

    Eigen::VectorXd cause, effect;
    cause_effect(model, train, cause, effect);
    const auto n = cause.size();
    const int bs = (cfg.batch_size > 0 && cfg.batch_size < n) ? cfg.batch_size : static_cast<int>(n);
    const bool full_batch = bs == n;

    const double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
    Eigen::VectorXd mom = Eigen::VectorXd::Zero(model.params.size());
    Eigen::VectorXd vel = Eigen::VectorXd::Zero(model.params.size());
    Eigen::VectorXd grad(model.params.size());
    EvalWorkspace ws;
    std::vector<Eigen::Index> order;
    if (!full_batch) {
        order.resize(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
    }
    Eigen::VectorXd bc, be;
    std::uint64_t step = 0;
    if (trace) {
        trace->epoch_loss.clear();
        trace->clamp_events = 0;
    }

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (deadline && std::chrono::steady_clock::now() > *deadline)
            throw TimeoutError("flow fit exceeded its deadline");
        double epoch_nll = 0.0;
        if (full_batch) {
            EvalResult res = eval_flow(lay, cfg, model.params, cause, effect, ws, nullptr, &grad);
            if (!res.finite) throw DivergedTrainingError("training loss became non-finite");
            if (trace) trace->clamp_events += res.clamped;
            epoch_nll = -res.total_ll / static_cast<double>(n);
            Eigen::VectorXd gstep = -grad / static_cast<double>(n);
            if (cfg.l2_penalty > 0.0) gstep += cfg.l2_penalty * model.params;
            gstep.array() *= mask;
            ++step;
            mom = beta1 * mom + (1.0 - beta1) * gstep;
            vel = beta2 * vel + (1.0 - beta2) * gstep.cwiseProduct(gstep);
            const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
            const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
            model.params.array() -=
                cfg.learning_rate * (mom.array() / bc1) / ((vel.array() / bc2).sqrt() + adam_eps);
        } else {
            // Seeded per-epoch shuffle, then sequential mini-batches.
            Rng shuffle_rng(derive_seed(seed, 0xBA7C, static_cast<std::uint64_t>(epoch)));
            for (Eigen::Index i = n - 1; i > 0; --i) {
                const Eigen::Index j =
                    static_cast<Eigen::Index>(shuffle_rng.next_u64() % static_cast<std::uint64_t>(i + 1));
                std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
            }
            double epoch_total = 0.0;
            for (Eigen::Index start = 0; start < n; start += bs) {
                const Eigen::Index len = std::min<Eigen::Index>(bs, n - start);
                bc.resize(len);
                be.resize(len);
                for (Eigen::Index i = 0; i < len; ++i) {
                    bc[i] = cause[order[static_cast<std::size_t>(start + i)]];
                    be[i] = effect[order[static_cast<std::size_t>(start + i)]];
                }
                EvalResult res = eval_flow(lay, cfg, model.params, bc, be, ws, nullptr, &grad);
                if (!res.finite) throw DivergedTrainingError("training loss became non-finite");
                if (trace) trace->clamp_events += res.clamped;
                epoch_total += -res.total_ll;
                Eigen::VectorXd gstep = -grad / static_cast<double>(len);
                if (cfg.l2_penalty > 0.0) gstep += cfg.l2_penalty * model.params;
                gstep.array() *= mask;
                ++step;
                mom = beta1 * mom + (1.0 - beta1) * gstep;
                vel = beta2 * vel + (1.0 - beta2) * gstep.cwiseProduct(gstep);
                const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
                const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
                model.params.array() -=
                    cfg.learning_rate * (mom.array() / bc1) / ((vel.array() / bc2).sqrt() + adam_eps);
            }
            epoch_nll = epoch_total / static_cast<double>(n);
        }
        if (trace) trace->epoch_loss.push_back(epoch_nll);
        if (!model.params.allFinite()) throw DivergedTrainingError("parameters became non-finite");
    }
    return model;
}

ConditionalMoments conditional_moments(const FlowModel& m, const std::vector<double>& cause) {
    FlowLayout lay(m.config);
    const double* p = m.params.data();
    const int K = lay.n_subflows;
    ConditionalMoments out;
    out.mean.resize(cause.size());
    out.scale.resize(cause.size());
    std::vector<double> chain(static_cast<std::size_t>(K) + 1);
    for (std::size_t i = 0; i < cause.size(); ++i) {
        chain[static_cast<std::size_t>(K)] = cause[i];
        for (int k = K; k >= 1; --k)
            chain[static_cast<std::size_t>(k - 1)] =
                (chain[static_cast<std::size_t>(k)] - p[lay.t1(k - 1)]) *
                std::exp(-clamp_s(p[lay.s1(k - 1)]));
        double f = 0.0, g = 1.0;
        for (int k = 1; k <= K; ++k) {
            const double ck = chain[static_cast<std::size_t>(k)];
            const double s2 = clamp_s(mlp_eval(lay.mlp, p + lay.s2(k - 1), ck));
            f = mlp_eval(lay.mlp, p + lay.t2(k - 1), ck) + std::exp(s2) * f;
            g *= std::exp(s2);
        }
        out.mean[i] = f;
        out.scale[i] = g;
    }
    return out;
}

std::vector<double> residuals(const FlowModel& m, const PairDataset& d) {
    return latent_residuals(m, d).effect;
}

LatentPair latent_residuals(const FlowModel& m, const PairDataset& d) {
    validate(d);
    LatentPair out;
    out.cause.resize(d.size());
    out.effect.resize(d.size());
    const bool fwd = m.direction == Direction::Forward;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double c = fwd ? d.x[i] : d.y[i];
        const double e = fwd ? d.y[i] : d.x[i];
        auto [ec, ee] = inverse_map(m, c, e);
        out.cause[i] = ec;
        out.effect[i] = ee;
    }
    return out;
}

std::string save_checkpoint(const FlowModel& m) {
    FlowLayout lay(m.config);
    nlohmann::json j;
    j["config"] = {{"n_subflows", m.config.n_subflows},
                   {"hidden_width", m.config.hidden_width},
                   {"mlp_layers", m.config.mlp_layers},
                   {"prior", to_string(m.config.prior)},
                   {"epochs", m.config.epochs},
                   {"l2_penalty", m.config.l2_penalty},
                   {"learning_rate", m.config.learning_rate},
                   {"batch_size", m.config.batch_size},
                   {"anm_restricted", m.config.anm_restricted}};
    j["direction"] = to_string(m.direction);
    nlohmann::json flows = nlohmann::json::array();
    for (int k = 0; k < m.config.n_subflows; ++k) {
        nlohmann::json sf;
        sf["t1"] = m.params[static_cast<Eigen::Index>(lay.t1(k))];
        sf["s1"] = m.params[static_cast<Eigen::Index>(lay.s1(k))];
        std::vector<double> t2(m.params.data() + lay.t2(k), m.params.data() + lay.t2(k) + lay.mlp.params);
        std::vector<double> s2(m.params.data() + lay.s2(k), m.params.data() + lay.s2(k) + lay.mlp.params);
        sf["t2"] = t2;
        sf["s2"] = s2;
        flows.push_back(std::move(sf));
    }
    j["subflows"] = std::move(flows);
    return j.dump(2) + "\n";
}

FlowModel load_checkpoint(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    FlowModel m;
    const auto& c = j.at("config");
    m.config.n_subflows = c.at("n_subflows").get<int>();
    m.config.hidden_width = c.at("hidden_width").get<int>();
    m.config.mlp_layers = c.at("mlp_layers").get<int>();
    m.config.prior = parse_prior(c.at("prior").get<std::string>());
    m.config.epochs = c.at("epochs").get<int>();
    m.config.l2_penalty = c.at("l2_penalty").get<double>();
    m.config.learning_rate = c.at("learning_rate").get<double>();
    m.config.batch_size = c.at("batch_size").get<int>();
    m.config.anm_restricted = c.at("anm_restricted").get<bool>();
    m.config.check();
    const std::string dir = j.at("direction").get<std::string>();
    if (dir == "forward")
        m.direction = Direction::Forward;
    else if (dir == "backward")
        m.direction = Direction::Backward;
    else
        throw InvalidParamsError("checkpoint direction must be forward or backward");
    FlowLayout lay(m.config);
    m.params.setZero(static_cast<Eigen::Index>(lay.total()));
    const auto& flows = j.at("subflows");
    if (flows.size() != static_cast<std::size_t>(m.config.n_subflows))
        throw InvalidParamsError("checkpoint sub-flow count mismatch");
    for (int k = 0; k < m.config.n_subflows; ++k) {
        const auto& sf = flows[static_cast<std::size_t>(k)];
        m.params[static_cast<Eigen::Index>(lay.t1(k))] = sf.at("t1").get<double>();
        m.params[static_cast<Eigen::Index>(lay.s1(k))] = sf.at("s1").get<double>();
        const auto t2 = sf.at("t2").get<std::vector<double>>();
        const auto s2 = sf.at("s2").get<std::vector<double>>();
        if (t2.size() != lay.mlp.params || s2.size() != lay.mlp.params)
            throw InvalidParamsError("checkpoint MLP parameter count mismatch");
        std::copy(t2.begin(), t2.end(), m.params.data() + lay.t2(k));
        std::copy(s2.begin(), s2.end(), m.params.data() + lay.s2(k));
    }
    if (!m.params.allFinite()) throw InvalidParamsError("checkpoint parameters must be finite");
    return m;
}

}  // namespace lsnm
