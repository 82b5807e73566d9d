#include "lsnm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lsnm/errors.hpp"
#include "lsnm/parallel.hpp"
#include "lsnm/rng.hpp"
#include "lsnm/select.hpp"

namespace lsnm {

namespace {

double population_variance(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    const std::size_t m = hi - lo;
    double mean = 0.0;
    for (std::size_t i = lo; i < hi; ++i) mean += v[i];
    mean /= static_cast<double>(m);
    double ss = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        const double c = v[i] - mean;
        ss += c * c;
    }
    return ss / static_cast<double>(m);
}

std::vector<double> standardized_or_zero(const std::vector<double>& v) {
    ColumnStats st = column_stats(v);
    std::vector<double> out(v.size(), 0.0);
    if (!(st.stddev > 0.0)) return out;  // degenerate vector maps to all zeros
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - st.mean) / st.stddev;
    return out;
}

}  // namespace

double residual_reconstruction_error(const std::vector<double>& predicted,
                                     const std::vector<double>& truth) {
    if (predicted.size() != truth.size() || predicted.empty())
        throw LengthMismatchError("residual_reconstruction_error: size mismatch");
    std::vector<double> a = standardized_or_zero(predicted);
    std::vector<double> b = standardized_or_zero(truth);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s / static_cast<double>(a.size());
}

double binned_cv(const PairDataset& d, CauseAxis cause, int n_bins) {
    validate(d);
    if (n_bins < 1) throw InvalidParamsError("binned_cv: n_bins must be >= 1");
    const std::size_t n = d.size();
    if (n < 2 * static_cast<std::size_t>(n_bins))
        throw TooFewPointsError("binned_cv: needs at least 2 points per bin");

    const std::vector<double>& c = cause == CauseAxis::X ? d.x : d.y;
    const std::vector<double>& e = cause == CauseAxis::X ? d.y : d.x;
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return c[a] < c[b]; });
    std::vector<double> sorted_e(n);
    for (std::size_t i = 0; i < n; ++i) sorted_e[i] = e[idx[i]];

    // Equal-frequency boundaries; every bin gets floor(n/bins) or ceil(n/bins)
    // points, so the 2-per-bin floor is guaranteed by the precondition. A
    // degenerate bin folds into the following one.
    std::vector<std::size_t> bounds;
    bounds.push_back(0);
    for (int b = 1; b <= n_bins; ++b)
        bounds.push_back(n * static_cast<std::size_t>(b) / static_cast<std::size_t>(n_bins));
    double weighted = 0.0;
    std::size_t lo = 0;
    for (std::size_t b = 1; b < bounds.size(); ++b) {
        const std::size_t hi = bounds[b];
        if (hi - lo < 2 && b + 1 < bounds.size()) continue;  // merge right
        weighted += static_cast<double>(hi - lo) * population_variance(sorted_e, lo, hi);
        lo = hi;
    }
    return weighted / static_cast<double>(n);
}

CvReport misleading_cv(const PairDataset& d, int n_bins, std::optional<CauseAxis> cause) {
    CauseAxis axis;
    if (cause) {
        axis = *cause;
    } else if (d.truth && *d.truth != Direction::NoConclusion) {
        axis = *d.truth == Direction::Forward ? CauseAxis::X : CauseAxis::Y;
    } else {
        throw InvalidParamsError("misleading_cv: no truth tag; designate the cause axis");
    }
    CvReport r;
    r.n_bins = n_bins;
    r.mvar_effect_given_cause = binned_cv(d, axis, n_bins);
    r.mvar_cause_given_effect =
        binned_cv(d, axis == CauseAxis::X ? CauseAxis::Y : CauseAxis::X, n_bins);
    r.misleading = r.mvar_effect_given_cause > r.mvar_cause_given_effect;
    return r;
}

SuitabilityReport suitability(const ScmSpec& spec, const FlowConfig& cfg,
                              const std::vector<std::size_t>& ns, int trials, std::uint64_t seed,
                              int jobs) {
    if (ns.empty() || trials < 1) throw InvalidParamsError("suitability: empty grid");
    for (std::size_t n : ns)
        if (n < 20) throw InvalidParamsError("suitability: each N must be >= 20");

    struct Cell {
        double s_cause = 0.0, s_effect = 0.0;
    };
    std::vector<Cell> cells(ns.size() * static_cast<std::size_t>(trials));
    parallel_for(cells.size(), jobs, [&](std::size_t ci) {
        const std::size_t ni = ci / static_cast<std::size_t>(trials);
        const std::size_t trial = ci % static_cast<std::size_t>(trials);
        const std::size_t n = ns[ni];
        const std::uint64_t cell_seed = derive_seed(seed, ni, trial);

        GeneratedData gen = generate(spec, 2 * n, derive_seed(cell_seed, 1));
        PairDataset ds = standardize(gen.data);
        auto [train_idx, test_idx] =
            split_indices(2 * n, SplitSpec{0.5, derive_seed(cell_seed, 2)});
        PairDataset train, test;
        std::vector<double> eps_test, cause_test;
        train.name = test.name = ds.name;
        for (std::size_t k : train_idx) {
            train.x.push_back(ds.x[k]);
            train.y.push_back(ds.y[k]);
        }
        for (std::size_t k : test_idx) {
            test.x.push_back(ds.x[k]);
            test.y.push_back(ds.y[k]);
            eps_test.push_back(gen.noise_draws[k]);
            cause_test.push_back(gen.cause_draws[k]);
        }
        FlowModel model = fit(train, Direction::Forward, cfg, derive_seed(cell_seed, 3));
        const LatentPair lat = latent_residuals(model, test);
        cells[ci].s_effect = residual_reconstruction_error(lat.effect, eps_test);
        cells[ci].s_cause = residual_reconstruction_error(lat.cause, cause_test);
    });

    SuitabilityReport report;
    for (std::size_t ni = 0; ni < ns.size(); ++ni) {
        SuitabilityPoint p;
        p.n = ns[ni];
        for (int t = 0; t < trials; ++t) {
            const Cell& c = cells[ni * static_cast<std::size_t>(trials) + static_cast<std::size_t>(t)];
            p.s_cause += c.s_cause;
            p.s_effect += c.s_effect;
            p.s_effect_trials.push_back(c.s_effect);
        }
        p.s_cause /= trials;
        p.s_effect /= trials;
        report.points.push_back(p);
    }
    return report;
}

SweepResult alpha_sweep(ScmFamily family, const NoiseFamily& noise, const FlowConfig& cfg,
                        const std::vector<double>& alphas, int n_seeds, std::size_t n,
                        std::uint64_t base_seed, const SweepOptions& opt) {
    if (alphas.empty() || n_seeds < 1) throw InvalidParamsError("alpha_sweep: empty grid");
    SweepResult result;
    result.family = family;
    result.noise = noise;
    result.config = cfg;
    result.n = n;
    result.cells.resize(alphas.size() * static_cast<std::size_t>(n_seeds));

    parallel_for(result.cells.size(), opt.jobs, [&](std::size_t ci) {
        const std::size_t ai = ci / static_cast<std::size_t>(n_seeds);
        const std::size_t si = ci % static_cast<std::size_t>(n_seeds);
        const double alpha = alphas[ai];
        const std::uint64_t cell_seed = derive_seed(base_seed, ai, si);

        SweepCell cell;
        cell.alpha = alpha;
        cell.seed = cell_seed;
        const ScmSpec spec = sample_scm_spec(family, noise, alpha, derive_seed(cell_seed, 1));
        GeneratedData gen = generate(spec, n, derive_seed(cell_seed, 2));
        PairDataset ds = standardize(gen.data);

        const CvReport cv = misleading_cv(ds, opt.n_bins);
        cell.mvar_effect_given_cause = cv.mvar_effect_given_cause;
        cell.mvar_cause_given_effect = cv.mvar_cause_given_effect;

        if (opt.run_ml) {
            const DirectionVerdict v = select_max_likelihood(
                ds, cfg, SplitSpec{0.8, derive_seed(cell_seed, 3)}, derive_seed(cell_seed, 4));
            const auto n_test = static_cast<double>(n - split_train_count(n, 0.8));
            cell.loglik_diff_per_point = (v.score_forward - v.score_backward) / n_test;
            cell.decision_ml = v.decision;
            cell.correct_ml = v.decision == Direction::Forward;
        }
        if (opt.run_it) {
            const DirectionVerdict v = select_residual_independence(
                ds, cfg, SplitSpec{1.0, derive_seed(cell_seed, 5)}, derive_seed(cell_seed, 6));
            cell.hsic_diff = v.score_forward - v.score_backward;
            cell.decision_it = v.decision;
            cell.correct_it = v.decision == Direction::Forward;
        }
        result.cells[ci] = cell;
    });

    for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
        SweepSummary s;
        s.alpha = alphas[ai];
        for (int si = 0; si < n_seeds; ++si) {
            const SweepCell& c =
                result.cells[ai * static_cast<std::size_t>(n_seeds) + static_cast<std::size_t>(si)];
            s.mean_mvar_effect_given_cause += c.mvar_effect_given_cause;
            s.mean_mvar_cause_given_effect += c.mvar_cause_given_effect;
            s.misleading_fraction += c.mvar_effect_given_cause > c.mvar_cause_given_effect ? 1.0 : 0.0;
            s.mean_loglik_diff += c.loglik_diff_per_point;
            s.mean_hsic_diff += c.hsic_diff;
            s.accuracy_ml += c.correct_ml ? 1.0 : 0.0;
            s.accuracy_it += c.correct_it ? 1.0 : 0.0;
        }
        const double m = n_seeds;
        s.mean_mvar_effect_given_cause /= m;
        s.mean_mvar_cause_given_effect /= m;
        s.misleading_fraction /= m;
        s.mean_loglik_diff /= m;
        s.mean_hsic_diff /= m;
        s.accuracy_ml /= m;
        s.accuracy_it /= m;
        result.summary.push_back(s);
    }
    return result;
}

std::string sweep_cells_csv(const SweepResult& r) {
    std::ostringstream out;
    out << "alpha,seed,mvar_effect_given_cause,mvar_cause_given_effect,"
           "loglik_diff_per_point,hsic_diff,decision_ml,decision_it,correct_ml,correct_it\n";
    for (const SweepCell& c : r.cells) {
        out << format_double(c.alpha) << ',' << c.seed << ','
            << format_double(c.mvar_effect_given_cause) << ','
            << format_double(c.mvar_cause_given_effect) << ','
            << format_double(c.loglik_diff_per_point) << ',' << format_double(c.hsic_diff) << ','
            << to_string(c.decision_ml) << ',' << to_string(c.decision_it) << ','
            << (c.correct_ml ? 1 : 0) << ',' << (c.correct_it ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string sweep_summary_json(const SweepResult& r) {
    nlohmann::json j;
    j["family"] = to_string(r.family);
    j["noise"] = to_string(r.noise);
    j["n"] = r.n;
    j["prior"] = to_string(r.config.prior);
    nlohmann::json rows = nlohmann::json::array();
    for (const SweepSummary& s : r.summary) {
        rows.push_back({{"alpha", s.alpha},
                        {"mvar_effect_given_cause", s.mean_mvar_effect_given_cause},
                        {"mvar_cause_given_effect", s.mean_mvar_cause_given_effect},
                        {"misleading_fraction", s.misleading_fraction},
                        {"mean_loglik_diff", s.mean_loglik_diff},
                        {"mean_hsic_diff", s.mean_hsic_diff},
                        {"accuracy_ml", s.accuracy_ml},
                        {"accuracy_it", s.accuracy_it}});
    }
    j["per_alpha"] = std::move(rows);
    return j.dump(2) + "\n";
}

}  // namespace lsnm
