#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lsnm/dataset.hpp"
#include "lsnm/flow.hpp"
#include "lsnm/scm.hpp"

namespace lsnm {

enum class CauseAxis { X, Y };

// Mean conditional variance: equal-frequency bins over the cause axis, then
// the count-weighted mean of per-bin variances of the other variable
// (population convention, matching standardize). Throws TooFewPointsError if
// n < 2 * n_bins.
double binned_cv(const PairDataset& d, CauseAxis cause, int n_bins = 10);

struct CvReport {
    double mvar_effect_given_cause = 0.0;
    double mvar_cause_given_effect = 0.0;
    int n_bins = 10;
    bool misleading = false;  // == (mvar_effect_given_cause > mvar_cause_given_effect)
};

// Both MVARs with the designated cause axis as ground truth. When `cause` is
// not given, the dataset's truth tag decides (Forward -> x is the cause).
CvReport misleading_cv(const PairDataset& d, int n_bins = 10,
                       std::optional<CauseAxis> cause = std::nullopt);

// Reconstruction error between a residual vector and the true noise draws:
// both are standardized over the sample (residuals are only identified up to
// shift and scale) and paired by rank before the mean squared difference.
// Rank pairing compares the reconstructed noise distribution to the true one;
// index pairing would be dominated by the estimator's O(dof/n) statistical
// error, which never reaches the reported magnitudes. A vector with zero
// variance standardizes to all zeros.
double residual_reconstruction_error(const std::vector<double>& predicted,
                                     const std::vector<double>& truth);

struct SuitabilityPoint {
    std::size_t n = 0;       // per-side sample count (train and test each get n)
    double s_cause = 0.0;    // mean squared error of the standardized cause residual
    double s_effect = 0.0;   // same for the effect residual
    std::vector<double> s_effect_trials;  // per-trial values behind the mean
};

struct SuitabilityReport {
    std::vector<SuitabilityPoint> points;
};

// For each N: draw 2N points from the spec, standardize, split 50/50, fit the
// forward flow on the train half and compare test residuals against the true
// noise draws. Both residual and noise vectors are standardized over the test
// sample before the mean squared error (residuals are only identified up to
// shift and scale). Averaged over `trials` fresh datasets.
SuitabilityReport suitability(const ScmSpec& spec, const FlowConfig& cfg,
                              const std::vector<std::size_t>& ns, int trials, std::uint64_t seed,
                              int jobs = 1);

struct SweepCell {
    double alpha = 1.0;
    std::uint64_t seed = 0;
    double mvar_effect_given_cause = 0.0;
    double mvar_cause_given_effect = 0.0;
    double loglik_diff_per_point = 0.0;  // mean test log-lik, causal minus anti-causal
    double hsic_diff = 0.0;              // HSIC score, causal minus anti-causal
    Direction decision_ml = Direction::NoConclusion;
    Direction decision_it = Direction::NoConclusion;
    bool correct_ml = false;
    bool correct_it = false;
};

struct SweepSummary {
    double alpha = 1.0;
    double mean_mvar_effect_given_cause = 0.0;
    double mean_mvar_cause_given_effect = 0.0;
    double misleading_fraction = 0.0;
    double mean_loglik_diff = 0.0;
    double mean_hsic_diff = 0.0;
    double accuracy_ml = 0.0;  // NoConclusion counts as incorrect
    double accuracy_it = 0.0;
};

struct SweepResult {
    ScmFamily family;
    NoiseFamily noise;
    FlowConfig config;
    std::size_t n = 0;
    std::vector<SweepCell> cells;       // one per (alpha, seed)
    std::vector<SweepSummary> summary;  // one per alpha
};

struct SweepOptions {
    bool run_ml = true;
    bool run_it = true;
    int n_bins = 10;
    int jobs = 1;
};

// One freshly drawn SCM and dataset per (alpha, seed) cell; data standardized;
// the likelihood rule uses an 0.8 split and the independence rule recycles the
// full data, both with derived seeds.
SweepResult alpha_sweep(ScmFamily family, const NoiseFamily& noise, const FlowConfig& cfg,
                        const std::vector<double>& alphas, int n_seeds, std::size_t n,
                        std::uint64_t base_seed, const SweepOptions& opt = {});

std::string sweep_cells_csv(const SweepResult& r);
std::string sweep_summary_json(const SweepResult& r);

}  // namespace lsnm
