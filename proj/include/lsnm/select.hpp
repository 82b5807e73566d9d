#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "lsnm/dataset.hpp"
#include "lsnm/flow.hpp"

namespace lsnm {

enum class Method {
    MaxLikelihood,          // pick the direction with the higher test log-likelihood
    HsicCauseResidual,      // pick the smaller HSIC(putative cause, effect residual)
    HsicResidualPair,       // pick the smaller HSIC between the two latent residuals
};

const char* to_string(Method m);
Method parse_method(const std::string& text);  // "ml", "it", "it-rr"

// Data-recycling (fraction 1.0) suits the independence rules; the likelihood
// rule prefers a held-out test set.
double default_split_fraction(Method m);

struct DirectionVerdict {
    Direction decision = Direction::NoConclusion;
    double score_forward = 0.0;
    double score_backward = 0.0;
    Method rule = Method::MaxLikelihood;
    std::optional<FlowModel> model_forward;
    std::optional<FlowModel> model_backward;
    bool degraded = false;  // one directional fit failed; decision favors the survivor
    std::string note;
};

// Both directional fits of one dataset, sharing the train/test split. The two
// fits use independently derived seeds and may be reused across rules.
struct FittedDirections {
    std::optional<FlowModel> forward;
    std::optional<FlowModel> backward;
    PairDataset train;
    PairDataset test;
    std::string forward_error;
    std::string backward_error;
};

FittedDirections fit_both_directions(const PairDataset& d, const FlowConfig& cfg,
                                     const SplitSpec& split, std::uint64_t seed,
                                     const Deadline* deadline = nullptr);

// Scoring of already-fitted directions under each rule.
DirectionVerdict score_max_likelihood(const FittedDirections& fits);
DirectionVerdict score_residual_independence(const FittedDirections& fits);
DirectionVerdict score_residual_pair_independence(const FittedDirections& fits);

// One-call variants: fit both directions on the train part, then apply the rule.
DirectionVerdict select_max_likelihood(const PairDataset& d, const FlowConfig& cfg,
                                       const SplitSpec& split, std::uint64_t seed,
                                       const Deadline* deadline = nullptr);
DirectionVerdict select_residual_independence(const PairDataset& d, const FlowConfig& cfg,
                                              const SplitSpec& split, std::uint64_t seed,
                                              const Deadline* deadline = nullptr);
DirectionVerdict select_residual_pair_independence(const PairDataset& d, const FlowConfig& cfg,
                                                   const SplitSpec& split, std::uint64_t seed,
                                                   const Deadline* deadline = nullptr);

DirectionVerdict select_direction(Method m, const PairDataset& d, const FlowConfig& cfg,
                                  const SplitSpec& split, std::uint64_t seed,
                                  const Deadline* deadline = nullptr);

}  // namespace lsnm
