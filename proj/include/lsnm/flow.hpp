#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lsnm/dataset.hpp"

namespace lsnm {

enum class PriorKind { Laplace, Gaussian };

const char* to_string(PriorKind p);
PriorKind parse_prior(const std::string& text);

double prior_log_density(PriorKind p, double z);

// Affine autoregressive flow over (cause, effect). Each sub-flow maps a latent
// pair (u1, u2) to (v1, v2) with
//     v1 = t1 + exp(s1) * u1
//     v2 = t2(v1) + exp(s2(v1)) * u2
// where t1, s1 are scalars and t2, s2 are small tanh MLPs. Sub-flows are stacked
// with the same ordering, so the cause coordinate never depends on the effect
// and the composed model stays location-scale in the effect given the cause.
struct FlowConfig {
    int n_subflows = 4;
    int hidden_width = 5;
    int mlp_layers = 4;  // linear layers per conditioner MLP (1 -> h -> ... -> 1)
    PriorKind prior = PriorKind::Laplace;
    int epochs = 750;
    double l2_penalty = 0.0;
    double learning_rate = 1e-3;
    int batch_size = 512;  // 0 = full batch
    bool anm_restricted = false;  // freeze s1 and s2 at 0, i.e. unit scales

    void check() const;  // throws InvalidParamsError
};

struct FlowModel {
    Direction direction = Direction::Forward;  // Forward: cause = x; Backward: cause = y
    FlowConfig config;
    Eigen::VectorXd params;  // flat: per sub-flow [t1, s1, t2 MLP, s2 MLP]
};

std::size_t param_count(const FlowConfig& cfg);

// Deterministic initialization: t1 = s1 = 0, MLP weights and biases uniform
// on +-1/sqrt(fan_in).
FlowModel init_flow(Direction dir, const FlowConfig& cfg, std::uint64_t seed);

// Latent -> observed, applying sub-flows innermost to outermost.
std::pair<double, double> forward_map(const FlowModel& m, double eps_cause, double eps_effect);

// Observed -> latent; exact inverse of forward_map.
std::pair<double, double> inverse_map(const FlowModel& m, double obs_cause, double obs_effect);

struct LogLik {
    std::vector<double> per_point;
    double total = 0.0;
};

// Joint log-likelihood of the dataset under the flow (the direction decides
// which column plays the cause). Throws NonFiniteError if an evaluation
// overflows.
LogLik log_likelihood(const FlowModel& m, const PairDataset& d);

// Gradient of the total log-likelihood with respect to the flat parameters.
Eigen::VectorXd gradient(const FlowModel& m, const PairDataset& d);

struct FitTrace {
    std::vector<double> epoch_loss;  // mean negative log-likelihood per epoch
    // s-outputs hitting the [-7, 7] clamp during training; nonzero values mean
    // the fitted scales saturated somewhere and the model deviates from a pure
    // exponential parameterization there.
    std::uint64_t clamp_events = 0;
};

using Deadline = std::chrono::steady_clock::time_point;

// Maximizes the training log-likelihood with Adam (beta1 0.9, beta2 0.999,
// eps 1e-8) for cfg.epochs epochs over seeded mini-batches (batch_size 0 =
// full batch).
// Deterministic given the seed. Throws DivergedTrainingError if the loss
// becomes non-finite, TimeoutError if the deadline passes.
FlowModel fit(const PairDataset& train, Direction dir, const FlowConfig& cfg, std::uint64_t seed,
              FitTrace* trace = nullptr, const Deadline* deadline = nullptr);

struct ConditionalMoments {
    std::vector<double> mean;   // fhat: effect at zero effect-latent
    std::vector<double> scale;  // ghat: composed exp(s2 ...) factors, > 0
};

ConditionalMoments conditional_moments(const FlowModel& m, const std::vector<double>& cause);

// Effect residuals (effect - fhat(cause)) / ghat(cause) on d, equal to the
// effect latent of inverse_map.
std::vector<double> residuals(const FlowModel& m, const PairDataset& d);

struct LatentPair {
    std::vector<double> cause;
    std::vector<double> effect;
};

// Both latent coordinates of inverse_map over the dataset; the cause latent is
// the marginal residual (cause - t1)/exp(s1) composed across the stack.
LatentPair latent_residuals(const FlowModel& m, const PairDataset& d);

// JSON checkpoint with config, direction and flat parameter arrays per sub-flow.
std::string save_checkpoint(const FlowModel& m);
FlowModel load_checkpoint(const std::string& json_text);

}  // namespace lsnm
