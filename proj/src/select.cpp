#include "lsnm/select.hpp"

#include <cmath>
#include <limits>

#include "lsnm/errors.hpp"
#include "lsnm/hsic.hpp"
#include "lsnm/rng.hpp"

namespace lsnm {

const char* to_string(Method m) {
    switch (m) {
        case Method::MaxLikelihood: return "ml";
        case Method::HsicCauseResidual: return "it";
        case Method::HsicResidualPair: return "it-rr";
    }
    return "?";
}

Method parse_method(const std::string& text) {
    if (text == "ml") return Method::MaxLikelihood;
    if (text == "it") return Method::HsicCauseResidual;
    if (text == "it-rr") return Method::HsicResidualPair;
    throw InvalidParamsError("unknown method '" + text + "' (expected ml, it or it-rr)");
}

double default_split_fraction(Method m) { return m == Method::MaxLikelihood ? 0.8 : 1.0; }

FittedDirections fit_both_directions(const PairDataset& d, const FlowConfig& cfg,
                                     const SplitSpec& split_spec, std::uint64_t seed,
                                     const Deadline* deadline) {
    FittedDirections out;
    auto [train, test] = split(d, split_spec);
    out.train = std::move(train);
    out.test = std::move(test);
    const std::uint64_t seed_fwd = derive_seed(seed, /*stream=*/0xF17, 0);
    const std::uint64_t seed_bwd = derive_seed(seed, /*stream=*/0xF17, 1);
    try {
        out.forward = fit(out.train, Direction::Forward, cfg, seed_fwd, nullptr, deadline);
    } catch (const TimeoutError&) {
        throw;
    } catch (const Error& e) {
        out.forward_error = e.what();
    }
    try {
        out.backward = fit(out.train, Direction::Backward, cfg, seed_bwd, nullptr, deadline);
    } catch (const TimeoutError&) {
        throw;
    } catch (const Error& e) {
        out.backward_error = e.what();
    }
    if (!out.forward && !out.backward)
        throw DivergedTrainingError("both directional fits failed: [" + out.forward_error +
                                    "] [" + out.backward_error + "]");
    return out;
}

namespace {

// Assembles the verdict from per-direction scores; `larger_wins` encodes the
// rule's orientation. NoConclusion only on an exact tie.
DirectionVerdict assemble(const FittedDirections& fits, Method rule, double score_fwd,
                          double score_bwd, bool larger_wins) {
    DirectionVerdict v;
    v.rule = rule;
    v.score_forward = score_fwd;
    v.score_backward = score_bwd;
    v.model_forward = fits.forward;
    v.model_backward = fits.backward;
    if (!fits.forward || !fits.backward) {
        v.degraded = true;
        v.note = !fits.forward ? "forward fit failed: " + fits.forward_error
                               : "backward fit failed: " + fits.backward_error;
        v.decision = fits.forward ? Direction::Forward : Direction::Backward;
        return v;
    }
    if (score_fwd == score_bwd) {
        v.decision = Direction::NoConclusion;
    } else if ((score_fwd > score_bwd) == larger_wins) {
        v.decision = Direction::Forward;
    } else {
        v.decision = Direction::Backward;
    }
    return v;
}

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

DirectionVerdict score_max_likelihood(const FittedDirections& fits) {
    const double sf = fits.forward ? log_likelihood(*fits.forward, fits.test).total : kNan;
    const double sb = fits.backward ? log_likelihood(*fits.backward, fits.test).total : kNan;
    return assemble(fits, Method::MaxLikelihood, sf, sb, /*larger_wins=*/true);
}

DirectionVerdict score_residual_independence(const FittedDirections& fits) {
    double sf = kNan, sb = kNan;
    if (fits.forward) {
        const std::vector<double> r = residuals(*fits.forward, fits.test);
        sf = hsic_statistic(fits.test.x, r).statistic;
    }
    if (fits.backward) {
        const std::vector<double> r = residuals(*fits.backward, fits.test);
        sb = hsic_statistic(fits.test.y, r).statistic;
    }
    return assemble(fits, Method::HsicCauseResidual, sf, sb, /*larger_wins=*/false);
}

DirectionVerdict score_residual_pair_independence(const FittedDirections& fits) {
    double sf = kNan, sb = kNan;
    if (fits.forward) {
        const LatentPair lat = latent_residuals(*fits.forward, fits.test);
        sf = hsic_statistic(lat.cause, lat.effect).statistic;
    }
    if (fits.backward) {
        const LatentPair lat = latent_residuals(*fits.backward, fits.test);
        sb = hsic_statistic(lat.cause, lat.effect).statistic;
    }
    return assemble(fits, Method::HsicResidualPair, sf, sb, /*larger_wins=*/false);
}

DirectionVerdict select_max_likelihood(const PairDataset& d, const FlowConfig& cfg,
                                       const SplitSpec& split, std::uint64_t seed,
                                       const Deadline* deadline) {
    return score_max_likelihood(fit_both_directions(d, cfg, split, seed, deadline));
}

DirectionVerdict select_residual_independence(const PairDataset& d, const FlowConfig& cfg,
                                              const SplitSpec& split, std::uint64_t seed,
                                              const Deadline* deadline) {
    return score_residual_independence(fit_both_directions(d, cfg, split, seed, deadline));
}

DirectionVerdict select_residual_pair_independence(const PairDataset& d, const FlowConfig& cfg,
                                                   const SplitSpec& split, std::uint64_t seed,
                                                   const Deadline* deadline) {
    return score_residual_pair_independence(fit_both_directions(d, cfg, split, seed, deadline));
}

DirectionVerdict select_direction(Method m, const PairDataset& d, const FlowConfig& cfg,
                                  const SplitSpec& split, std::uint64_t seed,
                                  const Deadline* deadline) {
    switch (m) {
        case Method::MaxLikelihood: return select_max_likelihood(d, cfg, split, seed, deadline);
        case Method::HsicCauseResidual:
            return select_residual_independence(d, cfg, split, seed, deadline);
        case Method::HsicResidualPair:
            return select_residual_pair_independence(d, cfg, split, seed, deadline);
    }
    throw InvalidParamsError("bad method");
}

}  // namespace lsnm
