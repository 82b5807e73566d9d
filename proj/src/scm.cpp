#include "lsnm/scm.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lsnm/errors.hpp"

namespace lsnm {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Marsaglia-Tsang gamma sampler (shape >= 1 after boost), deterministic given
// the stream. Used only for the beta family.
double sample_gamma(double shape, Rng& rng) {
    if (shape < 1.0) {
        const double u = rng.uniform01_open_low();
        return sample_gamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z = rng.gaussian();
        const double t = 1.0 + c * z;
        if (t <= 0.0) continue;
        const double v = t * t * t;
        const double u = rng.uniform01_open_low();
        if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) return d * v;
    }
}

}  // namespace

void validate(const NoiseFamily& f) {
    switch (f.tag) {
        case NoiseTag::Gaussian:
            if (!(f.p2 > 0.0)) throw InvalidParamsError("gaussian: sigma must be > 0");
            break;
        case NoiseTag::Laplace:
            if (!(f.p2 > 0.0)) throw InvalidParamsError("laplace: b must be > 0");
            break;
        case NoiseTag::Uniform:
            if (!(f.p1 < f.p2)) throw InvalidParamsError("uniform: requires a < b");
            break;
        case NoiseTag::Exponential:
            if (!(f.p1 > 0.0)) throw InvalidParamsError("exponential: lambda must be > 0");
            break;
        case NoiseTag::Beta:
            if (!(f.p1 > 0.0) || !(f.p2 > 0.0)) throw InvalidParamsError("beta: parameters must be > 0");
            break;
        case NoiseTag::ContinuousBernoulli:
            if (!(f.p1 > 0.0) || !(f.p1 < 1.0))
                throw InvalidParamsError("continuous bernoulli: lambda must be in (0,1)");
            break;
    }
}

std::string to_string(const NoiseFamily& f) {
    std::ostringstream out;
    switch (f.tag) {
        case NoiseTag::Gaussian: out << "gaussian:" << f.p1 << "," << f.p2; break;
        case NoiseTag::Laplace: out << "laplace:" << f.p1 << "," << f.p2; break;
        case NoiseTag::Uniform: out << "uniform:" << f.p1 << "," << f.p2; break;
        case NoiseTag::Exponential: out << "exponential:" << f.p1; break;
        case NoiseTag::Beta: out << "beta:" << f.p1 << "," << f.p2; break;
        case NoiseTag::ContinuousBernoulli: out << "cb:" << f.p1; break;
    }
    return out.str();
}

NoiseFamily parse_noise(const std::string& text) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    std::vector<double> args;
    if (colon != std::string::npos) {
        std::string rest = text.substr(colon + 1);
        for (auto& c : rest)
            if (c == ',') c = ' ';
        std::istringstream in(rest);
        double v;
        while (in >> v) args.push_back(v);
    }
    auto arg = [&](std::size_t i, double dflt) { return i < args.size() ? args[i] : dflt; };
    NoiseFamily f;
    if (head == "gaussian" || head == "normal")
        f = NoiseFamily::gaussian(arg(0, 0.0), arg(1, 1.0));
    else if (head == "laplace")
        f = NoiseFamily::laplace(arg(0, 0.0), arg(1, 1.0));
    else if (head == "uniform")
        f = NoiseFamily::uniform(arg(0, -1.0), arg(1, 1.0));
    else if (head == "exponential" || head == "exp")
        f = NoiseFamily::exponential(arg(0, 1.0));
    else if (head == "beta")
        f = NoiseFamily::beta(arg(0, 0.5), arg(1, 0.5));
    else if (head == "cb" || head == "continuous-bernoulli")
        f = NoiseFamily::continuous_bernoulli(arg(0, 0.9));
    else
        throw InvalidParamsError("unknown noise family '" + head + "'");
    validate(f);
    return f;
}

double noise_mean(const NoiseFamily& f) {
    switch (f.tag) {
        case NoiseTag::Gaussian: return f.p1;
        case NoiseTag::Laplace: return f.p1;
        case NoiseTag::Uniform: return 0.5 * (f.p1 + f.p2);
        case NoiseTag::Exponential: return 1.0 / f.p1;
        case NoiseTag::Beta: return f.p1 / (f.p1 + f.p2);
        case NoiseTag::ContinuousBernoulli: {
            const double l = f.p1;
            if (std::abs(l - 0.5) < 1e-12) return 0.5;
            return l / (2.0 * l - 1.0) + 1.0 / (2.0 * std::atanh(1.0 - 2.0 * l));
        }
    }
    return 0.0;
}

double noise_stddev(const NoiseFamily& f) {
    switch (f.tag) {
        case NoiseTag::Gaussian: return f.p2;
        case NoiseTag::Laplace: return f.p2 * std::sqrt(2.0);
        case NoiseTag::Uniform: return (f.p2 - f.p1) / std::sqrt(12.0);
        case NoiseTag::Exponential: return 1.0 / f.p1;
        case NoiseTag::Beta: {
            const double a = f.p1, b = f.p2;
            return std::sqrt(a * b / ((a + b) * (a + b) * (a + b + 1.0)));
        }
        case NoiseTag::ContinuousBernoulli: {
            const double l = f.p1;
            if (std::abs(l - 0.5) < 1e-12) return 1.0 / std::sqrt(12.0);
            // var = lambda(lambda-1)/(1-2 lambda)^2 + 1/(2 atanh(1-2 lambda))^2
            const double a = std::atanh(1.0 - 2.0 * l);
            const double var = l * (l - 1.0) / ((1.0 - 2.0 * l) * (1.0 - 2.0 * l)) + 1.0 / (4.0 * a * a);
            return std::sqrt(var);
        }
    }
    return 1.0;
}

double sample_noise_one(const NoiseFamily& f, Rng& rng) {
    switch (f.tag) {
        case NoiseTag::Gaussian:
            return f.p1 + f.p2 * rng.gaussian();
        case NoiseTag::Laplace: {
            const double u = rng.uniform01() - 0.5;
            const double s = u < 0.0 ? -1.0 : 1.0;
            return f.p1 - f.p2 * s * std::log(1.0 - 2.0 * std::abs(u));
        }
        case NoiseTag::Uniform:
            return rng.uniform(f.p1, f.p2);
        case NoiseTag::Exponential:
            return -std::log(rng.uniform01_open_low()) / f.p1;
        case NoiseTag::Beta: {
            const double g1 = sample_gamma(f.p1, rng);
            const double g2 = sample_gamma(f.p2, rng);
            return g1 / (g1 + g2);
        }
        case NoiseTag::ContinuousBernoulli: {
            const double l = f.p1;
            const double u = rng.uniform01();
            if (std::abs(l - 0.5) < 1e-12) return u;
            // Inverse CDF: log(1 + u*(r - 1)) / log(r) with r = l/(1-l).
            const double r = l / (1.0 - l);
            return std::log1p(u * (r - 1.0)) / std::log(r);
        }
    }
    return 0.0;
}

std::vector<double> sample_noise(const NoiseFamily& f, std::size_t n, std::uint64_t seed) {
    validate(f);
    if (n < 1) throw InvalidParamsError("sample_noise: n must be >= 1");
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = sample_noise_one(f, rng);
    return out;
}

bool is_anm(ScmFamily f) {
    return f == ScmFamily::AnmSine || f == ScmFamily::AnmTanh || f == ScmFamily::AnmSigmoid;
}

const char* to_string(ScmFamily f) {
    switch (f) {
        case ScmFamily::LsnmTanhExpCosine: return "lsnm-tanh-exp-cosine";
        case ScmFamily::LsnmSineTanh: return "lsnm-sine-tanh";
        case ScmFamily::LsnmSigmoidSigmoid: return "lsnm-sigmoid-sigmoid";
        case ScmFamily::AnmSine: return "anm-sine";
        case ScmFamily::AnmTanh: return "anm-tanh";
        case ScmFamily::AnmSigmoid: return "anm-sigmoid";
    }
    return "?";
}

ScmFamily parse_scm_family(const std::string& text) {
    for (ScmFamily f : {ScmFamily::LsnmTanhExpCosine, ScmFamily::LsnmSineTanh,
                        ScmFamily::LsnmSigmoidSigmoid, ScmFamily::AnmSine, ScmFamily::AnmTanh,
                        ScmFamily::AnmSigmoid})
        if (text == to_string(f)) return f;
    throw InvalidParamsError("unknown SCM family '" + text + "'");
}

namespace {

// Magnitude uniform on [0.5, 2] with an independent random sign, i.e. uniform
// on [-2,-0.5] u [0.5,2].
double sample_coefficient(Rng& rng, bool allow_negative = true) {
    const double mag = rng.uniform(0.5, 2.0);
    if (!allow_negative) return mag;
    return (rng.next_u64() & 1u) ? mag : -mag;
}

}  // namespace

ScmSpec sample_scm_spec(ScmFamily family, const NoiseFamily& noise, double alpha,
                        std::uint64_t seed) {
    validate(noise);
    if (!(alpha > 0.0)) throw InvalidParamsError("alpha must be > 0");
    Rng rng(derive_seed(seed, /*stream=*/0xC0EF));
    ScmSpec spec;
    spec.family = family;
    spec.noise = noise;
    spec.alpha = alpha;
    spec.theta1 = sample_coefficient(rng);
    spec.theta2 = sample_coefficient(rng);
    switch (family) {
        case ScmFamily::LsnmTanhExpCosine:
            spec.psi1 = sample_coefficient(rng);
            spec.psi2 = sample_coefficient(rng);
            break;
        case ScmFamily::LsnmSineTanh:
            spec.psi1 = sample_coefficient(rng);
            spec.phi = rng.uniform(1.0, 2.0);
            break;
        case ScmFamily::LsnmSigmoidSigmoid:
            spec.psi1 = sample_coefficient(rng);
            // psi2 multiplies the sigmoid scale; keep it positive so g > 0.
            spec.psi2 = sample_coefficient(rng, /*allow_negative=*/false);
            break;
        default:
            break;  // ANM families use theta only
    }
    return spec;
}

double scm_mean(const ScmSpec& spec, double x) {
    switch (spec.family) {
        case ScmFamily::LsnmTanhExpCosine: return std::tanh(x * spec.theta1) * spec.theta2;
        case ScmFamily::LsnmSineTanh: return std::sin(x * spec.theta1) * spec.theta2;
        case ScmFamily::LsnmSigmoidSigmoid: return sigmoid(x * spec.theta1) * spec.theta2;
        case ScmFamily::AnmSine: return std::sin(x * spec.theta1) * spec.theta2;
        case ScmFamily::AnmTanh: return std::tanh(x * spec.theta1) * spec.theta2;
        case ScmFamily::AnmSigmoid: return sigmoid(x * spec.theta1) * spec.theta2;
    }
    return 0.0;
}

double scm_scale(const ScmSpec& spec, double x) {
    switch (spec.family) {
        case ScmFamily::LsnmTanhExpCosine: return std::exp(std::cos(x * spec.psi1) * spec.psi2);
        case ScmFamily::LsnmSineTanh: return std::tanh(x * spec.psi1) + spec.phi;
        case ScmFamily::LsnmSigmoidSigmoid: return sigmoid(x * spec.psi1) * spec.psi2;
        default: return 1.0;
    }
}

GeneratedData generate(const ScmSpec& spec, std::size_t n, std::uint64_t seed) {
    if (n < 2) throw InvalidParamsError("generate: n must be >= 2");
    validate(spec.noise);
    validate(spec.cause_noise);
    if (!(spec.alpha > 0.0)) throw InvalidParamsError("generate: alpha must be > 0");

    Rng cause_rng(derive_seed(seed, /*stream=*/0xCA05E));
    Rng noise_rng(derive_seed(seed, /*stream=*/0x015E));

    GeneratedData out;
    out.cause_draws.resize(n);
    out.noise_draws.resize(n);
    out.data.x.resize(n);
    out.data.y.resize(n);
    out.data.truth = Direction::Forward;
    out.data.name = to_string(spec.family);
    for (std::size_t i = 0; i < n; ++i) out.cause_draws[i] = sample_noise_one(spec.cause_noise, cause_rng);
    for (std::size_t i = 0; i < n; ++i) out.noise_draws[i] = sample_noise_one(spec.noise, noise_rng);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = out.cause_draws[i];
        out.data.x[i] = x;
        out.data.y[i] = scm_mean(spec, x) + spec.alpha * scm_scale(spec, x) * out.noise_draws[i];
    }
    return out;
}

std::string spec_manifest_json(const ScmSpec& spec, std::size_t n, std::uint64_t seed) {
    nlohmann::json j;
    j["family"] = to_string(spec.family);
    j["coefficients"] = {{"theta1", spec.theta1},
                         {"theta2", spec.theta2},
                         {"psi1", spec.psi1},
                         {"psi2", spec.psi2},
                         {"phi", spec.phi}};
    j["noise"] = to_string(spec.noise);
    j["cause_noise"] = to_string(spec.cause_noise);
    j["alpha"] = spec.alpha;
    j["n"] = n;
    j["seed"] = seed;
    j["truth"] = to_string(Direction::Forward);
    return j.dump(2) + "\n";
}

}  // namespace lsnm
