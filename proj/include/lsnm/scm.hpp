#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lsnm/dataset.hpp"
#include "lsnm/rng.hpp"

namespace lsnm {

enum class NoiseTag {
    Gaussian,             // (mu, sigma)
    Laplace,              // (mu, b)
    Uniform,              // (a, b)
    Exponential,          // (lambda)
    Beta,                 // (alpha, beta)
    ContinuousBernoulli,  // (lambda in (0,1))
};

struct NoiseFamily {
    NoiseTag tag = NoiseTag::Gaussian;
    double p1 = 0.0;
    double p2 = 1.0;

    static NoiseFamily gaussian(double mu = 0.0, double sigma = 1.0) { return {NoiseTag::Gaussian, mu, sigma}; }
    static NoiseFamily laplace(double mu = 0.0, double b = 1.0) { return {NoiseTag::Laplace, mu, b}; }
    static NoiseFamily uniform(double a, double b) { return {NoiseTag::Uniform, a, b}; }
    static NoiseFamily exponential(double lambda) { return {NoiseTag::Exponential, lambda, 0.0}; }
    static NoiseFamily beta(double a, double b) { return {NoiseTag::Beta, a, b}; }
    static NoiseFamily continuous_bernoulli(double lambda) { return {NoiseTag::ContinuousBernoulli, lambda, 0.0}; }
};

// Throws InvalidParamsError if the parameters violate the family's constraints.
void validate(const NoiseFamily& f);

std::string to_string(const NoiseFamily& f);
NoiseFamily parse_noise(const std::string& text);  // e.g. "gaussian:0,1", "uniform:-1,1", "cb:0.9"

// Closed-form moments, used by tests and by the suitability diagnostic.
double noise_mean(const NoiseFamily& f);
double noise_stddev(const NoiseFamily& f);

// n i.i.d. draws, deterministic given the seed.
std::vector<double> sample_noise(const NoiseFamily& f, std::size_t n, std::uint64_t seed);
double sample_noise_one(const NoiseFamily& f, Rng& rng);

enum class ScmFamily {
    LsnmTanhExpCosine,  // Y = tanh(X*th1)*th2 + exp(cos(X*ps1)*ps2) * e
    LsnmSineTanh,       // Y = sin(X*th1)*th2 + (tanh(X*ps1) + phi) * e
    LsnmSigmoidSigmoid, // Y = sig(X*th1)*th2 + sig(X*ps1)*ps2 * e
    AnmSine,            // Y = sin(X*th1)*th2 + e
    AnmTanh,            // Y = tanh(X*th1)*th2 + e
    AnmSigmoid,         // Y = sig(X*th1)*th2 + e
};

bool is_anm(ScmFamily f);
const char* to_string(ScmFamily f);
ScmFamily parse_scm_family(const std::string& text);

// Ground-truth generator spec. theta/psi magnitudes live in [0.5, 2] with a
// random sign (psi2 of sigmoid-sigmoid stays positive so the scale is > 0);
// phi is uniform on [1, 2].
struct ScmSpec {
    ScmFamily family = ScmFamily::LsnmSineTanh;
    double theta1 = 1.0;
    double theta2 = 1.0;
    double psi1 = 1.0;
    double psi2 = 1.0;
    double phi = 1.5;
    NoiseFamily noise = NoiseFamily::gaussian();
    double alpha = 1.0;
    NoiseFamily cause_noise = NoiseFamily::gaussian();
};

ScmSpec sample_scm_spec(ScmFamily family, const NoiseFamily& noise, double alpha, std::uint64_t seed);

// f and g of the structural equation Y = f(X) + alpha * g(X) * e.
// g is identically 1 for ANM families; alpha is not folded in.
double scm_mean(const ScmSpec& spec, double x);
double scm_scale(const ScmSpec& spec, double x);

struct GeneratedData {
    PairDataset data;                 // truth = Forward
    std::vector<double> cause_draws;  // the sampled X values (== cause noise)
    std::vector<double> noise_draws;  // the sampled effect noise e
};

GeneratedData generate(const ScmSpec& spec, std::size_t n, std::uint64_t seed);

// JSON manifest describing a generated dataset (family, coefficients, noise,
// alpha, seed, truth); written next to the data file by the CLI.
std::string spec_manifest_json(const ScmSpec& spec, std::size_t n, std::uint64_t seed);

}  // namespace lsnm
