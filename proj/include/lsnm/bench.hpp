#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lsnm/dataset.hpp"
#include "lsnm/select.hpp"

namespace lsnm {

struct BenchmarkSuite {
    std::string name;
    std::vector<PairDataset> datasets;  // every dataset carries truth and weight
};

// Tuebingen cause-effect pairs. Expects pairNNNN.txt files plus pairmeta.txt
// (pair id, cause column range, effect column range, weight). Pairs with a
// multi-column cause or effect and the ids excluded below are skipped; the
// kept columns are standardized. Throws MissingMetaError without pairmeta.txt
// and MalformedPairError (naming the pair) on unreadable data.
BenchmarkSuite load_tuebingen(const std::string& directory);

// Ids excluded from the Tuebingen corpus (multivariate and discrete pairs),
// leaving 99 bivariate datasets.
const std::vector<int>& tuebingen_exclusions();

enum class SimVariant { Sim, SimC, SimLn, SimG };
const char* to_string(SimVariant v);

// SIM benchmark loader: pairNNNN.txt files (pairmeta.txt optional for the
// orientation), unit weights, columns standardized. `directory` may point at
// the variant directory itself or at its parent.
BenchmarkSuite load_sim(const std::string& directory, SimVariant variant);

// Built-in 60-dataset synthetic sweep: the three LSNM families crossed with
// Gaussian(0,1) and uniform(-1,1) noise, 10 datasets each, alpha 1, n = 1000,
// standardized.
BenchmarkSuite synthetic_suite(std::uint64_t seed, std::size_t n = 1000);

struct DatasetVerdict {
    std::string name;
    double weight = 1.0;
    std::optional<Direction> truth;
    Direction decision = Direction::NoConclusion;
    double score_forward = 0.0;
    double score_backward = 0.0;
    double seconds = 0.0;
    bool correct = false;
    std::string error;  // nonempty when the dataset failed or timed out
};

struct BenchResult {
    std::string suite;
    Method method = Method::HsicCauseResidual;
    FlowConfig config;
    double split_fraction = 1.0;
    std::uint64_t base_seed = 0;
    double accuracy = 0.0;           // NoConclusion and failures count as incorrect
    double weighted_accuracy = 0.0;  // sum w_i correct_i / sum w_i
    std::vector<DatasetVerdict> rows;
};

struct BenchOptions {
    int jobs = 1;
    std::chrono::seconds per_dataset_timeout{600};
};

// Runs the method over every dataset (seed = base_seed ^ dataset index).
// Per-dataset failures are recorded, not fatal.
BenchResult run_benchmark(const BenchmarkSuite& suite, Method method, const FlowConfig& cfg,
                          double split_fraction, std::uint64_t base_seed,
                          const BenchOptions& opt = {});

// rows.csv holds the deterministic per-dataset columns; wall times live in
// summary.json so reruns with the same seed are byte-identical.
std::string rows_csv(const BenchResult& r);
std::string summary_json(const BenchResult& r);
BenchResult parse_summary_json(const std::string& json_text);

// Stable hash of the configuration knobs, used for the results directory
// layout results/<suite>/<method>/<config-hash>/.
std::string config_hash(const FlowConfig& cfg, double split_fraction, std::uint64_t base_seed);

}  // namespace lsnm
