#include "lsnm/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lsnm/errors.hpp"
#include "lsnm/parallel.hpp"
#include "lsnm/scm.hpp"

namespace fs = std::filesystem;

namespace lsnm {

namespace {

struct MetaLine {
    int id = 0;
    int cause_first = 0, cause_last = 0;
    int effect_first = 0, effect_last = 0;
    double weight = 1.0;
};

std::vector<MetaLine> read_pairmeta(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingMetaError("missing metadata file '" + path.string() + "'");
    std::vector<MetaLine> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream row(line);
        MetaLine m;
        if (!(row >> m.id >> m.cause_first >> m.cause_last >> m.effect_first >> m.effect_last >>
              m.weight))
            throw MissingMetaError("malformed metadata line: '" + line + "'");
        out.push_back(m);
    }
    if (out.empty()) throw MissingMetaError("metadata file '" + path.string() + "' is empty");
    return out;
}

std::string pair_file_name(int id) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "pair%04d.txt", id);
    return buf;
}

PairDataset load_pair_file(const fs::path& path, const std::string& name) {
    try {
        PairDataset d = load_pair_text(path.string());
        d.name = name;
        return d;
    } catch (const Error& e) {
        throw MalformedPairError("pair '" + name + "': " + e.what());
    }
}

}  // namespace

const std::vector<int>& tuebingen_exclusions() {
    static const std::vector<int> ids = {47, 52, 53, 54, 55, 70, 71, 105, 107};
    return ids;
}

BenchmarkSuite load_tuebingen(const std::string& directory) {
    const fs::path dir(directory);
    const std::vector<MetaLine> meta = read_pairmeta(dir / "pairmeta.txt");
    const auto& excluded = tuebingen_exclusions();

    BenchmarkSuite suite;
    suite.name = "tuebingen";
    for (const MetaLine& m : meta) {
        if (std::find(excluded.begin(), excluded.end(), m.id) != excluded.end()) continue;
        // Bivariate pairs only: single-column cause and effect in columns 1-2.
        if (m.cause_first != m.cause_last || m.effect_first != m.effect_last) continue;
        if (m.cause_first > 2 || m.effect_first > 2) continue;
        const std::string name = pair_file_name(m.id);
        PairDataset d = load_pair_file(dir / name, "pair" + std::to_string(m.id));
        d.weight = m.weight;
        d.truth = m.cause_first == 1 ? Direction::Forward : Direction::Backward;
        try {
            d = standardize(d);
        } catch (const Error& e) {
            throw MalformedPairError("pair '" + d.name + "': " + e.what());
        }
        suite.datasets.push_back(std::move(d));
    }
    return suite;
}

const char* to_string(SimVariant v) {
    switch (v) {
        case SimVariant::Sim: return "SIM";
        case SimVariant::SimC: return "SIM-c";
        case SimVariant::SimLn: return "SIM-ln";
        case SimVariant::SimG: return "SIM-G";
    }
    return "?";
}

BenchmarkSuite load_sim(const std::string& directory, SimVariant variant) {
    fs::path dir(directory);
    if (!fs::exists(dir / "pair0001.txt") && fs::exists(dir / to_string(variant)))
        dir /= to_string(variant);
    if (!fs::is_directory(dir))
        throw Error("SIM directory '" + dir.string() + "' does not exist");

    BenchmarkSuite suite;
    suite.name = to_string(variant);
    std::vector<MetaLine> meta;
    if (fs::exists(dir / "pairmeta.txt")) {
        meta = read_pairmeta(dir / "pairmeta.txt");
    } else {
        for (int id = 1; id <= 9999; ++id) {
            if (!fs::exists(dir / pair_file_name(id))) break;
            MetaLine m;
            m.id = id;
            m.cause_first = m.cause_last = 1;
            m.effect_first = m.effect_last = 2;
            meta.push_back(m);
        }
        if (meta.empty()) throw Error("no pairNNNN.txt files under '" + dir.string() + "'");
    }
    for (const MetaLine& m : meta) {
        PairDataset d = load_pair_file(dir / pair_file_name(m.id), "pair" + std::to_string(m.id));
        d.weight = 1.0;
        d.truth = m.cause_first == 1 ? Direction::Forward : Direction::Backward;
        try {
            d = standardize(d);
        } catch (const Error& e) {
            throw MalformedPairError("pair '" + d.name + "': " + e.what());
        }
        suite.datasets.push_back(std::move(d));
    }
    return suite;
}

BenchmarkSuite synthetic_suite(std::uint64_t seed, std::size_t n) {
    BenchmarkSuite suite;
    suite.name = "synthetic";
    const ScmFamily families[] = {ScmFamily::LsnmTanhExpCosine, ScmFamily::LsnmSineTanh,
                                  ScmFamily::LsnmSigmoidSigmoid};
    const NoiseFamily noises[] = {NoiseFamily::gaussian(), NoiseFamily::uniform(-1.0, 1.0)};
    std::size_t index = 0;
    for (const ScmFamily family : families) {
        for (const NoiseFamily& noise : noises) {
            for (int rep = 0; rep < 10; ++rep, ++index) {
                const std::uint64_t cell = derive_seed(seed, index);
                const ScmSpec spec = sample_scm_spec(family, noise, 1.0, derive_seed(cell, 1));
                GeneratedData gen = generate(spec, n, derive_seed(cell, 2));
                PairDataset d = standardize(gen.data);
                d.name = std::string(to_string(family)) + "/" + to_string(noise) + "/" +
                         std::to_string(rep);
                suite.datasets.push_back(std::move(d));
            }
        }
    }
    return suite;
}

BenchResult run_benchmark(const BenchmarkSuite& suite, Method method, const FlowConfig& cfg,
                          double split_fraction, std::uint64_t base_seed,
                          const BenchOptions& opt) {
    if (suite.datasets.empty()) throw InvalidParamsError("run_benchmark: empty suite");
    BenchResult result;
    result.suite = suite.name;
    result.method = method;
    result.config = cfg;
    result.split_fraction = split_fraction;
    result.base_seed = base_seed;
    result.rows.resize(suite.datasets.size());

    parallel_for(suite.datasets.size(), opt.jobs, [&](std::size_t i) {
        const PairDataset& d = suite.datasets[i];
        DatasetVerdict row;
        row.name = d.name;
        row.weight = d.weight;
        row.truth = d.truth;
        const std::uint64_t seed = base_seed ^ static_cast<std::uint64_t>(i);
        const auto started = std::chrono::steady_clock::now();
        const Deadline deadline = started + opt.per_dataset_timeout;
        try {
            const DirectionVerdict v = select_direction(
                method, d, cfg, SplitSpec{split_fraction, derive_seed(seed, 0x59)}, seed, &deadline);
            row.decision = v.decision;
            row.score_forward = v.score_forward;
            row.score_backward = v.score_backward;
            if (v.degraded) row.error = v.note;
        } catch (const Error& e) {
            row.decision = Direction::NoConclusion;
            row.error = e.what();
        }
        row.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        row.correct = row.truth && row.decision == *row.truth;
        result.rows[i] = std::move(row);
    });

    double w_sum = 0.0, w_correct = 0.0, n_correct = 0.0;
    for (const DatasetVerdict& row : result.rows) {
        w_sum += row.weight;
        if (row.correct) {
            w_correct += row.weight;
            n_correct += 1.0;
        }
    }
    result.accuracy = n_correct / static_cast<double>(result.rows.size());
    result.weighted_accuracy = w_sum > 0.0 ? w_correct / w_sum : 0.0;
    return result;
}

std::string rows_csv(const BenchResult& r) {
    std::ostringstream out;
    out << "name,weight,truth,decision,score_fwd,score_bwd\n";
    for (const DatasetVerdict& row : r.rows) {
        out << row.name << ',' << format_double(row.weight) << ','
            << (row.truth ? to_string(*row.truth) : "unknown") << ',' << to_string(row.decision)
            << ',' << format_double(row.score_forward) << ',' << format_double(row.score_backward)
            << '\n';
    }
    return out.str();
}

namespace {

nlohmann::json config_json(const FlowConfig& cfg) {
    return {{"n_subflows", cfg.n_subflows},
            {"hidden_width", cfg.hidden_width},
            {"mlp_layers", cfg.mlp_layers},
            {"prior", to_string(cfg.prior)},
            {"epochs", cfg.epochs},
            {"l2_penalty", cfg.l2_penalty},
            {"learning_rate", cfg.learning_rate},
            {"batch_size", cfg.batch_size},
            {"anm_restricted", cfg.anm_restricted}};
}

FlowConfig config_from_json(const nlohmann::json& c) {
    FlowConfig cfg;
    cfg.n_subflows = c.at("n_subflows").get<int>();
    cfg.hidden_width = c.at("hidden_width").get<int>();
    cfg.mlp_layers = c.at("mlp_layers").get<int>();
    cfg.prior = parse_prior(c.at("prior").get<std::string>());
    cfg.epochs = c.at("epochs").get<int>();
    cfg.l2_penalty = c.at("l2_penalty").get<double>();
    cfg.learning_rate = c.at("learning_rate").get<double>();
    cfg.batch_size = c.at("batch_size").get<int>();
    cfg.anm_restricted = c.at("anm_restricted").get<bool>();
    return cfg;
}

Direction parse_direction(const std::string& s) {
    if (s == "forward") return Direction::Forward;
    if (s == "backward") return Direction::Backward;
    return Direction::NoConclusion;
}

}  // namespace

std::string summary_json(const BenchResult& r) {
    nlohmann::json j;
    j["suite"] = r.suite;
    j["method"] = to_string(r.method);
    j["config"] = config_json(r.config);
    j["split_fraction"] = r.split_fraction;
    j["base_seed"] = r.base_seed;
    j["accuracy"] = r.accuracy;
    j["weighted_accuracy"] = r.weighted_accuracy;
    nlohmann::json rows = nlohmann::json::array();
    for (const DatasetVerdict& row : r.rows) {
        rows.push_back({{"name", row.name},
                        {"weight", row.weight},
                        {"truth", row.truth ? to_string(*row.truth) : "unknown"},
                        {"decision", to_string(row.decision)},
                        {"score_fwd", row.score_forward},
                        {"score_bwd", row.score_backward},
                        {"seconds", row.seconds},
                        {"correct", row.correct},
                        {"error", row.error}});
    }
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

BenchResult parse_summary_json(const std::string& json_text) {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    BenchResult r;
    r.suite = j.at("suite").get<std::string>();
    r.method = parse_method(j.at("method").get<std::string>());
    r.config = config_from_json(j.at("config"));
    r.split_fraction = j.at("split_fraction").get<double>();
    r.base_seed = j.at("base_seed").get<std::uint64_t>();
    r.accuracy = j.at("accuracy").get<double>();
    r.weighted_accuracy = j.at("weighted_accuracy").get<double>();
    for (const auto& row_json : j.at("rows")) {
        DatasetVerdict row;
        row.name = row_json.at("name").get<std::string>();
        row.weight = row_json.at("weight").get<double>();
        const std::string truth = row_json.at("truth").get<std::string>();
        if (truth != "unknown") row.truth = parse_direction(truth);
        row.decision = parse_direction(row_json.at("decision").get<std::string>());
        row.score_forward = row_json.at("score_fwd").get<double>();
        row.score_backward = row_json.at("score_bwd").get<double>();
        row.seconds = row_json.at("seconds").get<double>();
        row.correct = row_json.at("correct").get<bool>();
        row.error = row_json.at("error").get<std::string>();
        r.rows.push_back(std::move(row));
    }
    return r;
}

std::string config_hash(const FlowConfig& cfg, double split_fraction, std::uint64_t base_seed) {
    std::ostringstream canon;
    canon << config_json(cfg).dump() << '|' << format_double(split_fraction) << '|' << base_seed;
    const std::string s = canon.str();
    std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace lsnm
