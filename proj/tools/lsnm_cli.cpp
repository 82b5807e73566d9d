// Command-line front end: generate synthetic datasets, infer a causal
// direction for one pair, sweep the noise-scale diagnostics, and run the
// benchmark suites.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "lsnm/bench.hpp"
#include "lsnm/dataset.hpp"
#include "lsnm/diagnostics.hpp"
#include "lsnm/errors.hpp"
#include "lsnm/flow.hpp"
#include "lsnm/parallel.hpp"
#include "lsnm/scm.hpp"
#include "lsnm/select.hpp"

namespace fs = std::filesystem;
using namespace lsnm;

namespace {

struct FlowFlags {
    int subflows = 4;
    int hidden = 5;
    int epochs = 750;
    double l2 = 0.0;
    std::string prior = "laplace";

    void attach(CLI::App* cmd) {
        cmd->add_option("--subflows", subflows, "Number of affine sub-flows");
        cmd->add_option("--hidden", hidden, "Hidden neurons per conditioner MLP layer");
        cmd->add_option("--epochs", epochs, "Training epochs");
        cmd->add_option("--l2", l2, "L2 penalty strength");
        cmd->add_option("--prior", prior, "Latent prior: laplace or gaussian");
    }
    FlowConfig config() const {
        FlowConfig cfg;
        cfg.n_subflows = subflows;
        cfg.hidden_width = hidden;
        cfg.epochs = epochs;
        cfg.l2_penalty = l2;
        cfg.prior = parse_prior(prior);
        cfg.check();
        return cfg;
    }
};

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << content;
}

int run(int argc, char** argv) {
    CLI::App app{"Cause-effect inference for location-scale noise models"};
    app.require_subcommand(1);

    // ---- generate ----
    auto* gen_cmd = app.add_subcommand("generate", "Sample a synthetic SCM dataset");
    std::string gen_family = "lsnm-sine-tanh", gen_noise = "gaussian:0,1", gen_out = "pair.txt";
    double gen_alpha = 1.0;
    std::size_t gen_n = 1000;
    std::uint64_t gen_seed = 0;
    gen_cmd->add_option("--family", gen_family, "SCM family");
    gen_cmd->add_option("--noise", gen_noise, "Effect noise, e.g. gaussian:0,1 uniform:-1,1 cb:0.9");
    gen_cmd->add_option("--alpha", gen_alpha, "Noise scale factor");
    gen_cmd->add_option("--n", gen_n, "Number of data pairs");
    gen_cmd->add_option("--seed", gen_seed, "Random seed");
    gen_cmd->add_option("--out", gen_out, "Output data file (manifest goes to <out>.json)");

    // ---- infer ----
    auto* infer_cmd = app.add_subcommand("infer", "Infer the causal direction of one dataset");
    std::string infer_path, infer_method = "it";
    double infer_split = -1.0;
    std::uint64_t infer_seed = 0;
    FlowFlags infer_flow;
    infer_cmd->add_option("data", infer_path, "Two-column dataset file")->required();
    infer_cmd->add_option("--method", infer_method, "ml, it or it-rr");
    infer_cmd->add_option("--split", infer_split, "Train fraction (default: 0.8 for ml, 1.0 for it)");
    infer_cmd->add_option("--seed", infer_seed, "Random seed");
    infer_flow.attach(infer_cmd);

    // ---- diagnose ----
    auto* diag_cmd = app.add_subcommand("diagnose", "Noise-scale sweep: CVs, scores, accuracy");
    std::string diag_family = "lsnm-sine-tanh", diag_noise = "uniform:-1,1", diag_out = "diagnose";
    std::vector<double> diag_alphas = {0.1, 0.5, 1.0, 5.0, 10.0};
    int diag_seeds = 10, diag_bins = 10, diag_jobs = default_jobs();
    std::size_t diag_n = 10000;
    std::uint64_t diag_seed = 0;
    FlowFlags diag_flow;
    diag_cmd->add_option("--family", diag_family, "SCM family");
    diag_cmd->add_option("--noise", diag_noise, "Ground-truth noise family");
    diag_cmd->add_option("--alphas", diag_alphas, "Noise scale grid")->delimiter(',');
    diag_cmd->add_option("--seeds", diag_seeds, "Datasets per alpha");
    diag_cmd->add_option("--n", diag_n, "Points per dataset");
    diag_cmd->add_option("--bins", diag_bins, "Bins for the conditional variances");
    diag_cmd->add_option("--seed", diag_seed, "Base seed");
    diag_cmd->add_option("--jobs", diag_jobs, "Worker threads");
    diag_cmd->add_option("--out", diag_out, "Output directory");
    diag_flow.attach(diag_cmd);

    // ---- bench ----
    auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark suite");
    std::string bench_suite = "synthetic", bench_method = "it", bench_data_dir = ".",
                bench_out = "results";
    double bench_split = -1.0;
    std::uint64_t bench_seed = 0;
    int bench_jobs = default_jobs();
    FlowFlags bench_flow;
    bench_cmd->add_option("--suite", bench_suite,
                          "tuebingen, sim, sim-c, sim-ln, sim-g or synthetic");
    bench_cmd->add_option("--method", bench_method, "ml, it or it-rr");
    bench_cmd->add_option("--split", bench_split, "Train fraction (default per method)");
    bench_cmd->add_option("--seed", bench_seed, "Base seed");
    bench_cmd->add_option("--jobs", bench_jobs, "Worker threads");
    bench_cmd->add_option("--data-dir", bench_data_dir, "Benchmark data directory");
    bench_cmd->add_option("--out", bench_out, "Results root directory");
    bench_flow.attach(bench_cmd);

    CLI11_PARSE(app, argc, argv);

    if (*gen_cmd) {
        const ScmFamily family = parse_scm_family(gen_family);
        const NoiseFamily noise = parse_noise(gen_noise);
        const ScmSpec spec = sample_scm_spec(family, noise, gen_alpha, derive_seed(gen_seed, 1));
        const GeneratedData gen = generate(spec, gen_n, derive_seed(gen_seed, 2));
        if (fs::path(gen_out).has_parent_path())
            fs::create_directories(fs::path(gen_out).parent_path());
        save_pair_text(gen.data, gen_out);
        write_file(gen_out + ".json", spec_manifest_json(spec, gen_n, gen_seed));
        std::cout << "wrote " << gen_n << " pairs to " << gen_out << "\n";
        return 0;
    }

    if (*infer_cmd) {
        const Method method = parse_method(infer_method);
        const PairDataset d = standardize(load_pair_text(infer_path));
        const double fraction = infer_split > 0.0 ? infer_split : default_split_fraction(method);
        const DirectionVerdict v = select_direction(method, d, infer_flow.config(),
                                                    SplitSpec{fraction, derive_seed(infer_seed, 0x59)},
                                                    infer_seed);
        std::cout << "decision: " << to_string(v.decision) << "\n"
                  << "score_forward: " << format_double(v.score_forward) << "\n"
                  << "score_backward: " << format_double(v.score_backward) << "\n";
        if (v.degraded) std::cout << "degraded: " << v.note << "\n";
        switch (v.decision) {
            case Direction::Forward: return 0;
            case Direction::Backward: return 1;
            case Direction::NoConclusion: return 2;
        }
        return 2;
    }

    if (*diag_cmd) {
        SweepOptions opt;
        opt.n_bins = diag_bins;
        opt.jobs = diag_jobs;
        const SweepResult r =
            alpha_sweep(parse_scm_family(diag_family), parse_noise(diag_noise), diag_flow.config(),
                        diag_alphas, diag_seeds, diag_n, diag_seed, opt);
        write_file(fs::path(diag_out) / "cells.csv", sweep_cells_csv(r));
        write_file(fs::path(diag_out) / "summary.json", sweep_summary_json(r));
        std::cout << "wrote " << r.cells.size() << " cells to " << diag_out << "\n";
        return 0;
    }

    if (*bench_cmd) {
        const Method method = parse_method(bench_method);
        BenchmarkSuite suite;
        if (bench_suite == "tuebingen")
            suite = load_tuebingen(bench_data_dir);
        else if (bench_suite == "sim")
            suite = load_sim(bench_data_dir, SimVariant::Sim);
        else if (bench_suite == "sim-c")
            suite = load_sim(bench_data_dir, SimVariant::SimC);
        else if (bench_suite == "sim-ln")
            suite = load_sim(bench_data_dir, SimVariant::SimLn);
        else if (bench_suite == "sim-g")
            suite = load_sim(bench_data_dir, SimVariant::SimG);
        else if (bench_suite == "synthetic")
            suite = synthetic_suite(derive_seed(bench_seed, 0xDA7A));
        else
            throw InvalidParamsError("unknown suite '" + bench_suite + "'");

        const FlowConfig cfg = bench_flow.config();
        const double fraction = bench_split > 0.0 ? bench_split : default_split_fraction(method);
        BenchOptions opt;
        opt.jobs = bench_jobs;
        const BenchResult r = run_benchmark(suite, method, cfg, fraction, bench_seed, opt);
        const fs::path out_dir = fs::path(bench_out) / suite.name / to_string(method) /
                                 config_hash(cfg, fraction, bench_seed);
        write_file(out_dir / "rows.csv", rows_csv(r));
        write_file(out_dir / "summary.json", summary_json(r));
        std::cout << "suite: " << suite.name << " (" << r.rows.size() << " datasets)\n"
                  << "accuracy: " << r.accuracy << "\n"
                  << "weighted_accuracy: " << r.weighted_accuracy << "\n"
                  << "results: " << out_dir.string() << "\n";
        return 0;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
