// Command-line front end: run experiment grids, generate synthetic datasets
// and evaluate one algorithm on a pair of Matrix Market files.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "cosketch/bench/experiment.hpp"
#include "cosketch/bench/synthetic.hpp"
#include "cosketch/error.hpp"
#include "cosketch/mmio.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 1, kData = 2, kNumerical = 3 };

using namespace cosketch;

// A non-zero exit if any cell hit a numerical failure; the CSV is still written.
int exit_for(const std::vector<bench::BenchReport>& rows) {
    for (const auto& r : rows)
        if (r.status == "numerical_error") return kNumerical;
    return kOk;
}

std::vector<bench::BenchReport> emit(const std::string& out_path,
                                     const std::function<std::vector<bench::BenchReport>(std::ostream&)>& body) {
    if (out_path.empty() || out_path == "-") return body(std::cout);
    std::ofstream out(out_path);
    if (!out) throw ConfigError("cannot open output file '" + out_path + "'");
    return body(out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming co-sketches for approximate sparse matrix products"};
    app.require_subcommand(1);

    std::string config_path, run_out;
    auto* run = app.add_subcommand("run", "Run an experiment grid described by a config file");
    run->add_option("--config", config_path, "Experiment config (key = value lines)")->required();
    run->add_option("--out", run_out, "CSV output path (default: stdout)");

    std::string preset_name, gen_dir;
    std::uint64_t gen_seed = 1;
    auto* gen = app.add_subcommand("gen", "Write a synthetic (X, Y) pair as Matrix Market files");
    gen->add_option("--preset", preset_name, "Dataset preset")
        ->required()
        ->check(CLI::IsMember({"lowrank", "noisy"}));
    gen->add_option("--out", gen_dir, "Output directory (receives x.mtx and y.mtx)")->required();
    gen->add_option("--seed", gen_seed, "Generator seed");

    std::string x_path, y_path, algo_name, mode_name = "practical", eval_out;
    std::size_t l = 16, seeds = 1, k = 8;
    double delta = 0.1;
    std::uint64_t master_seed = 1;
    auto* eval = app.add_subcommand("eval", "Sketch (X, Y) with one algorithm and report errors");
    eval->add_option("--x", x_path, "X as Matrix Market (m_x x n)")->required();
    eval->add_option("--y", y_path, "Y as Matrix Market (m_y x n)")->required();
    eval->add_option("--algo", algo_name, "Algorithm")
        ->required()
        ->check(CLI::IsMember({"scod", "cod", "fd", "cs", "rp"}));
    eval->add_option("--l", l, "Sketch size")->required();
    eval->add_option("--seeds", seeds, "Number of seeded trials");
    eval->add_option("--mode", mode_name, "SCOD mode")->check(CLI::IsMember({"practical", "verified"}));
    eval->add_option("--delta", delta, "SCOD failure probability");
    eval->add_option("--k", k, "Projection rank (capped at l/2)");
    eval->add_option("--master-seed", master_seed, "Seed from which trial seeds are derived");
    eval->add_option("--out", eval_out, "CSV output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (*run) {
            const auto cfg = bench::load_config(config_path);
            return exit_for(emit(run_out, [&](std::ostream& o) { return bench::run_experiment(cfg, o); }));
        }
        if (*gen) {
            const auto spec = bench::preset(preset_name, gen_seed);
            const auto [x, y] = bench::generate_lowrank(spec);
            std::filesystem::create_directories(gen_dir);
            write_matrix_market((std::filesystem::path(gen_dir) / "x.mtx").string(), x);
            write_matrix_market((std::filesystem::path(gen_dir) / "y.mtx").string(), y);
            std::cerr << "wrote " << x.rows() << "x" << x.cols() << " and " << y.rows() << "x"
                      << y.cols() << " to " << gen_dir << "\n";
            return kOk;
        }
        if (*eval) {
            bench::ExperimentConfig cfg;
            cfg.dataset = "file";
            cfg.path = x_path;
            cfg.algorithms = {bench::parse_algorithm(algo_name)};
            cfg.l_grid = {l};
            cfg.seeds = seeds;
            cfg.k = k;
            cfg.delta = delta;
            cfg.mode = mode_name == "verified" ? ScodMode::verified : ScodMode::practical;
            cfg.master_seed = master_seed;
            cfg.validate();
            const auto x = read_matrix_market(x_path);
            const auto y = read_matrix_market(y_path);
            if (x.cols() != y.cols())
                throw DataError("X has " + std::to_string(x.cols()) + " columns but Y has " +
                                std::to_string(y.cols()));
            return exit_for(emit(eval_out, [&](std::ostream& o) {
                auto rows = bench::run_grid(cfg, x, y);
                bench::write_csv(o, rows);
                return rows;
            }));
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    } catch (const DimensionError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    }
    return kOk;
}
