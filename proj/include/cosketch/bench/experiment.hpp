#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cosketch/bench/runner.hpp"
#include "cosketch/sparse.hpp"

namespace cosketch::bench {

// Flat `key = value` experiment description; `#` starts a comment.
struct ExperimentConfig {
    std::string dataset = "lowrank";  // lowrank | noisy | random | file
    std::string path;                 // Matrix Market file for dataset = file
    std::optional<std::size_t> split; // column split for dataset = file
    std::size_t m_x = 200;
    std::size_t m_y = 300;
    std::size_t n = 3000;
    double density = 0.02;
    std::size_t profile_max = 40;
    double noise_density = 0.02;      // used by dataset = noisy
    std::vector<Algorithm> algorithms{Algorithm::scod, Algorithm::cod, Algorithm::fd,
                                      Algorithm::cs, Algorithm::rp};
    std::vector<std::size_t> l_grid{8, 16, 32, 64};
    std::size_t seeds = 50;
    std::size_t k = 8;
    double delta = 0.1;
    ScodMode mode = ScodMode::practical;
    std::uint64_t master_seed = 1;
    double power_constant = 1.0;

    void validate() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

struct BenchReport {
    std::string algorithm;
    std::size_t l = 0;
    std::size_t seed = 0;  // trial index within the cell
    double approx_error = 0.0;
    double projection_error = 0.0;
    double wall_time_s = 0.0;
    std::int64_t peak_aux_scalars = 0;
    std::size_t triggers = 0;
    std::string status = "ok";
};

struct Aggregate {
    std::string algorithm;
    std::size_t l = 0;
    BenchReport mean;
    BenchReport stddev;
};

// Seed of one grid cell, derived from (master_seed, algorithm, l, trial).
std::uint64_t cell_seed(std::uint64_t master, Algorithm a, std::size_t l, std::size_t trial);

// Dataset named by the config (generated or loaded).
std::pair<SparseMatrix, SparseMatrix> make_dataset(const ExperimentConfig& cfg);

// Runs every (algorithm, l, trial) cell on (X, Y). Cells run in parallel;
// the returned order is algorithm-major, then l, then trial.
std::vector<BenchReport> run_grid(const ExperimentConfig& cfg, const SparseMatrix& x,
                                  const SparseMatrix& y);

std::vector<Aggregate> aggregate(const std::vector<BenchReport>& rows);

inline constexpr const char* kCsvHeader =
    "algorithm,l,seed,approx_error,projection_error,wall_time_s,peak_aux_scalars,triggers,status";

// Header, one row per cell, then a `mean` and a `std` row per (algorithm, l).
void write_csv(std::ostream& out, const std::vector<BenchReport>& rows);

std::vector<BenchReport> run_experiment(const ExperimentConfig& cfg, std::ostream& csv);

}  // namespace cosketch::bench
