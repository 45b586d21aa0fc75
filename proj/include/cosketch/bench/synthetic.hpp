#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cosketch/rng.hpp"
#include "cosketch/sparse.hpp"

namespace cosketch::bench {

struct SyntheticSpec {
    std::size_t m_x = 0;
    std::size_t m_y = 0;
    std::size_t n = 0;
    double density = 0.01;               // of the low-rank part
    std::vector<double> profile;         // target nonzero singular values, non-increasing
    double noise_density = 0.0;          // 0 = no noise
    std::uint64_t seed = 0;

    void validate() const;
};

// Descending profile [top, top-1, ..., 1].
std::vector<double> linear_profile(std::size_t top);

// Sparse m x n matrix with singular values exactly `profile` (up to rounding):
// the profile is planted on a random diagonal and spread by random plane
// rotations of rows, then of columns, until the nonzero count reaches
// density * m * n. Uses an m x n dense workspace.
SparseMatrix sparse_lowrank(std::size_t m, std::size_t n, double density,
                            std::span<const double> profile, Rng& rng);

// Uniform random sparse matrix, entries U(0,1), each position present with
// probability `density`.
SparseMatrix sparse_uniform(std::size_t m, std::size_t n, double density, Rng& rng);

// (X, Y) pair: independent low-rank parts sharing the profile, plus
// independent uniform noise when noise_density > 0. An empty profile yields
// noise only.
std::pair<SparseMatrix, SparseMatrix> generate_lowrank(const SyntheticSpec& spec);

// Desk-scale stand-ins for the low-rank and noisy low-rank datasets.
SyntheticSpec preset(const std::string& name, std::uint64_t seed = 1);

}  // namespace cosketch::bench
