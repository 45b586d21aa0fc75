#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "cosketch/cod.hpp"
#include "cosketch/scod.hpp"
#include "cosketch/sparse.hpp"

namespace cosketch::bench {

enum class Algorithm { scod, cod, fd, cs, rp };

Algorithm parse_algorithm(const std::string& name);
std::string to_string(Algorithm a);

struct RunOptions {
    ScodMode mode = ScodMode::practical;
    double delta = 0.1;
    double power_constant = 1.0;
};

struct SketchRun {
    SketchPair sketch;
    double wall_time_s = 0.0;          // streaming + finalize only
    std::int64_t peak_aux_scalars = 0;  // tracked working memory above baseline
    std::size_t triggers = 0;           // SCOD buffer flushes / COD, FD shrinks
    ScodTelemetry scod;                 // populated for SCOD only
};

// Streams the columns of (X, Y) through one sketcher.
SketchRun run_sketch(Algorithm algo, const SparseMatrix& x, const SparseMatrix& y, std::size_t l,
                     const RunOptions& opts, std::uint64_t seed);

}  // namespace cosketch::bench
