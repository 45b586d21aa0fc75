#include "cosketch/bench/runner.hpp"

#include <chrono>

#include "cosketch/baselines.hpp"
#include "cosketch/error.hpp"
#include "cosketch/memory.hpp"

namespace cosketch::bench {

Algorithm parse_algorithm(const std::string& name) {
    if (name == "scod") return Algorithm::scod;
    if (name == "cod") return Algorithm::cod;
    if (name == "fd") return Algorithm::fd;
    if (name == "cs") return Algorithm::cs;
    if (name == "rp") return Algorithm::rp;
    throw ConfigError("unknown algorithm '" + name + "' (expected scod|cod|fd|cs|rp)");
}

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::scod: return "scod";
        case Algorithm::cod: return "cod";
        case Algorithm::fd: return "fd";
        case Algorithm::cs: return "cs";
        case Algorithm::rp: return "rp";
    }
    return "unknown";
}

namespace {

template <class Sketcher>
void stream(Sketcher& s, const SparseMatrix& x, const SparseMatrix& y) {
    for (std::size_t i = 0; i < x.cols(); ++i) s.update(x.column(i), y.column(i));
}

}  // namespace

SketchRun run_sketch(Algorithm algo, const SparseMatrix& x, const SparseMatrix& y, std::size_t l,
                     const RunOptions& opts, std::uint64_t seed) {
    require_dims(x.cols() == y.cols(), "run_sketch: X and Y have different column counts");
    SketchRun run;
    const auto mx = x.rows(), my = y.rows();

    memory::PeakScope scope;
    const auto start = std::chrono::steady_clock::now();
    switch (algo) {
        case Algorithm::scod: {
            ScodOptions so;
            so.l = l;
            so.delta = opts.delta;
            so.mode = opts.mode;
            so.power_constant = opts.power_constant;
            ScodSketcher s(mx, my, so, seed);
            stream(s, x, y);
            run.sketch = s.finalize();
            run.scod = s.telemetry();
            run.triggers = run.scod.triggers;
            break;
        }
        case Algorithm::cod: {
            CodSketcher s(mx, my, l);
            stream(s, x, y);
            run.triggers = s.shrink_count();
            run.sketch = std::move(s).finalize();
            break;
        }
        case Algorithm::fd: {
            FdAmmSketcher s(mx, my, l);
            stream(s, x, y);
            run.triggers = s.shrink_count();
            run.sketch = s.finalize();
            break;
        }
        case Algorithm::cs: {
            CsSketcher s(mx, my, l, seed);
            stream(s, x, y);
            run.sketch = s.finalize();
            break;
        }
        case Algorithm::rp: {
            RpSketcher s(mx, my, l, seed);
            stream(s, x, y);
            run.sketch = s.finalize();
            break;
        }
    }
    run.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    run.peak_aux_scalars = scope.peak_scalars();
    return run;
}

}  // namespace cosketch::bench
