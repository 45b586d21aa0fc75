#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>

#include "cosketch/cod.hpp"
#include "cosketch/dense.hpp"
#include "cosketch/rng.hpp"
#include "cosketch/sparse.hpp"

namespace cosketch {

struct SiConfig {
    std::size_t l = 0;
    double epsilon = 0.1;
    // q = ceil(power_constant * ln(m_x) / epsilon), at least 1.
    double power_constant = 1.0;
    // Re-orthonormalize the iterate whenever the estimated loss of
    // precision since the last orthonormalization exceeds this many digits.
    double reorth_digits = 6.0;

    void validate() const;
};

std::size_t power_count(std::size_t m_x, const SiConfig& cfg);

struct FactorPair {
    DenseMatrix c_x;  // m_x x l
    DenseMatrix c_y;  // m_y x l
};

struct SiStats {
    std::size_t power_steps = 0;
    std::size_t orthonormalizations = 0;
};

// Randomized simultaneous iteration on the factored product S_X S_Y^T.
// Returns (Q, S_Y S_X^T Q) with Q orthonormal, so c_x c_y^T = Q Q^T S_X S_Y^T.
FactorPair simultaneous_iteration(const CscView& s_x, const CscView& s_y, const SiConfig& cfg,
                                  Rng& rng, SiStats* stats = nullptr);

// Draws x ~ N(0, I) and checks ||(C C^T)^p x|| <= ||x|| with
// C = (S_X S_Y^T - C_X C_Y^T) / delta_scale, using factored products only.
bool verify_residual(const CscView& s_x, const CscView& s_y, const DenseMatrix& c_x,
                     const DenseMatrix& c_y, double delta_scale, std::size_t p, Rng& rng);

// Persistent state of boosted SI across invocations.
struct BsiState {
    std::uint64_t j = 0;  // completed invocations
    double delta = 0.1;
    std::size_t retry_cap = 64;
    double power_constant = 1.0;  // forwarded to SI

    // Totals since construction.
    std::size_t si_calls = 0;
    std::size_t verify_calls = 0;
};

// p = ceil(ln(2 j^2 sqrt(m_x e) / delta)).
std::size_t verification_power(std::uint64_t j, std::size_t m_x, double delta);

// (11 / (10 l)) * sum_i ||S_X,i|| ||S_Y,i||.
double residual_scale(const CscView& s_x, const CscView& s_y, std::size_t l);

FactorPair boosted_si(BsiState& state, const CscView& s_x, const CscView& s_y, std::size_t l,
                      Rng& rng);

enum class ScodMode { verified, practical };

struct ScodOptions {
    std::size_t l = 0;
    double delta = 0.1;
    ScodMode mode = ScodMode::verified;
    double power_constant = 1.0;
    std::size_t retry_cap = 64;
};

struct ScodTelemetry {
    std::size_t triggers = 0;
    std::size_t si_calls = 0;
    std::size_t verify_calls = 0;
    double si_seconds = 0.0;
    double shrink_seconds = 0.0;
};

// Sparse co-occurring directions.
class ScodSketcher {
public:
    ScodSketcher(std::size_t m_x, std::size_t m_y, const ScodOptions& opts, std::uint64_t seed);

    void update(SparseColumnView x, SparseColumnView y);
    // Flushes a non-empty buffer, then returns the width-l sketch.
    SketchPair finalize();

    const SketchPair& sketch() const noexcept { return sketch_; }
    const ColumnBufferPair& buffer() const noexcept { return buffer_; }
    const BsiState& bsi() const noexcept { return bsi_; }
    const ScodTelemetry& telemetry() const noexcept { return telemetry_; }
    std::size_t m() const noexcept { return m_; }

private:
    void flush();

    std::size_t m_x_, m_y_, m_;
    ScodOptions opts_;
    SketchPair sketch_;
    ColumnBufferPair buffer_;
    BsiState bsi_;
    Rng rng_;
    ScodTelemetry telemetry_;
};

SketchPair scod_sketch(const SparseMatrix& x, const SparseMatrix& y, const ScodOptions& opts,
                       std::uint64_t seed, ScodTelemetry* telemetry = nullptr);

}  // namespace cosketch
