#include "cosketch/scod.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "cosketch/detail/shrink.hpp"
#include "cosketch/error.hpp"
#include "cosketch/kernels.hpp"
#include "cosketch/linalg.hpp"

namespace cosketch {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// The SI iterate is kept transposed (l x m, one column of the block per
// row) so the sparse products run over contiguous rows.

// Scales each row of kt to unit norm and returns log10 of the spread of the
// nonzero row norms. Rounding error in the weakest row is amplified relative
// to its own content by at most this many digits per step.
double normalize_rows(DenseMatrix& kt) {
    const std::size_t l = kt.rows();
    std::vector<double> sq(l, 0.0);
    for (std::size_t j = 0; j < kt.cols(); ++j) {
        const auto v = kt.col(j);
        for (std::size_t r = 0; r < l; ++r) sq[r] += v[r] * v[r];
    }
    double hi = 0.0, lo = 0.0;
    for (auto& n : sq) {
        if (n == 0.0) continue;
        n = std::sqrt(n);
        hi = std::max(hi, n);
        lo = lo == 0.0 ? n : std::min(lo, n);
        n = 1.0 / n;
    }
    for (std::size_t j = 0; j < kt.cols(); ++j) {
        auto v = kt.col(j);
        for (std::size_t r = 0; r < l; ++r) v[r] *= sq[r];
    }
    return lo > 0.0 ? std::log10(hi / lo) : 0.0;
}

// Orthonormalizes k in place and returns log10 of the spread of the nonzero
// R diagonal, i.e. how many digits of independence the block had lost.
double orthonormalize_block(DenseMatrix& k) {
    HouseholderQr qr(std::move(k), 1e-12);
    const auto r = qr.r();
    double hi = 0.0, lo = 0.0;
    for (std::size_t i = 0; i < r.cols(); ++i) {
        const double d = r(i, i);
        if (d <= 0.0) continue;
        hi = std::max(hi, d);
        lo = lo == 0.0 ? d : std::min(lo, d);
    }
    k = qr.thin_q();
    return (hi > 0.0 && lo > 0.0) ? std::log10(hi / lo) : 0.0;
}

// One Cholesky QR pass on the rows of kt. Returns the digits lost, or a
// negative value (leaving kt untouched) when the Gram matrix is too close to
// singular for the factorization to be trusted.
double cholesky_pass(DenseMatrix& kt) {
    const std::size_t l = kt.rows();
    DenseMatrix r(l, l);  // upper triangle used
    for (std::size_t j = 0; j < kt.cols(); ++j) {
        const auto v = kt.col(j);
        for (std::size_t b = 0; b < l; ++b) {
            const double vb = v[b];
            auto rb = r.col(b);
            for (std::size_t a = 0; a <= b; ++a) rb[a] += v[a] * vb;
        }
    }
    double gmax = 0.0;
    for (std::size_t a = 0; a < l; ++a) gmax = std::max(gmax, r(a, a));
    if (!(gmax > 0.0)) return -1.0;
    double hi = 0.0, lo = 0.0;
    for (std::size_t b = 0; b < l; ++b) {
        auto rb = r.col(b);
        for (std::size_t a = 0; a < b; ++a) {
            const auto ra = r.col(a);
            double t = rb[a];
            for (std::size_t c = 0; c < a; ++c) t -= ra[c] * rb[c];
            rb[a] = t / ra[a];
        }
        double d = rb[b];
        for (std::size_t c = 0; c < b; ++c) d -= rb[c] * rb[c];
        if (!(d > 1e-14 * gmax)) return -1.0;
        rb[b] = std::sqrt(d);
        hi = std::max(hi, rb[b]);
        lo = lo == 0.0 ? rb[b] : std::min(lo, rb[b]);
    }
    for (std::size_t j = 0; j < kt.cols(); ++j) {
        auto x = kt.col(j);
        for (std::size_t a = 0; a < l; ++a) {
            const auto ra = r.col(a);
            double t = x[a];
            for (std::size_t c = 0; c < a; ++c) t -= ra[c] * x[c];
            x[a] = t / ra[a];
        }
    }
    return std::log10(hi / lo);
}

double householder_rows(DenseMatrix& kt) {
    DenseMatrix k = kt.transposed();
    kt = DenseMatrix();
    const double lost = orthonormalize_block(k);
    kt = k.transposed();
    return lost;
}

// Intermediate orthonormalization. Cholesky QR leaves an orthogonality error
// of order eps * cond^2 but keeps the span, which is all the next power step
// needs; the returned basis is finished with Householder QR. Householder QR
// also covers breakdown.
double orthonormalize_rows(DenseMatrix& kt) {
    const double lost = cholesky_pass(kt);
    return lost < 0.0 ? householder_rows(kt) : lost;
}

// y = C_X (C_Y^T v) for dense factors
void dense_pair_apply(const DenseMatrix& left, const DenseMatrix& right,
                      std::span<const double> v, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t c = 0; c < right.cols(); ++c) {
        const double t = dot(right.col(c), v);
        if (t == 0.0) continue;
        const auto lc = left.col(c);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += lc[i] * t;
    }
}

}  // namespace

void SiConfig::validate() const {
    if (l == 0) throw ConfigError("si: l must be positive");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("si: epsilon must lie in (0,1)");
    if (!(power_constant > 0.0)) throw ConfigError("si: power constant must be positive");
    if (!(reorth_digits > 0.0)) throw ConfigError("si: reorth_digits must be positive");
}

std::size_t power_count(std::size_t m_x, const SiConfig& cfg) {
    const double q = std::ceil(cfg.power_constant * std::log(static_cast<double>(m_x)) / cfg.epsilon);
    return std::max<std::size_t>(1, static_cast<std::size_t>(q));
}

FactorPair simultaneous_iteration(const CscView& s_x, const CscView& s_y, const SiConfig& cfg,
                                  Rng& rng, SiStats* stats) {
    cfg.validate();
    require_dims(s_x.n_cols == s_y.n_cols, "si: buffers have different column counts");
    require_dims(s_x.n_cols >= 1, "si: empty buffer");
    require_dims(cfg.l <= s_x.n_rows && cfg.l <= s_y.n_rows, "si: l exceeds min(m_x, m_y)");
    const auto l = cfg.l;
    const auto q = power_count(s_x.n_rows, cfg);

    DenseMatrix tt, wt, kt;
    {
        const DenseMatrix gt = gaussian_matrix(rng, l, s_y.n_rows);
        kernels::spmm_t_tr(s_y, gt, tt);
    }
    kernels::spmm_tr(s_x, tt, kt);

    SiStats local;
    // The block is re-orthonormalized often enough that it never loses more
    // than reorth_digits of independence; in exact arithmetic this spans the
    // same subspace as the plain power scheme.
    // The loss rate is the larger of the measured loss of independence and
    // the row growth spread; the first alone reads as zero once the rows sit
    // near singular vectors.
    std::size_t interval = 1, since = 0;
    double spread = 0.0;
    for (std::size_t step = 0; step < q; ++step) {
        kernels::spmm_t_tr(s_x, kt, tt);
        kernels::spmm_tr(s_y, tt, wt);
        kernels::spmm_t_tr(s_y, wt, tt);
        kernels::spmm_tr(s_x, tt, kt);
        spread = std::max(spread, normalize_rows(kt));
        ++local.power_steps;
        if (++since >= interval && step + 1 < q) {
            const double lost = orthonormalize_rows(kt);
            ++local.orthonormalizations;
            const double per_step = std::max(lost / static_cast<double>(since), spread);
            spread = 0.0;
            const double next = per_step > 0.0 ? cfg.reorth_digits / per_step : static_cast<double>(q);
            interval = static_cast<std::size_t>(std::clamp(next, 1.0, static_cast<double>(q)));
            since = 0;
        }
    }
    tt = DenseMatrix();
    wt = DenseMatrix();
    DenseMatrix k = kt.transposed();
    kt = DenseMatrix();
    orthonormalize_block(k);
    ++local.orthonormalizations;

    FactorPair out;
    {
        DenseMatrix t;
        kernels::spmm_t(s_x, k, t);
        kernels::spmm(s_y, t, out.c_y);
    }
    out.c_x = std::move(k);
    if (stats) *stats = local;
    return out;
}

bool verify_residual(const CscView& s_x, const CscView& s_y, const DenseMatrix& c_x,
                     const DenseMatrix& c_y, double delta_scale, std::size_t p, Rng& rng) {
    require_dims(c_x.rows() == s_x.n_rows && c_y.rows() == s_y.n_rows &&
                     c_x.cols() == c_y.cols() && s_x.n_cols == s_y.n_cols,
                 "verify_residual: shape mismatch");
    std::vector<double> x = gaussian_vector(rng, s_x.n_rows);
    std::vector<double> d(s_x.n_cols), y(s_y.n_rows), tmp_y(s_y.n_rows), tmp_x(s_x.n_rows);

    const double n0 = norm2(x);
    for (auto& v : x) v /= n0;
    // log ||(C C^T)^t x|| - log ||x||, accumulated with per-step rescaling
    double log_growth = 0.0;
    for (std::size_t step = 0; step < p; ++step) {
        // y = C^T x
        sparse_matvec_t(s_x, x, d);
        sparse_matvec(s_y, d, y);
        dense_pair_apply(c_y, c_x, x, tmp_y);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = (y[i] - tmp_y[i]) / delta_scale;
        // x = C y
        sparse_matvec_t(s_y, y, d);
        sparse_matvec(s_x, d, x);
        dense_pair_apply(c_x, c_y, y, tmp_x);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = (x[i] - tmp_x[i]) / delta_scale;

        const double n = norm2(x);
        if (n == 0.0) return true;
        log_growth += std::log(n);
        for (auto& v : x) v /= n;
    }
    return log_growth <= 0.0;
}

std::size_t verification_power(std::uint64_t j, std::size_t m_x, double delta) {
    const double jj = static_cast<double>(j);
    const double arg = 2.0 * jj * jj * std::sqrt(static_cast<double>(m_x) * std::numbers::e) / delta;
    return static_cast<std::size_t>(std::ceil(std::log(arg)));
}

double residual_scale(const CscView& s_x, const CscView& s_y, std::size_t l) {
    require_dims(s_x.n_cols == s_y.n_cols, "residual_scale: column counts differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < s_x.n_cols; ++i) sum += s_x.column(i).norm() * s_y.column(i).norm();
    return 11.0 / (10.0 * static_cast<double>(l)) * sum;
}

FactorPair boosted_si(BsiState& state, const CscView& s_x, const CscView& s_y, std::size_t l,
                      Rng& rng) {
    if (!(state.delta > 0.0 && state.delta < 1.0)) throw ConfigError("bsi: delta must lie in (0,1)");
    ++state.j;
    const auto p = verification_power(state.j, s_x.n_rows, state.delta);
    const double delta_scale = residual_scale(s_x, s_y, l);
    if (delta_scale == 0.0) return {DenseMatrix(s_x.n_rows, l), DenseMatrix(s_y.n_rows, l)};

    const SiConfig cfg{l, 0.1, state.power_constant};
    for (std::size_t attempt = 0; attempt < state.retry_cap; ++attempt) {
        auto c = simultaneous_iteration(s_x, s_y, cfg, rng);
        ++state.si_calls;
        ++state.verify_calls;
        if (verify_residual(s_x, s_y, c.c_x, c.c_y, delta_scale, p, rng)) return c;
    }
    throw NumericalError("bsi: verification failed " + std::to_string(state.retry_cap) +
                         " times in a row");
}

ScodSketcher::ScodSketcher(std::size_t m_x, std::size_t m_y, const ScodOptions& opts,
                           std::uint64_t seed)
    : m_x_(m_x),
      m_y_(m_y),
      m_(std::max(m_x, m_y)),
      opts_(opts),
      sketch_(m_x, m_y, opts.l),
      buffer_(m_x, m_y),
      rng_(seed) {
    if (opts.l == 0) throw ConfigError("scod: l must be positive");
    require_dims(2 * opts.l <= std::min(m_x, m_y), "scod: 2l exceeds min(m_x, m_y)");
    if (!(opts.delta > 0.0 && opts.delta < 1.0)) throw ConfigError("scod: delta must lie in (0,1)");
    bsi_.delta = opts.delta;
    bsi_.retry_cap = opts.retry_cap;
    bsi_.power_constant = opts.power_constant;
    // one column can overshoot the l*m trigger by at most m entries
    buffer_.reserve(opts.l * m_ + m_, m_);
}

void ScodSketcher::update(SparseColumnView x, SparseColumnView y) {
    buffer_.append_pair(x, y);
    if (buffer_.full(opts_.l, m_)) flush();
}

void ScodSketcher::flush() {
    if (buffer_.empty()) return;
    auto t0 = Clock::now();
    FactorPair c;
    if (opts_.mode == ScodMode::practical) {
        SiConfig cfg{opts_.l, 0.1, opts_.power_constant};
        c = simultaneous_iteration(buffer_.x(), buffer_.y(), cfg, rng_);
        ++telemetry_.si_calls;
    } else {
        c = boosted_si(bsi_, buffer_.x(), buffer_.y(), opts_.l, rng_);
        telemetry_.si_calls = bsi_.si_calls;
        telemetry_.verify_calls = bsi_.verify_calls;
    }
    // the buffer storage is handed back for the merge and taken again after,
    // so the two phases do not stack in peak memory
    buffer_.release();
    telemetry_.si_seconds += seconds_since(t0);

    t0 = Clock::now();
    auto [merged, report] = merge_shrink(std::move(sketch_), std::move(c.c_x), std::move(c.c_y));
    sketch_ = std::move(merged);
    buffer_.reserve(opts_.l * m_ + m_, m_);
    telemetry_.shrink_seconds += seconds_since(t0);
    ++telemetry_.triggers;
}

SketchPair ScodSketcher::finalize() {
    flush();
    return sketch_;
}

SketchPair scod_sketch(const SparseMatrix& x, const SparseMatrix& y, const ScodOptions& opts,
                       std::uint64_t seed, ScodTelemetry* telemetry) {
    require_dims(x.cols() == y.cols(), "scod_sketch: stream lengths differ");
    ScodSketcher sk(x.rows(), y.rows(), opts, seed);
    for (std::size_t i = 0; i < x.cols(); ++i) sk.update(x.column(i), y.column(i));
    auto out = sk.finalize();
    if (telemetry) *telemetry = sk.telemetry();
    return out;
}

}  // namespace cosketch
