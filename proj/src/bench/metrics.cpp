#include "cosketch/bench/metrics.hpp"

#include <algorithm>
#include <vector>

#include "cosketch/error.hpp"
#include "cosketch/kernels.hpp"

namespace cosketch::bench {

namespace {

// out = B^T v for a dense B.
void dense_t(const DenseMatrix& b, std::span<const double> v, std::vector<double>& out) {
    out.resize(b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j) out[j] = dot(b.col(j), v);
}

// out -= B w
void dense_sub(const DenseMatrix& b, const std::vector<double>& w, std::span<double> out) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
        const double s = w[j];
        if (s == 0.0) continue;
        const auto c = b.col(j);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] -= s * c[i];
    }
}

void dense_mul(const DenseMatrix& b, const std::vector<double>& w, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t j = 0; j < b.cols(); ++j) {
        const double s = w[j];
        const auto c = b.col(j);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += s * c[i];
    }
}

SpectralNormOptions power_opts(const MetricsContext& ctx) { return {ctx.tol, ctx.max_iter}; }

void check_shapes(const SparseMatrix& x, const SparseMatrix& y, const SketchPair& s) {
    require_dims(x.cols() == y.cols(), "metrics: X and Y have different column counts");
    require_dims(s.b_x.rows() == x.rows() && s.b_y.rows() == y.rows() &&
                     s.b_x.cols() == s.b_y.cols(),
                 "metrics: sketch shape does not match (X, Y)");
}

// Top-k singular directions of B_X B_Y^T from the factors alone.
std::pair<DenseMatrix, DenseMatrix> top_directions(const SketchPair& s, std::size_t k) {
    const auto l = s.width();
    require_dims(l <= s.b_x.rows() && l <= s.b_y.rows(),
                 "projection_error: sketch wider than its row dimension");
    const HouseholderQr qx(s.b_x), qy(s.b_y);
    DenseMatrix core;
    kernels::gemm_nn(qx.r(), qy.r().transposed(), core);
    const auto svd = svd_small(core);
    const double scale = svd.sigma.empty() ? 0.0 : svd.sigma.front();
    std::size_t keep = 0;
    while (keep < std::min(k, l) && svd.sigma[keep] > 1e-12 * scale) ++keep;
    return {qx.apply_q(svd.u.left_cols(keep)), qy.apply_q(svd.v.left_cols(keep))};
}

}  // namespace

SpectralNormResult approx_error(const SparseMatrix& x, const SparseMatrix& y,
                                const SketchPair& sketch, const MetricsContext& ctx) {
    check_shapes(x, y, sketch);
    const CscView xv = x.view(), yv = y.view();
    std::vector<double> t(x.cols()), w;
    auto apply = [&](std::span<const double> v, std::span<double> out) {
        sparse_matvec_t(yv, v, t);
        sparse_matvec(xv, t, out);
        dense_t(sketch.b_y, v, w);
        dense_sub(sketch.b_x, w, out);
    };
    auto apply_t = [&](std::span<const double> u, std::span<double> out) {
        sparse_matvec_t(xv, u, t);
        sparse_matvec(yv, t, out);
        dense_t(sketch.b_x, u, w);
        dense_sub(sketch.b_y, w, out);
    };
    Rng rng(ctx.seed);
    return spectral_norm_implicit(apply, apply_t, x.rows(), y.rows(), rng, power_opts(ctx));
}

SpectralNormResult projection_error(const SparseMatrix& x, const SparseMatrix& y,
                                    const SketchPair& sketch, const MetricsContext& ctx) {
    check_shapes(x, y, sketch);
    if (ctx.k == 0) throw ConfigError("projection_error: k must be positive");
    const auto [u, v] = top_directions(sketch, ctx.k);
    const CscView xv = x.view(), yv = y.view();
    std::vector<double> t(x.cols()), w, r_x(x.rows()), r_y(y.rows());

    // A v = X Y^T v - U U^T X Y^T V V^T v
    auto apply = [&](std::span<const double> in, std::span<double> out) {
        sparse_matvec_t(yv, in, t);
        sparse_matvec(xv, t, out);
        dense_t(v, in, w);
        dense_mul(v, w, r_y);
        sparse_matvec_t(yv, r_y, t);
        sparse_matvec(xv, t, r_x);
        dense_t(u, r_x, w);
        dense_sub(u, w, out);
    };
    auto apply_t = [&](std::span<const double> in, std::span<double> out) {
        sparse_matvec_t(xv, in, t);
        sparse_matvec(yv, t, out);
        dense_t(u, in, w);
        dense_mul(u, w, r_x);
        sparse_matvec_t(xv, r_x, t);
        sparse_matvec(yv, t, r_y);
        dense_t(v, r_y, w);
        dense_sub(v, w, out);
    };
    Rng rng(ctx.seed);
    return spectral_norm_implicit(apply, apply_t, x.rows(), y.rows(), rng, power_opts(ctx));
}

SpectralNormResult product_norm(const SparseMatrix& x, const SparseMatrix& y,
                                const MetricsContext& ctx) {
    return approx_error(x, y, SketchPair(x.rows(), y.rows(), 0), ctx);
}

double spectral_norm(const SparseMatrix& a, const MetricsContext& ctx) {
    const CscView av = a.view();
    auto apply = [&](std::span<const double> in, std::span<double> out) {
        sparse_matvec(av, in, out);
    };
    auto apply_t = [&](std::span<const double> in, std::span<double> out) {
        sparse_matvec_t(av, in, out);
    };
    Rng rng(ctx.seed);
    return spectral_norm_implicit(apply, apply_t, a.rows(), a.cols(), rng, power_opts(ctx)).value;
}

double stable_rank(const SparseMatrix& a, const MetricsContext& ctx) {
    const double s = spectral_norm(a, ctx);
    if (s == 0.0) throw NumericalError("stable_rank: zero matrix");
    return a.frobenius_norm_sq() / (s * s);
}

}  // namespace cosketch::bench
