#include "cosketch/kernels.hpp"

#include <algorithm>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cosketch/error.hpp"

namespace cosketch::kernels {

namespace {

void prepare(DenseMatrix& out, std::size_t rows, std::size_t cols) {
    if (out.rows() != rows || out.cols() != cols) out = DenseMatrix(rows, cols);
}

// Per-column bodies shared by both implementations.

inline void spmm_col(const CscView& s, const DenseMatrix& v, DenseMatrix& out, std::size_t c) {
    auto o = out.col(c);
    std::fill(o.begin(), o.end(), 0.0);
    const auto vc = v.col(c);
    for (std::size_t j = 0; j < s.n_cols; ++j) {
        const double w = vc[j];
        if (w == 0.0) continue;
        for (auto k = s.col_offsets[j]; k < s.col_offsets[j + 1]; ++k)
            o[s.row_indices[k]] += s.values[k] * w;
    }
}

inline void spmm_t_col(const CscView& s, const DenseMatrix& w, DenseMatrix& out, std::size_t c) {
    auto o = out.col(c);
    const auto wc = w.col(c);
    for (std::size_t j = 0; j < s.n_cols; ++j) {
        double acc = 0.0;
        for (auto k = s.col_offsets[j]; k < s.col_offsets[j + 1]; ++k)
            acc += s.values[k] * wc[s.row_indices[k]];
        o[j] = acc;
    }
}

// Transposed layout: out_t holds (S V)^T, entries [first, last) of every
// logical row are produced by one pass over the nonzeros.
inline void spmm_tr_block(const CscView& s, const DenseMatrix& vt, DenseMatrix& out_t,
                          std::size_t first, std::size_t last) {
    const std::size_t k = vt.rows();
    const double* v = vt.data().data();
    double* o = out_t.data().data();
    for (std::size_t i = 0; i < s.n_rows; ++i) std::fill(o + i * k + first, o + i * k + last, 0.0);
    for (std::size_t j = 0; j < s.n_cols; ++j) {
        const double* vj = v + j * k;
        for (auto p = s.col_offsets[j]; p < s.col_offsets[j + 1]; ++p) {
            const double a = s.values[p];
            double* oi = o + static_cast<std::size_t>(s.row_indices[p]) * k;
            for (std::size_t c = first; c < last; ++c) oi[c] += a * vj[c];
        }
    }
}

inline void spmm_t_tr_col(const CscView& s, const DenseMatrix& wt, DenseMatrix& out_t,
                          std::size_t j) {
    const std::size_t k = wt.rows();
    const double* w = wt.data().data();
    double* oj = out_t.data().data() + j * k;
    std::fill(oj, oj + k, 0.0);
    for (auto p = s.col_offsets[j]; p < s.col_offsets[j + 1]; ++p) {
        const double a = s.values[p];
        const double* wi = w + static_cast<std::size_t>(s.row_indices[p]) * k;
        for (std::size_t c = 0; c < k; ++c) oj[c] += a * wi[c];
    }
}

inline void gemm_nn_col(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out,
                        std::size_t c) {
    auto o = out.col(c);
    std::fill(o.begin(), o.end(), 0.0);
    for (std::size_t p = 0; p < a.cols(); ++p) {
        const double w = b(p, c);
        if (w == 0.0) continue;
        const auto ap = a.col(p);
        for (std::size_t i = 0; i < o.size(); ++i) o[i] += ap[i] * w;
    }
}

inline void gemm_tn_col(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out,
                        std::size_t c) {
    const auto bc = b.col(c);
    for (std::size_t p = 0; p < a.cols(); ++p) out(p, c) = dot(a.col(p), bc);
}

inline void reflect_col(const DenseMatrix& f, std::size_t vcol, std::size_t offset, double tau,
                        DenseMatrix& a, std::size_t c) {
    const auto v = f.col(vcol);
    auto x = a.col(c);
    double s = x[offset];
    for (std::size_t i = offset + 1; i < x.size(); ++i) s += v[i] * x[i];
    s *= tau;
    if (s == 0.0) return;
    x[offset] -= s;
    for (std::size_t i = offset + 1; i < x.size(); ++i) x[i] -= s * v[i];
}

void check_spmm(const CscView& s, const DenseMatrix& v) {
    require_dims(v.rows() == s.n_cols, "spmm: inner dimension mismatch");
}
void check_spmm_t(const CscView& s, const DenseMatrix& w) {
    require_dims(w.rows() == s.n_rows, "spmm_t: inner dimension mismatch");
}
void check_spmm_tr(const CscView& s, const DenseMatrix& vt) {
    require_dims(vt.cols() == s.n_cols, "spmm_tr: inner dimension mismatch");
}
void check_spmm_t_tr(const CscView& s, const DenseMatrix& wt) {
    require_dims(wt.cols() == s.n_rows, "spmm_t_tr: inner dimension mismatch");
}
void check_nn(const DenseMatrix& a, const DenseMatrix& b) {
    require_dims(a.cols() == b.rows(), "gemm_nn: inner dimension mismatch");
}
void check_tn(const DenseMatrix& a, const DenseMatrix& b) {
    require_dims(a.rows() == b.rows(), "gemm_tn: inner dimension mismatch");
}

}  // namespace

namespace serial {

void spmm(const CscView& s, const DenseMatrix& v, DenseMatrix& out) {
    check_spmm(s, v);
    prepare(out, s.n_rows, v.cols());
    for (std::size_t c = 0; c < v.cols(); ++c) spmm_col(s, v, out, c);
}

void spmm_t(const CscView& s, const DenseMatrix& w, DenseMatrix& out) {
    check_spmm_t(s, w);
    prepare(out, s.n_cols, w.cols());
    for (std::size_t c = 0; c < w.cols(); ++c) spmm_t_col(s, w, out, c);
}

void spmm_tr(const CscView& s, const DenseMatrix& vt, DenseMatrix& out_t) {
    check_spmm_tr(s, vt);
    prepare(out_t, vt.rows(), s.n_rows);
    spmm_tr_block(s, vt, out_t, 0, vt.rows());
}

void spmm_t_tr(const CscView& s, const DenseMatrix& wt, DenseMatrix& out_t) {
    check_spmm_t_tr(s, wt);
    prepare(out_t, wt.rows(), s.n_cols);
    for (std::size_t j = 0; j < s.n_cols; ++j) spmm_t_tr_col(s, wt, out_t, j);
}

void gemm_nn(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
    check_nn(a, b);
    prepare(out, a.rows(), b.cols());
    for (std::size_t c = 0; c < b.cols(); ++c) gemm_nn_col(a, b, out, c);
}

void gemm_tn(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
    check_tn(a, b);
    prepare(out, a.cols(), b.cols());
    for (std::size_t c = 0; c < b.cols(); ++c) gemm_tn_col(a, b, out, c);
}

void apply_reflector(const DenseMatrix& f, std::size_t vcol, std::size_t offset, double tau,
                     DenseMatrix& a, std::size_t first, std::size_t last) {
    if (tau == 0.0) return;
    for (std::size_t c = first; c < last; ++c) reflect_col(f, vcol, offset, tau, a, c);
}

}  // namespace serial

namespace omp {

// Small problems are not worth a parallel region.
constexpr std::size_t kMinWork = 1 << 14;

void spmm(const CscView& s, const DenseMatrix& v, DenseMatrix& out) {
    check_spmm(s, v);
    prepare(out, s.n_rows, v.cols());
    const auto n = static_cast<std::int64_t>(v.cols());
#pragma omp parallel for schedule(static) if (s.nnz() * v.cols() > kMinWork)
    for (std::int64_t c = 0; c < n; ++c) spmm_col(s, v, out, static_cast<std::size_t>(c));
}

void spmm_t(const CscView& s, const DenseMatrix& w, DenseMatrix& out) {
    check_spmm_t(s, w);
    prepare(out, s.n_cols, w.cols());
    const auto n = static_cast<std::int64_t>(w.cols());
#pragma omp parallel for schedule(static) if (s.nnz() * w.cols() > kMinWork)
    for (std::int64_t c = 0; c < n; ++c) spmm_t_col(s, w, out, static_cast<std::size_t>(c));
}

// The scatter product is split over blocks of the logical columns, so each
// thread still sees every nonzero in reference order.
void spmm_tr(const CscView& s, const DenseMatrix& vt, DenseMatrix& out_t) {
    check_spmm_tr(s, vt);
    prepare(out_t, vt.rows(), s.n_rows);
    constexpr std::size_t kBlock = 8;
    const std::size_t k = vt.rows();
    const auto blocks = static_cast<std::int64_t>((k + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(static) if (s.nnz() * k > kMinWork)
    for (std::int64_t b = 0; b < blocks; ++b) {
        const auto first = static_cast<std::size_t>(b) * kBlock;
        spmm_tr_block(s, vt, out_t, first, std::min(k, first + kBlock));
    }
}

void spmm_t_tr(const CscView& s, const DenseMatrix& wt, DenseMatrix& out_t) {
    check_spmm_t_tr(s, wt);
    prepare(out_t, wt.rows(), s.n_cols);
    const auto n = static_cast<std::int64_t>(s.n_cols);
#pragma omp parallel for schedule(static) if (s.nnz() * wt.rows() > kMinWork)
    for (std::int64_t j = 0; j < n; ++j) spmm_t_tr_col(s, wt, out_t, static_cast<std::size_t>(j));
}

void gemm_nn(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
    check_nn(a, b);
    prepare(out, a.rows(), b.cols());
    const auto n = static_cast<std::int64_t>(b.cols());
#pragma omp parallel for schedule(static) if (a.rows() * a.cols() * b.cols() > kMinWork)
    for (std::int64_t c = 0; c < n; ++c) gemm_nn_col(a, b, out, static_cast<std::size_t>(c));
}

void gemm_tn(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
    check_tn(a, b);
    prepare(out, a.cols(), b.cols());
    const auto n = static_cast<std::int64_t>(b.cols());
#pragma omp parallel for schedule(static) if (a.rows() * a.cols() * b.cols() > kMinWork)
    for (std::int64_t c = 0; c < n; ++c) gemm_tn_col(a, b, out, static_cast<std::size_t>(c));
}

void apply_reflector(const DenseMatrix& f, std::size_t vcol, std::size_t offset, double tau,
                     DenseMatrix& a, std::size_t first, std::size_t last) {
    if (tau == 0.0 || first >= last) return;
    const auto lo = static_cast<std::int64_t>(first), hi = static_cast<std::int64_t>(last);
#pragma omp parallel for schedule(static) if ((a.rows() - offset) * (last - first) > kMinWork)
    for (std::int64_t c = lo; c < hi; ++c)
        reflect_col(f, vcol, offset, tau, a, static_cast<std::size_t>(c));
}

}  // namespace omp

int max_threads() noexcept {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

#ifdef _OPENMP
namespace impl = omp;
#else
namespace impl = serial;
#endif

void spmm(const CscView& s, const DenseMatrix& v, DenseMatrix& out) { impl::spmm(s, v, out); }
void spmm_t(const CscView& s, const DenseMatrix& w, DenseMatrix& out) { impl::spmm_t(s, w, out); }
void spmm_tr(const CscView& s, const DenseMatrix& vt, DenseMatrix& out_t) {
    impl::spmm_tr(s, vt, out_t);
}
void spmm_t_tr(const CscView& s, const DenseMatrix& wt, DenseMatrix& out_t) {
    impl::spmm_t_tr(s, wt, out_t);
}
void gemm_nn(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
    impl::gemm_nn(a, b, out);
}
void gemm_tn(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
    impl::gemm_tn(a, b, out);
}
void apply_reflector(const DenseMatrix& f, std::size_t vcol, std::size_t offset, double tau,
                     DenseMatrix& a, std::size_t first, std::size_t last) {
    impl::apply_reflector(f, vcol, offset, tau, a, first, last);
}

}  // namespace cosketch::kernels
