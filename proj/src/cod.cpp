#include "cosketch/cod.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "cosketch/detail/shrink.hpp"
#include "cosketch/error.hpp"
#include "cosketch/kernels.hpp"
#include "cosketch/linalg.hpp"

namespace cosketch {

namespace detail {

std::pair<SketchPair, ShrinkReport> shrink_owned(DenseMatrix b_x, DenseMatrix b_y,
                                                 std::size_t keep) {
    const auto lp = b_x.cols();
    require_dims(b_y.cols() == lp, "dense_shrink: factor widths differ");
    require_dims(lp >= 2 && lp % 2 == 0, "dense_shrink: width must be even and positive");
    require_dims(lp <= b_x.rows() && lp <= b_y.rows(),
                 "dense_shrink: width exceeds the row count of a factor");
    require_dims(keep <= lp, "dense_shrink: keep exceeds width");

    const auto m_x = b_x.rows(), m_y = b_y.rows();
    ShrinkReport report;
    const bool zero_x = std::all_of(b_x.data().begin(), b_x.data().end(), [](double v) { return v == 0.0; });
    const bool zero_y = std::all_of(b_y.data().begin(), b_y.data().end(), [](double v) { return v == 0.0; });
    if (zero_x || zero_y) return {SketchPair(m_x, m_y, keep), report};

    std::optional<HouseholderQr> qx(std::move(b_x));
    std::optional<HouseholderQr> qy(std::move(b_y));
    SvdResult svd;
    {
        DenseMatrix core;
        kernels::gemm_nn(qx->r(), qy->r().transposed(), core);
        svd = svd_small(core);
    }

    report.gamma = svd.sigma[lp / 2 - 1];
    DenseMatrix w_x(lp, keep), w_y(lp, keep);
    for (std::size_t k = 0; k < lp; ++k) {
        const double shrunk = std::max(svd.sigma[k] - report.gamma, 0.0);
        report.nuclear_before += svd.sigma[k];
        report.nuclear_after += shrunk;
        if (k >= keep) continue;
        const double s = std::sqrt(shrunk);
        for (std::size_t i = 0; i < lp; ++i) {
            w_x(i, k) = svd.u(i, k) * s;
            w_y(i, k) = svd.v(i, k) * s;
        }
    }
    svd = SvdResult();
    // each factor is dropped as soon as its output exists
    DenseMatrix out_x = qx->apply_q(w_x);
    qx.reset();
    DenseMatrix out_y = qy->apply_q(w_y);
    qy.reset();
    return {SketchPair(std::move(out_x), std::move(out_y)), report};
}

void scatter_column(SparseColumnView c, DenseMatrix& b, std::size_t slot, std::size_t row_offset) {
    auto dst = b.col(slot);
    for (std::size_t k = 0; k < c.nnz(); ++k) dst[row_offset + c.rows[k]] = c.values[k];
}

}  // namespace detail

std::pair<SketchPair, ShrinkReport> dense_shrink(const DenseMatrix& b_x, const DenseMatrix& b_y) {
    return detail::shrink_owned(b_x, b_y, b_x.cols());
}

std::pair<SketchPair, ShrinkReport> merge_shrink(SketchPair sketch, DenseMatrix c_x,
                                                 DenseMatrix c_y) {
    const auto l = sketch.width();
    require_dims(c_x.cols() == l && c_y.cols() == l, "merge_shrink: width mismatch");
    require_dims(c_x.rows() == sketch.b_x.rows() && c_y.rows() == sketch.b_y.rows(),
                 "merge_shrink: row mismatch");
    DenseMatrix d_x = hconcat(sketch.b_x, c_x);
    sketch.b_x = DenseMatrix();
    c_x = DenseMatrix();
    DenseMatrix d_y = hconcat(sketch.b_y, c_y);
    sketch.b_y = DenseMatrix();
    c_y = DenseMatrix();
    // gamma is the l-th of 2l singular values, so columns l..2l-1 vanish
    return detail::shrink_owned(std::move(d_x), std::move(d_y), l);
}

CodSketcher::CodSketcher(std::size_t m_x, std::size_t m_y, std::size_t l)
    : m_x_(m_x), m_y_(m_y), l_(l), sketch_(m_x, m_y, l) {
    require_dims(l >= 2 && l % 2 == 0, "cod: sketch size must be even and >= 2");
    require_dims(l <= m_x && l <= m_y, "cod: sketch size exceeds min(m_x, m_y)");
}

void CodSketcher::update(SparseColumnView x, SparseColumnView y) {
    require_dims(x.n_rows == m_x_ && y.n_rows == m_y_, "cod: column dimension mismatch");
    if (cursor_ == l_) {
        // shrink lazily, only when a column needs the slot
        auto [s, report] = detail::shrink_owned(std::move(sketch_.b_x), std::move(sketch_.b_y), l_);
        sketch_ = std::move(s);
        cursor_ = l_ / 2;
        ++shrinks_;
    }
    detail::scatter_column(x, sketch_.b_x, cursor_);
    detail::scatter_column(y, sketch_.b_y, cursor_);
    ++cursor_;
}

SketchPair cod_sketch(const SparseMatrix& x, const SparseMatrix& y, std::size_t l) {
    require_dims(x.cols() == y.cols(), "cod_sketch: stream lengths differ");
    CodSketcher sk(x.rows(), y.rows(), l);
    for (std::size_t i = 0; i < x.cols(); ++i) sk.update(x.column(i), y.column(i));
    return std::move(sk).finalize();
}

}  // namespace cosketch
