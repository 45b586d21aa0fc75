#include "cosketch/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "cosketch/detail/shrink.hpp"
#include "cosketch/error.hpp"
#include "cosketch/kernels.hpp"
#include "cosketch/linalg.hpp"

namespace cosketch {

namespace {

SketchPair split_rows(const DenseMatrix& b, std::size_t m_x, std::size_t m_y) {
    SketchPair out(m_x, m_y, b.cols());
    for (std::size_t c = 0; c < b.cols(); ++c) {
        const auto src = b.col(c);
        std::copy_n(src.begin(), m_x, out.b_x.col(c).begin());
        std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(m_x), m_y, out.b_y.col(c).begin());
    }
    return out;
}

}  // namespace

FdAmmSketcher::FdAmmSketcher(std::size_t m_x, std::size_t m_y, std::size_t l)
    : m_x_(m_x), m_y_(m_y), l_(l), b_(m_x + m_y, l) {
    require_dims(l >= 2 && l % 2 == 0, "fd: sketch size must be even and >= 2");
    require_dims(l <= m_x + m_y, "fd: sketch size exceeds m_x + m_y");
}

void FdAmmSketcher::shrink() {
    HouseholderQr qr(std::move(b_));
    const auto svd = svd_small(qr.r());
    const double cut = svd.sigma[l_ / 2 - 1] * svd.sigma[l_ / 2 - 1];
    DenseMatrix w(l_, l_);
    for (std::size_t k = 0; k + 1 < l_ / 2; ++k) {
        const double s = std::sqrt(std::max(svd.sigma[k] * svd.sigma[k] - cut, 0.0));
        for (std::size_t i = 0; i < l_; ++i) w(i, k) = svd.u(i, k) * s;
    }
    b_ = qr.apply_q(w);
    cursor_ = l_ / 2;
    ++shrinks_;
}

void FdAmmSketcher::update(SparseColumnView x, SparseColumnView y) {
    require_dims(x.n_rows == m_x_ && y.n_rows == m_y_, "fd: column dimension mismatch");
    if (cursor_ == l_) shrink();
    detail::scatter_column(x, b_, cursor_);
    detail::scatter_column(y, b_, cursor_, m_x_);
    ++cursor_;
}

SketchPair FdAmmSketcher::finalize() const { return split_rows(b_, m_x_, m_y_); }

CsSketcher::CsSketcher(std::size_t m_x, std::size_t m_y, std::size_t l, std::uint64_t seed)
    : m_x_(m_x), m_y_(m_y), l_(l), rng_(seed), b_x_(m_x, l), b_y_(m_y, l), slots_(l) {
    require_dims(l >= 1, "cs: sketch size must be positive");
}

void CsSketcher::place(std::size_t slot, SparseColumnView x, SparseColumnView y) {
    auto cx = b_x_.col(slot), cy = b_y_.col(slot);
    std::fill(cx.begin(), cx.end(), 0.0);
    std::fill(cy.begin(), cy.end(), 0.0);
    detail::scatter_column(x, b_x_, slot);
    detail::scatter_column(y, b_y_, slot);
}

void CsSketcher::schedule(std::size_t slot) {
    // exponential jump: the slot is next replaced once X_w more weight has
    // streamed past, X_w = log(r) / log(key)
    auto& s = slots_[slot];
    s.next = total_ + std::log(rng_.uniform()) / s.log_key;
    queue_.push({s.next, slot});
}

void CsSketcher::update(SparseColumnView x, SparseColumnView y) {
    require_dims(x.n_rows == m_x_ && y.n_rows == m_y_, "cs: column dimension mismatch");
    const double w = x.norm() * y.norm();
    if (w == 0.0) return;
    const double before = total_;
    total_ += w;
    if (before == 0.0) {
        for (std::size_t k = 0; k < l_; ++k) {
            slots_[k] = {std::log(rng_.uniform()) / w, w, 0.0};
            place(k, x, y);
            schedule(k);
        }
        return;
    }
    while (!queue_.empty() && queue_.top().next <= total_) {
        const auto k = queue_.top().slot;
        queue_.pop();
        auto& s = slots_[k];
        // new key drawn from (t, 1) with t = key^w
        const double log_t = w * s.log_key;
        const double t = std::exp(log_t);
        const double r = t + (1.0 - t) * rng_.uniform();
        s.log_key = std::log(r) / w;
        s.weight = w;
        place(k, x, y);
        schedule(k);
    }
}

SketchPair CsSketcher::finalize() const {
    SketchPair out(m_x_, m_y_, l_);
    if (total_ == 0.0) return out;
    for (std::size_t k = 0; k < l_; ++k) {
        const double scale = std::sqrt(total_ / (static_cast<double>(l_) * slots_[k].weight));
        const auto sx = b_x_.col(k), sy = b_y_.col(k);
        auto dx = out.b_x.col(k), dy = out.b_y.col(k);
        for (std::size_t i = 0; i < m_x_; ++i) dx[i] = sx[i] * scale;
        for (std::size_t i = 0; i < m_y_; ++i) dy[i] = sy[i] * scale;
    }
    return out;
}

RpSketcher::RpSketcher(std::size_t m_x, std::size_t m_y, std::size_t l, std::uint64_t seed)
    : l_(l), base_(seed), g_(l), sketch_(m_x, m_y, l) {
    require_dims(l >= 1, "rp: sketch size must be positive");
}

void RpSketcher::update(SparseColumnView x, SparseColumnView y) {
    require_dims(x.n_rows == sketch_.b_x.rows() && y.n_rows == sketch_.b_y.rows(),
                 "rp: column dimension mismatch");
    Rng row = base_.fork(index_++);
    const double scale = 1.0 / std::sqrt(static_cast<double>(l_));
    for (auto& g : g_) g = row.normal() * scale;
    auto accumulate = [&](SparseColumnView c, DenseMatrix& b) {
        for (std::size_t k = 0; k < c.nnz(); ++k) {
            const auto r = c.rows[k];
            const double v = c.values[k];
            for (std::size_t j = 0; j < l_; ++j) b(r, j) += v * g_[j];
        }
    };
    accumulate(x, sketch_.b_x);
    accumulate(y, sketch_.b_y);
}

SketchPair RpSketcher::finalize() const { return sketch_; }

SketchPair fd_amm_sketch(const SparseMatrix& x, const SparseMatrix& y, std::size_t l) {
    require_dims(x.cols() == y.cols(), "fd_amm_sketch: stream lengths differ");
    FdAmmSketcher sk(x.rows(), y.rows(), l);
    for (std::size_t i = 0; i < x.cols(); ++i) sk.update(x.column(i), y.column(i));
    return sk.finalize();
}

SketchPair cs_sketch(const SparseMatrix& x, const SparseMatrix& y, std::size_t l,
                     std::uint64_t seed) {
    require_dims(x.cols() == y.cols(), "cs_sketch: stream lengths differ");
    CsSketcher sk(x.rows(), y.rows(), l, seed);
    for (std::size_t i = 0; i < x.cols(); ++i) sk.update(x.column(i), y.column(i));
    return sk.finalize();
}

SketchPair rp_sketch(const SparseMatrix& x, const SparseMatrix& y, std::size_t l,
                     std::uint64_t seed) {
    require_dims(x.cols() == y.cols(), "rp_sketch: stream lengths differ");
    RpSketcher sk(x.rows(), y.rows(), l, seed);
    for (std::size_t i = 0; i < x.cols(); ++i) sk.update(x.column(i), y.column(i));
    return sk.finalize();
}

}  // namespace cosketch
