#include "cosketch/dense.hpp"

#include <algorithm>
#include <cmath>

#include "cosketch/error.hpp"

namespace cosketch {

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

void DenseMatrix::fill(double v) noexcept { std::fill(values_.begin(), values_.end(), v); }

DenseMatrix DenseMatrix::left_cols(std::size_t n) const {
    require_dims(n <= cols_, "left_cols: more columns requested than available");
    DenseMatrix out(rows_, n);
    std::copy_n(values_.begin(), rows_ * n, out.values_.begin());
    return out;
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t j = 0; j < cols_; ++j)
        for (std::size_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
    return t;
}

double DenseMatrix::frobenius_norm() const noexcept { return norm2(data()); }

bool DenseMatrix::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

DenseMatrix hconcat(const DenseMatrix& a, const DenseMatrix& b) {
    require_dims(a.rows() == b.rows(), "hconcat: row counts differ");
    DenseMatrix out(a.rows(), a.cols() + b.cols());
    std::copy(a.data().begin(), a.data().end(), out.data().begin());
    std::copy(b.data().begin(), b.data().end(), out.data().begin() + a.data().size());
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) noexcept {
    // scaled accumulation so huge power-iteration vectors do not overflow
    double scale = 0.0, ssq = 1.0;
    for (double v : a) {
        if (v == 0.0) continue;
        const double av = std::abs(v);
        if (scale < av) {
            ssq = 1.0 + ssq * (scale / av) * (scale / av);
            scale = av;
        } else {
            ssq += (av / scale) * (av / scale);
        }
    }
    return scale * std::sqrt(ssq);
}

}  // namespace cosketch
