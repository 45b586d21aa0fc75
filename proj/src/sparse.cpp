#include "cosketch/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cosketch/error.hpp"

namespace cosketch {

double SparseColumnView::norm() const noexcept {
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s);
}

SparseColumn SparseColumn::from_dense(std::span<const double> dense) {
    SparseColumn c;
    c.n_rows = dense.size();
    for (std::size_t i = 0; i < dense.size(); ++i) {
        if (dense[i] != 0.0) {
            c.rows.push_back(static_cast<RowIndex>(i));
            c.values.push_back(dense[i]);
        }
    }
    return c;
}

SparseColumn SparseColumn::from_entries(std::size_t n_rows, std::vector<RowIndex> rows,
                                        std::vector<double> values) {
    require_dims(rows.size() == values.size(), "SparseColumn: index/value length mismatch");
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return rows[a] < rows[b]; });
    SparseColumn c;
    c.n_rows = n_rows;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto r = rows[order[k]];
        require_dims(r < n_rows, "SparseColumn: row index out of range");
        if (k > 0 && rows[order[k - 1]] == r)
            throw DimensionError("SparseColumn: duplicate row index");
        if (values[order[k]] == 0.0) continue;
        c.rows.push_back(r);
        c.values.push_back(values[order[k]]);
    }
    return c;
}

SparseMatrix::SparseMatrix(std::size_t n_rows, std::size_t n_cols)
    : n_rows_(n_rows), n_cols_(n_cols), col_offsets_(n_cols + 1, 0) {}

SparseMatrix SparseMatrix::from_triplets(std::size_t n_rows, std::size_t n_cols,
                                         std::vector<Triplet> entries) {
    for (const auto& t : entries)
        require_dims(t.row < n_rows && t.col < n_cols, "from_triplets: entry out of range");
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.col != b.col ? a.col < b.col : a.row < b.row;
    });
    SparseMatrix m(n_rows, n_cols);
    m.row_indices_.reserve(entries.size());
    m.values_.reserve(entries.size());
    std::size_t k = 0;
    for (std::size_t j = 0; j < n_cols; ++j) {
        while (k < entries.size() && entries[k].col == j) {
            const auto row = entries[k].row;
            double v = 0.0;
            while (k < entries.size() && entries[k].col == j && entries[k].row == row)
                v += entries[k++].value;
            if (v != 0.0) {
                m.row_indices_.push_back(static_cast<RowIndex>(row));
                m.values_.push_back(v);
            }
        }
        m.col_offsets_[j + 1] = m.values_.size();
    }
    return m;
}

SparseMatrix SparseMatrix::from_columns(std::size_t n_rows, std::span<const SparseColumn> columns) {
    SparseMatrix m(n_rows, 0);
    std::size_t nnz = 0;
    for (const auto& c : columns) nnz += c.nnz();
    m.reserve(nnz, columns.size());
    for (const auto& c : columns) m.push_column(c.view());
    return m;
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& a) {
    SparseMatrix m(a.rows(), 0);
    for (std::size_t j = 0; j < a.cols(); ++j) {
        const auto c = SparseColumn::from_dense(a.col(j));
        m.push_column(c.view());
    }
    return m;
}

void SparseMatrix::push_column(SparseColumnView c) {
    require_dims(c.n_rows == n_rows_, "push_column: row count mismatch");
    row_indices_.insert(row_indices_.end(), c.rows.begin(), c.rows.end());
    values_.insert(values_.end(), c.values.begin(), c.values.end());
    col_offsets_.push_back(values_.size());
    ++n_cols_;
}

void SparseMatrix::reserve(std::size_t nnz, std::size_t cols) {
    row_indices_.reserve(nnz);
    values_.reserve(nnz);
    col_offsets_.reserve(cols + 1);
}

void SparseMatrix::clear() noexcept {
    n_cols_ = 0;
    row_indices_.clear();
    values_.clear();
    col_offsets_.resize(1);
}

SparseMatrix SparseMatrix::transposed() const {
    SparseMatrix t(n_cols_, n_rows_);
    std::vector<std::size_t> counts(n_rows_ + 1, 0);
    for (auto r : row_indices_) ++counts[r + 1];
    std::partial_sum(counts.begin(), counts.end(), counts.begin());
    std::copy(counts.begin(), counts.end(), t.col_offsets_.begin());
    t.row_indices_.resize(nnz());
    t.values_.resize(nnz());
    // walking columns in order keeps the transposed row indices sorted
    for (std::size_t j = 0; j < n_cols_; ++j) {
        for (auto k = col_offsets_[j]; k < col_offsets_[j + 1]; ++k) {
            const auto dst = counts[row_indices_[k]]++;
            t.row_indices_[dst] = static_cast<RowIndex>(j);
            t.values_[dst] = values_[k];
        }
    }
    return t;
}

SparseMatrix SparseMatrix::col_range(std::size_t begin, std::size_t end) const {
    require_dims(begin <= end && end <= n_cols_, "col_range: bad range");
    SparseMatrix m(n_rows_, 0);
    m.reserve(col_offsets_[end] - col_offsets_[begin], end - begin);
    for (auto j = begin; j < end; ++j) m.push_column(column(j));
    return m;
}

DenseMatrix SparseMatrix::to_dense() const {
    DenseMatrix d(n_rows_, n_cols_);
    for (std::size_t j = 0; j < n_cols_; ++j)
        for (auto k = col_offsets_[j]; k < col_offsets_[j + 1]; ++k)
            d(row_indices_[k], j) = values_[k];
    return d;
}

double SparseMatrix::frobenius_norm_sq() const noexcept {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return s;
}

double SparseMatrix::frobenius_norm() const noexcept { return std::sqrt(frobenius_norm_sq()); }

void SparseMatrix::validate() const {
    if (col_offsets_.size() != n_cols_ + 1 || col_offsets_.front() != 0 ||
        col_offsets_.back() != values_.size() || row_indices_.size() != values_.size())
        throw DataError("SparseMatrix: inconsistent offsets");
    for (std::size_t j = 0; j < n_cols_; ++j) {
        if (col_offsets_[j] > col_offsets_[j + 1])
            throw DataError("SparseMatrix: decreasing column offsets at column " +
                            std::to_string(j));
        for (auto k = col_offsets_[j]; k < col_offsets_[j + 1]; ++k) {
            if (row_indices_[k] >= n_rows_)
                throw DataError("SparseMatrix: row index out of range in column " +
                                std::to_string(j));
            if (k > col_offsets_[j] && row_indices_[k - 1] >= row_indices_[k])
                throw DataError("SparseMatrix: unsorted rows in column " + std::to_string(j));
            if (values_[k] == 0.0 || !std::isfinite(values_[k]))
                throw DataError("SparseMatrix: stored zero or non-finite value in column " +
                                std::to_string(j));
        }
    }
}

void sparse_matvec(const CscView& a, std::span<const double> v, std::span<double> out) {
    require_dims(v.size() == a.n_cols && out.size() == a.n_rows, "sparse_matvec: shape mismatch");
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t j = 0; j < a.n_cols; ++j) {
        const double vj = v[j];
        if (vj == 0.0) continue;
        for (auto k = a.col_offsets[j]; k < a.col_offsets[j + 1]; ++k)
            out[a.row_indices[k]] += a.values[k] * vj;
    }
}

void sparse_matvec_t(const CscView& a, std::span<const double> v, std::span<double> out) {
    require_dims(v.size() == a.n_rows && out.size() == a.n_cols,
                 "sparse_matvec_t: shape mismatch");
    for (std::size_t j = 0; j < a.n_cols; ++j) {
        double s = 0.0;
        for (auto k = a.col_offsets[j]; k < a.col_offsets[j + 1]; ++k)
            s += a.values[k] * v[a.row_indices[k]];
        out[j] = s;
    }
}

std::vector<double> sparse_matvec(const CscView& a, std::span<const double> v) {
    std::vector<double> out(a.n_rows);
    sparse_matvec(a, v, out);
    return out;
}

std::vector<double> sparse_matvec_t(const CscView& a, std::span<const double> v) {
    std::vector<double> out(a.n_cols);
    sparse_matvec_t(a, v, out);
    return out;
}

std::vector<double> column_norms(const CscView& a) {
    std::vector<double> norms(a.n_cols);
    for (std::size_t j = 0; j < a.n_cols; ++j) norms[j] = a.column(j).norm();
    return norms;
}

SparseMatrix sparse_add(const SparseMatrix& a, const SparseMatrix& b) {
    require_dims(a.rows() == b.rows() && a.cols() == b.cols(), "sparse_add: shape mismatch");
    SparseMatrix out(a.rows(), 0);
    out.reserve(a.nnz() + b.nnz(), a.cols());
    std::vector<RowIndex> rows;
    std::vector<double> vals;
    for (std::size_t j = 0; j < a.cols(); ++j) {
        const auto ca = a.column(j), cb = b.column(j);
        rows.clear();
        vals.clear();
        std::size_t p = 0, q = 0;
        while (p < ca.nnz() || q < cb.nnz()) {
            RowIndex r;
            double v;
            if (q == cb.nnz() || (p < ca.nnz() && ca.rows[p] < cb.rows[q])) {
                r = ca.rows[p];
                v = ca.values[p++];
            } else if (p == ca.nnz() || cb.rows[q] < ca.rows[p]) {
                r = cb.rows[q];
                v = cb.values[q++];
            } else {
                r = ca.rows[p];
                v = ca.values[p++] + cb.values[q++];
            }
            if (v != 0.0) {
                rows.push_back(r);
                vals.push_back(v);
            }
        }
        out.push_column({a.rows(), rows, vals});
    }
    return out;
}

ColumnBufferPair::ColumnBufferPair(std::size_t m_x, std::size_t m_y) : x_(m_x, 0), y_(m_y, 0) {}

void ColumnBufferPair::append_pair(SparseColumnView x, SparseColumnView y) {
    require_dims(x.n_rows == x_.rows() && y.n_rows == y_.rows(),
                 "append_pair: column dimension mismatch");
    x_.push_column(x);
    y_.push_column(y);
}

bool buffer_full(std::size_t nnz_x, std::size_t nnz_y, std::size_t n_cols, std::size_t l,
                 std::size_t m) noexcept {
    return nnz_x >= l * m || nnz_y >= l * m || n_cols >= m;
}

bool ColumnBufferPair::full(std::size_t l, std::size_t m) const noexcept {
    return buffer_full(nnz_x(), nnz_y(), n_cols(), l, m);
}

void ColumnBufferPair::reset() noexcept {
    x_.clear();
    y_.clear();
}

void ColumnBufferPair::release() {
    x_ = SparseMatrix(x_.rows(), 0);
    y_ = SparseMatrix(y_.rows(), 0);
}

void ColumnBufferPair::reserve(std::size_t nnz_each, std::size_t cols) {
    x_.reserve(nnz_each, cols);
    y_.reserve(nnz_each, cols);
}

}  // namespace cosketch
