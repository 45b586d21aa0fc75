#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cosketch/dense.hpp"
#include "cosketch/memory.hpp"

namespace cosketch {

using RowIndex = std::uint32_t;

// Non-owning view of one sparse column: strictly increasing row indices,
// no stored zeros.
struct SparseColumnView {
    std::size_t n_rows = 0;
    std::span<const RowIndex> rows;
    std::span<const double> values;

    std::size_t nnz() const noexcept { return rows.size(); }
    double norm() const noexcept;
};

// Owning sparse column.
struct SparseColumn {
    std::size_t n_rows = 0;
    std::vector<RowIndex> rows;
    std::vector<double> values;

    // Drops zeros; throws DimensionError on out-of-range rows.
    static SparseColumn from_dense(std::span<const double> dense);
    // Sorts by row and drops zeros. Duplicate rows are rejected.
    static SparseColumn from_entries(std::size_t n_rows, std::vector<RowIndex> rows,
                                     std::vector<double> values);

    SparseColumnView view() const noexcept { return {n_rows, rows, values}; }
    std::size_t nnz() const noexcept { return rows.size(); }
};

// Non-owning compressed-sparse-column view. Used by the kernels so that both
// SparseMatrix and the streaming buffers can feed them without copies.
struct CscView {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::span<const std::size_t> col_offsets;
    std::span<const RowIndex> row_indices;
    std::span<const double> values;

    std::size_t nnz() const noexcept { return values.size(); }
    SparseColumnView column(std::size_t j) const noexcept {
        const auto b = col_offsets[j], e = col_offsets[j + 1];
        return {n_rows, row_indices.subspan(b, e - b), values.subspan(b, e - b)};
    }
};

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

// Compressed-sparse-column matrix.
class SparseMatrix {
public:
    SparseMatrix() : col_offsets_(1, 0) {}
    SparseMatrix(std::size_t n_rows, std::size_t n_cols);

    // Duplicates are summed; zero results are dropped.
    static SparseMatrix from_triplets(std::size_t n_rows, std::size_t n_cols,
                                      std::vector<Triplet> entries);
    static SparseMatrix from_columns(std::size_t n_rows, std::span<const SparseColumn> columns);
    static SparseMatrix from_dense(const DenseMatrix& a);

    std::size_t rows() const noexcept { return n_rows_; }
    std::size_t cols() const noexcept { return n_cols_; }
    std::size_t nnz() const noexcept { return values_.size(); }

    SparseColumnView column(std::size_t j) const noexcept { return view().column(j); }
    CscView view() const noexcept {
        return {n_rows_, n_cols_, col_offsets_, row_indices_, values_};
    }

    // Appends a column on the right.
    void push_column(SparseColumnView c);
    void reserve(std::size_t nnz, std::size_t cols);
    void clear() noexcept;

    SparseMatrix transposed() const;
    // Columns [begin, end) as a new matrix.
    SparseMatrix col_range(std::size_t begin, std::size_t end) const;
    DenseMatrix to_dense() const;

    double frobenius_norm() const noexcept;
    double frobenius_norm_sq() const noexcept;

    // Throws DataError if any structural invariant is violated.
    void validate() const;

    std::span<const std::size_t> col_offsets() const noexcept { return col_offsets_; }
    std::span<const RowIndex> row_indices() const noexcept { return row_indices_; }
    std::span<const double> values() const noexcept { return values_; }

private:
    std::size_t n_rows_ = 0;
    std::size_t n_cols_ = 0;
    memory::tracked_vector<std::size_t> col_offsets_;
    memory::tracked_vector<RowIndex> row_indices_;
    memory::tracked_vector<double> values_;
};

// y = A v and y = A^T v. Products are accumulated in ascending stored order.
std::vector<double> sparse_matvec(const CscView& a, std::span<const double> v);
std::vector<double> sparse_matvec_t(const CscView& a, std::span<const double> v);
void sparse_matvec(const CscView& a, std::span<const double> v, std::span<double> out);
void sparse_matvec_t(const CscView& a, std::span<const double> v, std::span<double> out);

std::vector<double> column_norms(const CscView& a);

// a + b for equally shaped matrices; cancelled entries are dropped.
SparseMatrix sparse_add(const SparseMatrix& a, const SparseMatrix& b);

// Pending buffer pair (S_X, S_Y) of SCOD. Both sides grow one column at a
// time in compressed form, so handing them to the kernels needs no copy.
class ColumnBufferPair {
public:
    ColumnBufferPair(std::size_t m_x, std::size_t m_y);

    void append_pair(SparseColumnView x, SparseColumnView y);
    // nnz_x >= l*m or nnz_y >= l*m or cols == m.
    bool full(std::size_t l, std::size_t m) const noexcept;
    void reset() noexcept;
    // Preallocates room for the expected fill.
    void reserve(std::size_t nnz_each, std::size_t cols);
    // Empties the buffer and returns its storage.
    void release();

    std::size_t n_cols() const noexcept { return x_.cols(); }
    std::size_t nnz_x() const noexcept { return x_.nnz(); }
    std::size_t nnz_y() const noexcept { return y_.nnz(); }
    bool empty() const noexcept { return n_cols() == 0; }

    CscView x() const noexcept { return x_.view(); }
    CscView y() const noexcept { return y_.view(); }

private:
    SparseMatrix x_;
    SparseMatrix y_;
};

bool buffer_full(std::size_t nnz_x, std::size_t nnz_y, std::size_t n_cols, std::size_t l,
                 std::size_t m) noexcept;

}  // namespace cosketch
