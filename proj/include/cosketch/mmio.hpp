#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>

#include "cosketch/sparse.hpp"

namespace cosketch {

// Matrix Market coordinate format. Reads real, integer and pattern fields
// with general or symmetric symmetry; duplicates are summed and explicit
// zeros dropped. Errors carry the offending line number (DataError).
SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix read_matrix_market(const std::string& path);

// Writes `%%MatrixMarket matrix coordinate real general`, 1-based, in
// column-major entry order with round-trip precision.
void write_matrix_market(std::ostream& out, const SparseMatrix& a);
void write_matrix_market(const std::string& path, const SparseMatrix& a);

// Splits the columns of M at `split` (default: floor(cols / 2)) and returns
// X = M[:, :split]^T and Y = M[:, split:]^T, so both share n = M.rows().
std::pair<SparseMatrix, SparseMatrix> split_columns(const SparseMatrix& m,
                                                    std::optional<std::size_t> split = {});
std::pair<SparseMatrix, SparseMatrix> load_and_split(const std::string& path,
                                                     std::optional<std::size_t> split = {});

}  // namespace cosketch
