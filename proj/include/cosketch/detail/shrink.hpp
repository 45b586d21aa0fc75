#pragma once

#include <cstddef>
#include <utility>

#include "cosketch/cod.hpp"

namespace cosketch::detail {

// Dense shrinkage consuming its inputs. Only the first `keep` output columns
// are materialized.
std::pair<SketchPair, ShrinkReport> shrink_owned(DenseMatrix b_x, DenseMatrix b_y,
                                                 std::size_t keep);

// Writes a sparse column into column `slot` of a dense matrix (slot must be zero).
void scatter_column(SparseColumnView c, DenseMatrix& b, std::size_t slot,
                    std::size_t row_offset = 0);

}  // namespace cosketch::detail
