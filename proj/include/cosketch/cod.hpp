#pragma once

#include <cstddef>
#include <utility>

#include "cosketch/dense.hpp"
#include "cosketch/sparse.hpp"

namespace cosketch {

// Co-sketch (B_X, B_Y) whose product approximates X Y^T.
struct SketchPair {
    DenseMatrix b_x;  // m_x x l
    DenseMatrix b_y;  // m_y x l

    SketchPair() = default;
    SketchPair(std::size_t m_x, std::size_t m_y, std::size_t l) : b_x(m_x, l), b_y(m_y, l) {}
    SketchPair(DenseMatrix bx, DenseMatrix by) : b_x(std::move(bx)), b_y(std::move(by)) {}

    std::size_t width() const noexcept { return b_x.cols(); }
};

struct ShrinkReport {
    double gamma = 0.0;           // subtracted singular value
    double nuclear_before = 0.0;  // sum of singular values of the input product
    double nuclear_after = 0.0;   // sum after shrinkage
};

// Dense shrinkage of width l' (even): QR both factors, SVD of R_X R_Y^T,
// subtract the l'/2-th singular value from all of them (floored at zero) and
// rebuild. Output columns are ordered by non-increasing singular value, so the
// last l'/2 columns are zero.
std::pair<SketchPair, ShrinkReport> dense_shrink(const DenseMatrix& b_x, const DenseMatrix& b_y);

// [sketch, c] has width 2l; shrink it and keep the l surviving columns.
std::pair<SketchPair, ShrinkReport> merge_shrink(SketchPair sketch, DenseMatrix c_x,
                                                 DenseMatrix c_y);

// Streaming co-occurring directions with l slots.
class CodSketcher {
public:
    CodSketcher(std::size_t m_x, std::size_t m_y, std::size_t l);

    void update(SparseColumnView x, SparseColumnView y);
    // Returns the current sketch. A partially filled sketch is returned as is.
    const SketchPair& sketch() const noexcept { return sketch_; }
    SketchPair finalize() && { return std::move(sketch_); }

    std::size_t shrink_count() const noexcept { return shrinks_; }
    std::size_t width() const noexcept { return l_; }

private:
    std::size_t m_x_, m_y_, l_;
    SketchPair sketch_;
    std::size_t cursor_ = 0;  // first free slot
    std::size_t shrinks_ = 0;
};

SketchPair cod_sketch(const SparseMatrix& x, const SparseMatrix& y, std::size_t l);

}  // namespace cosketch
