#pragma once

// Block kernels underneath SI, DS and the metrics.
//
// Two implementations of each kernel live side by side:
//   serial::  the reference, single-threaded, fixed reduction order;
//   omp::     OpenMP version that splits work over independent output
//             columns. Every output column is still reduced by one thread in
//             the same order as the reference, so results are bit-identical.
// The unqualified functions dispatch to omp:: when built with OpenMP.

#include <cstddef>
#include <span>

#include "cosketch/dense.hpp"
#include "cosketch/sparse.hpp"

namespace cosketch::kernels {

// out (m x k) = S (m x d) * V (d x k)
void spmm(const CscView& s, const DenseMatrix& v, DenseMatrix& out);
// out (d x k) = S^T (d x m) * W (m x k)
void spmm_t(const CscView& s, const DenseMatrix& w, DenseMatrix& out);
// The same two products with every dense operand stored transposed, i.e.
// one logical row per column. Each nonzero then updates k contiguous values.
// out_t (k x m) = (S V)^T given vt = V^T (k x d)
void spmm_tr(const CscView& s, const DenseMatrix& vt, DenseMatrix& out_t);
// out_t (k x d) = (S^T W)^T given wt = W^T (k x m)
void spmm_t_tr(const CscView& s, const DenseMatrix& wt, DenseMatrix& out_t);
// out (m x n) = A (m x k) * B (k x n)
void gemm_nn(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);
// out (k x n) = A^T (k x m) * B (m x n)
void gemm_tn(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);
// Applies H = I - tau v v^T (v[0] == 1 implied, v stored from row `offset`
// of column `vcol` of `reflectors`) to columns [first, last) of `a`, rows
// offset..a.rows()-1.
void apply_reflector(const DenseMatrix& reflectors, std::size_t vcol, std::size_t offset,
                     double tau, DenseMatrix& a, std::size_t first, std::size_t last);

// Number of threads the omp:: kernels will use (1 without OpenMP).
int max_threads() noexcept;

namespace serial {
void spmm(const CscView& s, const DenseMatrix& v, DenseMatrix& out);
void spmm_t(const CscView& s, const DenseMatrix& w, DenseMatrix& out);
void spmm_tr(const CscView& s, const DenseMatrix& vt, DenseMatrix& out_t);
void spmm_t_tr(const CscView& s, const DenseMatrix& wt, DenseMatrix& out_t);
void gemm_nn(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);
void gemm_tn(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);
void apply_reflector(const DenseMatrix& reflectors, std::size_t vcol, std::size_t offset,
                     double tau, DenseMatrix& a, std::size_t first, std::size_t last);
}  // namespace serial

namespace omp {
void spmm(const CscView& s, const DenseMatrix& v, DenseMatrix& out);
void spmm_t(const CscView& s, const DenseMatrix& w, DenseMatrix& out);
void spmm_tr(const CscView& s, const DenseMatrix& vt, DenseMatrix& out_t);
void spmm_t_tr(const CscView& s, const DenseMatrix& wt, DenseMatrix& out_t);
void gemm_nn(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);
void gemm_tn(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);
void apply_reflector(const DenseMatrix& reflectors, std::size_t vcol, std::size_t offset,
                     double tau, DenseMatrix& a, std::size_t first, std::size_t last);
}  // namespace omp

}  // namespace cosketch::kernels
