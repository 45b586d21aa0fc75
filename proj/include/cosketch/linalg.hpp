#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "cosketch/dense.hpp"
#include "cosketch/rng.hpp"

namespace cosketch {

struct QrResult {
    DenseMatrix q;  // rows x cols, orthonormal columns
    DenseMatrix r;  // cols x cols, upper triangular with non-negative diagonal
};

struct SvdResult {
    DenseMatrix u;
    std::vector<double> sigma;  // non-increasing
    DenseMatrix v;
};

// Householder factorization kept in compact form: reflectors below the
// diagonal, R on and above it. Lets callers apply Q to a small block without
// ever forming the rows x cols orthonormal factor.
class HouseholderQr {
public:
    // Columns whose remaining norm is <= rank_tol * ||a||_F get no reflector;
    // their R row is zeroed and Q is completed with a unit direction.
    explicit HouseholderQr(DenseMatrix a, double rank_tol = 0.0);

    std::size_t rows() const noexcept { return f_.rows(); }
    std::size_t cols() const noexcept { return f_.cols(); }

    DenseMatrix r() const;
    DenseMatrix thin_q() const;
    // Q * w for w with cols() rows; result has rows() rows.
    DenseMatrix apply_q(const DenseMatrix& w) const;

private:
    DenseMatrix f_;
    std::vector<double> tau_;
    std::vector<double> sign_;  // diag flips making R(k,k) >= 0
};

QrResult thin_qr(const DenseMatrix& a);

// One-sided Jacobi SVD of a square matrix. At most 60 sweeps; throws
// NumericalError if the off-diagonal mass has not vanished by then.
SvdResult svd_small(const DenseMatrix& a);

DenseMatrix gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols);
std::vector<double> gaussian_vector(Rng& rng, std::size_t n);

// Orthonormal basis whose span contains range(k). Numerically dependent
// columns are replaced by unit directions orthogonalized against the
// accepted ones, so the result always has k.cols() columns.
DenseMatrix orthonormalize(const DenseMatrix& k);

using LinearOperator = std::function<void(std::span<const double> in, std::span<double> out)>;

struct SpectralNormResult {
    double value = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
};

struct SpectralNormOptions {
    double tol = 1e-6;         // relative change of the estimate
    std::size_t max_iter = 2000;  // operator applications of each kind
};

// Largest singular value of an operator known only through A v and A^T v,
// by Lanczos bidiagonalization from a Gaussian start vector.
SpectralNormResult spectral_norm_implicit(const LinearOperator& apply,
                                          const LinearOperator& apply_t, std::size_t rows,
                                          std::size_t cols, Rng& rng,
                                          SpectralNormOptions opts = {});

}  // namespace cosketch
