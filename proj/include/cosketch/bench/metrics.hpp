#pragma once

#include <cstddef>
#include <cstdint>

#include "cosketch/cod.hpp"
#include "cosketch/linalg.hpp"
#include "cosketch/sparse.hpp"

namespace cosketch::bench {

struct MetricsContext {
    std::size_t k = 8;  // projection rank
    double tol = 1e-6;
    std::size_t max_iter = 2000;
    std::uint64_t seed = 0x5eed;
};

// ||X Y^T - B_X B_Y^T|| by Lanczos bidiagonalization of the implicit difference.
SpectralNormResult approx_error(const SparseMatrix& x, const SparseMatrix& y,
                                const SketchPair& sketch, const MetricsContext& ctx = {});

// ||X Y^T - U U^T X Y^T V V^T|| where U, V hold the top-k singular vectors of
// B_X B_Y^T (directions with zero singular value are left out).
SpectralNormResult projection_error(const SparseMatrix& x, const SparseMatrix& y,
                                    const SketchPair& sketch, const MetricsContext& ctx);

// ||X Y^T|| without forming the product.
SpectralNormResult product_norm(const SparseMatrix& x, const SparseMatrix& y,
                                const MetricsContext& ctx = {});

double spectral_norm(const SparseMatrix& a, const MetricsContext& ctx = {});

// ||A||_F^2 / ||A||^2. Throws NumericalError for a zero matrix.
double stable_rank(const SparseMatrix& a, const MetricsContext& ctx = {});

}  // namespace cosketch::bench
