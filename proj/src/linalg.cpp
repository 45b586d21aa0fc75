#include "cosketch/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cosketch/error.hpp"
#include "cosketch/kernels.hpp"

namespace cosketch {

HouseholderQr::HouseholderQr(DenseMatrix a, double rank_tol) : f_(std::move(a)) {
    const auto m = f_.rows(), n = f_.cols();
    require_dims(m >= n, "qr: needs rows >= cols");
    if (!f_.all_finite()) throw NumericalError("qr: non-finite input");
    tau_.assign(n, 0.0);
    sign_.assign(n, 1.0);
    const double threshold = rank_tol * f_.frobenius_norm();

    for (std::size_t k = 0; k < n; ++k) {
        auto col = f_.col(k);
        const double alpha = col[k];
        const double xnorm = norm2(col.subspan(k + 1));
        const double total = std::hypot(alpha, xnorm);
        if (total == 0.0 || total <= threshold) {
            // numerically dependent: no reflector, direction completed by e_k
            std::fill(col.begin() + static_cast<std::ptrdiff_t>(k), col.end(), 0.0);
            continue;
        }
        if (xnorm != 0.0) {
            const double beta = -std::copysign(total, alpha);
            tau_[k] = (beta - alpha) / beta;
            const double scale = 1.0 / (alpha - beta);
            for (std::size_t i = k + 1; i < m; ++i) col[i] *= scale;
            col[k] = beta;
            kernels::apply_reflector(f_, k, k, tau_[k], f_, k + 1, n);
        }
        if (col[k] < 0.0) sign_[k] = -1.0;
    }
}

DenseMatrix HouseholderQr::r() const {
    const auto n = f_.cols();
    DenseMatrix r(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i <= j; ++i) r(i, j) = sign_[i] * f_(i, j);
    return r;
}

DenseMatrix HouseholderQr::thin_q() const {
    const auto m = f_.rows(), n = f_.cols();
    DenseMatrix q(m, n);
    for (std::size_t k = 0; k < n; ++k) q(k, k) = 1.0;
    for (std::size_t k = n; k-- > 0;) kernels::apply_reflector(f_, k, k, tau_[k], q, k, n);
    for (std::size_t k = 0; k < n; ++k)
        if (sign_[k] < 0.0)
            for (auto& v : q.col(k)) v = -v;
    return q;
}

DenseMatrix HouseholderQr::apply_q(const DenseMatrix& w) const {
    const auto m = f_.rows(), n = f_.cols();
    require_dims(w.rows() == n, "apply_q: operand must have cols() rows");
    DenseMatrix out(m, w.cols());
    for (std::size_t c = 0; c < w.cols(); ++c)
        for (std::size_t i = 0; i < n; ++i) out(i, c) = sign_[i] * w(i, c);
    for (std::size_t k = n; k-- > 0;)
        kernels::apply_reflector(f_, k, k, tau_[k], out, 0, w.cols());
    return out;
}

QrResult thin_qr(const DenseMatrix& a) {
    HouseholderQr qr(a);
    return {qr.thin_q(), qr.r()};
}

namespace {

constexpr std::size_t kMaxSweeps = 60;

// Orthonormal completion: v is projected against the accepted columns
// (twice, for stability); returns false if nothing survives.
bool orthogonalize_against(const DenseMatrix& u, std::size_t accepted, std::span<double> v,
                           std::size_t skip = static_cast<std::size_t>(-1)) {
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t p = 0; p < accepted; ++p) {
            if (p == skip) continue;
            const double c = dot(u.col(p), v);
            const auto up = u.col(p);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * up[i];
        }
    }
    const double nv = norm2(v);
    if (nv < 0.5) return false;
    for (auto& x : v) x /= nv;
    return true;
}

// The unit vector with the largest component outside the span of the other
// columns; that component has norm at least sqrt(1 / n) when a slot is free.
void complete_with_best_unit(const DenseMatrix& u, std::size_t k, std::span<double> uk) {
    const auto n = u.rows();
    std::vector<double> best, trial(n);
    double best_norm = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(trial.begin(), trial.end(), 0.0);
        trial[i] = 1.0;
        orthogonalize_against(u, u.cols(), trial, k);
        const double nv = norm2(trial);
        if (nv > best_norm) {
            best_norm = nv;
            best = trial;
        }
    }
    for (std::size_t i = 0; i < n; ++i) uk[i] = best[i];
    orthogonalize_against(u, u.cols(), uk, k);
    const double nv = norm2(uk);
    for (auto& x : uk) x /= nv;
}

// Reorders columns so that column k becomes the old column order[k].
void permute_columns(DenseMatrix& a, const std::vector<std::size_t>& order) {
    const auto n = order.size();
    std::vector<bool> done(n, false);
    std::vector<double> tmp(a.rows());
    for (std::size_t start = 0; start < n; ++start) {
        if (done[start] || order[start] == start) continue;
        std::copy(a.col(start).begin(), a.col(start).end(), tmp.begin());
        std::size_t k = start;
        while (order[k] != start) {
            const auto src = a.col(order[k]);
            std::copy(src.begin(), src.end(), a.col(k).begin());
            done[k] = true;
            k = order[k];
        }
        std::copy(tmp.begin(), tmp.end(), a.col(k).begin());
        done[k] = true;
    }
}

// Two passes of classical Gram-Schmidt against an orthonormal set.
void reorthogonalize(const std::vector<std::vector<double>>& basis, std::vector<double>& x) {
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) {
            const double c = dot(b, x);
            for (std::size_t i = 0; i < x.size(); ++i) x[i] -= c * b[i];
        }
}

// Largest singular value of the upper bidiagonal matrix with diagonal alpha
// and superdiagonal beta (beta may be one longer than needed). Bisection on
// the Sturm count of the tridiagonal B^T B.
double top_singular_value(const std::vector<double>& alpha, const std::vector<double>& beta) {
    const std::size_t n = alpha.size();
    if (n == 0) return 0.0;
    std::vector<double> d(n), e(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = alpha[i] * alpha[i] + (i > 0 ? beta[i - 1] * beta[i - 1] : 0.0);
        if (i + 1 < n) e[i] = alpha[i] * beta[i];
    }
    double hi = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        hi = std::max(hi, d[i] + std::abs(e[i]) + (i > 0 ? std::abs(e[i - 1]) : 0.0));
    if (hi == 0.0) return 0.0;
    // number of eigenvalues of B^T B below x
    auto below = [&](double x) {
        std::size_t count = 0;
        double q = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double off = i > 0 ? e[i - 1] * e[i - 1] : 0.0;
            q = d[i] - x - (i > 0 ? off / q : 0.0);
            if (q == 0.0) q = -std::numeric_limits<double>::min();
            if (q < 0.0) ++count;
        }
        return count;
    };
    double lo = 0.0;
    while (hi - lo > 1e-15 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (below(mid) == n ? hi : lo) = mid;
    }
    return std::sqrt(hi);
}

}  // namespace

SvdResult svd_small(const DenseMatrix& a) {
    require_dims(a.rows() == a.cols(), "svd_small: square input required");
    if (!a.all_finite()) throw NumericalError("svd_small: non-finite input");
    const auto n = a.rows();
    DenseMatrix w = a;
    DenseMatrix v = DenseMatrix::identity(n);

    // pairs count as orthogonal once |<w_p, w_q>| <= n eps ||w_p|| ||w_q||,
    // the level at which rounding in the dot product itself dominates
    const double tol = std::max(1e-15, static_cast<double>(n) * std::numeric_limits<double>::epsilon());
    // columns below tol * ||A||_F only carry rounding noise; rotating them
    // against large columns re-injects noise of the same size forever
    const double negligible = std::pow(tol * a.frobenius_norm(), 2);
    bool converged = n < 2;
    for (std::size_t sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                auto wp = w.col(p), wq = w.col(q);
                const double alpha = dot(wp, wp), beta = dot(wq, wq), gamma = dot(wp, wq);
                if (gamma == 0.0 || alpha <= negligible || beta <= negligible ||
                    std::abs(gamma) <= tol * std::sqrt(alpha * beta))
                    continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
                const double c = 1.0 / std::hypot(1.0, t), s = c * t;
                for (std::size_t i = 0; i < n; ++i) {
                    const double x = wp[i], y = wq[i];
                    wp[i] = c * x - s * y;
                    wq[i] = s * x + c * y;
                }
                auto vp = v.col(p), vq = v.col(q);
                for (std::size_t i = 0; i < n; ++i) {
                    const double x = vp[i], y = vq[i];
                    vp[i] = c * x - s * y;
                    vq[i] = s * x + c * y;
                }
            }
        }
        converged = !rotated;
    }
    if (!converged) throw NumericalError("svd_small: Jacobi sweeps did not converge");

    std::vector<double> norms(n);
    for (std::size_t j = 0; j < n; ++j) norms[j] = norm2(w.col(j));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

    // w and v become the outputs in place
    permute_columns(w, order);
    permute_columns(v, order);
    SvdResult out{std::move(w), std::vector<double>(n), std::move(v)};
    std::vector<std::size_t> deferred;
    for (std::size_t k = 0; k < n; ++k) {
        const double nk = norms[order[k]];
        out.sigma[k] = nk;
        auto uk = out.u.col(k);
        if (nk > 0.0) {
            for (auto& x : uk) x /= nk;
            if (orthogonalize_against(out.u, k, uk)) continue;
        }
        std::fill(uk.begin(), uk.end(), 0.0);
        deferred.push_back(k);
    }
    // complete the left basis for (numerically) null directions; columns
    // still waiting for completion are zero and drop out of the projection
    std::size_t next_unit = 0;
    for (auto k : deferred) {
        auto uk = out.u.col(k);
        bool placed = false;
        while (!placed && next_unit < n) {
            std::fill(uk.begin(), uk.end(), 0.0);
            uk[next_unit++] = 1.0;
            placed = orthogonalize_against(out.u, n, uk, k);
        }
        if (!placed) complete_with_best_unit(out.u, k, uk);
    }
    return out;
}

DenseMatrix gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
    DenseMatrix g(rows, cols);
    for (auto& x : g.data()) x = rng.normal();
    return g;
}

std::vector<double> gaussian_vector(Rng& rng, std::size_t n) {
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    return x;
}

DenseMatrix orthonormalize(const DenseMatrix& k) {
    return HouseholderQr(k, 1e-12).thin_q();
}

SpectralNormResult spectral_norm_implicit(const LinearOperator& apply,
                                          const LinearOperator& apply_t, std::size_t rows,
                                          std::size_t cols, Rng& rng, SpectralNormOptions opts) {
    SpectralNormResult res;
    if (rows == 0 || cols == 0) {
        res.converged = true;
        return res;
    }
    // Golub-Kahan bidiagonalization A V = U B with full reorthogonalization;
    // the estimate is the top singular value of the upper bidiagonal B built
    // so far (alpha on the diagonal, beta above it).
    const std::size_t limit = std::min({rows, cols, opts.max_iter});
    std::vector<std::vector<double>> us, vs;
    std::vector<double> alpha, beta;

    std::vector<double> v = gaussian_vector(rng, cols);
    double nv = norm2(v);
    for (auto& x : v) x /= nv;
    std::vector<double> u(rows);
    double prev = -1.0;
    int steady = 0;
    bool invariant = false;

    for (std::size_t k = 0; k < limit; ++k) {
        apply(v, u);
        if (k > 0)
            for (std::size_t i = 0; i < rows; ++i) u[i] -= beta.back() * us.back()[i];
        reorthogonalize(us, u);
        const double a = norm2(u);
        vs.push_back(v);
        alpha.push_back(a);
        res.iterations = k + 1;
        if (a == 0.0) {
            invariant = true;
            break;
        }
        for (auto& x : u) x /= a;
        us.push_back(u);

        const double theta = top_singular_value(alpha, beta);
        res.value = std::max(res.value, theta);
        // two consecutive small changes, since a Ritz value can stall on a
        // plateau for one step before the next direction is picked up
        steady = (prev >= 0.0 && theta - prev <= opts.tol * theta) ? steady + 1 : 0;
        if (steady >= 2) {
            res.converged = true;
            return res;
        }
        prev = theta;

        apply_t(u, v);
        for (std::size_t i = 0; i < cols; ++i) v[i] -= a * vs.back()[i];
        reorthogonalize(vs, v);
        const double b = norm2(v);
        if (b <= 1e-14 * res.value) {
            invariant = true;
            break;
        }
        beta.push_back(b);
        for (auto& x : v) x /= b;
    }
    // exact at an invariant subspace, or once the Krylov space is the whole
    // domain after min(rows, cols) steps
    res.converged = invariant || limit == std::min(rows, cols);
    res.value = std::max(res.value, top_singular_value(alpha, beta));
    return res;
}

}  // namespace cosketch
