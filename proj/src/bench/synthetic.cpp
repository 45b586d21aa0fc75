#include "cosketch/bench/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cosketch/dense.hpp"
#include "cosketch/error.hpp"

namespace cosketch::bench {

namespace {

constexpr double kMaxDenseWorkspace = 5e7;

std::size_t below(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)) % n;
}

// k distinct indices from [0, n) by partial Fisher-Yates.
std::vector<std::size_t> distinct(Rng& rng, std::size_t n, std::size_t k) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + below(rng, n - i)]);
    idx.resize(k);
    return idx;
}

// Rotation angle bounded away from the axes so rotations always mix.
std::pair<double, double> random_rotation(Rng& rng) {
    for (;;) {
        const double theta = 2.0 * std::numbers::pi * rng.uniform();
        const double c = std::cos(theta), s = std::sin(theta);
        if (std::abs(c) > 0.05 && std::abs(s) > 0.05) return {c, s};
    }
}

}  // namespace

void SyntheticSpec::validate() const {
    if (m_x == 0 || m_y == 0 || n == 0) throw ConfigError("synthetic: dimensions must be positive");
    if (!(density > 0.0 && density <= 1.0)) throw ConfigError("synthetic: density must lie in (0,1]");
    if (!(noise_density >= 0.0 && noise_density <= 1.0))
        throw ConfigError("synthetic: noise density must lie in [0,1]");
    if (!std::is_sorted(profile.rbegin(), profile.rend()))
        throw ConfigError("synthetic: profile must be non-increasing");
    if (profile.empty() && noise_density == 0.0)
        throw ConfigError("synthetic: empty profile needs a noise density");
    const double k = static_cast<double>(profile.size());
    if (density * static_cast<double>(std::min(m_x, m_y)) * static_cast<double>(n) < k ||
        profile.size() > std::min({m_x, m_y, n}))
        throw DataError("synthetic: density cannot support the requested rank");
}

std::vector<double> linear_profile(std::size_t top) {
    std::vector<double> r(top);
    for (std::size_t i = 0; i < top; ++i) r[i] = static_cast<double>(top - i);
    return r;
}

SparseMatrix sparse_lowrank(std::size_t m, std::size_t n, double density,
                            std::span<const double> profile, Rng& rng) {
    const auto k = profile.size();
    if (k == 0) return SparseMatrix(m, n);
    if (static_cast<double>(m) * static_cast<double>(n) > kMaxDenseWorkspace)
        throw DataError("synthetic: m*n too large for the rotation generator");
    if (k > std::min(m, n)) throw DataError("synthetic: rank exceeds matrix dimensions");
    const auto target = static_cast<std::size_t>(
        std::max(static_cast<double>(k), std::round(density * static_cast<double>(m) * static_cast<double>(n))));

    DenseMatrix w(m, n);
    const auto rows = distinct(rng, m, k), cols = distinct(rng, n, k);
    for (std::size_t i = 0; i < k; ++i) w(rows[i], cols[i]) = profile[i];
    std::size_t nnz = k;

    // Rows first: grow each planted column to about 2*density*m entries, so
    // the column phase needs roughly half of the columns to reach the target.
    std::vector<std::size_t> active_rows = rows;
    const auto per_col = static_cast<std::size_t>(std::ceil(2.0 * density * static_cast<double>(m)));
    const auto row_target = std::min(target, k * std::min(m, std::max<std::size_t>(1, per_col)));
    std::vector<char> row_seen(m, 0);
    for (auto r : rows) row_seen[r] = 1;
    while (nnz < row_target) {
        const auto i = active_rows[below(rng, active_rows.size())];
        auto j = below(rng, m);
        if (j == i) continue;
        const auto [c, s] = random_rotation(rng);
        for (std::size_t col = 0; col < n; ++col) {
            const double a = w(i, col), b = w(j, col);
            if (a == 0.0 && b == 0.0) continue;
            nnz -= (a != 0.0) + (b != 0.0);
            w(i, col) = c * a - s * b;
            w(j, col) = s * a + c * b;
            nnz += (w(i, col) != 0.0) + (w(j, col) != 0.0);
        }
        if (!row_seen[j]) {
            row_seen[j] = 1;
            active_rows.push_back(j);
        }
    }

    std::vector<std::size_t> active_cols = cols;
    std::vector<char> col_seen(n, 0);
    for (auto c : cols) col_seen[c] = 1;
    while (nnz < target) {
        const auto i = active_cols[below(rng, active_cols.size())];
        auto j = below(rng, n);
        if (j == i) continue;
        const auto [c, s] = random_rotation(rng);
        auto ci = w.col(i), cj = w.col(j);
        for (std::size_t r = 0; r < m; ++r) {
            const double a = ci[r], b = cj[r];
            if (a == 0.0 && b == 0.0) continue;
            nnz -= (a != 0.0) + (b != 0.0);
            ci[r] = c * a - s * b;
            cj[r] = s * a + c * b;
            nnz += (ci[r] != 0.0) + (cj[r] != 0.0);
        }
        if (!col_seen[j]) {
            col_seen[j] = 1;
            active_cols.push_back(j);
        }
    }
    return SparseMatrix::from_dense(w);
}

SparseMatrix sparse_uniform(std::size_t m, std::size_t n, double density, Rng& rng) {
    SparseMatrix out(m, 0);
    if (density <= 0.0) return SparseMatrix(m, n);
    out.reserve(static_cast<std::size_t>(density * static_cast<double>(m) * static_cast<double>(n) * 1.1) + 16, n);
    std::vector<RowIndex> idx;
    std::vector<double> val;
    const double log_q = std::log1p(-std::min(density, 1.0 - 1e-12));
    for (std::size_t j = 0; j < n; ++j) {
        idx.clear();
        val.clear();
        // geometric skips between present positions
        double pos = -1.0;
        for (;;) {
            pos += 1.0 + (density >= 1.0 ? 0.0 : std::floor(std::log(rng.uniform()) / log_q));
            if (pos >= static_cast<double>(m)) break;
            idx.push_back(static_cast<RowIndex>(pos));
            val.push_back(rng.uniform());
        }
        out.push_column({m, idx, val});
    }
    return out;
}

std::pair<SparseMatrix, SparseMatrix> generate_lowrank(const SyntheticSpec& spec) {
    spec.validate();
    const Rng base(spec.seed);
    auto make = [&](std::size_t m, std::uint64_t stream) {
        Rng lr = base.fork(stream), noise = base.fork(stream + 100);
        SparseMatrix a = sparse_lowrank(m, spec.n, spec.density, spec.profile, lr);
        if (spec.noise_density > 0.0)
            a = sparse_add(a, sparse_uniform(m, spec.n, spec.noise_density, noise));
        return a;
    };
    return {make(spec.m_x, 1), make(spec.m_y, 2)};
}

SyntheticSpec preset(const std::string& name, std::uint64_t seed) {
    SyntheticSpec s;
    s.m_x = 200;
    s.m_y = 300;
    s.n = 3000;
    s.density = 0.02;
    s.profile = linear_profile(40);
    s.seed = seed;
    if (name == "lowrank") {
        s.noise_density = 0.0;
    } else if (name == "noisy") {
        s.noise_density = 0.02;
    } else {
        throw ConfigError("unknown preset '" + name + "' (expected lowrank or noisy)");
    }
    return s;
}

}  // namespace cosketch::bench
