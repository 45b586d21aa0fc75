#include <doctest.h>

#include <cmath>
#include <vector>

#include "cosketch/dense.hpp"
#include "cosketch/error.hpp"
#include "cosketch/memory.hpp"
#include "cosketch/sparse.hpp"
#include "oracle.hpp"

using namespace cosketch;

namespace {

SparseColumn column_with(std::size_t rows, std::size_t nnz, double value = 1.0) {
    std::vector<RowIndex> idx;
    std::vector<double> val;
    for (std::size_t i = 0; i < nnz; ++i) {
        idx.push_back(static_cast<RowIndex>(i));
        val.push_back(value + static_cast<double>(i));
    }
    return SparseColumn::from_entries(rows, idx, val);
}

}  // namespace

TEST_SUITE("sparse_core") {

TEST_CASE("append_pair updates counters") {
    ColumnBufferPair buf(10, 8);
    buf.append_pair(column_with(10, 3).view(), column_with(8, 2).view());
    CHECK(buf.n_cols() == 1);
    CHECK(buf.nnz_x() == 3);
    CHECK(buf.nnz_y() == 2);
}

TEST_CASE("append_pair accepts an all-zero pair") {
    ColumnBufferPair buf(10, 8);
    buf.append_pair(SparseColumn{10, {}, {}}.view(), SparseColumn{8, {}, {}}.view());
    CHECK(buf.n_cols() == 1);
    CHECK(buf.nnz_x() == 0);
    CHECK(buf.nnz_y() == 0);
    CHECK_FALSE(buf.empty());
}

TEST_CASE("sequential appends sum nonzero counts") {
    ColumnBufferPair buf(10, 8);
    for (std::size_t k = 1; k <= 5; ++k) buf.append_pair(column_with(10, k).view(), column_with(8, 1).view());
    CHECK(buf.nnz_x() == 15);
    CHECK(buf.nnz_y() == 5);
    CHECK(buf.n_cols() == 5);
    CHECK(buf.x().n_cols == buf.y().n_cols);
    buf.reset();
    CHECK(buf.empty());
    CHECK(buf.nnz_x() == 0);
}

TEST_CASE("append_pair rejects mismatched row counts") {
    ColumnBufferPair buf(10, 8);
    CHECK_THROWS_AS(buf.append_pair(column_with(9, 1).view(), column_with(8, 1).view()), DimensionError);
    CHECK_THROWS_AS(buf.append_pair(column_with(10, 1).view(), column_with(7, 1).view()), DimensionError);
    CHECK(buf.empty());
}

TEST_CASE("buffer_full disjuncts") {
    CHECK(buffer_full(40, 0, 5, 4, 10));
    CHECK_FALSE(buffer_full(39, 39, 9, 4, 10));
    CHECK(buffer_full(0, 0, 10, 4, 10));
    CHECK(buffer_full(0, 40, 1, 4, 10));
}

TEST_CASE("buffer_full is monotone under append") {
    oracle::Gen gen(7);
    for (int trial = 0; trial < 50; ++trial) {
        ColumnBufferPair buf(12, 9);
        const std::size_t l = 1 + gen.index(4), m = 12;
        bool was_full = false;
        for (int step = 0; step < 30; ++step) {
            buf.append_pair(column_with(12, gen.index(13)).view(), column_with(9, gen.index(10)).view());
            const bool now = buf.full(l, m);
            if (was_full) CHECK(now);
            was_full = now;
        }
    }
}

TEST_CASE("sparse_matvec on an identity pattern") {
    std::vector<Triplet> t{{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}};
    const auto a = SparseMatrix::from_triplets(3, 3, t);
    const std::vector<double> v{1, 2, 3};
    CHECK(sparse_matvec(a.view(), v) == v);
    CHECK(sparse_matvec_t(a.view(), v) == v);
}

TEST_CASE("sparse_matvec on an empty matrix gives zeros") {
    const SparseMatrix a(4, 6);
    const std::vector<double> v(6, 2.5), u(4, -1.0);
    CHECK(sparse_matvec(a.view(), v) == std::vector<double>(4, 0.0));
    CHECK(sparse_matvec_t(a.view(), u) == std::vector<double>(6, 0.0));
}

TEST_CASE("sparse_matvec rejects wrong lengths") {
    const SparseMatrix a(4, 6);
    CHECK_THROWS_AS(sparse_matvec(a.view(), std::vector<double>(5)), DimensionError);
    CHECK_THROWS_AS(sparse_matvec_t(a.view(), std::vector<double>(6)), DimensionError);
}

TEST_CASE("sparse_matvec matches the dense product") {
    oracle::Gen gen(11);
    SUBCASE("20 x 30 at density 0.2") {
        const auto a = gen.sparse(20, 30, 0.2);
        const oracle::Vec v = gen.gaussian(30, 1);
        const oracle::Vec u = gen.gaussian(20, 1);
        const auto got = sparse_matvec(a.view(), std::vector<double>(v.data(), v.data() + 30));
        const auto got_t = sparse_matvec_t(a.view(), std::vector<double>(u.data(), u.data() + 20));
        const oracle::Vec want = oracle::dense(a) * v, want_t = oracle::dense(a).transpose() * u;
        CHECK((Eigen::Map<const oracle::Vec>(got.data(), 20) - want).norm() <= 1e-12 * want.norm());
        CHECK((Eigen::Map<const oracle::Vec>(got_t.data(), 30) - want_t).norm() <= 1e-12 * want_t.norm());
    }
    SUBCASE("random shapes up to 200 x 200") {
        for (int trial = 0; trial < 60; ++trial) {
            const auto r = 1 + gen.index(200), c = 1 + gen.index(200);
            const auto a = gen.sparse(r, c, gen.uniform() * 0.3);
            const oracle::Vec v = gen.gaussian(c, 1);
            const auto got = sparse_matvec(a.view(), std::vector<double>(v.data(), v.data() + c));
            const oracle::Vec want = oracle::dense(a) * v;
            CHECK((Eigen::Map<const oracle::Vec>(got.data(), r) - want).norm() <=
                  1e-12 * std::max(want.norm(), 1e-300));
        }
    }
}

TEST_CASE("column_norms") {
    CHECK(column_norms(SparseMatrix(5, 3).view()) == std::vector<double>(3, 0.0));

    std::vector<Triplet> t{{0, 0, 3.0}, {1, 0, 4.0}};
    const auto a = SparseMatrix::from_triplets(2, 1, t);
    CHECK(column_norms(a.view()) == std::vector<double>{5.0});

    oracle::Gen gen(3);
    const auto b = gen.sparse(50, 10, 0.3);
    const auto got = column_norms(b.view());
    const oracle::Mat d = oracle::dense(b);
    for (int j = 0; j < 10; ++j) CHECK(got[j] == doctest::Approx(d.col(j).norm()).epsilon(1e-14));
}

TEST_CASE("columns round-trip through SparseMatrix") {
    oracle::Gen gen(5);
    std::vector<SparseColumn> cols;
    for (int j = 0; j < 25; ++j) {
        std::vector<double> d(17, 0.0);
        for (auto& v : d)
            if (gen.uniform() < 0.3) v = gen.normal();
        cols.push_back(SparseColumn::from_dense(d));
    }
    const auto a = SparseMatrix::from_columns(17, cols);
    a.validate();
    REQUIRE(a.cols() == cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        const auto c = a.column(j);
        CHECK(std::vector<RowIndex>(c.rows.begin(), c.rows.end()) == cols[j].rows);
        CHECK(std::vector<double>(c.values.begin(), c.values.end()) == cols[j].values);
    }
}

TEST_CASE("from_triplets sums duplicates and drops zeros") {
    std::vector<Triplet> t{{1, 0, 2.0}, {1, 0, 3.0}, {0, 1, 1.0}, {0, 1, -1.0}, {2, 1, 0.0}};
    const auto a = SparseMatrix::from_triplets(3, 2, t);
    a.validate();
    CHECK(a.nnz() == 1);
    CHECK(a.to_dense()(1, 0) == 5.0);
    CHECK_THROWS_AS(SparseMatrix::from_triplets(3, 2, {{3, 0, 1.0}}), DimensionError);
}

TEST_CASE("from_entries sorts and rejects duplicates") {
    const auto c = SparseColumn::from_entries(5, {4, 0, 2}, {1.0, 2.0, 0.0});
    CHECK(c.rows == std::vector<RowIndex>{0, 4});
    CHECK(c.values == std::vector<double>{2.0, 1.0});
    CHECK_THROWS(SparseColumn::from_entries(5, {1, 1}, {1.0, 2.0}));
    CHECK_THROWS_AS(SparseColumn::from_entries(5, {5}, {1.0}), DimensionError);
}

TEST_CASE("transpose, column ranges and addition agree with dense") {
    oracle::Gen gen(9);
    const auto a = gen.sparse(13, 21, 0.25), b = gen.sparse(13, 21, 0.25);
    CHECK(oracle::dense(a.transposed()) == oracle::dense(a).transpose());
    CHECK(oracle::dense(a.col_range(4, 11)) == oracle::dense(a).middleCols(4, 7));
    CHECK(oracle::dense(sparse_add(a, b)).isApprox(oracle::dense(a) + oracle::dense(b)));
    const auto doubled = sparse_add(a, a.transposed().transposed());
    CHECK(doubled.nnz() == a.nnz());

    SparseMatrix neg = SparseMatrix::from_dense(oracle::from_eigen(-oracle::dense(a)));
    CHECK(sparse_add(a, neg).nnz() == 0);
    CHECK_THROWS_AS(sparse_add(a, SparseMatrix(13, 20)), DimensionError);
}

TEST_CASE("frobenius norm of sparse and dense storage") {
    oracle::Gen gen(21);
    const auto a = gen.sparse(30, 40, 0.1);
    CHECK(a.frobenius_norm() == doctest::Approx(oracle::dense(a).norm()).epsilon(1e-14));
    CHECK(a.to_dense().frobenius_norm() == doctest::Approx(oracle::dense(a).norm()).epsilon(1e-14));
}

TEST_CASE("allocation ledger sees library containers") {
    memory::PeakScope scope;
    {
        DenseMatrix big(100, 50);
        (void)big;
    }
    CHECK(scope.peak_scalars() >= 5000);
    CHECK(scope.peak_scalars() < 5100);

    memory::PeakScope inner;
    CHECK(inner.peak_scalars() == 0);
}

}  // TEST_SUITE
