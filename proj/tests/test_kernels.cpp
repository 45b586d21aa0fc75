#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cosketch/error.hpp"
#include "cosketch/kernels.hpp"
#include "cosketch/linalg.hpp"
#include "oracle.hpp"

using namespace cosketch;
using oracle::Mat;

namespace {

// Raises the thread count for the duration of a test so the parallel paths
// really split work, even on a single-core machine.
struct Threads {
    int saved = 1;
    explicit Threads(int n) {
#ifdef _OPENMP
        saved = omp_get_max_threads();
        omp_set_num_threads(n);
#else
        (void)n;
#endif
    }
    ~Threads() {
#ifdef _OPENMP
        omp_set_num_threads(saved);
#endif
    }
};

bool bit_equal(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    const auto x = a.data(), y = b.data();
    return std::equal(x.begin(), x.end(), y.begin());
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("spmm and spmm_t: parallel equals serial bit for bit and matches dense") {
    Threads t(4);
    oracle::Gen gen(1);
    for (int trial = 0; trial < 10; ++trial) {
        const auto s = gen.sparse(150 + gen.index(100), 200 + gen.index(100), 0.1);
        const Mat v = gen.gaussian(s.cols(), 12), w = gen.gaussian(s.rows(), 12);
        DenseMatrix a, b, c, d;
        kernels::serial::spmm(s.view(), oracle::from_eigen(v), a);
        kernels::omp::spmm(s.view(), oracle::from_eigen(v), b);
        kernels::serial::spmm_t(s.view(), oracle::from_eigen(w), c);
        kernels::omp::spmm_t(s.view(), oracle::from_eigen(w), d);
        CHECK(bit_equal(a, b));
        CHECK(bit_equal(c, d));
        CHECK(oracle::rel_diff(oracle::dense(a), oracle::dense(s) * v) <= 1e-13);
        CHECK(oracle::rel_diff(oracle::dense(c), oracle::dense(s).transpose() * w) <= 1e-13);
    }
}

TEST_CASE("transposed-layout spmm: parallel equals serial and matches the column-major kernels") {
    Threads t(4);
    oracle::Gen gen(6);
    for (int trial = 0; trial < 10; ++trial) {
        const auto s = gen.sparse(150 + gen.index(100), 200 + gen.index(100), 0.1);
        const std::size_t k = 1 + gen.index(40);  // exercises partial column blocks
        const Mat v = gen.gaussian(s.cols(), k), w = gen.gaussian(s.rows(), k);
        const DenseMatrix vt = oracle::from_eigen(Mat(v.transpose()));
        const DenseMatrix wt = oracle::from_eigen(Mat(w.transpose()));
        DenseMatrix a, b, c, d, ref, ref_t;
        kernels::serial::spmm_tr(s.view(), vt, a);
        kernels::omp::spmm_tr(s.view(), vt, b);
        kernels::serial::spmm_t_tr(s.view(), wt, c);
        kernels::omp::spmm_t_tr(s.view(), wt, d);
        CHECK(bit_equal(a, b));
        CHECK(bit_equal(c, d));
        // same per-entry reduction order as the column-major kernels
        kernels::serial::spmm(s.view(), oracle::from_eigen(v), ref);
        kernels::serial::spmm_t(s.view(), oracle::from_eigen(w), ref_t);
        CHECK(bit_equal(a, ref.transposed()));
        CHECK(bit_equal(c, ref_t.transposed()));
        CHECK(oracle::rel_diff(oracle::dense(a), (oracle::dense(s) * v).transpose()) <= 1e-13);
    }
    DenseMatrix out;
    const auto s = gen.sparse(10, 8, 0.3);
    CHECK_THROWS_AS(kernels::spmm_tr(s.view(), DenseMatrix(3, 7), out), DimensionError);
    CHECK_THROWS_AS(kernels::spmm_t_tr(s.view(), DenseMatrix(3, 8), out), DimensionError);
}

TEST_CASE("gemm: parallel equals serial bit for bit and matches dense") {
    Threads t(4);
    oracle::Gen gen(2);
    const Mat a = gen.gaussian(120, 40), b = gen.gaussian(40, 30), c = gen.gaussian(120, 30);
    DenseMatrix p, q, r, s;
    kernels::serial::gemm_nn(oracle::from_eigen(a), oracle::from_eigen(b), p);
    kernels::omp::gemm_nn(oracle::from_eigen(a), oracle::from_eigen(b), q);
    kernels::serial::gemm_tn(oracle::from_eigen(a), oracle::from_eigen(c), r);
    kernels::omp::gemm_tn(oracle::from_eigen(a), oracle::from_eigen(c), s);
    CHECK(bit_equal(p, q));
    CHECK(bit_equal(r, s));
    CHECK(oracle::rel_diff(oracle::dense(p), a * b) <= 1e-13);
    CHECK(oracle::rel_diff(oracle::dense(r), a.transpose() * c) <= 1e-13);
}

TEST_CASE("apply_reflector: parallel equals serial and is an orthogonal reflection") {
    Threads t(4);
    oracle::Gen gen(3);
    const std::size_t m = 300, n = 80, offset = 5;
    DenseMatrix f = oracle::from_eigen(gen.gaussian(m, 1));
    f(offset, 0) = 1.0;
    double vv = 0.0;
    for (std::size_t i = offset; i < m; ++i) vv += f(i, 0) * f(i, 0);
    const double tau = 2.0 / vv;  // exact reflector for this v

    const Mat a0 = gen.gaussian(m, n);
    DenseMatrix a = oracle::from_eigen(a0), b = a;
    kernels::serial::apply_reflector(f, 0, offset, tau, a, 3, n);
    kernels::omp::apply_reflector(f, 0, offset, tau, b, 3, n);
    CHECK(bit_equal(a, b));

    oracle::Vec v = oracle::Vec::Zero(m);
    for (std::size_t i = offset; i < m; ++i) v(i) = f(i, 0);
    Mat want = a0;
    want.rightCols(n - 3) -= tau * v * (v.transpose() * a0.rightCols(n - 3));
    CHECK(oracle::rel_diff(oracle::dense(a), want) <= 1e-13);
    // untouched columns
    CHECK(oracle::dense(a).leftCols(3) == a0.leftCols(3));
}

TEST_CASE("kernels resize outputs and reject mismatched inner dimensions") {
    oracle::Gen gen(4);
    const auto s = gen.sparse(10, 8, 0.3);
    DenseMatrix out(1, 1);
    kernels::spmm(s.view(), DenseMatrix(8, 3), out);
    CHECK(out.rows() == 10);
    CHECK(out.cols() == 3);
    CHECK_THROWS_AS(kernels::spmm(s.view(), DenseMatrix(7, 3), out), DimensionError);
    CHECK_THROWS_AS(kernels::spmm_t(s.view(), DenseMatrix(8, 3), out), DimensionError);
    CHECK_THROWS_AS(kernels::gemm_nn(DenseMatrix(3, 4), DenseMatrix(5, 2), out), DimensionError);
    CHECK_THROWS_AS(kernels::gemm_tn(DenseMatrix(3, 4), DenseMatrix(5, 2), out), DimensionError);
}

TEST_CASE("dispatching kernels agree with the serial reference") {
    Threads t(3);
    oracle::Gen gen(5);
    const auto s = gen.sparse(400, 500, 0.05);
    const auto v = oracle::from_eigen(gen.gaussian(500, 16));
    DenseMatrix a, b;
    kernels::spmm(s.view(), v, a);
    kernels::serial::spmm(s.view(), v, b);
    CHECK(bit_equal(a, b));
    CHECK(kernels::max_threads() >= 1);
}

}  // TEST_SUITE
