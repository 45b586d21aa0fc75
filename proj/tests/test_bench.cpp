#include <doctest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "cosketch/baselines.hpp"
#include "cosketch/bench/experiment.hpp"
#include "cosketch/bench/metrics.hpp"
#include "cosketch/bench/runner.hpp"
#include "cosketch/bench/synthetic.hpp"
#include "cosketch/error.hpp"
#include "cosketch/mmio.hpp"
#include "cosketch/scod.hpp"
#include "oracle.hpp"

#ifndef COSKETCH_TEST_DATA_DIR
#define COSKETCH_TEST_DATA_DIR "."
#endif

using namespace cosketch;
using namespace cosketch::bench;
using oracle::Mat;
using oracle::Vec;

namespace {

Mat product(const SparseMatrix& x, const SparseMatrix& y) {
    return oracle::dense(x) * oracle::dense(y).transpose();
}

double pearson(const Vec& a, const Vec& b) {
    const Vec da = a.array() - a.mean(), db = b.array() - b.mean();
    return da.dot(db) / (da.norm() * db.norm());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("sparse_lowrank plants a rank-one profile") {
    Rng rng(1);
    const std::vector<double> r{1.0};
    const auto a = sparse_lowrank(30, 40, 0.5, r, rng);
    const Vec s = oracle::singular_values(oracle::dense(a));
    CHECK(std::abs(s(0) - 1.0) <= 1e-6);
    CHECK(s(1) <= 1e-10);
}

TEST_CASE("generated spectra follow the requested profile") {
    SyntheticSpec spec;
    spec.m_x = 200;
    spec.m_y = 150;
    spec.n = 1000;
    spec.density = 0.05;
    spec.profile = linear_profile(20);
    spec.seed = 3;
    const auto [x, y] = generate_lowrank(spec);
    const Vec want = Eigen::Map<const Vec>(spec.profile.data(), 20);
    for (const auto* a : {&x, &y}) {
        const Vec s = oracle::singular_values(oracle::dense(*a)).head(20);
        CHECK(pearson(s, want) >= 0.95);
        CHECK((s - want).cwiseAbs().maxCoeff() <= 1e-9 * want(0));
    }
}

TEST_CASE("generated density is within 20% of the target") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SyntheticSpec spec;
        spec.m_x = 200;
        spec.m_y = 100;
        spec.n = 1000;
        spec.density = 0.02;
        spec.profile = linear_profile(20);
        spec.seed = seed;
        const auto [x, y] = generate_lowrank(spec);
        const double dx = static_cast<double>(x.nnz()) / (200.0 * 1000.0);
        const double dy = static_cast<double>(y.nnz()) / (100.0 * 1000.0);
        CHECK(std::abs(dx - 0.02) <= 0.2 * 0.02);
        CHECK(std::abs(dy - 0.02) <= 0.2 * 0.02);
        x.validate();
        y.validate();
    }
}

TEST_CASE("noise is added on top of the low-rank part") {
    auto spec = preset("noisy", 4);
    const auto [x, y] = generate_lowrank(spec);
    const double d = static_cast<double>(x.nnz()) / static_cast<double>(spec.m_x * spec.n);
    CHECK(d > 1.5 * spec.density);
    CHECK(d < 2.0 * spec.density + 0.01);
    const auto clean = generate_lowrank(preset("lowrank", 4));
    CHECK(clean.first.nnz() < x.nnz());
}

TEST_CASE("sparse_uniform density and value range") {
    Rng rng(5);
    const auto a = sparse_uniform(300, 400, 0.05, rng);
    a.validate();
    CHECK(static_cast<double>(a.nnz()) / 120000.0 == doctest::Approx(0.05).epsilon(0.05));
    for (double v : a.values()) CHECK((v > 0.0 && v < 1.0));
    Rng rng2(5);
    CHECK(oracle::dense(sparse_uniform(300, 400, 0.05, rng2)) == oracle::dense(a));
}

TEST_CASE("synthetic spec validation") {
    SyntheticSpec spec;
    spec.m_x = 10;
    spec.m_y = 10;
    spec.n = 10;
    spec.density = 0.01;
    spec.profile = linear_profile(5);
    CHECK_THROWS_AS(spec.validate(), DataError);  // 1 nonzero cannot carry rank 5
    spec.density = 0.5;
    spec.validate();
    spec.profile = {1.0, 2.0};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.profile = linear_profile(11);
    CHECK_THROWS_AS(spec.validate(), DataError);
    spec.profile = linear_profile(3);
    spec.density = 0.0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    CHECK_THROWS_AS(preset("dense"), ConfigError);
}

TEST_CASE("approx_error of an exact sketch is zero") {
    oracle::Gen gen(6);
    const auto x = gen.sparse(20, 6, 0.4), y = gen.sparse(25, 6, 0.4);
    const auto s = cod_sketch(x, y, 8);
    const auto e = approx_error(x, y, s);
    CHECK(e.value <= 1e-8 * product(x, y).norm());
}

TEST_CASE("approx_error of a zero sketch is the product norm") {
    oracle::Gen gen(7);
    const auto x = gen.sparse(30, 200, 0.1), y = gen.sparse(40, 200, 0.1);
    const auto e = approx_error(x, y, SketchPair(30, 40, 4));
    const double want = oracle::spectral(product(x, y));
    CHECK(e.converged);
    CHECK(std::abs(e.value - want) <= 1e-6 * want);
    CHECK(std::abs(product_norm(x, y).value - want) <= 1e-6 * want);
}

TEST_CASE("approx_error agrees with dense materialization") {
    oracle::Gen gen(8);
    for (int trial = 0; trial < 5; ++trial) {
        const auto x = gen.sparse(100, 500, 0.05), y = gen.sparse(120, 500, 0.05);
        const auto s = trial % 2 == 0 ? cod_sketch(x, y, 8) : fd_amm_sketch(x, y, 8);
        const double want = oracle::spectral(product(x, y) - oracle::product(s));
        const auto e = approx_error(x, y, s);
        CHECK(std::abs(e.value - want) <= 1e-5 * want);
    }
}

TEST_CASE("projection_error with an exact sketch is the rank-k residual") {
    oracle::Gen gen(9);
    const auto x = gen.sparse(20, 6, 0.5), y = gen.sparse(25, 6, 0.5);
    const auto s = cod_sketch(x, y, 8);
    MetricsContext ctx;
    ctx.k = 4;
    const auto e = projection_error(x, y, s, ctx);
    const double want = oracle::sigma_at(product(x, y), 4);
    CHECK(e.value <= want + 1e-8);
    CHECK(std::abs(e.value - want) <= 1e-6 * oracle::spectral(product(x, y)));
}

TEST_CASE("projection_error of a zero sketch is the product norm") {
    oracle::Gen gen(10);
    const auto x = gen.sparse(30, 100, 0.1), y = gen.sparse(20, 100, 0.1);
    MetricsContext ctx;
    ctx.k = 3;
    const double want = oracle::spectral(product(x, y));
    CHECK(std::abs(projection_error(x, y, SketchPair(30, 20, 6), ctx).value - want) <= 1e-6 * want);
}

TEST_CASE("projection_error matches the dense projector formula") {
    oracle::Gen gen(11);
    const auto x = gen.sparse(40, 400, 0.05), y = gen.sparse(50, 400, 0.05);
    const auto s = fd_amm_sketch(x, y, 12);
    MetricsContext ctx;
    ctx.k = 5;
    Eigen::JacobiSVD<Mat> svd(oracle::product(s), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Mat u = svd.matrixU().leftCols(5), v = svd.matrixV().leftCols(5);
    const Mat a = product(x, y);
    const double want = oracle::spectral(a - u * u.transpose() * a * v * v.transpose());
    CHECK(std::abs(projection_error(x, y, s, ctx).value - want) <= 1e-5 * want);
}

TEST_CASE("projection error bound for a sufficiently large sketch") {
    // X = Y = D Q^T with orthonormal Q and D = diag(2, 1.5, 1): the product
    // has singular values (4, 2.25, 1), and with k = 1, eps = 0.9 the
    // required sketch size is 64/(5 eps) * ||X||_F^2 / sigma_2 < 46.
    oracle::Gen gen(12);
    const std::size_t m = 96, n = 800, k = 1, l = 46;
    const double eps = 0.9;
    const Mat q = Eigen::HouseholderQR<Mat>(gen.gaussian(n, 3)).householderQ() * Mat::Identity(n, 3);
    Mat xd = Mat::Zero(m, n);
    const double d[3] = {2.0, 1.5, 1.0};
    for (int i = 0; i < 3; ++i) xd.row(7 * i + 1) = d[i] * q.col(i).transpose();
    const auto x = SparseMatrix::from_dense(oracle::from_eigen(xd));
    const Mat a = xd * xd.transpose();
    const double sigma_next = oracle::sigma_at(a, k);
    const double needed = 64.0 / (5.0 * eps) * x.frobenius_norm_sq() / sigma_next;
    REQUIRE(static_cast<double>(l) >= needed);

    int ok = 0;
    for (int seed = 0; seed < 50; ++seed) {
        ScodOptions opts;
        opts.l = l;
        opts.mode = ScodMode::verified;
        const auto s = scod_sketch(x, x, opts, seed);
        MetricsContext ctx;
        ctx.k = k;
        if (projection_error(x, x, s, ctx).value <= (1.0 + eps) * sigma_next) ++ok;
    }
    CHECK(ok >= 45);
}

TEST_CASE("stable_rank") {
    std::vector<Triplet> eye;
    for (std::size_t i = 0; i < 7; ++i) eye.push_back({i, i, 1.0});
    CHECK(stable_rank(SparseMatrix::from_triplets(7, 7, eye)) == doctest::Approx(7.0).epsilon(1e-9));

    std::vector<Triplet> r1;
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 4; ++j) r1.push_back({i, j, (1.0 + i) * (2.0 - 0.3 * j)});
    CHECK(std::abs(stable_rank(SparseMatrix::from_triplets(5, 4, r1)) - 1.0) <= 1e-5);

    oracle::Gen gen(13);
    const auto a = gen.sparse(60, 80, 0.1);
    const double s = oracle::spectral(oracle::dense(a));
    CHECK(stable_rank(a) == doctest::Approx(a.frobenius_norm_sq() / (s * s)).epsilon(1e-4));

    CHECK_THROWS_AS(stable_rank(SparseMatrix(4, 4)), NumericalError);
}

TEST_CASE("algorithm names round-trip") {
    for (auto a : {Algorithm::scod, Algorithm::cod, Algorithm::fd, Algorithm::cs, Algorithm::rp})
        CHECK(parse_algorithm(to_string(a)) == a);
    CHECK_THROWS_AS(parse_algorithm("svd"), ConfigError);
}

TEST_CASE("run_sketch times only the sketching phase") {
    oracle::Gen gen(14);
    const auto x = gen.sparse(40, 1000, 0.05), y = gen.sparse(50, 1000, 0.05);
    for (auto a : {Algorithm::scod, Algorithm::cod, Algorithm::fd, Algorithm::cs, Algorithm::rp}) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto run = run_sketch(a, x, y, 8, {}, 3);
        const double outer = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        CHECK(run.sketch.width() == 8);
        CHECK(run.sketch.b_x.rows() == 40);
        CHECK(run.wall_time_s >= 0.0);
        CHECK(run.wall_time_s <= outer);
        CHECK(run.peak_aux_scalars > 0);
        if (a == Algorithm::scod) {
            CHECK(run.triggers == run.scod.triggers);
            CHECK(run.triggers > 0);
            CHECK(run.scod.si_seconds + run.scod.shrink_seconds <= run.wall_time_s);
        }
        if (a == Algorithm::cod || a == Algorithm::fd) CHECK(run.triggers > 0);
        if (a == Algorithm::cs || a == Algorithm::rp) CHECK(run.triggers == 0);
    }
}

TEST_CASE("config parsing") {
    std::istringstream in(R"(# desk-scale run
dataset = noisy
m_x = 30
m_y = 40   # trailing comment
n = 500
density = 0.05
profile_max = 10
noise_density = 0.01
algorithms = scod, cod
l_grid = 4,8
seeds = 3
k = 2
delta = 0.2
mode = verified
master_seed = 99
)");
    const auto cfg = parse_config(in);
    CHECK(cfg.dataset == "noisy");
    CHECK(cfg.m_x == 30);
    CHECK(cfg.m_y == 40);
    CHECK(cfg.n == 500);
    CHECK(cfg.density == 0.05);
    CHECK(cfg.profile_max == 10);
    CHECK(cfg.noise_density == 0.01);
    CHECK(cfg.algorithms == std::vector<Algorithm>{Algorithm::scod, Algorithm::cod});
    CHECK(cfg.l_grid == std::vector<std::size_t>{4, 8});
    CHECK(cfg.seeds == 3);
    CHECK(cfg.k == 2);
    CHECK(cfg.delta == 0.2);
    CHECK(cfg.mode == ScodMode::verified);
    CHECK(cfg.master_seed == 99);
}

TEST_CASE("config errors") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return parse_config(in);
    };
    CHECK_THROWS_AS(parse("colour = blue\n"), ConfigError);
    CHECK_THROWS_AS(parse("m_x = many\n"), ConfigError);
    CHECK_THROWS_AS(parse("m_x = -3\n"), ConfigError);
    CHECK_THROWS_AS(parse("m_x\n"), ConfigError);
    CHECK_THROWS_AS(parse("l_grid = 4, 7\n"), ConfigError);
    CHECK_THROWS_AS(parse("mode = fast\n"), ConfigError);
    CHECK_THROWS_AS(parse("delta = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse("algorithms = cod, svd\n"), ConfigError);
    CHECK_THROWS_AS(parse("dataset = file\n"), ConfigError);
    CHECK_THROWS_AS(parse("seeds = 0\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.txt"), ConfigError);
    CHECK_NOTHROW(parse("\n# only defaults\n"));
}

TEST_CASE("cell seeds are distinct across the grid") {
    std::set<std::uint64_t> seen;
    for (auto a : {Algorithm::scod, Algorithm::cod, Algorithm::fd, Algorithm::cs, Algorithm::rp})
        for (std::size_t l : {8, 16, 32, 64})
            for (std::size_t t = 0; t < 50; ++t) seen.insert(cell_seed(1, a, l, t));
    CHECK(seen.size() == 5 * 4 * 50);
    CHECK(cell_seed(1, Algorithm::cod, 8, 0) != cell_seed(2, Algorithm::cod, 8, 0));
}

TEST_CASE("csv output matches the golden file") {
    std::vector<BenchReport> rows;
    BenchReport r;
    r.algorithm = "cod";
    r.l = 8;
    r.seed = 0;
    r.approx_error = 1.5;
    r.projection_error = 0.25;
    r.wall_time_s = 0.125;
    r.peak_aux_scalars = 1024;
    r.triggers = 12;
    rows.push_back(r);
    r.seed = 1;
    r.approx_error = 2.5;
    r.projection_error = 0.75;
    r.wall_time_s = 0.375;
    r.triggers = 14;
    rows.push_back(r);
    r.algorithm = "scod";
    r.seed = 0;
    r.approx_error = 0.0;
    r.projection_error = 0.0;
    r.wall_time_s = 0.0;
    r.peak_aux_scalars = 0;
    r.triggers = 0;
    r.status = "numerical_error";
    rows.push_back(r);

    std::ostringstream out;
    write_csv(out, rows);
    CHECK(out.str() == read_file(std::string(COSKETCH_TEST_DATA_DIR) + "/golden.csv"));
    CHECK(out.str().rfind(std::string(kCsvHeader) + "\n", 0) == 0);
}

TEST_CASE("run_grid on a small configuration") {
    ExperimentConfig cfg;
    cfg.dataset = "lowrank";
    cfg.m_x = 30;
    cfg.m_y = 40;
    cfg.n = 400;
    cfg.density = 0.05;
    cfg.profile_max = 10;
    cfg.l_grid = {4, 8};
    cfg.seeds = 3;
    cfg.k = 2;
    cfg.validate();
    const auto [x, y] = make_dataset(cfg);
    CHECK(x.rows() == 30);
    CHECK(y.cols() == 400);
    const auto rows = run_grid(cfg, x, y);
    REQUIRE(rows.size() == 5 * 2 * 3);
    CHECK(rows[0].algorithm == "scod");
    CHECK(rows[0].l == 4);
    CHECK(rows[2].seed == 2);
    CHECK(rows[3].l == 8);
    for (const auto& r : rows) {
        CHECK(r.status == "ok");
        CHECK(r.approx_error >= 0.0);
        CHECK(r.projection_error >= 0.0);
        CHECK(r.wall_time_s >= 0.0);
    }
    for (const auto& a : aggregate(rows)) {
        if (a.algorithm == "cod" || a.algorithm == "fd") {
            CHECK(a.stddev.approx_error == 0.0);
            CHECK(a.stddev.projection_error == 0.0);
        }
        CHECK(a.mean.status == "aggregate");
    }
    std::ostringstream csv;
    write_csv(csv, rows);
    std::size_t lines = 0;
    for (char c : csv.str()) lines += c == '\n';
    CHECK(lines == 1 + rows.size() + 2 * 5 * 2);
}

TEST_CASE("run_grid records per-cell failures in the status column") {
    ExperimentConfig cfg;
    cfg.dataset = "random";
    cfg.m_x = 10;
    cfg.m_y = 12;
    cfg.n = 100;
    cfg.density = 0.2;
    cfg.algorithms = {Algorithm::scod, Algorithm::cod};
    cfg.l_grid = {6};  // 2l > m_x is invalid for SCOD only
    cfg.seeds = 2;
    const auto [x, y] = make_dataset(cfg);
    const auto rows = run_grid(cfg, x, y);
    CHECK(rows[0].status == "dimension_error");
    CHECK(rows[2].status == "ok");
    const auto agg = aggregate(rows);
    CHECK(agg[0].mean.status == "empty");
}

TEST_CASE("file datasets are loaded and split") {
    oracle::Gen gen(15);
    const auto m = gen.sparse(50, 30, 0.2);
    const auto path = (std::filesystem::temp_directory_path() / "cosketch_dataset.mtx").string();
    write_matrix_market(path, m);
    ExperimentConfig cfg;
    cfg.dataset = "file";
    cfg.path = path;
    cfg.split = 12;
    const auto [x, y] = make_dataset(cfg);
    CHECK(x.rows() == 12);
    CHECK(y.rows() == 18);
    CHECK(x.cols() == 50);
    std::filesystem::remove(path);
}

TEST_CASE("run_experiment writes a csv") {
    ExperimentConfig cfg;
    cfg.m_x = 20;
    cfg.m_y = 24;
    cfg.n = 200;
    cfg.density = 0.1;
    cfg.profile_max = 5;
    cfg.algorithms = {Algorithm::cod, Algorithm::rp};
    cfg.l_grid = {4};
    cfg.seeds = 2;
    std::ostringstream out;
    const auto rows = run_experiment(cfg, out);
    CHECK(rows.size() == 4);
    CHECK(out.str().find("rp,4,mean,") != std::string::npos);
    CHECK(out.str().find("cod,4,std,") != std::string::npos);
}

}  // TEST_SUITE
