#include "cosketch/bench/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "cosketch/bench/metrics.hpp"
#include "cosketch/bench/synthetic.hpp"
#include "cosketch/error.hpp"
#include "cosketch/mmio.hpp"
#include "cosketch/rng.hpp"

namespace cosketch::bench {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    T out{};
    if constexpr (std::is_unsigned_v<T>) {
        if (!value.empty() && value.front() == '-')
            throw ConfigError("config: '" + key + "' must be non-negative");
    }
    in >> out;
    if (in.fail() || !(in >> std::ws).eof())
        throw ConfigError("config: cannot parse value '" + value + "' for '" + key + "'");
    return out;
}

ScodMode parse_mode(const std::string& s) {
    if (s == "practical") return ScodMode::practical;
    if (s == "verified") return ScodMode::verified;
    throw ConfigError("config: mode must be practical or verified, got '" + s + "'");
}

std::string status_of(const std::exception& e) {
    std::string kind = "error";
    if (dynamic_cast<const NumericalError*>(&e)) kind = "numerical_error";
    else if (dynamic_cast<const DimensionError*>(&e)) kind = "dimension_error";
    else if (dynamic_cast<const ConfigError*>(&e)) kind = "config_error";
    else if (dynamic_cast<const DataError*>(&e)) kind = "data_error";
    return kind;
}

bool usable(const BenchReport& r) { return r.status == "ok" || r.status == "unconverged"; }

}  // namespace

void ExperimentConfig::validate() const {
    static const std::vector<std::string> datasets{"lowrank", "noisy", "random", "file"};
    if (std::find(datasets.begin(), datasets.end(), dataset) == datasets.end())
        throw ConfigError("config: unknown dataset '" + dataset + "'");
    if (dataset == "file" && path.empty()) throw ConfigError("config: dataset = file needs a path");
    if (dataset != "file") {
        if (m_x == 0 || m_y == 0 || n == 0) throw ConfigError("config: m_x, m_y, n must be positive");
        if (!(density > 0.0 && density <= 1.0)) throw ConfigError("config: density must lie in (0,1]");
    }
    if (!(noise_density >= 0.0 && noise_density <= 1.0))
        throw ConfigError("config: noise_density must lie in [0,1]");
    if (algorithms.empty()) throw ConfigError("config: no algorithms given");
    if (l_grid.empty()) throw ConfigError("config: empty l_grid");
    for (auto l : l_grid)
        if (l < 2 || l % 2 != 0) throw ConfigError("config: every l must be even and at least 2");
    if (seeds == 0) throw ConfigError("config: seeds must be positive");
    if (k == 0) throw ConfigError("config: k must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("config: delta must lie in (0,1)");
    if (!(power_constant > 0.0)) throw ConfigError("config: power_constant must be positive");
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (value.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty value for '" + key + "'");

        if (key == "dataset") cfg.dataset = value;
        else if (key == "path") cfg.path = value;
        else if (key == "split") cfg.split = parse_number<std::size_t>(key, value);
        else if (key == "m_x") cfg.m_x = parse_number<std::size_t>(key, value);
        else if (key == "m_y") cfg.m_y = parse_number<std::size_t>(key, value);
        else if (key == "n") cfg.n = parse_number<std::size_t>(key, value);
        else if (key == "density") cfg.density = parse_number<double>(key, value);
        else if (key == "profile_max") cfg.profile_max = parse_number<std::size_t>(key, value);
        else if (key == "noise_density") cfg.noise_density = parse_number<double>(key, value);
        else if (key == "algorithms") {
            cfg.algorithms.clear();
            for (const auto& a : split_list(value)) cfg.algorithms.push_back(parse_algorithm(a));
        } else if (key == "l_grid") {
            cfg.l_grid.clear();
            for (const auto& l : split_list(value)) cfg.l_grid.push_back(parse_number<std::size_t>(key, l));
        } else if (key == "seeds") cfg.seeds = parse_number<std::size_t>(key, value);
        else if (key == "k") cfg.k = parse_number<std::size_t>(key, value);
        else if (key == "delta") cfg.delta = parse_number<double>(key, value);
        else if (key == "mode") cfg.mode = parse_mode(value);
        else if (key == "master_seed") cfg.master_seed = parse_number<std::uint64_t>(key, value);
        else if (key == "power_constant") cfg.power_constant = parse_number<double>(key, value);
        else
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

std::uint64_t cell_seed(std::uint64_t master, Algorithm a, std::size_t l, std::size_t trial) {
    return hash_combine(hash_combine(hash_combine(master, static_cast<std::uint64_t>(a)), l), trial);
}

std::pair<SparseMatrix, SparseMatrix> make_dataset(const ExperimentConfig& cfg) {
    if (cfg.dataset == "file") return load_and_split(cfg.path, cfg.split);
    if (cfg.dataset == "random") {
        Rng base(cfg.master_seed);
        Rng rx = base.fork(1), ry = base.fork(2);
        return {sparse_uniform(cfg.m_x, cfg.n, cfg.density, rx),
                sparse_uniform(cfg.m_y, cfg.n, cfg.density, ry)};
    }
    SyntheticSpec spec;
    spec.m_x = cfg.m_x;
    spec.m_y = cfg.m_y;
    spec.n = cfg.n;
    spec.density = cfg.density;
    spec.profile = linear_profile(cfg.profile_max);
    spec.noise_density = cfg.dataset == "noisy" ? cfg.noise_density : 0.0;
    spec.seed = cfg.master_seed;
    return generate_lowrank(spec);
}

std::vector<BenchReport> run_grid(const ExperimentConfig& cfg, const SparseMatrix& x,
                                  const SparseMatrix& y) {
    struct Cell {
        Algorithm algo;
        std::size_t l;
        std::size_t trial;
    };
    std::vector<Cell> cells;
    for (auto a : cfg.algorithms)
        for (auto l : cfg.l_grid)
            for (std::size_t t = 0; t < cfg.seeds; ++t) cells.push_back({a, l, t});

    std::vector<BenchReport> rows(cells.size());
    const RunOptions opts{cfg.mode, cfg.delta, cfg.power_constant};
    const auto count = static_cast<std::ptrdiff_t>(cells.size());

#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t c = 0; c < count; ++c) {
        const auto& cell = cells[static_cast<std::size_t>(c)];
        BenchReport& r = rows[static_cast<std::size_t>(c)];
        r.algorithm = to_string(cell.algo);
        r.l = cell.l;
        r.seed = cell.trial;
        try {
            const auto run = run_sketch(cell.algo, x, y, cell.l, opts,
                                        cell_seed(cfg.master_seed, cell.algo, cell.l, cell.trial));
            r.wall_time_s = run.wall_time_s;
            r.peak_aux_scalars = run.peak_aux_scalars;
            r.triggers = run.triggers;
            MetricsContext ctx;
            ctx.k = std::max<std::size_t>(1, std::min(cfg.k, cell.l / 2));
            const auto ae = approx_error(x, y, run.sketch, ctx);
            const auto pe = projection_error(x, y, run.sketch, ctx);
            r.approx_error = ae.value;
            r.projection_error = pe.value;
            r.status = ae.converged && pe.converged ? "ok" : "unconverged";
        } catch (const std::exception& e) {
            r.status = status_of(e);
        }
    }
    return rows;
}

std::vector<Aggregate> aggregate(const std::vector<BenchReport>& rows) {
    std::vector<Aggregate> out;
    for (const auto& r : rows) {
        const bool seen = std::any_of(out.begin(), out.end(), [&](const Aggregate& a) {
            return a.algorithm == r.algorithm && a.l == r.l;
        });
        if (seen) continue;
        Aggregate a;
        a.algorithm = r.algorithm;
        a.l = r.l;
        std::vector<const BenchReport*> group;
        for (const auto& s : rows)
            if (s.algorithm == r.algorithm && s.l == r.l && usable(s)) group.push_back(&s);

        auto stats = [&](auto field, double& mean, double& sd) {
            mean = sd = 0.0;
            if (group.empty()) return;
            // deviations are taken from the first sample, so a constant
            // group has exactly zero spread
            const double shift = static_cast<double>(field(*group.front()));
            double sum = 0.0, sum_sq = 0.0;
            for (const auto* g : group) {
                const double d = static_cast<double>(field(*g)) - shift;
                sum += d;
                sum_sq += d * d;
            }
            const auto count = static_cast<double>(group.size());
            mean = shift + sum / count;
            if (group.size() < 2) return;
            sd = std::sqrt(std::max(0.0, (sum_sq - sum * sum / count) / (count - 1.0)));
        };
        double m = 0, s = 0;
        stats([](const BenchReport& b) { return b.approx_error; }, a.mean.approx_error, a.stddev.approx_error);
        stats([](const BenchReport& b) { return b.projection_error; }, a.mean.projection_error,
              a.stddev.projection_error);
        stats([](const BenchReport& b) { return b.wall_time_s; }, a.mean.wall_time_s, a.stddev.wall_time_s);
        stats([](const BenchReport& b) { return b.peak_aux_scalars; }, m, s);
        a.mean.peak_aux_scalars = std::llround(m);
        a.stddev.peak_aux_scalars = std::llround(s);
        stats([](const BenchReport& b) { return b.triggers; }, m, s);
        a.mean.triggers = static_cast<std::size_t>(std::llround(m));
        a.stddev.triggers = static_cast<std::size_t>(std::llround(s));
        a.mean.algorithm = a.stddev.algorithm = a.algorithm;
        a.mean.l = a.stddev.l = a.l;
        a.mean.status = a.stddev.status = group.empty() ? "empty" : "aggregate";
        out.push_back(std::move(a));
    }
    return out;
}

namespace {

void write_row(std::ostream& out, const BenchReport& r, const std::string& seed) {
    out << r.algorithm << ',' << r.l << ',' << seed << ',' << r.approx_error << ','
        << r.projection_error << ',' << r.wall_time_s << ',' << r.peak_aux_scalars << ','
        << r.triggers << ',' << r.status << '\n';
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<BenchReport>& rows) {
    const auto flags = out.flags();
    const auto prec = out.precision();
    out << std::setprecision(10);
    out << kCsvHeader << '\n';
    for (const auto& r : rows) write_row(out, r, std::to_string(r.seed));
    for (const auto& a : aggregate(rows)) {
        write_row(out, a.mean, "mean");
        write_row(out, a.stddev, "std");
    }
    out.flush();
    out.flags(flags);
    out.precision(prec);
}

std::vector<BenchReport> run_experiment(const ExperimentConfig& cfg, std::ostream& csv) {
    cfg.validate();
    const auto [x, y] = make_dataset(cfg);
    auto rows = run_grid(cfg, x, y);
    write_csv(csv, rows);
    return rows;
}

}  // namespace cosketch::bench
