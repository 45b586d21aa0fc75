#include "cosketch/mmio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "cosketch/error.hpp"

namespace cosketch {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
    throw DataError("matrix market line " + std::to_string(line) + ": " + msg);
}

}  // namespace

SparseMatrix read_matrix_market(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw DataError("matrix market: empty input");
    ++lineno;
    std::istringstream header(line);
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket") fail(lineno, "missing %%MatrixMarket banner");
    object = lower(object), format = lower(format), field = lower(field), symmetry = lower(symmetry);
    if (object != "matrix" || format != "coordinate") fail(lineno, "only coordinate matrices are supported");
    const bool pattern = field == "pattern";
    if (!pattern && field != "real" && field != "integer") fail(lineno, "unsupported field '" + field + "'");
    const bool symmetric = symmetry == "symmetric";
    if (!symmetric && symmetry != "general") fail(lineno, "unsupported symmetry '" + symmetry + "'");

    // skip comments and blank lines
    bool have_size = false;
    while (!have_size && std::getline(in, line)) {
        ++lineno;
        const auto p = line.find_first_not_of(" \t\r");
        have_size = p != std::string::npos && line[p] != '%';
    }
    if (!have_size) fail(lineno, "missing size line");
    std::istringstream size_line(line);
    long long rows = -1, cols = -1, entries = -1;
    if (!(size_line >> rows >> cols >> entries) || rows < 0 || cols < 0 || entries < 0)
        fail(lineno, "malformed size line");

    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(entries) * (symmetric ? 2 : 1));
    long long seen = 0;
    while (seen < entries && std::getline(in, line)) {
        ++lineno;
        const auto p = line.find_first_not_of(" \t\r");
        if (p == std::string::npos || line[p] == '%') continue;
        std::istringstream es(line);
        long long i = 0, j = 0;
        double v = 1.0;
        if (!(es >> i >> j) || (!pattern && !(es >> v))) fail(lineno, "malformed entry");
        if (i < 1 || i > rows || j < 1 || j > cols) fail(lineno, "index out of range");
        if (!std::isfinite(v)) fail(lineno, "non-finite value");
        triplets.push_back({static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1), v});
        if (symmetric && i != j)
            triplets.push_back({static_cast<std::size_t>(j - 1), static_cast<std::size_t>(i - 1), v});
        ++seen;
    }
    if (seen < entries) fail(lineno, "expected " + std::to_string(entries) + " entries, found " + std::to_string(seen));
    return SparseMatrix::from_triplets(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols),
                                       std::move(triplets));
}

SparseMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const SparseMatrix& a) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
    out << std::setprecision(17);
    for (std::size_t j = 0; j < a.cols(); ++j) {
        const auto c = a.column(j);
        for (std::size_t k = 0; k < c.nnz(); ++k)
            out << c.rows[k] + 1 << ' ' << j + 1 << ' ' << c.values[k] << '\n';
    }
}

void write_matrix_market(const std::string& path, const SparseMatrix& a) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    write_matrix_market(out, a);
    if (!out) throw DataError("write failed for '" + path + "'");
}

std::pair<SparseMatrix, SparseMatrix> split_columns(const SparseMatrix& m,
                                                    std::optional<std::size_t> split) {
    if (m.rows() == 0 || m.cols() < 2) throw DataError("split: matrix too small to split");
    const auto at = split.value_or(m.cols() / 2);
    if (at == 0 || at >= m.cols()) throw DataError("split: index must leave both halves non-empty");
    return {m.col_range(0, at).transposed(), m.col_range(at, m.cols()).transposed()};
}

std::pair<SparseMatrix, SparseMatrix> load_and_split(const std::string& path,
                                                     std::optional<std::size_t> split) {
    return split_columns(read_matrix_market(path), split);
}

}  // namespace cosketch
