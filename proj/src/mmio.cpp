#include <algorithm>
#include <cctype>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include "grf/sparse.hpp"

namespace grf::sparse {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

void write_matrix_market(const SparseMatrix& a, std::ostream& os) {
    os << "%%MatrixMarket matrix coordinate real symmetric\n";
    os << a.order() << ' ' << a.order() << ' ' << a.nnz() << '\n';
    char buf[64];
    for (const Triplet& t : a.to_triplets()) {
        std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", t.row + 1, t.col + 1, t.value);
        os << buf;
    }
}

SparseMatrix read_matrix_market(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("matrix market: empty input");
    std::istringstream header(line);
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || lower(object) != "matrix" || lower(format) != "coordinate" ||
        lower(field) != "real" || lower(symmetry) != "symmetric")
        throw ConfigError("matrix market: expected 'matrix coordinate real symmetric' header");

    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '%') continue;
        break;
    }
    std::istringstream dims(line);
    int rows = 0, cols = 0;
    long nnz = -1;
    if (!(dims >> rows >> cols >> nnz) || rows <= 0 || rows != cols || nnz < 0)
        throw ConfigError("matrix market: bad size line");

    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(nnz));
    long seen = 0;
    while (seen < nnz && std::getline(is, line)) {
        if (line.empty() || line[0] == '%') continue;
        std::istringstream ls(line);
        int i = 0, j = 0;
        double v = 0.0;
        if (!(ls >> i >> j >> v)) throw ConfigError("matrix market: bad entry line");
        if (i < 1 || i > rows || j < 1 || j > cols)
            throw ConfigError("matrix market: index out of range");
        triplets.push_back(Triplet{i - 1, j - 1, v});
        ++seen;
    }
    if (seen != nnz) throw ConfigError("matrix market: truncated entry list");
    return SparseMatrix::from_triplets(rows, triplets);
}

void write_matrix_market_file(const SparseMatrix& a, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open for writing: " + path);
    write_matrix_market(a, os);
}

SparseMatrix read_matrix_market_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open for reading: " + path);
    return read_matrix_market(is);
}

}  // namespace grf::sparse
