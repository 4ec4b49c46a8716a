#include "grf/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "grf/gmrf.hpp"

namespace grf::sparse {

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return (v.size() % 2 == 1) ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double now_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace

BenchResult benchmark_factorization(const std::vector<int>& sizes, BenchBackend backend,
                                    int repetitions) {
    if (sizes.empty()) throw ConfigError("benchmark_factorization: empty size list");
    if (repetitions < 1) throw ConfigError("benchmark_factorization: repetitions must be >= 1");

    BenchResult result;
    for (int n : sizes) {
        const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
        if (side * side != n || side < 2)
            throw ConfigError("benchmark_factorization: size " + std::to_string(n) +
                              " is not the square of a grid side");
        const gmrf::Graph g = gmrf::grid_graph(side, 2);
        const SparseMatrix q = gmrf::build_precision(g, gmrf::PrecisionModel(1.0, 1, 1.0));

        BenchRow row;
        row.n = n;
        std::vector<double> times;
        times.reserve(repetitions);
        if (backend == BenchBackend::sparse) {
            row.backend = "sparse";
            const Ordering ord = reorder(OrderMethod::amd, q);
            CholFactor warm = sparse_cholesky(q, ord);  // warm-up, discarded
            row.nnz = warm.nnz_l;
            for (int r = 0; r < repetitions; ++r) {
                const double t0 = now_seconds();
                const CholFactor f = sparse_cholesky(q, ord);
                times.push_back(now_seconds() - t0);
                if (f.nnz_l != row.nnz)
                    throw AccuracyError("benchmark_factorization: nondeterministic fill");
            }
        } else {
            row.backend = "dense";
            const DenseMatrix d = q.to_dense();
            row.nnz = static_cast<long>(n) * (n + 1) / 2;
            dense_cholesky(d);  // warm-up, discarded
            for (int r = 0; r < repetitions; ++r) {
                const double t0 = now_seconds();
                dense_cholesky(d);
                times.push_back(now_seconds() - t0);
            }
        }
        row.seconds = median(times);
        result.rows.push_back(row);
    }

    if (result.rows.size() >= 2) {
        // Least-squares slope of log(seconds) against log(n).
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        const double m = static_cast<double>(result.rows.size());
        for (const BenchRow& r : result.rows) {
            const double x = std::log(static_cast<double>(r.n));
            const double y = std::log(std::max(r.seconds, 1e-9));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        result.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    }
    return result;
}

}  // namespace grf::sparse
