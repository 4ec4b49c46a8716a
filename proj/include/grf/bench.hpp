#ifndef GRF_BENCH_HPP
#define GRF_BENCH_HPP

#include <optional>
#include <string>
#include <vector>

#include "grf/sparse.hpp"

namespace grf::sparse {

enum class BenchBackend { sparse, dense };

struct BenchRow {
    int n;
    std::string backend;
    double seconds;  // median over the repetitions
    long nnz;        // nnz(L) for sparse, n(n+1)/2 for dense
};

struct BenchResult {
    std::vector<BenchRow> rows;
    std::optional<double> slope;  // log-log fit; absent for a single size
};

// Times Cholesky factorizations of the 2D-grid SPDE precision (kappa = 1,
// m = 1) at the given matrix orders, which must be perfect squares of the
// grid side.  Median of `repetitions` runs after one discarded warm-up.
BenchResult benchmark_factorization(const std::vector<int>& sizes, BenchBackend backend,
                                    int repetitions = 5);

}  // namespace grf::sparse

#endif  // GRF_BENCH_HPP
