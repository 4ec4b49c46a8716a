#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "grf/bench.hpp"
#include "grf/gmrf.hpp"
#include "grf/sparse.hpp"
#include "test_support.hpp"

using namespace grf::sparse;
using grf::DenseMatrix;
using grf::rng::CounterRng;

namespace {

// Max |P A P^T - L L^T| over all entries, via dense reconstruction.
double reconstruction_error(const SparseMatrix& a, const CholFactor& f) {
    const int n = a.order();
    const DenseMatrix ad = a.to_dense();
    const std::vector<int>& perm = f.ordering.perm;
    DenseMatrix ll(n, n);
    const auto& lp = f.l.col_ptr();
    const auto& li = f.l.row_ind();
    const auto& lx = f.l.values();
    for (int j = 0; j < n; ++j)
        for (int p = lp[j]; p < lp[j + 1]; ++p)
            for (int q = lp[j]; q < lp[j + 1]; ++q) ll(li[p], li[q]) += lx[p] * lx[q];
    double err = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            err = std::max(err, std::fabs(ll(i, j) - ad(perm[i], perm[j])));
    return err;
}

SparseMatrix random_spd_sparse(int n, std::uint64_t seed) {
    const DenseMatrix a = test_support::random_spd(n, seed);
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) t.push_back({i, j, a(i, j)});
    return SparseMatrix::from_triplets(n, t);
}

long bandwidth_after(const SparseMatrix& a, const Ordering& ord) {
    std::vector<int> iperm(a.order());
    for (int k = 0; k < a.order(); ++k) iperm[ord.perm[k]] = k;
    long bw = 0;
    for (const Triplet& t : a.to_triplets())
        bw = std::max(bw, static_cast<long>(std::abs(iperm[t.row] - iperm[t.col])));
    return bw;
}

}  // namespace

TEST_CASE("from_triplets canonical form") {
    const SparseMatrix zero = SparseMatrix::from_triplets(3, {});
    CHECK(zero.order() == 3);
    CHECK(zero.nnz() == 0);

    const SparseMatrix m =
        SparseMatrix::from_triplets(2, {{0, 0, 2.0}, {1, 0, 1.0}, {1, 1, 2.0}});
    CHECK(m.at(0, 0) == 2.0);
    CHECK(m.at(0, 1) == 1.0);
    CHECK(m.at(1, 0) == 1.0);
    CHECK(m.at(1, 1) == 2.0);

    // Duplicates sum; upper-triangle input mirrors into the lower triangle.
    const SparseMatrix dup = SparseMatrix::from_triplets(2, {{0, 0, 1.0}, {0, 0, 1.0}});
    CHECK(dup.nnz() == 1);
    CHECK(dup.at(0, 0) == 2.0);
    const SparseMatrix mirror = SparseMatrix::from_triplets(3, {{0, 2, 5.0}, {2, 0, 1.0}});
    CHECK(mirror.nnz() == 1);
    CHECK(mirror.at(2, 0) == 6.0);

    // Exact zeros are dropped; round-trip through triplets is idempotent.
    const SparseMatrix z = SparseMatrix::from_triplets(2, {{1, 0, 1.0}, {0, 1, -1.0}});
    CHECK(z.nnz() == 0);
    const SparseMatrix back = SparseMatrix::from_triplets(2, m.to_triplets());
    CHECK(back.to_triplets().size() == m.to_triplets().size());
    CHECK(back.at(1, 0) == m.at(1, 0));

    CHECK_THROWS_AS(SparseMatrix::from_triplets(2, {{2, 0, 1.0}}), grf::DomainError);
    CHECK_THROWS_AS(SparseMatrix::from_triplets(2, {{-1, 0, 1.0}}), grf::DomainError);

    // Row indices strictly increasing within each column.
    const SparseMatrix g = random_spd_sparse(12, 5);
    for (int c = 0; c < g.order(); ++c)
        for (int p = g.col_ptr()[c] + 1; p < g.col_ptr()[c + 1]; ++p)
            CHECK(g.row_ind()[p] > g.row_ind()[p - 1]);
}

TEST_CASE("reorder: natural, rcm, amd") {
    const grf::gmrf::Graph path = grf::gmrf::grid_graph(8, 1);
    const SparseMatrix lap = grf::gmrf::graph_laplacian(path);

    const Ordering nat = reorder(OrderMethod::natural, lap);
    for (int i = 0; i < 8; ++i) CHECK(nat.perm[i] == i);

    // RCM keeps a path tridiagonal: bandwidth 1 after permutation.
    std::vector<Triplet> shuffled;
    // Relabel the path 0-4 as 2,0,4,1,3 to give RCM something to undo.
    const int relabel[5] = {2, 0, 4, 1, 3};
    for (int i = 0; i + 1 < 5; ++i) shuffled.push_back({relabel[i], relabel[i + 1], 1.0});
    for (int i = 0; i < 5; ++i) shuffled.push_back({i, i, 2.0});
    const SparseMatrix scrambled = SparseMatrix::from_triplets(5, shuffled);
    const Ordering rcm = reorder(OrderMethod::rcm, scrambled);
    CHECK(bandwidth_after(scrambled, rcm) <= 1);

    // AMD never fills more than the natural order on the 16x16 grid operator.
    const grf::gmrf::Graph grid = grf::gmrf::grid_graph(16, 2);
    const SparseMatrix q =
        grf::gmrf::build_precision(grid, grf::gmrf::PrecisionModel(1.0, 1, 1.0));
    const CholFactor f_nat = sparse_cholesky(q, reorder(OrderMethod::natural, q));
    const CholFactor f_amd = sparse_cholesky(q, reorder(OrderMethod::amd, q));
    CHECK(f_amd.nnz_l <= f_nat.nnz_l);

    // A permutation must be a bijection.
    for (const Ordering& o : {nat, rcm, reorder(OrderMethod::amd, q)}) {
        std::vector<char> seen(o.perm.size(), 0);
        for (int v : o.perm) {
            CHECK(v >= 0);
            CHECK(v < static_cast<int>(o.perm.size()));
            CHECK(!seen[v]);
            seen[v] = 1;
        }
    }
}

TEST_CASE("sparse cholesky hand cases") {
    // Identity factors to identity.
    std::vector<Triplet> eye;
    for (int i = 0; i < 4; ++i) eye.push_back({i, i, 1.0});
    const SparseMatrix id = SparseMatrix::from_triplets(4, eye);
    const CholFactor f = sparse_cholesky(id, reorder(OrderMethod::natural, id));
    CHECK(f.nnz_l == 4);
    for (int i = 0; i < 4; ++i) CHECK(f.l.at(i, i) == 1.0);

    // [[4,2],[2,3]] -> L = [[2,0],[1,sqrt(2)]].
    const SparseMatrix a = SparseMatrix::from_triplets(2, {{0, 0, 4.0}, {1, 0, 2.0}, {1, 1, 3.0}});
    const CholFactor fa = sparse_cholesky(a, reorder(OrderMethod::natural, a));
    CHECK(fa.l.at(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(fa.l.at(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fa.l.at(1, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    // Non-positive-definite input names the failing pivot.
    const SparseMatrix bad =
        SparseMatrix::from_triplets(2, {{0, 0, 1.0}, {1, 0, 2.0}, {1, 1, 1.0}});
    try {
        sparse_cholesky(bad, reorder(OrderMethod::natural, bad));
        FAIL("expected FactorizationError");
    } catch (const grf::FactorizationError& e) {
        CHECK(e.pivot == 1);
    }
}

TEST_CASE("gmrf grid precision factorizes and reconstructs") {
    const grf::gmrf::Graph grid = grf::gmrf::grid_graph(32, 2);
    const SparseMatrix q =
        grf::gmrf::build_precision(grid, grf::gmrf::PrecisionModel(0.7, 1, 1.0));
    for (OrderMethod m : {OrderMethod::natural, OrderMethod::rcm, OrderMethod::amd}) {
        const CholFactor f = sparse_cholesky(q, reorder(m, q));
        double max_a = 0.0;
        for (double v : q.values()) max_a = std::max(max_a, std::fabs(v));
        CHECK(reconstruction_error(q, f) <= 1e-9 * max_a);
    }
}

TEST_CASE("reconstruction and fill bound on random SPD matrices") {
    for (int n : {5, 23, 60}) {
        const SparseMatrix a = random_spd_sparse(n, 100 + n);
        const CholFactor f = sparse_cholesky(a, reorder(OrderMethod::amd, a));
        double max_a = 0.0;
        for (double v : a.values()) max_a = std::max(max_a, std::fabs(v));
        CHECK(reconstruction_error(a, f) <= 1e-9 * max_a);
        CHECK(f.nnz_l >= a.nnz());  // fill never shrinks the lower triangle
    }
}

TEST_CASE("solve") {
    const SparseMatrix id = SparseMatrix::from_triplets(
        3, {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}});
    const CholFactor fid = sparse_cholesky(id, reorder(OrderMethod::natural, id));
    const std::vector<double> b{1.0, -2.0, 0.5};
    CHECK(solve(fid, b) == b);

    // A=[[4,2],[2,3]], b=[8,8] -> x=[1,2] by hand elimination.
    const SparseMatrix a = SparseMatrix::from_triplets(2, {{0, 0, 4.0}, {1, 0, 2.0}, {1, 1, 3.0}});
    const CholFactor fa = sparse_cholesky(a, reorder(OrderMethod::natural, a));
    const std::vector<double> x = solve(fa, {8.0, 8.0});
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-12));
    const double r0 = 4.0 * x[0] + 2.0 * x[1] - 8.0;
    const double r1 = 2.0 * x[0] + 3.0 * x[1] - 8.0;
    CHECK(std::sqrt(r0 * r0 + r1 * r1) <= 1e-12 * std::sqrt(128.0));

    // Random SPD 50x50: residual check.
    const SparseMatrix big = random_spd_sparse(50, 42);
    const CholFactor fbig = sparse_cholesky(big, reorder(OrderMethod::amd, big));
    const CounterRng gen(7, 0);
    std::vector<double> rhs(50);
    for (int i = 0; i < 50; ++i) rhs[i] = gen.normal(i);
    const std::vector<double> sol = solve(fbig, rhs);
    const DenseMatrix bd = big.to_dense();
    double rnorm = 0.0, bnorm = 0.0;
    for (int i = 0; i < 50; ++i) {
        double ax = 0.0;
        for (int j = 0; j < 50; ++j) ax += bd(i, j) * sol[j];
        rnorm += (ax - rhs[i]) * (ax - rhs[i]);
        bnorm += rhs[i] * rhs[i];
    }
    CHECK(std::sqrt(rnorm) <= 1e-8 * std::sqrt(bnorm));

    CHECK_THROWS_AS(solve(fa, {1.0, 2.0, 3.0}), grf::DomainError);
}

TEST_CASE("solve agrees across orderings") {
    const grf::gmrf::Graph grid = grf::gmrf::grid_graph(10, 2);
    const SparseMatrix q =
        grf::gmrf::build_precision(grid, grf::gmrf::PrecisionModel(0.9, 2, 1.0));
    const CounterRng gen(11, 0);
    std::vector<double> b(q.order());
    for (int i = 0; i < q.order(); ++i) b[i] = gen.normal(i);
    const std::vector<double> x_nat = solve(sparse_cholesky(q, reorder(OrderMethod::natural, q)), b);
    for (OrderMethod m : {OrderMethod::rcm, OrderMethod::amd}) {
        const std::vector<double> x = solve(sparse_cholesky(q, reorder(m, q)), b);
        for (int i = 0; i < q.order(); ++i) CHECK(x[i] == doctest::Approx(x_nat[i]).epsilon(1e-8));
    }
}

TEST_CASE("factorization is bit-deterministic") {
    const SparseMatrix a = random_spd_sparse(40, 9001);
    const Ordering ord = reorder(OrderMethod::amd, a);
    const CholFactor f1 = sparse_cholesky(a, ord);
    const CholFactor f2 = sparse_cholesky(a, ord);
    CHECK(f1.l.values() == f2.l.values());
    CHECK(f1.l.row_ind() == f2.l.row_ind());
    const Ordering ord2 = reorder(OrderMethod::amd, a);
    CHECK(ord.perm == ord2.perm);
}

TEST_CASE("dense cholesky baseline") {
    const DenseMatrix id = DenseMatrix::identity(3);
    const DenseMatrix lid = dense_cholesky(id);
    for (int i = 0; i < 3; ++i) CHECK(lid(i, i) == 1.0);

    DenseMatrix a(2, 2);
    a(0, 0) = 4.0;
    a(0, 1) = a(1, 0) = 2.0;
    a(1, 1) = 3.0;
    const DenseMatrix l = dense_cholesky(a);
    CHECK(l(0, 0) == doctest::Approx(2.0));
    CHECK(l(1, 0) == doctest::Approx(1.0));
    CHECK(l(1, 1) == doctest::Approx(std::sqrt(2.0)));

    const DenseMatrix spd = test_support::random_spd(30, 77);
    const DenseMatrix ls = dense_cholesky(spd);
    double err = 0.0, scale = spd.max_abs();
    for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 30; ++j) {
            double s = 0.0;
            for (int k = 0; k < 30; ++k) s += ls(i, k) * ls(j, k);
            err = std::max(err, std::fabs(s - spd(i, j)));
        }
    CHECK(err <= 1e-10 * scale);

    DenseMatrix indef(2, 2);
    indef(0, 0) = 1.0;
    indef(0, 1) = indef(1, 0) = 2.0;
    indef(1, 1) = 1.0;
    CHECK_THROWS_AS(dense_cholesky(indef), grf::FactorizationError);
}

TEST_CASE("matrix market round trip and header") {
    const SparseMatrix a = random_spd_sparse(9, 3);
    std::ostringstream os;
    write_matrix_market(a, os);
    const std::string text = os.str();
    CHECK(text.rfind("%%MatrixMarket matrix coordinate real symmetric\n", 0) == 0);

    std::istringstream is(text);
    const SparseMatrix b = read_matrix_market(is);
    CHECK(b.order() == a.order());
    CHECK(b.col_ptr() == a.col_ptr());
    CHECK(b.row_ind() == a.row_ind());
    CHECK(b.values() == a.values());  // %.17g round-trips doubles exactly

    std::istringstream bad_header("%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 2.0\n");
    CHECK_THROWS_AS(read_matrix_market(bad_header), grf::ConfigError);
    std::istringstream truncated("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1.0\n");
    CHECK_THROWS_AS(read_matrix_market(truncated), grf::ConfigError);
    std::istringstream comments(
        "%%MatrixMarket matrix coordinate real symmetric\n% a comment\n2 2 1\n2 1 -3.0\n");
    CHECK(read_matrix_market(comments).at(0, 1) == -3.0);
}

TEST_CASE("benchmark: single size has no slope, tiny sizes are sane") {
    const BenchResult one = benchmark_factorization({64}, BenchBackend::sparse, 3);
    CHECK(one.rows.size() == 1);
    CHECK(!one.slope.has_value());
    CHECK(one.rows[0].backend == "sparse");
    CHECK(one.rows[0].nnz >= 64);

    const BenchResult two = benchmark_factorization({64, 144}, BenchBackend::dense, 3);
    CHECK(two.rows.size() == 2);
    CHECK(two.slope.has_value());
    CHECK(two.rows[0].nnz == 64 * 65 / 2);

    CHECK_THROWS_AS(benchmark_factorization({65}, BenchBackend::sparse, 3), grf::ConfigError);
    CHECK_THROWS_AS(benchmark_factorization({}, BenchBackend::sparse, 3), grf::ConfigError);
}
