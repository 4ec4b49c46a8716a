#ifndef GRF_TEST_SUPPORT_HPP
#define GRF_TEST_SUPPORT_HPP

// Independent numerical oracles for the test suites.  Nothing here calls
// into the library's own factorization or eigenvalue paths.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "grf/dense.hpp"
#include "grf/rng.hpp"

namespace test_support {

// Cyclic Jacobi eigenvalue iteration for symmetric matrices.  Plenty for
// the desk-scale oracles used in the tests (n <= ~200).
inline std::vector<double> jacobi_eigenvalues(grf::DenseMatrix a, int max_sweeps = 100) {
    const int n = a.rows();
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-26 * n * n) break;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::fabs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> eig(n);
    for (int i = 0; i < n; ++i) eig[i] = a(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

// Gauss-Jordan inverse with partial pivoting; independent of the library's
// Cholesky-based route.
inline grf::DenseMatrix gauss_jordan_inverse(grf::DenseMatrix a) {
    const int n = a.rows();
    grf::DenseMatrix inv = grf::DenseMatrix::identity(n);
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(a(r, col)) > std::fabs(a(piv, col))) piv = r;
        if (std::fabs(a(piv, col)) < 1e-300) throw std::runtime_error("singular matrix");
        if (piv != col)
            for (int k = 0; k < n; ++k) {
                std::swap(a(piv, k), a(col, k));
                std::swap(inv(piv, k), inv(col, k));
            }
        const double d = a(col, col);
        for (int k = 0; k < n; ++k) {
            a(col, k) /= d;
            inv(col, k) /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a(r, col);
            if (f == 0.0) continue;
            for (int k = 0; k < n; ++k) {
                a(r, k) -= f * a(col, k);
                inv(r, k) -= f * inv(col, k);
            }
        }
    }
    return inv;
}

// Random SPD matrix A = B B^T + shift I with entries from the library RNG
// (deterministic given the seed).
inline grf::DenseMatrix random_spd(int n, std::uint64_t seed, double shift = 0.5) {
    grf::rng::CounterRng gen(seed, 9001);
    grf::DenseMatrix b(n, n);
    std::uint64_t c = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) = gen.normal(c++);
    grf::DenseMatrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += b(i, k) * b(j, k);
            if (i == j) s += shift * n;
            a(i, j) = s;
            a(j, i) = s;
        }
    return a;
}

// Uniform draw on [lo, hi] from the shared counter generator.
inline double uniform_in(const grf::rng::CounterRng& gen, std::uint64_t counter, double lo,
                         double hi) {
    return lo + (hi - lo) * gen.uniform(counter);
}

// Random point on the unit sphere S^{dim} embedded in R^{dim+1}.
inline std::vector<double> random_unit_vector(const grf::rng::CounterRng& gen,
                                              std::uint64_t base_counter, int embed_dim) {
    std::vector<double> v(embed_dim);
    double norm2 = 0.0;
    for (int k = 0; k < embed_dim; ++k) {
        v[k] = gen.normal(base_counter + static_cast<std::uint64_t>(k));
        norm2 += v[k] * v[k];
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
    return v;
}

// Conditional covariance of (i, j) given all other coordinates, computed
// from the dense covariance by the Schur complement.
inline grf::DenseMatrix conditional_cov_pair(const grf::DenseMatrix& sigma, int i, int j) {
    const int n = sigma.rows();
    std::vector<int> rest;
    for (int k = 0; k < n; ++k)
        if (k != i && k != j) rest.push_back(k);
    const int m = static_cast<int>(rest.size());
    grf::DenseMatrix s_aa(2, 2), s_ab(2, m), s_bb(m, m);
    const int idx[2] = {i, j};
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) s_aa(r, c) = sigma(idx[r], idx[c]);
        for (int c = 0; c < m; ++c) s_ab(r, c) = sigma(idx[r], rest[c]);
    }
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) s_bb(r, c) = sigma(rest[r], rest[c]);
    if (m == 0) return s_aa;
    const grf::DenseMatrix s_bb_inv = gauss_jordan_inverse(s_bb);
    grf::DenseMatrix out(2, 2);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            double corr = 0.0;
            for (int u = 0; u < m; ++u)
                for (int v = 0; v < m; ++v) corr += s_ab(r, u) * s_bb_inv(u, v) * s_ab(c, v);
            out(r, c) = s_aa(r, c) - corr;
        }
    return out;
}

}  // namespace test_support

#endif  // GRF_TEST_SUPPORT_HPP
