#include "grf/dense.hpp"

#include <cmath>
#include <string>

#include "grf/errors.hpp"

namespace grf {

double DenseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::fabs(v));
    return m;
}

bool DenseMatrix::is_symmetric(double rel_tol) const {
    if (rows_ != cols_) return false;
    const double scale = std::max(max_abs(), 1e-300);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < i; ++j)
            if (std::fabs((*this)(i, j) - (*this)(j, i)) > rel_tol * scale) return false;
    return true;
}

DenseMatrix dense_cholesky(const DenseMatrix& a) {
    if (a.rows() != a.cols()) throw DomainError("dense_cholesky: matrix must be square");
    const int n = a.rows();
    double max_diag = 0.0;
    for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, std::fabs(a(i, i)));
    const double pivot_floor = 1e-12 * max_diag;

    DenseMatrix l(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (j < i) {
                l(i, j) = s / l(j, j);
            } else {
                if (!(s > pivot_floor))
                    throw FactorizationError(
                        "dense_cholesky: matrix not positive definite at pivot " + std::to_string(i), i);
                l(i, i) = std::sqrt(s);
            }
        }
    }
    return l;
}

std::vector<double> chol_solve(const DenseMatrix& l, const std::vector<double>& b) {
    const int n = l.rows();
    if (static_cast<int>(b.size()) != n) throw DomainError("chol_solve: dimension mismatch");
    std::vector<double> x(b);
    for (int i = 0; i < n; ++i) {
        double s = x[i];
        for (int k = 0; k < i; ++k) s -= l(i, k) * x[k];
        x[i] = s / l(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
        x[i] = s / l(i, i);
    }
    return x;
}

DenseMatrix chol_inverse(const DenseMatrix& a) {
    const int n = a.rows();
    const DenseMatrix l = dense_cholesky(a);
    DenseMatrix inv(n, n);
    std::vector<double> e(n, 0.0);
    for (int j = 0; j < n; ++j) {
        e[j] = 1.0;
        const std::vector<double> col = chol_solve(l, e);
        e[j] = 0.0;
        for (int i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    // Symmetrize away the last-bit asymmetry from columnwise solves.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) {
            const double v = 0.5 * (inv(i, j) + inv(j, i));
            inv(i, j) = v;
            inv(j, i) = v;
        }
    return inv;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw DomainError("matmul: inner dimensions differ");
    DenseMatrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

}  // namespace grf
