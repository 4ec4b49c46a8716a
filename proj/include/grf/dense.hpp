#ifndef GRF_DENSE_HPP
#define GRF_DENSE_HPP

#include <cstddef>
#include <vector>

namespace grf {

// Row-major dense matrix.  Small and deliberately plain; this is the dense
// baseline the sparse machinery is compared against, plus the workhorse for
// desk-scale Gram matrices and oracles.
class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {}

    static DenseMatrix identity(int n) {
        DenseMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    const std::vector<double>& data() const { return a_; }

    double max_abs() const;
    bool is_symmetric(double rel_tol) const;

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

// Dense Cholesky factorization A = L L^T (lower triangular L).  A pivot
// below 1e-12 * max(diag) aborts with FactorizationError naming the pivot.
DenseMatrix dense_cholesky(const DenseMatrix& a);

// Solve A x = b given the Cholesky factor L of A.
std::vector<double> chol_solve(const DenseMatrix& l, const std::vector<double>& b);

// A^{-1} via the Cholesky factor; for desk-scale covariance/precision flips.
DenseMatrix chol_inverse(const DenseMatrix& a);

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace grf

#endif  // GRF_DENSE_HPP
