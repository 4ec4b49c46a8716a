#ifndef GRF_SPARSE_HPP
#define GRF_SPARSE_HPP

#include <iosfwd>
#include <vector>

#include "grf/dense.hpp"
#include "grf/errors.hpp"

namespace grf::sparse {

struct Triplet {
    int row;
    int col;
    double value;
};

// Symmetric sparse matrix, compressed-column storage of the lower triangle.
// Row indices are strictly increasing within each column; no duplicates and
// no explicitly stored zeros.  The logical matrix is the symmetric
// completion of what is stored.
class SparseMatrix {
  public:
    SparseMatrix() = default;

    // Builds the canonical form from (row, col, value) triplets.  Duplicates
    // are summed, upper-triangle entries are mirrored into the lower
    // triangle, and exact zeros are dropped.
    static SparseMatrix from_triplets(int n, const std::vector<Triplet>& triplets);

    // Assembles from already-canonical CSC arrays (used by factorizations).
    static SparseMatrix from_csc(int n, std::vector<int> col_ptr, std::vector<int> row_ind,
                                 std::vector<double> values);

    int order() const { return n_; }
    int nnz() const { return static_cast<int>(values_.size()); }

    const std::vector<int>& col_ptr() const { return col_ptr_; }
    const std::vector<int>& row_ind() const { return row_ind_; }
    const std::vector<double>& values() const { return values_; }

    // Logical symmetric element lookup (zero when not stored).
    double at(int i, int j) const;

    std::vector<Triplet> to_triplets() const;  // lower-triangle entries
    DenseMatrix to_dense() const;              // symmetric completion

  private:
    int n_ = 0;
    std::vector<int> col_ptr_{0};
    std::vector<int> row_ind_;
    std::vector<double> values_;
};

enum class OrderMethod { amd, rcm, natural };

struct Ordering {
    std::vector<int> perm;  // perm[k] = original index placed at position k
    OrderMethod method;
};

// Fill-reducing (or identity) ordering of a structurally symmetric matrix.
Ordering reorder(OrderMethod method, const SparseMatrix& a);

// Sparse Cholesky factor of P A P^T = L L^T.  `l` stores the lower-triangular
// factor verbatim in SparseMatrix storage (no symmetric completion implied).
struct CholFactor {
    SparseMatrix l;
    Ordering ordering;
    long nnz_l;
};

// Up-looking simplicial sparse Cholesky with an elimination-tree symbolic
// phase.  Throws FactorizationError naming the failing pivot (original
// numbering) when A is not positive definite.
CholFactor sparse_cholesky(const SparseMatrix& a, const Ordering& ord);

// Solve A x = b through the factor (permute, two triangular solves, unpermute).
std::vector<double> solve(const CholFactor& factor, const std::vector<double>& b);

// Dense baseline for the sparse-vs-dense cost comparison.
using grf::dense_cholesky;

// Matrix Market coordinate format, "real symmetric", 1-based indices.
void write_matrix_market(const SparseMatrix& a, std::ostream& os);
SparseMatrix read_matrix_market(std::istream& is);
void write_matrix_market_file(const SparseMatrix& a, const std::string& path);
SparseMatrix read_matrix_market_file(const std::string& path);

}  // namespace grf::sparse

#endif  // GRF_SPARSE_HPP
