#ifndef GRF_GMRF_HPP
#define GRF_GMRF_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "grf/field_sample.hpp"
#include "grf/sparse.hpp"

namespace grf::gmrf {

// Undirected weighted graph; edges stored canonically with i < j.
struct Graph {
    struct Edge {
        int i;
        int j;
        double weight;
    };

    int n = 0;
    std::vector<Edge> edges;
    std::vector<std::vector<double>> coords;  // optional, per vertex

    Graph() = default;
    Graph(int n_, std::vector<Edge> edges_, std::vector<std::vector<double>> coords_ = {});
};

// Regular lattice with unit spacing and unit edge weights: a path for
// dims = 1, a side x side 4-neighbour grid for dims = 2.
Graph grid_graph(int side, int dims);

// Graph Laplacian L = D - W (rows sum to zero, positive semidefinite).
sparse::SparseMatrix graph_laplacian(const Graph& g);

// Discrete SPDE operator parameters: Q = tau (kappa^2 I + L)^m.  Only
// integer powers m <= 3 keep the precision sparse.
struct PrecisionModel {
    double kappa;
    int m;
    double tau;

    PrecisionModel(double kappa_, int m_, double tau_);
};

sparse::SparseMatrix build_precision(const Graph& g, const PrecisionModel& p);

// Gaussian Markov random field: sparse precision, its Cholesky factor, and
// a mean vector (zero by default).  Construction factorizes Q and therefore
// proves it positive definite.
class GMRF {
  public:
    explicit GMRF(sparse::SparseMatrix q, std::vector<double> mu = {},
                  sparse::OrderMethod ordering = sparse::OrderMethod::amd);

    const sparse::SparseMatrix& precision() const { return q_; }
    const sparse::CholFactor& factor() const { return factor_; }
    const std::vector<double>& mean() const { return mu_; }
    int size() const { return q_.order(); }

  private:
    sparse::SparseMatrix q_;
    sparse::CholFactor factor_;
    std::vector<double> mu_;
};

// Draw `count` exact samples (solve L^T y = z, undo the permutation, add the
// mean).  Bit-reproducible per (seed, count) and across thread counts.
std::vector<sim::FieldSample> sample(const GMRF& model, std::uint64_t seed, int count,
                                     const std::vector<std::vector<double>>& coords = {});

// Conditional independence of x_i and x_j given all other vertices: true
// iff Q(i,j) == 0.
bool dempster_check(const sparse::SparseMatrix& q, int i, int j);

struct KrigeResult {
    std::vector<int> targets;
    std::vector<double> mean;
    std::vector<double> variance;
};

// Conditional mean and variance of the target vertices given the observed
// values, computed entirely on the precision side (sparse solves with the
// unobserved block; the dense covariance is never formed).
KrigeResult krige(const GMRF& model, const std::map<int, double>& observed,
                  const std::vector<int>& targets);

// Empirical range rule rho = sqrt(8 nu) / kappa.
double range_parameter(double nu, double kappa);

struct LagComparison {
    double lag;
    double matern;          // analytic Matern correlation at this lag
    double gmrf_mean;       // mean GMRF correlation over interior pairs
    double max_abs_error;   // worst interior pair at this lag
    long pair_count;
};

struct GmrfMaternReport {
    double nu;                      // 2m - 1 on the 2D grid
    double range;                   // sqrt(8 nu)/kappa
    int boundary_ring;              // excluded ring width (range rounded up)
    std::vector<LagComparison> lags;
    double boundary_max_error;      // same lags, pairs touching the ring
    double correlation_at_range;    // observed GMRF correlation at lag ~ range
};

// Compares GMRF correlations (from the dense inverse, desk scale) on a 2D
// grid against the Matern correlation with nu = 2m - 1, interior pairs only.
GmrfMaternReport gmrf_vs_matern_error(int side, const PrecisionModel& p,
                                      const std::vector<double>& lags);

// Edge-list text format: one "i j weight" line per edge, 0-based vertex
// ids, '#' starts a comment.
void write_edge_list(const Graph& g, std::ostream& os);
Graph read_edge_list(std::istream& is);

}  // namespace grf::gmrf

#endif  // GRF_GMRF_HPP
