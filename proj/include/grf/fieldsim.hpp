#ifndef GRF_FIELDSIM_HPP
#define GRF_FIELDSIM_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "grf/covariance.hpp"
#include "grf/field_sample.hpp"

namespace grf::sim {

// Discrete white noise: n independent N(0, spacing) increments (variance =
// cell volume).  Reproducible per seed; stream selects an independent
// substream for batch generation.
std::vector<double> white_noise(int n, double spacing, std::uint64_t seed,
                                std::uint64_t stream = 0);

// Radial convolution kernel.  `singular_at_origin` switches the origin cell
// to a 5-point Gauss-Legendre cell average (per axis) so kernels that blow
// up at 0 stay square-summable after discretization.
struct Kernel {
    std::function<double(double)> radial;
    bool singular_at_origin = false;
    std::string id;
};

// Matern kernel of Whittle's convolution representation, scaled so the
// sampled field is linear in sigma: k(r) = sigma * C_eta(r; sigma2=1).
Kernel matern_kernel(const cov::MaternParams& p);

// Discretized kernel weights on the periodic grid, origin cell handled per
// the kernel's singularity flag.  Row-major for 2D grids.
std::vector<double> kernel_weights(const Kernel& k, const Geometry& grid);

// Gaussian field by circular convolution of the kernel with white noise on
// a periodic grid.  Checks that the kernel is square-summable and (for the
// sampling contract to make sense) that its mass outside half the domain is
// below 1e-6 of the total.
FieldSample kernel_convolution_sample(const Kernel& k, const Geometry& grid, std::uint64_t seed);

// Same convolution driven by caller-supplied noise increments (one value
// per cell); the deterministic core of the sampler.
std::vector<double> kernel_convolution_with_noise(const Kernel& k, const Geometry& grid,
                                                  const std::vector<double>& noise);

// Whittle's sampler: kernel_convolution_sample with the Matern kernel.
FieldSample whittle_sample(const cov::MaternParams& p, const Geometry& grid, std::uint64_t seed);

// Batch generation; `threads` > 1 parallelizes across samples with
// per-sample counter streams, so output is identical for any thread count.
std::vector<FieldSample> kernel_convolution_batch(const Kernel& k, const Geometry& grid,
                                                  std::uint64_t seed, int count, int threads = 1);
std::vector<FieldSample> whittle_batch(const cov::MaternParams& p, const Geometry& grid,
                                       std::uint64_t seed, int count, int threads = 1);

// Deterministic covariance target of the convolution sampler: the discrete
// self-convolution vol * sum_j w_j w_{j+lag} of the sampled kernel at the
// given integer cell lags (1D grids).
std::vector<double> self_convolution_target(const Kernel& k, const Geometry& grid,
                                            const std::vector<int>& lags);

// Exact sampler for spherical Schoenberg models via dense Cholesky of the
// Gram matrix.  On a semidefinite Gram matrix one diagonal jitter of
// 1e-10 * trace/n is added; a second failure is an error.
FieldSample sphere_sample(const cov::SchoenbergSeries& s,
                          const std::vector<std::vector<double>>& points, std::uint64_t seed);
std::vector<FieldSample> sphere_sample_batch(const cov::SchoenbergSeries& s,
                                             const std::vector<std::vector<double>>& points,
                                             std::uint64_t seed, int count, int threads = 1);

struct CovEstimate {
    double estimate;
    double se;        // jackknife standard error
    bool degenerate;  // zero spread across samples
};

// Cross-moment estimates for mean-zero fields at the requested site pairs.
std::vector<CovEstimate> empirical_covariance(const std::vector<FieldSample>& samples,
                                              const std::vector<std::pair<int, int>>& pairs);

// CSV export: one row per site (coordinates..., value), '#' metadata
// comments carrying the seed and model id.
void write_csv(const FieldSample& s, std::ostream& os);

// Binary PGM (P5) heatmap for 2D grid samples; min-max scaling recorded in
// the header comment.
void write_pgm(const FieldSample& s, std::ostream& os);

}  // namespace grf::sim

#endif  // GRF_FIELDSIM_HPP
