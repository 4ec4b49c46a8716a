#include "grf/fieldsim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <thread>

#include "grf/rng.hpp"

namespace grf::sim {

namespace {

// Gauss-Legendre 5-point rule on [-1, 1].
constexpr double kGlNode[5] = {-0.906179845938663992797626878299,
                               -0.538469310105683091036314420700, 0.0,
                               0.538469310105683091036314420700,
                               0.906179845938663992797626878299};
constexpr double kGlWeight[5] = {0.236926885056189087514264040720,
                                 0.478628670499366468041291514836,
                                 0.568888888888888888888888888889,
                                 0.478628670499366468041291514836,
                                 0.236926885056189087514264040720};

int ring_distance(int i, int n) { return std::min(i, n - i); }

// Cell average with the nodes mapped into the open half (quarter) cell, so
// a singularity at the cell centre is never sampled directly.
double origin_cell_average(const Kernel& k, const Geometry& grid) {
    const double h = grid.spacing;
    if (grid.kind == Geometry::Kind::grid1d) {
        double s = 0.0;
        for (int q = 0; q < 5; ++q)
            s += kGlWeight[q] * k.radial((1.0 + kGlNode[q]) * h / 4.0);
        return s / 2.0;  // mean over the cell, by symmetry
    }
    double s = 0.0;
    for (int qx = 0; qx < 5; ++qx)
        for (int qy = 0; qy < 5; ++qy) {
            const double x = (1.0 + kGlNode[qx]) * h / 4.0;
            const double y = (1.0 + kGlNode[qy]) * h / 4.0;
            s += kGlWeight[qx] * kGlWeight[qy] * k.radial(std::hypot(x, y));
        }
    return s / 4.0;
}

int grid_dims(const Geometry& grid) {
    if (grid.kind == Geometry::Kind::grid1d) return 1;
    if (grid.kind == Geometry::Kind::grid2d) return 2;
    throw ConfigError("convolution sampling requires a 1D or 2D grid geometry");
}

double cell_volume(const Geometry& grid) {
    return grid_dims(grid) == 1 ? grid.spacing : grid.spacing * grid.spacing;
}

// Sum of f(kernel value) over the lattice shell |d| in (r0, r1].
template <typename F>
double lattice_sum(const Kernel& k, const Geometry& grid, double r0, double r1, const F& f) {
    const double h = grid.spacing;
    double s = 0.0;
    if (grid_dims(grid) == 1) {
        for (int i = 1; i * h <= r1; ++i) {
            const double d = i * h;
            if (d > r0) s += 2.0 * f(k.radial(d));
        }
        if (r0 < 0.0) s += f(k.radial(0.0));
    } else {
        const int reach = static_cast<int>(std::floor(r1 / h));
        for (int ix = -reach; ix <= reach; ++ix)
            for (int iy = -reach; iy <= reach; ++iy) {
                const double d = std::hypot(ix * h, iy * h);
                if (d <= r1 && d > r0) s += f(k.radial(d));
            }
    }
    return s;
}

}  // namespace

std::vector<double> white_noise(int n, double spacing, std::uint64_t seed, std::uint64_t stream) {
    if (n < 1) throw DomainError("white_noise: n must be >= 1");
    if (!(spacing > 0.0)) throw DomainError("white_noise: spacing must be > 0");
    const rng::CounterRng gen(seed, stream);
    const double sd = std::sqrt(spacing);
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = sd * gen.normal(static_cast<std::uint64_t>(i));
    return out;
}

Kernel matern_kernel(const cov::MaternParams& p) {
    const cov::MaternParams unit(p.nu, p.kappa, 1.0, p.d);
    const double sigma = std::sqrt(p.sigma2);
    std::ostringstream id;
    id << "whittle_matern(nu=" << p.nu << ",kappa=" << p.kappa << ",sigma2=" << p.sigma2
       << ",d=" << p.d << ")";
    return Kernel{[unit, sigma](double r) { return sigma * cov::matern_covariance(unit, r); },
                  false, id.str()};
}

std::vector<double> kernel_weights(const Kernel& k, const Geometry& grid) {
    const double h = grid.spacing;
    const int dims = grid_dims(grid);
    std::vector<double> w(grid.size());
    if (dims == 1) {
        for (int i = 0; i < grid.nx; ++i) w[i] = k.radial(ring_distance(i, grid.nx) * h);
    } else {
        for (int iy = 0; iy < grid.ny; ++iy)
            for (int ix = 0; ix < grid.nx; ++ix)
                w[static_cast<std::size_t>(iy) * grid.nx + ix] =
                    k.radial(std::hypot(ring_distance(ix, grid.nx) * h,
                                        ring_distance(iy, grid.ny) * h));
    }
    if (k.singular_at_origin) w[0] = origin_cell_average(k, grid);
    return w;
}

namespace {

void check_kernel_on_grid(const Kernel& k, const Geometry& grid) {
    const double h = grid.spacing;
    const int dims = grid_dims(grid);
    const double half = 0.5 * h * (dims == 1 ? grid.nx : std::min(grid.nx, grid.ny));
    const double vol = cell_volume(grid);
    const auto absv = [](double v) { return std::fabs(v); };
    const auto sqv = [](double v) { return v * v; };

    const double origin_val =
        k.singular_at_origin ? origin_cell_average(k, grid) : k.radial(0.0);
    if (!std::isfinite(origin_val))
        throw ConfigError("kernel diverges at the origin; mark it singular_at_origin");

    const double mass_in = vol * (lattice_sum(k, grid, 0.0, half, absv) + std::fabs(origin_val));
    const double mass_out = vol * lattice_sum(k, grid, half, 8.0 * half, absv);
    const double l2_in = vol * (lattice_sum(k, grid, 0.0, half, sqv) + origin_val * origin_val);
    const double l2_out = vol * lattice_sum(k, grid, half, 8.0 * half, sqv);

    if (!(l2_in + l2_out > 0.0) || l2_out > 1e-6 * (l2_in + l2_out))
        throw ConfigError("kernel is not square-summable on this grid (L2 tail fraction " +
                          std::to_string(l2_out / std::max(l2_in + l2_out, 1e-300)) + ")");
    const double tail_fraction = mass_out / std::max(mass_in + mass_out, 1e-300);
    if (tail_fraction > 1e-6)
        throw ConfigError("grid too small: kernel mass outside half the domain is " +
                          std::to_string(tail_fraction) + " of the total (needs < 1e-6)");
}

// Circular convolution of the weights with one noise realization.
std::vector<double> convolve(const std::vector<double>& w, const std::vector<double>& z,
                             const Geometry& grid) {
    std::vector<double> x(z.size(), 0.0);
    if (grid_dims(grid) == 1) {
        const int n = grid.nx;
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int r = 0; r < n; ++r) s += w[r] * z[(i + r) % n];
            x[i] = s;
        }
    } else {
        const int nx = grid.nx, ny = grid.ny;
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix) {
                double s = 0.0;
                for (int ry = 0; ry < ny; ++ry) {
                    const int zy = (iy + ry) % ny;
                    const double* zrow = z.data() + static_cast<std::size_t>(zy) * nx;
                    const double* wrow = w.data() + static_cast<std::size_t>(ry) * nx;
                    for (int rx = 0; rx < nx; ++rx) s += wrow[rx] * zrow[(ix + rx) % nx];
                }
                x[static_cast<std::size_t>(iy) * nx + ix] = s;
            }
    }
    return x;
}

template <typename MakeSample>
std::vector<FieldSample> run_batch(int count, int threads, const MakeSample& make) {
    if (count < 1) throw DomainError("sample batch: count must be >= 1");
    std::vector<FieldSample> out(count);
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int s = 0; s < count; ++s) out[s] = make(s);
        return out;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (int s = t; s < count; s += threads) out[s] = make(s);
        });
    for (auto& th : pool) th.join();
    return out;
}

}  // namespace

std::vector<FieldSample> kernel_convolution_batch(const Kernel& k, const Geometry& grid,
                                                  std::uint64_t seed, int count, int threads) {
    check_kernel_on_grid(k, grid);
    const std::vector<double> w = kernel_weights(k, grid);
    const double vol = cell_volume(grid);
    const int n = static_cast<int>(grid.size());
    return run_batch(count, threads, [&](int s) {
        const std::vector<double> z =
            white_noise(n, vol, seed, static_cast<std::uint64_t>(s));
        return FieldSample{convolve(w, z, grid), grid, seed, k.id};
    });
}

FieldSample kernel_convolution_sample(const Kernel& k, const Geometry& grid, std::uint64_t seed) {
    return std::move(kernel_convolution_batch(k, grid, seed, 1).front());
}

std::vector<double> kernel_convolution_with_noise(const Kernel& k, const Geometry& grid,
                                                  const std::vector<double>& noise) {
    if (noise.size() != grid.size())
        throw DomainError("kernel_convolution_with_noise: noise size does not match the grid");
    check_kernel_on_grid(k, grid);
    return convolve(kernel_weights(k, grid), noise, grid);
}

FieldSample whittle_sample(const cov::MaternParams& p, const Geometry& grid, std::uint64_t seed) {
    return kernel_convolution_sample(matern_kernel(p), grid, seed);
}

std::vector<FieldSample> whittle_batch(const cov::MaternParams& p, const Geometry& grid,
                                       std::uint64_t seed, int count, int threads) {
    return kernel_convolution_batch(matern_kernel(p), grid, seed, count, threads);
}

std::vector<double> self_convolution_target(const Kernel& k, const Geometry& grid,
                                            const std::vector<int>& lags) {
    if (grid_dims(grid) != 1)
        throw ConfigError("self_convolution_target: 1D grids only");
    const std::vector<double> w = kernel_weights(k, grid);
    const double vol = cell_volume(grid);
    const int n = grid.nx;
    std::vector<double> out;
    out.reserve(lags.size());
    for (int lag : lags) {
        if (lag < 0) throw DomainError("self_convolution_target: lags must be >= 0");
        double s = 0.0;
        for (int r = 0; r < n; ++r) s += w[r] * w[(r + lag) % n];
        out.push_back(vol * s);
    }
    return out;
}

namespace {

// Semidefinite-tolerant Cholesky: clean rank deficiency (pivots at 0) maps
// to zero columns, so degenerate Gram matrices sample exactly.  Fails only
// on genuinely negative pivots.
bool psd_cholesky(const DenseMatrix& a, DenseMatrix& l) {
    const int n = a.rows();
    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::fabs(a(i, i)));
    const double tol = 1e-12 * std::max(scale, 1e-300);
    l = DenseMatrix(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (j < i) {
                l(i, j) = (l(j, j) == 0.0) ? 0.0 : s / l(j, j);
            } else {
                if (s < -tol) return false;
                l(i, i) = (s <= tol) ? 0.0 : std::sqrt(s);
            }
        }
    }
    return true;
}

DenseMatrix sphere_gram_factor(const cov::SchoenbergSeries& s,
                               const std::vector<std::vector<double>>& points) {
    const cov::CovariancePtr model = cov::make_schoenberg(s);
    std::vector<cov::Location> locs;
    locs.reserve(points.size());
    for (const auto& p : points) locs.push_back(cov::Location{p, 0.0});
    DenseMatrix gram = cov::covariance_matrix(*model, locs, cov::Metric::sphere_cosine);
    DenseMatrix l;
    if (psd_cholesky(gram, l)) return l;
    // One shot of diagonal jitter for round-off-negative matrices.
    double trace = 0.0;
    for (int i = 0; i < gram.rows(); ++i) trace += gram(i, i);
    const double jitter = 1e-10 * trace / gram.rows();
    for (int i = 0; i < gram.rows(); ++i) gram(i, i) += jitter;
    if (psd_cholesky(gram, l)) return l;
    throw ValidationError("sphere_sample: Gram matrix is not positive semidefinite even after jitter");
}

}  // namespace

std::vector<FieldSample> sphere_sample_batch(const cov::SchoenbergSeries& s,
                                             const std::vector<std::vector<double>>& points,
                                             std::uint64_t seed, int count, int threads) {
    const DenseMatrix l = sphere_gram_factor(s, points);
    const int n = l.rows();
    const Geometry geom = Geometry::point_set(points);
    std::ostringstream id;
    id << "schoenberg(S^" << s.sphere_dim << ",n=" << s.coeffs.size() << ")";
    const std::string model_id = id.str();
    return run_batch(count, threads, [&](int sidx) {
        const rng::CounterRng gen(seed, static_cast<std::uint64_t>(sidx));
        std::vector<double> z(n);
        for (int i = 0; i < n; ++i) z[i] = gen.normal(static_cast<std::uint64_t>(i));
        std::vector<double> x(n, 0.0);
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j <= i; ++j) acc += l(i, j) * z[j];
            x[i] = acc;
        }
        return FieldSample{std::move(x), geom, seed, model_id};
    });
}

FieldSample sphere_sample(const cov::SchoenbergSeries& s,
                          const std::vector<std::vector<double>>& points, std::uint64_t seed) {
    return std::move(sphere_sample_batch(s, points, seed, 1).front());
}

std::vector<CovEstimate> empirical_covariance(const std::vector<FieldSample>& samples,
                                              const std::vector<std::pair<int, int>>& pairs) {
    if (samples.size() < 2) throw DomainError("empirical_covariance: need at least 2 samples");
    const Geometry& geom = samples.front().geometry;
    const std::size_t n = samples.front().values.size();
    for (const FieldSample& s : samples)
        if (!(s.geometry == geom) || s.values.size() != n)
            throw DomainError("empirical_covariance: samples disagree on geometry");

    const double count = static_cast<double>(samples.size());
    std::vector<CovEstimate> out;
    out.reserve(pairs.size());
    for (const auto& [i, j] : pairs) {
        if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= n || static_cast<std::size_t>(j) >= n)
            throw DomainError("empirical_covariance: pair index out of range");
        double mean = 0.0;
        for (const FieldSample& s : samples) mean += s.values[i] * s.values[j];
        mean /= count;
        double ss = 0.0;
        for (const FieldSample& s : samples) {
            const double d = s.values[i] * s.values[j] - mean;
            ss += d * d;
        }
        // Jackknife of a sample mean collapses to the usual standard error.
        const double se = std::sqrt(ss / (count * (count - 1.0)));
        out.push_back(CovEstimate{mean, se, se == 0.0});
    }
    return out;
}

void write_csv(const FieldSample& s, std::ostream& os) {
    os << "# seed=" << s.seed << " model=" << s.model_id << "\n";
    char buf[256];
    if (s.geometry.kind == Geometry::Kind::grid1d) {
        os << "x,value\n";
        for (int i = 0; i < s.geometry.nx; ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", i * s.geometry.spacing,
                          s.values[i]);
            os << buf;
        }
    } else if (s.geometry.kind == Geometry::Kind::grid2d) {
        os << "x,y,value\n";
        for (int iy = 0; iy < s.geometry.ny; ++iy)
            for (int ix = 0; ix < s.geometry.nx; ++ix) {
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", ix * s.geometry.spacing,
                              iy * s.geometry.spacing,
                              s.values[static_cast<std::size_t>(iy) * s.geometry.nx + ix]);
                os << buf;
            }
    } else {
        const bool with_coords =
            !s.geometry.points.empty() && !s.geometry.points.front().empty();
        if (with_coords) {
            const std::size_t dim = s.geometry.points.front().size();
            for (std::size_t k = 0; k < dim; ++k) os << "p" << k << ",";
            os << "value\n";
            for (std::size_t i = 0; i < s.values.size(); ++i) {
                for (double c : s.geometry.points[i]) {
                    std::snprintf(buf, sizeof(buf), "%.17g,", c);
                    os << buf;
                }
                std::snprintf(buf, sizeof(buf), "%.17g\n", s.values[i]);
                os << buf;
            }
        } else {
            os << "vertex,value\n";
            for (std::size_t i = 0; i < s.values.size(); ++i) {
                std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, s.values[i]);
                os << buf;
            }
        }
    }
}

void write_pgm(const FieldSample& s, std::ostream& os) {
    if (s.geometry.kind != Geometry::Kind::grid2d)
        throw ConfigError("write_pgm: only 2D grid samples can be rendered");
    const auto [mn_it, mx_it] = std::minmax_element(s.values.begin(), s.values.end());
    const double mn = *mn_it;
    const double mx = *mx_it;
    const double span = (mx > mn) ? (mx - mn) : 1.0;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "P5\n# min=%.17g max=%.17g seed=%llu\n%d %d\n255\n", mn, mx,
                  static_cast<unsigned long long>(s.seed), s.geometry.nx, s.geometry.ny);
    os << buf;
    for (double v : s.values) {
        const int level = static_cast<int>(std::lround((v - mn) / span * 255.0));
        os.put(static_cast<char>(std::clamp(level, 0, 255)));
    }
}

}  // namespace grf::sim
