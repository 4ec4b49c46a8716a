#include "grf/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "grf/specfun.hpp"

namespace grf::cov {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Matern evaluations past this argument are below double resolution anyway.
constexpr double kUnderflowArg = 700.0;

double euclid_distance(const Location& a, const Location& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.x.size(); ++k) {
        const double d = a.x[k] - b.x[k];
        s += d * d;
    }
    return std::sqrt(s);
}

double sphere_cosine(const Location& a, const Location& b) {
    double dot = 0.0;
    for (std::size_t k = 0; k < a.x.size(); ++k) dot += a.x[k] * b.x[k];
    if (dot > 1.0 || dot < -1.0) {
        if (std::fabs(dot) > 1.0 + 1e-9)
            throw ConfigError("sphere model: points must be unit vectors");
        dot = std::clamp(dot, -1.0, 1.0);
    }
    return dot;
}

}  // namespace

MaternParams::MaternParams(double nu_, double kappa_, double sigma2_, int d_)
    : nu(nu_), kappa(kappa_), sigma2(sigma2_), d(d_) {
    if (!(nu > 0.0)) throw DomainError("MaternParams: nu must be > 0");
    if (!(kappa > 0.0)) throw DomainError("MaternParams: kappa must be > 0");
    if (!(sigma2 > 0.0)) throw DomainError("MaternParams: sigma2 must be > 0");
    if (d < 1) throw DomainError("MaternParams: d must be >= 1");
}

double matern_correlation(const MaternParams& p, double r) {
    if (r < 0.0) throw DomainError("matern_correlation: r must be >= 0");
    if (r == 0.0) return 1.0;
    const double z = p.kappa * r;
    if (z > kUnderflowArg) return 0.0;
    const double k = specfun::bessel_k(specfun::BesselOrder(p.nu), z);
    return std::pow(2.0, 1.0 - p.nu) / specfun::gamma_fn(p.nu) * std::pow(z, p.nu) * k;
}

double matern_spectral_density(const MaternParams& p, double w) {
    if (w < 0.0) throw DomainError("matern_spectral_density: w must be >= 0");
    const double expo = p.nu + 0.5 * p.d;
    const double c = specfun::gamma_fn(expo) * std::pow(p.kappa, 2.0 * p.nu) /
                     (std::pow(kPi, 0.5 * p.d) * specfun::gamma_fn(p.nu));
    return c * std::pow(p.kappa * p.kappa + w * w, -expo);
}

namespace {

double matern_cov_prefactor(const MaternParams& p) {
    const double eta = p.eta();
    return p.sigma2 / (specfun::gamma_fn(eta + 0.5 * p.d) * std::pow(4.0 * kPi, 0.5 * p.d) *
                       std::pow(p.kappa, 2.0 * eta) * std::pow(2.0, eta - 1.0));
}

}  // namespace

double matern_covariance(const MaternParams& p, double r) {
    if (r < 0.0) throw DomainError("matern_covariance: r must be >= 0");
    const double eta = p.eta();
    if (r == 0.0)
        return matern_cov_prefactor(p) * std::pow(2.0, eta - 1.0) * specfun::gamma_fn(eta);
    const double z = p.kappa * r;
    if (z > kUnderflowArg) return 0.0;
    const double k = specfun::bessel_k(specfun::BesselOrder(eta), z);
    return matern_cov_prefactor(p) * std::pow(z, eta) * k;
}

double bessel_potential_kernel(double alpha, int d, double r) {
    if (!(alpha > 0.0)) throw DomainError("bessel_potential_kernel: alpha must be > 0");
    if (d < 1) throw DomainError("bessel_potential_kernel: d must be >= 1");
    if (!(r > 0.0)) throw DomainError("bessel_potential_kernel: r must be > 0");
    if (r > kUnderflowArg) return 0.0;
    const double eta = 0.5 * (alpha - d);
    const double c = std::pow(2.0, 0.5 * (d + alpha - 2.0)) * std::pow(kPi, 0.5 * d) *
                     specfun::gamma_fn(0.5 * alpha);
    const double k = specfun::bessel_k(specfun::BesselOrder(eta), r);
    return std::pow(r, eta) * k / c;
}

namespace {

// Adaptive Simpson over a generic integrand.
template <typename F>
double simpson_rec(const F& f, double a, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth) {
    if (depth > 60) throw AccuracyError("quadrature did not converge");
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

template <typename F>
double adaptive_integral(const F& f, double a, double b, double rel_tol) {
    const int panels = std::max(8, static_cast<int>(std::ceil(b - a)));
    double crude = 0.0;
    for (int i = 0; i < panels; ++i) crude += std::fabs(f(a + (i + 0.5) * (b - a) / panels));
    crude *= (b - a) / panels;
    const double tol = std::max(crude, 1e-300) * rel_tol;
    double total = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double x0 = a + i * (b - a) / panels;
        const double x1 = a + (i + 1) * (b - a) / panels;
        const double m = 0.5 * (x0 + x1);
        const double f0 = f(x0), fm = f(m), f1 = f(x1);
        const double whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        total += simpson_rec(f, x0, x1, f0, fm, f1, whole, tol / panels, 0);
    }
    return total;
}

}  // namespace

double stein_integral_oracle(double alpha, int d, double r) {
    if (!(alpha > 0.0)) throw DomainError("stein_integral_oracle: alpha must be > 0");
    if (d < 1) throw DomainError("stein_integral_oracle: d must be >= 1");
    if (!(r > 0.0)) throw DomainError("stein_integral_oracle: r must be > 0");

    // After u = e^t the integrand decays double-exponentially on both sides.
    const double half_diff = 0.5 * (alpha - d);
    const auto log_h = [&](double t) {
        return -kPi * r * r * std::exp(-t) - std::exp(t) / (4.0 * kPi) + half_diff * t;
    };
    double peak = log_h(0.0);
    for (double t = -30.0; t <= 30.0; t += 0.25) peak = std::max(peak, log_h(t));
    double lo = -1.0, hi = 1.0;
    while (log_h(lo) > peak - 46.0) {
        lo -= 1.0;
        if (lo < -700.0) throw AccuracyError("stein_integral_oracle: tail did not decay");
    }
    while (log_h(hi) > peak - 46.0) {
        hi += 1.0;
        if (hi > 700.0) throw AccuracyError("stein_integral_oracle: tail did not decay");
    }
    const auto h = [&](double t) { return std::exp(log_h(t)); };
    const double integral = adaptive_integral(h, lo, hi, 1e-11);
    return integral / (std::pow(4.0 * kPi, 0.5 * alpha) * specfun::gamma_fn(0.5 * alpha));
}

// ---------------------------------------------------------------------------

SchoenbergSeries::SchoenbergSeries(int sphere_dim_, std::vector<double> coeffs_, double scale_)
    : sphere_dim(sphere_dim_), lambda(0.5 * (sphere_dim_ - 1)), coeffs(std::move(coeffs_)),
      scale(scale_) {
    if (sphere_dim < 2) throw ValidationError("SchoenbergSeries: sphere_dim must be >= 2");
    if (!(scale > 0.0)) throw ValidationError("SchoenbergSeries: scale must be > 0");
    if (coeffs.empty()) throw ValidationError("SchoenbergSeries: empty coefficient sequence");
    if (coeffs.size() > 10000) throw ConfigError("SchoenbergSeries: more than 10^4 coefficients");
    double sum = 0.0;
    for (std::size_t n = 0; n < coeffs.size(); ++n) {
        if (!(coeffs[n] >= 0.0))
            throw ValidationError(
                "SchoenbergSeries: negative coefficient at index " + std::to_string(n),
                static_cast<long>(n));
        sum += coeffs[n];
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw ValidationError("SchoenbergSeries: coefficients must sum to 1 (got " +
                              std::to_string(sum) + ")");
}

namespace {

// Shared (BS)/(BP) accumulation.  `phi` supplies the temporal factor per
// index n; the plain spherical series passes exact 1.0 so both routes add
// identical terms and agree bit-for-bit at t = 0.
template <typename Phi>
double gegenbauer_mixture(const SchoenbergSeries& s, double u, const Phi& phi) {
    if (!(u >= -1.0 && u <= 1.0)) throw DomainError("series argument u must lie in [-1,1]");
    double sum = 0.0;
    double p_prev = 1.0;                     // P_0
    double p_cur = 2.0 * s.lambda * u;       // P_1
    for (std::size_t n = 0; n < s.coeffs.size(); ++n) {
        const double pn = (n == 0) ? 1.0 : (n == 1 ? p_cur : [&] {
            const double k = static_cast<double>(n);
            const double next =
                (2.0 * u * (k + s.lambda - 1.0) * p_cur - (k + 2.0 * s.lambda - 2.0) * p_prev) / k;
            p_prev = p_cur;
            p_cur = next;
            return next;
        }());
        sum += s.coeffs[n] * pn * phi(n);
    }
    return s.scale * sum;
}

}  // namespace

double schoenberg_eval(const SchoenbergSeries& s, double u) {
    return gegenbauer_mixture(s, u, [](std::size_t) { return 1.0; });
}

// ---------------------------------------------------------------------------

CharFunction CharFunction::gaussian(double sigma2) {
    if (!(sigma2 > 0.0)) throw ValidationError("CharFunction::gaussian: sigma2 must be > 0");
    return CharFunction(Kind::gaussian, {sigma2});
}

CharFunction CharFunction::cauchy(double gamma) {
    if (!(gamma > 0.0)) throw ValidationError("CharFunction::cauchy: gamma must be > 0");
    return CharFunction(Kind::cauchy, {gamma});
}

CharFunction CharFunction::student_spectral(double nu, double kappa) {
    if (!(nu > 0.0) || !(kappa > 0.0))
        throw ValidationError("CharFunction::student_spectral: nu and kappa must be > 0");
    return CharFunction(Kind::student_spectral, {nu, kappa});
}

CharFunction CharFunction::tabulated(std::vector<double> t, std::vector<double> value) {
    if (t.size() != value.size() || t.size() < 2)
        throw ValidationError("CharFunction::tabulated: need matching grids with >= 2 knots");
    if (t.front() != 0.0 || value.front() != 1.0)
        throw ValidationError("CharFunction::tabulated: grid must start at t=0 with value 1");
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
        if (!(t[i] < t[i + 1]))
            throw ValidationError("CharFunction::tabulated: t grid must be strictly increasing");
    for (std::size_t i = 0; i < value.size(); ++i)
        if (!(std::fabs(value[i]) <= 1.0))
            throw ValidationError("CharFunction::tabulated: |value| must be <= 1 at index " +
                                      std::to_string(i),
                                  static_cast<long>(i));
    CharFunction cf(Kind::tabulated, {});
    cf.grid_t_ = std::move(t);
    cf.grid_v_ = std::move(value);
    return cf;
}

double CharFunction::operator()(double t) const {
    switch (kind_) {
        case Kind::gaussian:
            return std::exp(-0.5 * params_[0] * t * t);
        case Kind::cauchy:
            return std::exp(-params_[0] * std::fabs(t));
        case Kind::student_spectral:
            return matern_correlation(MaternParams(params_[0], params_[1], 1.0, 1),
                                      std::fabs(t));
        case Kind::tabulated: {
            const double at = std::fabs(t);
            if (at >= grid_t_.back()) return grid_v_.back();
            const auto it = std::upper_bound(grid_t_.begin(), grid_t_.end(), at);
            const std::size_t hi = static_cast<std::size_t>(it - grid_t_.begin());
            if (hi == 0) return grid_v_.front();
            const double w = (at - grid_t_[hi - 1]) / (grid_t_[hi] - grid_t_[hi - 1]);
            return grid_v_[hi - 1] + w * (grid_v_[hi] - grid_v_[hi - 1]);
        }
    }
    throw DomainError("CharFunction: unknown kind");
}

GeoTemporalModel::GeoTemporalModel(SchoenbergSeries series_, std::vector<CharFunction> cfs_)
    : series(std::move(series_)), cfs(std::move(cfs_)) {
    if (cfs.size() != 1 && cfs.size() != series.coeffs.size())
        throw ValidationError("GeoTemporalModel: need one shared cf or one per coefficient");
}

double berg_porcu_eval(const GeoTemporalModel& m, double u, double t) {
    if (m.cfs.size() == 1) {
        const CharFunction& cf = m.cfs.front();
        return gegenbauer_mixture(m.series, u, [&](std::size_t) { return cf(t); });
    }
    return gegenbauer_mixture(m.series, u, [&](std::size_t n) { return m.cfs[n](t); });
}

// ---------------------------------------------------------------------------

double MaternCov::eval(const Location& a, const Location& b) const {
    return p_.sigma2 * matern_correlation(p_, euclid_distance(a, b));
}

std::string MaternCov::describe() const {
    std::ostringstream os;
    os << "matern(nu=" << p_.nu << ",kappa=" << p_.kappa << ",sigma2=" << p_.sigma2
       << ",d=" << p_.d << ")";
    return os.str();
}

double SchoenbergCov::eval(const Location& a, const Location& b) const {
    return schoenberg_eval(s_, sphere_cosine(a, b));
}

std::string SchoenbergCov::describe() const {
    std::ostringstream os;
    os << "schoenberg(S^" << s_.sphere_dim << ",n=" << s_.coeffs.size() << ")";
    return os.str();
}

double BergPorcuCov::eval(const Location& a, const Location& b) const {
    return berg_porcu_eval(m_, sphere_cosine(a, b), a.t - b.t);
}

std::string BergPorcuCov::describe() const {
    std::ostringstream os;
    os << "berg_porcu(S^" << m_.series.sphere_dim << ",n=" << m_.series.coeffs.size() << ")";
    return os.str();
}

std::string CharFunctionCov::describe() const { return "char_function"; }

int SchurProductCov::spatial_dim() const {
    const int fd = f_->spatial_dim();
    return fd > 0 ? fd : g_->spatial_dim();
}

std::string SchurProductCov::describe() const {
    return "schur(" + f_->describe() + "," + g_->describe() + ")";
}

CovariancePtr make_matern(const MaternParams& p) { return std::make_shared<MaternCov>(p); }

CovariancePtr make_schoenberg(SchoenbergSeries s) {
    return std::make_shared<SchoenbergCov>(std::move(s));
}

CovariancePtr make_berg_porcu(GeoTemporalModel m) {
    return std::make_shared<BergPorcuCov>(std::move(m));
}

CovariancePtr make_char_function_cov(CharFunction cf) {
    return std::make_shared<CharFunctionCov>(std::move(cf));
}

CovariancePtr schur_product(CovariancePtr f, CovariancePtr g) {
    if (!f || !g) throw ConfigError("schur_product: null factor");
    const Metric mf = f->metric();
    const Metric mg = g->metric();
    Metric joined;
    if (mf == mg) {
        joined = mf;
        if (f->spatial_dim() > 0 && g->spatial_dim() > 0 && f->spatial_dim() != g->spatial_dim())
            throw ConfigError("schur_product: factors disagree on spatial dimension");
    } else if ((mf == Metric::euclidean || mf == Metric::sphere_cosine) && mg == Metric::time) {
        joined = Metric::spacetime;
    } else if ((mg == Metric::euclidean || mg == Metric::sphere_cosine) && mf == Metric::time) {
        joined = Metric::spacetime;
    } else {
        throw ConfigError("schur_product: factors live on incompatible domains");
    }
    return std::make_shared<SchurProductCov>(std::move(f), std::move(g), joined);
}

DenseMatrix covariance_matrix(const Covariance& model, const std::vector<Location>& points,
                              Metric metric) {
    if (points.empty()) throw DomainError("covariance_matrix: empty point set");
    if (metric != model.metric())
        throw ConfigError("covariance_matrix: metric does not match the model domain");
    const int dim = model.spatial_dim();
    for (const Location& p : points)
        if (dim > 0 && static_cast<int>(p.x.size()) != dim)
            throw ConfigError("covariance_matrix: point dimension does not match the model");
    const int n = static_cast<int>(points.size());
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            const double v = model.eval(points[i], points[j]);
            m(i, j) = v;
            m(j, i) = v;
        }
    return m;
}

namespace {

bool chol_succeeds(const DenseMatrix& m) {
    try {
        dense_cholesky(m);
        return true;
    } catch (const FactorizationError&) {
        return false;
    }
}

DenseMatrix shifted(const DenseMatrix& m, double s) {
    DenseMatrix out = m;
    for (int i = 0; i < m.rows(); ++i) out(i, i) += s;
    return out;
}

}  // namespace

PdReport check_positive_definite(const DenseMatrix& m) {
    if (m.rows() != m.cols()) throw DomainError("check_positive_definite: matrix must be square");
    if (!m.is_symmetric(1e-12))
        throw DomainError("check_positive_definite: matrix is not symmetric within 1e-12");
    const int n = m.rows();
    double inf_norm = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += std::fabs(m(i, j));
        inf_norm = std::max(inf_norm, row);
    }
    const double tol = 1e-10 * std::max(m.max_abs(), 1e-300);
    const bool ok = chol_succeeds(shifted(m, tol));

    // Gershgorin brackets the spectrum; bisect the shift at which the
    // factorization starts succeeding.
    double lo = -(inf_norm + 1.0);  // min eig candidate (pd at -lo certainly)
    double hi = inf_norm + 1.0;
    for (int it = 0; it < 60 && hi - lo > 1e-14 * (inf_norm + 1.0); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (chol_succeeds(shifted(m, -mid)))
            lo = mid;  // still pd when subtracting mid: min eig > mid
        else
            hi = mid;
    }
    return PdReport{ok, 0.5 * (lo + hi)};
}

}  // namespace grf::cov
