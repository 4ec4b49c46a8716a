#ifndef GRF_COVARIANCE_HPP
#define GRF_COVARIANCE_HPP

#include <memory>
#include <string>
#include <vector>

#include "grf/dense.hpp"
#include "grf/errors.hpp"

namespace grf::cov {

// ---------------------------------------------------------------------------
// Matern family on R^d
// ---------------------------------------------------------------------------

// Parameter bundle of the Matern family.  The smoothness nu doubles as the
// Bessel-potential exponent eta, with alpha = 2 nu + d (> d always).
struct MaternParams {
    double nu;      // smoothness
    double kappa;   // scale
    double sigma2;  // variance
    int d;          // ambient dimension

    MaternParams(double nu_, double kappa_, double sigma2_, int d_);

    double eta() const { return nu; }
    double alpha() const { return 2.0 * nu + d; }
};

// Matern correlation rho_nu(r) = 2^{1-nu}/Gamma(nu) (kappa r)^nu K_nu(kappa r),
// normalized so rho(0) = 1.  Returns 0 once kappa*r is past the double
// underflow horizon (~700).
double matern_correlation(const MaternParams& p, double r);

// Isotropic spectral density of the Matern correlation, normalized to a
// probability density on R^d:
//   f(w) = Gamma(nu+d/2) kappa^{2nu} / (pi^{d/2} Gamma(nu)) (kappa^2+w^2)^{-(nu+d/2)}
double matern_spectral_density(const MaternParams& p, double w);

// SPDE-normalized Matern covariance kernel
//   C(r) = sigma^2 / (Gamma(nu+d/2) (4 pi)^{d/2} kappa^{2 nu} 2^{nu-1})
//          * (kappa r)^nu K_nu(kappa r),
// the convolution kernel of Whittle's representation.  Proportional to
// matern_correlation with an r-independent constant.
double matern_covariance(const MaternParams& p, double r);

// Bessel-potential kernel G_alpha(r) = r^eta K_eta(r) / c_eta with
// eta = (alpha-d)/2 and c_eta = 2^{(d+alpha-2)/2} pi^{d/2} Gamma(alpha/2).
double bessel_potential_kernel(double alpha, int d, double r);

// Independent route to G_alpha: adaptive quadrature of
//   (4 pi)^{-alpha/2}/Gamma(alpha/2) int_0^inf e^{-pi r^2/u} e^{-u/4pi} u^{(alpha-d)/2} du/u.
double stein_integral_oracle(double alpha, int d, double r);

// ---------------------------------------------------------------------------
// Spherical and geotemporal families
// ---------------------------------------------------------------------------

// Nonnegative Gegenbauer mixture on the sphere S^sphere_dim:
//   u -> scale * sum_n coeffs[n] P_n^lambda(u),  lambda = (sphere_dim-1)/2.
// Coefficients must be nonnegative and sum to 1 within 1e-12.
struct SchoenbergSeries {
    int sphere_dim;
    double lambda;
    std::vector<double> coeffs;
    double scale;

    SchoenbergSeries(int sphere_dim_, std::vector<double> coeffs_, double scale_);
};

double schoenberg_eval(const SchoenbergSeries& s, double u);

// Characteristic function on the line; the temporal factor of geotemporal
// models.  All kinds satisfy phi(0) == 1 exactly and |phi| <= 1.
class CharFunction {
  public:
    enum class Kind { gaussian, cauchy, student_spectral, tabulated };

    static CharFunction gaussian(double sigma2);
    static CharFunction cauchy(double gamma);
    static CharFunction student_spectral(double nu, double kappa);
    // Grid of (t, value) pairs, t ascending from 0 with value 1 there;
    // evaluated at |t| by linear interpolation, held constant past the grid.
    static CharFunction tabulated(std::vector<double> t, std::vector<double> value);

    double operator()(double t) const;

    Kind kind() const { return kind_; }
    const std::vector<double>& params() const { return params_; }
    const std::vector<double>& grid_t() const { return grid_t_; }
    const std::vector<double>& grid_v() const { return grid_v_; }

  private:
    CharFunction(Kind k, std::vector<double> params) : kind_(k), params_(std::move(params)) {}
    Kind kind_;
    std::vector<double> params_;
    std::vector<double> grid_t_, grid_v_;
};

// Geotemporal mixture: scale * sum_n a_n P_n^lambda(u) phi_n(t).
// A single CharFunction shared across all n is the separable case.
struct GeoTemporalModel {
    SchoenbergSeries series;
    std::vector<CharFunction> cfs;  // size 1 or coeffs.size()

    GeoTemporalModel(SchoenbergSeries series_, std::vector<CharFunction> cfs_);
};

// Reduces bit-exactly to schoenberg_eval(series, u) at t = 0.
double berg_porcu_eval(const GeoTemporalModel& m, double u, double t);

// ---------------------------------------------------------------------------
// Covariance evaluators and Gram-matrix assembly
// ---------------------------------------------------------------------------

enum class Metric { euclidean, sphere_cosine, time, spacetime };

// A site: spatial coordinates (Euclidean coordinates, or an embedded unit
// vector for sphere models) plus a time coordinate for geotemporal models.
struct Location {
    std::vector<double> x;
    double t = 0.0;
};

class Covariance {
  public:
    virtual ~Covariance() = default;
    virtual double eval(const Location& a, const Location& b) const = 0;
    virtual double variance() const = 0;
    virtual Metric metric() const = 0;
    virtual int spatial_dim() const { return -1; }  // -1: unconstrained
    virtual std::string describe() const = 0;
};

using CovariancePtr = std::shared_ptr<const Covariance>;

CovariancePtr make_matern(const MaternParams& p);            // sigma^2 * rho_nu, Euclidean
CovariancePtr make_schoenberg(SchoenbergSeries s);           // sphere, u = cos(angle)
CovariancePtr make_berg_porcu(GeoTemporalModel m);           // sphere x time
CovariancePtr make_char_function_cov(CharFunction cf);       // time axis only

// Pointwise product of two covariance evaluators (Schur product).  Factors
// must live on the same domain, or combine a spatial factor with a time
// factor into a spacetime model; anything else is a configuration error.
CovariancePtr schur_product(CovariancePtr f, CovariancePtr g);

// Dense Gram matrix of `model` on `points`; `metric` must match the model's
// domain.  Symmetric by construction and bit-deterministic.
DenseMatrix covariance_matrix(const Covariance& model, const std::vector<Location>& points,
                              Metric metric);

struct PdReport {
    bool positive_definite;
    double min_eigenvalue;  // bisection estimate
};

// True iff Cholesky succeeds after the -1e-10*|M| pivot allowance; also
// reports a min-eigenvalue estimate located by bisection on the shift.
PdReport check_positive_definite(const DenseMatrix& m);

// Concrete models, exposed so serialization can recover their parameters.

class MaternCov final : public Covariance {
  public:
    explicit MaternCov(const MaternParams& p) : p_(p) {}
    double eval(const Location& a, const Location& b) const override;
    double variance() const override { return p_.sigma2; }
    Metric metric() const override { return Metric::euclidean; }
    int spatial_dim() const override { return p_.d; }
    std::string describe() const override;
    const MaternParams& params() const { return p_; }

  private:
    MaternParams p_;
};

class SchoenbergCov final : public Covariance {
  public:
    explicit SchoenbergCov(SchoenbergSeries s) : s_(std::move(s)) {}
    double eval(const Location& a, const Location& b) const override;
    double variance() const override { return schoenberg_eval(s_, 1.0); }
    Metric metric() const override { return Metric::sphere_cosine; }
    int spatial_dim() const override { return s_.sphere_dim + 1; }  // embedding dim
    std::string describe() const override;
    const SchoenbergSeries& series() const { return s_; }

  private:
    SchoenbergSeries s_;
};

class BergPorcuCov final : public Covariance {
  public:
    explicit BergPorcuCov(GeoTemporalModel m) : m_(std::move(m)) {}
    double eval(const Location& a, const Location& b) const override;
    double variance() const override { return berg_porcu_eval(m_, 1.0, 0.0); }
    Metric metric() const override { return Metric::spacetime; }
    int spatial_dim() const override { return m_.series.sphere_dim + 1; }
    std::string describe() const override;
    const GeoTemporalModel& model() const { return m_; }

  private:
    GeoTemporalModel m_;
};

class CharFunctionCov final : public Covariance {
  public:
    explicit CharFunctionCov(CharFunction cf) : cf_(std::move(cf)) {}
    double eval(const Location& a, const Location& b) const override { return cf_(a.t - b.t); }
    double variance() const override { return 1.0; }
    Metric metric() const override { return Metric::time; }
    std::string describe() const override;
    const CharFunction& cf() const { return cf_; }

  private:
    CharFunction cf_;
};

class SchurProductCov final : public Covariance {
  public:
    SchurProductCov(CovariancePtr f, CovariancePtr g, Metric joined)
        : f_(std::move(f)), g_(std::move(g)), metric_(joined) {}
    double eval(const Location& a, const Location& b) const override {
        return f_->eval(a, b) * g_->eval(a, b);
    }
    double variance() const override { return f_->variance() * g_->variance(); }
    Metric metric() const override { return metric_; }
    int spatial_dim() const override;
    std::string describe() const override;
    const CovariancePtr& left() const { return f_; }
    const CovariancePtr& right() const { return g_; }

  private:
    CovariancePtr f_, g_;
    Metric metric_;
};

}  // namespace grf::cov

#endif  // GRF_COVARIANCE_HPP
