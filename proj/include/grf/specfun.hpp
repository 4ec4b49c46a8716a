#ifndef GRF_SPECFUN_HPP
#define GRF_SPECFUN_HPP

#include <cmath>

#include "grf/errors.hpp"

namespace grf::specfun {

// Order of a modified Bessel function.  May be negative or zero; K is even
// in the order and evaluation canonicalizes to |nu| so K(-nu,z) == K(nu,z)
// holds bit-exactly.
struct BesselOrder {
    double nu;

    BesselOrder(double nu_) : nu(nu_) {
        if (!std::isfinite(nu)) throw DomainError("BesselOrder: order must be finite");
    }
};

// Gamma function on the positive half-line.
double gamma_fn(double x);

// Modified Bessel function of the first kind I_nu(z), z > 0, by its power
// series, truncated at relative term < 1e-16 (at most 500 terms).
double bessel_i(BesselOrder nu, double z);

// Macdonald function K_nu(z), z > 0.  Strictly positive, strictly decreasing
// in z, K_{-nu} = K_nu.  Throws OverflowError when the value exceeds double
// range instead of returning infinity.
double bessel_k(BesselOrder nu, double z);

// Independent check for bessel_k: adaptive quadrature of the integral
// representation K_nu(z) = 1/2 int_0^inf u^nu exp(-z(u+1/u)/2) du/u,
// evaluated after the substitution u = e^t.  Agrees with bessel_k to 1e-9
// relative on nu in [0,5], z in [0.01,20].
double bessel_k_oracle(BesselOrder nu, double z);

// Gegenbauer (ultraspherical) polynomial P_n^lambda(u) for u in [-1,1],
// lambda > 0, by the three-term forward recurrence
//   n P_n = 2u(n+lambda-1) P_{n-1} - (n+2lambda-2) P_{n-2}.
double gegenbauer(int n, double lambda, double u);

}  // namespace grf::specfun

#endif  // GRF_SPECFUN_HPP
