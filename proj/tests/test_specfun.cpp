#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "grf/rng.hpp"
#include "grf/specfun.hpp"

using grf::specfun::BesselOrder;
using grf::specfun::bessel_i;
using grf::specfun::bessel_k;
using grf::specfun::bessel_k_oracle;
using grf::specfun::gamma_fn;
using grf::specfun::gegenbauer;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Quadrature oracle for the Gamma integral: Gamma(x) = int e^{x s - e^s} ds
// after t = e^s.  Composite Simpson, fine enough for ~1e-11.
double gamma_quadrature(double x) {
    const double lo = std::min(-80.0, -35.0 / x), hi = 12.0, h = 0.002;
    const int n = static_cast<int>((hi - lo) / h);
    auto f = [x](double s) { return std::exp(x * s - std::exp(s)); };
    double sum = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) sum += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

// Direct, naive summation of the I_nu series with per-term tgamma calls;
// deliberately independent of the library's ratio-recurrence route.
double i_series_naive(double nu, double z) {
    double sum = 0.0;
    for (int m = 0; m < 200; ++m) {
        const double term =
            std::pow(z / 2.0, nu + 2.0 * m) / (std::tgamma(m + 1.0) * std::tgamma(nu + m + 1.0));
        sum += term;
        if (m > 5 && std::fabs(term) < 1e-18 * std::fabs(sum)) break;
    }
    return sum;
}

}  // namespace

TEST_CASE("gamma function basics") {
    CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-14));
    // Gamma(1/2) = sqrt(pi), cross-checked against the integral definition.
    CHECK(gamma_fn(0.5) == doctest::Approx(1.7724538509055160).epsilon(1e-13));
    CHECK(gamma_fn(0.5) == doctest::Approx(gamma_quadrature(0.5)).epsilon(1e-10));
    CHECK(gamma_fn(7.25) == doctest::Approx(gamma_quadrature(7.25)).epsilon(1e-10));
    CHECK_THROWS_AS(gamma_fn(0.0), grf::DomainError);
    CHECK_THROWS_AS(gamma_fn(-1.3), grf::DomainError);
}

TEST_CASE("gamma 12 significant digits on (0, 50]") {
    for (double x = 0.125; x <= 50.0; x += 0.5) {
        CHECK(gamma_fn(x) == doctest::Approx(gamma_quadrature(x)).epsilon(5e-11));
    }
}

TEST_CASE("bessel_i series values") {
    // nu=0, z->0+: only the m=0 term survives.
    CHECK(bessel_i(BesselOrder(0.0), 1e-12) == doctest::Approx(1.0).epsilon(1e-12));
    // Frozen value obtained from the series oracle below.
    CHECK(bessel_i(BesselOrder(1.0), 1.0) == doctest::Approx(0.5651591039924850).epsilon(1e-13));
    CHECK(bessel_i(BesselOrder(1.0), 1.0) ==
          doctest::Approx(i_series_naive(1.0, 1.0)).epsilon(1e-13));
    // Half-integer closed form I_{1/2}(z) = sqrt(2/(pi z)) sinh z.
    const double closed = std::sqrt(2.0 / (kPi * 2.0)) * std::sinh(2.0);
    CHECK(bessel_i(BesselOrder(0.5), 2.0) == doctest::Approx(closed).epsilon(1e-12));
    CHECK_THROWS_AS(bessel_i(BesselOrder(1.0), 0.0), grf::DomainError);
    CHECK_THROWS_AS(bessel_i(BesselOrder(1.0), -2.0), grf::DomainError);
}

TEST_CASE("bessel_i independent series oracle across orders") {
    const std::vector<double> orders{0.0, 0.3, 0.5, 1.0, 2.7, 4.0, -0.3, -1.6, 6.5};
    const std::vector<double> args{0.05, 0.37, 1.0, 2.9, 7.3};
    for (double nu : orders)
        for (double z : args)
            CHECK(bessel_i(BesselOrder(nu), z) ==
                  doctest::Approx(i_series_naive(nu, z)).epsilon(1e-12));
    // Negative integer order folds onto the positive one.
    CHECK(bessel_i(BesselOrder(-2.0), 1.7) == bessel_i(BesselOrder(2.0), 1.7));
}

TEST_CASE("bessel_k closed forms and small-argument behavior") {
    // K_{1/2}(z) = sqrt(pi/(2z)) e^{-z}
    CHECK(bessel_k(BesselOrder(0.5), 1.0) ==
          doctest::Approx(0.4610685044478946).epsilon(1e-12));
    for (double z : {0.01, 0.2, 1.0, 1.99, 2.01, 5.0, 11.9, 12.1, 20.0, 28.0}) {
        const double k_half = std::sqrt(kPi / (2.0 * z)) * std::exp(-z);
        const double k_three_half = k_half * (1.0 + 1.0 / z);
        const double k_five_half = k_half * (1.0 + 3.0 / z + 3.0 / (z * z));
        CHECK(bessel_k(BesselOrder(0.5), z) == doctest::Approx(k_half).epsilon(1e-11));
        CHECK(bessel_k(BesselOrder(1.5), z) == doctest::Approx(k_three_half).epsilon(1e-11));
        CHECK(bessel_k(BesselOrder(2.5), z) == doctest::Approx(k_five_half).epsilon(1e-11));
    }
    // K_0(z) ~ log(1/z) near the origin.
    const double k0 = bessel_k(BesselOrder(0.0), 1e-4);
    CHECK(std::fabs(k0 - std::log(1e4)) / std::log(1e4) < 0.05);
    CHECK_THROWS_AS(bessel_k(BesselOrder(1.0), 0.0), grf::DomainError);
    CHECK_THROWS_AS(bessel_k(BesselOrder(1.0), -1.0), grf::DomainError);
    // Extreme order at tiny argument overflows explicitly, never silently.
    CHECK_THROWS_AS(bessel_k(BesselOrder(80.0), 1e-8), grf::OverflowError);
}

TEST_CASE("bessel_k evenness in the order is bit-exact") {
    const grf::rng::CounterRng gen(1234, 0);
    for (int i = 0; i < 200; ++i) {
        const double nu = -5.0 + 10.0 * gen.uniform(2 * i);
        const double z = 1e-6 + 20.0 * gen.uniform(2 * i + 1);
        CHECK(bessel_k(BesselOrder(nu), z) == bessel_k(BesselOrder(-nu), z));
    }
    CHECK(bessel_k(BesselOrder(1.3), 2.0) == bessel_k(BesselOrder(-1.3), 2.0));
    CHECK(bessel_k(BesselOrder(2.0), 3.0) == bessel_k(BesselOrder(-2.0), 3.0));
}

TEST_CASE("bessel_k strictly decreasing in z") {
    for (double nu : {0.0, 0.3, 1.0, 1.5, 2.2, 4.9}) {
        double prev = bessel_k(BesselOrder(nu), 0.01);
        for (double z = 0.06; z <= 30.0; z += 0.05) {
            const double cur = bessel_k(BesselOrder(nu), z);
            CHECK(cur < prev);
            prev = cur;
        }
    }
}

TEST_CASE("bessel_k agrees with the quadrature oracle over the domain box") {
    // nu in [0,5] including integers, z in [0.01, 20] log-spaced.
    std::vector<double> orders;
    for (double nu = 0.0; nu <= 5.0 + 1e-12; nu += 0.25) orders.push_back(nu);
    std::vector<double> args;
    for (int i = 0; i <= 24; ++i) args.push_back(0.01 * std::pow(2000.0, i / 24.0));
    for (double nu : orders)
        for (double z : args) {
            const double a = bessel_k(BesselOrder(nu), z);
            const double b = bessel_k_oracle(BesselOrder(nu), z);
            CHECK(std::fabs(a - b) / b <= 1e-9);
        }
}

TEST_CASE("bessel_k_oracle basics") {
    CHECK(bessel_k_oracle(BesselOrder(0.5), 1.0) ==
          doctest::Approx(0.4610685044478946).epsilon(1e-9));
    CHECK(bessel_k_oracle(BesselOrder(2.0), 3.0) ==
          doctest::Approx(bessel_k(BesselOrder(2.0), 3.0)).epsilon(1e-9));
    CHECK(bessel_k_oracle(BesselOrder(-2.0), 3.0) == bessel_k_oracle(BesselOrder(2.0), 3.0));
    CHECK_THROWS_AS(bessel_k_oracle(BesselOrder(1.0), -0.5), grf::DomainError);
}

TEST_CASE("near-integer orders stay consistent across branches") {
    // Temme path (inside the 1e-5 window) against the series-difference
    // path just outside it, plus the quadrature oracle at integers.
    for (double z : {0.05, 0.4, 1.2, 1.9}) {
        for (int n : {0, 1, 2, 3}) {
            const double at_int = bessel_k(BesselOrder(static_cast<double>(n)), z);
            const double nearby = bessel_k(BesselOrder(n + 2e-5), z);
            CHECK(at_int == doctest::Approx(nearby).epsilon(5e-4));
            CHECK(at_int ==
                  doctest::Approx(bessel_k_oracle(BesselOrder(static_cast<double>(n)), z))
                      .epsilon(1e-10));
        }
    }
}

namespace {

// Brute-force polynomial expansion of P_n^lambda by recurrence on the
// coefficient arrays, evaluated by Horner.
std::vector<double> gegenbauer_coeffs(int n, double lambda) {
    std::vector<std::vector<double>> p(n + 1);
    p[0] = {1.0};
    if (n >= 1) p[1] = {0.0, 2.0 * lambda};
    for (int k = 2; k <= n; ++k) {
        p[k].assign(k + 1, 0.0);
        for (int j = 0; j + 1 <= k; ++j) p[k][j + 1] += 2.0 * (k + lambda - 1.0) * p[k - 1][j] / k;
        for (int j = 0; j <= k - 2; ++j) p[k][j] -= (k + 2.0 * lambda - 2.0) * p[k - 2][j] / k;
    }
    return p[n];
}

double horner(const std::vector<double>& c, double u) {
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * u + *it;
    return v;
}

}  // namespace

TEST_CASE("gegenbauer polynomial values") {
    const grf::rng::CounterRng gen(77, 0);
    CHECK(gegenbauer(0, 0.5, -0.7) == 1.0);
    CHECK(gegenbauer(0, 3.0, 0.2) == 1.0);
    CHECK(gegenbauer(1, 0.5, 0.3) == doctest::Approx(0.3).epsilon(1e-15));
    // Degree-4 brute-force expansion oracle at 20 random arguments.
    const std::vector<double> c4 = gegenbauer_coeffs(4, 1.5);
    for (int i = 0; i < 20; ++i) {
        const double u = -1.0 + 2.0 * gen.uniform(i);
        CHECK(gegenbauer(4, 1.5, u) == doctest::Approx(horner(c4, u)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(gegenbauer(3, 0.5, 1.2), grf::DomainError);
    CHECK_THROWS_AS(gegenbauer(3, 0.5, -1.0000001), grf::DomainError);
    CHECK_THROWS_AS(gegenbauer(-1, 0.5, 0.0), grf::DomainError);
    CHECK_THROWS_AS(gegenbauer(3, 0.0, 0.0), grf::DomainError);
}

TEST_CASE("gegenbauer boundedness by the value at 1") {
    const grf::rng::CounterRng gen(78, 0);
    for (double lambda : {0.5, 1.0, 1.5, 2.0})
        for (int n : {1, 2, 5, 13, 27, 50}) {
            const double at_one = gegenbauer(n, lambda, 1.0);
            for (int i = 0; i < 40; ++i) {
                const double u = -1.0 + 2.0 * gen.uniform(n * 100 + i);
                CHECK(std::fabs(gegenbauer(n, lambda, u)) <= at_one * (1.0 + 1e-12));
            }
            CHECK(std::fabs(gegenbauer(n, lambda, -1.0)) <= at_one * (1.0 + 1e-12));
        }
}

TEST_CASE("gegenbauer three-term recurrence residual") {
    const grf::rng::CounterRng gen(79, 0);
    for (double lambda : {0.5, 1.0, 1.7}) {
        for (int i = 0; i < 25; ++i) {
            const double u = -1.0 + 2.0 * gen.uniform(i);
            for (int n = 2; n <= 50; ++n) {
                const double pn = gegenbauer(n, lambda, u);
                const double p1 = gegenbauer(n - 1, lambda, u);
                const double p2 = gegenbauer(n - 2, lambda, u);
                const double rhs = (2.0 * u * (n + lambda - 1.0) * p1 -
                                    (n + 2.0 * lambda - 2.0) * p2) / n;
                const double scale = std::max({std::fabs(pn), std::fabs(p1), 1.0});
                CHECK(std::fabs(pn - rhs) <= 1e-10 * scale);
            }
        }
    }
}
