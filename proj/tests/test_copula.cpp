#include <stdexcept>
#include <doctest.h>

#include "cchr/copula.hpp"
#include "cchr/normal.hpp"
#include "cchr/sim_engine.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/owens_t.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace cchr;

namespace {

// representative tau per family (sign admissible)
double moderate_tau(CopulaFamily f) {
  auto r = tau_range(f);
  return r.upper > 0.0 ? 0.3 : -0.3;
}

// tau = 1 - 4 * integral of zeta_1 * zeta_2 over the unit square.
double tau_by_quadrature(const CopulaSpec& s) {
  using boost::math::quadrature::gauss_kronrod;
  auto inner = [&](double u) {
    return gauss_kronrod<double, 31>::integrate(
        [&](double v) { return partial_u(s, u, v) * partial_v(s, u, v); }, 0.0, 1.0, 8, 1e-12);
  };
  return 1.0 - 4.0 * gauss_kronrod<double, 31>::integrate(inner, 0.0, 1.0, 8, 1e-12);
}

// Owen's T construction of the bivariate normal CDF (h, k nonzero).
double bvn_owen(double h, double k, double rho) {
  using boost::math::owens_t;
  const double s = std::sqrt(1.0 - rho * rho);
  const double ah = (k - rho * h) / (h * s);
  const double ak = (h - rho * k) / (k * s);
  const double beta = h * k < 0.0 ? 0.5 : 0.0;
  return 0.5 * normal_cdf(h) + 0.5 * normal_cdf(k) - owens_t(h, ah) - owens_t(k, ak) - beta;
}

}  // namespace

TEST_SUITE("copula") {

TEST_CASE("family names round trip") {
  for (auto f : parametric_copula_families()) CHECK(parse_copula_family(to_string(f)) == f);
  CHECK(parse_copula_family("independence") == CopulaFamily::independence);
  CHECK_THROWS_AS(parse_copula_family("clayton"), std::invalid_argument);
}

TEST_CASE("parameter domains") {
  CHECK_NOTHROW(make_copula(CopulaFamily::frank, 0.0));
  CHECK_THROWS_AS(make_copula(CopulaFamily::gumbel, 0.5), std::domain_error);
  CHECK_THROWS_AS(make_copula(CopulaFamily::gaussian, 1.0), std::domain_error);
  CHECK_THROWS_AS(make_copula(CopulaFamily::clayton90, 0.0), std::domain_error);
  CHECK_THROWS_AS(xi_from_tau(CopulaFamily::clayton90, 0.25), std::domain_error);
  CHECK_THROWS_AS(xi_from_tau(CopulaFamily::gumbel, -0.1), std::domain_error);
}

TEST_CASE("independence copula") {
  auto s = make_copula(CopulaFamily::independence, 0.0);
  CHECK(cdf(s, 0.3, 0.6) == doctest::Approx(0.18));
  CHECK(partial_u(s, 0.3, 0.6) == doctest::Approx(0.6));
  CHECK(density(s, 0.3, 0.6) == doctest::Approx(1.0));
}

TEST_CASE("Frechet bounds on a 50x50 grid") {
  for (auto f : parametric_copula_families()) {
    for (double tau : {0.6 * tau_range(f).lower, 0.6 * tau_range(f).upper, moderate_tau(f)}) {
      if (!admissible_tau(f, tau)) continue;
      auto s = xi_from_tau(f, tau);
      for (int i = 1; i <= 50; ++i)
        for (int j = 1; j <= 50; ++j) {
          double u = i / 51.0, v = j / 51.0;
          double c = cdf(s, u, v);
          CHECK(c >= std::max(u + v - 1.0, 0.0) - 1e-15);
          CHECK(c <= std::min(u, v) + 1e-15);
        }
    }
  }
}

TEST_CASE("rotation identities hold pointwise") {
  const double xi = 1.7;
  auto base90 = make_copula(CopulaFamily::clayton90, xi);
  auto base180 = make_copula(CopulaFamily::clayton180, xi);
  auto base270 = make_copula(CopulaFamily::clayton270, xi);
  // plain Clayton written out here
  auto clayton = [&](double u, double v) {
    return std::pow(std::pow(u, -xi) + std::pow(v, -xi) - 1.0, -1.0 / xi);
  };
  for (double u : {0.05, 0.2, 0.5, 0.77, 0.93})
    for (double v : {0.1, 0.35, 0.5, 0.8, 0.97}) {
      CHECK(cdf(base90, u, v) == doctest::Approx(v - clayton(1.0 - u, v)).epsilon(1e-12));
      CHECK(cdf(base180, u, v) ==
            doctest::Approx(u + v - 1.0 + clayton(1.0 - u, 1.0 - v)).epsilon(1e-12));
      CHECK(cdf(base270, u, v) == doctest::Approx(u - clayton(u, 1.0 - v)).epsilon(1e-12));
    }
}

TEST_CASE("partials match central differences of the cdf") {
  for (auto f : parametric_copula_families()) {
    auto s = xi_from_tau(f, moderate_tau(f));
    CAPTURE(to_string(f));
    for (double u = 0.001; u <= 0.999; u += 0.0415)
      for (double v = 0.001; v <= 0.999; v += 0.0415) {
        // step shrinks near the boundary where curvature grows
        const double h = std::min(1e-5, 1e-3 * std::min({u, 1.0 - u, v, 1.0 - v}));
        double du = (cdf(s, u + h, v) - cdf(s, u - h, v)) / (2 * h);
        double dv = (cdf(s, u, v + h) - cdf(s, u, v - h)) / (2 * h);
        CHECK(std::abs(partial_u(s, u, v) - du) < 1e-6);
        CHECK(std::abs(partial_v(s, u, v) - dv) < 1e-6);
      }
  }
}

TEST_CASE("density matches the mixed difference of the cdf") {
  const double h = 1e-4;
  for (auto f : parametric_copula_families()) {
    auto s = xi_from_tau(f, moderate_tau(f));
    CAPTURE(to_string(f));
    for (double u : {0.1, 0.4, 0.6, 0.9})
      for (double v : {0.15, 0.5, 0.85}) {
        double d = (partial_u(s, u, v + h) - partial_u(s, u, v - h)) / (2 * h);
        CHECK(density(s, u, v) == doctest::Approx(d).epsilon(1e-6));
      }
  }
}

TEST_CASE("complement variants agree with direct forms") {
  for (auto f : parametric_copula_families()) {
    auto s = xi_from_tau(f, moderate_tau(f));
    for (double u : {0.2, 0.5, 0.9})
      for (double v : {0.3, 0.7}) {
        CHECK(joint_survival(s, u, v, 1 - u, 1 - v) ==
              doctest::Approx(1 - u - v + cdf(s, u, v)).epsilon(1e-12));
        CHECK(partial_u_complement(s, u, v, 1 - u, 1 - v) ==
              doctest::Approx(1 - partial_u(s, u, v)).epsilon(1e-12));
        CHECK(partial_v_complement(s, u, v, 1 - u, 1 - v) ==
              doctest::Approx(1 - partial_v(s, u, v)).epsilon(1e-12));
      }
  }
}

TEST_CASE("Frank near zero follows the independence limit") {
  auto tiny = make_copula(CopulaFamily::frank, 1e-7);
  auto zero = make_copula(CopulaFamily::frank, 0.0);
  for (double u : {0.1, 0.5, 0.8}) {
    const double a = u * 0.4 * (1.0 - u) * 0.6;
    CHECK(std::abs(cdf(tiny, u, 0.4) - (u * 0.4 + 0.5e-7 * a)) < 1e-15);
    CHECK(cdf(zero, u, 0.4) == doctest::Approx(u * 0.4).epsilon(1e-15));
    CHECK(std::abs(partial_u(tiny, u, 0.4) - 0.4) < 1e-7);
    CHECK(density(tiny, u, 0.4) == doctest::Approx(1.0).epsilon(1e-6));
  }
  // continuity across the series switch at |xi| = 1e-5: slope in xi is a / 2
  auto below = make_copula(CopulaFamily::frank, 0.99e-5);
  auto above = make_copula(CopulaFamily::frank, 1.01e-5);
  const double a = 0.3 * 0.6 * 0.7 * 0.4;
  CHECK(std::abs(cdf(above, 0.3, 0.6) - cdf(below, 0.3, 0.6) - 0.5 * 0.02e-5 * a) < 1e-13);
  CHECK(xi_from_tau(CopulaFamily::frank, 0.0).xi == 0.0);
  CHECK(std::abs(xi_from_tau(CopulaFamily::frank, 1e-9).xi) < 1e-7);
}

TEST_CASE("Kendall tau closed forms and known values") {
  CHECK(xi_from_tau(CopulaFamily::clayton180, 0.25).xi == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(xi_from_tau(CopulaFamily::gaussian, 0.5).xi == doctest::Approx(0.70710678118654752).epsilon(1e-14));
  // 50-digit reference (tests/oracles/derive.py)
  CHECK(xi_from_tau(CopulaFamily::frank, 0.25).xi == doctest::Approx(2.3719295189156902).epsilon(1e-10));
  CHECK(debye1(1.0) == doctest::Approx(0.77750463411224827642).epsilon(1e-13));
  CHECK(debye1(5.0) == doctest::Approx(0.32087619770014612).epsilon(1e-12));
  CHECK(debye1(-1.0) == doctest::Approx(0.77750463411224827642 + 0.5).epsilon(1e-13));
}

TEST_CASE("tau round trip across admissible grids") {
  for (auto f : parametric_copula_families()) {
    auto r = tau_range(f);
    for (int k = 1; k < 40; ++k) {
      double tau = r.lower + (r.upper - r.lower) * k / 40.0;
      if (!admissible_tau(f, tau)) continue;
      auto s = xi_from_tau(f, tau);
      CHECK(tau_from_xi(s) == doctest::Approx(tau).epsilon(1e-8));
    }
  }
}

TEST_CASE("tau matches the quadrature formula") {
  for (auto f : parametric_copula_families()) {
    CAPTURE(to_string(f));
    auto s = xi_from_tau(f, moderate_tau(f));
    CHECK(std::abs(tau_by_quadrature(s) - moderate_tau(f)) < 1e-6);
  }
}

TEST_CASE("bivariate normal cdf against Owen's T") {
  for (double rho : {-0.9, -0.5, 0.0, 0.3, 0.7, 0.95, 0.99})
    for (double h : {-2.0, -0.5, 0.3, 1.7})
      for (double k : {-1.2, 0.4, 2.5}) {
        CAPTURE(rho);
        CHECK(std::abs(bivariate_normal_cdf(h, k, rho) - bvn_owen(h, k, rho)) < 1e-10);
      }
}

TEST_CASE("identifiability limit: h-functions vanish at the origin") {
  // zeta_k(F_T(y), F_C(y)) along a Weibull/PH path
  for (auto f : {CopulaFamily::frank, CopulaFamily::joe, CopulaFamily::clayton90,
                 CopulaFamily::clayton180, CopulaFamily::clayton270}) {
    auto s = xi_from_tau(f, moderate_tau(f));
    double prev1 = 1.0, prev2 = 1.0;
    for (int e = 2; e <= 8; ++e) {
      double y = std::pow(10.0, -e);
      double ft = -std::expm1(-0.5 * std::pow(y, 0.75));
      double fc = -std::expm1(-std::exp((std::log(y) - 0.2) / 1.2));
      double z1 = partial_u(s, ft, fc), z2 = partial_v(s, ft, fc);
      CAPTURE(to_string(f));
      CHECK(z1 <= prev1);
      CHECK(z2 <= prev2);
      prev1 = z1;
      prev2 = z2;
    }
    CHECK(prev1 < 1e-2);
    CHECK(prev2 < 1e-2);
  }
}

TEST_CASE("sampler reproduces the target Kendall tau") {
  struct Case {
    CopulaFamily f;
    double tau;
  };
  for (auto c : {Case{CopulaFamily::frank, 0.25}, Case{CopulaFamily::clayton90, -0.25},
                 Case{CopulaFamily::gaussian, 0.5}}) {
    auto s = xi_from_tau(c.f, c.tau);
    std::mt19937_64 rng(11);
    std::vector<double> u(20000), v(20000);
    for (std::size_t i = 0; i < u.size(); ++i) std::tie(u[i], v[i]) = sample_pair(s, rng);
    CHECK(std::abs(kendall_tau(u, v) - c.tau) < 0.02);
  }
  std::mt19937_64 rng(3);
  auto ind = make_copula(CopulaFamily::independence, 0.0);
  double su = 0, sv = 0, suv = 0, suu = 0, svv = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    auto [a, b] = sample_pair(ind, rng);
    su += a; sv += b; suv += a * b; suu += a * a; svv += b * b;
  }
  double cov = suv / n - su / n * sv / n;
  double corr = cov / std::sqrt((suu / n - su * su / n / n) * (svv / n - sv * sv / n / n));
  CHECK(std::abs(corr) < 0.01);
}

TEST_CASE("sampling is deterministic per seed") {
  auto s = xi_from_tau(CopulaFamily::joe, 0.4);
  std::mt19937_64 a(5), b(5);
  for (int i = 0; i < 50; ++i) CHECK(sample_pair(s, a) == sample_pair(s, b));
}

}
