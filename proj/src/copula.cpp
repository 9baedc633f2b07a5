#include "cchr/copula.hpp"

#include "cchr/normal.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/polygamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cchr {

namespace {

constexpr double kEps = 1e-12;
constexpr double kFrankTaylor = 1e-5;

double clamp_unit(double p) { return std::clamp(p, kEps, 1.0 - kEps); }

// Keeps (p, 1 - p) consistent after clamping.
void clamp_pair(double& p, double& pbar) {
  if (p < kEps) {
    p = kEps;
    pbar = 1.0 - kEps;
  } else if (pbar < kEps) {
    pbar = kEps;
    p = 1.0 - kEps;
  }
}

double log_add_exp(double a, double b) {
  double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// ---- Clayton (unrotated); theta > 0 -------------------------------------

// log(u^-t + v^-t - 1), stable for tiny margins and large t.
double clayton_log_s(double t, double u, double v) {
  double a = -t * std::log(u);
  double b = -t * std::log(v);
  double hi = std::max(a, b);
  double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi) - std::exp(-hi));
}

double clayton_cdf(double t, double u, double v) {
  return std::exp(-clayton_log_s(t, u, v) / t);
}

double clayton_h1(double t, double u, double v) {
  return std::exp((-t - 1.0) * std::log(u) -
                  (1.0 / t + 1.0) * clayton_log_s(t, u, v));
}

double clayton_density(double t, double u, double v) {
  return (1.0 + t) * std::exp((-t - 1.0) * (std::log(u) + std::log(v)) -
                              (1.0 / t + 2.0) * clayton_log_s(t, u, v));
}

// ---- Frank; any real theta ------------------------------------------------

double frank_cdf(double t, double u, double v) {
  if (std::abs(t) < kFrankTaylor) {
    double a = u * v * (1.0 - u) * (1.0 - v);
    return u * v + 0.5 * t * a + t * t / 12.0 * a * (1.0 - 2.0 * u) * (1.0 - 2.0 * v);
  }
  double num = std::expm1(-t * u) * std::expm1(-t * v);
  return -std::log1p(num / std::expm1(-t)) / t;
}

double frank_h1(double t, double u, double v) {
  if (std::abs(t) < kFrankTaylor) {
    double vv = v * (1.0 - v);
    return v + 0.5 * t * vv * (1.0 - 2.0 * u) +
           t * t / 12.0 * vv * (1.0 - 2.0 * v) * (1.0 - 6.0 * u + 6.0 * u * u);
  }
  double ev = std::expm1(-t * v);
  double eu = std::expm1(-t * u);
  return (1.0 + eu) * ev / (std::expm1(-t) + eu * ev);
}

double frank_density(double t, double u, double v) {
  if (std::abs(t) < kFrankTaylor) {
    return 1.0 + 0.5 * t * (1.0 - 2.0 * u) * (1.0 - 2.0 * v) +
           t * t / 12.0 * (1.0 - 6.0 * u + 6.0 * u * u) * (1.0 - 6.0 * v + 6.0 * v * v);
  }
  double em = std::expm1(-t);
  double den = em + std::expm1(-t * u) * std::expm1(-t * v);
  return -t * em * std::exp(-t * (u + v)) / (den * den);
}

// ---- Gumbel; theta >= 1 ---------------------------------------------------

struct GumbelTerms {
  double log_x, log_y, log_a, c;
};

GumbelTerms gumbel_terms(double t, double u, double v) {
  GumbelTerms g;
  g.log_x = std::log(-std::log(u));
  g.log_y = std::log(-std::log(v));
  g.log_a = log_add_exp(t * g.log_x, t * g.log_y) / t;
  g.c = std::exp(-std::exp(g.log_a));
  return g;
}

double gumbel_cdf(double t, double u, double v) { return gumbel_terms(t, u, v).c; }

double gumbel_h1(double t, double u, double v) {
  auto g = gumbel_terms(t, u, v);
  return g.c * std::exp((1.0 - t) * g.log_a + (t - 1.0) * g.log_x - std::log(u));
}

double gumbel_density(double t, double u, double v) {
  auto g = gumbel_terms(t, u, v);
  double a = std::exp(g.log_a);
  return g.c *
         std::exp((t - 1.0) * (g.log_x + g.log_y) + (1.0 - 2.0 * t) * g.log_a -
                  std::log(u) - std::log(v)) *
         (a + t - 1.0);
}

// ---- Joe; theta >= 1. Works on the complements ubar, vbar. ---------------

double joe_d(double t, double ubar, double vbar) {
  double a = std::pow(ubar, t);
  double b = std::pow(vbar, t);
  return a + b - a * b;
}

double joe_cdf(double t, double ubar, double vbar) {
  return 1.0 - std::pow(joe_d(t, ubar, vbar), 1.0 / t);
}

double joe_h1(double t, double ubar, double vbar) {
  double d = joe_d(t, ubar, vbar);
  return std::pow(d, 1.0 / t - 1.0) * std::pow(ubar, t - 1.0) *
         (1.0 - std::pow(vbar, t));
}

double joe_density(double t, double ubar, double vbar) {
  double d = joe_d(t, ubar, vbar);
  return std::pow(d, 1.0 / t - 2.0) * std::pow(ubar, t - 1.0) *
         std::pow(vbar, t - 1.0) * (t - 1.0 + d);
}

// ---- Gaussian; correlation rho ----------------------------------------------

double gaussian_h1(double rho, double x, double y) {
  return normal_cdf((y - rho * x) / std::sqrt(1.0 - rho * rho));
}

double gaussian_density(double rho, double x, double y) {
  double s2 = 1.0 - rho * rho;
  return std::exp(-(rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * s2)) /
         std::sqrt(s2);
}

// ---- Exchangeable base families on interior points ------------------------

// partial derivative with respect to the first argument
double base_h1(CopulaFamily f, double t, double u, double v, double ubar,
               double vbar) {
  switch (f) {
    case CopulaFamily::independence: return v;
    case CopulaFamily::frank: return frank_h1(t, u, v);
    case CopulaFamily::gumbel: return gumbel_h1(t, u, v);
    case CopulaFamily::joe: return joe_h1(t, ubar, vbar);
    case CopulaFamily::gaussian:
      return gaussian_h1(t, -normal_quantile(ubar), normal_quantile(v));
    default: return clayton_h1(t, u, v);
  }
}

double base_density(CopulaFamily f, double t, double u, double v, double ubar,
                    double vbar) {
  switch (f) {
    case CopulaFamily::independence: return 1.0;
    case CopulaFamily::frank: return frank_density(t, u, v);
    case CopulaFamily::gumbel: return gumbel_density(t, u, v);
    case CopulaFamily::joe: return joe_density(t, ubar, vbar);
    case CopulaFamily::gaussian:
      return gaussian_density(t, normal_quantile(u), normal_quantile(v));
    default: return clayton_density(t, u, v);
  }
}

double base_cdf(CopulaFamily f, double t, double u, double v, double ubar,
                double vbar) {
  switch (f) {
    case CopulaFamily::independence: return u * v;
    case CopulaFamily::frank: return frank_cdf(t, u, v);
    case CopulaFamily::gumbel: return gumbel_cdf(t, u, v);
    case CopulaFamily::joe: return joe_cdf(t, ubar, vbar);
    case CopulaFamily::gaussian:
      return bivariate_normal_cdf(normal_quantile(u), normal_quantile(v), t);
    default: return clayton_cdf(t, u, v);
  }
}

double interior_h1(const CopulaSpec& s, double u, double v, double ubar,
                   double vbar) {
  const double t = s.xi;
  switch (s.family) {
    case CopulaFamily::clayton90: return clayton_h1(t, ubar, v);
    case CopulaFamily::clayton180: return 1.0 - clayton_h1(t, ubar, vbar);
    case CopulaFamily::clayton270: return 1.0 - clayton_h1(t, u, vbar);
    default: return base_h1(s.family, t, u, v, ubar, vbar);
  }
}

double interior_h2(const CopulaSpec& s, double u, double v, double ubar,
                   double vbar) {
  const double t = s.xi;
  switch (s.family) {
    case CopulaFamily::clayton90: return 1.0 - clayton_h1(t, v, ubar);
    case CopulaFamily::clayton180: return 1.0 - clayton_h1(t, vbar, ubar);
    case CopulaFamily::clayton270: return clayton_h1(t, vbar, u);
    default: return base_h1(s.family, t, v, u, vbar, ubar);
  }
}

double frank_tau_positive(double t) {
  if (t < 1e-2) {
    double t2 = t * t;
    return t / 9.0 - t * t2 / 900.0 + t * t2 * t2 / 52920.0;
  }
  return 1.0 - 4.0 / t * (1.0 - debye1(t));
}

double frank_tau(double t) {
  return t < 0.0 ? -frank_tau_positive(-t) : frank_tau_positive(t);
}

double joe_tau(double t) {
  using boost::math::digamma;
  using boost::math::trigamma;
  double d = t - 2.0;
  if (std::abs(d) < 1e-5) {
    double f1 = trigamma(2.0) / 2.0;
    double f2 = -boost::math::polygamma(2, 2.0) / 4.0 - trigamma(2.0) / 2.0;
    return 1.0 - 2.0 * (f1 + f2 * d / 2.0);
  }
  return 1.0 + 2.0 / (2.0 - t) * (digamma(2.0) - digamma(2.0 / t + 1.0));
}

// Solves tau_fn(xi) = target for increasing tau_fn on [lo, inf).
template <class F>
double invert_increasing(F tau_fn, double target, double lo, double hi) {
  while (tau_fn(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e8) throw std::domain_error("tau inversion did not bracket");
  }
  std::uintmax_t iters = 200;
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-14 * std::max(1.0, std::abs(a)); };
  auto r = boost::math::tools::toms748_solve(
      [&](double x) { return tau_fn(x) - target; }, lo, hi, tol, iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace

std::string_view to_string(CopulaFamily family) {
  switch (family) {
    case CopulaFamily::independence: return "independence";
    case CopulaFamily::frank: return "frank";
    case CopulaFamily::gumbel: return "gumbel";
    case CopulaFamily::joe: return "joe";
    case CopulaFamily::gaussian: return "gaussian";
    case CopulaFamily::clayton90: return "clayton90";
    case CopulaFamily::clayton180: return "clayton180";
    case CopulaFamily::clayton270: return "clayton270";
  }
  return "unknown";
}

CopulaFamily parse_copula_family(std::string_view name) {
  for (auto f : {CopulaFamily::independence, CopulaFamily::frank,
                 CopulaFamily::gumbel, CopulaFamily::joe, CopulaFamily::gaussian,
                 CopulaFamily::clayton90, CopulaFamily::clayton180,
                 CopulaFamily::clayton270}) {
    if (to_string(f) == name) return f;
  }
  throw std::invalid_argument("unknown copula family '" + std::string(name) + "'");
}

const std::array<CopulaFamily, 7>& parametric_copula_families() {
  static const std::array<CopulaFamily, 7> families = {
      CopulaFamily::frank,     CopulaFamily::gumbel,     CopulaFamily::joe,
      CopulaFamily::gaussian,  CopulaFamily::clayton90,  CopulaFamily::clayton180,
      CopulaFamily::clayton270};
  return families;
}

void validate(const CopulaSpec& spec) {
  const double xi = spec.xi;
  bool ok = std::isfinite(xi);
  switch (spec.family) {
    case CopulaFamily::independence: ok = true; break;
    case CopulaFamily::frank: break;
    case CopulaFamily::gumbel:
    case CopulaFamily::joe: ok = ok && xi >= 1.0; break;
    case CopulaFamily::gaussian: ok = ok && xi > -1.0 && xi < 1.0; break;
    default: ok = ok && xi > 0.0; break;
  }
  if (!ok) {
    throw std::domain_error("association parameter " + std::to_string(xi) +
                            " outside the domain of " +
                            std::string(to_string(spec.family)));
  }
}

CopulaSpec make_copula(CopulaFamily family, double xi) {
  CopulaSpec s{family, family == CopulaFamily::independence ? 0.0 : xi};
  validate(s);
  return s;
}

TauInterval tau_range(CopulaFamily family) {
  switch (family) {
    case CopulaFamily::independence: return {0.0, 0.0};
    case CopulaFamily::frank:
    case CopulaFamily::gaussian: return {-1.0, 1.0};
    case CopulaFamily::gumbel:
    case CopulaFamily::joe:
    case CopulaFamily::clayton180: return {0.0, 1.0};
    case CopulaFamily::clayton90:
    case CopulaFamily::clayton270: return {-1.0, 0.0};
  }
  return {0.0, 0.0};
}

bool admissible_tau(CopulaFamily family, double tau) {
  switch (family) {
    case CopulaFamily::independence: return tau == 0.0;
    case CopulaFamily::gumbel:
    case CopulaFamily::joe: return tau >= 0.0 && tau < 1.0;
    default: {
      auto r = tau_range(family);
      return tau > r.lower && tau < r.upper;
    }
  }
}

double cdf(const CopulaSpec& spec, double u, double v) {
  validate(spec);
  if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0))
    throw std::domain_error("copula arguments must lie in [0,1]");
  if (u == 0.0 || v == 0.0) return 0.0;
  if (u == 1.0) return v;
  if (v == 1.0) return u;
  const double ubar = 1.0 - u;
  const double vbar = 1.0 - v;
  const double t = spec.xi;
  double c = 0.0;
  switch (spec.family) {
    case CopulaFamily::clayton90: c = v - clayton_cdf(t, ubar, v); break;
    case CopulaFamily::clayton180: c = u + v - 1.0 + clayton_cdf(t, ubar, vbar); break;
    case CopulaFamily::clayton270: c = u - clayton_cdf(t, u, vbar); break;
    default: c = base_cdf(spec.family, t, u, v, ubar, vbar); break;
  }
  return std::clamp(c, std::max(u + v - 1.0, 0.0), std::min(u, v));
}

double partial_u(const CopulaSpec& spec, double u, double v) {
  u = clamp_unit(u);
  v = clamp_unit(v);
  return std::clamp(interior_h1(spec, u, v, 1.0 - u, 1.0 - v), 0.0, 1.0);
}

double partial_v(const CopulaSpec& spec, double u, double v) {
  u = clamp_unit(u);
  v = clamp_unit(v);
  return std::clamp(interior_h2(spec, u, v, 1.0 - u, 1.0 - v), 0.0, 1.0);
}

double density(const CopulaSpec& spec, double u, double v) {
  u = clamp_unit(u);
  v = clamp_unit(v);
  const double ubar = 1.0 - u;
  const double vbar = 1.0 - v;
  const double t = spec.xi;
  switch (spec.family) {
    case CopulaFamily::clayton90: return clayton_density(t, ubar, v);
    case CopulaFamily::clayton180: return clayton_density(t, ubar, vbar);
    case CopulaFamily::clayton270: return clayton_density(t, u, vbar);
    default: return base_density(spec.family, t, u, v, ubar, vbar);
  }
}

double joint_survival(const CopulaSpec& spec, double u, double v, double ubar,
                      double vbar) {
  if (spec.family == CopulaFamily::independence) return ubar * vbar;
  clamp_pair(u, ubar);
  clamp_pair(v, vbar);
  const double t = spec.xi;
  double s = 0.0;
  switch (spec.family) {
    case CopulaFamily::clayton90: s = ubar - clayton_cdf(t, ubar, v); break;
    case CopulaFamily::clayton180: s = clayton_cdf(t, ubar, vbar); break;
    case CopulaFamily::clayton270: s = vbar - clayton_cdf(t, u, vbar); break;
    // radially symmetric: the survival copula is the copula itself
    case CopulaFamily::frank: s = frank_cdf(t, ubar, vbar); break;
    case CopulaFamily::gaussian:
      s = bivariate_normal_cdf(normal_quantile(ubar), normal_quantile(vbar), t);
      break;
    default: s = ubar + vbar - 1.0 + base_cdf(spec.family, t, u, v, ubar, vbar); break;
  }
  return std::max(s, 0.0);
}

double partial_u_complement(const CopulaSpec& spec, double u, double v,
                            double ubar, double vbar) {
  if (spec.family == CopulaFamily::independence) return vbar;
  clamp_pair(u, ubar);
  clamp_pair(v, vbar);
  const double t = spec.xi;
  double r = 0.0;
  switch (spec.family) {
    case CopulaFamily::clayton180: r = clayton_h1(t, ubar, vbar); break;
    case CopulaFamily::clayton270: r = clayton_h1(t, u, vbar); break;
    case CopulaFamily::frank: r = frank_h1(t, ubar, vbar); break;
    case CopulaFamily::gaussian:
      r = normal_sf((normal_quantile(v) + t * normal_quantile(ubar)) /
                    std::sqrt(1.0 - t * t));
      break;
    default: r = 1.0 - interior_h1(spec, u, v, ubar, vbar); break;
  }
  return std::clamp(r, 0.0, 1.0);
}

double partial_v_complement(const CopulaSpec& spec, double u, double v,
                            double ubar, double vbar) {
  if (spec.family == CopulaFamily::independence) return ubar;
  clamp_pair(u, ubar);
  clamp_pair(v, vbar);
  const double t = spec.xi;
  double r = 0.0;
  switch (spec.family) {
    case CopulaFamily::clayton90: r = clayton_h1(t, v, ubar); break;
    case CopulaFamily::clayton180: r = clayton_h1(t, vbar, ubar); break;
    case CopulaFamily::frank: r = frank_h1(t, vbar, ubar); break;
    case CopulaFamily::gaussian:
      r = normal_sf((normal_quantile(u) + t * normal_quantile(vbar)) /
                    std::sqrt(1.0 - t * t));
      break;
    default: r = 1.0 - interior_h2(spec, u, v, ubar, vbar); break;
  }
  return std::clamp(r, 0.0, 1.0);
}

double debye1(double x) {
  if (x == 0.0) return 1.0;
  if (x < 0.0) return debye1(-x) - 0.5 * x;
  if (x < 1e-2) {
    double x2 = x * x;
    return 1.0 - x / 4.0 + x2 / 36.0 - x2 * x2 / 3600.0 + x2 * x2 * x2 / 211680.0;
  }
  if (x < 2.0) {
    auto f = [](double t) { return t / std::expm1(t); };
    return boost::math::quadrature::gauss<double, 20>::integrate(f, 0.0, x) / x;
  }
  // integral_0^x = pi^2/6 - sum_k e^{-kx} (x/k + 1/k^2)
  double tail = 0.0;
  for (int k = 1; k < 200; ++k) {
    double term = std::exp(-k * x) * (x / k + 1.0 / (double(k) * k));
    tail += term;
    if (term < 1e-18) break;
  }
  return (std::numbers::pi * std::numbers::pi / 6.0 - tail) / x;
}

double tau_from_xi(const CopulaSpec& spec) {
  validate(spec);
  const double t = spec.xi;
  switch (spec.family) {
    case CopulaFamily::independence: return 0.0;
    case CopulaFamily::frank: return frank_tau(t);
    case CopulaFamily::gumbel: return 1.0 - 1.0 / t;
    case CopulaFamily::joe: return joe_tau(t);
    case CopulaFamily::gaussian: return 2.0 / std::numbers::pi * std::asin(t);
    case CopulaFamily::clayton180: return t / (t + 2.0);
    case CopulaFamily::clayton90:
    case CopulaFamily::clayton270: return -t / (t + 2.0);
  }
  return 0.0;
}

CopulaSpec xi_from_tau(CopulaFamily family, double tau) {
  if (!admissible_tau(family, tau)) {
    throw std::domain_error("Kendall tau " + std::to_string(tau) +
                            " is not admissible for " + std::string(to_string(family)));
  }
  switch (family) {
    case CopulaFamily::independence: return {family, 0.0};
    case CopulaFamily::frank: {
      if (tau == 0.0) return {family, 0.0};
      double a = std::abs(tau);
      double xi = invert_increasing(frank_tau_positive, a, 0.0, 4.0 / (1.0 - a) + 1.0);
      return {family, tau < 0.0 ? -xi : xi};
    }
    case CopulaFamily::gumbel: return {family, 1.0 / (1.0 - tau)};
    case CopulaFamily::joe: {
      if (tau == 0.0) return {family, 1.0};
      return {family, invert_increasing(joe_tau, tau, 1.0, 2.0 / (1.0 - tau) + 2.0)};
    }
    case CopulaFamily::gaussian:
      return {family, std::sin(std::numbers::pi * tau / 2.0)};
    case CopulaFamily::clayton180: return {family, 2.0 * tau / (1.0 - tau)};
    case CopulaFamily::clayton90:
    case CopulaFamily::clayton270: {
      double a = -tau;
      return {family, 2.0 * a / (1.0 - a)};
    }
  }
  return {family, 0.0};
}

std::pair<double, double> sample_pair(const CopulaSpec& spec, std::mt19937_64& rng) {
  validate(spec);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  double w = unif(rng);
  while (u <= 0.0) u = unif(rng);
  while (w <= 0.0) w = unif(rng);
  if (spec.family == CopulaFamily::independence) return {u, w};

  auto g = [&](double v) { return partial_u(spec, u, v) - w; };
  double lo = 0.0;
  double hi = 1.0;
  double glo = g(lo);
  double ghi = g(hi);
  if (glo >= 0.0) return {u, kEps};
  if (ghi <= 0.0) return {u, 1.0 - kEps};
  std::uintmax_t iters = 200;
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-10; };
  auto r = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi, tol, iters);
  if (iters >= 200) throw std::runtime_error("sample_pair: root bracketing failed");
  return {u, std::clamp(0.5 * (r.first + r.second), kEps, 1.0 - kEps)};
}

}  // namespace cchr
