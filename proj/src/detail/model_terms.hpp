#pragma once

// Row-level building blocks shared by the hazard recursion and the
// likelihood. Everything here works on plain arrays so the hot loops avoid
// per-row allocation.

#include "cchr/copula.hpp"
#include "cchr/data_model.hpp"
#include "cchr/theta.hpp"

#include <cmath>
#include <vector>

namespace cchr::detail {

inline constexpr double kLogFloor = -690.77552789821368;  // log(1e-300)
inline constexpr double kTiny = 1e-300;

struct Rows {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> y;
  std::vector<double> log_y;
  std::vector<int> delta1;
  std::vector<int> delta2;
  std::vector<int> z;
  std::vector<double> x;  // row-major n x m

  explicit Rows(const Dataset& data) : n(data.n()), m(data.schema().m()) {
    y.reserve(n);
    log_y.reserve(n);
    x.reserve(n * m);
    for (const auto& o : data.observations()) {
      y.push_back(o.y);
      log_y.push_back(std::log(o.y));
      delta1.push_back(o.delta1);
      delta2.push_back(o.delta2);
      z.push_back(o.z);
      x.insert(x.end(), o.x.begin(), o.x.end());
    }
  }
  const double* xrow(std::size_t i) const { return x.data() + i * m; }
};

/// Linear predictor and censoring location for every row under theta.
struct Predictors {
  std::vector<double> lp;
  std::vector<double> exp_lp;
  std::vector<double> cens_loc;

  Predictors(const Rows& rows, const Theta& th) {
    lp.resize(rows.n);
    exp_lp.resize(rows.n);
    cens_loc.resize(rows.n);
    const auto& b = th.ph.beta;
    const auto& e = th.cens.eta;
    for (std::size_t i = 0; i < rows.n; ++i) {
      const double* xi = rows.xrow(i);
      double l = rows.z[i] * th.ph.alpha;
      double c = e[0] + rows.z[i] * e[1];
      for (std::size_t j = 0; j < rows.m; ++j) {
        l += b[j] * xi[j];
        c += e[j + 2] * xi[j];
      }
      lp[i] = l;
      exp_lp[i] = std::exp(l);
      cens_loc[i] = c;
    }
  }
};

/// Marginal probabilities at time y for one row, with complements computed
/// directly rather than by subtraction.
struct Margins {
  double ft, st, fc, sc, std_c;
};

inline Margins margins(const Theta& th, double cumhaz, double exp_lp,
                       double log_y, double cens_loc) {
  Margins mg;
  const double a = cumhaz * exp_lp;
  mg.ft = -std::expm1(-a);
  mg.st = std::exp(-a);
  mg.std_c = (log_y - cens_loc) / th.cens.nu;
  if (th.cens.family == CensoringFamily::weibull) {
    const double e = std::exp(mg.std_c);
    mg.fc = -std::expm1(-e);
    mg.sc = std::exp(-e);
  } else {
    mg.fc = error_cdf(th.cens.family, mg.std_c);
    mg.sc = std::exp(error_log_sf(th.cens.family, mg.std_c));
  }
  return mg;
}

inline double safe_log(double v) { return v > kTiny ? std::log(v) : kLogFloor; }

/// psi for one row; see cchr::psi.
inline double psi_row(const Theta& th, double lam, double lp, double exp_lp,
                      double log_y, double cens_loc) {
  const Margins mg = margins(th, lam, exp_lp, log_y, cens_loc);
  const double a = lam * exp_lp;
  if (th.copula.family == CopulaFamily::independence) {
    // log S = -a + log S_C and log(1 - zeta_1) = log S_C cancel
    return lp;
  }
  const double s = joint_survival(th.copula, mg.ft, mg.fc, mg.st, mg.sc);
  const double h = partial_u_complement(th.copula, mg.ft, mg.fc, mg.st, mg.sc);
  return lp - a - safe_log(s) + safe_log(h);
}

/// Log-likelihood contribution of one row given Lambda(y) = lam and the
/// jump of Lambda at y. Not floored; callers decide.
inline double contrib_row(const Theta& th, double lam, double jump, double lp,
                          double exp_lp, double log_y, double cens_loc, int d1,
                          int d2) {
  const Margins mg = margins(th, lam, exp_lp, log_y, cens_loc);
  const double a = lam * exp_lp;
  const bool indep = th.copula.family == CopulaFamily::independence;
  if (d1 == 1) {
    const double log_h = indep ? error_log_sf(th.cens.family, mg.std_c)
                               : safe_log(partial_u_complement(th.copula, mg.ft, mg.fc,
                                                               mg.st, mg.sc));
    return safe_log(jump) + lp - a + log_h;
  }
  if (d2 == 1) {
    const double log_fc =
        error_log_pdf(th.cens.family, mg.std_c) - std::log(th.cens.nu) - log_y;
    const double log_h =
        indep ? -a
              : safe_log(partial_v_complement(th.copula, mg.ft, mg.fc, mg.st, mg.sc));
    return log_fc + log_h;
  }
  if (indep) return -a + error_log_sf(th.cens.family, mg.std_c);
  return safe_log(joint_survival(th.copula, mg.ft, mg.fc, mg.st, mg.sc));
}

}  // namespace cchr::detail
