#include "cchr/optimizer.hpp"

#include "cchr/likelihood.hpp"
#include "cchr/parallel.hpp"
#include "detail/model_terms.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>

namespace cchr {

void OptimizerConfig::validate() const {
  if (n_starts < 1) throw std::invalid_argument("n_starts must be at least 1");
  if (max_outer_iters < 1) throw std::invalid_argument("max_outer_iters must be at least 1");
  if (!(outer_tol > 0.0)) throw std::invalid_argument("outer_tol must be positive");
  if (!(inner_tol > 0.0) || !(start_tol > 0.0))
    throw std::invalid_argument("simplex tolerances must be positive");
  if (inner_max_iter < 1 || start_max_iter < 1)
    throw std::invalid_argument("simplex iteration caps must be positive");
  if (!(coef_bound > 0.0)) throw std::invalid_argument("coef_bound must be positive");
  if (!(nu_lower > 0.0 && nu_lower < nu_upper))
    throw std::invalid_argument("nu start box must satisfy 0 < lower < upper");
  if (!(tau_fraction > 0.0 && tau_fraction <= 1.0))
    throw std::invalid_argument("tau_fraction must be in (0, 1]");
}

TauInterval optimizer_tau_range(CopulaFamily family) {
  constexpr double edge = 0.98;
  switch (family) {
    case CopulaFamily::frank:
    case CopulaFamily::gaussian: return {-edge, edge};
    case CopulaFamily::gumbel:
    case CopulaFamily::joe:
    case CopulaFamily::clayton180: return {0.0, edge};
    case CopulaFamily::clayton90:
    case CopulaFamily::clayton270: return {-edge, 0.0};
    case CopulaFamily::independence: return {0.0, 0.0};
  }
  return {0.0, 0.0};
}

std::string_view to_string(WeightMode mode) {
  switch (mode) {
    case WeightMode::proposed: return "proposed";
    case WeightMode::naive: return "naive";
    case WeightMode::oracle: return "oracle";
  }
  return "unknown";
}

WeightMode parse_weight_mode(std::string_view name) {
  for (auto m : {WeightMode::proposed, WeightMode::naive, WeightMode::oracle})
    if (to_string(m) == name) return m;
  throw std::invalid_argument("unknown weight mode '" + std::string(name) + "'");
}

namespace {

// Maps between Theta and the unconstrained vector searched by the simplex:
// (alpha, beta, eta, log nu[, s]) with tau = centre + radius * tanh(s).
struct Transform {
  std::size_t m;
  CopulaFamily family;
  CensoringFamily censoring;
  double centre = 0.0, radius = 0.0, lo = 0.0, hi = 0.0;

  Transform(std::size_t m_, ModelChoice model)
      : m(m_), family(model.copula), censoring(model.censoring) {
    auto r = optimizer_tau_range(family);
    lo = r.lower;
    hi = r.upper;
    centre = 0.5 * (lo + hi);
    radius = 0.5 * (hi - lo);
  }
  bool has_tau() const { return family != CopulaFamily::independence; }
  std::size_t dim() const { return 2 * m + 4 + (has_tau() ? 1 : 0); }

  double tau_of(double s) const {
    const double margin = 1e-8;
    return std::clamp(centre + radius * std::tanh(s), lo + margin, hi - margin);
  }

  Theta to_theta(const double* u) const {
    std::vector<double> v(u, u + dim());
    v[2 * m + 3] = std::exp(u[2 * m + 3]);
    if (has_tau()) {
      double tau = tau_of(u[2 * m + 4]);
      if (family == CopulaFamily::frank && std::abs(tau) < 1e-12) tau = 0.0;
      v[2 * m + 4] = tau;
    }
    return Theta::from_vector(v, m, family, censoring);
  }

  std::vector<double> from_theta(const Theta& th) const {
    std::vector<double> v = th.to_vector();
    v[2 * m + 3] = std::log(th.cens.nu);
    if (has_tau()) {
      double t = std::clamp((th.tau - centre) / radius, -1.0 + 1e-12, 1.0 - 1e-12);
      v[2 * m + 4] = std::atanh(t);
    }
    return v;
  }
};

// Weighted objective at a fixed step hazard; rows with zero weight are
// dropped up front.
class FixedHazardObjective {
 public:
  FixedHazardObjective(const detail::Rows& rows, std::span<const double> weights,
                       const StepHazard& hazard, const Transform& tf)
      : tf_(tf) {
    double total = 0.0;
    for (std::size_t i = 0; i < rows.n; ++i) {
      if (weights[i] == 0.0) continue;
      Row r;
      r.w = weights[i];
      r.z = rows.z[i];
      r.x.assign(rows.xrow(i), rows.xrow(i) + rows.m);
      double y = rows.y[i];
      r.d1 = rows.delta1[i];
      r.d2 = rows.delta2[i];
      if (y > hazard.horizon()) {
        y = hazard.horizon();
        r.d1 = r.d2 = 0;
      }
      r.log_y = std::log(y);
      r.lam = hazard.cumulative(y);
      r.jump = r.d1 == 1 ? hazard.jump(y) : 0.0;
      rows_.push_back(std::move(r));
      total += weights[i];
    }
    if (!(total > 0.0)) throw std::invalid_argument("weights sum to zero");
    weight_total_ = total;
  }

  /// Weighted log-likelihood (not normalized); contributions floored.
  double loglik(const Theta& th) const {
    const auto& b = th.ph.beta;
    const auto& e = th.cens.eta;
    double sum = 0.0;
    for (const auto& r : rows_) {
      double lp = r.z * th.ph.alpha;
      double loc = e[0] + r.z * e[1];
      for (std::size_t j = 0; j < r.x.size(); ++j) {
        lp += b[j] * r.x[j];
        loc += e[j + 2] * r.x[j];
      }
      double v = detail::contrib_row(th, r.lam, r.jump, lp, std::exp(lp), r.log_y, loc,
                                     r.d1, r.d2);
      if (!(v >= detail::kLogFloor)) v = detail::kLogFloor;  // also catches NaN
      sum += r.w * v;
    }
    return sum;
  }

  /// Minimization target on the unconstrained scale.
  double operator()(const double* u) const {
    double ll;
    try {
      ll = loglik(tf_.to_theta(u));
    } catch (const std::exception&) {
      return std::numeric_limits<double>::max();
    }
    if (!std::isfinite(ll)) return std::numeric_limits<double>::max();
    return -ll / weight_total_;
  }

 private:
  struct Row {
    double w, log_y, lam, jump;
    int z, d1, d2;
    std::vector<double> x;
  };
  const Transform& tf_;
  std::vector<Row> rows_;
  double weight_total_ = 0.0;
};

struct SimplexResult {
  std::vector<double> x;
  double f;
};

constexpr double kStallTol = 1e-13;

double gsl_trampoline(const gsl_vector* v, void* params) {
  const auto& fn = *static_cast<const FixedHazardObjective*>(params);
  return fn(v->data);
}

SimplexResult nelder_mead(const FixedHazardObjective& fn, const std::vector<double>& x0,
                          double step, double tol, int max_iter) {
  gsl_set_error_handler_off();
  const std::size_t d = x0.size();
  gsl_multimin_function f{&gsl_trampoline, d, const_cast<FixedHazardObjective*>(&fn)};
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(d),
                                                             &gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> ss(gsl_vector_alloc(d),
                                                              &gsl_vector_free);
  for (std::size_t k = 0; k < d; ++k) gsl_vector_set(x.get(), k, x0[k]);
  gsl_vector_set_all(ss.get(), step);
  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> s(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, d),
      &gsl_multimin_fminimizer_free);
  gsl_multimin_fminimizer_set(s.get(), &f, x.get(), ss.get());
  // stop on simplex size, or when the best value stalls over a window
  const int window = 20 * static_cast<int>(d);
  double anchor = s->fval;
  for (int it = 0; it < max_iter; ++it) {
    if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s.get()), tol) == GSL_SUCCESS)
      break;
    if ((it + 1) % window == 0) {
      if (anchor - s->fval <= kStallTol * (1.0 + std::abs(s->fval))) break;
      anchor = s->fval;
    }
  }
  SimplexResult out;
  out.x.assign(s->x->data, s->x->data + d);
  out.f = s->fval;
  return out;
}

double relative_change(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    worst = std::max(worst, std::abs(b[k] - a[k]) / std::max(1.0, std::abs(a[k])));
  return worst;
}

Theta sample_start(std::size_t m, ModelChoice model, const OptimizerConfig& cfg,
                   std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-cfg.coef_bound, cfg.coef_bound);
  std::uniform_real_distribution<double> nu(cfg.nu_lower, cfg.nu_upper);
  PHParams ph;
  ph.alpha = coef(rng);
  for (std::size_t j = 0; j < m; ++j) ph.beta.push_back(coef(rng));
  CensoringModel cens;
  cens.family = model.censoring;
  for (std::size_t j = 0; j < m + 2; ++j) cens.eta.push_back(coef(rng));
  cens.nu = nu(rng);
  double tau = 0.0;
  if (model.copula != CopulaFamily::independence) {
    auto r = optimizer_tau_range(model.copula);
    std::uniform_real_distribution<double> t(r.lower * cfg.tau_fraction,
                                             r.upper * cfg.tau_fraction);
    tau = t(rng);
    if (tau == 0.0 && model.copula == CopulaFamily::clayton180) tau = 1e-3;
  }
  return Theta::make(std::move(ph), std::move(cens), model.copula, tau);
}

HazardOptions hazard_options(const OptimizerConfig& cfg) {
  HazardOptions h;
  h.horizon = cfg.horizon;
  return h;
}

FitResult outer_loop(const Dataset& data, const detail::Rows& rows,
                     const WeightVector& weights, const OptimizerConfig& cfg,
                     const Transform& tf, Theta theta) {
  FitResult res;
  std::vector<double> current = theta.to_vector();
  std::vector<double> u = tf.from_theta(theta);
  // initial simplex scaled to the last outer move
  double step_size = 0.1;
  for (int it = 1; it <= cfg.max_outer_iters; ++it) {
    StepHazard hazard = fit_step_hazard(theta, data, weights.kappa, hazard_options(cfg));
    FixedHazardObjective obj(rows, weights.kappa, hazard, tf);
    FitResult::OuterStep step;
    step.before = obj.loglik(theta);
    auto nm = nelder_mead(obj, u, step_size, cfg.inner_tol, cfg.inner_max_iter);
    Theta next = tf.to_theta(nm.x.data());
    step.after = obj.loglik(next);
    res.outer_trace.push_back(step);
    res.n_outer = it;
    std::vector<double> nv = next.to_vector();
    const double change = relative_change(current, nv);
    theta = std::move(next);
    current = std::move(nv);
    double moved = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) moved = std::max(moved, std::abs(nm.x[k] - u[k]));
    step_size = std::clamp(10.0 * moved, 100.0 * cfg.inner_tol, 0.1);
    u = std::move(nm.x);
    if (change < cfg.outer_tol) {
      res.converged = true;
      break;
    }
  }
  res.hazard = fit_step_hazard(theta, data, weights.kappa, hazard_options(cfg));
  res.loglik = weighted_loglik(data, weights.kappa, theta, res.hazard);
  res.theta_hat = std::move(theta);
  res.weights_used = weights;
  return res;
}

void check_weights(const Dataset& data, const WeightVector& weights) {
  if (weights.size() != data.n())
    throw std::invalid_argument("weight vector length does not match the data");
  for (double w : weights.kappa)
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("weights must be finite and nonnegative");
}

}  // namespace

FitResult maximize_from(const Dataset& data, const WeightVector& weights,
                        const OptimizerConfig& config, const Theta& start) {
  config.validate();
  check_weights(data, weights);
  detail::Rows rows(data);
  Transform tf(data.schema().m(), {start.family(), start.cens.family});
  return outer_loop(data, rows, weights, config, tf, start);
}

FitResult maximize(const Dataset& data, const WeightVector& weights,
                   const OptimizerConfig& config, ModelChoice model) {
  config.validate();
  check_weights(data, weights);
  detail::Rows rows(data);
  const std::size_t m = data.schema().m();
  Transform tf(m, model);

  struct Candidate {
    bool ok = false;
    double f = std::numeric_limits<double>::infinity();
    Theta theta;
  };
  std::vector<Candidate> cand(static_cast<std::size_t>(config.n_starts));
  parallel_for(cand.size(), config.jobs, [&](std::size_t j) {
    std::seed_seq seq{config.seed, static_cast<std::uint64_t>(j)};
    std::mt19937_64 rng(seq);
    Theta start = sample_start(m, model, config, rng);
    try {
      StepHazard h = fit_step_hazard(start, data, weights.kappa, hazard_options(config));
      FixedHazardObjective obj(rows, weights.kappa, h, tf);
      auto nm = nelder_mead(obj, tf.from_theta(start), 0.5, config.start_tol,
                            config.start_max_iter);
      if (nm.f < std::numeric_limits<double>::max()) {
        cand[j].ok = true;
        cand[j].f = nm.f;
        cand[j].theta = tf.to_theta(nm.x.data());
      }
    } catch (const std::runtime_error&) {
      // start rejected: hazard recursion failed at this theta
    } catch (const std::domain_error&) {
    }
  });
  const Candidate* best = nullptr;
  for (const auto& c : cand)
    if (c.ok && (!best || c.f < best->f)) best = &c;
  if (!best)
    throw std::runtime_error("maximize: none of the " + std::to_string(config.n_starts) +
                             " starts gave a finite objective");
  return outer_loop(data, rows, weights, config, tf, best->theta);
}

WeightVector make_weights(const Dataset& data, const FitOptions& options,
                          const std::vector<int>& groups) {
  WeightVector w;
  switch (options.mode) {
    case WeightMode::naive:
      w.kappa.assign(data.n(), 1.0);
      return w;
    case WeightMode::oracle:
      if (groups.size() != data.n())
        throw std::invalid_argument("oracle weights need one group label per row");
      for (int g : groups) w.kappa.push_back(g == 1 ? 1.0 : 0.0);
      return w;
    case WeightMode::proposed: {
      KernelConfig k = options.kernel;
      if (options.cross_validate) {
        auto grid = k.grid.empty() ? default_bandwidth_grid() : k.grid;
        k = cross_validate_bandwidths(data, grid, k.folds, options.optimizer.seed);
      }
      auto bounds = options.bounds.value_or(TruncationBounds::for_sample_size(data.n()));
      return estimate_kappa(data, k, bounds, options.optimizer.jobs);
    }
  }
  return w;
}

FitResult fit_two_step(const Dataset& data, const FitOptions& options,
                       const std::vector<int>& groups) {
  WeightVector w = make_weights(data, options, groups);
  return maximize(data, w, options.optimizer, options.model);
}

}  // namespace cchr
