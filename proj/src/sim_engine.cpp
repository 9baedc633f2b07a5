#include "cchr/sim_engine.hpp"

#include "cchr/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace cchr {

void GroupParams::validate(CopulaFamily family) const {
  if (!(baseline.scale > 0.0) || !(baseline.shape > 0.0))
    throw std::invalid_argument("baseline scale and shape must be positive");
  if (!(nu > 0.0)) throw std::invalid_argument("group nu must be positive");
  if (beta.size() != 2) throw std::invalid_argument("group beta must have 2 entries");
  if (eta.size() != 4) throw std::invalid_argument("group eta must have 4 entries");
  if (!admissible_tau(family, tau))
    throw std::invalid_argument("group tau is not admissible for the design copula");
}

void SimDesign::validate() const {
  params_co.validate(copula);
  params_nc.validate(copula);
  if (!(complier_prob > 0.0 && complier_prob <= 1.0))
    throw std::invalid_argument("complier_prob must be in (0, 1]");
  if (!(admin_upper > 0.0)) throw std::invalid_argument("admin_upper must be positive");
  if (n < 2) throw std::invalid_argument("sample size must be at least 2");
  if (replications < 1) throw std::invalid_argument("replications must be positive");
}

SimDesign preset_design(std::string_view name) {
  SimDesign d;
  d.copula = CopulaFamily::frank;
  d.censoring = CensoringFamily::weibull;
  d.fit_model = {d.copula, d.censoring};
  if (name == "lowdep") {
    d.params_co = {{0.5, 0.75}, 0.25, -0.6, {1.0, 0.9}, {1.5, -0.8, -2.0, 0.9}, 1.2};
    d.params_nc = {{0.7, 0.6}, 0.2, -0.1, {0.8, 0.7}, {1.3, -1.0, -1.8, 0.6}, 1.1};
    d.admin_upper = 15.0;
  } else if (name == "highdep") {
    d.params_co = {{0.1, 0.6}, 0.75, 0.6, {1.3, 1.0}, {1.3, -0.6, -0.8, 1.2}, 1.0};
    d.params_nc = {{0.2, 0.7}, 0.7, 0.2, {1.1, 0.8}, {1.1, -0.8, -0.5, 0.9}, 1.2};
    d.admin_upper = 50.0;
  } else {
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
  }
  d.fit.kernel.h1 = d.fit.kernel.h2 = 0.1;
  return d;
}

std::vector<int> SimData::complier_labels() const {
  std::vector<int> out;
  out.reserve(groups.size());
  for (auto g : groups) out.push_back(g == Group::complier ? 1 : 0);
  return out;
}

CovariateSchema sim_schema() {
  return {{"x1", "x2"}, {CovariateKind::discrete, CovariateKind::continuous}};
}

namespace {

double open_uniform(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double v;
  do v = u(rng);
  while (v <= 0.0);
  return v;
}

}  // namespace

std::pair<double, double> draw_latent(const SimDesign& design, const GroupParams& g,
                                      int z, std::span<const double> x,
                                      std::mt19937_64& rng) {
  const CopulaSpec cop = xi_from_tau(design.copula, g.tau);
  auto [u, v] = sample_pair(cop, rng);
  PHParams ph{g.alpha, g.beta};
  CensoringModel cm{design.censoring, g.eta, g.nu};
  return {ph_quantile(u, z, x, ph, g.baseline), cens_quantile(v, z, x, cm)};
}

SimData generate_dataset(const SimDesign& design, std::uint64_t seed) {
  design.validate();
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution half(0.5);
  std::normal_distribution<double> noise(0.0, 0.25);
  std::vector<Observation> obs;
  std::vector<Group> groups;
  obs.reserve(design.n);
  groups.reserve(design.n);
  const double p_at = design.complier_prob + 0.5 * (1.0 - design.complier_prob);
  for (std::size_t i = 0; i < design.n; ++i) {
    Observation o;
    const double x1 = half(rng) ? 1.0 : 0.0;
    const double x2 = open_uniform(rng);
    o.x = {x1, x2};
    const double g_draw = open_uniform(rng);
    Group g = g_draw < design.complier_prob ? Group::complier
              : g_draw < p_at               ? Group::always_taker
                                            : Group::never_taker;
    const double lin = 0.5 * x1 + x2 + 2.0 * x1 * x2 + noise(rng);
    const double pi = 1.0 / (1.0 + std::exp(-lin));
    o.w = open_uniform(rng) < pi ? 1 : 0;
    o.z = g == Group::complier ? o.w : g == Group::always_taker ? 1 : 0;
    const GroupParams& gp = g == Group::complier ? design.params_co : design.params_nc;
    auto [t, c] = draw_latent(design, gp, o.z, o.x, rng);
    const double a = design.admin_upper * open_uniform(rng);
    o.y = std::min({t, c, a});
    o.delta1 = o.y == t ? 1 : 0;
    o.delta2 = o.delta1 == 0 && o.y == c ? 1 : 0;
    obs.push_back(std::move(o));
    groups.push_back(g);
  }
  return {Dataset(std::move(obs), sim_schema()), std::move(groups)};
}

Theta true_theta(const SimDesign& design) {
  const auto& g = design.params_co;
  return Theta::make({g.alpha, g.beta}, {design.fit_model.censoring, g.eta, g.nu},
                     design.fit_model.copula, g.tau);
}

namespace {

std::vector<double> truth_vector(const SimDesign& design) {
  const auto& g = design.params_co;
  std::vector<double> v{g.alpha};
  v.insert(v.end(), g.beta.begin(), g.beta.end());
  v.insert(v.end(), g.eta.begin(), g.eta.end());
  v.push_back(g.nu);
  if (design.fit_model.copula != CopulaFamily::independence) v.push_back(g.tau);
  return v;
}

}  // namespace

const ParamMetrics& MetricsReport::at(std::string_view name) const {
  for (const auto& p : params)
    if (p.name == name) return p;
  throw std::out_of_range("no metrics for parameter '" + std::string(name) + "'");
}

MetricsReport compute_metrics(const std::vector<std::string>& names,
                              const std::vector<double>& truth,
                              const std::vector<std::vector<double>>& estimates) {
  if (names.size() != truth.size())
    throw std::invalid_argument("compute_metrics: names and truth differ in length");
  MetricsReport rep;
  rep.replications = static_cast<int>(estimates.size());
  const double r = static_cast<double>(estimates.size());
  for (std::size_t k = 0; k < names.size(); ++k) {
    ParamMetrics pm;
    pm.name = names[k];
    pm.truth = truth[k];
    if (!estimates.empty()) {
      // errors taken about the truth so exact estimates give exact zeros
      double bias = 0.0, mse = 0.0;
      for (const auto& e : estimates) {
        const double err = e.at(k) - truth[k];
        bias += err;
        mse += err * err;
      }
      bias /= r;
      double ss = 0.0;
      for (const auto& e : estimates) ss += (e[k] - truth[k] - bias) * (e[k] - truth[k] - bias);
      pm.bias = bias;
      pm.esd = estimates.size() > 1 ? std::sqrt(ss / (r - 1.0)) : 0.0;
      pm.rmse = std::sqrt(mse / r);
    }
    rep.params.push_back(pm);
  }
  return rep;
}

std::vector<double> coverage_warp_speed(const std::vector<std::vector<double>>& estimates,
                                        const std::vector<std::vector<double>>& boot,
                                        const std::vector<double>& truth) {
  if (estimates.size() != boot.size())
    throw std::invalid_argument("warp-speed coverage needs one bootstrap per replicate");
  std::vector<double> cr(truth.size(), std::numeric_limits<double>::quiet_NaN());
  if (estimates.empty()) return cr;
  const std::size_t r = estimates.size();
  for (std::size_t k = 0; k < truth.size(); ++k) {
    std::vector<double> dev(r);
    for (std::size_t i = 0; i < r; ++i) dev[i] = std::abs(boot[i].at(k) - estimates[i].at(k));
    // type-7 empirical quantile
    std::sort(dev.begin(), dev.end());
    const double h = 0.95 * static_cast<double>(r - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, r - 1);
    const double q = dev[lo] + (h - static_cast<double>(lo)) * (dev[hi] - dev[lo]);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < r; ++i)
      if (std::abs(estimates[i][k] - truth[k]) <= q) ++hits;
    cr[k] = static_cast<double>(hits) / static_cast<double>(r);
  }
  return cr;
}

MCResult run_mc(const SimDesign& design, std::uint64_t seed, const MCOptions& options) {
  design.validate();
  if (design.replications < 2) throw std::invalid_argument("run_mc needs at least 2 replications");
  const std::size_t reps = static_cast<std::size_t>(design.replications);
  struct Slot {
    bool ok = false;
    std::vector<double> est, boot;
    std::string error;
  };
  std::vector<Slot> slots(reps);
  parallel_for(reps, options.jobs, [&](std::size_t r) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(r)};
    std::array<std::uint64_t, 3> s{};
    seq.generate(s.begin(), s.end());
    try {
      SimData sd = generate_dataset(design, s[0]);
      FitOptions fo = design.fit;
      fo.model = design.fit_model;
      fo.mode = design.estimator;
      fo.optimizer.seed = s[1];
      fo.optimizer.jobs = 1;
      const auto labels = sd.complier_labels();
      FitResult fr = fit_two_step(sd.data, fo, labels);
      slots[r].est = fr.theta_hat.to_vector();
      if (options.warp_speed) {
        std::mt19937_64 rng(s[2]);
        std::uniform_int_distribution<std::size_t> pick(0, sd.data.n() - 1);
        std::vector<std::size_t> rows(sd.data.n());
        for (auto& i : rows) i = pick(rng);
        std::vector<int> boot_labels;
        for (auto i : rows) boot_labels.push_back(labels[i]);
        FitResult br = fit_two_step(sd.data.subset(rows), fo, boot_labels);
        slots[r].boot = br.theta_hat.to_vector();
      }
      slots[r].ok = true;
    } catch (const std::exception& e) {
      slots[r].error = e.what();
    }
  });
  MCResult out;
  out.names = parameter_names(2, design.fit_model.copula);
  std::vector<std::vector<double>> boots;
  for (std::size_t r = 0; r < reps; ++r) {
    if (slots[r].ok) {
      out.estimates.push_back(std::move(slots[r].est));
      out.replicate_ids.push_back(r);
      if (options.warp_speed) boots.push_back(std::move(slots[r].boot));
    } else {
      out.errors.push_back("replicate " + std::to_string(r) + ": " + slots[r].error);
    }
  }
  const auto truth = truth_vector(design);
  out.metrics = compute_metrics(out.names, truth, out.estimates);
  out.metrics.failures = static_cast<int>(out.errors.size());
  if (options.warp_speed && !out.estimates.empty()) {
    auto cr = coverage_warp_speed(out.estimates, boots, truth);
    for (std::size_t k = 0; k < cr.size(); ++k) out.metrics.params[k].cr = cr[k];
  }
  return out;
}

std::string_view to_string(SweepAxis axis) {
  return axis == SweepAxis::complier_ratio ? "complier_ratio" : "sample_size";
}

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "complier_ratio") return SweepAxis::complier_ratio;
  if (name == "sample_size") return SweepAxis::sample_size;
  throw std::invalid_argument("unknown sweep axis '" + std::string(name) + "'");
}

std::vector<double> default_axis_values(SweepAxis axis) {
  if (axis == SweepAxis::complier_ratio) return {0.1, 0.2, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  return {100, 250, 500, 1000, 1500};
}

std::vector<SweepRow> sweep(const SimDesign& templ, SweepAxis axis,
                            const std::vector<double>& values,
                            const std::vector<WeightMode>& estimators, std::uint64_t seed,
                            const MCOptions& options) {
  std::vector<SweepRow> rows;
  for (double v : values) {
    SimDesign d = templ;
    if (axis == SweepAxis::complier_ratio) {
      d.complier_prob = v;
    } else {
      d.n = static_cast<std::size_t>(std::llround(v));
    }
    for (auto est : estimators) {
      d.estimator = est;
      // same seed per axis value: estimators see the same datasets
      SweepRow row{v, est, run_mc(d, seed, options).metrics};
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

double kendall_tau(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw std::invalid_argument("kendall_tau: lengths differ");
  if (n < 2) throw std::invalid_argument("kendall_tau: need at least 2 pairs");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
    return a[i] < a[j] || (a[i] == a[j] && b[i] < b[j]);
  });
  auto pairs = [](double t) { return t * (t - 1.0) / 2.0; };
  double tie_a = 0.0, tie_ab = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && a[idx[j]] == a[idx[i]]) ++j;
    tie_a += pairs(static_cast<double>(j - i));
    for (std::size_t k = i; k < j;) {
      std::size_t l = k;
      while (l < j && b[idx[l]] == b[idx[k]]) ++l;
      tie_ab += pairs(static_cast<double>(l - k));
      k = l;
    }
    i = j;
  }
  // merge sort on b counting exchanges
  std::vector<double> v(n), buf(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = b[idx[i]];
  double swaps = 0.0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      std::size_t mid = std::min(lo + width, n), hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          swaps += static_cast<double>(mid - i);
          buf[k++] = v[j++];
        } else {
          buf[k++] = v[i++];
        }
      }
      while (i < mid) buf[k++] = v[i++];
      while (j < hi) buf[k++] = v[j++];
    }
    std::swap(v, buf);
  }
  double tie_b = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && v[j] == v[i]) ++j;
    tie_b += pairs(static_cast<double>(j - i));
    i = j;
  }
  const double n0 = pairs(static_cast<double>(n));
  const double num = n0 - tie_a - tie_b + tie_ab - 2.0 * swaps;
  return num / std::sqrt((n0 - tie_a) * (n0 - tie_b));
}

}  // namespace cchr
