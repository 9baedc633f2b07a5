#include "cchr/complier_weights.hpp"

#include "cchr/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace cchr {

double kernel6_1d(double t) {
  if (!(std::abs(t) < 1.0)) return 0.0;
  const double t2 = t * t;
  return 105.0 / 256.0 * (1.0 - t2) * (33.0 * t2 * t2 - 30.0 * t2 + 5.0);
}

double kernel6(std::span<const double> u) {
  double k = 1.0;
  for (double t : u) {
    k *= kernel6_1d(t);
    if (k == 0.0) break;
  }
  return k;
}

void KernelConfig::validate() const {
  if (!(h1 > 0.0) || !(h2 > 0.0))
    throw std::invalid_argument("bandwidths must be positive");
  for (double h : grid)
    if (!(h > 0.0)) throw std::invalid_argument("bandwidth grid values must be positive");
  if (folds < 2) throw std::invalid_argument("cv folds must be at least 2");
}

std::vector<double> default_bandwidth_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 100; ++i) g.push_back(i / 100.0);
  return g;
}

TruncationBounds TruncationBounds::for_sample_size(std::size_t n) {
  const double a = 10.0 / static_cast<double>(n);
  return {a, 1.0 - a};
}

void TruncationBounds::validate() const {
  if (!(a_l > 0.0 && a_l < a_u && a_u < 1.0))
    throw std::invalid_argument("truncation bounds must satisfy 0 < a_l < a_u < 1");
}

int resolve_jobs(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CCHR_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

namespace {

// Flattened view: continuous covariates, discrete cell id and the strata
// fields used by the two regressions.
struct KernelRows {
  std::size_t n = 0;
  std::size_t mc = 0;
  std::vector<double> xc;  // n x mc
  std::vector<int> cell;
  std::vector<double> y;
  std::vector<int> d1, d2, z, w;
  std::vector<std::size_t> cont, disc;
  std::map<std::vector<double>, int> cell_ids;

  explicit KernelRows(const Dataset& data)
      : n(data.n()),
        cont(data.schema().continuous_indices()),
        disc(data.schema().discrete_indices()) {
    mc = cont.size();
    xc.reserve(n * mc);
    for (const auto& o : data.observations()) {
      for (auto j : cont) xc.push_back(o.x[j]);
      cell.push_back(cell_of(o.x, true));
      y.push_back(o.y);
      d1.push_back(o.delta1);
      d2.push_back(o.delta2);
      z.push_back(o.z);
      w.push_back(o.w);
    }
  }

  int cell_of(std::span<const double> x, bool insert) {
    std::vector<double> key;
    for (auto j : disc) key.push_back(x[j]);
    auto it = cell_ids.find(key);
    if (it != cell_ids.end()) return it->second;
    if (!insert) return -1;
    int id = static_cast<int>(cell_ids.size());
    cell_ids.emplace(std::move(key), id);
    return id;
  }
  const double* xrow(std::size_t i) const { return xc.data() + i * mc; }
};

// Kernel weight of row i at the point (py, px): product over (y, X_c) when
// with_y, else over X_c only.
double kweight(const KernelRows& r, std::size_t i, bool with_y, double py,
               const double* px, double h) {
  double k = 1.0;
  if (with_y) {
    k = kernel6_1d((py - r.y[i]) / h);
    if (k == 0.0) return 0.0;
  }
  const double* xi = r.xrow(i);
  for (std::size_t c = 0; c < r.mc; ++c) {
    k *= kernel6_1d((px[c] - xi[c]) / h);
    if (k == 0.0) return 0.0;
  }
  return k;
}

std::vector<double> continuous_part(const KernelRows& r, std::span<const double> x) {
  std::vector<double> out;
  for (auto j : r.cont) out.push_back(x[j]);
  return out;
}

std::string point_text(std::span<const double> x) {
  std::ostringstream s;
  s << "(";
  for (std::size_t j = 0; j < x.size(); ++j) s << (j ? ", " : "") << x[j];
  s << ")";
  return s.str();
}

// Returns NaN when the kernel denominator is not positive.
double nw_pi(const KernelRows& r, int cell, const double* px, double h) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < r.n; ++i) {
    if (r.cell[i] != cell) continue;
    double k = kweight(r, i, false, 0.0, px, h);
    num += k * r.w[i];
    den += k;
  }
  if (!(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(num / den, 0.0, 1.0);
}

double nw_nu(const KernelRows& r, int cell, int j, int l, int k, double py,
             const double* px, double h, bool stratified) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < r.n; ++i) {
    if (stratified &&
        (r.cell[i] != cell || r.d1[i] != j || r.d2[i] != l || r.z[i] != k))
      continue;
    double kw = kweight(r, i, true, py, px, h);
    num += kw * r.w[i];
    den += kw;
  }
  if (!(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(num / den, 0.0, 1.0);
}

double pi_at(KernelRows& r, std::span<const double> x, double h1) {
  int cell = r.cell_of(x, false);
  if (cell < 0)
    throw std::runtime_error("estimate_pi: empty discrete stratum at x=" + point_text(x));
  auto xc = continuous_part(r, x);
  double v = nw_pi(r, cell, xc.data(), h1);
  if (std::isnan(v))
    throw std::runtime_error("estimate_pi: nonpositive kernel denominator at x=" +
                             point_text(x));
  return v;
}

double nu_at(KernelRows& r, double y, std::span<const double> x, int j, int l, int k,
             double h2) {
  int cell = r.cell_of(x, false);
  auto xc = continuous_part(r, x);
  double v = std::numeric_limits<double>::quiet_NaN();
  if (cell >= 0) v = nw_nu(r, cell, j, l, k, y, xc.data(), h2, true);
  if (std::isnan(v)) v = nw_nu(r, cell, j, l, k, y, xc.data(), h2, false);
  if (std::isnan(v))
    throw std::runtime_error("estimate_nu: nonpositive kernel denominator at y=" +
                             std::to_string(y) + ", x=" + point_text(x));
  return v;
}

}  // namespace

double estimate_pi(std::span<const double> x, const Dataset& data, double h1) {
  if (!(h1 > 0.0)) throw std::invalid_argument("estimate_pi: h1 must be positive");
  KernelRows r(data);
  return pi_at(r, x, h1);
}

double estimate_nu(double y, std::span<const double> x, int j, int l, int k,
                   const Dataset& data, double h2) {
  if (!(h2 > 0.0)) throw std::invalid_argument("estimate_nu: h2 must be positive");
  KernelRows r(data);
  return nu_at(r, y, x, j, l, k, h2);
}

WeightVector estimate_kappa(const Dataset& data, const KernelConfig& config,
                            const TruncationBounds& bounds, int jobs) {
  config.validate();
  bounds.validate();
  KernelRows r(data);
  WeightVector out;
  out.kappa.resize(r.n);
  parallel_for(r.n, jobs, [&](std::size_t i) {
    const auto& o = data[i];
    const int cell = r.cell[i];
    const double* px = r.xrow(i);
    double pi = nw_pi(r, cell, px, config.h1);
    if (std::isnan(pi))
      throw std::runtime_error("estimate_pi: nonpositive kernel denominator at x=" +
                               point_text(o.x));
    pi = std::clamp(pi, bounds.a_l, bounds.a_u);
    double nu = nw_nu(r, cell, o.delta1, o.delta2, o.z, o.y, px, config.h2, true);
    if (std::isnan(nu)) nu = nw_nu(r, cell, 0, 0, 0, o.y, px, config.h2, false);
    if (std::isnan(nu))
      throw std::runtime_error("estimate_nu: nonpositive kernel denominator at row " +
                               std::to_string(i + 1));
    const double kappa = o.z == 1 ? 1.0 - (1.0 - nu) / (1.0 - pi) : 1.0 - nu / pi;
    out.kappa[i] = std::clamp(kappa, bounds.a_l, bounds.a_u);
  });
  return out;
}

namespace {

// Out-of-fold squared error of W for every bandwidth in grid. `same_group`
// decides which training rows may be used for a test row; `with_y` adds Y
// to the kernel and, as in estimate_nu, an empty group neighbourhood falls
// back to the pooled regression. Remaining gaps use the training mean.
template <typename Group>
std::vector<double> cv_losses(const KernelRows& r, const std::vector<int>& fold,
                              const std::vector<double>& grid, bool with_y,
                              Group same_group) {
  const std::size_t g = grid.size();
  const double hmax = *std::max_element(grid.begin(), grid.end());
  std::vector<double> loss(g, 0.0);
  std::vector<double> num(g), den(g), pnum(g), pden(g);
  std::vector<double> dist(r.mc + 1);
  for (std::size_t i = 0; i < r.n; ++i) {
    std::fill(num.begin(), num.end(), 0.0);
    std::fill(den.begin(), den.end(), 0.0);
    std::fill(pnum.begin(), pnum.end(), 0.0);
    std::fill(pden.begin(), pden.end(), 0.0);
    double all_sum = 0.0, all_cnt = 0.0;
    for (std::size_t t = 0; t < r.n; ++t) {
      if (fold[t] == fold[i]) continue;
      all_sum += r.w[t];
      all_cnt += 1.0;
      const bool grouped = same_group(i, t);
      if (!grouped && !with_y) continue;
      std::size_t d = 0;
      double far = 0.0;
      if (with_y) {
        dist[d] = r.y[i] - r.y[t];
        far = std::max(far, std::abs(dist[d]));
        ++d;
      }
      for (std::size_t c = 0; c < r.mc; ++c, ++d) {
        dist[d] = r.xrow(i)[c] - r.xrow(t)[c];
        far = std::max(far, std::abs(dist[d]));
      }
      if (far >= hmax) continue;
      for (std::size_t b = 0; b < g; ++b) {
        if (far >= grid[b]) continue;
        double k = 1.0;
        for (std::size_t e = 0; e < d; ++e) k *= kernel6_1d(dist[e] / grid[b]);
        if (grouped) {
          num[b] += k * r.w[t];
          den[b] += k;
        }
        pnum[b] += k * r.w[t];
        pden[b] += k;
      }
    }
    const double fallback = all_cnt > 0 ? all_sum / all_cnt : 0.5;
    for (std::size_t b = 0; b < g; ++b) {
      double pred = fallback;
      if (den[b] > 0.0)
        pred = std::clamp(num[b] / den[b], 0.0, 1.0);
      else if (with_y && pden[b] > 0.0)
        pred = std::clamp(pnum[b] / pden[b], 0.0, 1.0);
      double e = r.w[i] - pred;
      loss[b] += e * e;
    }
  }
  for (auto& v : loss) v /= static_cast<double>(r.n);
  return loss;
}

double pick(const std::vector<double>& grid, const std::vector<double>& loss) {
  std::size_t best = 0;
  for (std::size_t b = 1; b < grid.size(); ++b) {
    if (loss[b] < loss[best] || (loss[b] == loss[best] && grid[b] > grid[best])) best = b;
  }
  return grid[best];
}

}  // namespace

CVCurve cross_validation_curve(const Dataset& data, const std::vector<double>& grid,
                               int folds, std::uint64_t seed) {
  if (grid.empty()) throw std::invalid_argument("bandwidth grid is empty");
  if (folds < 2) throw std::invalid_argument("cv folds must be at least 2");
  KernelRows r(data);
  std::vector<std::size_t> perm(r.n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> fold(r.n);
  for (std::size_t p = 0; p < r.n; ++p) fold[perm[p]] = static_cast<int>(p % folds);

  CVCurve curve;
  curve.grid = grid;
  curve.pi_loss = cv_losses(r, fold, grid, false,
                            [&](std::size_t i, std::size_t t) { return r.cell[i] == r.cell[t]; });
  curve.nu_loss = cv_losses(r, fold, grid, true, [&](std::size_t i, std::size_t t) {
    return r.cell[i] == r.cell[t] && r.d1[i] == r.d1[t] && r.d2[i] == r.d2[t] &&
           r.z[i] == r.z[t];
  });
  return curve;
}

KernelConfig cross_validate_bandwidths(const Dataset& data,
                                       const std::vector<double>& grid, int folds,
                                       std::uint64_t seed) {
  if (grid.empty()) throw std::invalid_argument("bandwidth grid is empty");
  KernelConfig cfg;
  cfg.grid = grid;
  cfg.folds = folds;
  cfg.h1 = cfg.h2 = grid.front();
  cfg.validate();
  if (grid.size() == 1) return cfg;
  CVCurve curve = cross_validation_curve(data, grid, folds, seed);
  cfg.h1 = pick(grid, curve.pi_loss);
  cfg.h2 = pick(grid, curve.nu_loss);
  return cfg;
}

}  // namespace cchr
