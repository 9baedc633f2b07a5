#include <stdexcept>
#include <doctest.h>

#include "cchr/complier_weights.hpp"
#include "cchr/sim_engine.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace cchr;

namespace {

CovariateSchema one_cont() { return {{"x2"}, {CovariateKind::continuous}}; }

// composite 5-point Gauss-Legendre with 2000 panels (10^4 nodes)
double integrate_kernel_moment(int power) {
  const int panels = 2000;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    double a = -1.0 + 2.0 * p / panels, b = a + 2.0 / panels;
    total += boost::math::quadrature::gauss<double, 5>::integrate(
        [&](double t) { return std::pow(t, power) * kernel6_1d(t); }, a, b);
  }
  return total;
}

// pi(x) of the simulation design averaged over the N(0, 0.25^2) noise
double true_pi(double x1, double x2) {
  const double base = 0.5 * x1 + x2 + 2.0 * x1 * x2;
  double acc = 0.0;
  const int k = 400;
  for (int i = 0; i < k; ++i) {
    double z = -6.0 + 12.0 * (i + 0.5) / k;
    double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
    acc += phi * (12.0 / k) / (1.0 + std::exp(-(base + 0.25 * z)));
  }
  return acc;
}

}  // namespace

TEST_SUITE("complier_weights") {

TEST_CASE("sixth-order kernel shape and moments") {
  CHECK(kernel6_1d(0.0) == doctest::Approx(525.0 / 256.0).epsilon(1e-15));
  CHECK(kernel6_1d(1.0) == 0.0);
  CHECK(kernel6_1d(-1.3) == 0.0);
  CHECK(kernel6_1d(0.4) == kernel6_1d(-0.4));
  CHECK(std::abs(integrate_kernel_moment(0) - 1.0) < 1e-10);
  CHECK(std::abs(integrate_kernel_moment(2)) < 1e-10);
  CHECK(std::abs(integrate_kernel_moment(4)) < 1e-10);
  CHECK(std::abs(integrate_kernel_moment(6)) > 1e-3);
  std::vector<double> u{0.2, -0.5};
  CHECK(kernel6(u) == doctest::Approx(kernel6_1d(0.2) * kernel6_1d(-0.5)));
}

TEST_CASE("pi-hat degenerate cases") {
  std::vector<Observation> obs;
  for (int i = 0; i < 10; ++i) obs.push_back({1.0 + i, 1, 0, 1, 1, {0.5}});
  std::vector<double> x{0.5};
  CHECK(estimate_pi(x, Dataset(obs, one_cont()), 0.1) == 1.0);
  for (int i = 0; i < 4; ++i) obs[i].w = obs[i].z = 0;
  CHECK(estimate_pi(x, Dataset(obs, one_cont()), 0.1) == doctest::Approx(0.6));
  std::vector<double> far{3.0};
  CHECK_THROWS_AS(estimate_pi(far, Dataset(obs, one_cont()), 0.1), std::runtime_error);
}

TEST_CASE("pi-hat recovers the design propensity") {
  SimDesign d = preset_design("lowdep");
  d.n = 2000;
  SimData sd = generate_dataset(d, 17);
  double mae = 0.0;
  for (const auto& o : sd.data.observations())
    mae += std::abs(estimate_pi(o.x, sd.data, 0.1) - true_pi(o.x[0], o.x[1]));
  mae /= sd.data.n();
  CHECK(mae < 0.1);
}

TEST_CASE("nu-hat constant strata") {
  std::vector<Observation> obs;
  for (int i = 0; i < 20; ++i) {
    int z = i % 2;
    obs.push_back({1.0 + 0.01 * i, 1, 0, z, z, {0.5}});
  }
  Dataset d(obs, one_cont());
  std::vector<double> x{0.5};
  CHECK(estimate_nu(1.1, x, 1, 0, 1, d, 0.5) == 1.0);
  CHECK(estimate_nu(1.1, x, 1, 0, 0, d, 0.5) == 0.0);
}

TEST_CASE("nu-hat empty stratum falls back to the pooled regression") {
  std::vector<Observation> obs;
  for (int i = 0; i < 20; ++i) obs.push_back({1.0 + 0.01 * i, 1, 0, 1, i < 15 ? 1 : 0, {0.5}});
  Dataset d(obs, one_cont());
  std::vector<double> x{0.5};
  CHECK(estimate_nu(1.1, x, 0, 1, 0, d, 1.0) == doctest::Approx(estimate_nu(1.1, x, 1, 0, 1, d, 1.0)));
}

TEST_CASE("nu-hat tracks a smooth conditional probability") {
  auto nu = [](double y, double x) { return 0.2 + 0.6 / (1.0 + std::exp(-4.0 * (y + x - 1.0))); };
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Observation> obs;
  for (int i = 0; i < 2000; ++i) {
    double y = 0.01 + u(rng), x = u(rng);
    obs.push_back({y, 1, 0, 1, u(rng) < nu(y, x) ? 1 : 0, {x}});
  }
  Dataset d(obs, one_cont());
  for (double y : {0.35, 0.5, 0.65})
    for (double x : {0.35, 0.5, 0.65}) {
      std::vector<double> xv{x};
      CHECK(std::abs(estimate_nu(y, xv, 1, 0, 1, d, 0.15) - nu(y, x)) < 0.15);
    }
}

TEST_CASE("kappa under perfect compliance and a lone defier") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Observation> obs;
  for (int i = 0; i < 200; ++i) {
    int w = u(rng) < 0.5 ? 1 : 0;
    obs.push_back({0.1 + u(rng), 1, 0, w, w, {u(rng)}});
  }
  Dataset d(obs, one_cont());
  auto bounds = TruncationBounds::for_sample_size(d.n());
  KernelConfig cfg;
  cfg.h1 = cfg.h2 = 0.3;
  auto k = estimate_kappa(d, cfg, bounds);
  for (double v : k.kappa) CHECK(v == doctest::Approx(1.0 - 10.0 / 200.0));

  // a single Z=1, W=0 row alone in its (delta1, delta2) stratum
  obs.push_back({0.5, 0, 1, 1, 0, {0.5}});
  Dataset d2(obs, one_cont());
  auto b2 = TruncationBounds::for_sample_size(d2.n());
  auto k2 = estimate_kappa(d2, cfg, b2);
  CHECK(k2.kappa.back() == doctest::Approx(b2.a_l));
}

TEST_CASE("kappa stays in the truncation band and averages near the complier share") {
  SimDesign d = preset_design("lowdep");
  SimData sd = generate_dataset(d, 23);
  auto bounds = TruncationBounds::for_sample_size(sd.data.n());
  KernelConfig cfg = cross_validate_bandwidths(sd.data, default_bandwidth_grid(), 10, 23);
  auto k = estimate_kappa(sd.data, cfg, bounds);
  for (double v : k.kappa) {
    CHECK(v >= bounds.a_l);
    CHECK(v <= bounds.a_u);
  }
  double mean = std::accumulate(k.kappa.begin(), k.kappa.end(), 0.0) / k.size();
  CHECK(std::abs(mean - 2.0 / 3.0) < 0.1);
}

TEST_CASE("kappa is permutation invariant") {
  SimDesign d = preset_design("lowdep");
  d.n = 300;
  SimData sd = generate_dataset(d, 4);
  std::vector<std::size_t> perm(sd.data.n());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(1);
  std::shuffle(perm.begin(), perm.end(), rng);
  KernelConfig cfg;
  cfg.h1 = cfg.h2 = 0.3;
  auto b = TruncationBounds::for_sample_size(sd.data.n());
  auto k = estimate_kappa(sd.data, cfg, b);
  auto kp = estimate_kappa(sd.data.subset(perm), cfg, b);
  for (std::size_t i = 0; i < perm.size(); ++i)
    CHECK(kp.kappa[i] == doctest::Approx(k.kappa[perm[i]]).epsilon(1e-12));
}

TEST_CASE("cross-validation") {
  SimDesign d = preset_design("lowdep");
  SimData sd = generate_dataset(d, 31);
  auto single = cross_validate_bandwidths(sd.data, {0.37}, 10, 1);
  CHECK(single.h1 == 0.37);
  CHECK(single.h2 == 0.37);

  std::vector<double> grid;
  for (int i = 1; i <= 20; ++i) grid.push_back(0.05 * i);
  auto a = cross_validate_bandwidths(sd.data, grid, 10, 8);
  auto b = cross_validate_bandwidths(sd.data, grid, 10, 8);
  CHECK(a.h1 == b.h1);
  CHECK(a.h2 == b.h2);

  auto curve = cross_validation_curve(sd.data, grid, 10, 8);
  auto pos = std::find(grid.begin(), grid.end(), a.h1) - grid.begin();
  CHECK(curve.pi_loss[pos] <= curve.pi_loss.front());
  CHECK(curve.pi_loss[pos] <= curve.pi_loss.back());
  CHECK(curve.pi_loss[pos] < std::max(curve.pi_loss.front(), curve.pi_loss.back()));
}

TEST_CASE("configuration checks") {
  KernelConfig bad;
  bad.h1 = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  TruncationBounds tb{0.6, 0.4};
  CHECK_THROWS_AS(tb.validate(), std::invalid_argument);
  CHECK(default_bandwidth_grid().size() == 100);
  CHECK(default_bandwidth_grid().back() == doctest::Approx(1.0));
}

}
