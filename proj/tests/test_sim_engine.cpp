#include <stdexcept>
#include <doctest.h>

#include "cchr/sim_engine.hpp"
#include "cchr/sim_io.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace cchr;

namespace {

double brute_tau_b(const std::vector<double>& a, const std::vector<double>& b) {
  double conc = 0, disc = 0, ta = 0, tb = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      double s = (a[i] - a[j]) * (b[i] - b[j]);
      if (a[i] == a[j] && b[i] == b[j]) continue;
      if (a[i] == a[j]) ++ta;
      else if (b[i] == b[j]) ++tb;
      else if (s > 0) ++conc;
      else ++disc;
    }
  return (conc - disc) / std::sqrt((conc + disc + ta) * (conc + disc + tb));
}

}  // namespace

TEST_SUITE("sim_engine") {

TEST_CASE("presets carry the design tables") {
  SimDesign lo = preset_design("lowdep");
  CHECK(lo.params_co.baseline.scale == 0.5);
  CHECK(lo.params_co.baseline.shape == 0.75);
  CHECK(lo.params_co.tau == 0.25);
  CHECK(lo.params_co.alpha == -0.6);
  CHECK(lo.params_co.beta == std::vector<double>{1.0, 0.9});
  CHECK(lo.params_co.eta == std::vector<double>{1.5, -0.8, -2.0, 0.9});
  CHECK(lo.params_co.nu == 1.2);
  CHECK(lo.params_nc.baseline.shape == 0.6);
  CHECK(lo.params_nc.eta == std::vector<double>{1.3, -1.0, -1.8, 0.6});
  CHECK(lo.admin_upper == 15.0);
  SimDesign hi = preset_design("highdep");
  CHECK(hi.params_co.tau == 0.75);
  CHECK(hi.params_nc.baseline.scale == 0.2);
  CHECK(hi.admin_upper == 50.0);
  CHECK_THROWS_AS(preset_design("middep"), std::invalid_argument);
}

TEST_CASE("generated data: groups, determinism, rates") {
  SimDesign d = preset_design("lowdep");
  d.n = 10000;
  SimData a = generate_dataset(d, 99);
  SimData b = generate_dataset(d, 99);
  CHECK(a.data == b.data);
  CHECK(a.groups == b.groups);
  double co = 0, d2 = 0, adm = 0;
  for (std::size_t i = 0; i < a.data.n(); ++i) {
    const auto& o = a.data[i];
    switch (a.groups[i]) {
      case Group::complier: ++co; CHECK(o.z == o.w); break;
      case Group::always_taker: CHECK(o.z == 1); break;
      case Group::never_taker: CHECK(o.z == 0); break;
    }
    d2 += o.delta2;
    adm += (o.delta1 == 0 && o.delta2 == 0);
  }
  CHECK(std::abs(co / d.n - 2.0 / 3.0) < 0.02);
  CHECK(d2 / d.n >= 0.25);
  CHECK(d2 / d.n <= 0.45);
  CHECK(adm / d.n >= 0.03);
  CHECK(adm / d.n <= 0.12);
}

TEST_CASE("latent complier times follow the PH margin and the copula") {
  SimDesign d = preset_design("lowdep");
  std::vector<double> x{1.0, 0.5};
  std::mt19937_64 rng(1234);
  const std::size_t n = 100000;
  std::vector<double> t(n), c(n);
  for (std::size_t i = 0; i < n; ++i) std::tie(t[i], c[i]) = draw_latent(d, d.params_co, 1, x, rng);
  CHECK(std::abs(kendall_tau(t, c) - 0.25) < 0.02);
  std::sort(t.begin(), t.end());
  PHParams ph{d.params_co.alpha, d.params_co.beta};
  double ks = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double f = ph_cdf(t[i], 1, x, ph, d.params_co.baseline);
    ks = std::max({ks, std::abs(f - double(i) / n), std::abs(f - double(i + 1) / n)});
  }
  CHECK(ks < 0.02);
}

TEST_CASE("Kendall tau against the quadratic definition") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> v(0, 6);
  std::vector<double> a(300), b(300);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = v(rng);
    b[i] = v(rng) + 0.5 * a[i];
  }
  CHECK(kendall_tau(a, b) == doctest::Approx(brute_tau_b(a, b)).epsilon(1e-12));
  std::vector<double> up{1, 2, 3, 4}, down{4, 3, 2, 1};
  CHECK(kendall_tau(up, up) == doctest::Approx(1.0));
  CHECK(kendall_tau(up, down) == doctest::Approx(-1.0));
}

TEST_CASE("metrics of a degenerate estimator and the RMSE identity") {
  std::vector<std::string> names{"alpha", "nu"};
  std::vector<double> truth{-0.6, 1.2};
  std::vector<std::vector<double>> same(10, truth);
  auto rep = compute_metrics(names, truth, same);
  for (const auto& p : rep.params) {
    CHECK(p.bias == 0.0);
    CHECK(p.esd == 0.0);
    CHECK(p.rmse == 0.0);
  }
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd(0.1, 0.3);
  std::vector<std::vector<double>> est;
  for (int r = 0; r < 40; ++r) est.push_back({-0.6 + nd(rng), 1.2 + nd(rng)});
  auto m = compute_metrics(names, truth, est);
  const double R = 40;
  for (std::size_t k = 0; k < 2; ++k) {
    double mse = 0.0;
    for (const auto& e : est) mse += (e[k] - truth[k]) * (e[k] - truth[k]);
    CHECK(std::abs(m.params[k].rmse - std::sqrt(mse / R)) < 1e-12);
    CHECK(m.params[k].rmse * m.params[k].rmse ==
          doctest::Approx(m.params[k].bias * m.params[k].bias +
                          m.params[k].esd * m.params[k].esd * (R - 1) / R));
  }
  CHECK(m.at("nu").name == "nu");
}

TEST_CASE("warp-speed coverage") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> nd(0.0, 1.0);
  const int R = 10000;
  std::vector<std::vector<double>> est(R), boot(R);
  for (int r = 0; r < R; ++r) {
    est[r] = {nd(rng)};
    boot[r] = {est[r][0] + nd(rng)};
  }
  auto cr = coverage_warp_speed(est, boot, {0.0});
  CHECK(std::abs(cr[0] - 0.95) < 0.01);

  auto degenerate = coverage_warp_speed(est, est, {0.0});
  CHECK(degenerate[0] < 1e-3);

  auto scaled_est = est, scaled_boot = boot;
  for (int r = 0; r < R; ++r) {
    scaled_est[r][0] *= 3.0;
    scaled_boot[r][0] *= 3.0;
  }
  CHECK(coverage_warp_speed(scaled_est, scaled_boot, {0.0})[0] == cr[0]);
}

TEST_CASE("run_mc and sweep on a toy design") {
  SimDesign d = preset_design("lowdep");
  d.n = 150;
  d.replications = 2;
  d.estimator = WeightMode::oracle;
  d.fit.optimizer.n_starts = 1;
  d.fit.optimizer.outer_tol = 1e-4;
  auto a = run_mc(d, 5);
  auto b = run_mc(d, 5);
  CHECK(a.estimates == b.estimates);
  CHECK(a.estimates.size() + a.errors.size() == 2);
  CHECK(a.metrics.at("alpha").truth == -0.6);

  auto rows = sweep(d, SweepAxis::sample_size, {120, 160}, {WeightMode::naive}, 3);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].axis_value == 120);
  CHECK(rows[1].axis_value == 160);
  std::ostringstream out;
  write_sweep_table(out, SweepAxis::sample_size, rows);
  CHECK(out.str().find("sample_size,120,naive,alpha") != std::string::npos);
  CHECK(default_axis_values(SweepAxis::complier_ratio).size() == 5);
}

TEST_CASE("design files round trip") {
  SimDesign d = preset_design("highdep");
  d.n = 321;
  d.estimator = WeightMode::naive;
  d.fit_model.censoring = CensoringFamily::loglogistic;
  json j = design_to_json(d);
  j["preset"] = "highdep";
  SimDesign back = design_from_json(j);
  CHECK(back.params_co == d.params_co);
  CHECK(back.params_nc == d.params_nc);
  CHECK(back.n == 321);
  CHECK(back.estimator == WeightMode::naive);
  CHECK(back.fit_model.censoring == CensoringFamily::loglogistic);
  CHECK(design_from_json(json::object()).params_co == preset_design("lowdep").params_co);
}

}
