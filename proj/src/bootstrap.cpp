#include "cchr/bootstrap.hpp"

#include "cchr/parallel.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace cchr {

std::vector<double> default_nulls(const std::vector<std::string>& names) {
  std::vector<double> out;
  for (const auto& n : names) out.push_back(n == "nu" ? 1.0 : 0.0);
  return out;
}

double p_value(double estimate, double null_value, std::span<const double> boot) {
  if (boot.empty()) throw std::invalid_argument("p_value: no bootstrap estimates");
  const double ref = std::abs(estimate - null_value);
  std::size_t count = 0;
  for (double b : boot)
    if (std::abs(b - estimate) > ref) ++count;
  return static_cast<double>(count) / static_cast<double>(boot.size());
}

BootstrapResult bootstrap(const Dataset& data, const FitOptions& options,
                          const FitResult& point, int B, std::uint64_t seed,
                          const std::vector<int>& groups,
                          std::optional<std::vector<double>> nulls) {
  if (B < 1) throw std::invalid_argument("bootstrap: B must be at least 1");
  BootstrapResult res;
  res.B = B;
  res.names = parameter_names(data.schema().m(), point.theta_hat.family());
  res.point = point.theta_hat.to_vector();
  res.nulls = nulls.value_or(default_nulls(res.names));
  if (res.nulls.size() != res.names.size())
    throw std::invalid_argument("bootstrap: one null value per parameter required");

  struct Slot {
    bool ok = false;
    std::vector<double> est;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(B));
  const std::size_t n = data.n();
  parallel_for(slots.size(), options.optimizer.jobs, [&](std::size_t b) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(b)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> rows(n);
    for (auto& r : rows) r = pick(rng);
    std::vector<int> g;
    if (!groups.empty())
      for (auto r : rows) g.push_back(groups.at(r));
    FitOptions fo = options;
    fo.optimizer.seed = rng();
    fo.optimizer.jobs = 1;
    try {
      slots[b].est = fit_two_step(data.subset(rows), fo, g).theta_hat.to_vector();
      slots[b].ok = true;
    } catch (const std::exception&) {
    }
  });
  for (auto& s : slots) {
    if (s.ok)
      res.estimates.push_back(std::move(s.est));
    else
      ++res.failures;
  }
  res.unreliable = res.failures > 0.05 * B;
  const std::size_t k = res.names.size();
  const std::size_t ok = res.estimates.size();
  res.degenerate = ok < 2;
  res.se.assign(k, 0.0);
  res.p_values.assign(k, std::nan(""));
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> col;
    for (const auto& e : res.estimates) col.push_back(e[j]);
    if (ok >= 2) {
      double mean = 0.0;
      for (double v : col) mean += v;
      mean /= static_cast<double>(ok);
      double ss = 0.0;
      for (double v : col) ss += (v - mean) * (v - mean);
      res.se[j] = std::sqrt(ss / static_cast<double>(ok - 1));
    }
    if (ok >= 1) res.p_values[j] = p_value(res.point[j], res.nulls[j], col);
  }
  return res;
}

}  // namespace cchr
