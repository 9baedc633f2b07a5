#pragma once

#include "cchr/copula.hpp"
#include "cchr/data_model.hpp"
#include "cchr/optimizer.hpp"
#include "cchr/survival_margins.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace cchr {

/// Generating parameters of one latent group.
struct GroupParams {
  ParametricBaseline baseline;
  double tau = 0.0;
  double alpha = 0.0;
  std::vector<double> beta;  // 2 entries (X1, X2)
  std::vector<double> eta;   // 4 entries (intercept, z, X1, X2)
  double nu = 1.0;

  void validate(CopulaFamily family) const;
  bool operator==(const GroupParams&) const = default;
};

struct SimDesign {
  CopulaFamily copula = CopulaFamily::frank;
  CensoringFamily censoring = CensoringFamily::weibull;
  GroupParams params_co;
  GroupParams params_nc;  // always-takers and never-takers
  double complier_prob = 2.0 / 3.0;
  double admin_upper = 15.0;
  std::size_t n = 1000;
  int replications = 50;
  WeightMode estimator = WeightMode::proposed;
  /// Families used for fitting; differ from the generating ones to study
  /// misspecification.
  ModelChoice fit_model;
  FitOptions fit;

  void validate() const;
};

/// "lowdep" or "highdep" (Frank copula, Weibull censoring).
SimDesign preset_design(std::string_view name);

enum class Group { complier = 0, always_taker = 1, never_taker = 2 };

struct SimData {
  Dataset data;
  std::vector<Group> groups;
  /// 1 for compliers, 0 otherwise; the oracle weights.
  std::vector<int> complier_labels() const;
};

/// Covariate schema of the simulation designs: x1 discrete, x2 continuous.
CovariateSchema sim_schema();

SimData generate_dataset(const SimDesign& design, std::uint64_t seed);

/// Draws latent (T, C) for a complier at fixed (z, x); used to check the
/// generator's marginals and dependence.
std::pair<double, double> draw_latent(const SimDesign& design, const GroupParams& g,
                                      int z, std::span<const double> x,
                                      std::mt19937_64& rng);

/// Complier parameters as a Theta in the fit families' layout.
Theta true_theta(const SimDesign& design);

struct ParamMetrics {
  std::string name;
  double truth = 0.0;
  double bias = 0.0;
  double esd = 0.0;
  double rmse = 0.0;
  double cr = std::numeric_limits<double>::quiet_NaN();
};

struct MetricsReport {
  std::vector<ParamMetrics> params;
  int replications = 0;
  int failures = 0;

  const ParamMetrics& at(std::string_view name) const;
};

/// Bias, ESD (denominator R - 1) and RMSE per parameter. `estimates` holds
/// one parameter vector per replicate in the order of `names`.
MetricsReport compute_metrics(const std::vector<std::string>& names,
                              const std::vector<double>& truth,
                              const std::vector<std::vector<double>>& estimates);

/// Warp-speed coverage: one bootstrap estimate per replicate. Returns the
/// coverage rate per parameter.
std::vector<double> coverage_warp_speed(const std::vector<std::vector<double>>& estimates,
                                        const std::vector<std::vector<double>>& boot,
                                        const std::vector<double>& truth);

struct MCOptions {
  int jobs = 1;
  /// Also draw one bootstrap resample per replicate and fill in CR.
  bool warp_speed = false;
};

struct MCResult {
  MetricsReport metrics;
  std::vector<std::string> names;
  std::vector<std::vector<double>> estimates;  // successful replicates only
  std::vector<std::uint64_t> replicate_ids;
  std::vector<std::string> errors;
};

MCResult run_mc(const SimDesign& design, std::uint64_t seed, const MCOptions& options = {});

enum class SweepAxis { complier_ratio, sample_size };
std::string_view to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view name);
std::vector<double> default_axis_values(SweepAxis axis);

struct SweepRow {
  double axis_value = 0.0;
  WeightMode estimator = WeightMode::proposed;
  MetricsReport metrics;
};

/// One MetricsReport per axis value and estimator.
std::vector<SweepRow> sweep(const SimDesign& templ, SweepAxis axis,
                            const std::vector<double>& values,
                            const std::vector<WeightMode>& estimators, std::uint64_t seed,
                            const MCOptions& options = {});

/// O(n log n) Kendall tau-b.
double kendall_tau(std::span<const double> a, std::span<const double> b);

}  // namespace cchr
