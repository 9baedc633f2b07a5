#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace cchr {

/// Proportional-hazards coefficients for T: treatment effect alpha and
/// covariate effects beta.
struct PHParams {
  double alpha = 0.0;
  std::vector<double> beta;

  bool operator==(const PHParams&) const = default;
};

/// Weibull-type baseline Lambda(t) = scale * t^shape, used to simulate.
struct ParametricBaseline {
  double scale = 1.0;
  double shape = 1.0;

  double cumulative(double t) const;
  double inverse(double cumulative_hazard) const;
  bool operator==(const ParametricBaseline&) const = default;
};

enum class CensoringFamily { weibull, lognormal, loglogistic };

std::string_view to_string(CensoringFamily family);
CensoringFamily parse_censoring_family(std::string_view name);
const std::vector<CensoringFamily>& censoring_families();

/// Log-location-scale model for C: log C = x~'eta + nu * eps, with
/// x~ = (1, z, x_1..x_m) and eps extreme-value (weibull), normal
/// (lognormal) or logistic (loglogistic).
struct CensoringModel {
  CensoringFamily family = CensoringFamily::weibull;
  std::vector<double> eta;
  double nu = 1.0;

  bool operator==(const CensoringModel&) const = default;
};

/// z*alpha + x'beta.
double linear_predictor(const PHParams& params, int z, std::span<const double> x);
/// cumhaz_at_t is Lambda(t); 1 - exp(-Lambda(t) exp(z alpha + x'beta)).
double ph_cdf(double cumhaz_at_t, int z, std::span<const double> x,
              const PHParams& params);
double ph_cdf(double t, int z, std::span<const double> x, const PHParams& params,
              const ParametricBaseline& base);
double ph_quantile(double p, int z, std::span<const double> x,
                   const PHParams& params, const ParametricBaseline& base);

/// exp(alpha), the complier causal hazard ratio.
double cchr(const PHParams& params);

/// x~'eta.
double censoring_location(const CensoringModel& model, int z,
                          std::span<const double> x);

// Standardized error law of the log-location-scale family.
double error_cdf(CensoringFamily f, double s);
double error_log_sf(CensoringFamily f, double s);
double error_log_pdf(CensoringFamily f, double s);
double error_quantile(CensoringFamily f, double p);

/// Throws std::domain_error for c <= 0.
double cens_cdf(double c, int z, std::span<const double> x, const CensoringModel& model);
double cens_log_survival(double c, int z, std::span<const double> x,
                         const CensoringModel& model);
double cens_log_density(double c, int z, std::span<const double> x,
                        const CensoringModel& model);
double cens_quantile(double p, int z, std::span<const double> x,
                     const CensoringModel& model);

}  // namespace cchr
