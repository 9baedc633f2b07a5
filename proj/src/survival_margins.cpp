#include "cchr/survival_margins.hpp"

#include "cchr/normal.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cchr {

double ParametricBaseline::cumulative(double t) const {
  return t <= 0.0 ? 0.0 : scale * std::pow(t, shape);
}

double ParametricBaseline::inverse(double cumulative_hazard) const {
  return std::pow(cumulative_hazard / scale, 1.0 / shape);
}

std::string_view to_string(CensoringFamily family) {
  switch (family) {
    case CensoringFamily::weibull: return "weibull";
    case CensoringFamily::lognormal: return "lognormal";
    case CensoringFamily::loglogistic: return "loglogistic";
  }
  return "unknown";
}

CensoringFamily parse_censoring_family(std::string_view name) {
  for (auto f : censoring_families())
    if (to_string(f) == name) return f;
  throw std::invalid_argument("unknown censoring family '" + std::string(name) + "'");
}

const std::vector<CensoringFamily>& censoring_families() {
  static const std::vector<CensoringFamily> all = {
      CensoringFamily::weibull, CensoringFamily::lognormal,
      CensoringFamily::loglogistic};
  return all;
}

double linear_predictor(const PHParams& params, int z, std::span<const double> x) {
  if (x.size() != params.beta.size())
    throw std::invalid_argument("covariate length does not match beta");
  double lp = z * params.alpha;
  for (std::size_t j = 0; j < x.size(); ++j) lp += x[j] * params.beta[j];
  return lp;
}

double ph_cdf(double cumhaz_at_t, int z, std::span<const double> x,
              const PHParams& params) {
  return -std::expm1(-cumhaz_at_t * std::exp(linear_predictor(params, z, x)));
}

double ph_cdf(double t, int z, std::span<const double> x, const PHParams& params,
              const ParametricBaseline& base) {
  return ph_cdf(base.cumulative(t), z, x, params);
}

double ph_quantile(double p, int z, std::span<const double> x,
                   const PHParams& params, const ParametricBaseline& base) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("ph_quantile: p outside (0,1)");
  double cumhaz = -std::log1p(-p) * std::exp(-linear_predictor(params, z, x));
  return base.inverse(cumhaz);
}

double cchr(const PHParams& params) { return std::exp(params.alpha); }

double censoring_location(const CensoringModel& model, int z,
                          std::span<const double> x) {
  if (model.eta.size() != x.size() + 2)
    throw std::invalid_argument("eta length must be m + 2");
  double loc = model.eta[0] + z * model.eta[1];
  for (std::size_t j = 0; j < x.size(); ++j) loc += model.eta[j + 2] * x[j];
  return loc;
}

double error_cdf(CensoringFamily f, double s) {
  switch (f) {
    case CensoringFamily::weibull: return -std::expm1(-std::exp(s));
    case CensoringFamily::lognormal: return normal_cdf(s);
    case CensoringFamily::loglogistic: return 1.0 / (1.0 + std::exp(-s));
  }
  return 0.0;
}

double error_log_sf(CensoringFamily f, double s) {
  switch (f) {
    case CensoringFamily::weibull: return -std::exp(s);
    case CensoringFamily::lognormal: {
      double sf = normal_sf(s);
      if (sf > 0.0) return std::log(sf);
      // Mills-ratio asymptote deep in the upper tail
      return normal_log_pdf(s) - std::log(s);
    }
    case CensoringFamily::loglogistic:
      return s > 0.0 ? -s - std::log1p(std::exp(-s)) : -std::log1p(std::exp(s));
  }
  return 0.0;
}

double error_log_pdf(CensoringFamily f, double s) {
  switch (f) {
    case CensoringFamily::weibull: return s - std::exp(s);
    case CensoringFamily::lognormal: return normal_log_pdf(s);
    case CensoringFamily::loglogistic: {
      double a = std::abs(s);
      return -a - 2.0 * std::log1p(std::exp(-a));
    }
  }
  return 0.0;
}

double error_quantile(CensoringFamily f, double p) {
  switch (f) {
    case CensoringFamily::weibull: return std::log(-std::log1p(-p));
    case CensoringFamily::lognormal: return normal_quantile(p);
    case CensoringFamily::loglogistic: return std::log(p) - std::log1p(-p);
  }
  return 0.0;
}

namespace {
double standardized(double c, int z, std::span<const double> x,
                    const CensoringModel& model) {
  if (!(c > 0.0)) throw std::domain_error("censoring time must be positive");
  if (!(model.nu > 0.0)) throw std::domain_error("censoring scale nu must be positive");
  return (std::log(c) - censoring_location(model, z, x)) / model.nu;
}
}  // namespace

double cens_cdf(double c, int z, std::span<const double> x, const CensoringModel& model) {
  return error_cdf(model.family, standardized(c, z, x, model));
}

double cens_log_survival(double c, int z, std::span<const double> x,
                         const CensoringModel& model) {
  return error_log_sf(model.family, standardized(c, z, x, model));
}

double cens_log_density(double c, int z, std::span<const double> x,
                        const CensoringModel& model) {
  double s = standardized(c, z, x, model);
  return error_log_pdf(model.family, s) - std::log(model.nu) - std::log(c);
}

double cens_quantile(double p, int z, std::span<const double> x,
                     const CensoringModel& model) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("cens_quantile: p outside (0,1)");
  return std::exp(censoring_location(model, z, x) + model.nu * error_quantile(model.family, p));
}

}  // namespace cchr
