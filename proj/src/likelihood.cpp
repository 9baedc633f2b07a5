#include "cchr/likelihood.hpp"

#include "detail/model_terms.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cchr {

namespace {

double contrib(const Observation& o, const Theta& theta, const StepHazard& hazard) {
  double y = o.y;
  int d1 = o.delta1, d2 = o.delta2;
  if (y > hazard.horizon()) {
    y = hazard.horizon();
    d1 = d2 = 0;
  }
  const double lp = linear_predictor(theta.ph, o.z, o.x);
  const double loc = censoring_location(theta.cens, o.z, o.x);
  const double lam = hazard.cumulative(y);
  const double jump = d1 == 1 ? hazard.jump(y) : 0.0;
  return detail::contrib_row(theta, lam, jump, lp, std::exp(lp), std::log(y), loc, d1, d2);
}

}  // namespace

double loglik_contrib(const Observation& o, const Theta& theta, const StepHazard& hazard) {
  const double v = contrib(o, theta, hazard);
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << "non-finite log-likelihood contribution at y=" << o.y;
    throw std::runtime_error(msg.str());
  }
  return v;
}

double weighted_loglik(const Dataset& data, std::span<const double> weights,
                       const Theta& theta, const StepHazard& hazard) {
  if (weights.size() != data.n())
    throw std::invalid_argument("weighted_loglik: weights misaligned with data");
  double total = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (weights[i] == 0.0) continue;
    double v;
    try {
      v = loglik_contrib(data[i], theta, hazard);
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("observation " + std::to_string(i + 1) + ": " + e.what());
    }
    total += weights[i] * std::max(v, detail::kLogFloor);
  }
  return total;
}

}  // namespace cchr
