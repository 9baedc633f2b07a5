#include "cchr/profile_hazard.hpp"

#include "detail/model_terms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cchr {

StepHazard::StepHazard(std::vector<double> times, std::vector<double> increments,
                       double horizon)
    : times_(std::move(times)), increments_(std::move(increments)), horizon_(horizon) {
  if (times_.size() != increments_.size())
    throw std::invalid_argument("StepHazard: times and increments differ in length");
  cumsum_.resize(times_.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < times_.size(); ++k) {
    if (k > 0 && !(times_[k] > times_[k - 1]))
      throw std::invalid_argument("StepHazard: times must be strictly increasing");
    if (!(increments_[k] >= 0.0))
      throw std::invalid_argument("StepHazard: negative increment");
    acc += increments_[k];
    cumsum_[k] = acc;
  }
}

double StepHazard::cumulative(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return 0.0;
  return cumsum_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

double StepHazard::jump(double t) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.end() || *it != t) return 0.0;
  return increments_[static_cast<std::size_t>(it - times_.begin())];
}

double eval_hazard(const StepHazard& hazard, double t) { return hazard.cumulative(t); }

double psi(const Theta& theta, double lam, double y, int z, std::span<const double> x) {
  if (!(y > 0.0)) throw std::domain_error("psi: y must be positive");
  const double lp = linear_predictor(theta.ph, z, x);
  const double loc = censoring_location(theta.cens, z, x);
  const double value = detail::psi_row(theta, lam, lp, std::exp(lp), std::log(y), loc);
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "psi is not finite at y=" << y << ", z=" << z << ", lam=" << lam;
    throw std::runtime_error(msg.str());
  }
  return value;
}

StepHazard fit_step_hazard(const Theta& theta, const Dataset& data,
                           std::span<const double> weights,
                           const HazardOptions& options) {
  if (weights.size() != data.n())
    throw std::invalid_argument("fit_step_hazard: weights misaligned with data");
  const detail::Rows rows(data);
  const detail::Predictors pred(rows, theta);

  std::vector<std::size_t> order(rows.n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rows.y[a] < rows.y[b]; });
  const double horizon =
      options.horizon.value_or(*std::max_element(rows.y.begin(), rows.y.end()));

  std::vector<double> times;
  std::vector<double> increments;
  double lam_prev = 0.0;
  bool any_event = false;
  std::size_t start = 0;  // first index (in `order`) still at risk
  while (start < rows.n) {
    // group of rows tied at this time
    const double t = rows.y[order[start]];
    std::size_t stop = start;
    double numerator = 0.0;
    while (stop < rows.n && rows.y[order[stop]] == t) {
      std::size_t i = order[stop];
      if (rows.delta1[i] == 1) {
        any_event = true;
        numerator += weights[i];
      }
      ++stop;
    }
    if (t > horizon) break;
    if (numerator > 0.0) {
      const double log_t = std::log(t);
      double denominator = 0.0;
      for (std::size_t r = start; r < rows.n; ++r) {
        std::size_t i = order[r];
        if (weights[i] == 0.0) continue;
        denominator += weights[i] * std::exp(detail::psi_row(theta, lam_prev, pred.lp[i],
                                                             pred.exp_lp[i], log_t,
                                                             pred.cens_loc[i]));
      }
      if (!(denominator > 0.0) || !std::isfinite(denominator)) {
        std::ostringstream msg;
        msg << "fit_step_hazard: zero or non-finite risk-set denominator at t=" << t;
        throw std::runtime_error(msg.str());
      }
      const double inc = numerator / denominator;
      if (inc > options.max_increment) {
        std::ostringstream msg;
        msg << "fit_step_hazard: increment " << inc << " at t=" << t
            << " exceeds the cap " << options.max_increment;
        throw std::runtime_error(msg.str());
      }
      times.push_back(t);
      increments.push_back(inc);
      lam_prev += inc;
    }
    start = stop;
  }
  if (!any_event) throw std::invalid_argument("fit_step_hazard: no events in the data");
  return StepHazard(std::move(times), std::move(increments), horizon);
}

}  // namespace cchr
