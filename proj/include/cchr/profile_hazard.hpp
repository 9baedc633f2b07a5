#pragma once

#include "cchr/data_model.hpp"
#include "cchr/theta.hpp"

#include <optional>
#include <span>
#include <vector>

namespace cchr {

/// Right-continuous step function for the complier baseline cumulative
/// hazard: jumps `increments[k]` at strictly increasing `times[k]`, zero
/// before the first jump. `horizon` is the last time the estimate covers.
class StepHazard {
 public:
  StepHazard() = default;
  StepHazard(std::vector<double> times, std::vector<double> increments,
             double horizon);

  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& increments() const { return increments_; }
  double horizon() const { return horizon_; }
  std::size_t size() const { return times_.size(); }

  /// Lambda(t) = sum of increments at times <= t.
  double cumulative(double t) const;
  /// Jump size at exactly t (0 if t is not a jump time).
  double jump(double t) const;

  bool operator==(const StepHazard&) const = default;

 private:
  std::vector<double> times_;
  std::vector<double> increments_;
  std::vector<double> cumsum_;
  double horizon_ = 0.0;
};

double eval_hazard(const StepHazard& hazard, double t);

/// log of the crude-to-baseline hazard ratio for one subject:
/// z a + x'b - lam e^{z a + x'b} - log S(y) + log(1 - zeta_1(F_T, F_C)),
/// where F_T uses Lambda(y) = lam. Throws std::runtime_error on a
/// non-finite result.
double psi(const Theta& theta, double lam, double y, int z, std::span<const double> x);

struct HazardOptions {
  /// Upper end of the estimation window; defaults to max Y.
  std::optional<double> horizon;
  /// Increments above this raise an error.
  double max_increment = 1e3;
};

/// Weighted forward recursion: at each distinct event time t_k,
///   dLambda(t_k) = sum_i w_i dI_i(t_k) / sum_{Y_i >= t_k} w_i exp(psi_i(Lambda(t_{k-1}))).
/// Tied event times share one jump. Times whose weighted event count is
/// zero get no jump.
StepHazard fit_step_hazard(const Theta& theta, const Dataset& data,
                           std::span<const double> weights,
                           const HazardOptions& options = {});

}  // namespace cchr
