#pragma once

#include "cchr/complier_weights.hpp"
#include "cchr/data_model.hpp"
#include "cchr/profile_hazard.hpp"
#include "cchr/theta.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace cchr {

struct OptimizerConfig {
  int n_starts = 100;
  int max_outer_iters = 120;
  /// Sup-norm of |theta_new - theta_old| / max(1, |theta_old|).
  double outer_tol = 1e-6;

  // Nelder-Mead on the unconstrained scale: stop when the simplex size
  // falls below the tolerance or after the iteration cap.
  double inner_tol = 1e-7;
  int inner_max_iter = 4000;
  double start_tol = 1e-3;
  int start_max_iter = 400;

  // Start-sampling box.
  double coef_bound = 2.0;
  double nu_lower = 0.2;
  double nu_upper = 3.0;
  double tau_fraction = 0.9;

  std::optional<double> horizon;
  std::uint64_t seed = 1;
  int jobs = 1;

  void validate() const;
};

struct ModelChoice {
  CopulaFamily copula = CopulaFamily::frank;
  CensoringFamily censoring = CensoringFamily::weibull;
};

struct FitResult {
  Theta theta_hat;
  StepHazard hazard;
  double loglik = 0.0;
  bool converged = false;
  int n_outer = 0;
  WeightVector weights_used;
  /// Weighted log-likelihood before and after each outer maximization, both
  /// at the hazard that maximization used.
  struct OuterStep {
    double before = 0.0;
    double after = 0.0;
  };
  std::vector<OuterStep> outer_trace;
};

/// Kendall-tau interval searched by the optimizer for a family.
TauInterval optimizer_tau_range(CopulaFamily family);

/// Multi-start weighted profile maximization followed by alternating hazard
/// refits and theta maximizations. Throws std::runtime_error when no start
/// yields a finite objective.
FitResult maximize(const Dataset& data, const WeightVector& weights,
                   const OptimizerConfig& config, ModelChoice model);

/// Single maximization from a given theta (no multi-start).
FitResult maximize_from(const Dataset& data, const WeightVector& weights,
                        const OptimizerConfig& config, const Theta& start);

enum class WeightMode { proposed, naive, oracle };
std::string_view to_string(WeightMode mode);
WeightMode parse_weight_mode(std::string_view name);

struct FitOptions {
  ModelChoice model;
  WeightMode mode = WeightMode::proposed;
  KernelConfig kernel;
  /// Run cross-validation for (h1, h2) instead of using kernel.h1/h2.
  bool cross_validate = false;
  std::optional<TruncationBounds> bounds;  // defaults from n
  OptimizerConfig optimizer;
};

/// Weights for the chosen mode: kernel estimates (proposed), all ones
/// (naive) or the supplied group labels (oracle; 1 = complier).
WeightVector make_weights(const Dataset& data, const FitOptions& options,
                          const std::vector<int>& groups = {});

/// First stage (weights) then maximize.
FitResult fit_two_step(const Dataset& data, const FitOptions& options,
                       const std::vector<int>& groups = {});

}  // namespace cchr
