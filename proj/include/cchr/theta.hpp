#pragma once

#include "cchr/copula.hpp"
#include "cchr/survival_margins.hpp"

#include <string>
#include <vector>

namespace cchr {

/// Finite-dimensional model parameter: PH coefficients for T, the
/// censoring model for C and the copula (carried on the Kendall scale).
struct Theta {
  PHParams ph;
  CensoringModel cens;
  CopulaSpec copula;
  double tau = 0.0;

  /// Builds the copula from (family, tau).
  static Theta make(PHParams ph, CensoringModel cens, CopulaFamily family, double tau);

  std::size_t m() const { return ph.beta.size(); }
  CopulaFamily family() const { return copula.family; }

  /// Natural-scale vector (alpha, beta_1..m, eta_0..m+1, nu[, tau]); tau is
  /// omitted for the independence copula.
  std::vector<double> to_vector() const;
  static Theta from_vector(const std::vector<double>& values, std::size_t m,
                           CopulaFamily family, CensoringFamily censoring);

  bool operator==(const Theta&) const = default;
};

/// Labels matching Theta::to_vector: alpha, beta1.., eta0.., nu, tau.
std::vector<std::string> parameter_names(std::size_t m, CopulaFamily family);

}  // namespace cchr
