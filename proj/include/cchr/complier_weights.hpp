#pragma once

#include "cchr/data_model.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace cchr {

/// Univariate sixth-order Epanechnikov kernel on [-1, 1].
double kernel6_1d(double t);
/// Product kernel over the coordinates of u.
double kernel6(std::span<const double> u);

struct KernelConfig {
  double h1 = 0.1;  // pi-hat
  double h2 = 0.1;  // nu-hat
  std::vector<double> grid;
  int folds = 10;

  void validate() const;
};

/// The default CV grid {0.01, 0.02, ..., 1}.
std::vector<double> default_bandwidth_grid();

struct TruncationBounds {
  double a_l = 0.0;
  double a_u = 1.0;

  /// a_l = 10/n, a_u = 1 - 10/n.
  static TruncationBounds for_sample_size(std::size_t n);
  void validate() const;
};

struct WeightVector {
  std::vector<double> kappa;

  std::size_t size() const { return kappa.size(); }
  std::span<const double> span() const { return kappa; }
};

/// Nadaraya-Watson estimate of P(W = 1 | X = x) within the discrete cell of
/// x, clamped to [0, 1]. Throws std::runtime_error on an empty cell or a
/// nonpositive kernel denominator.
double estimate_pi(std::span<const double> x, const Dataset& data, double h1);

/// Nadaraya-Watson estimate of P(W = 1 | Y = y, X = x) within the stratum
/// (delta1 = j, delta2 = l, Z = k, discrete cell of x), kernel on (y, X_c),
/// clamped to [0, 1]. An empty stratum or a nonpositive denominator falls
/// back to the same regression on the whole sample.
double estimate_nu(double y, std::span<const double> x, int j, int l, int k,
                   const Dataset& data, double h2);

/// kappa_i = 1 - Z(1 - nu)/(1 - pi) - (1 - Z) nu / pi, with pi clamped to
/// [a_l, a_u] first and kappa clamped to [a_l, a_u] after.
WeightVector estimate_kappa(const Dataset& data, const KernelConfig& config,
                            const TruncationBounds& bounds, int jobs = 1);

/// Out-of-fold mean squared error of W for each grid bandwidth, for the
/// pi-hat regression and the stratified nu-hat regression.
struct CVCurve {
  std::vector<double> grid;
  std::vector<double> pi_loss;
  std::vector<double> nu_loss;
};
CVCurve cross_validation_curve(const Dataset& data, const std::vector<double>& grid,
                               int folds = 10, std::uint64_t seed = 0);

/// K-fold least-squares cross-validation of h1 and h2 over `grid`, each
/// chosen separately. Ties go to the larger bandwidth.
KernelConfig cross_validate_bandwidths(const Dataset& data,
                                       const std::vector<double>& grid,
                                       int folds = 10, std::uint64_t seed = 0);

}  // namespace cchr
