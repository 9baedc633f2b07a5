#pragma once

namespace cchr {

double normal_cdf(double x);
/// Upper tail 1 - Phi(x), accurate for large x.
double normal_sf(double x);
double normal_log_pdf(double x);
double normal_quantile(double p);

/// P(X <= h, Y <= k) for a standard bivariate normal with correlation rho.
/// Genz's adaptation of the Drezner-Wesolowsky method; absolute error
/// around 1e-15.
double bivariate_normal_cdf(double h, double k, double rho);

}  // namespace cchr
