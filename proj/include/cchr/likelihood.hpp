#pragma once

#include "cchr/data_model.hpp"
#include "cchr/profile_hazard.hpp"
#include "cchr/theta.hpp"

#include <span>

namespace cchr {

/// Log-likelihood contribution of one observation. Observations beyond the
/// hazard horizon count as censored at the horizon. Throws
/// std::runtime_error on a non-finite value.
double loglik_contrib(const Observation& o, const Theta& theta, const StepHazard& hazard);

/// Sum of weights[i] * loglik_contrib(data[i]). Each contribution is
/// floored at log(1e-300); rows with zero weight are skipped.
double weighted_loglik(const Dataset& data, std::span<const double> weights,
                       const Theta& theta, const StepHazard& hazard);

}  // namespace cchr
