#pragma once

#include "cchr/bootstrap.hpp"
#include "cchr/model_selection.hpp"
#include "cchr/optimizer.hpp"

#include <json.hpp>

namespace cchr {

using json = nlohmann::json;

/// {"copula", "censoring", "theta": {name: value}, "tau", "loglik",
///  "converged", "n_outer", "hazard": {"time": [...], "increment": [...],
///  "horizon"}, "weights": [...]}
json fit_to_json(const FitResult& fit);
/// Inverse of fit_to_json. The outer trace is not stored.
FitResult fit_from_json(const json& j);

json bootstrap_to_json(const BootstrapResult& boot);
BootstrapResult bootstrap_from_json(const json& j);

/// Ranked table plus the best model's full fit.
json selection_to_json(const std::vector<SelectionEntry>& entries);

}  // namespace cchr
