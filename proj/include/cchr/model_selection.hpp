#pragma once

#include "cchr/optimizer.hpp"

#include <string>
#include <vector>

namespace cchr {

struct SelectionEntry {
  ModelChoice model;
  bool ok = false;
  FitResult fit;
  std::string error;
  int rank = 0;  // 1 = highest log-likelihood; 0 for failed fits
};

/// The 7 x 3 copula/censoring combinations.
std::vector<ModelChoice> candidate_models();

/// Fits every candidate with shared first-stage weights and ranks the
/// successful fits by weighted log-likelihood, best first. Failed fits
/// follow with rank 0.
std::vector<SelectionEntry> select_model(const Dataset& data, const FitOptions& options,
                                         const std::vector<int>& groups = {});

}  // namespace cchr
