#include "cchr/model_selection.hpp"

#include "cchr/parallel.hpp"

#include <algorithm>

namespace cchr {

std::vector<ModelChoice> candidate_models() {
  std::vector<ModelChoice> out;
  for (auto c : parametric_copula_families())
    for (auto f : censoring_families()) out.push_back({c, f});
  return out;
}

std::vector<SelectionEntry> select_model(const Dataset& data, const FitOptions& options,
                                         const std::vector<int>& groups) {
  const WeightVector w = make_weights(data, options, groups);
  auto models = candidate_models();
  std::vector<SelectionEntry> entries(models.size());
  parallel_for(models.size(), options.optimizer.jobs, [&](std::size_t k) {
    entries[k].model = models[k];
    OptimizerConfig cfg = options.optimizer;
    cfg.jobs = 1;
    try {
      entries[k].fit = maximize(data, w, cfg, models[k]);
      entries[k].ok = true;
    } catch (const std::exception& e) {
      entries[k].error = e.what();
    }
  });
  std::stable_sort(entries.begin(), entries.end(),
                   [](const SelectionEntry& a, const SelectionEntry& b) {
                     if (a.ok != b.ok) return a.ok;
                     return a.ok && a.fit.loglik > b.fit.loglik;
                   });
  int rank = 0;
  for (auto& e : entries)
    if (e.ok) e.rank = ++rank;
  return entries;
}

}  // namespace cchr
