#pragma once

#include "cchr/report.hpp"
#include "cchr/sim_engine.hpp"

#include <iosfwd>

namespace cchr {

/// Keys: preset (base design, default "lowdep"), copula, censoring,
/// params_co, params_nc, complier_prob, admin_upper, n, replications,
/// estimator, fit_copula, fit_censoring, h1, h2, cross_validate, n_starts,
/// max_outer_iters, outer_tol. Missing keys keep the base design's value.
SimDesign design_from_json(const json& j);
json design_to_json(const SimDesign& d);

/// parameter,truth,bias,esd,rmse,cr
void write_metrics_table(std::ostream& out, const MetricsReport& rep);
/// axis,value,estimator,parameter,truth,bias,esd,rmse,cr
void write_sweep_table(std::ostream& out, SweepAxis axis, const std::vector<SweepRow>& rows);
/// replicate,<parameter names...>
void write_estimates(std::ostream& out, const MCResult& mc);

}  // namespace cchr
