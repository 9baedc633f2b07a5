#include "cchr/sim_io.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace cchr {

namespace {

GroupParams group_from_json(const json& j, GroupParams g) {
  if (j.contains("baseline")) {
    g.baseline.scale = j["baseline"].value("scale", g.baseline.scale);
    g.baseline.shape = j["baseline"].value("shape", g.baseline.shape);
  }
  g.tau = j.value("tau", g.tau);
  g.alpha = j.value("alpha", g.alpha);
  g.beta = j.value("beta", g.beta);
  g.eta = j.value("eta", g.eta);
  g.nu = j.value("nu", g.nu);
  return g;
}

json group_to_json(const GroupParams& g) {
  return {{"baseline", {{"scale", g.baseline.scale}, {"shape", g.baseline.shape}}},
          {"tau", g.tau},
          {"alpha", g.alpha},
          {"beta", g.beta},
          {"eta", g.eta},
          {"nu", g.nu}};
}

void put(std::ostream& out, double v) {
  if (std::isnan(v))
    out << "NA";
  else
    out << v;
}

}  // namespace

SimDesign design_from_json(const json& j) {
  SimDesign d = preset_design(j.value("preset", std::string("lowdep")));
  if (j.contains("copula")) {
    d.copula = parse_copula_family(j["copula"].get<std::string>());
    d.fit_model.copula = d.copula;
  }
  if (j.contains("censoring")) {
    d.censoring = parse_censoring_family(j["censoring"].get<std::string>());
    d.fit_model.censoring = d.censoring;
  }
  if (j.contains("params_co")) d.params_co = group_from_json(j["params_co"], d.params_co);
  if (j.contains("params_nc")) d.params_nc = group_from_json(j["params_nc"], d.params_nc);
  d.complier_prob = j.value("complier_prob", d.complier_prob);
  d.admin_upper = j.value("admin_upper", d.admin_upper);
  d.n = j.value("n", d.n);
  d.replications = j.value("replications", d.replications);
  if (j.contains("estimator")) d.estimator = parse_weight_mode(j["estimator"].get<std::string>());
  if (j.contains("fit_copula"))
    d.fit_model.copula = parse_copula_family(j["fit_copula"].get<std::string>());
  if (j.contains("fit_censoring"))
    d.fit_model.censoring = parse_censoring_family(j["fit_censoring"].get<std::string>());
  d.fit.kernel.h1 = j.value("h1", d.fit.kernel.h1);
  d.fit.kernel.h2 = j.value("h2", d.fit.kernel.h2);
  d.fit.cross_validate = j.value("cross_validate", d.fit.cross_validate);
  d.fit.optimizer.n_starts = j.value("n_starts", d.fit.optimizer.n_starts);
  d.fit.optimizer.max_outer_iters = j.value("max_outer_iters", d.fit.optimizer.max_outer_iters);
  d.fit.optimizer.outer_tol = j.value("outer_tol", d.fit.optimizer.outer_tol);
  d.validate();
  return d;
}

json design_to_json(const SimDesign& d) {
  return {{"copula", std::string(to_string(d.copula))},
          {"censoring", std::string(to_string(d.censoring))},
          {"params_co", group_to_json(d.params_co)},
          {"params_nc", group_to_json(d.params_nc)},
          {"complier_prob", d.complier_prob},
          {"admin_upper", d.admin_upper},
          {"n", d.n},
          {"replications", d.replications},
          {"estimator", std::string(to_string(d.estimator))},
          {"fit_copula", std::string(to_string(d.fit_model.copula))},
          {"fit_censoring", std::string(to_string(d.fit_model.censoring))},
          {"h1", d.fit.kernel.h1},
          {"h2", d.fit.kernel.h2},
          {"cross_validate", d.fit.cross_validate},
          {"n_starts", d.fit.optimizer.n_starts},
          {"max_outer_iters", d.fit.optimizer.max_outer_iters},
          {"outer_tol", d.fit.optimizer.outer_tol}};
}

void write_metrics_table(std::ostream& out, const MetricsReport& rep) {
  out << std::setprecision(6);
  out << "parameter,truth,bias,esd,rmse,cr\n";
  for (const auto& p : rep.params) {
    out << p.name << ',';
    put(out, p.truth);
    out << ',';
    put(out, p.bias);
    out << ',';
    put(out, p.esd);
    out << ',';
    put(out, p.rmse);
    out << ',';
    put(out, p.cr);
    out << '\n';
  }
}

void write_sweep_table(std::ostream& out, SweepAxis axis, const std::vector<SweepRow>& rows) {
  out << std::setprecision(6);
  out << "axis,value,estimator,parameter,truth,bias,esd,rmse,cr,replications,failures\n";
  for (const auto& r : rows) {
    for (const auto& p : r.metrics.params) {
      out << to_string(axis) << ',' << r.axis_value << ',' << to_string(r.estimator) << ','
          << p.name << ',';
      put(out, p.truth);
      out << ',';
      put(out, p.bias);
      out << ',';
      put(out, p.esd);
      out << ',';
      put(out, p.rmse);
      out << ',';
      put(out, p.cr);
      out << ',' << r.metrics.replications << ',' << r.metrics.failures << '\n';
    }
  }
}

void write_estimates(std::ostream& out, const MCResult& mc) {
  out << std::setprecision(17);
  out << "replicate";
  for (const auto& n : mc.names) out << ',' << n;
  out << '\n';
  for (std::size_t r = 0; r < mc.estimates.size(); ++r) {
    out << mc.replicate_ids[r];
    for (double v : mc.estimates[r]) out << ',' << v;
    out << '\n';
  }
}

}  // namespace cchr
