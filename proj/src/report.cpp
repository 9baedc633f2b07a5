#include "cchr/report.hpp"

#include <cmath>
#include <stdexcept>

namespace cchr {

json fit_to_json(const FitResult& fit) {
  const Theta& th = fit.theta_hat;
  const auto names = parameter_names(th.m(), th.family());
  const auto values = th.to_vector();
  json theta = json::object();
  for (std::size_t k = 0; k < names.size(); ++k) theta[names[k]] = values[k];
  json j;
  j["copula"] = std::string(to_string(th.family()));
  j["censoring"] = std::string(to_string(th.cens.family));
  j["m"] = th.m();
  j["theta"] = theta;
  j["parameter_order"] = names;
  j["cchr"] = cchr(th.ph);
  j["loglik"] = fit.loglik;
  j["converged"] = fit.converged;
  j["n_outer"] = fit.n_outer;
  j["hazard"] = {{"time", fit.hazard.times()},
                 {"increment", fit.hazard.increments()},
                 {"horizon", fit.hazard.horizon()}};
  j["weights"] = fit.weights_used.kappa;
  return j;
}

FitResult fit_from_json(const json& j) {
  const auto family = parse_copula_family(j.at("copula").get<std::string>());
  const auto cens = parse_censoring_family(j.at("censoring").get<std::string>());
  const auto m = j.at("m").get<std::size_t>();
  const auto names = parameter_names(m, family);
  std::vector<double> values;
  for (const auto& n : names) values.push_back(j.at("theta").at(n).get<double>());
  FitResult fit;
  fit.theta_hat = Theta::from_vector(values, m, family, cens);
  fit.loglik = j.at("loglik").get<double>();
  fit.converged = j.at("converged").get<bool>();
  fit.n_outer = j.at("n_outer").get<int>();
  const auto& h = j.at("hazard");
  fit.hazard = StepHazard(h.at("time").get<std::vector<double>>(),
                          h.at("increment").get<std::vector<double>>(),
                          h.at("horizon").get<double>());
  fit.weights_used.kappa = j.at("weights").get<std::vector<double>>();
  return fit;
}

namespace {
json nan_safe(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(std::isnan(x) ? json(nullptr) : json(x));
  return a;
}
std::vector<double> nan_read(const json& a) {
  std::vector<double> v;
  for (const auto& x : a) v.push_back(x.is_null() ? std::nan("") : x.get<double>());
  return v;
}
}  // namespace

json bootstrap_to_json(const BootstrapResult& boot) {
  json j;
  j["B"] = boot.B;
  j["names"] = boot.names;
  j["point"] = boot.point;
  j["se"] = boot.se;
  j["nulls"] = boot.nulls;
  j["p_values"] = nan_safe(boot.p_values);
  j["failures"] = boot.failures;
  j["unreliable"] = boot.unreliable;
  j["degenerate"] = boot.degenerate;
  j["estimates"] = boot.estimates;
  return j;
}

BootstrapResult bootstrap_from_json(const json& j) {
  BootstrapResult b;
  b.B = j.at("B").get<int>();
  b.names = j.at("names").get<std::vector<std::string>>();
  b.point = j.at("point").get<std::vector<double>>();
  b.se = j.at("se").get<std::vector<double>>();
  b.nulls = j.at("nulls").get<std::vector<double>>();
  b.p_values = nan_read(j.at("p_values"));
  b.failures = j.at("failures").get<int>();
  b.unreliable = j.at("unreliable").get<bool>();
  b.degenerate = j.at("degenerate").get<bool>();
  b.estimates = j.at("estimates").get<std::vector<std::vector<double>>>();
  return b;
}

json selection_to_json(const std::vector<SelectionEntry>& entries) {
  json table = json::array();
  const SelectionEntry* best = nullptr;
  for (const auto& e : entries) {
    json row;
    row["copula"] = std::string(to_string(e.model.copula));
    row["censoring"] = std::string(to_string(e.model.censoring));
    row["rank"] = e.rank;
    if (e.ok) {
      row["loglik"] = e.fit.loglik;
      row["converged"] = e.fit.converged;
      if (e.rank == 1) best = &e;
    } else {
      row["loglik"] = nullptr;
      row["error"] = e.error;
    }
    table.push_back(row);
  }
  json j;
  j["models"] = table;
  j["best"] = best ? fit_to_json(best->fit) : json(nullptr);
  return j;
}

}  // namespace cchr
