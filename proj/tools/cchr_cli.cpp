// Command-line front end: fit, select, bootstrap, simulate, sweep, generate.

#include "cchr/bootstrap.hpp"
#include "cchr/data_model.hpp"
#include "cchr/model_selection.hpp"
#include "cchr/optimizer.hpp"
#include "cchr/parallel.hpp"
#include "cchr/report.hpp"
#include "cchr/sim_engine.hpp"
#include "cchr/sim_io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace cchr;

namespace {

struct Args {
  std::string input;
  std::string schema;
  std::string copula = "frank";
  std::string censoring = "weibull";
  std::string weights = "proposed";
  std::uint64_t seed = 1;
  int boot = 100;
  std::string design;
  std::string preset = "lowdep";
  std::string out;
  int jobs = 0;
  double h1 = 0.1;
  double h2 = 0.1;
  bool cv = false;
  int starts = 100;
  int max_outer = 120;
  double horizon = 0.0;
  int replications = 0;
  std::size_t n = 0;
  std::string axis = "complier_ratio";
  std::vector<double> values;
  bool warp = false;
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
}

FitOptions fit_options(const Args& a) {
  FitOptions fo;
  fo.model = {parse_copula_family(a.copula), parse_censoring_family(a.censoring)};
  fo.mode = parse_weight_mode(a.weights);
  fo.kernel.h1 = a.h1;
  fo.kernel.h2 = a.h2;
  fo.cross_validate = a.cv;
  fo.optimizer.n_starts = a.starts;
  fo.optimizer.max_outer_iters = a.max_outer;
  fo.optimizer.seed = a.seed;
  fo.optimizer.jobs = resolve_jobs(a.jobs);
  if (a.horizon > 0.0) fo.optimizer.horizon = a.horizon;
  return fo;
}

struct Input {
  Dataset data;
  std::vector<int> groups;
};

Input read_input(const Args& a) {
  if (a.input.empty()) throw std::invalid_argument("--input is required");
  const CovariateSchema schema = CovariateSchema::parse(a.schema);
  Dataset d = load_dataset_file(a.input, schema);
  std::vector<int> g;
  if (a.weights == "oracle") {
    std::ifstream f(a.input);
    g = load_group_labels(f);
    if (g.empty()) throw std::invalid_argument("--weights oracle needs a 'g' column in the input");
  }
  return {std::move(d), std::move(g)};
}

SimDesign read_design(const Args& a) {
  SimDesign d;
  if (!a.design.empty()) {
    std::ifstream f(a.design);
    if (!f) throw std::runtime_error("cannot open design '" + a.design + "'");
    d = design_from_json(json::parse(f));
  } else {
    d = preset_design(a.preset);
  }
  if (a.replications > 0) d.replications = a.replications;
  if (a.n > 0) d.n = a.n;
  return d;
}

int cmd_fit(const Args& a) {
  Input in = read_input(a);
  FitResult fr = fit_two_step(in.data, fit_options(a), in.groups);
  emit(fit_to_json(fr).dump(2) + "\n", a.out);
  if (!fr.converged) {
    std::cerr << "warning: outer iterations did not converge\n";
    return 2;
  }
  return 0;
}

int cmd_bootstrap(const Args& a) {
  Input in = read_input(a);
  FitOptions fo = fit_options(a);
  FitResult fr = fit_two_step(in.data, fo, in.groups);
  BootstrapResult br = bootstrap(in.data, fo, fr, a.boot, a.seed + 1, in.groups);
  json j = fit_to_json(fr);
  j["bootstrap"] = bootstrap_to_json(br);
  json se = json::object(), p = json::object();
  for (std::size_t k = 0; k < br.names.size(); ++k) {
    se[br.names[k]] = br.se[k];
    p[br.names[k]] = std::isnan(br.p_values[k]) ? json(nullptr) : json(br.p_values[k]);
  }
  j["se"] = se;
  j["p_values"] = p;
  emit(j.dump(2) + "\n", a.out);
  if (br.unreliable) std::cerr << "warning: more than 5% of bootstrap fits failed\n";
  return fr.converged ? 0 : 2;
}

int cmd_select(const Args& a) {
  Input in = read_input(a);
  auto entries = select_model(in.data, fit_options(a), in.groups);
  std::ostringstream table;
  table << "rank,copula,censoring,loglik\n" << std::setprecision(10);
  for (const auto& e : entries) {
    table << e.rank << ',' << to_string(e.model.copula) << ',' << to_string(e.model.censoring)
          << ',';
    if (e.ok)
      table << e.fit.loglik;
    else
      table << "NA";
    table << '\n';
    if (!e.ok) std::cerr << "warning: " << to_string(e.model.copula) << '-'
                         << to_string(e.model.censoring) << " failed: " << e.error << '\n';
  }
  std::cout << table.str();
  if (!a.out.empty()) emit(selection_to_json(entries).dump(2) + "\n", a.out);
  return 0;
}

int cmd_simulate(const Args& a) {
  SimDesign d = read_design(a);
  if (!a.weights.empty()) d.estimator = parse_weight_mode(a.weights);
  MCOptions mo;
  mo.jobs = resolve_jobs(a.jobs);
  mo.warp_speed = a.warp;
  MCResult mc = run_mc(d, a.seed, mo);
  std::ostringstream metrics, est;
  write_metrics_table(metrics, mc.metrics);
  write_estimates(est, mc);
  for (const auto& e : mc.errors) std::cerr << "warning: " << e << '\n';
  if (a.out.empty()) {
    std::cout << metrics.str();
  } else {
    emit(metrics.str(), a.out + "_metrics.csv");
    emit(est.str(), a.out + "_estimates.csv");
  }
  return 0;
}

int cmd_sweep(const Args& a) {
  SimDesign d = read_design(a);
  SweepAxis axis = parse_sweep_axis(a.axis);
  auto values = a.values.empty() ? default_axis_values(axis) : a.values;
  MCOptions mo;
  mo.jobs = resolve_jobs(a.jobs);
  auto rows = sweep(d, axis, values, {WeightMode::naive, WeightMode::proposed, WeightMode::oracle},
                    a.seed, mo);
  std::ostringstream out;
  write_sweep_table(out, axis, rows);
  emit(out.str(), a.out);
  return 0;
}

int cmd_generate(const Args& a) {
  SimDesign d = read_design(a);
  SimData sd = generate_dataset(d, a.seed);
  std::ostringstream out;
  write_dataset(out, sd.data, sd.complier_labels());
  emit(out.str(), a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Complier causal hazard ratio under dependent censoring"};
  app.require_subcommand(1);
  Args a;

  auto data_flags = [&](CLI::App* c) {
    c->add_option("--input", a.input, "CSV with y,delta1,delta2,z,w and covariates")->required();
    c->add_option("--schema", a.schema, "covariates, e.g. age:continuous,ged:discrete")->required();
    c->add_option("--copula", a.copula, "copula family");
    c->add_option("--censoring", a.censoring, "weibull, lognormal or loglogistic");
    c->add_option("--weights", a.weights, "proposed, naive or oracle");
    c->add_option("--h1", a.h1, "bandwidth for the instrument propensity");
    c->add_option("--h2", a.h2, "bandwidth for the stratified regression");
    c->add_flag("--cv", a.cv, "select bandwidths by 10-fold cross-validation");
    c->add_option("--starts", a.starts, "number of random starts");
    c->add_option("--max-outer", a.max_outer, "outer iteration cap");
    c->add_option("--horizon", a.horizon, "upper end of the hazard window");
  };
  auto common = [&](CLI::App* c) {
    c->add_option("--seed", a.seed, "random seed");
    c->add_option("--out", a.out, "output path");
    c->add_option("--jobs", a.jobs, "worker threads (falls back to CCHR_THREADS, then 1)");
  };
  auto design_flags = [&](CLI::App* c) {
    c->add_option("--design", a.design, "design JSON file");
    c->add_option("--preset", a.preset, "lowdep or highdep");
    c->add_option("--replications", a.replications, "Monte Carlo replications");
    c->add_option("--n", a.n, "sample size");
  };

  auto* fit = app.add_subcommand("fit", "two-step fit");
  data_flags(fit);
  common(fit);
  auto* boot = app.add_subcommand("bootstrap", "fit plus naive bootstrap");
  data_flags(boot);
  common(boot);
  boot->add_option("--boot", a.boot, "bootstrap resamples");
  auto* sel = app.add_subcommand("select", "rank the 21 copula/censoring combinations");
  data_flags(sel);
  common(sel);
  auto* sim = app.add_subcommand("simulate", "Monte Carlo study of one design");
  design_flags(sim);
  common(sim);
  sim->add_option("--weights", a.weights, "estimator: proposed, naive or oracle");
  sim->add_flag("--warp-speed", a.warp, "one bootstrap per replicate for coverage");
  auto* sw = app.add_subcommand("sweep", "complier-ratio or sample-size sweep");
  design_flags(sw);
  common(sw);
  sw->add_option("--axis", a.axis, "complier_ratio or sample_size");
  sw->add_option("--values", a.values, "axis values");
  auto* gen = app.add_subcommand("generate", "write one simulated dataset");
  design_flags(gen);
  common(gen);

  CLI11_PARSE(app, argc, argv);
  if (sim->parsed() && sim->count("--weights") == 0) a.weights.clear();
  try {
    if (fit->parsed()) return cmd_fit(a);
    if (boot->parsed()) return cmd_bootstrap(a);
    if (sel->parsed()) return cmd_select(a);
    if (sim->parsed()) return cmd_simulate(a);
    if (sw->parsed()) return cmd_sweep(a);
    if (gen->parsed()) return cmd_generate(a);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
