// panelspec: fit panel estimators, run Hausman-type specification tests and
// Monte Carlo size/power studies from the command line.
//
// Exit codes: 0 success, 1 data or estimation error, 2 usage error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "panelspec/errors.hpp"
#include "panelspec/estimators.hpp"
#include "panelspec/inference.hpp"
#include "panelspec/mcstudy.hpp"
#include "panelspec/panel.hpp"
#include "panelspec/report.hpp"
#include "panelspec/wle.hpp"

namespace {

using namespace panelspec;
using nlohmann::json;

struct DataOptions {
  std::string path;
  ColumnSchema schema;
};

struct WleOptions {
  double kappa = 0.5;
  int max_iter = 50;
  double tol = 1e-6;
  std::string raf = "hellinger";
  std::string granularity = "observation";

  WleConfig config() const {
    WleConfig cfg;
    cfg.kappa = kappa;
    cfg.max_iterations = max_iter;
    cfg.tolerance = tol;
    cfg.raf = raf == "identity" ? Raf::Identity : Raf::Hellinger;
    cfg.granularity = granularity == "unit" ? WeightGranularity::Unit : WeightGranularity::Observation;
    return cfg;
  }
};

void add_data_options(CLI::App& cmd, DataOptions& d) {
  cmd.add_option("--data", d.path, "Long-format CSV file")->required();
  cmd.add_option("--unit", d.schema.unit_col, "Unit identifier column")->required();
  cmd.add_option("--time", d.schema.time_col, "Time identifier column")->required();
  cmd.add_option("--y", d.schema.y_col, "Response column")->required();
  cmd.add_option("--x", d.schema.x_cols, "Regressor columns, comma separated")->required()->delimiter(',');
}

void add_wle_options(CLI::App& cmd, WleOptions& w) {
  cmd.add_option("--kappa", w.kappa, "Bandwidth constant, h = kappa * sigma")->check(CLI::PositiveNumber);
  cmd.add_option("--max-iter", w.max_iter, "Maximum reweighting iterations")->check(CLI::PositiveNumber);
  cmd.add_option("--tol", w.tol, "Relative coefficient-change tolerance")->check(CLI::PositiveNumber);
  cmd.add_option("--raf", w.raf, "Residual adjustment function")
      ->check(CLI::IsMember({"hellinger", "identity"}));
  cmd.add_option("--granularity", w.granularity, "Weight level")->check(CLI::IsMember({"observation", "unit"}));
}

void emit(const json& doc, const std::string& out_path) {
  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw PanelError(ErrorKind::Io, "cannot write '" + out_path + "'");
    f << text;
  }
}

void emit_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw PanelError(ErrorKind::Io, "cannot write '" + out_path + "'");
    f << text;
  }
}

unsigned threads_from_env() {
  const char* env = std::getenv("PANELSPEC_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (*end != '\0') throw PanelError(ErrorKind::InvalidConfig, "PANELSPEC_THREADS must be a nonnegative integer");
  return static_cast<unsigned>(v);
}

// ---- fit ----

struct FitArgs {
  DataOptions data;
  WleOptions wle;
  std::string method;
  std::uint64_t seed = 0;
  std::string format = "json";
};

int run_fit(const FitArgs& a) {
  const auto ds = load_long_csv(a.data.path, a.data.schema);
  EstimateResult res;
  if (a.method == "pooled") {
    res = fit_pooled_ols(ds);
  } else if (a.method == "fe") {
    res = fit_fixed_effects(ds);
  } else if (a.method == "re") {
    res = fit_random_effects(ds);
  } else {
    res = fit_weighted_fixed_effects(ds, a.wle.config());
  }
  if (a.format == "csv") {
    std::ostringstream os;
    report::write_estimate_csv(os, res, ds);
    emit_text(os.str(), "");
  } else {
    json doc = report::estimate_json(res, ds);
    doc["command"] = "fit";
    doc["seed"] = a.seed;
    emit(doc, "");
  }
  return 0;
}

// ---- test ----

struct TestArgs {
  DataOptions data;
  WleOptions wle;
  std::string which = "both";
  std::optional<double> theta;
  std::uint64_t seed = 0;
};

int run_test(const TestArgs& a) {
  const auto ds = load_long_csv(a.data.path, a.data.schema);
  const auto fe = fit_fixed_effects(ds);
  RandomEffectsOptions re_opts;
  re_opts.forced_theta = a.theta;
  const auto re = fit_random_effects(ds, re_opts);

  json tests = json::array();
  json estimates{{"fe", report::estimate_json(fe, ds)}, {"re", report::estimate_json(re, ds)}};
  if (a.which == "hausman" || a.which == "both") tests.push_back(report::test_json(hausman_test(fe, re)));
  if (a.which == "weighted" || a.which == "both") {
    const auto wfe = fit_weighted_fixed_effects(ds, a.wle.config());
    tests.push_back(report::test_json(weighted_hausman_test(wfe, re)));
    estimates["wfe"] = report::estimate_json(wfe, ds);
  }
  json doc{{"command", "test"},
           {"seed", a.seed},
           {"tests", std::move(tests)},
           {"fit_statistics",
            {{"rss_fe", fe.rss}, {"rss_re", re.rss}, {"r_squared_fe", fe.r_squared}, {"r_squared_re", re.r_squared}}},
           {"estimates", std::move(estimates)}};
  emit(doc, "");
  return 0;
}

// ---- simulate / generate ----

struct DesignArgs {
  std::string hypothesis = "null";
  Index n = 100;
  Index t = 4;
  std::string contamination = "none";
  Index m = 0;
  std::optional<double> low;
  std::optional<double> high;
  std::uint64_t seed = 1;
};

void add_design_options(CLI::App& cmd, DesignArgs& d) {
  cmd.add_option("--hypothesis", d.hypothesis, "Data generating process")->check(CLI::IsMember({"null", "alt"}));
  cmd.add_option("--n", d.n, "Cross-sectional units N")->check(CLI::Range(2, 1 << 24));
  cmd.add_option("--t", d.t, "Time periods T")->check(CLI::Range(2, 1 << 16));
  cmd.add_option("--contamination", d.contamination, "Vertical outlier scheme")
      ->check(CLI::IsMember({"none", "random", "concentrated"}));
  cmd.add_option("--m", d.m, "Number of contaminated cells")->check(CLI::NonNegativeNumber);
  cmd.add_option("--low", d.low, "Lower bound of the outlier distribution");
  cmd.add_option("--high", d.high, "Upper bound of the outlier distribution");
  cmd.add_option("--seed", d.seed, "Master seed");
}

DgpConfig make_dgp(const std::string& hypothesis, Index n, Index t, std::uint64_t seed) {
  DgpConfig dgp;
  dgp.n_units = n;
  dgp.n_periods = t;
  dgp.seed = seed;
  if (hypothesis == "alt") dgp.hypothesis = AlternativeHypothesis{};
  return dgp;
}

ContaminationConfig make_contamination(const std::string& scheme, Index m, std::optional<double> low,
                                       std::optional<double> high) {
  ContaminationConfig cc;
  cc.n_outliers = m;
  if (scheme == "random") {
    RandomVertical s;
    if (low) s.low = *low;
    if (high) s.high = *high;
    cc.scheme = s;
  } else if (scheme == "concentrated") {
    ConcentratedVertical s;
    if (low) s.low = *low;
    if (high) s.high = *high;
    cc.scheme = s;
  } else if (m != 0) {
    throw PanelError(ErrorKind::InvalidConfig, "--m needs --contamination random or concentrated");
  }
  return cc;
}

struct SimulateArgs {
  DesignArgs design;
  WleOptions wle;
  std::size_t s = 1000;
  std::vector<double> gammas{0.05};
  std::optional<int> preset;
  std::string out;
  std::string format = "json";
  bool no_statistics = false;
};

struct StudyPlan {
  DgpConfig dgp;
  ContaminationConfig cc;
  std::vector<double> gammas;
};

std::vector<StudyPlan> plan_studies(const SimulateArgs& a) {
  std::vector<StudyPlan> plans;
  const std::uint64_t seed = a.design.seed;
  if (!a.preset) {
    plans.push_back({make_dgp(a.design.hypothesis, a.design.n, a.design.t, seed),
                     make_contamination(a.design.contamination, a.design.m, a.design.low, a.design.high), a.gammas});
    return plans;
  }
  const int fig = *a.preset;
  if (fig == 1 || fig == 2) {
    const std::vector<double> gammas{0.05, 0.10, 0.15, 0.20};
    for (const Index n : {25, 50, 75, 100, 150, 200}) {
      plans.push_back({make_dgp(fig == 1 ? "null" : "alt", n, 4, seed), ContaminationConfig{}, gammas});
    }
  } else {
    const std::vector<double> gammas{0.01, 0.02, 0.05, 0.10, 0.15, 0.20, 0.25};
    for (const char* scheme : {"random", "concentrated"}) {
      for (const Index m : {15, 30}) {
        plans.push_back({make_dgp(fig == 4 ? "null" : "alt", 100, 3, seed),
                         make_contamination(scheme, m, std::nullopt, std::nullopt), gammas});
      }
    }
  }
  return plans;
}

int run_simulate(const SimulateArgs& a) {
  const auto plans = plan_studies(a);
  const WleConfig wle = a.wle.config();
  StudyOptions opts;
  opts.threads = threads_from_env();

  std::vector<report::StudyRecord> records;
  for (const auto& p : plans) {
    auto result = run_study(p.dgp, p.cc, a.s, p.gammas, wle, opts);
    records.push_back({p.dgp, p.cc, wle, p.gammas, a.s, std::move(result)});
  }
  if (a.format == "csv") {
    std::ostringstream os;
    report::write_study_csv(os, records);
    emit_text(os.str(), a.out);
  } else {
    emit(report::simulate_document(records, !a.no_statistics), a.out);
  }
  return 0;
}

struct GenerateArgs {
  DesignArgs design;
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  const auto dgp = make_dgp(a.design.hypothesis, a.design.n, a.design.t, a.design.seed);
  const auto cc = make_contamination(a.design.contamination, a.design.m, a.design.low, a.design.high);
  RandomStream stream(a.design.seed);
  const auto ds = contaminate(generate(dgp, stream), cc, stream);
  std::ostringstream os;
  write_long_csv(os, ds);
  emit_text(os.str(), a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed/random effects estimation and robust Hausman specification tests for balanced panels"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit one estimator and print coefficients");
  add_data_options(*fit_cmd, fit.data);
  add_wle_options(*fit_cmd, fit.wle);
  fit_cmd->add_option("--method", fit.method, "Estimator")
      ->required()
      ->check(CLI::IsMember({"pooled", "fe", "re", "wfe"}));
  fit_cmd->add_option("--seed", fit.seed, "Recorded in the output; all fits are deterministic");
  fit_cmd->add_option("--format", fit.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  TestArgs test;
  auto* test_cmd = app.add_subcommand("test", "Run the Hausman and weighted Hausman tests");
  add_data_options(*test_cmd, test.data);
  add_wle_options(*test_cmd, test.wle);
  test_cmd->add_option("--which", test.which, "Tests to run")->check(CLI::IsMember({"hausman", "weighted", "both"}));
  test_cmd->add_option("--theta", test.theta, "Force the random-effects theta (diagnostic)")
      ->check(CLI::Range(0.0, 1.0));
  test_cmd->add_option("--seed", test.seed, "Recorded in the output; all fits are deterministic");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo size/power study");
  add_design_options(*sim_cmd, sim.design);
  add_wle_options(*sim_cmd, sim.wle);
  sim_cmd->add_option("--s", sim.s, "Replications")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--gammas", sim.gammas, "Nominal sizes, comma separated")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));
  sim_cmd->add_option("--paper-figure", sim.preset, "Preset experiment grid (1, 2, 4 or 5)")
      ->check(CLI::IsMember({1, 2, 4, 5}));
  sim_cmd->add_option("--out", sim.out, "Output file (default: standard output)");
  sim_cmd->add_option("--format", sim.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  sim_cmd->add_flag("--no-statistics", sim.no_statistics, "Omit per-replication statistics from JSON");

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "Write one simulated panel as long-format CSV");
  add_design_options(*gen_cmd, gen.design);
  gen_cmd->add_option("--out", gen.out, "Output file (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*fit_cmd) return run_fit(fit);
    if (*test_cmd) return run_test(test);
    if (*sim_cmd) return run_simulate(sim);
    if (*gen_cmd) return run_generate(gen);
  } catch (const PanelError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
