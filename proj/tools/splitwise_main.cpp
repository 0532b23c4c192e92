// Command-line frontend: fit a model on a CSV, benchmark method suites, or
// generate synthetic datasets.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "splitwise/bench.hpp"
#include "splitwise/dataset.hpp"
#include "splitwise/error.hpp"
#include "splitwise/format.hpp"
#include "splitwise/rng.hpp"
#include "splitwise/search.hpp"
#include "splitwise/synth.hpp"

namespace {

using namespace splitwise;

Criterion parse_criterion(const std::string& s) {
  if (s == "aic") return Criterion::aic;
  if (s == "bic") return Criterion::bic;
  throw Error("criterion must be aic or bic");
}

Direction parse_direction(const std::string& s) {
  if (s == "forward") return Direction::forward;
  if (s == "backward") return Direction::backward;
  if (s == "both") return Direction::both;
  throw Error("direction must be forward, backward, or both");
}

Mode parse_mode(const std::string& s) {
  if (s == "iterative") return Mode::iterative;
  if (s == "univariate") return Mode::univariate;
  if (s == "classical") return Mode::classical;
  throw Error("mode must be iterative, univariate, or classical");
}

std::string default_formula(const Dataset& data) {
  return data.column_names().front() + " ~ .";
}

struct FitArgs {
  std::string data_path;
  std::string formula;
  std::string mode = "iterative";
  std::string direction = "backward";
  std::string criterion = "aic";
  std::string na = "reject-row";
  std::string tree_target = "residuals";
  std::string backward_init = "linear";
  std::string transformable;
  double cp = 0.01;
  std::size_t minsplit = 20;
  std::size_t minbucket = 7;
  int max_depth = 2;
  std::string json_path;
};

int cmd_fit(const FitArgs& a) {
  const NaPolicy policy = a.na == "fail" ? NaPolicy::fail : NaPolicy::reject_row;
  const LoadResult loaded = load_csv(a.data_path, policy);
  if (loaded.dropped_rows > 0)
    std::cerr << "note: dropped " << loaded.dropped_rows
              << " incomplete row(s) from " << a.data_path << "\n";

  const std::string formula_text =
      a.formula.empty() ? default_formula(loaded.data) : a.formula;
  const FormulaSpec formula = parse_formula(formula_text, loaded.data);

  SearchConfig config;
  config.mode = parse_mode(a.mode);
  config.direction = parse_direction(a.direction);
  config.criterion = parse_criterion(a.criterion);
  config.tree_params.cp = a.cp;
  config.tree_params.minsplit = a.minsplit;
  config.tree_params.minbucket = a.minbucket;
  config.tree_params.max_depth = a.max_depth;
  if (a.tree_target == "response")
    config.tree_target = TreeTarget::response;
  else if (a.tree_target != "residuals")
    throw Error("tree-target must be residuals or response");
  if (a.backward_init == "linear")
    config.backward_init = BackwardInit::linear;
  else if (a.backward_init != "univariate")
    throw Error("backward-init must be univariate or linear");
  if (!a.transformable.empty()) {
    std::set<std::string> vars;
    std::stringstream ss(a.transformable);
    std::string v;
    while (std::getline(ss, v, ','))
      if (!v.empty()) vars.insert(v);
    config.transformable = std::move(vars);
  }

  const SplitwiseModel model = run_search(loaded.data, formula, config);
  if (model.intercept_only)
    std::cerr << "warning: no variable improved the criterion; returning the "
                 "intercept-only model\n";
  std::cout << model_summary(model);

  if (!a.json_path.empty()) {
    std::ofstream out(a.json_path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + a.json_path);
    out << model_to_json(model).dump(2) << "\n";
  }
  return 0;
}

struct BenchArgs {
  std::size_t synthetic_p = 0;
  std::string data_path;
  std::string formula;
  std::size_t n = 1000;
  std::size_t reps = 1;
  std::uint64_t seed = 1;
  std::string methods;
  std::string criterion = "aic";
  double holdout = 0;
  bool threshold_effects = false;
  double rho = 0.5;
  double noise_sd = 2.677;
  std::string out_path;
  std::string format = "csv";
  bool no_timing = false;
};

int cmd_bench(const BenchArgs& a) {
  if ((a.synthetic_p == 0) == a.data_path.empty())
    throw Error("exactly one of --synthetic or --data is required");
  if (a.reps < 1) throw Error("--reps must be >= 1");
  if (a.format != "csv" && a.format != "json") throw Error("--format must be csv or json");
  if (a.holdout < 0 || a.holdout >= 1) throw Error("--holdout must lie in [0, 1)");

  const Criterion crit = parse_criterion(a.criterion);
  std::string methods = a.methods;
  if (methods.empty()) {
    for (const auto& id : all_method_ids())
      methods += (methods.empty() ? "" : ",") + id;
  }
  const std::vector<MethodSpec> specs = parse_method_list(methods, crit);

  DataSource source;
  if (a.synthetic_p > 0) {
    SyntheticSource synth;
    synth.config.p = a.synthetic_p;
    synth.config.n = a.n;
    synth.config.rho = a.rho;
    synth.config.noise_sd = a.noise_sd;
    synth.config.threshold_effects = a.threshold_effects;
    for (std::size_t r = 0; r < a.reps; ++r) synth.seeds.push_back(a.seed + r);
    source.synthetic = std::move(synth);
  } else {
    const LoadResult loaded = load_csv(a.data_path);
    if (loaded.dropped_rows > 0)
      std::cerr << "note: dropped " << loaded.dropped_rows << " incomplete row(s)\n";
    FixedSource fixed;
    fixed.formula = parse_formula(
        a.formula.empty() ? default_formula(loaded.data) : a.formula, loaded.data);
    fixed.data = std::move(loaded.data);
    source.fixed = std::move(fixed);
  }

  SuiteOptions options;
  options.holdout = a.holdout;
  options.measure_time = !a.no_timing;

  const auto records = run_suite(specs, source, options);
  const auto rows = aggregate(records, specs);

  const ReportFormat fmt = a.format == "csv" ? ReportFormat::csv : ReportFormat::json;
  if (!a.out_path.empty()) {
    emit_report(rows, fmt, a.out_path);
  } else {
    std::cout << render_report(rows, fmt);
  }

  std::cerr << "generator: " << CounterRng::kName << "\n";
  for (const auto& r : rows) {
    std::cerr << r.method << " [" << r.settings << "]: ";
    if (!std::isnan(r.aic_mean)) std::cerr << "aic " << num_round2(r.aic_mean) << ", ";
    std::cerr << "rmse " << num_fixed(r.rmse_mean, 4) << ", vars "
              << num_round2(r.vars_mean) << ", stability " << num_fixed(r.stability, 2)
              << ", time " << num_fixed(r.time_s, 3) << "s";
    if (r.n_failed > 0) std::cerr << " (" << r.n_failed << " failed run(s))";
    std::cerr << "\n";
  }
  return 0;
}

struct SimArgs {
  std::size_t p = 15;
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  bool threshold_effects = false;
  double rho = 0.5;
  double noise_sd = 2.677;
  std::string out_path;
};

int cmd_simulate(const SimArgs& a) {
  SynthConfig config;
  config.p = a.p;
  config.n = a.n;
  config.seed = a.seed;
  config.threshold_effects = a.threshold_effects;
  config.rho = a.rho;
  config.noise_sd = a.noise_sd;

  const auto [data, truth] = generate_synthetic(config);
  write_csv(data, a.out_path);

  nlohmann::ordered_json j;
  j["generator"] = CounterRng::kName;
  j["seed"] = config.seed;
  j["n"] = config.n;
  j["p"] = config.p;
  j["rho"] = config.rho;
  j["noise_sd"] = config.noise_sd;
  j["threshold_effects"] = config.threshold_effects;
  nlohmann::ordered_json sig = nlohmann::ordered_json::array();
  for (std::size_t idx : truth.signal_indices) sig.push_back(idx);
  j["signal_indices"] = std::move(sig);
  j["generating_betas"] = truth.generating_betas;
  j["generating_cuts"] = truth.generating_cuts;

  const std::string sidecar = a.out_path + ".truth.json";
  std::ofstream out(sidecar, std::ios::binary);
  if (!out) throw Error("cannot write file: " + sidecar);
  out << j.dump(2) << "\n";

  std::cerr << "wrote " << a.out_path << " (" << data.n_rows() << " rows, "
            << data.n_cols() << " columns) and " << sidecar << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SplitWise regression toolkit: stepwise linear-model selection "
               "with adaptive threshold-based dummy encoding"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* cmd_f = app.add_subcommand("fit", "Fit a model to a CSV dataset");
  cmd_f->add_option("--data", fit.data_path, "Input CSV (header row required)")
      ->required();
  cmd_f->add_option("--formula", fit.formula,
                    "Model formula, e.g. \"mpg ~ .\" or \"y ~ x1 + x2\" "
                    "(default: first column ~ .)");
  cmd_f->add_option("--mode", fit.mode, "iterative | univariate | classical")
      ->default_val("iterative");
  cmd_f->add_option("--direction", fit.direction, "forward | backward | both")
      ->default_val("backward");
  cmd_f->add_option("--criterion", fit.criterion, "aic | bic")->default_val("aic");
  cmd_f->add_option("--cp", fit.cp, "Tree complexity parameter")->default_val(0.01);
  cmd_f->add_option("--minsplit", fit.minsplit, "Smallest node eligible to split")
      ->default_val(20);
  cmd_f->add_option("--minbucket", fit.minbucket, "Smallest allowed child node")
      ->default_val(7);
  cmd_f->add_option("--max-depth", fit.max_depth, "Tree depth: 1 or 2")->default_val(2);
  cmd_f->add_option("--na", fit.na, "Missing-value policy: reject-row | fail")
      ->default_val("reject-row");
  cmd_f->add_option("--tree-target", fit.tree_target,
                    "Split-tree target in iterative mode: residuals | response")
      ->default_val("residuals");
  cmd_f->add_option("--backward-init", fit.backward_init,
                    "Backward start: linear | univariate")
      ->default_val("linear");
  cmd_f->add_option("--transformable", fit.transformable,
                    "Comma list of variables eligible for dummy encoding "
                    "(default: all)");
  cmd_f->add_option("--json", fit.json_path, "Also write the model as JSON");

  BenchArgs bench;
  auto* cmd_b = app.add_subcommand("bench", "Run a benchmark suite");
  auto* opt_synth =
      cmd_b->add_option("--synthetic", bench.synthetic_p, "Synthetic predictor count");
  cmd_b->add_option("--data", bench.data_path, "Fixed dataset CSV")->excludes(opt_synth);
  cmd_b->add_option("--formula", bench.formula, "Formula for --data (default: first ~ .)");
  cmd_b->add_option("--n", bench.n, "Synthetic rows per dataset")->default_val(1000);
  cmd_b->add_option("--reps", bench.reps, "Synthetic replications")->default_val(1);
  cmd_b->add_option("--seed", bench.seed, "Base seed; replication r uses seed+r")
      ->default_val(1);
  cmd_b->add_option("--methods", bench.methods,
                    "Comma list of method ids (default: all). Ids: " +
                        [] {
                          std::string s;
                          for (const auto& id : splitwise::all_method_ids())
                            s += (s.empty() ? "" : ", ") + id;
                          return s;
                        }());
  cmd_b->add_option("--criterion", bench.criterion, "aic | bic")->default_val("aic");
  cmd_b->add_option("--holdout", bench.holdout,
                    "Held-out fraction for RMSE/MAE (default: in-sample)");
  cmd_b->add_flag("--threshold-effects", bench.threshold_effects,
                  "Synthetic signals enter as step functions");
  cmd_b->add_option("--rho", bench.rho, "Synthetic within-block correlation")
      ->default_val(0.5);
  cmd_b->add_option("--noise-sd", bench.noise_sd, "Synthetic noise sd")->default_val(2.677);
  cmd_b->add_option("--out", bench.out_path, "Report path (default: stdout)");
  cmd_b->add_option("--format", bench.format, "csv | json")->default_val("csv");
  cmd_b->add_flag("--no-timing", bench.no_timing,
                  "Zero the time_s column so repeated runs are byte-identical");

  SimArgs sim;
  auto* cmd_s = app.add_subcommand("simulate", "Write a synthetic dataset CSV");
  cmd_s->add_option("--p", sim.p, "Predictor count")->default_val(15);
  cmd_s->add_option("--n", sim.n, "Row count")->default_val(1000);
  cmd_s->add_option("--seed", sim.seed, "Generator seed")->default_val(1);
  cmd_s->add_flag("--threshold-effects", sim.threshold_effects,
                  "Signals enter as step functions");
  cmd_s->add_option("--rho", sim.rho, "Within-block correlation")->default_val(0.5);
  cmd_s->add_option("--noise-sd", sim.noise_sd, "Noise sd")->default_val(2.677);
  cmd_s->add_option("--out", sim.out_path, "Output CSV path (sidecar: <out>.truth.json)")
      ->required();

  try {
    app.parse(argc, argv);
    if (cmd_f->parsed()) return cmd_fit(fit);
    if (cmd_b->parsed()) return cmd_bench(bench);
    if (cmd_s->parsed()) return cmd_simulate(sim);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const splitwise::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
