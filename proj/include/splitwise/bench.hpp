#ifndef SPLITWISE_BENCH_HPP
#define SPLITWISE_BENCH_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "splitwise/baselines.hpp"
#include "splitwise/dataset.hpp"
#include "splitwise/search.hpp"
#include "splitwise/synth.hpp"

namespace splitwise {

// One benchmark method: a stable id (CLI-facing), the display pair used in
// reports, and the family config it runs with.
struct MethodSpec {
  enum class Family { splitwise, stepwise, best_subset, lasso, ridge, elastic_net };

  std::string id;        // e.g. "splitwise-iter-backward"
  std::string method;    // report column, e.g. "SplitWise"
  std::string settings;  // report column, e.g. "iter.; backw."
  Family family = Family::splitwise;
  SearchConfig search;       // splitwise / stepwise
  BestSubsetConfig subset;   // best_subset
  ElasticNetConfig enet;     // penalized families
};

// Known ids, in report order. Throws Error for unknown ids, listing the
// valid ones.
MethodSpec make_method(const std::string& id, Criterion criterion);
std::vector<std::string> all_method_ids();
std::vector<MethodSpec> parse_method_list(const std::string& comma_separated,
                                          Criterion criterion);

struct RunRecord {
  std::string method_id;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;  // failure reason when !ok
  // NaN marks values a family does not report (AIC/BIC for penalized fits).
  double aic = 0;
  double bic = 0;
  double adj_r2 = 0;
  double rmse = 0;
  double mae = 0;
  std::size_t n_vars = 0;                 // distinct original variables
  std::vector<std::string> selected_set;  // sorted original variable names
  double wall_time_s = 0;
};

struct AggregateRow {
  std::string method;
  std::string settings;
  double aic_mean = 0, aic_sd = 0;
  double bic_mean = 0, bic_sd = 0;
  double adj_r2_mean = 0, adj_r2_sd = 0;
  double rmse_mean = 0, rmse_sd = 0;
  double mae_mean = 0, mae_sd = 0;
  double stability = 0;  // modal selected-set share across successful runs
  double vars_mean = 0, vars_sd = 0;
  double time_s = 0;
  std::size_t n_runs = 0;    // successful
  std::size_t n_failed = 0;  // excluded from the statistics
};

// Either a synthetic template expanded over a seed list, or one fixed
// dataset with its formula.
struct SyntheticSource {
  SynthConfig config;                 // seed field is overridden per run
  std::vector<std::uint64_t> seeds;
};

struct FixedSource {
  Dataset data;
  FormulaSpec formula;
};

struct DataSource {
  std::optional<SyntheticSource> synthetic;
  std::optional<FixedSource> fixed;
};

struct SuiteOptions {
  // Fraction of rows held out for RMSE/MAE; 0 keeps them in-sample.
  double holdout = 0;
  // Zeroes wall_time_s so two runs of the same suite are byte-identical.
  bool measure_time = true;
  // Worker threads; 0 = SPLITWISE_THREADS env or hardware concurrency.
  unsigned threads = 0;
};

// Runs every method for every seed (or once on fixed data). Method failures
// become failed records; they never abort the suite. Search histories are
// checked for strict criterion descent, a violation being a failure. Output
// is ordered by (seed, method) regardless of thread count.
std::vector<RunRecord> run_suite(const std::vector<MethodSpec>& methods,
                                 const DataSource& source,
                                 const SuiteOptions& options = {});

// Per-method mean / sample sd per metric, modal-set stability, mean wall
// time. Throws Error if a method has no successful record.
std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& records,
                                    const std::vector<MethodSpec>& methods);

enum class ReportFormat { csv, json };

// CSV columns: method,settings,aic_mean,aic_sd,bic_mean,bic_sd,adj_r2_mean,
// adj_r2_sd,rmse_mean,rmse_sd,mae_mean,mae_sd,stability,vars_mean,vars_sd,
// time_s. Missing metrics are empty cells (null in JSON); numbers carry full
// double precision.
void emit_report(const std::vector<AggregateRow>& rows, ReportFormat format,
                 const std::string& path);
std::string render_report(const std::vector<AggregateRow>& rows, ReportFormat format);

}  // namespace splitwise

#endif  // SPLITWISE_BENCH_HPP
