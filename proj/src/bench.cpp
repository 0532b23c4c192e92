#include "splitwise/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "splitwise/error.hpp"
#include "splitwise/format.hpp"
#include "splitwise/rng.hpp"

namespace splitwise {

namespace {

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

SearchConfig search_config(Mode mode, Direction dir, Criterion crit) {
  SearchConfig c;
  c.mode = mode;
  c.direction = dir;
  c.criterion = crit;
  return c;
}

}  // namespace

MethodSpec make_method(const std::string& id, Criterion criterion) {
  MethodSpec m;
  m.id = id;
  if (id == "splitwise-iter-backward" || id == "splitwise-iter-forward" ||
      id == "splitwise-iter-both" || id == "splitwise-univ-backward" ||
      id == "splitwise-univ-forward" || id == "splitwise-univ-both") {
    const bool iter = id.find("-iter-") != std::string::npos;
    const Direction dir = id.ends_with("backward") ? Direction::backward
                          : id.ends_with("forward") ? Direction::forward
                                                    : Direction::both;
    m.family = MethodSpec::Family::splitwise;
    m.method = "SplitWise";
    m.settings = std::string(iter ? "iter.; " : "univ.; ") +
                 (dir == Direction::backward ? "backw."
                  : dir == Direction::forward ? "forw."
                                              : "both");
    m.search = search_config(iter ? Mode::iterative : Mode::univariate, dir, criterion);
    return m;
  }
  if (id == "stepwise-backward" || id == "stepwise-forward" || id == "stepwise-both") {
    const Direction dir = id.ends_with("backward") ? Direction::backward
                          : id.ends_with("forward") ? Direction::forward
                                                    : Direction::both;
    m.family = MethodSpec::Family::stepwise;
    m.method = "Stepwise";
    m.settings = dir == Direction::backward ? "backw."
                 : dir == Direction::forward ? "forw."
                                             : "both";
    m.search = search_config(Mode::classical, dir, criterion);
    return m;
  }
  if (id == "best-subset") {
    m.family = MethodSpec::Family::best_subset;
    m.method = "Best Subset";
    m.subset.criterion = criterion;
    m.settings = "size: " + std::to_string(m.subset.min_size) + "--" +
                 std::to_string(m.subset.max_size);
    return m;
  }
  if (id == "lasso" || id == "ridge" || id == "enet") {
    m.family = id == "lasso"   ? MethodSpec::Family::lasso
               : id == "ridge" ? MethodSpec::Family::ridge
                               : MethodSpec::Family::elastic_net;
    m.method = id == "lasso" ? "LASSO" : id == "ridge" ? "Ridge" : "Elastic Net";
    m.enet.alpha = id == "lasso" ? 1.0 : id == "ridge" ? 0.0 : 0.5;
    m.settings = "alpha: " + num_round2(m.enet.alpha);
    return m;
  }
  std::string valid;
  for (const auto& v : all_method_ids()) valid += (valid.empty() ? "" : ", ") + v;
  throw Error("unknown method \"" + id + "\"; valid methods: " + valid);
}

std::vector<std::string> all_method_ids() {
  return {"splitwise-iter-backward", "splitwise-iter-forward", "splitwise-iter-both",
          "splitwise-univ-backward", "splitwise-univ-forward", "splitwise-univ-both",
          "stepwise-backward",       "stepwise-forward",       "stepwise-both",
          "best-subset",             "lasso",                  "ridge",
          "enet"};
}

std::vector<MethodSpec> parse_method_list(const std::string& comma_separated,
                                          Criterion criterion) {
  std::vector<MethodSpec> out;
  std::stringstream ss(comma_separated);
  std::string id;
  while (std::getline(ss, id, ',')) {
    if (!id.empty()) out.push_back(make_method(id, criterion));
  }
  if (out.empty()) throw Error("empty method list");
  return out;
}

namespace {

struct Split {
  Dataset train;
  std::optional<Dataset> test;
};

Dataset take_rows(const Dataset& data, const std::vector<std::size_t>& rows) {
  std::vector<std::pair<std::string, std::vector<double>>> cols;
  for (const auto& name : data.column_names()) {
    const auto& full = data.column(name);
    std::vector<double> v;
    v.reserve(rows.size());
    for (std::size_t r : rows) v.push_back(full[r]);
    cols.emplace_back(name, std::move(v));
  }
  return Dataset::from_columns(std::move(cols));
}

Split make_split(const Dataset& data, double holdout, std::uint64_t seed) {
  if (holdout <= 0) return {data, std::nullopt};
  const std::size_t n = data.n_rows();
  const auto n_test = static_cast<std::size_t>(std::floor(holdout * static_cast<double>(n)));
  if (n_test == 0 || n_test >= n) throw Error("holdout fraction leaves an empty partition");
  const CounterRng rng(seed, rng_stream::kHoldout);
  const auto perm = shuffled_indices(n, rng);
  std::vector<std::size_t> test_rows(perm.begin(), perm.begin() + n_test);
  std::vector<std::size_t> train_rows(perm.begin() + n_test, perm.end());
  std::sort(test_rows.begin(), test_rows.end());
  std::sort(train_rows.begin(), train_rows.end());
  return {take_rows(data, train_rows), take_rows(data, test_rows)};
}

void accumulate_errors(std::span<const double> errors, double& rmse, double& mae) {
  double se = 0, ae = 0;
  for (double e : errors) {
    se += e * e;
    ae += std::fabs(e);
  }
  const double dn = static_cast<double>(errors.size());
  rmse = std::sqrt(se / dn);
  mae = ae / dn;
}

// Strict criterion descent along the history; any violation marks the run
// as failed.
void validate_history(const SplitwiseModel& model) {
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& action : model.history) {
    if (!std::isfinite(action.criterion_after) || !(action.criterion_after < prev))
      throw Error("search history is not strictly decreasing");
    prev = action.criterion_after;
  }
  if (!model.history.empty() &&
      model.state.criterion_value != model.history.back().criterion_after)
    throw Error("final criterion does not match the last applied action");
}

std::vector<double> holdout_errors_search(const SplitwiseModel& model, const Dataset& test) {
  const std::size_t n = test.n_rows();
  const auto& y = test.column(model.response);
  std::vector<double> pred(n, model.state.fit.coefficients[0]);
  for (std::size_t c = 0; c < model.state.columns.size(); ++c) {
    const auto& col = model.state.columns[c];
    const auto values = col.build(test.column(col.source_var));
    const double b = model.state.fit.coefficients[c + 1];
    for (std::size_t i = 0; i < n; ++i) pred[i] += b * values[i];
  }
  std::vector<double> err(n);
  for (std::size_t i = 0; i < n; ++i) err[i] = y[i] - pred[i];
  return err;
}

RunRecord run_method_once(const MethodSpec& spec, const Dataset& train,
                          const FormulaSpec& formula, const Dataset* test,
                          std::uint64_t seed) {
  RunRecord rec;
  rec.method_id = spec.id;
  rec.seed = seed;
  rec.aic = rec.bic = rec.adj_r2 = rec.rmse = rec.mae = nan_value();

  switch (spec.family) {
    case MethodSpec::Family::splitwise:
    case MethodSpec::Family::stepwise: {
      SplitwiseModel model = run_search(train, formula, spec.search);
      validate_history(model);
      rec.aic = model.state.fit.aic;
      rec.bic = model.state.fit.bic;
      rec.adj_r2 = model.state.fit.adj_r2;
      rec.selected_set = model.selected_vars();
      rec.n_vars = rec.selected_set.size();
      if (test) {
        const auto err = holdout_errors_search(model, *test);
        accumulate_errors(err, rec.rmse, rec.mae);
      } else {
        accumulate_errors(model.state.fit.residuals, rec.rmse, rec.mae);
      }
      break;
    }
    case MethodSpec::Family::best_subset: {
      BestSubsetConfig cfg = spec.subset;
      cfg.max_size = std::min(cfg.max_size, formula.resolved.size());
      cfg.min_size = std::min(cfg.min_size, cfg.max_size);
      BestSubsetResult r = best_subset(train, formula, cfg);
      rec.aic = r.fit.aic;
      rec.bic = r.fit.bic;
      rec.adj_r2 = r.fit.adj_r2;
      rec.selected_set = r.selected;
      std::sort(rec.selected_set.begin(), rec.selected_set.end());
      rec.n_vars = rec.selected_set.size();
      if (test) {
        const auto& y = test->column(formula.response);
        std::vector<double> err(test->n_rows());
        for (std::size_t i = 0; i < test->n_rows(); ++i) {
          double pred = r.fit.coefficients[0];
          for (std::size_t j = 0; j < r.selected.size(); ++j)
            pred += r.fit.coefficients[j + 1] * test->column(r.selected[j])[i];
          err[i] = y[i] - pred;
        }
        accumulate_errors(err, rec.rmse, rec.mae);
      } else {
        accumulate_errors(r.fit.residuals, rec.rmse, rec.mae);
      }
      break;
    }
    case MethodSpec::Family::lasso:
    case MethodSpec::Family::ridge:
    case MethodSpec::Family::elastic_net: {
      ElasticNetConfig cfg = spec.enet;
      cfg.seed = seed;
      const CvSelection sel = cv_select_lambda(train, formula, cfg);
      for (std::size_t j = 0; j < sel.fit.names.size(); ++j) {
        if (std::fabs(sel.fit.std_coefficients[j]) > kPenalizedSelectionEps)
          rec.selected_set.push_back(sel.fit.names[j]);
      }
      std::sort(rec.selected_set.begin(), rec.selected_set.end());
      rec.n_vars = rec.selected_set.size();

      const auto predict_on = [&](const Dataset& d) {
        std::vector<double> err(d.n_rows());
        const auto& y = d.column(formula.response);
        for (std::size_t i = 0; i < d.n_rows(); ++i) {
          double pred = sel.fit.intercept;
          for (std::size_t j = 0; j < sel.fit.names.size(); ++j)
            pred += sel.fit.coefficients[j] * d.column(sel.fit.names[j])[i];
          err[i] = y[i] - pred;
        }
        return err;
      };
      const auto train_err = predict_on(train);
      // Penalized fits report no likelihood criteria; adjusted R^2 uses the
      // thresholded support size.
      double rss = 0, tss = 0, mean = 0;
      const auto& y = train.column(formula.response);
      for (double v : y) mean += v;
      mean /= static_cast<double>(y.size());
      for (std::size_t i = 0; i < y.size(); ++i) {
        rss += train_err[i] * train_err[i];
        tss += (y[i] - mean) * (y[i] - mean);
      }
      const double dn = static_cast<double>(y.size());
      const double k = static_cast<double>(rec.n_vars) + 1.0;
      if (tss > 0 && dn > k)
        rec.adj_r2 = 1.0 - (1.0 - (1.0 - rss / tss)) * (dn - 1.0) / (dn - k);
      if (test) {
        accumulate_errors(predict_on(*test), rec.rmse, rec.mae);
      } else {
        accumulate_errors(train_err, rec.rmse, rec.mae);
      }
      break;
    }
  }
  return rec;
}

unsigned resolve_threads(unsigned requested, std::size_t jobs) {
  unsigned t = requested;
  if (t == 0) {
    if (const char* env = std::getenv("SPLITWISE_THREADS")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v > 0) t = static_cast<unsigned>(v);
    }
  }
  if (t == 0) t = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(t, jobs));
}

}  // namespace

std::vector<RunRecord> run_suite(const std::vector<MethodSpec>& methods,
                                 const DataSource& source, const SuiteOptions& options) {
  if (methods.empty()) throw Error("run_suite: no methods given");
  if (static_cast<bool>(source.synthetic) == static_cast<bool>(source.fixed))
    throw Error("run_suite: exactly one data source must be set");

  struct Job {
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  if (source.synthetic) {
    if (source.synthetic->seeds.empty()) throw Error("run_suite: empty seed list");
    for (auto s : source.synthetic->seeds) jobs.push_back({s});
    // Distinct seeds, or replications collapse into copies of one dataset.
    auto sorted = source.synthetic->seeds;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw Error("run_suite: seeds must be distinct");
  } else {
    jobs.push_back({0});
  }

  std::vector<std::vector<RunRecord>> per_job(jobs.size());
  std::atomic<std::size_t> next{0};

  const auto worker = [&] {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= jobs.size()) return;
      const Job& job = jobs[idx];

      Dataset generated;
      const Dataset* full = nullptr;
      FormulaSpec formula;
      if (source.synthetic) {
        SynthConfig cfg = source.synthetic->config;
        cfg.seed = job.seed;
        generated = generate_synthetic(cfg).first;
        full = &generated;
        formula = parse_formula("y ~ .", *full);
      } else {
        full = &source.fixed->data;
        formula = source.fixed->formula;
      }

      std::vector<RunRecord> records;
      records.reserve(methods.size());
      Split split = make_split(*full, options.holdout, job.seed);
      for (const auto& m : methods) {
        const auto t0 = std::chrono::steady_clock::now();
        RunRecord rec;
        try {
          rec = run_method_once(m, split.train, formula,
                                split.test ? &*split.test : nullptr, job.seed);
        } catch (const std::exception& e) {
          rec = RunRecord{};
          rec.method_id = m.id;
          rec.seed = job.seed;
          rec.ok = false;
          rec.error = e.what();
          rec.aic = rec.bic = rec.adj_r2 = rec.rmse = rec.mae = nan_value();
        }
        rec.wall_time_s =
            options.measure_time
                ? std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
                : 0.0;
        records.push_back(std::move(rec));
      }
      per_job[idx] = std::move(records);
    }
  };

  const unsigned n_threads = resolve_threads(options.threads, jobs.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<RunRecord> out;
  for (auto& batch : per_job)
    for (auto& rec : batch) out.push_back(std::move(rec));
  return out;
}

namespace {

struct Stats {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double sd = std::numeric_limits<double>::quiet_NaN();
};

Stats stats_of(const std::vector<double>& v) {
  if (v.empty()) return {};
  double m = 0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  return {m, sd};
}

}  // namespace

std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& records,
                                    const std::vector<MethodSpec>& methods) {
  std::vector<AggregateRow> rows;
  for (const auto& m : methods) {
    std::vector<double> aic, bic, adj, rmse, mae, vars, time;
    std::map<std::vector<std::string>, std::size_t> sets;
    std::size_t failed = 0;
    for (const auto& rec : records) {
      if (rec.method_id != m.id) continue;
      if (!rec.ok) {
        ++failed;
        continue;
      }
      aic.push_back(rec.aic);
      bic.push_back(rec.bic);
      adj.push_back(rec.adj_r2);
      rmse.push_back(rec.rmse);
      mae.push_back(rec.mae);
      vars.push_back(static_cast<double>(rec.n_vars));
      time.push_back(rec.wall_time_s);
      ++sets[rec.selected_set];
    }
    if (aic.empty())
      throw Error("aggregate: no successful run for method " + m.id +
                  (failed ? " (" + std::to_string(failed) + " failed)" : ""));

    AggregateRow row;
    row.method = m.method;
    row.settings = m.settings;
    const auto s_aic = stats_of(aic), s_bic = stats_of(bic), s_adj = stats_of(adj),
               s_rmse = stats_of(rmse), s_mae = stats_of(mae), s_vars = stats_of(vars),
               s_time = stats_of(time);
    row.aic_mean = s_aic.mean;
    row.aic_sd = s_aic.sd;
    row.bic_mean = s_bic.mean;
    row.bic_sd = s_bic.sd;
    row.adj_r2_mean = s_adj.mean;
    row.adj_r2_sd = s_adj.sd;
    row.rmse_mean = s_rmse.mean;
    row.rmse_sd = s_rmse.sd;
    row.mae_mean = s_mae.mean;
    row.mae_sd = s_mae.sd;
    row.vars_mean = s_vars.mean;
    row.vars_sd = s_vars.sd;
    row.time_s = s_time.mean;
    std::size_t modal = 0;
    for (const auto& [set, count] : sets) modal = std::max(modal, count);
    row.stability = static_cast<double>(modal) / static_cast<double>(aic.size());
    row.n_runs = aic.size();
    row.n_failed = failed;
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string csv_cell(double v) { return std::isnan(v) ? "" : num_full(v); }

nlohmann::ordered_json json_cell(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace

std::string render_report(const std::vector<AggregateRow>& rows, ReportFormat format) {
  if (rows.empty()) throw Error("emit_report: no rows");
  if (format == ReportFormat::csv) {
    std::ostringstream out;
    out << "method,settings,aic_mean,aic_sd,bic_mean,bic_sd,adj_r2_mean,adj_r2_sd,"
           "rmse_mean,rmse_sd,mae_mean,mae_sd,stability,vars_mean,vars_sd,time_s\n";
    for (const auto& r : rows) {
      out << r.method << ',' << r.settings << ',' << csv_cell(r.aic_mean) << ','
          << csv_cell(r.aic_sd) << ',' << csv_cell(r.bic_mean) << ',' << csv_cell(r.bic_sd)
          << ',' << csv_cell(r.adj_r2_mean) << ',' << csv_cell(r.adj_r2_sd) << ','
          << csv_cell(r.rmse_mean) << ',' << csv_cell(r.rmse_sd) << ','
          << csv_cell(r.mae_mean) << ',' << csv_cell(r.mae_sd) << ','
          << csv_cell(r.stability) << ',' << csv_cell(r.vars_mean) << ','
          << csv_cell(r.vars_sd) << ',' << csv_cell(r.time_s) << '\n';
    }
    return out.str();
  }
  nlohmann::ordered_json j;
  j["generator"] = CounterRng::kName;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json row;
    row["method"] = r.method;
    row["settings"] = r.settings;
    row["aic_mean"] = json_cell(r.aic_mean);
    row["aic_sd"] = json_cell(r.aic_sd);
    row["bic_mean"] = json_cell(r.bic_mean);
    row["bic_sd"] = json_cell(r.bic_sd);
    row["adj_r2_mean"] = json_cell(r.adj_r2_mean);
    row["adj_r2_sd"] = json_cell(r.adj_r2_sd);
    row["rmse_mean"] = json_cell(r.rmse_mean);
    row["rmse_sd"] = json_cell(r.rmse_sd);
    row["mae_mean"] = json_cell(r.mae_mean);
    row["mae_sd"] = json_cell(r.mae_sd);
    row["stability"] = json_cell(r.stability);
    row["vars_mean"] = json_cell(r.vars_mean);
    row["vars_sd"] = json_cell(r.vars_sd);
    row["time_s"] = json_cell(r.time_s);
    arr.push_back(std::move(row));
  }
  j["rows"] = std::move(arr);
  return j.dump(2) + "\n";
}

void emit_report(const std::vector<AggregateRow>& rows, ReportFormat format,
                 const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write report: " + path);
  out << render_report(rows, format);
}

}  // namespace splitwise
