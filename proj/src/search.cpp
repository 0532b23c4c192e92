#include "splitwise/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "splitwise/error.hpp"
#include "splitwise/format.hpp"

namespace splitwise {

namespace {

// An action must beat the incumbent criterion by more than this to be
// applied; keeps ties from cycling.
constexpr double kImproveTol = 1e-9;

double neg_inf() { return -std::numeric_limits<double>::infinity(); }

// Criterion that tolerates saturated fits (rss == 0) by treating them as
// unboundedly good; the public criterion_value() throws instead.
double crit_of(const OlsFit& fit, Criterion c) {
  if (!(fit.rss > 0)) return neg_inf();
  return c == Criterion::aic ? fit.aic : fit.bic;
}

}  // namespace

std::vector<double> ModelColumn::build(std::span<const double> x) const {
  std::vector<double> out(x.size());
  switch (form) {
    case Form::linear:
      std::copy(x.begin(), x.end(), out.begin());
      break;
    case Form::ge:
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] >= lo ? 1.0 : 0.0;
      break;
    case Form::interval:
      for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = (x[i] >= lo && x[i] < hi) ? 1.0 : 0.0;
      break;
  }
  return out;
}

std::vector<ModelColumn> columns_for(const std::string& var, const Encoding& enc) {
  switch (enc.kind) {
    case Encoding::Kind::excluded:
      return {};
    case Encoding::Kind::linear:
      return {{var, var, ModelColumn::Form::linear, 0, 0}};
    case Encoding::Kind::single_split:
      return {{var + "_dummy", var, ModelColumn::Form::ge, enc.cut_lo, 0}};
    case Encoding::Kind::double_split:
      return {{var + "_dummy1", var, ModelColumn::Form::interval, enc.cut_lo, enc.cut_hi},
              {var + "_dummy2", var, ModelColumn::Form::ge, enc.cut_hi, 0}};
  }
  throw Error("columns_for: invalid encoding kind");
}

const char* step_kind_name(StepAction::Kind kind) {
  switch (kind) {
    case StepAction::Kind::add: return "add";
    case StepAction::Kind::remove: return "remove";
    case StepAction::Kind::switch_form: return "switch";
  }
  return "?";
}

std::vector<std::string> SplitwiseModel::selected_vars() const {
  std::vector<std::string> vars;
  for (const auto& col : state.columns)
    if (std::find(vars.begin(), vars.end(), col.source_var) == vars.end())
      vars.push_back(col.source_var);
  std::sort(vars.begin(), vars.end());
  return vars;
}

namespace {

// Shared machinery for the three search modes.
class Searcher {
 public:
  Searcher(const Dataset& data, const FormulaSpec& formula, const SearchConfig& config)
      : data_(data), formula_(formula), config_(config), y_(data.column(formula.response)) {
    config_.tree_params.validate();
  }

  SplitwiseModel run_iterative() {
    const auto t0 = std::chrono::steady_clock::now();
    SplitwiseModel model = loop(/*dummy_candidates=*/true, /*allow_switch=*/true);
    model.wall_seconds = seconds_since(t0);
    return model;
  }

  SplitwiseModel run_classical() {
    const auto t0 = std::chrono::steady_clock::now();
    SplitwiseModel model = loop(/*dummy_candidates=*/false, /*allow_switch=*/false);
    model.wall_seconds = seconds_since(t0);
    return model;
  }

  SplitwiseModel run_univariate() {
    const auto t0 = std::chrono::steady_clock::now();

    // Phase 1: pick each variable's form independently against raw y.
    TransformPlan phase1;
    for (const auto& var : formula_.resolved) {
      Encoding enc;
      if (transformable(var)) {
        enc = choose_univariate_form(data_.column(var), y_, config_.criterion,
                                     config_.tree_params)
                  .first;
      } else {
        enc = choose_linear_or_excluded(var);
      }
      phase1.emplace_back(var, enc);
    }

    // Phase 2: classical stepwise over the encoded columns, each selectable
    // on its own.
    std::vector<ModelColumn> pool;
    std::vector<std::pair<std::string, std::vector<double>>> encoded;
    encoded.emplace_back(formula_.response, y_);
    for (const auto& [var, enc] : phase1) {
      if (enc.kind == Encoding::Kind::excluded) continue;
      for (auto& col : columns_for(var, enc)) {
        encoded.emplace_back(col.name, col.build(data_.column(var)));
        pool.push_back(std::move(col));
      }
    }

    SplitwiseModel model;
    model.config = config_;
    model.response = formula_.response;
    model.encodings_considered = phase1;
    model.initial_plan = phase1;

    if (pool.empty()) {
      // Every variable was excluded in phase 1.
      model.state = fit_columns({});
      model.intercept_only = true;
      model.wall_seconds = seconds_since(t0);
      return model;
    }

    Dataset enc_data = Dataset::from_columns(std::move(encoded));
    FormulaSpec enc_formula = parse_formula(formula_.response + " ~ .", enc_data);
    SearchConfig enc_config = config_;
    enc_config.mode = Mode::classical;
    Searcher phase2(enc_data, enc_formula, enc_config);
    SplitwiseModel stepped = phase2.loop(false, false);

    // Translate the surviving encoded columns back to their variable-level
    // specs; the fitted design is shared, only provenance changes.
    model.state = std::move(stepped.state);
    model.history = std::move(stepped.history);
    for (auto& col : model.state.columns) {
      const auto it = std::find_if(pool.begin(), pool.end(),
                                   [&](const ModelColumn& c) { return c.name == col.name; });
      col = *it;
    }
    TransformPlan final_plan;
    for (const auto& [var, enc] : phase1) {
      const bool survived =
          std::any_of(model.state.columns.begin(), model.state.columns.end(),
                      [&](const ModelColumn& c) { return c.source_var == var; });
      if (survived) final_plan.emplace_back(var, enc);
    }
    model.state.plan = std::move(final_plan);
    model.intercept_only = model.state.columns.empty();
    model.wall_seconds = seconds_since(t0);
    return model;
  }

 private:
  struct Candidate {
    bool valid = false;
    double criterion = 0;
    ModelState state;
  };

  static double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  bool transformable(const std::string& var) const {
    return !config_.transformable || config_.transformable->count(var) > 0;
  }

  // Fit the design induced by the given columns. Degenerate or collinear
  // candidates surface as exceptions for the caller.
  ModelState fit_columns(std::vector<ModelColumn> cols) const {
    std::vector<std::vector<double>> values;
    values.reserve(cols.size());
    for (const auto& col : cols) {
      auto built = apply_encoding_checked(col);
      values.push_back(std::move(built));
    }
    std::vector<std::pair<std::string, std::span<const double>>> named;
    named.reserve(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i)
      named.emplace_back(cols[i].name, std::span<const double>(values[i]));
    DesignMatrix design = make_design(data_.n_rows(), named);
    ModelState state;
    state.fit = fit_ols(design, y_);
    state.criterion_value = crit_of(state.fit, config_.criterion);
    state.columns = std::move(cols);
    return state;
  }

  // Column values with the constant-dummy check applied.
  std::vector<double> apply_encoding_checked(const ModelColumn& col) const {
    const auto& x = data_.column(col.source_var);
    std::vector<double> v = col.build(x);
    if (col.form != ModelColumn::Form::linear) {
      const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
      if (*mn == *mx)
        throw DegenerateEncodingError("dummy column " + col.name + " is constant");
    }
    return v;
  }

  ModelState fit_plan(const TransformPlan& plan) const {
    std::vector<ModelColumn> cols;
    for (const auto& [var, enc] : plan)
      for (auto& c : columns_for(var, enc)) cols.push_back(std::move(c));
    ModelState state = fit_columns(std::move(cols));
    state.plan = plan;
    return state;
  }

  Candidate try_plan(const TransformPlan& plan) const {
    Candidate cand;
    try {
      cand.state = fit_plan(plan);
      cand.criterion = cand.state.criterion_value;
      cand.valid = true;
    } catch (const DegenerateEncodingError&) {
    } catch (const RankDeficientError&) {
    } catch (const InsufficientDataError&) {
    }
    return cand;
  }

  // Candidate encodings for one variable given a tree target: always linear,
  // plus single/double-split forms when the tree yields cuts.
  std::vector<Encoding> candidate_forms(const std::string& var,
                                        std::span<const double> target,
                                        bool dummy_candidates) const {
    std::vector<Encoding> forms{Encoding::linear()};
    if (!dummy_candidates || !transformable(var)) return forms;
    const auto& x = data_.column(var);
    const auto root = best_single_split(x, target, config_.tree_params);
    if (root) {
      forms.push_back(Encoding::single_split(root->cut));
      const auto tree = shallow_tree_cuts(x, target, config_.tree_params);
      if (tree.cuts.size() == 2)
        forms.push_back(Encoding::double_split(tree.cuts[0], tree.cuts[1]));
    }
    return forms;
  }

  // Insert (var, enc) at the variable's formula position.
  TransformPlan plan_with(const TransformPlan& plan, const std::string& var,
                          const Encoding& enc) const {
    TransformPlan out;
    bool placed = false;
    const auto pos = term_index(var);
    for (const auto& entry : plan) {
      if (!placed && term_index(entry.first) > pos) {
        out.emplace_back(var, enc);
        placed = true;
      }
      out.push_back(entry);
    }
    if (!placed) out.emplace_back(var, enc);
    return out;
  }

  static TransformPlan plan_without(const TransformPlan& plan, const std::string& var) {
    TransformPlan out;
    for (const auto& entry : plan)
      if (entry.first != var) out.push_back(entry);
    return out;
  }

  std::size_t term_index(const std::string& var) const {
    const auto it = std::find(formula_.resolved.begin(), formula_.resolved.end(), var);
    return static_cast<std::size_t>(it - formula_.resolved.begin());
  }

  // Best single-variable form against raw y among linear/single/double, used
  // for backward initialization. Near-ties prefer the simpler form.
  Encoding best_init_form(const std::string& var) const {
    if (config_.backward_init == BackwardInit::linear || !transformable(var))
      return Encoding::linear();
    Encoding best = Encoding::linear();
    double best_crit = std::numeric_limits<double>::infinity();
    for (const auto& enc : candidate_forms(var, y_, true)) {
      const auto cand = try_plan({{var, enc}});
      if (cand.valid && cand.criterion < best_crit - kImproveTol) {
        best = enc;
        best_crit = cand.criterion;
      }
    }
    return best;
  }

  // Null-vs-linear choice for variables not eligible for dummy encoding.
  Encoding choose_linear_or_excluded(const std::string& var) const {
    const auto null_cand = try_plan({});
    const auto lin = try_plan({{var, Encoding::linear()}});
    if (lin.valid && null_cand.valid && lin.criterion < null_cand.criterion - kImproveTol)
      return Encoding::linear();
    return Encoding::excluded();
  }

  SplitwiseModel loop(bool dummy_candidates, bool allow_switch) {
    SplitwiseModel model;
    model.config = config_;
    model.response = formula_.response;

    TransformPlan plan;
    if (config_.direction == Direction::backward) {
      for (const auto& var : formula_.resolved) {
        const Encoding enc = dummy_candidates ? best_init_form(var) : Encoding::linear();
        plan.emplace_back(var, enc);
      }
    }

    ModelState current = fit_plan(plan);
    model.initial_plan = plan;
    std::vector<std::pair<std::string, Encoding>> considered;
    auto note_considered = [&](const std::string& var, const Encoding& enc) {
      const auto it = std::find_if(considered.begin(), considered.end(),
                                   [&](const auto& e) { return e.first == var; });
      if (it == considered.end())
        considered.emplace_back(var, enc);
      else
        it->second = enc;
    };
    for (const auto& [var, enc] : plan) note_considered(var, enc);

    const bool can_add =
        config_.direction == Direction::forward || config_.direction == Direction::both;
    const bool can_remove =
        config_.direction == Direction::backward || config_.direction == Direction::both;

    struct Best {
      double criterion = std::numeric_limits<double>::infinity();
      int kind_rank = 0;  // add 0, switch 1, remove 2
      std::size_t term = 0;
      StepAction action;
      ModelState state;
      bool valid = false;
    };

    while (true) {
      Best best;
      auto offer = [&](int kind_rank, std::size_t term, StepAction action, Candidate&& cand) {
        if (!cand.valid) return;
        const bool wins =
            !best.valid || cand.criterion < best.criterion ||
            (cand.criterion == best.criterion &&
             (kind_rank < best.kind_rank ||
              (kind_rank == best.kind_rank && term < best.term)));
        if (wins) {
          action.criterion_after = cand.criterion;
          best = Best{cand.criterion, kind_rank, term, std::move(action),
                      std::move(cand.state), true};
        }
      };

      for (const auto& var : formula_.resolved) {
        const auto in_plan = std::find_if(plan.begin(), plan.end(),
                                          [&](const auto& e) { return e.first == var; });
        if (in_plan == plan.end()) {
          if (!can_add) continue;
          // Add: best form for this variable, cuts from a tree against the
          // configured target.
          std::span<const double> target =
              (config_.tree_target == TreeTarget::residuals)
                  ? std::span<const double>(current.fit.residuals)
                  : std::span<const double>(y_);
          Candidate best_form;
          Encoding best_enc;
          for (const auto& enc : candidate_forms(var, target, dummy_candidates)) {
            auto cand = try_plan(plan_with(plan, var, enc));
            if (cand.valid &&
                (!best_form.valid || cand.criterion < best_form.criterion - kImproveTol)) {
              best_form = std::move(cand);
              best_enc = enc;
            }
          }
          if (best_form.valid)
            offer(0, term_index(var),
                  StepAction{StepAction::Kind::add, var, best_enc, 0}, std::move(best_form));
        } else {
          const TransformPlan base = plan_without(plan, var);
          Candidate removed = try_plan(base);
          if (can_remove && removed.valid)
            offer(2, term_index(var),
                  StepAction{StepAction::Kind::remove, var, Encoding::excluded(), 0},
                  Candidate{removed.valid, removed.criterion, removed.state});
          if (allow_switch && removed.valid) {
            // Switch: re-derive forms from the model without this variable.
            std::span<const double> target =
                (config_.tree_target == TreeTarget::residuals)
                    ? std::span<const double>(removed.state.fit.residuals)
                    : std::span<const double>(y_);
            Candidate best_form;
            Encoding best_enc;
            for (const auto& enc : candidate_forms(var, target, dummy_candidates)) {
              if (enc == in_plan->second) continue;
              auto cand = try_plan(plan_with(base, var, enc));
              if (cand.valid &&
                  (!best_form.valid || cand.criterion < best_form.criterion - kImproveTol)) {
                best_form = std::move(cand);
                best_enc = enc;
              }
            }
            if (best_form.valid)
              offer(1, term_index(var),
                    StepAction{StepAction::Kind::switch_form, var, best_enc, 0},
                    std::move(best_form));
          }
        }
      }

      if (!best.valid || !(best.criterion < current.criterion_value - kImproveTol)) break;

      plan = best.state.plan;
      current = std::move(best.state);
      if (best.action.kind != StepAction::Kind::remove)
        note_considered(best.action.var, best.action.encoding);
      model.history.push_back(std::move(best.action));
    }

    model.state = std::move(current);
    model.encodings_considered = std::move(considered);
    model.intercept_only = model.state.columns.empty();
    return model;
  }

  const Dataset& data_;
  const FormulaSpec& formula_;
  SearchConfig config_;
  const std::vector<double>& y_;
};

}  // namespace

std::pair<Encoding, double> choose_univariate_form(std::span<const double> x,
                                                   std::span<const double> y,
                                                   Criterion criterion,
                                                   const TreeParams& params) {
  params.validate();
  if (x.size() != y.size()) throw Error("choose_univariate_form: length mismatch");
  if (x.size() < 3) throw Error("choose_univariate_form: needs n >= 3");
  const std::size_t n = x.size();

  const auto fit_cols =
      [&](const std::vector<std::pair<std::string, std::span<const double>>>& cols) {
        return crit_of(fit_ols(make_design(n, cols), y), criterion);
      };

  // Null model first; simpler forms win near-ties.
  Encoding best = Encoding::excluded();
  double best_crit = fit_cols({});

  const auto consider = [&](const Encoding& enc, std::span<const double> x_raw) {
    try {
      std::vector<EncodedColumn> cols = apply_encoding(x_raw, "x", enc);
      std::vector<std::pair<std::string, std::span<const double>>> named;
      for (const auto& c : cols) named.emplace_back(c.name, std::span<const double>(c.values));
      const double crit = fit_cols(named);
      if (crit < best_crit - kImproveTol) {
        best = enc;
        best_crit = crit;
      }
    } catch (const DegenerateEncodingError&) {
    } catch (const RankDeficientError&) {
    } catch (const InsufficientDataError&) {
    }
  };

  consider(Encoding::linear(), x);
  const auto root = best_single_split(x, y, params);
  if (root) {
    consider(Encoding::single_split(root->cut), x);
    const auto tree = shallow_tree_cuts(x, y, params);
    if (tree.cuts.size() == 2)
      consider(Encoding::double_split(tree.cuts[0], tree.cuts[1]), x);
  }
  return {best, best_crit};
}

SplitwiseModel splitwise_univariate(const Dataset& data, const FormulaSpec& formula,
                                    const SearchConfig& config) {
  Searcher s(data, formula, config);
  return s.run_univariate();
}

SplitwiseModel splitwise_iterative(const Dataset& data, const FormulaSpec& formula,
                                   const SearchConfig& config) {
  Searcher s(data, formula, config);
  return s.run_iterative();
}

SplitwiseModel classical_stepwise(const Dataset& data, const FormulaSpec& formula,
                                  const SearchConfig& config) {
  Searcher s(data, formula, config);
  return s.run_classical();
}

SplitwiseModel run_search(const Dataset& data, const FormulaSpec& formula,
                          const SearchConfig& config) {
  switch (config.mode) {
    case Mode::iterative: return splitwise_iterative(data, formula, config);
    case Mode::univariate: return splitwise_univariate(data, formula, config);
    case Mode::classical: return classical_stepwise(data, formula, config);
  }
  throw Error("run_search: invalid mode");
}

namespace {

std::string stars(double p) {
  if (p < 0.001) return "(***)";
  if (p < 0.01) return "(**)";
  if (p < 0.05) return "(*)";
  if (p < 0.1) return "(.)";
  return "";
}

double quantile_type7(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

std::string model_summary(const SplitwiseModel& model) {
  const OlsFit& fit = model.state.fit;
  std::ostringstream out;

  out << "Call:\nlm(formula = " << model.response << " ~ ";
  if (model.state.columns.empty()) {
    out << "1";
  } else {
    for (std::size_t i = 0; i < model.state.columns.size(); ++i) {
      if (i) out << " + ";
      out << model.state.columns[i].name;
    }
  }
  out << ")\n\n";

  out << "Residuals:\n";
  const char* qnames[5] = {"Min", "1Q", "Median", "3Q", "Max"};
  const double qs[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
  char buf[64];
  for (int i = 0; i < 5; ++i) {
    std::snprintf(buf, sizeof buf, "%9s", qnames[i]);
    out << buf;
  }
  out << '\n';
  for (double q : qs) {
    std::snprintf(buf, sizeof buf, "%9.4f", quantile_type7(fit.residuals, q));
    out << buf;
  }
  out << "\n\n";

  out << "Coefficients:\n";
  std::size_t width = 0;
  for (const auto& name : fit.column_names) width = std::max(width, name.size());
  for (std::size_t j = 0; j < fit.k_coef; ++j) {
    std::snprintf(buf, sizeof buf, "%-*s % f", static_cast<int>(width),
                  fit.column_names[j].c_str(), fit.coefficients[j]);
    out << buf;
    if (fit.std_errors[j] > 0 && fit.df_resid > 0) {
      const double t = fit.coefficients[j] / fit.std_errors[j];
      const std::string s = stars(t_pvalue(t, static_cast<double>(fit.df_resid)));
      if (!s.empty()) out << ' ' << s;
    }
    out << '\n';
  }
  out << '\n';

  out << "Residual standard error: " << num_fixed(fit.sigma, 2) << " on " << fit.df_resid
      << " degrees of freedom\n";
  out << "Multiple R-squared: " << num_fixed(fit.r2, 4) << '\n';
  out << "Adjusted R-squared: " << num_fixed(fit.adj_r2, 4) << '\n';
  if (fit.k_coef > 1) {
    const double df1 = static_cast<double>(fit.k_coef - 1);
    const double df2 = static_cast<double>(fit.df_resid);
    std::snprintf(buf, sizeof buf, "%.4g", f_pvalue(fit.f_stat, df1, df2));
    out << "F-statistic: " << num_fixed(fit.f_stat, 2) << " on " << (fit.k_coef - 1)
        << " and " << fit.df_resid << " DF, p-value: " << buf << '\n';
  }

  std::vector<std::string> dummy_lines;
  for (const auto& [var, enc] : model.encodings_considered) {
    if (!enc.is_dummy()) continue;
    for (const auto& line : describe_encoding(var, enc))
      dummy_lines.push_back("- " + line);
  }
  if (!dummy_lines.empty()) {
    out << "\nDummy-Encoded Variables:\n";
    for (const auto& line : dummy_lines) out << line << '\n';
  }

  out << "\nFinal AIC: " << num_round2(fit.aic) << '\n'
      << "Final BIC: " << num_round2(fit.bic) << '\n';
  return out.str();
}

nlohmann::ordered_json model_to_json(const SplitwiseModel& model) {
  nlohmann::ordered_json j;
  j["mode"] = model.config.mode == Mode::iterative
                  ? "iterative"
                  : (model.config.mode == Mode::univariate ? "univariate" : "classical");
  j["direction"] = model.config.direction == Direction::forward
                       ? "forward"
                       : (model.config.direction == Direction::backward ? "backward" : "both");
  j["criterion"] = criterion_name(model.config.criterion);
  j["response"] = model.response;
  j["criterion_value"] = model.state.criterion_value;
  j["final_aic"] = model.state.fit.aic;
  j["final_bic"] = model.state.fit.bic;
  j["intercept_only"] = model.intercept_only;
  j["plan"] = plan_to_json(model.state.plan);
  j["initial_plan"] = plan_to_json(model.initial_plan);
  j["encodings_considered"] = plan_to_json(model.encodings_considered);

  nlohmann::ordered_json cols = nlohmann::ordered_json::array();
  for (const auto& col : model.state.columns) {
    nlohmann::ordered_json c;
    c["name"] = col.name;
    c["source_var"] = col.source_var;
    switch (col.form) {
      case ModelColumn::Form::linear:
        c["form"] = "linear";
        c["cuts"] = nlohmann::ordered_json::array();
        break;
      case ModelColumn::Form::ge:
        c["form"] = "ge";
        c["cuts"] = {col.lo};
        break;
      case ModelColumn::Form::interval:
        c["form"] = "interval";
        c["cuts"] = {col.lo, col.hi};
        break;
    }
    cols.push_back(std::move(c));
  }
  j["columns"] = std::move(cols);
  j["fit"] = fit_to_json(model.state.fit);

  nlohmann::ordered_json hist = nlohmann::ordered_json::array();
  for (const auto& action : model.history) {
    nlohmann::ordered_json a;
    a["action"] = step_kind_name(action.kind);
    a["var"] = action.var;
    if (action.kind != StepAction::Kind::remove)
      a["encoding"] = encoding_to_json(action.encoding);
    a["criterion"] = action.criterion_after;
    hist.push_back(std::move(a));
  }
  j["history"] = std::move(hist);
  j["selected_vars"] = model.selected_vars();
  j["wall_seconds"] = model.wall_seconds;
  return j;
}

}  // namespace splitwise
