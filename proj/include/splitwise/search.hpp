#ifndef SPLITWISE_SEARCH_HPP
#define SPLITWISE_SEARCH_HPP

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "splitwise/dataset.hpp"
#include "splitwise/encode.hpp"
#include "splitwise/linmod.hpp"
#include "splitwise/treesplit.hpp"

namespace splitwise {

enum class Mode { iterative, univariate, classical };
enum class Direction { forward, backward, both };

// Where the split-finding trees take their target from in iterative mode:
// the current model's residuals (default) or the raw response.
enum class TreeTarget { residuals, response };

// Backward runs start from the full model with every variable as-is
// (linear), or from each variable's best single-variable form.
enum class BackwardInit { linear, univariate_best };

struct SearchConfig {
  Mode mode = Mode::iterative;
  Direction direction = Direction::backward;
  Criterion criterion = Criterion::aic;
  TreeParams tree_params;
  // Variables eligible for dummy encoding; unset means all terms.
  std::optional<std::set<std::string>> transformable;
  TreeTarget tree_target = TreeTarget::residuals;
  BackwardInit backward_init = BackwardInit::linear;
};

struct StepAction {
  enum class Kind { add, remove, switch_form };

  Kind kind = Kind::add;
  std::string var;
  Encoding encoding;        // the encoding added/switched to; unused for remove
  double criterion_after = 0;
};

const char* step_kind_name(StepAction::Kind kind);

// One design column of the current model: where it came from and how to
// rebuild it from raw predictor values (e.g. on held-out rows).
struct ModelColumn {
  enum class Form { linear, ge, interval };

  std::string name;
  std::string source_var;
  Form form = Form::linear;
  double lo = 0;
  double hi = 0;

  std::vector<double> build(std::span<const double> x) const;
};

// The design columns an encoding induces for one variable.
std::vector<ModelColumn> columns_for(const std::string& var, const Encoding& enc);

// A fitted model together with the plan that induced its design.
struct ModelState {
  TransformPlan plan;                // included variables, term order
  std::vector<ModelColumn> columns;  // design columns (intercept excluded)
  OlsFit fit;
  double criterion_value = 0;
};

struct SplitwiseModel {
  SearchConfig config;
  std::string response;
  ModelState state;
  // Plan before the first applied action; for univariate mode, the phase-1
  // plan whose columns entered the selection phase.
  TransformPlan initial_plan;
  std::vector<StepAction> history;       // applied actions, in order
  TransformPlan encodings_considered;    // includes ultimately excluded vars
  double wall_seconds = 0;
  bool intercept_only = false;           // true when nothing survived

  // Distinct original variables in the final design, sorted.
  std::vector<std::string> selected_vars() const;
};

// Scores the four single-variable candidates (null, linear, single-split,
// double-split; cuts from the shallow tree against y) and returns the
// winner. Near-ties go to the simpler form. Constant x yields excluded.
std::pair<Encoding, double> choose_univariate_form(std::span<const double> x,
                                                   std::span<const double> y,
                                                   Criterion criterion,
                                                   const TreeParams& params);

// Transformation-first mode: pick each variable's form against raw y, then
// run classical stepwise over the encoded columns.
SplitwiseModel splitwise_univariate(const Dataset& data, const FormulaSpec& formula,
                                    const SearchConfig& config);

// Integrated mode: stepwise loop whose add/switch candidates are re-derived
// from shallow trees at every step.
SplitwiseModel splitwise_iterative(const Dataset& data, const FormulaSpec& formula,
                                   const SearchConfig& config);

// Plain stepwise selection: the iterative loop with every encoding forced
// linear and switching disabled.
SplitwiseModel classical_stepwise(const Dataset& data, const FormulaSpec& formula,
                                  const SearchConfig& config);

// Dispatch on config.mode.
SplitwiseModel run_search(const Dataset& data, const FormulaSpec& formula,
                          const SearchConfig& config);

// Text summary: coefficient block, residual diagnostics, dummy-encoded
// variable descriptions, and final criterion lines.
std::string model_summary(const SplitwiseModel& model);

nlohmann::ordered_json model_to_json(const SplitwiseModel& model);

}  // namespace splitwise

#endif  // SPLITWISE_SEARCH_HPP
