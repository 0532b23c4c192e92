#ifndef SPLITWISE_BASELINES_HPP
#define SPLITWISE_BASELINES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "splitwise/dataset.hpp"
#include "splitwise/linmod.hpp"

namespace splitwise {

struct BestSubsetConfig {
  std::size_t min_size = 1;
  std::size_t max_size = 4;
  Criterion criterion = Criterion::aic;
  // Enumeration guard: total subsets in the size window must stay under this.
  std::uint64_t hard_cap = 2'000'000;
};

struct BestSubsetResult {
  std::vector<std::string> selected;  // formula term order
  OlsFit fit;
  double criterion_value = 0;
};

// Fits every predictor subset with size in [min_size, max_size] and returns
// the criterion minimizer. Ties break toward the subset enumerated first
// (smaller size, then lexicographic position order). Throws BudgetError when
// the window exceeds hard_cap.
BestSubsetResult best_subset(const Dataset& data, const FormulaSpec& formula,
                             const BestSubsetConfig& config);

struct ElasticNetConfig {
  double alpha = 1.0;                // 1 = lasso, 0 = ridge
  std::vector<double> lambda_grid;   // strictly descending; empty = auto
  std::size_t n_folds = 10;
  double tol = 1e-7;
  std::size_t max_iter = 100000;
  std::uint64_t seed = 1;
};

struct ElasticNetFit {
  std::vector<std::string> names;        // predictors, formula term order
  double intercept = 0;                  // original scale
  std::vector<double> coefficients;      // original scale
  std::vector<double> std_coefficients;  // standardized scale
  double alpha = 1.0;
  double lambda = 0;
  std::size_t n_sweeps = 0;
};

// Cyclic coordinate descent for
//   (1/2n) ||y - b0 - X b||^2 + lambda (alpha ||b||_1 + (1-alpha)/2 ||b||_2^2)
// on predictors standardized to zero mean and unit variance; the intercept
// is unpenalized. Converged when the largest coefficient change in a sweep
// drops under tol; ConvergenceError (carrying the last iterate) after
// max_iter sweeps.
ElasticNetFit elastic_net_fit(const Dataset& data, const FormulaSpec& formula,
                              double alpha, double lambda, double tol = 1e-7,
                              std::size_t max_iter = 100000);

// Smallest lambda at which all lasso-direction slopes are zero,
// max_j |x~_j' y_c| / (n * max(alpha, 1e-3)).
double lambda_max(const Dataset& data, const FormulaSpec& formula, double alpha);

// 100 log-spaced values from lambda_max down to ratio * lambda_max, where
// ratio is 1e-4 when n > p and 1e-3 otherwise.
std::vector<double> auto_lambda_grid(const Dataset& data, const FormulaSpec& formula,
                                     double alpha);

struct CvSelection {
  double lambda = 0;
  ElasticNetFit fit;                 // refit on the full data
  std::vector<double> lambda_grid;   // grid actually used
  std::vector<double> cv_mse;        // mean validation MSE per grid point
};

// K-fold cross-validation over the grid; folds come from a seeded shuffle
// with sizes differing by at most one. Picks the MSE-minimizing lambda
// (ties toward the larger penalty) and refits on the full data. explicit
// fold assignments (values in [0, n_folds)) override the seeded shuffle.
CvSelection cv_select_lambda(const Dataset& data, const FormulaSpec& formula,
                             const ElasticNetConfig& config,
                             const std::vector<int>* fold_assignment = nullptr);

// Selected-variable count for penalized fits: |standardized coefficient|
// above this counts as selected.
inline constexpr double kPenalizedSelectionEps = 1e-7;

}  // namespace splitwise

#endif  // SPLITWISE_BASELINES_HPP
