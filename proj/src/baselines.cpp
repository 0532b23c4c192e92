#include "splitwise/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "splitwise/error.hpp"
#include "splitwise/rng.hpp"

namespace splitwise {

namespace {

// Next k-combination of 0..p-1 in lexicographic order; false when exhausted.
bool next_combination(std::vector<std::size_t>& idx, std::size_t p) {
  const std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] < p - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

// Subset count for the size window, capped; returns cap+1 on overflow.
std::uint64_t window_count(std::size_t p, std::size_t lo, std::size_t hi,
                           std::uint64_t cap) {
  std::uint64_t total = 0;
  for (std::size_t k = lo; k <= hi; ++k) {
    double c = 1.0;
    for (std::size_t i = 0; i < k; ++i)
      c *= static_cast<double>(p - i) / static_cast<double>(i + 1);
    if (c > static_cast<double>(cap) || (total += static_cast<std::uint64_t>(c + 0.5)) > cap)
      return cap + 1;
  }
  return total;
}

}  // namespace

BestSubsetResult best_subset(const Dataset& data, const FormulaSpec& formula,
                             const BestSubsetConfig& config) {
  const auto& terms = formula.resolved;
  const std::size_t p = terms.size();
  if (config.min_size < 1 || config.min_size > config.max_size || config.max_size > p)
    throw Error("best subset: size window must satisfy 1 <= min <= max <= p");
  if (window_count(p, config.min_size, config.max_size, config.hard_cap) > config.hard_cap)
    throw BudgetError("best subset: size window exceeds the enumeration budget; "
                      "reduce max_size");

  const auto& y = data.column(formula.response);
  const std::size_t n = data.n_rows();

  std::optional<BestSubsetResult> best;
  for (std::size_t k = config.min_size; k <= config.max_size; ++k) {
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    do {
      std::vector<std::pair<std::string, std::span<const double>>> cols;
      cols.reserve(k);
      for (std::size_t j : idx)
        cols.emplace_back(terms[j], std::span<const double>(data.column(terms[j])));
      try {
        OlsFit fit = fit_ols(make_design(n, cols), y);
        const double crit = criterion_value(fit, config.criterion);
        if (!best || crit < best->criterion_value) {
          BestSubsetResult r;
          for (std::size_t j : idx) r.selected.push_back(terms[j]);
          r.fit = std::move(fit);
          r.criterion_value = crit;
          best = std::move(r);
        }
      } catch (const RankDeficientError&) {
        // Collinear subset; skip.
      } catch (const SaturatedFitError&) {
      }
    } while (next_combination(idx, p));
  }
  if (!best) throw Error("best subset: no subset produced a valid fit");
  return std::move(*best);
}

namespace {

struct Standardized {
  std::size_t n = 0, p = 0;
  std::vector<std::vector<double>> x;  // standardized columns
  std::vector<double> yc;              // centered response
  std::vector<double> mean, scale;     // per predictor
  double y_mean = 0;
  std::vector<bool> constant;          // sd == 0 columns are frozen at 0
};

Standardized standardize(const Dataset& data, const FormulaSpec& formula) {
  Standardized s;
  s.n = data.n_rows();
  s.p = formula.resolved.size();
  const auto& y = data.column(formula.response);
  s.y_mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(s.n);
  s.yc.resize(s.n);
  for (std::size_t i = 0; i < s.n; ++i) s.yc[i] = y[i] - s.y_mean;

  s.x.resize(s.p);
  s.mean.resize(s.p);
  s.scale.resize(s.p);
  s.constant.resize(s.p);
  for (std::size_t j = 0; j < s.p; ++j) {
    const auto& col = data.column(formula.resolved[j]);
    const double m = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(s.n);
    double ss = 0;
    for (double v : col) ss += (v - m) * (v - m);
    // Population (1/n) variance, so standardized columns have x'x = n.
    const double sd = std::sqrt(ss / static_cast<double>(s.n));
    s.mean[j] = m;
    s.constant[j] = !(sd > 0);
    s.scale[j] = s.constant[j] ? 1.0 : sd;
    s.x[j].resize(s.n);
    for (std::size_t i = 0; i < s.n; ++i) s.x[j][i] = (col[i] - m) / s.scale[j];
  }
  return s;
}

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

// Cyclic coordinate descent on standardized data. b is the warm start and
// the result. Returns sweep count; throws ConvergenceError past max_iter.
std::size_t coordinate_descent(const Standardized& s, double alpha, double lambda,
                               double tol, std::size_t max_iter, std::vector<double>& b) {
  const double dn = static_cast<double>(s.n);
  std::vector<double> r = s.yc;
  for (std::size_t j = 0; j < s.p; ++j) {
    if (b[j] == 0.0) continue;
    for (std::size_t i = 0; i < s.n; ++i) r[i] -= s.x[j][i] * b[j];
  }
  const double denom = 1.0 + lambda * (1.0 - alpha);
  for (std::size_t sweep = 1; sweep <= max_iter; ++sweep) {
    double max_delta = 0.0;
    for (std::size_t j = 0; j < s.p; ++j) {
      if (s.constant[j]) continue;
      double rho = 0.0;
      const auto& xj = s.x[j];
      for (std::size_t i = 0; i < s.n; ++i) rho += xj[i] * r[i];
      rho = rho / dn + b[j];  // own-column Gram term is exactly 1
      const double bj = soft_threshold(rho, lambda * alpha) / denom;
      const double delta = bj - b[j];
      if (delta != 0.0) {
        for (std::size_t i = 0; i < s.n; ++i) r[i] -= xj[i] * delta;
        b[j] = bj;
        max_delta = std::max(max_delta, std::fabs(delta));
      }
    }
    if (max_delta < tol) return sweep;
  }
  throw ConvergenceError("elastic net did not converge in " + std::to_string(max_iter) +
                             " sweeps",
                         b);
}

ElasticNetFit package_fit(const Standardized& s, const FormulaSpec& formula, double alpha,
                          double lambda, const std::vector<double>& b, std::size_t sweeps) {
  ElasticNetFit fit;
  fit.names = formula.resolved;
  fit.std_coefficients = b;
  fit.alpha = alpha;
  fit.lambda = lambda;
  fit.n_sweeps = sweeps;
  fit.coefficients.resize(s.p);
  double b0 = s.y_mean;
  for (std::size_t j = 0; j < s.p; ++j) {
    fit.coefficients[j] = b[j] / s.scale[j];
    b0 -= fit.coefficients[j] * s.mean[j];
  }
  fit.intercept = b0;
  return fit;
}

double lambda_max_std(const Standardized& s, double alpha) {
  double m = 0.0;
  for (std::size_t j = 0; j < s.p; ++j) {
    if (s.constant[j]) continue;
    double dot = 0.0;
    for (std::size_t i = 0; i < s.n; ++i) dot += s.x[j][i] * s.yc[i];
    m = std::max(m, std::fabs(dot) / static_cast<double>(s.n));
  }
  return m / std::max(alpha, 1e-3);
}

std::vector<double> grid_from(const Standardized& s, double alpha) {
  const double top = lambda_max_std(s, alpha);
  const double ratio = s.n > s.p ? 1e-4 : 1e-3;
  constexpr std::size_t kPoints = 100;
  std::vector<double> grid(kPoints);
  if (!(top > 0)) {
    // Response already centered to zero signal; any penalty gives the null
    // fit. Produce a degenerate one-point grid.
    return {0.0};
  }
  const double lt = std::log(top), lb = std::log(top * ratio);
  for (std::size_t i = 0; i < kPoints; ++i)
    grid[i] = std::exp(lt + (lb - lt) * static_cast<double>(i) /
                                static_cast<double>(kPoints - 1));
  return grid;
}

}  // namespace

ElasticNetFit elastic_net_fit(const Dataset& data, const FormulaSpec& formula,
                              double alpha, double lambda, double tol,
                              std::size_t max_iter) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error("elastic net: alpha must lie in [0,1]");
  if (lambda < 0) throw Error("elastic net: lambda must be >= 0");
  if (tol < 0) throw Error("elastic net: tol must be non-negative");
  const Standardized s = standardize(data, formula);
  std::vector<double> b(s.p, 0.0);
  const std::size_t sweeps = coordinate_descent(s, alpha, lambda, tol, max_iter, b);
  return package_fit(s, formula, alpha, lambda, b, sweeps);
}

double lambda_max(const Dataset& data, const FormulaSpec& formula, double alpha) {
  return lambda_max_std(standardize(data, formula), alpha);
}

std::vector<double> auto_lambda_grid(const Dataset& data, const FormulaSpec& formula,
                                     double alpha) {
  return grid_from(standardize(data, formula), alpha);
}

namespace {

Dataset subset_rows(const Dataset& data, const std::vector<std::size_t>& rows) {
  std::vector<std::pair<std::string, std::vector<double>>> cols;
  cols.reserve(data.n_cols());
  for (const auto& name : data.column_names()) {
    const auto& full = data.column(name);
    std::vector<double> v;
    v.reserve(rows.size());
    for (std::size_t r : rows) v.push_back(full[r]);
    cols.emplace_back(name, std::move(v));
  }
  return Dataset::from_columns(std::move(cols));
}

}  // namespace

CvSelection cv_select_lambda(const Dataset& data, const FormulaSpec& formula,
                             const ElasticNetConfig& config,
                             const std::vector<int>* fold_assignment) {
  const std::size_t n = data.n_rows();
  if (config.n_folds < 2) throw Error("cross-validation needs at least 2 folds");
  if (n < config.n_folds) throw Error("cross-validation needs n >= n_folds");
  if (!(config.tol > 0)) throw Error("cross-validation needs a positive tolerance");

  std::vector<double> grid = config.lambda_grid;
  if (grid.empty()) {
    grid = auto_lambda_grid(data, formula, config.alpha);
  } else {
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
      if (!(grid[i] > grid[i + 1]))
        throw Error("lambda grid must be strictly descending");
    if (grid.back() < 0) throw Error("lambda grid must be non-negative");
  }

  std::vector<int> folds(n);
  if (fold_assignment) {
    if (fold_assignment->size() != n) throw Error("fold assignment length mismatch");
    folds = *fold_assignment;
    for (int f : folds)
      if (f < 0 || static_cast<std::size_t>(f) >= config.n_folds)
        throw Error("fold assignment value out of range");
  } else {
    // Seeded shuffle, then round-robin: fold sizes differ by at most one.
    const CounterRng rng(config.seed, rng_stream::kFolds);
    const auto perm = shuffled_indices(n, rng);
    for (std::size_t i = 0; i < n; ++i)
      folds[perm[i]] = static_cast<int>(i % config.n_folds);
  }

  std::vector<double> sq_err(grid.size(), 0.0);
  for (std::size_t f = 0; f < config.n_folds; ++f) {
    std::vector<std::size_t> train_rows, val_rows;
    for (std::size_t i = 0; i < n; ++i)
      (static_cast<std::size_t>(folds[i]) == f ? val_rows : train_rows).push_back(i);
    if (train_rows.empty() || val_rows.empty()) continue;

    const Dataset train = subset_rows(data, train_rows);
    const Standardized s = standardize(train, formula);
    std::vector<double> b(s.p, 0.0);  // warm start carried down the path
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const std::size_t sweeps =
          coordinate_descent(s, config.alpha, grid[g], config.tol, config.max_iter, b);
      const ElasticNetFit fit = package_fit(s, formula, config.alpha, grid[g], b, sweeps);
      for (std::size_t r : val_rows) {
        double pred = fit.intercept;
        for (std::size_t j = 0; j < fit.names.size(); ++j)
          pred += fit.coefficients[j] * data.column(formula.resolved[j])[r];
        const double e = data.column(formula.response)[r] - pred;
        sq_err[g] += e * e;
      }
    }
  }

  CvSelection out;
  out.lambda_grid = grid;
  out.cv_mse.resize(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g)
    out.cv_mse[g] = sq_err[g] / static_cast<double>(n);

  std::size_t best = 0;  // ties keep the earlier (larger) lambda
  for (std::size_t g = 1; g < grid.size(); ++g)
    if (out.cv_mse[g] < out.cv_mse[best]) best = g;
  out.lambda = grid[best];
  out.fit = elastic_net_fit(data, formula, config.alpha, out.lambda, config.tol,
                            config.max_iter);
  return out;
}

}  // namespace splitwise
