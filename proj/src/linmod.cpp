#include "splitwise/linmod.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <json.hpp>

#include "splitwise/error.hpp"

namespace splitwise {

DesignMatrix intercept_design(std::size_t n) {
  DesignMatrix d;
  d.column_names = {kInterceptName};
  d.values = Matrix(n, 1);
  for (std::size_t i = 0; i < n; ++i) d.values(i, 0) = 1.0;
  return d;
}

DesignMatrix make_design(
    std::size_t n,
    const std::vector<std::pair<std::string, std::span<const double>>>& columns) {
  DesignMatrix d;
  d.column_names.reserve(columns.size() + 1);
  d.column_names.push_back(kInterceptName);
  d.values = Matrix(n, columns.size() + 1);
  for (std::size_t i = 0; i < n; ++i) d.values(i, 0) = 1.0;
  std::size_t j = 1;
  for (const auto& [name, values] : columns) {
    if (values.size() != n) throw Error("make_design: column " + name + " length mismatch");
    d.column_names.push_back(name);
    d.values.set_col(j++, values);
  }
  return d;
}

const char* criterion_name(Criterion c) { return c == Criterion::aic ? "AIC" : "BIC"; }

OlsFit fit_ols(const DesignMatrix& design, std::span<const double> y) {
  const std::size_t n = design.n_rows();
  const std::size_t k = design.n_cols();
  if (y.size() != n) throw Error("fit_ols: response length mismatch");
  if (n <= k)
    throw InsufficientDataError("fit needs n > k (n=" + std::to_string(n) +
                                ", k=" + std::to_string(k) + ")");

  LeastSquaresResult ls;
  try {
    ls = householder_lstsq(design.values, std::vector<double>(y.begin(), y.end()));
  } catch (const RankDeficientError& e) {
    const std::size_t j = e.column_index();
    const std::string name =
        j < design.column_names.size() ? design.column_names[j] : e.column();
    throw RankDeficientError("design matrix is rank deficient at column " + name, name, j);
  }

  OlsFit fit;
  fit.column_names = design.column_names;
  fit.coefficients = ls.coefficients;
  fit.n = n;
  fit.k_coef = k;
  fit.df_resid = n - k;

  fit.fitted.assign(n, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    const auto col = design.values.col(j);
    const double b = fit.coefficients[j];
    for (std::size_t i = 0; i < n; ++i) fit.fitted[i] += b * col[i];
  }
  fit.residuals.assign(n, 0.0);
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    fit.residuals[i] = y[i] - fit.fitted[i];
    rss += fit.residuals[i] * fit.residuals[i];
  }
  fit.rss = rss;

  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += y[i];
  mean /= static_cast<double>(n);
  double tss = 0.0;
  for (std::size_t i = 0; i < n; ++i) tss += (y[i] - mean) * (y[i] - mean);
  fit.tss = tss;

  fit.r2 = tss > 0 ? 1.0 - rss / tss : 0.0;
  const double dn = static_cast<double>(n);
  const double dfr = static_cast<double>(fit.df_resid);
  fit.adj_r2 = 1.0 - (1.0 - fit.r2) * (dn - 1.0) / dfr;
  fit.sigma = std::sqrt(rss / dfr);
  fit.f_stat = k > 1 ? ((tss - rss) / static_cast<double>(k - 1)) / (rss / dfr)
                     : std::numeric_limits<double>::quiet_NaN();

  if (rss > 0) {
    fit.loglik = -(dn / 2.0) * (std::log(2.0 * std::numbers::pi) + std::log(rss / dn) + 1.0);
    fit.aic = -2.0 * fit.loglik + 2.0 * static_cast<double>(k + 1);
    fit.bic = -2.0 * fit.loglik + std::log(dn) * static_cast<double>(k + 1);
  } else {
    // Saturated fit: the likelihood diverges. criterion_value() refuses these.
    fit.loglik = std::numeric_limits<double>::infinity();
    fit.aic = -std::numeric_limits<double>::infinity();
    fit.bic = -std::numeric_limits<double>::infinity();
  }

  const auto xtx_diag = xtx_inverse_diag(ls);
  fit.std_errors.assign(k, 0.0);
  for (std::size_t j = 0; j < k; ++j)
    fit.std_errors[j] = fit.sigma * std::sqrt(xtx_diag[j]);

  return fit;
}

double criterion_value(const OlsFit& fit, Criterion which) {
  if (!(fit.rss > 0))
    throw SaturatedFitError("information criteria undefined for a saturated fit (rss = 0)");
  return which == Criterion::aic ? fit.aic : fit.bic;
}

std::vector<double> predict(const OlsFit& fit, const DesignMatrix& design) {
  if (design.column_names != fit.column_names)
    throw Error("predict: design columns do not match the fitted model");
  const std::size_t n = design.n_rows();
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 0; j < design.n_cols(); ++j) {
    const auto col = design.values.col(j);
    const double b = fit.coefficients[j];
    for (std::size_t i = 0; i < n; ++i) out[i] += b * col[i];
  }
  return out;
}

namespace {

// Regularized incomplete beta I_x(a, b) by continued fraction; the workhorse
// behind the t and F tail areas shown in summaries.
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-14;
  constexpr double kFpMin = 1e-300;

  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

double ibeta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double t_pvalue(double t, double df) {
  if (!(df > 0)) return std::numeric_limits<double>::quiet_NaN();
  const double x = df / (df + t * t);
  return ibeta(df / 2.0, 0.5, x);
}

double f_pvalue(double f, double df1, double df2) {
  if (!(df1 > 0) || !(df2 > 0) || !(f >= 0))
    return std::numeric_limits<double>::quiet_NaN();
  const double x = df2 / (df2 + df1 * f);
  return ibeta(df2 / 2.0, df1 / 2.0, x);
}

nlohmann::ordered_json fit_to_json(const OlsFit& fit) {
  nlohmann::ordered_json coef;
  nlohmann::ordered_json se;
  for (std::size_t j = 0; j < fit.k_coef; ++j) {
    coef[fit.column_names[j]] = fit.coefficients[j];
    se[fit.column_names[j]] = fit.std_errors[j];
  }
  nlohmann::ordered_json out;
  out["coefficients"] = std::move(coef);
  out["std_errors"] = std::move(se);
  out["n"] = fit.n;
  out["k_coef"] = fit.k_coef;
  out["df_resid"] = fit.df_resid;
  out["rss"] = fit.rss;
  out["r2"] = fit.r2;
  out["adj_r2"] = fit.adj_r2;
  out["sigma"] = fit.sigma;
  out["f_stat"] = fit.f_stat;
  out["loglik"] = fit.loglik;
  out["aic"] = fit.aic;
  out["bic"] = fit.bic;
  return out;
}

}  // namespace splitwise
