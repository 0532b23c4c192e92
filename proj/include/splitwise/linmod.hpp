#ifndef SPLITWISE_LINMOD_HPP
#define SPLITWISE_LINMOD_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "splitwise/linalg.hpp"

namespace splitwise {

inline constexpr const char* kInterceptName = "(Intercept)";

// n x k design whose first column is the all-ones intercept.
struct DesignMatrix {
  std::vector<std::string> column_names;
  Matrix values;

  std::size_t n_rows() const { return values.rows(); }
  std::size_t n_cols() const { return values.cols(); }
};

// Intercept-only design of length n.
DesignMatrix intercept_design(std::size_t n);

// Intercept plus the given named columns, in order.
DesignMatrix make_design(
    std::size_t n,
    const std::vector<std::pair<std::string, std::span<const double>>>& columns);

enum class Criterion { aic, bic };

const char* criterion_name(Criterion c);

struct OlsFit {
  std::vector<std::string> column_names;
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<double> residuals;
  std::vector<double> fitted;
  double rss = 0;
  double tss = 0;
  double r2 = 0;
  double adj_r2 = 0;
  double sigma = 0;   // residual standard error
  double f_stat = 0;  // overall F against the intercept-only model
  double loglik = 0;  // Gaussian, with variance profiled out
  double aic = 0;     // -2 loglik + 2 (k_coef + 1); +1 counts the variance
  double bic = 0;     // -2 loglik + ln(n) (k_coef + 1)
  std::size_t n = 0;
  std::size_t k_coef = 0;
  std::size_t df_resid = 0;
};

// Least squares via Householder QR. Throws RankDeficientError (naming the
// offending design column) or InsufficientDataError when n <= k.
OlsFit fit_ols(const DesignMatrix& design, std::span<const double> y);

// fit.aic or fit.bic. Throws SaturatedFitError when rss == 0, where the
// criteria are undefined; callers treat such fits as degenerate.
double criterion_value(const OlsFit& fit, Criterion which);

// X beta for a design with matching column names (order included).
std::vector<double> predict(const OlsFit& fit, const DesignMatrix& design);

nlohmann::ordered_json fit_to_json(const OlsFit& fit);

// Two-sided p-value of a t statistic (df > 0) and upper tail of an F
// statistic; used for the summary display only, never for selection.
double t_pvalue(double t, double df);
double f_pvalue(double f, double df1, double df2);

}  // namespace splitwise

#endif  // SPLITWISE_LINMOD_HPP
