#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "splitwise/dataset.hpp"
#include "splitwise/error.hpp"
#include "splitwise/linmod.hpp"

#include "test_support.hpp"

using namespace splitwise;
using test_support::TestRng;

namespace {

// The golden mtcars fit used across the suite: mpg on cyl,
// I(disp >= 101.55), hp,
// I(drat >= 3.035), am.
OlsFit golden_mtcars_fit() {
  const Dataset d = test_support::load_mtcars();
  const std::size_t n = d.n_rows();
  std::vector<double> disp_dummy(n), drat_dummy(n);
  for (std::size_t i = 0; i < n; ++i) {
    disp_dummy[i] = d.column("disp")[i] >= 101.55 ? 1.0 : 0.0;
    drat_dummy[i] = d.column("drat")[i] >= 3.035 ? 1.0 : 0.0;
  }
  const DesignMatrix design =
      make_design(n, {{"cyl", std::span<const double>(d.column("cyl"))},
                      {"disp_dummy", std::span<const double>(disp_dummy)},
                      {"hp", std::span<const double>(d.column("hp"))},
                      {"drat_dummy", std::span<const double>(drat_dummy)},
                      {"am", std::span<const double>(d.column("am"))}});
  return fit_ols(design, d.column("mpg"));
}

Matrix random_design(TestRng& rng, std::size_t n, std::size_t k) {
  Matrix x(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (std::size_t j = 1; j < k; ++j) x(i, j) = rng.normal();
  }
  return x;
}

}  // namespace

TEST_CASE("ols: golden mtcars dummy-design fit") {
  const OlsFit fit = golden_mtcars_fit();
  const double want[6] = {31.181550, -0.819230, -6.542518, -0.029006, 3.608055, 1.467368};
  for (int j = 0; j < 6; ++j) CHECK(std::fabs(fit.coefficients[j] - want[j]) < 1e-3);
  CHECK(std::fabs(fit.r2 - 0.9325) < 1e-3);
  CHECK(std::fabs(fit.adj_r2 - 0.9195) < 1e-3);
  CHECK(std::fabs(fit.sigma - 1.71) < 0.01);
  CHECK(std::fabs(fit.f_stat - 71.82) < 0.1);
  CHECK(std::fabs(fit.aic - 132.50) < 0.05);
  CHECK(std::fabs(fit.bic - 142.76) < 0.05);
}

TEST_CASE("ols: exact interpolation") {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{2, 4, 6, 8};
  const OlsFit fit =
      fit_ols(make_design(4, {{"x", std::span<const double>(x)}}), y);
  CHECK(fit.coefficients[0] == doctest::Approx(0.0).scale(1).epsilon(1e-12));
  CHECK(fit.coefficients[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.rss == doctest::Approx(0.0).scale(1).epsilon(1e-18));
}

TEST_CASE("ols: agrees with the normal-equations oracle on random designs") {
  TestRng rng(42);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix x = random_design(rng, 20, 4);
    std::vector<double> y(20);
    for (auto& v : y) v = rng.normal();
    DesignMatrix design;
    design.column_names = {kInterceptName, "a", "b", "c"};
    design.values = x;
    const OlsFit fit = fit_ols(design, y);
    const auto oracle = test_support::normal_equations_solve(x, y);
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(fit.coefficients[j] == doctest::Approx(oracle[j]).epsilon(1e-8));
  }
}

TEST_CASE("ols: rss equals the sum of squared residuals") {
  const OlsFit fit = golden_mtcars_fit();
  double s = 0;
  for (double r : fit.residuals) s += r * r;
  CHECK(fit.rss == doctest::Approx(s).epsilon(1e-10));
  CHECK(fit.adj_r2 ==
        doctest::Approx(1.0 - (1.0 - fit.r2) * (32.0 - 1.0) / (32.0 - 6.0)).epsilon(1e-12));
}

TEST_CASE("criterion: hand-evaluated constant convention") {
  // n = 32, rss = 76.02, six coefficients plus the variance parameter.
  const double n = 32, rss = 76.02, k = 6;
  const double ll = -(n / 2) * (std::log(2 * std::numbers::pi) + std::log(rss / n) + 1);
  const double aic = -2 * ll + 2 * (k + 1);
  CHECK(aic == doctest::Approx(132.50).epsilon(0.0004));

  const OlsFit fit = golden_mtcars_fit();
  CHECK(criterion_value(fit, Criterion::aic) == fit.aic);
  CHECK(criterion_value(fit, Criterion::bic) == fit.bic);
}

TEST_CASE("criterion: function of (n, rss, k) only") {
  // Two different designs with identical rss and k give identical criteria.
  const std::vector<double> x1{1, 2, 3, 4, 5, 6};
  const std::vector<double> x2{6, 5, 4, 3, 2, 1};
  const std::vector<double> y{1, 3, 2, 5, 4, 6};
  const OlsFit f1 = fit_ols(make_design(6, {{"x", std::span<const double>(x1)}}), y);
  const OlsFit f2 = fit_ols(make_design(6, {{"x", std::span<const double>(x2)}}), y);
  CHECK(f1.rss == doctest::Approx(f2.rss).epsilon(1e-12));
  CHECK(f1.aic == doctest::Approx(f2.aic).epsilon(1e-12));
  CHECK(f1.bic == doctest::Approx(f2.bic).epsilon(1e-12));
}

TEST_CASE("criterion: saturated fit is an error") {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{2, 4, 6, 8};
  const OlsFit fit = fit_ols(make_design(4, {{"x", std::span<const double>(x)}}), y);
  CHECK_THROWS_AS(criterion_value(fit, Criterion::aic), SaturatedFitError);
}

TEST_CASE("predict: training design reproduces fitted values") {
  const Dataset d = test_support::load_mtcars();
  const DesignMatrix design =
      make_design(d.n_rows(), {{"wt", std::span<const double>(d.column("wt"))},
                               {"hp", std::span<const double>(d.column("hp"))}});
  const OlsFit fit = fit_ols(design, d.column("mpg"));
  const auto pred = predict(fit, design);
  for (std::size_t i = 0; i < pred.size(); ++i)
    CHECK(d.column("mpg")[i] - pred[i] == doctest::Approx(fit.residuals[i]).epsilon(1e-10));
}

TEST_CASE("predict: intercept-only fit predicts the mean") {
  const std::vector<double> y{1, 2, 3, 4, 5};
  const DesignMatrix design = intercept_design(5);
  const OlsFit fit = fit_ols(design, y);
  const auto pred = predict(fit, design);
  for (double v : pred) CHECK(v == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("predict: single new row against a hand dot product") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> y{1.5, 2.1, 3.3, 3.9, 5.2};
  const OlsFit fit = fit_ols(make_design(5, {{"x", std::span<const double>(x)}}), y);
  const std::vector<double> xnew{10.0};
  const DesignMatrix row = make_design(1, {{"x", std::span<const double>(xnew)}});
  const auto pred = predict(fit, row);
  CHECK(pred[0] ==
        doctest::Approx(fit.coefficients[0] + 10.0 * fit.coefficients[1]).epsilon(1e-12));
}

TEST_CASE("predict: mismatched columns are rejected") {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{1, 2, 2, 4};
  const OlsFit fit = fit_ols(make_design(4, {{"x", std::span<const double>(x)}}), y);
  const DesignMatrix other = make_design(4, {{"z", std::span<const double>(x)}});
  CHECK_THROWS_AS(predict(fit, other), Error);
}

TEST_CASE("ols: residuals are orthogonal to the design") {
  TestRng rng(7);
  const Matrix x = random_design(rng, 50, 5);
  std::vector<double> y(50);
  for (auto& v : y) v = rng.normal() * 3.0 + 1.0;
  DesignMatrix design;
  design.column_names = {kInterceptName, "a", "b", "c", "d"};
  design.values = x;
  const OlsFit fit = fit_ols(design, y);
  double ynorm = 0;
  for (double v : y) ynorm += v * v;
  ynorm = std::sqrt(ynorm);
  for (std::size_t j = 0; j < 5; ++j) {
    double dot = 0;
    for (std::size_t i = 0; i < 50; ++i) dot += x(i, j) * fit.residuals[i];
    CHECK(std::fabs(dot) <= 1e-8 * ynorm);
  }
}

TEST_CASE("ols: r2 and criteria are invariant under predictor rescaling") {
  const Dataset d = test_support::load_mtcars();
  const auto& wt = d.column("wt");
  std::vector<double> wt_scaled(wt.size());
  for (std::size_t i = 0; i < wt.size(); ++i) wt_scaled[i] = 1000.0 * wt[i];
  const OlsFit a =
      fit_ols(make_design(32, {{"wt", std::span<const double>(wt)}}), d.column("mpg"));
  const OlsFit b = fit_ols(make_design(32, {{"wt", std::span<const double>(wt_scaled)}}),
                           d.column("mpg"));
  CHECK(a.r2 == doctest::Approx(b.r2).epsilon(1e-12));
  CHECK(a.aic == doctest::Approx(b.aic).epsilon(1e-12));
  CHECK(a.bic == doctest::Approx(b.bic).epsilon(1e-12));
  CHECK(b.coefficients[1] == doctest::Approx(a.coefficients[1] / 1000.0).epsilon(1e-10));
}

TEST_CASE("ols: adding a column never increases rss") {
  TestRng rng(99);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> x1(30), x2(30), y(30);
    for (std::size_t i = 0; i < 30; ++i) {
      x1[i] = rng.normal();
      x2[i] = rng.normal();
      y[i] = rng.normal();
    }
    const OlsFit small =
        fit_ols(make_design(30, {{"x1", std::span<const double>(x1)}}), y);
    const OlsFit big = fit_ols(make_design(30, {{"x1", std::span<const double>(x1)},
                                                {"x2", std::span<const double>(x2)}}),
                               y);
    CHECK(big.rss <= small.rss + 1e-10);
  }
}

TEST_CASE("ols: AIC and the rss-form step criterion rank models identically") {
  // Exhaustive over all subsets of 6 predictors: argmin under the full
  // Gaussian AIC equals argmin under n*ln(rss/n) + 2k.
  const Dataset d = test_support::load_mtcars();
  const std::vector<std::string> terms{"cyl", "disp", "hp", "drat", "wt", "qsec"};
  const auto& y = d.column("mpg");
  double best_aic = 1e300, best_step = 1e300;
  std::size_t arg_aic = 0, arg_step = 0;
  for (std::size_t mask = 0; mask < (1u << 6); ++mask) {
    std::vector<std::pair<std::string, std::span<const double>>> cols;
    for (std::size_t b = 0; b < 6; ++b)
      if (mask & (1u << b))
        cols.emplace_back(terms[b], std::span<const double>(d.column(terms[b])));
    const OlsFit fit = fit_ols(make_design(32, cols), y);
    const double step = 32.0 * std::log(fit.rss / 32.0) +
                        2.0 * static_cast<double>(fit.k_coef);
    if (fit.aic < best_aic) {
      best_aic = fit.aic;
      arg_aic = mask;
    }
    if (step < best_step) {
      best_step = step;
      arg_step = mask;
    }
  }
  CHECK(arg_aic == arg_step);
}

TEST_CASE("ols: rank deficiency names the offending column") {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> x2{2, 4, 6, 8};  // collinear with x
  const std::vector<double> y{1, 2, 2, 4};
  try {
    fit_ols(make_design(4, {{"x", std::span<const double>(x)},
                            {"twice_x", std::span<const double>(x2)}}),
            y);
    FAIL("expected RankDeficientError");
  } catch (const RankDeficientError& e) {
    CHECK(e.column() == "twice_x");
  }
}

TEST_CASE("ols: insufficient data is an error") {
  const std::vector<double> x{1, 2};
  const std::vector<double> y{1, 2};
  CHECK_THROWS_AS(fit_ols(make_design(2, {{"x", std::span<const double>(x)}}), y),
                  InsufficientDataError);
}

TEST_CASE("pvalues: known reference points") {
  // t with 10 df at 2.228 has a two-sided p of 0.05.
  CHECK(t_pvalue(2.228, 10) == doctest::Approx(0.05).epsilon(2e-3));
  // F(3, 28) upper tail at the mtcars wt+qsec+am fit is 1.21e-11.
  CHECK(f_pvalue(52.75, 3, 28) == doctest::Approx(1.21e-11).epsilon(0.005));
}
