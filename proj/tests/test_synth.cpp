#include <doctest.h>

#include <cmath>

#include "splitwise/error.hpp"
#include "splitwise/linmod.hpp"
#include "splitwise/synth.hpp"

using namespace splitwise;

TEST_CASE("synth: a config is a pure function of its seed") {
  SynthConfig cfg;
  cfg.n = 1000;
  cfg.p = 15;
  cfg.seed = 7;
  const auto [a, ta] = generate_synthetic(cfg);
  const auto [b, tb] = generate_synthetic(cfg);
  REQUIRE(a.n_cols() == b.n_cols());
  for (std::size_t j = 0; j < a.n_cols(); ++j) {
    const auto& ca = a.column(j);
    const auto& cb = b.column(j);
    for (std::size_t i = 0; i < ca.size(); ++i) CHECK(ca[i] == cb[i]);
  }
  CHECK(ta.signal_indices == tb.signal_indices);

  SynthConfig other = cfg;
  other.seed = 8;
  const auto [c, tc] = generate_synthetic(other);
  CHECK(c.column("x1")[0] != a.column("x1")[0]);
}

TEST_CASE("synth: empirical within-block correlation matches rho") {
  SynthConfig cfg;
  cfg.n = 100000;
  cfg.p = 15;
  cfg.rho = 0.5;
  cfg.seed = 3;
  const auto [d, truth] = generate_synthetic(cfg);

  // Average pairwise correlation over the first block's ten pairs.
  const auto corr = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ma += a[i];
      mb += b[i];
    }
    ma /= static_cast<double>(a.size());
    mb /= static_cast<double>(a.size());
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      sab += (a[i] - ma) * (b[i] - mb);
      saa += (a[i] - ma) * (a[i] - ma);
      sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
  };
  double total = 0;
  int pairs = 0;
  for (int a = 1; a <= 5; ++a) {
    for (int b = a + 1; b <= 5; ++b) {
      total += corr(d.column("x" + std::to_string(a)), d.column("x" + std::to_string(b)));
      ++pairs;
    }
  }
  CHECK(total / pairs == doctest::Approx(0.5).epsilon(0.04));  // 0.5 +- 0.02

  // Across blocks the correlation should be near zero.
  CHECK(std::fabs(corr(d.column("x1"), d.column("x6"))) < 0.02);
}

TEST_CASE("synth: near-noiseless linear data recovers beta by OLS") {
  SynthConfig cfg;
  cfg.n = 500;
  cfg.p = 10;
  cfg.noise_sd = 1e-9;
  cfg.threshold_effects = false;
  cfg.seed = 11;
  const auto [d, truth] = generate_synthetic(cfg);

  std::vector<std::pair<std::string, std::span<const double>>> cols;
  for (std::size_t idx : truth.signal_indices) {
    const auto& c = d.column("x" + std::to_string(idx + 1));
    cols.emplace_back("x" + std::to_string(idx + 1), std::span<const double>(c));
  }
  const OlsFit fit = fit_ols(make_design(d.n_rows(), cols), d.column("y"));
  for (std::size_t s = 0; s < truth.generating_betas.size(); ++s)
    CHECK(fit.coefficients[s + 1] ==
          doctest::Approx(truth.generating_betas[s]).epsilon(1e-6));
  CHECK(std::fabs(fit.coefficients[0]) < 1e-6);
}

TEST_CASE("synth: threshold effects change the response construction") {
  SynthConfig cfg;
  cfg.n = 2000;
  cfg.p = 5;
  cfg.noise_sd = 1e-9;
  cfg.threshold_effects = true;
  cfg.seed = 5;
  const auto [d, truth] = generate_synthetic(cfg);
  CHECK(truth.generating_cuts == std::vector<double>{0.0, 0.0, 0.0});

  // y is a sum of step functions: its value is one of the 2^3 level sums.
  const auto& y = d.column("y");
  const auto& x1 = d.column("x1");
  const auto& x2 = d.column("x2");
  const auto& x3 = d.column("x3");
  for (std::size_t i = 0; i < 50; ++i) {
    const double expect = 3.0 * (x1[i] > 0) - 2.0 * (x2[i] > 0) + 1.5 * (x3[i] > 0);
    CHECK(y[i] == doctest::Approx(expect).epsilon(1e-6));
  }
}

TEST_CASE("synth: config validation") {
  SynthConfig cfg;
  cfg.n_signal = 20;
  cfg.p = 10;
  CHECK_THROWS_AS(generate_synthetic(cfg), Error);
  cfg = SynthConfig{};
  cfg.beta = {1.0};
  CHECK_THROWS_AS(generate_synthetic(cfg), Error);
  cfg = SynthConfig{};
  cfg.rho = 1.0;
  CHECK_THROWS_AS(generate_synthetic(cfg), Error);
  cfg = SynthConfig{};
  cfg.noise_sd = 0;
  CHECK_THROWS_AS(generate_synthetic(cfg), Error);
}
