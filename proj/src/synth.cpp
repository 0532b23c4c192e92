#include "splitwise/synth.hpp"

#include <cmath>
#include <string>

#include "splitwise/error.hpp"
#include "splitwise/rng.hpp"

namespace splitwise {

void SynthConfig::validate() const {
  if (n == 0 || p == 0) throw Error("synthetic config: n and p must be positive");
  if (n_signal > p) throw Error("synthetic config: n_signal exceeds p");
  if (beta.size() != n_signal)
    throw Error("synthetic config: beta length must equal n_signal");
  if (!(rho >= 0.0 && rho < 1.0)) throw Error("synthetic config: rho must lie in [0,1)");
  if (!(noise_sd > 0.0)) throw Error("synthetic config: noise_sd must be positive");
}

std::pair<Dataset, GroundTruth> generate_synthetic(const SynthConfig& config) {
  config.validate();
  const std::size_t n = config.n;
  const std::size_t p = config.p;
  const std::size_t n_blocks = (p + kSynthBlockSize - 1) / kSynthBlockSize;

  const CounterRng factor_rng(config.seed, rng_stream::kBlockFactor);
  const CounterRng eps_rng(config.seed, rng_stream::kIdiosyncratic);
  const CounterRng noise_rng(config.seed, rng_stream::kNoise);

  const double w_factor = std::sqrt(config.rho);
  const double w_eps = std::sqrt(1.0 - config.rho);

  // x_ij = sqrt(rho) f_{i,block(j)} + sqrt(1-rho) e_ij, all draws N(0,1).
  std::vector<std::vector<double>> x(p, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      const std::size_t block = j / kSynthBlockSize;
      const double f = factor_rng.normal(i * n_blocks + block);
      const double e = eps_rng.normal(i * p + j);
      x[j][i] = w_factor * f + w_eps * e;
    }
  }

  GroundTruth truth;
  for (std::size_t s = 0; s < config.n_signal; ++s) truth.signal_indices.push_back(s);
  truth.generating_betas = config.beta;
  if (config.threshold_effects)
    truth.generating_cuts.assign(config.n_signal, 0.0);

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    for (std::size_t s = 0; s < config.n_signal; ++s) {
      const double v = x[s][i];
      mean += config.beta[s] * (config.threshold_effects ? (v > 0.0 ? 1.0 : 0.0) : v);
    }
    y[i] = mean + config.noise_sd * noise_rng.normal(i);
  }

  std::vector<std::pair<std::string, std::vector<double>>> columns;
  columns.reserve(p + 1);
  columns.emplace_back("y", std::move(y));
  for (std::size_t j = 0; j < p; ++j)
    columns.emplace_back("x" + std::to_string(j + 1), std::move(x[j]));

  return {Dataset::from_columns(std::move(columns)), std::move(truth)};
}

}  // namespace splitwise
