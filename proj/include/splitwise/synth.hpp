#ifndef SPLITWISE_SYNTH_HPP
#define SPLITWISE_SYNTH_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "splitwise/dataset.hpp"

namespace splitwise {

// Synthetic data generator: p standard-normal predictors in correlated
// blocks of 5 (block factor model, pairwise correlation rho within a block),
// response a sparse combination of the first n_signal predictors plus
// Gaussian noise. With threshold_effects the signals enter as step functions
// I(x > 0) instead of linearly.
//
// Default noise_sd targets population R^2 of about 0.6 for the linear case
// with the default betas and rho.
struct SynthConfig {
  std::size_t n = 1000;
  std::size_t p = 15;
  std::size_t n_signal = 3;
  std::vector<double> beta{3.0, -2.0, 1.5};
  double rho = 0.5;
  double noise_sd = 2.677;
  bool threshold_effects = false;
  std::uint64_t seed = 1;

  // Throws Error when invariants are violated (n_signal > p, beta length
  // mismatch, rho outside [0,1), noise_sd <= 0, n or p zero).
  void validate() const;
};

struct GroundTruth {
  std::vector<std::size_t> signal_indices;  // positions within x1..xp, 0-based
  std::vector<double> generating_betas;
  std::vector<double> generating_cuts;  // empty unless threshold_effects
};

// Columns are named y, x1..xp (response first). A pure function of config:
// identical configs produce bit-identical datasets.
std::pair<Dataset, GroundTruth> generate_synthetic(const SynthConfig& config);

inline constexpr std::size_t kSynthBlockSize = 5;

}  // namespace splitwise

#endif  // SPLITWISE_SYNTH_HPP
