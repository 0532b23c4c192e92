#ifndef SPLITWISE_TEST_SUPPORT_HPP
#define SPLITWISE_TEST_SUPPORT_HPP

#include <cmath>
#include <cstdlib>
#include <span>
#include <string>
#include <vector>

#include "splitwise/dataset.hpp"
#include "splitwise/error.hpp"
#include "splitwise/linalg.hpp"

namespace test_support {

#ifndef SPLITWISE_TEST_DATA_DIR
#define SPLITWISE_TEST_DATA_DIR "tests/data"
#endif

inline std::string data_path(const std::string& file) {
  return std::string(SPLITWISE_TEST_DATA_DIR) + "/" + file;
}

inline splitwise::Dataset load_mtcars() {
  return splitwise::load_csv(data_path("mtcars.csv")).data;
}

// Independent least-squares oracle: normal equations (X'X) b = X'y solved by
// Gauss-Jordan with partial pivoting. Fine on the small well-conditioned
// problems the tests use; never touches the QR path under test.
inline std::vector<double> normal_equations_solve(const splitwise::Matrix& x,
                                                  std::span<const double> y) {
  const std::size_t n = x.rows(), k = x.cols();
  std::vector<std::vector<double>> a(k, std::vector<double>(k + 1, 0.0));
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      double s = 0;
      for (std::size_t i = 0; i < n; ++i) s += x(i, r) * x(i, c);
      a[r][c] = s;
    }
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += x(i, r) * y[i];
    a[r][k] = s;
  }
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < k; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    if (a[col][col] == 0.0) throw splitwise::Error("singular normal equations");
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= k; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<double> b(k);
  for (std::size_t r = 0; r < k; ++r) b[r] = a[r][k] / a[r][r];
  return b;
}

// Simple LCG for test inputs (not the library generator, so test data is
// independent of the code under test).
struct TestRng {
  std::uint64_t state;
  explicit TestRng(std::uint64_t seed) : state(seed * 2654435761ULL + 1) {}
  double uniform() {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(state >> 11) * 0x1.0p-53;
  }
  double normal() {
    // Box-Muller on two uniforms.
    const double u1 = uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(6.283185307179586 * u2);
  }
};

}  // namespace test_support

#endif  // SPLITWISE_TEST_SUPPORT_HPP
