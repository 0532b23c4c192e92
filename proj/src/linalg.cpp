#include "splitwise/linalg.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "splitwise/error.hpp"

namespace splitwise {

void Matrix::set_col(std::size_t j, std::span<const double> v) {
  std::memcpy(data_.data() + j * rows_, v.data(), rows_ * sizeof(double));
}

LeastSquaresResult householder_lstsq(Matrix x, std::vector<double> y,
                                     double rank_tol) {
  const std::size_t n = x.rows();
  const std::size_t k = x.cols();
  if (y.size() != n) throw Error("householder_lstsq: length mismatch");
  if (n < k)
    throw InsufficientDataError("least squares needs at least as many rows as columns (n=" +
                                std::to_string(n) + ", k=" + std::to_string(k) + ")");

  // In-place Householder QR; the reflectors also transform y. The shift
  // takes the sign of the pivot so the reflector vector never cancels.
  std::vector<double> r_diag(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    double norm2 = 0.0;
    for (std::size_t i = j; i < n; ++i) norm2 += x(i, j) * x(i, j);
    double norm = std::sqrt(norm2);
    if (x(j, j) < 0) norm = -norm;
    r_diag[j] = -norm;
    if (norm != 0.0) {
      for (std::size_t i = j; i < n; ++i) x(i, j) /= norm;
      x(j, j) += 1.0;
      // Apply I - v v^T / v_j to the remaining columns and to y.
      for (std::size_t c = j + 1; c < k; ++c) {
        double s = 0.0;
        for (std::size_t i = j; i < n; ++i) s += x(i, j) * x(i, c);
        s = -s / x(j, j);
        for (std::size_t i = j; i < n; ++i) x(i, c) += s * x(i, j);
      }
      double s = 0.0;
      for (std::size_t i = j; i < n; ++i) s += x(i, j) * y[i];
      s = -s / x(j, j);
      for (std::size_t i = j; i < n; ++i) y[i] += s * x(i, j);
    }
  }

  double max_diag = 0.0;
  for (double d : r_diag) max_diag = std::max(max_diag, std::fabs(d));
  for (std::size_t j = 0; j < k; ++j) {
    if (std::fabs(r_diag[j]) <= rank_tol * max_diag) {
      throw RankDeficientError("design matrix is rank deficient at column " +
                                   std::to_string(j),
                               std::to_string(j), j);
    }
  }

  // Back substitution: R b = (Q^T y)[0..k).
  LeastSquaresResult out;
  out.coefficients.assign(k, 0.0);
  for (std::size_t jj = k; jj-- > 0;) {
    double s = y[jj];
    for (std::size_t c = jj + 1; c < k; ++c) s -= x(jj, c) * out.coefficients[c];
    out.coefficients[jj] = s / r_diag[jj];
  }

  out.r_diag = r_diag;
  out.r_upper.assign(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    out.r_upper[i * k + i] = r_diag[i];
    for (std::size_t c = i + 1; c < k; ++c) out.r_upper[i * k + c] = x(i, c);
  }
  return out;
}

std::vector<double> xtx_inverse_diag(const LeastSquaresResult& ls) {
  const std::size_t k = ls.r_diag.size();
  // R^-1 by back substitution, then diag_j = sum_c (R^-1)_{jc}^2.
  std::vector<double> rinv(k * k, 0.0);
  for (std::size_t col = 0; col < k; ++col) {
    for (std::size_t i = col + 1; i-- > 0;) {
      double s = (i == col) ? 1.0 : 0.0;
      for (std::size_t c = i + 1; c <= col; ++c)
        s -= ls.r_upper[i * k + c] * rinv[c * k + col];
      rinv[i * k + col] = s / ls.r_diag[i];
    }
  }
  std::vector<double> diag(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    double s = 0.0;
    for (std::size_t c = j; c < k; ++c) s += rinv[j * k + c] * rinv[j * k + c];
    diag[j] = s;
  }
  return diag;
}

}  // namespace splitwise
