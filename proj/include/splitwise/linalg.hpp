#ifndef SPLITWISE_LINALG_HPP
#define SPLITWISE_LINALG_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace splitwise {

// Dense column-major matrix. Just enough for least squares; not a general
// linear-algebra type.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  std::span<double> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const {
    return {data_.data() + j * rows_, rows_};
  }

  void set_col(std::size_t j, std::span<const double> v);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct LeastSquaresResult {
  std::vector<double> coefficients;
  // Diagonal of the upper-triangular factor, used for the rank check and for
  // coefficient covariance.
  std::vector<double> r_diag;
  // Row-major upper triangle of R (k x k), for solving R u = e_j.
  std::vector<double> r_upper;
};

// Householder QR least squares: minimizes ||y - X b||_2. Throws
// RankDeficientError (with the offending column index) when the smallest
// |R_jj| is below rank_tol times the largest; InsufficientDataError when
// rows < cols.
LeastSquaresResult householder_lstsq(Matrix x, std::vector<double> y,
                                     double rank_tol = 1e-10);

// Diagonal of (X'X)^-1 computed from the R factor; needs r_upper from a
// previous decomposition.
std::vector<double> xtx_inverse_diag(const LeastSquaresResult& ls);

}  // namespace splitwise

#endif  // SPLITWISE_LINALG_HPP
