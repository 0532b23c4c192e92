#ifndef SPLITWISE_ERROR_HPP
#define SPLITWISE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace splitwise {

// Base for all toolkit errors. Anything derived from Error is a condition the
// caller can act on (bad input, degenerate candidate, budget); plain
// std::logic_error style failures indicate bugs.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class CsvError : public Error {
 public:
  using Error::Error;
};

class FormulaError : public Error {
 public:
  using Error::Error;
};

// Design matrix is numerically rank deficient. `column` names the first
// column whose R-diagonal fell under the tolerance; `column_index` is its
// position in the design.
class RankDeficientError : public Error {
 public:
  RankDeficientError(const std::string& what, std::string column,
                     std::size_t column_index)
      : Error(what), column_(std::move(column)), column_index_(column_index) {}
  const std::string& column() const { return column_; }
  std::size_t column_index() const { return column_index_; }

 private:
  std::string column_;
  std::size_t column_index_;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// rss == 0: the Gaussian log-likelihood diverges and AIC/BIC are undefined.
class SaturatedFitError : public Error {
 public:
  using Error::Error;
};

// A dummy column came out constant (all 0 or all 1); the candidate encoding
// must be rejected by the caller.
class DegenerateEncodingError : public Error {
 public:
  using Error::Error;
};

class BudgetError : public Error {
 public:
  using Error::Error;
};

// Coordinate descent ran out of sweeps. Carries the last iterate so callers
// can inspect how far it got.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> last_iterate)
      : Error(what), last_iterate_(std::move(last_iterate)) {}
  const std::vector<double>& last_iterate() const { return last_iterate_; }

 private:
  std::vector<double> last_iterate_;
};

}  // namespace splitwise

#endif  // SPLITWISE_ERROR_HPP
