#ifndef SPLITWISE_DATASET_HPP
#define SPLITWISE_DATASET_HPP

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace splitwise {

// Immutable-after-construction table of named numeric columns, all of equal
// length. The universal input of the toolkit.
class Dataset {
 public:
  Dataset() = default;

  // Throws Error if names are empty/duplicated or lengths differ / are zero,
  // or any cell is non-finite.
  static Dataset from_columns(
      std::vector<std::pair<std::string, std::vector<double>>> columns);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return names_.size(); }
  const std::vector<std::string>& column_names() const { return names_; }

  bool has_column(const std::string& name) const;
  const std::vector<double>& column(const std::string& name) const;
  const std::vector<double>& column(std::size_t index) const { return columns_[index]; }

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
  std::size_t n_rows_ = 0;
};

enum class NaPolicy { reject_row, fail };

struct LoadResult {
  Dataset data;
  std::size_t dropped_rows = 0;  // complete-case deletions under reject_row
};

// RFC-4180-style CSV with a mandatory header row; cells must parse as
// decimal numbers or be a missing token ("" or "NA"). Throws CsvError on
// malformed input, non-numeric cells, duplicate headers, or zero rows after
// filtering.
LoadResult load_csv(const std::string& path, NaPolicy policy = NaPolicy::reject_row);
LoadResult read_csv(std::istream& in, NaPolicy policy = NaPolicy::reject_row);

void write_csv(const Dataset& data, std::ostream& out);
void write_csv(const Dataset& data, const std::string& path);

// Parsed model formula: response "~" ( "." | term ("+" term)* ) ("-" term)*.
struct FormulaSpec {
  std::string response;
  bool all_terms = false;               // right-hand side was "."
  std::vector<std::string> terms;       // explicit terms as written
  std::vector<std::string> exclusions;  // terms removed with "-"
  std::vector<std::string> resolved;    // final term list, in dataset order
                                        // for ".", formula order otherwise
};

// Resolves against the dataset's columns. Throws FormulaError on syntax
// errors, unknown columns, the response appearing as a term, or an empty
// resolved term set.
FormulaSpec parse_formula(const std::string& text, const Dataset& data);

}  // namespace splitwise

#endif  // SPLITWISE_DATASET_HPP
