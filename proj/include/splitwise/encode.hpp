#ifndef SPLITWISE_ENCODE_HPP
#define SPLITWISE_ENCODE_HPP

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace splitwise {

// How one numeric variable enters the model: as-is, as one threshold dummy,
// as two segment dummies, or not at all.
struct Encoding {
  enum class Kind { linear, single_split, double_split, excluded };

  Kind kind = Kind::linear;
  double cut_lo = 0;
  double cut_hi = 0;

  static Encoding linear() { return {Kind::linear, 0, 0}; }
  static Encoding single_split(double cut) { return {Kind::single_split, cut, 0}; }
  static Encoding double_split(double lo, double hi);  // requires lo < hi
  static Encoding excluded() { return {Kind::excluded, 0, 0}; }

  bool is_dummy() const {
    return kind == Kind::single_split || kind == Kind::double_split;
  }

  friend bool operator==(const Encoding&, const Encoding&) = default;
};

// Ordered variable -> encoding map; ordering follows formula term order.
using TransformPlan = std::vector<std::pair<std::string, Encoding>>;

struct EncodedColumn {
  std::string name;
  std::vector<double> values;
};

// Materializes the design columns for one variable:
//   linear        -> [(name, x)]
//   single_split  -> [(name_dummy,  I(x >= cut))]
//   double_split  -> [(name_dummy1, I(lo <= x < hi)), (name_dummy2, I(x >= hi))]
//   excluded      -> []
// The lowest segment of a double split is the reference level. Throws
// DegenerateEncodingError if any produced dummy column is constant.
std::vector<EncodedColumn> apply_encoding(std::span<const double> x,
                                          const std::string& name,
                                          const Encoding& enc);

// Human-readable dummy descriptions, thresholds at 3 decimals:
//   single_split  ->  "<name> : 1 if x >= <c>; else 0"
//   double_split  ->  "<name> : 1 if <lo> < x < <hi>; else 0"
//                     "<name> : 1 if x >= <hi>; else 0"
// Only valid for dummy encodings.
std::vector<std::string> describe_encoding(const std::string& name,
                                           const Encoding& enc);

nlohmann::ordered_json encoding_to_json(const Encoding& enc);
Encoding encoding_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json plan_to_json(const TransformPlan& plan);

}  // namespace splitwise

#endif  // SPLITWISE_ENCODE_HPP
