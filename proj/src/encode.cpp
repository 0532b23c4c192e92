#include "splitwise/encode.hpp"

#include <json.hpp>

#include "splitwise/error.hpp"
#include "splitwise/format.hpp"

namespace splitwise {

Encoding Encoding::double_split(double lo, double hi) {
  if (!(lo < hi)) throw Error("double split requires cut_lo < cut_hi");
  return {Kind::double_split, lo, hi};
}

namespace {

std::vector<double> indicator(std::span<const double> x, bool (*pred)(double, double, double),
                              double lo, double hi, const std::string& name) {
  std::vector<double> col(x.size());
  bool any0 = false, any1 = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool hit = pred(x[i], lo, hi);
    col[i] = hit ? 1.0 : 0.0;
    (hit ? any1 : any0) = true;
  }
  if (!any0 || !any1)
    throw DegenerateEncodingError("dummy column " + name + " is constant");
  return col;
}

}  // namespace

std::vector<EncodedColumn> apply_encoding(std::span<const double> x,
                                          const std::string& name,
                                          const Encoding& enc) {
  switch (enc.kind) {
    case Encoding::Kind::excluded:
      return {};
    case Encoding::Kind::linear:
      return {{name, std::vector<double>(x.begin(), x.end())}};
    case Encoding::Kind::single_split: {
      auto ge = [](double v, double lo, double) { return v >= lo; };
      return {{name + "_dummy", indicator(x, ge, enc.cut_lo, 0, name + "_dummy")}};
    }
    case Encoding::Kind::double_split: {
      auto mid = [](double v, double lo, double hi) { return v >= lo && v < hi; };
      auto ge = [](double v, double, double hi) { return v >= hi; };
      std::vector<EncodedColumn> out;
      out.push_back(
          {name + "_dummy1", indicator(x, mid, enc.cut_lo, enc.cut_hi, name + "_dummy1")});
      out.push_back(
          {name + "_dummy2", indicator(x, ge, enc.cut_lo, enc.cut_hi, name + "_dummy2")});
      return out;
    }
  }
  throw Error("apply_encoding: invalid encoding kind");
}

std::vector<std::string> describe_encoding(const std::string& name, const Encoding& enc) {
  switch (enc.kind) {
    case Encoding::Kind::single_split:
      return {name + " : 1 if x >= " + num_fixed(enc.cut_lo, 3) + "; else 0"};
    case Encoding::Kind::double_split:
      return {name + " : 1 if " + num_fixed(enc.cut_lo, 3) + " < x < " +
                  num_fixed(enc.cut_hi, 3) + "; else 0",
              name + " : 1 if x >= " + num_fixed(enc.cut_hi, 3) + "; else 0"};
    default:
      throw Error("describe_encoding applies to dummy encodings only");
  }
}

nlohmann::ordered_json encoding_to_json(const Encoding& enc) {
  nlohmann::ordered_json j;
  switch (enc.kind) {
    case Encoding::Kind::linear:
      j["kind"] = "linear";
      j["cuts"] = nlohmann::ordered_json::array();
      break;
    case Encoding::Kind::single_split:
      j["kind"] = "single";
      j["cuts"] = {enc.cut_lo};
      break;
    case Encoding::Kind::double_split:
      j["kind"] = "double";
      j["cuts"] = {enc.cut_lo, enc.cut_hi};
      break;
    case Encoding::Kind::excluded:
      j["kind"] = "excluded";
      j["cuts"] = nlohmann::ordered_json::array();
      break;
  }
  return j;
}

Encoding encoding_from_json(const nlohmann::ordered_json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const auto& cuts = j.at("cuts");
  if (kind == "linear") return Encoding::linear();
  if (kind == "excluded") return Encoding::excluded();
  if (kind == "single") return Encoding::single_split(cuts.at(0).get<double>());
  if (kind == "double")
    return Encoding::double_split(cuts.at(0).get<double>(), cuts.at(1).get<double>());
  throw Error("unknown encoding kind: " + kind);
}

nlohmann::ordered_json plan_to_json(const TransformPlan& plan) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [name, enc] : plan) j[name] = encoding_to_json(enc);
  return j;
}

}  // namespace splitwise
