#include "splitwise/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "splitwise/error.hpp"
#include "splitwise/format.hpp"

namespace splitwise {

Dataset Dataset::from_columns(
    std::vector<std::pair<std::string, std::vector<double>>> columns) {
  Dataset d;
  if (columns.empty()) throw Error("dataset needs at least one column");
  d.n_rows_ = columns.front().second.size();
  if (d.n_rows_ == 0) throw Error("dataset needs at least one row");
  std::set<std::string> seen;
  for (auto& [name, values] : columns) {
    if (name.empty()) throw Error("empty column name");
    if (!seen.insert(name).second) throw Error("duplicate column name: " + name);
    if (values.size() != d.n_rows_)
      throw Error("column " + name + " has mismatched length");
    for (double v : values) {
      if (!std::isfinite(v)) throw Error("non-finite value in column " + name);
    }
    d.names_.push_back(name);
    d.columns_.push_back(std::move(values));
  }
  return d;
}

bool Dataset::has_column(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

const std::vector<double>& Dataset::column(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw Error("unknown column: " + name);
  return columns_[static_cast<std::size_t>(it - names_.begin())];
}

namespace {

// Splits a whole CSV stream into records of fields, honoring quoted fields
// (embedded commas, escaped "" quotes, embedded line breaks) and CRLF line
// endings.
std::vector<std::vector<std::string>> split_records(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool any = false;

  auto end_field = [&] {
    record.push_back(field);
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };

  char c;
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty())
          throw CsvError("malformed CSV: quote inside unquoted field");
        in_quotes = true;
        field_was_quoted = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (in.peek() == '\n') in.get(c);
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
    }
  }
  if (in_quotes) throw CsvError("malformed CSV: unterminated quoted field");
  if (any && (!field.empty() || field_was_quoted || !record.empty())) end_record();
  // Drop trailing blank records (files often end with a newline).
  while (!records.empty() && records.back().size() == 1 && records.back()[0].empty())
    records.pop_back();
  return records;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool is_missing(const std::string& cell) {
  const std::string t = trim(cell);
  return t.empty() || t == "NA";
}

double parse_number(const std::string& cell, std::size_t row, const std::string& col) {
  const std::string t = trim(cell);
  const char* begin = t.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw CsvError("non-numeric cell \"" + cell + "\" in column " + col + ", data row " +
                   std::to_string(row + 1));
  if (!std::isfinite(v))
    throw CsvError("non-finite cell in column " + col + ", data row " +
                   std::to_string(row + 1));
  return v;
}

}  // namespace

LoadResult read_csv(std::istream& in, NaPolicy policy) {
  auto records = split_records(in);
  if (records.empty()) throw CsvError("empty CSV: missing header row");

  std::vector<std::string> header;
  std::set<std::string> seen;
  for (const auto& cell : records[0]) {
    const std::string name = trim(cell);
    if (name.empty()) throw CsvError("empty header name");
    if (!seen.insert(name).second) throw CsvError("duplicate header name: " + name);
    header.push_back(name);
  }
  const std::size_t k = header.size();

  std::vector<std::vector<double>> columns(k);
  std::size_t dropped = 0;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != k)
      throw CsvError("row " + std::to_string(r) + " has " + std::to_string(rec.size()) +
                     " fields, expected " + std::to_string(k));
    bool missing = false;
    for (const auto& cell : rec) {
      if (is_missing(cell)) {
        missing = true;
        break;
      }
    }
    if (missing) {
      if (policy == NaPolicy::fail)
        throw CsvError("missing value in data row " + std::to_string(r));
      ++dropped;
      continue;
    }
    for (std::size_t j = 0; j < k; ++j)
      columns[j].push_back(parse_number(rec[j], r - 1, header[j]));
  }

  if (columns[0].empty()) throw CsvError("zero data rows after filtering");

  std::vector<std::pair<std::string, std::vector<double>>> named;
  named.reserve(k);
  for (std::size_t j = 0; j < k; ++j)
    named.emplace_back(header[j], std::move(columns[j]));
  return {Dataset::from_columns(std::move(named)), dropped};
}

LoadResult load_csv(const std::string& path, NaPolicy policy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot open file: " + path);
  return read_csv(in, policy);
}

void write_csv(const Dataset& data, std::ostream& out) {
  const auto& names = data.column_names();
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (j) out << ',';
    out << names[j];
  }
  out << '\n';
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (j) out << ',';
      out << num_full(data.column(j)[i]);
    }
    out << '\n';
  }
}

void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  write_csv(data, out);
}

namespace {

struct Token {
  enum class Kind { ident, tilde, plus, minus, dot, end };
  Kind kind;
  std::string text;
};

class FormulaLexer {
 public:
  explicit FormulaLexer(const std::string& text) : text_(text) {}

  Token next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ >= text_.size()) return {Token::Kind::end, ""};
    const char c = text_[pos_];
    if (c == '~') { ++pos_; return {Token::Kind::tilde, "~"}; }
    if (c == '+') { ++pos_; return {Token::Kind::plus, "+"}; }
    if (c == '-') { ++pos_; return {Token::Kind::minus, "-"}; }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '_' || text_[pos_] == '.'))
      ++pos_;
    if (pos_ == start)
      throw FormulaError(std::string("unexpected character '") + c + "' in formula");
    std::string word = text_.substr(start, pos_ - start);
    if (word == ".") return {Token::Kind::dot, "."};
    return {Token::Kind::ident, word};
  }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

FormulaSpec parse_formula(const std::string& text, const Dataset& data) {
  FormulaLexer lex(text);
  FormulaSpec spec;

  Token t = lex.next();
  if (t.kind != Token::Kind::ident)
    throw FormulaError("formula must start with a response name");
  spec.response = t.text;

  if (lex.next().kind != Token::Kind::tilde)
    throw FormulaError("expected '~' after the response");

  t = lex.next();
  if (t.kind == Token::Kind::dot) {
    spec.all_terms = true;
    t = lex.next();
  } else {
    if (t.kind != Token::Kind::ident)
      throw FormulaError("expected '.' or a term after '~'");
    spec.terms.push_back(t.text);
    t = lex.next();
    while (t.kind == Token::Kind::plus) {
      t = lex.next();
      if (t.kind != Token::Kind::ident) throw FormulaError("expected a term after '+'");
      spec.terms.push_back(t.text);
      t = lex.next();
    }
  }
  while (t.kind == Token::Kind::minus) {
    t = lex.next();
    if (t.kind != Token::Kind::ident) throw FormulaError("expected a term after '-'");
    spec.exclusions.push_back(t.text);
    t = lex.next();
  }
  if (t.kind != Token::Kind::end) throw FormulaError("trailing input in formula");

  // Resolution against the dataset.
  if (!data.has_column(spec.response))
    throw FormulaError("unknown column: " + spec.response);
  for (const auto& name : spec.terms)
    if (!data.has_column(name)) throw FormulaError("unknown column: " + name);
  for (const auto& name : spec.exclusions) {
    if (!data.has_column(name)) throw FormulaError("unknown column: " + name);
    if (name == spec.response)
      throw FormulaError("cannot exclude the response: " + name);
  }

  std::vector<std::string> base;
  if (spec.all_terms) {
    for (const auto& name : data.column_names())
      if (name != spec.response) base.push_back(name);
  } else {
    std::set<std::string> seen;
    for (const auto& name : spec.terms) {
      if (name == spec.response)
        throw FormulaError("response cannot appear as a term: " + name);
      if (!seen.insert(name).second)
        throw FormulaError("duplicate term: " + name);
    }
    base = spec.terms;
  }

  for (const auto& name : spec.exclusions) {
    auto it = std::find(base.begin(), base.end(), name);
    if (it == base.end())
      throw FormulaError("cannot exclude term not in the formula: " + name);
    base.erase(it);
  }

  if (base.empty()) throw FormulaError("formula resolves to an empty term set");
  spec.resolved = std::move(base);
  return spec;
}

}  // namespace splitwise
