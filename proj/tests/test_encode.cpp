#include <doctest.h>

#include <json.hpp>

#include "splitwise/encode.hpp"
#include "splitwise/error.hpp"

using namespace splitwise;

TEST_CASE("encode: single split at the mtcars disp threshold") {
  const std::vector<double> x{95.1, 108.0};
  const auto cols = apply_encoding(x, "disp", Encoding::single_split(101.55));
  REQUIRE(cols.size() == 1);
  CHECK(cols[0].name == "disp_dummy");
  CHECK(cols[0].values == std::vector<double>{0, 1});
}

TEST_CASE("encode: linear passes the input through under the original name") {
  const std::vector<double> x{3.14, -2.7, 0.0};
  const auto cols = apply_encoding(x, "wt", Encoding::linear());
  REQUIRE(cols.size() == 1);
  CHECK(cols[0].name == "wt");
  CHECK(cols[0].values == x);
}

TEST_CASE("encode: double split segments by membership") {
  const std::vector<double> x{1, 5, 9};
  const auto cols = apply_encoding(x, "v", Encoding::double_split(3, 7));
  REQUIRE(cols.size() == 2);
  CHECK(cols[0].name == "v_dummy1");
  CHECK(cols[0].values == std::vector<double>{0, 1, 0});
  CHECK(cols[1].name == "v_dummy2");
  CHECK(cols[1].values == std::vector<double>{0, 0, 1});
}

TEST_CASE("encode: excluded produces no columns") {
  const std::vector<double> x{1, 2, 3};
  CHECK(apply_encoding(x, "v", Encoding::excluded()).empty());
}

TEST_CASE("encode: column counts per kind") {
  const std::vector<double> x{0, 2, 4, 6};
  CHECK(apply_encoding(x, "v", Encoding::linear()).size() == 1);
  CHECK(apply_encoding(x, "v", Encoding::single_split(3)).size() == 1);
  CHECK(apply_encoding(x, "v", Encoding::double_split(1, 3)).size() == 2);
  CHECK(apply_encoding(x, "v", Encoding::excluded()).size() == 0);
}

TEST_CASE("encode: constant dummy columns are a hard error") {
  const std::vector<double> x{1, 2, 3};
  CHECK_THROWS_AS(apply_encoding(x, "v", Encoding::single_split(0.5)),
                  DegenerateEncodingError);
  CHECK_THROWS_AS(apply_encoding(x, "v", Encoding::single_split(99.0)),
                  DegenerateEncodingError);
  // Middle segment empty.
  CHECK_THROWS_AS(apply_encoding(x, "v", Encoding::double_split(1.2, 1.4)),
                  DegenerateEncodingError);
}

TEST_CASE("encode: double split columns are disjoint and sum to the >= lo indicator") {
  const std::vector<double> x{-3, -1, 0, 0.5, 1, 2, 5, 7};
  const Encoding enc = Encoding::double_split(-0.5, 3);
  const auto cols = apply_encoding(x, "v", enc);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(cols[0].values[i] * cols[1].values[i] == 0.0);
    CHECK(cols[0].values[i] + cols[1].values[i] == (x[i] >= -0.5 ? 1.0 : 0.0));
  }
}

TEST_CASE("encode: midpoint cuts make >= versus > immaterial on observed data") {
  const std::vector<double> x{1, 2, 4, 8, 16};
  const double cut = 3.0;  // strictly between observed values
  const auto ge = apply_encoding(x, "v", Encoding::single_split(cut));
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(x[i] != cut);
    CHECK(ge[0].values[i] == (x[i] > cut ? 1.0 : 0.0));
  }
}

TEST_CASE("describe: single split line format") {
  const auto lines = describe_encoding("drat", Encoding::single_split(3.035));
  REQUIRE(lines.size() == 1);
  CHECK(lines[0] == "drat : 1 if x >= 3.035; else 0");
}

TEST_CASE("describe: double split prints interval then upper segment") {
  const auto lines = describe_encoding("wt", Encoding::double_split(1.885, 3.013));
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "wt : 1 if 1.885 < x < 3.013; else 0");
  CHECK(lines[1] == "wt : 1 if x >= 3.013; else 0");
}

TEST_CASE("describe: three-decimal display rounding") {
  const auto lines = describe_encoding("z", Encoding::single_split(0.0005));
  CHECK(lines[0] == "z : 1 if x >= 0.001; else 0");
  // Display rounding never touches the stored cut.
  CHECK(Encoding::single_split(0.0005).cut_lo == 0.0005);
  const auto wide = describe_encoding("disp", Encoding::single_split(101.55));
  CHECK(wide[0] == "disp : 1 if x >= 101.550; else 0");
}

TEST_CASE("describe: linear and excluded have no description") {
  CHECK_THROWS_AS(describe_encoding("v", Encoding::linear()), Error);
  CHECK_THROWS_AS(describe_encoding("v", Encoding::excluded()), Error);
}

TEST_CASE("encoding: double split requires ordered cuts") {
  CHECK_THROWS_AS(Encoding::double_split(3, 3), Error);
  CHECK_THROWS_AS(Encoding::double_split(5, 3), Error);
}

TEST_CASE("encoding: json round trip across all kinds") {
  const Encoding cases[] = {Encoding::linear(), Encoding::single_split(1.25),
                            Encoding::double_split(-0.5, 2.75), Encoding::excluded()};
  for (const auto& enc : cases) {
    const Encoding back = encoding_from_json(encoding_to_json(enc));
    CHECK(back == enc);
  }
  CHECK(encoding_to_json(Encoding::single_split(1.25))["kind"] == "single");
}

TEST_CASE("plan: json keeps term order") {
  TransformPlan plan{{"b", Encoding::linear()}, {"a", Encoding::single_split(2)}};
  const auto j = plan_to_json(plan);
  auto it = j.begin();
  CHECK(it.key() == "b");
  ++it;
  CHECK(it.key() == "a");
}
