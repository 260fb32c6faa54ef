#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "vbw/errors.hpp"
#include "vbw/serialization.hpp"

using namespace vbw;

TEST_CASE("filter spec from JSON") {
  const auto j = parse_json_text(
      R"({"delta_over_pi": 0.25, "b_lower_over_pi": 0.75, "b_upper_over_pi": 0.859375,
          "length_override": 31})",
      "spec.json");
  const auto s = spec_from_json(j);
  CHECK(s.delta == doctest::Approx(0.25 * kPi));
  CHECK(s.length_override == 31);
  CHECK_FALSE(s.ripple_passband.has_value());
  const auto back = spec_from_json(spec_to_json(s));
  CHECK(back.b_upper == s.b_upper);
  CHECK(back.length_override == s.length_override);
}

TEST_CASE("spec JSON errors name the key or position") {
  CHECK_THROWS_WITH_AS(spec_from_json(Json{{"delta_over_pi", 0.25}}),
                       doctest::Contains("b_lower_over_pi"), InputError);
  CHECK_THROWS_WITH_AS(
      spec_from_json(Json{{"delta_over_pi", "wide"}, {"b_lower_over_pi", 0.7}, {"b_upper_over_pi", 0.8}}),
      doctest::Contains("delta_over_pi"), InputError);
  CHECK_THROWS_WITH_AS(parse_json_text("{\n  \"a\": 1,\n  oops\n}", "spec.json"),
                       doctest::Contains("spec.json:3:"), InputError);
  CHECK_THROWS_AS(spec_from_json(Json::array()), InputError);
}

TEST_CASE("discretized spec round trip") {
  const auto d = fixtures::example1();
  const auto back = disc_from_json(disc_to_json(d));
  CHECK(disc_fingerprint(back) == disc_fingerprint(d));
  CHECK(back.delta_truncated == d.delta_truncated);
  auto broken = disc_to_json(d);
  broken["delay_system"] = 7;
  CHECK_THROWS_AS(disc_from_json(broken), InputError);
}

TEST_CASE("transition coefficients carry the discretization fingerprint") {
  const auto d = fixtures::example1();
  const auto& v = fixtures::example1_design().coeffs;
  const auto j = coeffs_to_json(v, d);
  CHECK(j["K"] == 15);
  CHECK(coeffs_from_json(j, d).values == v.values);
  CHECK_THROWS_AS(coeffs_from_json(j, fixtures::example2()), InputError);
  auto short_j = j;
  short_j["K"] = 14;
  CHECK_THROWS_AS(coeffs_from_json(short_j, d), InputError);
}

TEST_CASE("fingerprints") {
  CHECK(fingerprint("") == "fnv1a64:cbf29ce484222325");
  CHECK(fingerprint("a") == "fnv1a64:af63dc4c8601ec8c");
}

TEST_CASE("coefficient dumps") {
  const auto d = fixtures::example1();
  const auto c = build_coefficients(d, fixtures::example1_design().coeffs, 50);
  const auto j = coefficient_set_to_json(c);
  CHECK(j["b_bin"] == 50);
  CHECK(j["magnitude"].size() == 128);

  std::stringstream buf;
  write_coefficient_dump(buf, c);
  CHECK(buf.str().size() == 128 * 3 * 8);
  const auto back = read_coefficient_dump(buf);
  CHECK(back.magnitude == std::vector<double>(c.magnitude().begin(), c.magnitude().end()));
  CHECK(back.coeffs == c.complex_coeffs());
}

TEST_CASE("system dumps and raw streams") {
  const auto& s = fixtures::example1_design().system;
  std::stringstream buf;
  write_system_dump(buf, s);
  const auto back = read_system_dump(buf);
  CHECK(back.q_matrix == s.q_matrix);
  CHECK(back.c_vector == s.c_vector);

  std::stringstream raw;
  const std::vector<double> x{1.5, -0.0, 3e-300, -7.25};
  write_f64le(raw, x);
  const auto bytes = raw.str();
  CHECK(bytes.size() == 32);
  CHECK(static_cast<unsigned char>(bytes[7]) == 0x3f);  // little endian 1.5
  CHECK(read_f64le(raw) == x);

  std::stringstream ragged("abc");
  CHECK_THROWS_AS(read_f64le(ragged), InputError);
}
