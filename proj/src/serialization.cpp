#include "vbw/serialization.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "vbw/errors.hpp"
#include "vbw/numeric.hpp"

namespace vbw {
namespace {

std::uint64_t to_le(std::uint64_t x) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((x >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
  return x;
}

void put_f64(std::ostream& out, double x) {
  const std::uint64_t bits = to_le(std::bit_cast<std::uint64_t>(x));
  char buf[8];
  std::memcpy(buf, &bits, 8);
  out.write(buf, 8);
}

std::vector<double> read_all_f64(std::istream& in) {
  std::vector<double> out;
  char buf[8];
  while (in.read(buf, 8)) {
    std::uint64_t bits;
    std::memcpy(&bits, buf, 8);
    out.push_back(std::bit_cast<double>(to_le(bits)));
  }
  if (in.gcount() != 0) throw InputError("float64 stream length is not a multiple of 8 bytes");
  return out;
}

template <typename T>
T required(const Json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw InputError(std::string("key '") + key + "': " + e.what());
  }
}

template <typename T>
std::optional<T> optional_key(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return required<T>(j, key);
}

}  // namespace

std::string fingerprint(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

FilterSpec spec_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("filter spec must be a JSON object");
  FilterSpec s;
  s.delta = required<double>(j, "delta_over_pi") * kPi;
  s.b_lower = required<double>(j, "b_lower_over_pi") * kPi;
  s.b_upper = required<double>(j, "b_upper_over_pi") * kPi;
  s.length_override = optional_key<int>(j, "length_override");
  s.ripple_passband = optional_key<double>(j, "ripple_passband");
  s.ripple_stopband = optional_key<double>(j, "ripple_stopband");
  s.validate();
  return s;
}

Json spec_to_json(const FilterSpec& spec) {
  Json j = {{"delta_over_pi", spec.delta / kPi},
            {"b_lower_over_pi", spec.b_lower / kPi},
            {"b_upper_over_pi", spec.b_upper / kPi}};
  if (spec.length_override) j["length_override"] = *spec.length_override;
  if (spec.ripple_passband) j["ripple_passband"] = *spec.ripple_passband;
  if (spec.ripple_stopband) j["ripple_stopband"] = *spec.ripple_stopband;
  return j;
}

Json disc_to_json(const DiscretizedSpec& d) {
  return {{"n_fft", d.n_fft},
          {"filter_length", d.filter_length},
          {"block_advance", d.block_advance},
          {"delta_bins", d.delta_bins},
          {"delta_truncated", d.delta_truncated},
          {"delta_truncated_over_pi", d.delta_truncated / kPi},
          {"k_transition_count", d.k_transition_count},
          {"b_bins_lower", d.b_bins_lower},
          {"b_bins_upper", d.b_bins_upper},
          {"delay_design", d.delay_design},
          {"delay_system", d.delay_system},
          {"length_recomputed", d.length_recomputed}};
}

DiscretizedSpec disc_from_json(const Json& j) {
  DiscretizedSpec d;
  d.n_fft = required<int>(j, "n_fft");
  d.filter_length = required<int>(j, "filter_length");
  d.block_advance = required<int>(j, "block_advance");
  d.delta_bins = required<int>(j, "delta_bins");
  d.delta_truncated = d.delta_bins * kTwoPi / d.n_fft;
  d.k_transition_count = required<int>(j, "k_transition_count");
  d.b_bins_lower = required<int>(j, "b_bins_lower");
  d.b_bins_upper = required<int>(j, "b_bins_upper");
  d.delay_design = required<int>(j, "delay_design");
  d.delay_system = required<int>(j, "delay_system");
  d.length_recomputed = optional_key<bool>(j, "length_recomputed").value_or(false);
  try {
    d.check_invariants();
  } catch (const std::logic_error& e) {
    throw InputError(e.what());
  }
  return d;
}

std::string disc_fingerprint(const DiscretizedSpec& d) {
  std::ostringstream s;
  s << d.n_fft << '/' << d.filter_length << '/' << d.block_advance << '/' << d.delta_bins << '/'
    << d.k_transition_count << '/' << d.b_bins_lower << '/' << d.b_bins_upper << '/'
    << d.delay_design << '/' << d.delay_system;
  return fingerprint(s.str());
}

Json coeffs_to_json(const TransitionCoeffs& v, const DiscretizedSpec& disc) {
  return {{"K", v.size()}, {"values", v.values}, {"disc_fingerprint", disc_fingerprint(disc)}};
}

TransitionCoeffs coeffs_from_json(const Json& j, const DiscretizedSpec& disc) {
  TransitionCoeffs v{required<std::vector<double>>(j, "values")};
  if (required<std::size_t>(j, "K") != v.size()) throw InputError("K disagrees with values");
  if (required<std::string>(j, "disc_fingerprint") != disc_fingerprint(disc)) {
    throw InputError("transition coefficients were designed for a different discretization");
  }
  v.check(disc);
  return v;
}

Json coefficient_set_to_json(const DftCoefficientSet& set) {
  return {{"b_bin", set.b_bin()},
          {"n_fft", set.n_fft()},
          {"magnitude", std::vector<double>(set.magnitude().begin(), set.magnitude().end())}};
}

void write_coefficient_dump(std::ostream& out, const DftCoefficientSet& set) {
  for (double x : set.magnitude()) put_f64(out, x);
  for (std::size_t k = 0; k < static_cast<std::size_t>(set.n_fft()); ++k) {
    const auto c = set.coefficient(k);
    put_f64(out, c.real());
    put_f64(out, c.imag());
  }
}

CoefficientDump read_coefficient_dump(std::istream& in) {
  const auto raw = read_all_f64(in);
  if (raw.empty() || raw.size() % 3 != 0) throw InputError("coefficient dump has a bad length");
  const std::size_t n = raw.size() / 3;
  CoefficientDump d;
  d.magnitude.assign(raw.begin(), raw.begin() + static_cast<std::ptrdiff_t>(n));
  d.coeffs.resize(n);
  for (std::size_t k = 0; k < n; ++k) d.coeffs[k] = {raw[n + 2 * k], raw[n + 2 * k + 1]};
  return d;
}

void write_system_dump(std::ostream& out, const LsSystem& sys) {
  const auto k = sys.q_matrix.rows();
  put_f64(out, static_cast<double>(k));
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index s = 0; s < k; ++s) put_f64(out, sys.q_matrix(r, s));
  }
  for (Eigen::Index s = 0; s < k; ++s) put_f64(out, sys.c_vector(s));
}

LsSystem read_system_dump(std::istream& in) {
  const auto raw = read_all_f64(in);
  if (raw.empty()) throw InputError("empty system dump");
  const auto k = static_cast<Eigen::Index>(raw[0]);
  if (k < 1 || static_cast<double>(k) != raw[0] ||
      raw.size() != static_cast<std::size_t>(1 + k * k + k)) {
    throw InputError("system dump has a bad length");
  }
  LsSystem sys;
  sys.q_matrix.resize(k, k);
  sys.c_vector.resize(k);
  std::size_t i = 1;
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index s = 0; s < k; ++s) sys.q_matrix(r, s) = raw[i++];
  }
  for (Eigen::Index s = 0; s < k; ++s) sys.c_vector(s) = raw[i++];
  return sys;
}

void write_f64le(std::ostream& out, std::span<const double> samples) {
  for (double x : samples) put_f64(out, x);
}

std::vector<double> read_f64le(std::istream& in) { return read_all_f64(in); }

Json parse_json_text(std::string_view text, std::string_view source_name) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw InputError(std::string(source_name) + ":" + std::to_string(line) + ":" +
                     std::to_string(column) + ": JSON parse error: " + e.what());
  }
}

}  // namespace vbw
