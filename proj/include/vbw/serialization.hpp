#pragma once

#include <cstdint>
#include <complex>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vbw/coefficients.hpp"
#include "vbw/ls_design.hpp"
#include "vbw/spec.hpp"

namespace vbw {

using Json = nlohmann::json;

/// FNV-1a 64-bit hash rendered as "fnv1a64:<16 hex digits>".
std::string fingerprint(std::string_view bytes);

/// Reads the keys delta_over_pi, b_lower_over_pi, b_upper_over_pi and the
/// optional length_override, ripple_passband, ripple_stopband. Throws
/// InputError naming the offending key.
FilterSpec spec_from_json(const Json& j);
Json spec_to_json(const FilterSpec& spec);

Json disc_to_json(const DiscretizedSpec& disc);
DiscretizedSpec disc_from_json(const Json& j);
std::string disc_fingerprint(const DiscretizedSpec& disc);

/// {K, values, disc_fingerprint}
Json coeffs_to_json(const TransitionCoeffs& v, const DiscretizedSpec& disc);
/// Throws InputError if K or the fingerprint does not match `disc`.
TransitionCoeffs coeffs_from_json(const Json& j, const DiscretizedSpec& disc);

/// {b_bin, n_fft, magnitude}
Json coefficient_set_to_json(const DftCoefficientSet& set);

/// Little-endian float64: N magnitude samples followed by N interleaved
/// (re, im) pairs of the complex coefficients.
void write_coefficient_dump(std::ostream& out, const DftCoefficientSet& set);

struct CoefficientDump {
  std::vector<double> magnitude;
  std::vector<std::complex<double>> coeffs;
};
CoefficientDump read_coefficient_dump(std::istream& in);

/// Little-endian float64: K, then Q row-major, then c.
void write_system_dump(std::ostream& out, const LsSystem& sys);
/// The returned system carries a default-constructed `disc`.
LsSystem read_system_dump(std::istream& in);

/// Raw little-endian float64 sample streams.
void write_f64le(std::ostream& out, std::span<const double> samples);
std::vector<double> read_f64le(std::istream& in);

/// Parses JSON text; parse errors become InputError with line and column.
Json parse_json_text(std::string_view text, std::string_view source_name);

}  // namespace vbw
