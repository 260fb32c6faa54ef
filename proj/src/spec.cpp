#include "vbw/spec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "vbw/errors.hpp"
#include "vbw/numeric.hpp"

namespace vbw {
namespace {

// Bin positions computed from multiples of pi land within a few ulps of an
// integer; treat anything that close as exact before floor/ceil.
constexpr double kBinSnap = 1e-9;

int snapped_floor(double x) { return static_cast<int>(std::floor(x + kBinSnap)); }
int snapped_ceil(double x) { return static_cast<int>(std::ceil(x - kBinSnap)); }

constexpr double kEdgeTolerance = 1e-12;

bool is_power_of_two(int n) { return n > 0 && std::has_single_bit(static_cast<unsigned>(n)); }

}  // namespace

void FilterSpec::validate() const {
  if (!(delta > 0.0 && delta < kPi)) {
    throw InputError("transition width must lie in (0, pi)");
  }
  if (!(b_lower <= b_upper)) {
    throw InputError("b_lower must not exceed b_upper");
  }
  // a passband edge exactly at 0 is allowed (the narrowest setting keeps only DC)
  if (!(b_lower - delta / 2.0 > -kEdgeTolerance)) {
    throw InputError("passband edge b_lower - delta/2 must not be negative");
  }
  if (!(b_upper + delta / 2.0 < kPi)) {
    throw InputError("stopband edge b_upper + delta/2 must be below pi");
  }
  if (length_override) {
    if (*length_override < 3 || *length_override % 2 == 0) {
      throw InputError("length_override must be an odd integer >= 3, got " +
                       std::to_string(*length_override));
    }
  }
  for (const auto& r : {ripple_passband, ripple_stopband}) {
    if (r && !(*r > 0.0 && *r < 1.0)) {
      throw InputError("ripples must lie in (0, 1)");
    }
  }
}

double DiscretizedSpec::bin_to_rad(int bin) const {
  return static_cast<double>(bin) * kTwoPi / static_cast<double>(n_fft);
}

void DiscretizedSpec::check_invariants() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::logic_error(std::string("DiscretizedSpec invariant violated: ") + what);
  };
  require(is_power_of_two(n_fft), "N is a power of two");
  require(filter_length >= 3 && filter_length % 2 == 1, "L odd");
  require(block_advance == n_fft - filter_length + 1 && block_advance >= 1, "M = N - L + 1 >= 1");
  require(delta_bins >= 2 && delta_bins % 2 == 0, "delta_bins even and >= 2");
  require(k_transition_count == delta_bins - 1, "K = delta_bins - 1");
  require(delay_design == (filter_length - 1) / 2, "D1 = (L - 1) / 2");
  require(delay_system == delay_design + block_advance - 1, "D2 = D1 + M - 1");
  require(delta_bins / 2 <= b_bins_lower, "lower bin leaves room for the transition band");
  require(b_bins_lower <= b_bins_upper, "bin range ordered");
  require(b_bins_upper <= n_fft / 2 - delta_bins / 2 - 1, "upper bin keeps the stopband nonempty");
}

int estimate_length_for_width(double delta, double ripple_passband, double ripple_stopband) {
  if (!(delta > 0.0)) throw InputError("transition width must be positive");
  if (!(ripple_passband > 0.0 && ripple_stopband > 0.0)) {
    throw InputError("ripples must be positive");
  }
  const double order = (2.0 / 3.0) * std::log10(1.0 / (10.0 * ripple_passband * ripple_stopband)) *
                       (kTwoPi / delta);
  const int order_int = std::max(2, static_cast<int>(std::ceil(order - kBinSnap)));
  int length = order_int + 1;
  if (length % 2 == 0) ++length;
  return length;
}

int estimate_filter_length(const FilterSpec& spec) {
  if (spec.length_override) {
    if (*spec.length_override < 3 || *spec.length_override % 2 == 0) {
      throw InputError("length_override must be an odd integer >= 3");
    }
    return *spec.length_override;
  }
  if (!spec.ripple_passband || !spec.ripple_stopband) {
    throw ConfigurationError(
        "filter length cannot be determined: give length_override or both ripples");
  }
  return estimate_length_for_width(spec.delta, *spec.ripple_passband, *spec.ripple_stopband);
}

int estimate_fft_length(int filter_length) {
  if (filter_length < 3) throw InputError("filter length must be >= 3");
  const double l = static_cast<double>(filter_length);
  const double target = 0.9 * l * std::log2(l);
  int below = 1;
  while (below * 2 <= target) below *= 2;
  const int above = below * 2;
  int n = (target - below <= above - target) ? below : above;
  if (n < 2 * filter_length) {
    n = static_cast<int>(std::bit_ceil(static_cast<unsigned>(2 * filter_length)));
  }
  return n;
}

DiscretizedSpec discretize(const FilterSpec& spec, int filter_length, int n_fft) {
  spec.validate();
  if (!is_power_of_two(n_fft) || n_fft < 4) {
    throw InputError("FFT length must be a power of two >= 4, got " + std::to_string(n_fft));
  }
  if (filter_length < 3 || filter_length % 2 == 0) {
    throw InputError("filter length must be odd and >= 3, got " + std::to_string(filter_length));
  }
  if (n_fft <= filter_length) {
    throw InfeasibleSpecError("FFT length " + std::to_string(n_fft) +
                              " must exceed the filter length " + std::to_string(filter_length));
  }

  const double bins_per_rad = static_cast<double>(n_fft) / kTwoPi;
  DiscretizedSpec d;
  d.n_fft = n_fft;
  d.delta_bins = snapped_floor(spec.delta * bins_per_rad);
  bool parity_adjusted = false;
  if (d.delta_bins % 2 != 0) {
    --d.delta_bins;
    parity_adjusted = true;
  }
  if (d.delta_bins < 2) {
    throw InfeasibleSpecError("transition width spans fewer than 2 bins at N=" +
                              std::to_string(n_fft));
  }
  d.delta_truncated = d.delta_bins * kTwoPi / n_fft;
  d.k_transition_count = d.delta_bins - 1;

  d.filter_length = filter_length;
  if (parity_adjusted && !spec.length_override && spec.ripple_passband && spec.ripple_stopband) {
    d.filter_length =
        estimate_length_for_width(d.delta_truncated, *spec.ripple_passband, *spec.ripple_stopband);
    d.length_recomputed = d.filter_length != filter_length;
    if (d.filter_length >= n_fft) {
      throw InfeasibleSpecError("re-estimated filter length " + std::to_string(d.filter_length) +
                                " does not fit N=" + std::to_string(n_fft));
    }
  }
  d.block_advance = n_fft - d.filter_length + 1;
  d.delay_design = (d.filter_length - 1) / 2;
  d.delay_system = d.delay_design + d.block_advance - 1;

  d.b_bins_lower = snapped_floor(spec.b_lower * bins_per_rad);
  d.b_bins_upper = snapped_ceil(spec.b_upper * bins_per_rad);
  const int lowest = d.delta_bins / 2;
  const int highest = n_fft / 2 - d.delta_bins / 2 - 1;
  if (d.b_bins_lower < lowest || d.b_bins_upper > highest) {
    throw InfeasibleSpecError("bandwidth bins [" + std::to_string(d.b_bins_lower) + ", " +
                              std::to_string(d.b_bins_upper) + "] exceed the admissible range [" +
                              std::to_string(lowest) + ", " + std::to_string(highest) + "]");
  }
  d.check_invariants();
  return d;
}

DiscretizedSpec discretize(const FilterSpec& spec) {
  spec.validate();
  const int length = estimate_filter_length(spec);
  return discretize(spec, length, estimate_fft_length(length));
}

int bandwidth_to_bin(double b, int n_fft) {
  const double x = b * static_cast<double>(n_fft) / kTwoPi;
  return static_cast<int>(std::lround(x + std::copysign(kBinSnap, x)));
}

BinMapping bandwidth_to_bin(double b, const DiscretizedSpec& disc) {
  const int raw = bandwidth_to_bin(b, disc.n_fft);
  const int bin = std::clamp(raw, disc.b_bins_lower, disc.b_bins_upper);
  return {bin, bin != raw};
}

}  // namespace vbw
