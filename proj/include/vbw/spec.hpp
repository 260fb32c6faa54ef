#pragma once

#include <optional>

namespace vbw {

/// Continuous-frequency specification of a variable-bandwidth lowpass.
/// All frequencies are normalized angular frequencies in radians (pi is
/// the Nyquist frequency). The bandwidth parameter b is the center of the
/// transition band and may be tuned anywhere in [b_lower, b_upper].
struct FilterSpec {
  double delta = 0.0;  ///< transition width
  double b_lower = 0.0;
  double b_upper = 0.0;
  std::optional<int> length_override;
  std::optional<double> ripple_passband;  ///< linear
  std::optional<double> ripple_stopband;  ///< linear

  /// Throws InputError when the band edges leave (0, pi), the range is
  /// inverted, or the length override is not a positive odd number.
  void validate() const;
};

/// Bin-domain form of a FilterSpec for an N-point overlap-save
/// realization.
struct DiscretizedSpec {
  int n_fft = 0;             ///< N, a power of two
  int filter_length = 0;     ///< L, odd
  int block_advance = 0;     ///< M = N - L + 1
  int delta_bins = 0;        ///< even transition width in bins
  double delta_truncated = 0.0;  ///< delta_bins * 2pi / N
  int k_transition_count = 0;    ///< K = delta_bins - 1
  int b_bins_lower = 0;
  int b_bins_upper = 0;
  int delay_design = 0;  ///< D1 = (L - 1) / 2
  int delay_system = 0;  ///< D2 = D1 + M - 1
  bool length_recomputed = false;  ///< L re-estimated after the parity fix

  int bin_count() const { return b_bins_upper - b_bins_lower + 1; }
  double bin_to_rad(int bin) const;

  /// Throws std::logic_error if any structural invariant is broken.
  void check_invariants() const;
};

/// Bellanger's order estimate for a transition width `delta` (rad), turned
/// into an odd filter length.
int estimate_length_for_width(double delta, double ripple_passband, double ripple_stopband);

/// Returns the override when present, otherwise estimates from the ripples.
/// Throws ConfigurationError if neither is available.
int estimate_filter_length(const FilterSpec& spec);

/// Power of two nearest to 0.9 L log2(L). If that is below 2L, the smallest
/// power of two >= 2L is used instead.
int estimate_fft_length(int filter_length);

/// Throws InfeasibleSpecError if the bin range cannot hold the transition
/// band for this N.
DiscretizedSpec discretize(const FilterSpec& spec, int filter_length, int n_fft);

/// Estimates L and N from the spec, then discretizes.
DiscretizedSpec discretize(const FilterSpec& spec);

/// round(b N / 2pi), halves away from zero. No clamping.
int bandwidth_to_bin(double b, int n_fft);

struct BinMapping {
  int bin = 0;
  bool clamped = false;  ///< the raw bin fell outside the design range
};

BinMapping bandwidth_to_bin(double b, const DiscretizedSpec& disc);

}  // namespace vbw
