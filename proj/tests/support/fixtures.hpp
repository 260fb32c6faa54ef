#pragma once

#include <vector>

#include "oracle.hpp"
#include "vbw/numeric.hpp"
#include "vbw/pipeline.hpp"
#include "vbw/spec.hpp"

namespace fixtures {

inline vbw::FilterSpec spec_from_pi(double delta, double b_lo, double b_hi,
                                    std::optional<int> length = std::nullopt) {
  vbw::FilterSpec s;
  s.delta = delta * vbw::kPi;
  s.b_lower = b_lo * vbw::kPi;
  s.b_upper = b_hi * vbw::kPi;
  s.length_override = length;
  return s;
}

// N=128, L=31, bins 48..55
inline vbw::DiscretizedSpec example1() {
  return vbw::discretize(spec_from_pi(0.25, 96.0 / 128, 110.0 / 128, 31), 31, 128);
}

// bins 8..55
inline vbw::DiscretizedSpec example2() {
  return vbw::discretize(spec_from_pi(0.25, 16.0 / 128, 110.0 / 128, 31), 31, 128);
}

inline vbw::FilterSpec example3_spec() { return spec_from_pi(0.27, 0.76, 0.85, 31); }

inline vbw::DiscretizedSpec example3() { return vbw::discretize(example3_spec(), 31, 128); }

// N-point toy (L=7, N=16 by default) with transition width delta_bins over [lo, hi]
inline vbw::DiscretizedSpec toy(int delta_bins, int lo, int hi, int length = 7, int n_fft = 16) {
  const double half = n_fft / 2.0;
  return vbw::discretize(spec_from_pi(delta_bins / half, lo / half, hi / half, length), length,
                         n_fft);
}

inline oracle::Geometry geometry(const vbw::DiscretizedSpec& d) {
  return {d.n_fft, d.filter_length, d.delta_bins};
}

// Example 1 design shared by the tests of one binary.
inline const vbw::DesignResult& example1_design() {
  static const vbw::DesignResult r = vbw::design(example1());
  return r;
}

inline double max_abs(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace fixtures
