#include "vbw/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>

#include "vbw/errors.hpp"
#include "vbw/numeric.hpp"

namespace vbw {
namespace {

std::shared_ptr<const std::vector<std::complex<double>>> linear_phase_table(int n_fft, int delay) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::weak_ptr<const std::vector<std::complex<double>>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n_fft, delay}];
  if (auto table = slot.lock()) return table;
  auto table = std::make_shared<std::vector<std::complex<double>>>(n_fft);
  for (int k = 0; k < n_fft; ++k) {
    // Reduce k * D1 mod N first so the angle stays in [0, 2pi).
    const long long r = (static_cast<long long>(k) * delay) % n_fft;
    (*table)[k] = std::polar(1.0, -kTwoPi * static_cast<double>(r) / n_fft);
  }
  slot = table;
  return table;
}

// Writes H_R over the inclusive bin span [from, to] of the lower half and
// its mirror image.
void fill_span(std::vector<double>& mag, int from, int to, int k1, int k2,
               const std::vector<double>& v) {
  const int n = static_cast<int>(mag.size());
  for (int k = std::max(from, 0); k <= std::min(to, n / 2); ++k) {
    double value;
    if (k < k1) {
      value = 1.0;
    } else if (k <= k2) {
      value = v[static_cast<std::size_t>(k - k1)];
    } else {
      value = 0.0;
    }
    mag[k] = value;
    if (k != 0 && k != n / 2) mag[n - k] = value;
  }
}

}  // namespace

void TransitionCoeffs::check(const DiscretizedSpec& disc) const {
  if (values.empty() || static_cast<int>(values.size()) != disc.k_transition_count) {
    throw DimensionError("expected " + std::to_string(disc.k_transition_count) +
                         " transition coefficients, got " + std::to_string(values.size()));
  }
  for (double x : values) {
    if (!std::isfinite(x)) throw InputError("transition coefficients must be finite");
  }
}

std::pair<int, int> transition_edges(const DiscretizedSpec& disc, int b_bin) {
  if (b_bin < disc.b_bins_lower || b_bin > disc.b_bins_upper) {
    throw std::out_of_range("bandwidth bin " + std::to_string(b_bin) + " outside [" +
                            std::to_string(disc.b_bins_lower) + ", " +
                            std::to_string(disc.b_bins_upper) + "]");
  }
  const int k1 = b_bin - disc.delta_bins / 2 + 1;
  return {k1, k1 + disc.k_transition_count - 1};
}

std::vector<std::complex<double>> DftCoefficientSet::complex_coeffs() const {
  std::vector<std::complex<double>> out(magnitude_.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = coefficient(k);
  return out;
}

Band DftCoefficientSet::band(int k) const {
  const int n = n_fft();
  if (k < 0 || k >= n) throw std::out_of_range("bin index outside [0, N)");
  const int folded = k <= n / 2 ? k : n - k;
  if (folded < k1_) return Band::Pass;
  if (folded <= k2_) return Band::Transition;
  return Band::Stop;
}

std::vector<int> DftCoefficientSet::indices(Band which) const {
  std::vector<int> out;
  for (int k = 0; k < n_fft(); ++k) {
    if (band(k) == which) out.push_back(k);
  }
  return out;
}

void DftCoefficientSet::check_invariants() const {
  const int n = n_fft();
  auto fail = [](const std::string& what) {
    throw std::logic_error("DftCoefficientSet invariant violated: " + what);
  };
  if (!phase_ || static_cast<int>(phase_->size()) != n) fail("phase table size");
  for (int k = 1; k < n; ++k) {
    if (magnitude_[k] != magnitude_[n - k]) fail("mirror symmetry at bin " + std::to_string(k));
  }
  if (magnitude_[n / 2] != 0.0) fail("Nyquist sample must be zero");
  for (int k = 0; k <= n / 2; ++k) {
    const Band b = band(k);
    if (b == Band::Pass && magnitude_[k] != 1.0) fail("passband sample != 1");
    if (b == Band::Stop && magnitude_[k] != 0.0) fail("stopband sample != 0");
  }
}

DftCoefficientSet build_coefficients(const DiscretizedSpec& disc, const TransitionCoeffs& v,
                                     int b_bin) {
  v.check(disc);
  const auto [k1, k2] = transition_edges(disc, b_bin);
  DftCoefficientSet set;
  set.magnitude_.assign(static_cast<std::size_t>(disc.n_fft), 0.0);
  set.phase_ = linear_phase_table(disc.n_fft, disc.delay_design);
  set.b_bin_ = b_bin;
  set.k1_ = k1;
  set.k2_ = k2;
  set.delay_ = disc.delay_design;
  fill_span(set.magnitude_, 0, disc.n_fft / 2, k1, k2, v.values);
  if (set.magnitude_[disc.n_fft / 2] != 0.0) {
    throw std::logic_error("Nyquist bin fell inside the pass or transition band");
  }
  return set;
}

DftCoefficientSet retune(const DftCoefficientSet& coeffs, const DiscretizedSpec& disc,
                         int new_b_bin, const TransitionCoeffs& v) {
  v.check(disc);
  if (coeffs.n_fft() != disc.n_fft || coeffs.delay_ != disc.delay_design) {
    throw DimensionError("coefficient set does not belong to this discretized spec");
  }
  const auto [k1, k2] = transition_edges(disc, new_b_bin);
  if (new_b_bin == coeffs.b_bin_) return coeffs;
  DftCoefficientSet out = coeffs;
  out.b_bin_ = new_b_bin;
  out.k1_ = k1;
  out.k2_ = k2;
  fill_span(out.magnitude_, std::min(coeffs.k1_, k1), std::max(coeffs.k2_, k2), k1, k2, v.values);
  return out;
}

}  // namespace vbw
