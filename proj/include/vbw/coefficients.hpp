#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "vbw/spec.hpp"

namespace vbw {

/// The K optimized transition-band magnitude samples V(0)..V(K-1). One set
/// serves every bandwidth bin.
struct TransitionCoeffs {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  /// Throws DimensionError on a size mismatch, InputError on non-finite values.
  void check(const DiscretizedSpec& disc) const;
};

enum class Band { Pass, Transition, Stop };

/// First and last transition-band bins (k1, k2) for a bandwidth bin.
/// Throws std::out_of_range outside the design range.
std::pair<int, int> transition_edges(const DiscretizedSpec& disc, int b_bin);

/// Length-N filter DFT coefficients H(k) = H_R(k) exp(-j 2 pi k D1 / N) for one
/// bandwidth bin. The magnitude samples are stored; the complex coefficients
/// are formed on demand from a linear-phase table shared by every set built
/// for the same geometry.
class DftCoefficientSet {
 public:
  int n_fft() const { return static_cast<int>(magnitude_.size()); }
  int b_bin() const { return b_bin_; }
  int k1() const { return k1_; }
  int k2() const { return k2_; }
  int delay() const { return delay_; }

  std::span<const double> magnitude() const { return magnitude_; }
  std::complex<double> coefficient(std::size_t k) const { return magnitude_[k] * (*phase_)[k]; }
  std::vector<std::complex<double>> complex_coeffs() const;
  std::span<const std::complex<double>> phase_table() const { return *phase_; }

  Band band(int k) const;
  std::vector<int> indices(Band which) const;

  /// Throws std::logic_error if mirror symmetry, band layout or the zero
  /// Nyquist sample is broken.
  void check_invariants() const;

  friend DftCoefficientSet build_coefficients(const DiscretizedSpec&, const TransitionCoeffs&, int);
  friend DftCoefficientSet retune(const DftCoefficientSet&, const DiscretizedSpec&, int,
                                  const TransitionCoeffs&);

 private:
  std::vector<double> magnitude_;
  std::shared_ptr<const std::vector<std::complex<double>>> phase_;
  int b_bin_ = 0;
  int k1_ = 0;
  int k2_ = 0;
  int delay_ = 0;
};

/// Ones up to k1-1, V(k - k1) on [k1, k2], zeros above, mirrored so that
/// H_R(N - k) = H_R(k).
DftCoefficientSet build_coefficients(const DiscretizedSpec& disc, const TransitionCoeffs& v,
                                     int b_bin);

/// Moves an existing set to another bandwidth bin. Only the bins between
/// the old and new transition bands are rewritten, by plain copies of 1, 0
/// and stored V(r) values; no arithmetic on coefficient values.
DftCoefficientSet retune(const DftCoefficientSet& coeffs, const DiscretizedSpec& disc,
                         int new_b_bin, const TransitionCoeffs& v);

}  // namespace vbw
