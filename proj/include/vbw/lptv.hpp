#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "vbw/coefficients.hpp"
#include "vbw/ls_design.hpp"
#include "vbw/spec.hpp"

namespace vbw {

/// d_{M-1}(q) = IDFT of H(k). Throws InputError if H is not conjugate
/// symmetric to 1e-9, std::logic_error if the imaginary residue of the
/// inverse transform exceeds 1e-12.
std::vector<double> base_response(const DftCoefficientSet& coeffs);
std::vector<double> base_response(std::span<const std::complex<double>> spectrum);

/// The M time-invariant impulse responses of the overlap-save system. Every
/// phase n is a circular shift of d_{M-1}:
///   d_n(q) = d_{M-1}((q + n - M + 1) mod N),  h_n(q) = d_n(q - n).
class PtvirSet {
 public:
  PtvirSet(std::vector<double> d_base, int block_advance, int b_bin = 0);

  int n_fft() const { return static_cast<int>(d_base_.size()); }
  int block_advance() const { return block_advance_; }
  int b_bin() const { return b_bin_; }
  std::span<const double> d_base() const { return d_base_; }

  /// d_n(q), q = 0..N-1. Throws std::out_of_range unless 0 <= n < M.
  std::vector<double> phase_response(int n) const;

  /// Length N + M - 1 causal response: zero for q < n and q >= n + N,
  /// d_{M-1}((q - M + 1) mod N) in between.
  std::vector<double> impulse_response(int n) const;

  /// Unlike phase_response, accepts any integer n (used by the N-phase
  /// variant of the error sum).
  double d(int n, int q) const;

 private:
  std::vector<double> d_base_;
  int block_advance_;
  int b_bin_;
};

PtvirSet make_ptvir(const DftCoefficientSet& coeffs, const DiscretizedSpec& disc);

/// Uniform frequency grid over [from, to] with `points` samples.
std::vector<double> uniform_grid(double from, double to, int points);

/// H_n(w) = exp(-j w n) sum_q d_n(q) exp(-j w q) by direct summation.
std::vector<std::complex<double>> frequency_response(const PtvirSet& set, int n,
                                                     std::span<const double> omega);

/// Same response on the uniform grid w_i = i pi / (points - 1), i = 0..points-1,
/// through a zero-padded FFT of length 2 (points - 1).
std::vector<std::complex<double>> frequency_response_fft(const PtvirSet& set, int n, int points);

/// |H_n(w)|^2 for phases n = 0..phases-1 (columns) on the grid (rows). The
/// phases are generated from one another by a sliding update, O(grid) per
/// phase after the first.
Eigen::MatrixXd phase_power_responses(const PtvirSet& set, int phases,
                                      std::span<const double> omega);

/// Composite trapezoid rule on a (possibly non-uniform) grid.
double trapezoid(std::span<const double> x, std::span<const double> y);

/// Stopband quality of one bandwidth setting across all phases.
struct StopbandMetrics {
  std::vector<double> sbe;  ///< per phase, (1/pi) * integral of |H_n|^2, linear
  double peak_power = 0.0;  ///< max |H_n|^2 over phases and stopband grid
  double sbml_db() const;
  double sbe_mean_db() const;    ///< average of per-phase SBE in dB
  double sbe_energy_db() const;  ///< dB of the average linear SBE
  double sbe_max_db() const;
};

/// Grid density for metrics in points per pi (16 N by default).
int metric_grid_points(const DiscretizedSpec& disc);

/// Stopband [b + delta/2, pi] with b the bin center and delta the truncated
/// width. Throws InputError if the stopband is empty.
StopbandMetrics stopband_metrics(const PtvirSet& set, const DiscretizedSpec& disc,
                                 int grid_points_per_pi = 0);

/// Same with an explicit stopband edge (rad).
StopbandMetrics stopband_metrics_from(const PtvirSet& set, double stopband_edge,
                                      int grid_points_per_pi);

struct BinMetrics {
  int b_bin = 0;
  double b_rad = 0.0;
  StopbandMetrics stopband;
};

/// Metrics over a set of bandwidth settings. The averaged SBE is the mean of
/// per-response SBE values in dB over every (n, b).
struct RangeMetrics {
  std::vector<BinMetrics> per_setting;
  double sbml_db = 0.0;
  double sbe_mean_db = 0.0;
  double sbe_energy_db = 0.0;
  double sbe_max_db = 0.0;
};

/// Evaluates every bin in [b_bins_lower, b_bins_upper] against the
/// discretized spec.
RangeMetrics evaluate_bins(const DiscretizedSpec& disc, const TransitionCoeffs& v,
                           int grid_points_per_pi = 0);

/// Evaluates `samples` bandwidths spread uniformly over [b_lower, b_upper]
/// against a continuous spec with transition width `delta`. Each b is
/// realized by its rounded bin; the stopband starts at b + delta / 2.
RangeMetrics evaluate_continuous(const DiscretizedSpec& disc, const TransitionCoeffs& v,
                                 double b_lower, double b_upper, double delta, int samples,
                                 int grid_points_per_pi = 0);

/// Linear SBE per (phase, bin): M x bin_count.
Eigen::MatrixXd sbe_profile(const DiscretizedSpec& disc, const TransitionCoeffs& v,
                            int grid_points_per_pi = 0);

/// E(v) summed over bins and phases of (1/pi) * integral over
/// [0, b - delta/2] u [b + delta/2, pi] of |H_n - H_D2|^2, by the trapezoid
/// rule with `grid_points_per_pi` points per pi (64 N by default).
/// H_D2 = exp(-j w D2) on the passband and 0 on the stopband.
double numeric_error_energy(const TransitionCoeffs& v, const DiscretizedSpec& disc,
                            PhaseLimitMode mode = PhaseLimitMode::BlockAdvance,
                            int grid_points_per_pi = 0,
                            const DesignWeights* weights = nullptr);

}  // namespace vbw
