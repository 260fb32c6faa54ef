#pragma once

#include <string>
#include <string_view>

#include <Eigen/Core>

#include "vbw/coefficients.hpp"
#include "vbw/spec.hpp"

namespace vbw {

/// Upper limit of the phase sum in the normal equations.
enum class PhaseLimitMode {
  BlockAdvance,  ///< n = 0..M-1, one term per output phase of the LPTV system
  FftLength,     ///< n = 0..N-1
};

int phase_count(const DiscretizedSpec& disc, PhaseLimitMode mode);
std::string_view to_string(PhaseLimitMode mode);
/// Accepts "block_advance" / "fft_length". Throws InputError otherwise.
PhaseLimitMode parse_phase_limit_mode(std::string_view text);

/// cos(2 pi k (D2 - (q + n)) / N).
double kernel_f(int k, int q, int n, const DiscretizedSpec& disc);

/// (1/pi) times the integral of cos(w (q - p)) over the passband and
/// stopband [0, b - delta/2] u [b + delta/2, pi].
double kernel_i1(int q, int p, double b_rad, double delta_rad);

/// Off-diagonal branch of kernel_i1 at a real offset m = q - p; used to check
/// continuity towards the diagonal.
double kernel_i1_offdiagonal(double m, double b_rad, double delta_rad);

/// (1/pi) times the integral of cos(w (D2 - (p + n))) over [0, b - delta/2].
double kernel_i2(int p, int n, double b_rad, double delta_rad, const DiscretizedSpec& disc);

/// Normal equations E(v) = v'Qv + 2v'c + c0 of the transition-band design.
/// The constant c0 is not formed.
struct LsSystem {
  Eigen::MatrixXd q_matrix;
  Eigen::VectorXd c_vector;
  DiscretizedSpec disc;
  /// Largest |Q - Q'| relative to max |Q| before symmetrization.
  double asymmetry = 0.0;
};

/// Per-(phase, bin) weights: rows are phases n, columns are bins
/// b_bins_lower..b_bins_upper.
struct DesignWeights {
  Eigen::MatrixXd w;

  static DesignWeights uniform(Eigen::Index phases, Eigen::Index bins) {
    return {Eigen::MatrixXd::Ones(phases, bins)};
  }
};

LsSystem assemble(const DiscretizedSpec& disc, PhaseLimitMode mode = PhaseLimitMode::BlockAdvance);

/// Each (n, b) term of the error sum is scaled by w(n, b)^2. The weight
/// matrix must be phase_count(disc, mode) x disc.bin_count() with strictly
/// positive entries (std::domain_error otherwise).
LsSystem assemble_weighted(const DiscretizedSpec& disc, const DesignWeights& weights,
                           PhaseLimitMode mode = PhaseLimitMode::BlockAdvance);

/// v = -Q^{-1} c by Cholesky. Throws NumericalError (with a condition number
/// estimate) if Q is not positive definite or the residual check fails.
TransitionCoeffs solve(const LsSystem& sys);

/// Relative residual |Qv + c| / |c| (absolute when c = 0).
double residual(const LsSystem& sys, const TransitionCoeffs& v);

/// w(n, b) = sqrt(SBE(n, b) / min SBE). Throws std::domain_error on
/// non-positive or non-finite energies.
DesignWeights derive_weights(const Eigen::MatrixXd& sbe_profile);

}  // namespace vbw
