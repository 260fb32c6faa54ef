#pragma once

#include <optional>

#include "vbw/lptv.hpp"
#include "vbw/ls_design.hpp"
#include "vbw/spec.hpp"

namespace vbw {

struct DesignOptions {
  PhaseLimitMode mode = PhaseLimitMode::BlockAdvance;
  /// Run one reweighting pass with weights derived from the unweighted
  /// design's stopband-energy profile.
  bool weighted = false;
  int grid_points_per_pi = 0;  ///< metric grid, 0 = 16 N
};

struct DesignResult {
  LsSystem system;  ///< the system that produced `coeffs`
  TransitionCoeffs coeffs;
  std::optional<DesignWeights> weights;
  /// Unweighted solution when a reweighting pass ran.
  std::optional<TransitionCoeffs> unweighted_coeffs;
};

/// Assembles and solves the normal equations, optionally followed by one
/// weighted pass.
DesignResult design(const DiscretizedSpec& disc, const DesignOptions& options = {});

}  // namespace vbw
