#include "vbw/pipeline.hpp"

#include "vbw/errors.hpp"

namespace vbw {

DesignResult design(const DiscretizedSpec& disc, const DesignOptions& options) {
  DesignResult result;
  result.system = assemble(disc, options.mode);
  result.coeffs = solve(result.system);
  if (!options.weighted) return result;

  if (options.mode != PhaseLimitMode::BlockAdvance) {
    throw InputError("weighted design is defined over the M output phases only");
  }
  const auto profile = sbe_profile(disc, result.coeffs, options.grid_points_per_pi);
  auto weights = derive_weights(profile);
  result.unweighted_coeffs = result.coeffs;
  result.system = assemble_weighted(disc, weights, options.mode);
  result.coeffs = solve(result.system);
  result.weights = std::move(weights);
  return result;
}

}  // namespace vbw
