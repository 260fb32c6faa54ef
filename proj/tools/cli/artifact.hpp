#pragma once

#include <optional>
#include <string>

#include "vbw/ls_design.hpp"
#include "vbw/lptv.hpp"
#include "vbw/serialization.hpp"
#include "vbw/spec.hpp"

namespace vbwcli {

/// Step between continuous bandwidth samples in the "specified" metrics.
inline constexpr double kSweepStepOverPi = 1e-3;

struct DesignArtifact {
  vbw::FilterSpec spec;
  vbw::DiscretizedSpec disc;
  vbw::PhaseLimitMode mode = vbw::PhaseLimitMode::BlockAdvance;
  vbw::TransitionCoeffs coeffs;
  std::optional<std::string> weights_fingerprint;
  vbw::Json metrics;
  vbw::Json complexity;
  std::string tool_version;
  std::string created;  ///< ISO 8601, excluded from every hash
  std::string spec_hash;
};

/// Hash of the spec and discretization that the artifact was designed for.
std::string spec_hash(const vbw::FilterSpec& spec, const vbw::DiscretizedSpec& disc);

/// Number of bandwidth samples for the continuous sweep over [b_lower, b_upper].
int sweep_samples(const vbw::FilterSpec& spec);

/// {aggregate, per_bin[]} over the design bins, and the same over a
/// continuous bandwidth sweep against the spec's own transition width.
vbw::Json metrics_json(const vbw::FilterSpec& spec, const vbw::DiscretizedSpec& disc,
                       const vbw::TransitionCoeffs& v);
vbw::Json range_json(const vbw::RangeMetrics& m, bool continuous);

vbw::Json complexity_json(const vbw::DiscretizedSpec& disc);

vbw::Json to_json(const DesignArtifact& a);

/// Throws vbw::InputError on missing fields, on a spec hash that does not
/// match the embedded spec and discretization, or on coefficients designed
/// for another discretization.
DesignArtifact artifact_from_json(const vbw::Json& j);

std::string weights_fingerprint(const vbw::DesignWeights& w);

}  // namespace vbwcli
