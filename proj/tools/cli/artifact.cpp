#include "artifact.hpp"

#include <cmath>

#include "vbw/complexity.hpp"
#include "vbw/errors.hpp"
#include "vbw/numeric.hpp"

namespace vbwcli {

using vbw::Json;

std::string spec_hash(const vbw::FilterSpec& spec, const vbw::DiscretizedSpec& disc) {
  return vbw::fingerprint(vbw::spec_to_json(spec).dump() + vbw::disc_to_json(disc).dump());
}

int sweep_samples(const vbw::FilterSpec& spec) {
  const double span = (spec.b_upper - spec.b_lower) / vbw::kPi;
  return static_cast<int>(std::lround(span / kSweepStepOverPi)) + 1;
}

Json range_json(const vbw::RangeMetrics& m, bool continuous) {
  Json rows = Json::array();
  for (const auto& s : m.per_setting) {
    Json r = {{"b_bin", s.b_bin},
              {"sbml_db", s.stopband.sbml_db()},
              {"sbe_mean_db", s.stopband.sbe_mean_db()},
              {"sbe_energy_db", s.stopband.sbe_energy_db()},
              {"sbe_max_db", s.stopband.sbe_max_db()}};
    if (continuous) r["b_over_pi"] = s.b_rad / vbw::kPi;
    rows.push_back(std::move(r));
  }
  return {{"aggregate",
           {{"sbml_db", m.sbml_db},
            {"sbe_mean_db", m.sbe_mean_db},
            {"sbe_energy_db", m.sbe_energy_db},
            {"sbe_max_db", m.sbe_max_db}}},
          {continuous ? "per_sample" : "per_bin", std::move(rows)}};
}

Json metrics_json(const vbw::FilterSpec& spec, const vbw::DiscretizedSpec& disc,
                  const vbw::TransitionCoeffs& v) {
  Json out;
  out["discretized"] = range_json(vbw::evaluate_bins(disc, v), false);
  const int samples = sweep_samples(spec);
  Json specified =
      range_json(vbw::evaluate_continuous(disc, v, spec.b_lower, spec.b_upper, spec.delta, samples),
                 true);
  specified["samples"] = samples;
  specified["delta_over_pi"] = spec.delta / vbw::kPi;
  out["specified"] = std::move(specified);
  out["grid_points_per_pi"] = vbw::metric_grid_points(disc);
  return out;
}

Json complexity_json(const vbw::DiscretizedSpec& disc) {
  const auto r = vbw::rates(disc.n_fft, disc.filter_length, disc.k_transition_count);
  return {{"c_mf_f", r.fft.multiplications},
          {"c_a_f", r.fft.additions},
          {"r_mf", r.r_mf()},
          {"r_mv", r.r_mv()},
          {"r_a", r.r_a()},
          {"r_mf_numerator", r.r_mf_numerator},
          {"r_mv_numerator", r.r_mv_numerator},
          {"r_a_numerator", r.r_a_numerator},
          {"memory_words", r.memory_words},
          {"reconfig_mults_per_sample", r.reconfig_mults_per_sample}};
}

Json to_json(const DesignArtifact& a) {
  Json j;
  j["format"] = "vbw-design/1";
  j["spec"] = vbw::spec_to_json(a.spec);
  j["disc"] = vbw::disc_to_json(a.disc);
  j["phase_limit_mode"] = std::string(vbw::to_string(a.mode));
  j["coefficients"] = vbw::coeffs_to_json(a.coeffs, a.disc);
  j["weights_used"] = a.weights_fingerprint ? Json(*a.weights_fingerprint) : Json(nullptr);
  j["metrics"] = a.metrics;
  j["complexity"] = a.complexity;
  j["provenance"] = {{"tool_version", a.tool_version},
                     {"created", a.created},
                     {"spec_hash", a.spec_hash}};
  return j;
}

DesignArtifact artifact_from_json(const Json& j) {
  if (!j.is_object() || j.value("format", "") != "vbw-design/1") {
    throw vbw::InputError("not a design artifact (missing format vbw-design/1)");
  }
  for (const char* key : {"spec", "disc", "coefficients", "provenance"}) {
    if (!j.contains(key)) throw vbw::InputError(std::string("artifact lacks '") + key + "'");
  }
  DesignArtifact a;
  a.spec = vbw::spec_from_json(j.at("spec"));
  a.disc = vbw::disc_from_json(j.at("disc"));
  a.mode = vbw::parse_phase_limit_mode(j.value("phase_limit_mode", "block_advance"));
  const auto& prov = j.at("provenance");
  a.tool_version = prov.value("tool_version", "");
  a.created = prov.value("created", "");
  a.spec_hash = prov.value("spec_hash", "");
  if (a.spec_hash != spec_hash(a.spec, a.disc)) {
    throw vbw::InputError("artifact spec hash " + a.spec_hash +
                          " does not match its spec and discretization (" +
                          spec_hash(a.spec, a.disc) + ")");
  }
  a.coeffs = vbw::coeffs_from_json(j.at("coefficients"), a.disc);
  if (j.contains("weights_used") && j.at("weights_used").is_string()) {
    a.weights_fingerprint = j.at("weights_used").get<std::string>();
  }
  a.metrics = j.value("metrics", Json::object());
  a.complexity = j.value("complexity", Json::object());
  return a;
}

std::string weights_fingerprint(const vbw::DesignWeights& w) {
  std::string bytes;
  bytes.reserve(static_cast<std::size_t>(w.w.size()) * 8 + 16);
  bytes += std::to_string(w.w.rows()) + "x" + std::to_string(w.w.cols()) + ":";
  for (Eigen::Index i = 0; i < w.w.size(); ++i) {
    const double x = w.w.data()[i];
    bytes.append(reinterpret_cast<const char*>(&x), sizeof x);
  }
  return vbw::fingerprint(bytes);
}

}  // namespace vbwcli
