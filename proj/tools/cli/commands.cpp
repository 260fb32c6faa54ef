#include "commands.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "artifact.hpp"
#include "vbw/complexity.hpp"
#include "vbw/errors.hpp"
#include "vbw/numeric.hpp"
#include "vbw/ols_engine.hpp"
#include "vbw/pipeline.hpp"

namespace vbwcli {
namespace {

using vbw::Json;

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw vbw::InputError("cannot open " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Json read_json(const std::string& path) { return vbw::parse_json_text(read_text(path), path); }

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw vbw::InputError("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fixed(double x, int digits = 2) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << x;
  return s.str();
}

vbw::DiscretizedSpec discretize_with(const vbw::FilterSpec& spec, int fft_length) {
  if (fft_length <= 0) return vbw::discretize(spec);
  return vbw::discretize(spec, vbw::estimate_filter_length(spec), fft_length);
}

// ---------------------------------------------------------------- discretize

struct DiscretizeArgs {
  std::string spec_path;
  int fft_length = 0;
  std::string out;
};

int cmd_discretize(const DiscretizeArgs& a, std::ostream& out) {
  const auto spec = vbw::spec_from_json(read_json(a.spec_path));
  const auto disc = discretize_with(spec, a.fft_length);
  write_text(a.out, vbw::disc_to_json(disc).dump(2) + "\n", out);
  return kExitOk;
}

// -------------------------------------------------------------------- design

struct DesignArgs {
  std::string spec_path;
  bool weighted = false;
  std::string mode = "block_advance";
  int fft_length = 0;
  std::string out;
  std::string dump_system;
};

int cmd_design(const DesignArgs& a, std::ostream& out, std::ostream& err) {
  DesignArtifact art;
  art.spec = vbw::spec_from_json(read_json(a.spec_path));
  art.disc = discretize_with(art.spec, a.fft_length);
  art.mode = vbw::parse_phase_limit_mode(a.mode);

  vbw::DesignOptions opt;
  opt.mode = art.mode;
  opt.weighted = a.weighted;
  const auto result = vbw::design(art.disc, opt);
  art.coeffs = result.coeffs;
  if (result.weights) art.weights_fingerprint = weights_fingerprint(*result.weights);
  art.metrics = metrics_json(art.spec, art.disc, art.coeffs);
  art.complexity = complexity_json(art.disc);
  art.tool_version = VBW_VERSION;
  art.created = utc_now();
  art.spec_hash = spec_hash(art.spec, art.disc);

  if (!a.dump_system.empty()) {
    std::ofstream f(a.dump_system, std::ios::binary);
    if (!f) throw vbw::InputError("cannot write " + a.dump_system);
    vbw::write_system_dump(f, result.system);
  }
  write_text(a.out, to_json(art).dump(2) + "\n", out);

  const auto& agg = art.metrics["discretized"]["aggregate"];
  err << "design: N=" << art.disc.n_fft << " L=" << art.disc.filter_length
      << " M=" << art.disc.block_advance << " K=" << art.disc.k_transition_count << " bins "
      << art.disc.b_bins_lower << ".." << art.disc.b_bins_upper
      << (a.weighted ? " (weighted)" : "") << ", SBML " << fixed(agg["sbml_db"].get<double>())
      << " dB, SBE " << fixed(agg["sbe_mean_db"].get<double>()) << " dB\n";
  return kExitOk;
}

// ------------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string artifact_path;
  std::optional<double> b_rad;
  std::optional<double> b_over_pi;
  bool all = false;
  std::string grid_csv;
  int grid_points = 0;
  std::string sbe_csv;
  bool check = false;
  std::string out;
};

bool close_rel(double a, double b, double tol) {
  if (a == b) return true;
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

// Compares every number in `got` against `want` (same structure).
bool numbers_match(const Json& got, const Json& want, double tol, std::string& where,
                   const std::string& path = "") {
  if (got.is_number() && want.is_number()) {
    if (close_rel(got.get<double>(), want.get<double>(), tol)) return true;
    where = path;
    return false;
  }
  if (got.type() != want.type() || got.size() != want.size()) {
    where = path;
    return false;
  }
  if (got.is_object()) {
    for (auto it = want.begin(); it != want.end(); ++it) {
      if (!got.contains(it.key())) {
        where = path + "/" + it.key();
        return false;
      }
      if (!numbers_match(got.at(it.key()), it.value(), tol, where, path + "/" + it.key())) return false;
    }
    return true;
  }
  if (got.is_array()) {
    for (std::size_t i = 0; i < got.size(); ++i)
      if (!numbers_match(got[i], want[i], tol, where, path + "/" + std::to_string(i))) return false;
    return true;
  }
  if (got != want) {
    where = path;
    return false;
  }
  return true;
}

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  const auto art = artifact_from_json(read_json(a.artifact_path));
  const auto& disc = art.disc;

  std::vector<int> bins;
  const bool single = a.b_rad.has_value() || a.b_over_pi.has_value();
  if (single) {
    const double b = a.b_rad ? *a.b_rad : *a.b_over_pi * vbw::kPi;
    const auto mapped = vbw::bandwidth_to_bin(b, disc);
    if (mapped.clamped) {
      err << "warning: b = " << b / vbw::kPi << " pi lies outside the design range; using bin "
          << mapped.bin << "\n";
    }
    bins.push_back(mapped.bin);
  } else {
    for (int b = disc.b_bins_lower; b <= disc.b_bins_upper; ++b) bins.push_back(b);
  }

  Json result;
  result["b_bins"] = bins;
  Json recomputed;
  if (single) {
    const auto set = vbw::make_ptvir(vbw::build_coefficients(disc, art.coeffs, bins[0]), disc);
    vbw::RangeMetrics m;
    m.per_setting.push_back({bins[0], disc.bin_to_rad(bins[0]), vbw::stopband_metrics(set, disc)});
    const auto& s = m.per_setting[0].stopband;
    m.sbml_db = s.sbml_db();
    m.sbe_mean_db = s.sbe_mean_db();
    m.sbe_energy_db = s.sbe_energy_db();
    m.sbe_max_db = s.sbe_max_db();
    result["discretized"] = range_json(m, false);
  } else {
    recomputed = metrics_json(art.spec, disc, art.coeffs);
    result["discretized"] = recomputed["discretized"];
    result["specified"] = recomputed["specified"];
  }

  if (!a.sbe_csv.empty()) {
    std::ostringstream csv;
    csv << "n,b_bin,sbe_linear,sbe_db\n";
    csv.precision(17);
    for (int bin : bins) {
      const auto set = vbw::make_ptvir(vbw::build_coefficients(disc, art.coeffs, bin), disc);
      const auto m = vbw::stopband_metrics(set, disc);
      for (std::size_t n = 0; n < m.sbe.size(); ++n)
        csv << n << ',' << bin << ',' << m.sbe[n] << ',' << vbw::power_db(m.sbe[n]) << '\n';
    }
    write_text(a.sbe_csv, csv.str(), out);
  }

  if (!a.grid_csv.empty()) {
    const int per_pi = a.grid_points > 0 ? a.grid_points : vbw::metric_grid_points(disc);
    const auto grid = vbw::uniform_grid(0.0, vbw::kPi, per_pi + 1);
    std::ostringstream csv;
    csv << "omega_over_pi,n,b_bin,magnitude_db\n";
    csv.precision(12);
    for (int bin : bins) {
      const auto set = vbw::make_ptvir(vbw::build_coefficients(disc, art.coeffs, bin), disc);
      const auto power = vbw::phase_power_responses(set, disc.block_advance, grid);
      for (int n = 0; n < disc.block_advance; ++n)
        for (std::size_t i = 0; i < grid.size(); ++i)
          csv << grid[i] / vbw::kPi << ',' << n << ',' << bin << ','
              << vbw::power_db(power(static_cast<Eigen::Index>(i), n)) << '\n';
    }
    write_text(a.grid_csv, csv.str(), out);
  }

  int code = kExitOk;
  if (a.check) {
    if (single) throw vbw::InputError("--check compares the full range; drop --b");
    if (!art.metrics.contains("discretized")) throw vbw::InputError("artifact carries no metrics");
    std::string where;
    Json embedded = {{"discretized", art.metrics["discretized"]},
                     {"specified", art.metrics["specified"]}};
    Json fresh = {{"discretized", recomputed["discretized"]},
                  {"specified", recomputed["specified"]}};
    if (numbers_match(fresh, embedded, 1e-12, where)) {
      err << "check: recomputed metrics match the artifact\n";
      result["check"] = "pass";
    } else {
      err << "check: recomputed metrics differ from the artifact at " << where << "\n";
      result["check"] = "fail";
      code = kExitNumerical;
    }
  }

  const bool csv_to_stdout = a.grid_csv == "-" || a.sbe_csv == "-";
  if (!a.out.empty() || !csv_to_stdout) write_text(a.out, result.dump(2) + "\n", out);
  return code;
}

// -------------------------------------------------------------------- filter

struct FilterArgs {
  std::string artifact_path;
  std::string in = "-";
  std::string out = "-";
  std::string retune;
  std::string mode = "symmetric";
  std::optional<double> b_rad;
  std::optional<double> b_over_pi;
  std::string tail = "block";
};

struct ScheduledRetune {
  std::uint64_t sample_index = 0;
  double b_over_pi = 0.0;
  int line = 0;
};

std::vector<ScheduledRetune> read_schedule(const std::string& path, int block_advance) {
  std::istringstream text(read_text(path));
  std::vector<ScheduledRetune> out;
  std::string line;
  int number = 0;
  auto fail = [&](const std::string& what) {
    throw vbw::InputError(path + ":" + std::to_string(number) + ": " + what + " (\"" + line + "\")");
  };
  while (std::getline(text, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) fail("expected sample_index,b_over_pi");
    const std::string idx = line.substr(0, comma), val = line.substr(comma + 1);
    if (out.empty() && idx.find("sample_index") != std::string::npos) continue;  // header
    ScheduledRetune r;
    r.line = number;
    try {
      std::size_t used = 0;
      const long long i = std::stoll(idx, &used);
      if (idx.find_first_not_of(" \t", used) != std::string::npos || i < 0) fail("bad sample index");
      r.sample_index = static_cast<std::uint64_t>(i);
      r.b_over_pi = std::stod(val, &used);
      if (val.find_first_not_of(" \t", used) != std::string::npos) fail("bad bandwidth value");
    } catch (const std::logic_error&) {
      fail("not a number");
    }
    if (r.sample_index % static_cast<std::uint64_t>(block_advance) != 0) {
      fail("retune at sample " + std::to_string(r.sample_index) +
           " is not on a block boundary (multiple of M = " + std::to_string(block_advance) + ")");
    }
    if (!out.empty() && r.sample_index < out.back().sample_index) fail("sample indices must not decrease");
    out.push_back(r);
  }
  return out;
}

int cmd_filter(const FilterArgs& a, std::istream& in_default, std::ostream& out_default,
               std::ostream& err) {
  const auto art = artifact_from_json(read_json(a.artifact_path));
  const auto& disc = art.disc;
  const auto mode = vbw::parse_ols_mode(a.mode);
  const auto tail = vbw::parse_tail_policy(a.tail);
  const auto schedule = a.retune.empty() ? std::vector<ScheduledRetune>{}
                                         : read_schedule(a.retune, disc.block_advance);

  int initial = disc.b_bins_lower;
  if (a.b_rad || a.b_over_pi) {
    const double b = a.b_rad ? *a.b_rad : *a.b_over_pi * vbw::kPi;
    const auto m = vbw::bandwidth_to_bin(b, disc);
    if (m.clamped) err << "warning: initial b clamped to bin " << m.bin << "\n";
    initial = m.bin;
  }

  std::ifstream in_file;
  std::istream* in = &in_default;
  if (a.in != "-") {
    in_file.open(a.in, std::ios::binary);
    if (!in_file) throw vbw::InputError("cannot open " + a.in);
    in = &in_file;
  }
  std::ofstream out_file;
  std::ostream* out = &out_default;
  if (a.out != "-") {
    out_file.open(a.out, std::ios::binary);
    if (!out_file) throw vbw::InputError("cannot write " + a.out);
    out = &out_file;
  }

  vbw::StreamFilter filter(vbw::OlsEngine(disc, art.coeffs, initial, mode));
  std::size_t next = 0;
  auto apply_due = [&] {
    while (next < schedule.size() && schedule[next].sample_index == filter.position()) {
      const auto ack = filter.engine().set_bandwidth(schedule[next].b_over_pi * vbw::kPi);
      if (ack.clamped) {
        err << "warning: " << a.retune << ":" << schedule[next].line << ": b clamped to bin "
            << ack.applied_bin << "\n";
      }
      ++next;
    }
  };

  constexpr std::size_t kChunk = 1 << 15;
  std::vector<char> raw(kChunk * 8);
  std::vector<double> samples;
  for (;;) {
    in->read(raw.data(), static_cast<std::streamsize>(raw.size()));
    const auto got = static_cast<std::size_t>(in->gcount());
    if (got % 8 != 0 && in->eof()) throw vbw::InputError("input length is not a multiple of 8 bytes");
    std::istringstream chunk(std::string(raw.data(), got));
    samples = vbw::read_f64le(chunk);
    std::size_t pos = 0;
    while (pos < samples.size()) {
      apply_due();
      std::size_t take = samples.size() - pos;
      if (next < schedule.size()) {
        const auto until = schedule[next].sample_index - filter.position();
        take = std::min<std::size_t>(take, static_cast<std::size_t>(until));
      }
      const auto y = filter.write(std::span<const double>(samples.data() + pos, take));
      vbw::write_f64le(*out, y);
      pos += take;
    }
    if (got < raw.size()) break;
  }
  apply_due();
  vbw::write_f64le(*out, filter.finish(tail));
  out->flush();
  if (!*out) throw std::runtime_error("failed writing the output stream");

  const auto& c = filter.engine().counters();
  err << "filter: " << filter.samples_in() << " samples in, " << filter.samples_out()
      << " out, " << c.blocks << " blocks of M=" << disc.block_advance << ", " << c.retunes
      << " retunes";
  if (next < schedule.size()) err << " (" << schedule.size() - next << " beyond the input ignored)";
  err << ", mode " << vbw::to_string(mode) << ", tail " << vbw::to_string(tail)
      << "; output aligned to input with group delay D1=" << disc.delay_design
      << ", worst-case latency D2=" << disc.delay_system << " samples; "
      << c.general_multiplications << " general multiplications\n";
  return kExitOk;
}

// -------------------------------------------------------------------- report

struct ReportArgs {
  std::vector<std::string> artifacts;
  std::string format = "md";
  std::string baselines = "table2";
  std::string metrics = "auto";
  std::string out;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  std::vector<vbw::ComparisonRow> rows;
  if (a.baselines == "table2") rows = vbw::published_baselines(2);
  if (a.baselines == "table3") rows = vbw::published_baselines(3);
  for (const auto& path : a.artifacts) {
    const auto art = artifact_from_json(read_json(path));
    std::string which = a.metrics;
    if (which == "auto") {
      which = art.disc.delta_truncated < art.spec.delta - 1e-12 ? "specified" : "discretized";
    }
    std::optional<double> sbml, sbe;
    if (art.metrics.contains(which)) {
      const auto& agg = art.metrics[which]["aggregate"];
      sbml = agg["sbml_db"].get<double>();
      sbe = agg["sbe_mean_db"].get<double>();
    }
    std::string label = "Proposed";
    if (a.artifacts.size() > 1) label += " (" + std::filesystem::path(path).stem().string() + ")";
    if (art.weights_fingerprint) label += " weighted";
    rows.push_back(vbw::make_row(
        label, vbw::rates(art.disc.n_fft, art.disc.filter_length, art.disc.k_transition_count),
        sbml, sbe));
  }
  const auto format = a.format == "csv" ? vbw::TableFormat::Csv : vbw::TableFormat::Markdown;
  write_text(a.out, vbw::comparison_table(rows, format), out);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Variable-bandwidth fast-convolution FIR design and overlap-save filtering"};
  app.set_version_flag("--version", std::string(VBW_VERSION));
  app.require_subcommand(1);

  DiscretizeArgs disc_args;
  auto* disc_cmd = app.add_subcommand("discretize", "Turn a filter spec into bin-domain parameters");
  disc_cmd->add_option("spec", disc_args.spec_path, "Filter spec JSON")->required();
  disc_cmd->add_option("--fft-length", disc_args.fft_length, "Use this N instead of the estimate");
  disc_cmd->add_option("-o,--out", disc_args.out, "Output file (default stdout)");

  DesignArgs design_args;
  auto* design_cmd = app.add_subcommand("design", "Design the transition-band coefficients");
  design_cmd->add_option("spec", design_args.spec_path, "Filter spec JSON")->required();
  design_cmd->add_flag("--weighted", design_args.weighted,
                       "Add one reweighting pass driven by the stopband-energy profile");
  design_cmd->add_option("--phase-limit-mode", design_args.mode, "Phase sum limit")
      ->check(CLI::IsMember({"block_advance", "fft_length"}));
  design_cmd->add_option("--fft-length", design_args.fft_length, "Use this N instead of the estimate");
  design_cmd->add_option("-o,--out", design_args.out, "Artifact JSON (default stdout)");
  design_cmd->add_option("--dump-system", design_args.dump_system,
                         "Write the normal equations as little-endian float64");

  AnalyzeArgs an;
  auto* analyze_cmd = app.add_subcommand("analyze", "Recompute metrics and response grids");
  analyze_cmd->add_option("artifact", an.artifact_path, "Design artifact JSON")->required();
  auto* b_opt = analyze_cmd->add_option("--b", an.b_rad, "Single bandwidth in radians");
  auto* bpi_opt = analyze_cmd->add_option("--b-over-pi", an.b_over_pi, "Single bandwidth in units of pi");
  auto* all_opt = analyze_cmd->add_flag("--all", an.all, "Every design bin (default)");
  b_opt->excludes(bpi_opt)->excludes(all_opt);
  bpi_opt->excludes(all_opt);
  analyze_cmd->add_option("--grid-csv", an.grid_csv, "Response grid CSV");
  analyze_cmd->add_option("--grid-points", an.grid_points, "Grid points per pi (default 16 N)");
  analyze_cmd->add_option("--sbe-csv", an.sbe_csv, "Per-(n, b) stopband energy CSV");
  analyze_cmd->add_flag("--check", an.check, "Compare with the metrics stored in the artifact");
  analyze_cmd->add_option("-o,--out", an.out, "Metrics JSON (default stdout)");

  FilterArgs fa;
  auto* filter_cmd = app.add_subcommand("filter", "Run the overlap-save engine on a float64 stream");
  filter_cmd->add_option("artifact", fa.artifact_path, "Design artifact JSON")->required();
  filter_cmd->add_option("--in", fa.in, "Raw little-endian float64 input, - for stdin");
  filter_cmd->add_option("--out", fa.out, "Raw little-endian float64 output, - for stdout");
  filter_cmd->add_option("--retune", fa.retune, "CSV schedule: sample_index,b_over_pi");
  filter_cmd->add_option("--mode", fa.mode, "Realization")
      ->check(CLI::IsMember({"symmetric", "conventional"}));
  auto* fb = filter_cmd->add_option("--b", fa.b_rad, "Initial bandwidth in radians");
  filter_cmd->add_option("--b-over-pi", fa.b_over_pi, "Initial bandwidth in units of pi")->excludes(fb);
  filter_cmd->add_option("--tail", fa.tail, "Samples appended after the input")
      ->check(CLI::IsMember({"none", "block", "full"}));

  ReportArgs ra;
  auto* report_cmd = app.add_subcommand("report", "Complexity and error comparison table");
  report_cmd->add_option("artifacts", ra.artifacts, "Design artifacts")->required();
  report_cmd->add_option("--format", ra.format, "Markdown (default) or CSV")->check(CLI::IsMember({"md", "csv"}));
  report_cmd->add_option("--baselines", ra.baselines, "Published rows to include")
      ->check(CLI::IsMember({"table2", "table3", "none"}));
  report_cmd->add_option("--metrics", ra.metrics,
                         "Error columns from the design bins or the specified range")
      ->check(CLI::IsMember({"auto", "discretized", "specified"}));
  report_cmd->add_option("-o,--out", ra.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*disc_cmd) return cmd_discretize(disc_args, out);
    if (*design_cmd) return cmd_design(design_args, out, err);
    if (*analyze_cmd) return cmd_analyze(an, out, err);
    if (*filter_cmd) return cmd_filter(fa, in, out, err);
    if (*report_cmd) return cmd_report(ra, out);
  } catch (const vbw::NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Json::exception& e) {
    err << "error: malformed document: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitInput;
}

}  // namespace vbwcli
