#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cli/commands.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"
#include "vbw/serialization.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result vbwtool(std::vector<std::string> args, const std::string& stdin_bytes = "") {
  args.insert(args.begin(), "vbwtool");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(stdin_bytes);
  std::ostringstream out, err;
  const int code = vbwcli::run(static_cast<int>(argv.size()), argv.data(), in, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("vbw_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string spec_text(double delta, double lo, double hi) {
  return vbw::Json{{"delta_over_pi", delta},
                   {"b_lower_over_pi", lo},
                   {"b_upper_over_pi", hi},
                   {"length_override", 31}}
      .dump();
}

std::string raw(const std::vector<double>& x) {
  std::ostringstream s;
  vbw::write_f64le(s, x);
  return s.str();
}

std::vector<double> unraw(const std::string& bytes) {
  std::istringstream s(bytes);
  return vbw::read_f64le(s);
}

// Example 1 artifact shared across cases
const std::string& example1_artifact() {
  static const std::string text = [] {
    TempDir t;
    write_file(t / "spec.json", spec_text(0.25, 0.75, 110.0 / 128));
    const auto r = vbwtool({"design", t / "spec.json"});
    REQUIRE(r.code == 0);
    return r.out;
  }();
  return text;
}

}  // namespace

TEST_CASE("design writes a self-contained artifact") {
  const auto j = vbw::Json::parse(example1_artifact());
  CHECK(j["coefficients"]["K"] == 15);
  CHECK(j["coefficients"]["values"].size() == 15);
  CHECK(j["disc"]["block_advance"] == 98);
  const auto& agg = j["metrics"]["discretized"]["aggregate"];
  CHECK(agg["sbe_mean_db"].get<double>() == doctest::Approx(-89.0).epsilon(0.5 / 89));
  CHECK(agg["sbml_db"].get<double>() == doctest::Approx(-56.1).epsilon(0.5 / 56.1));
  CHECK(j["metrics"]["discretized"]["per_bin"].size() == 8);
  CHECK(j["complexity"]["r_mv_numerator"] == 30);
  CHECK(j["weights_used"].is_null());
  CHECK(j["provenance"]["spec_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
}

TEST_CASE("weighted design lowers the worst stopband energy") {
  TempDir t;
  write_file(t / "spec.json", spec_text(0.25, 0.75, 110.0 / 128));
  const auto r = vbwtool({"design", t / "spec.json", "--weighted", "-o", t / "w.json"});
  REQUIRE(r.code == 0);
  const auto w = vbw::Json::parse(read_file(t / "w.json"));
  const auto u = vbw::Json::parse(example1_artifact());
  CHECK(w["weights_used"].is_string());
  const double before = u["metrics"]["discretized"]["aggregate"]["sbe_max_db"].get<double>();
  const double after = w["metrics"]["discretized"]["aggregate"]["sbe_max_db"].get<double>();
  CHECK(after <= before - 3.0);
}

TEST_CASE("design input errors exit with code 2") {
  TempDir t;
  write_file(t / "bad.json", "{\n \"delta_over_pi\": 0.25,\n ]");
  auto r = vbwtool({"design", t / "bad.json"});
  CHECK(r.code == 2);
  CHECK(r.err.find("bad.json:3:") != std::string::npos);

  write_file(t / "wide.json", spec_text(0.25, 0.75, 0.95));
  r = vbwtool({"design", t / "wide.json"});
  CHECK(r.code == 2);

  CHECK(vbwtool({"design", t / "missing.json"}).code == 2);
  CHECK(vbwtool({"design"}).code == 2);
  CHECK(vbwtool({"design", t / "bad.json", "--phase-limit-mode", "other"}).code == 2);
  CHECK(vbwtool({"bogus"}).code == 2);
  CHECK(vbwtool({"--help"}).code == 0);
}

TEST_CASE("analyze round trip and provenance guard") {
  TempDir t;
  write_file(t / "a.json", example1_artifact());
  auto r = vbwtool({"analyze", t / "a.json", "--check"});
  CHECK(r.code == 0);
  CHECK(vbw::Json::parse(r.out)["check"] == "pass");

  auto j = vbw::Json::parse(example1_artifact());
  j["metrics"]["discretized"]["aggregate"]["sbe_mean_db"] = -90.0;
  write_file(t / "edited.json", j.dump());
  CHECK(vbwtool({"analyze", t / "edited.json", "--check"}).code == 1);

  j = vbw::Json::parse(example1_artifact());
  j["spec"]["b_upper_over_pi"] = 0.8;
  write_file(t / "tampered.json", j.dump());
  r = vbwtool({"analyze", t / "tampered.json"});
  CHECK(r.code == 2);
  CHECK(r.err.find("hash") != std::string::npos);
}

TEST_CASE("analyze emits a symmetric SBE matrix") {
  TempDir t;
  write_file(t / "a.json", example1_artifact());
  const auto r = vbwtool({"analyze", t / "a.json", "--all", "--sbe-csv", t / "sbe.csv"});
  REQUIRE(r.code == 0);
  std::istringstream csv(read_file(t / "sbe.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "n,b_bin,sbe_linear,sbe_db");
  std::map<std::pair<int, int>, double> e;
  while (std::getline(csv, line)) {
    int n, b;
    double lin;
    char c;
    std::istringstream f(line);
    f >> n >> c >> b >> c >> lin;
    e[{n, b}] = lin;
  }
  CHECK(e.size() == 98 * 8);
  for (const auto& [key, lin] : e) CHECK(std::abs(lin - e.at({97 - key.first, key.second})) <= 1e-6 * lin);
}

TEST_CASE("analyze at one bandwidth") {
  TempDir t;
  write_file(t / "a.json", example1_artifact());
  auto r = vbwtool({"analyze", t / "a.json", "--b-over-pi", "0.75", "--grid-csv", t / "g.csv",
                    "--grid-points", "32"});
  REQUIRE(r.code == 0);
  CHECK(vbw::Json::parse(r.out)["b_bins"] == vbw::Json::array({48}));
  const auto grid = read_file(t / "g.csv");
  CHECK(std::count(grid.begin(), grid.end(), '\n') == 1 + 98 * 33);
  CHECK(grid.rfind("omega_over_pi,n,b_bin,magnitude_db\n", 0) == 0);

  r = vbwtool({"analyze", t / "a.json", "--b", "0.1"});
  CHECK(r.code == 0);
  CHECK(r.err.find("warning") != std::string::npos);
  CHECK(vbwtool({"analyze", t / "a.json", "--b", "0.1", "--all"}).code == 2);
}

TEST_CASE("filter streams match the oracle under a retune schedule") {
  TempDir t;
  write_file(t / "spec.json", spec_text(0.25, 0.125, 110.0 / 128));
  REQUIRE(vbwtool({"design", t / "spec.json", "-o", t / "a.json"}).code == 0);
  const auto art = vbw::Json::parse(read_file(t / "a.json"));
  const auto d = vbw::disc_from_json(art["disc"]);
  const auto v = art["coefficients"]["values"].get<std::vector<double>>();
  const int m = d.block_advance;

  std::mt19937_64 rng(21);
  const auto x = oracle::random_signal(static_cast<std::size_t>(50 * m), rng);
  std::string schedule = "sample_index,b_over_pi\n";
  std::vector<oracle::Retune> expect;
  int bin = d.b_bins_lower;
  for (int blk = 1; blk < 50; ++blk) {
    bin = d.b_bins_lower + (blk - 1) % d.bin_count();
    schedule += std::to_string(blk * m) + "," + std::to_string(2.0 * bin / d.n_fft) + "\n";
    expect.push_back({static_cast<std::size_t>(blk * m), bin});
  }
  write_file(t / "sched.csv", schedule);
  const auto r = vbwtool({"filter", t / "a.json", "--retune", t / "sched.csv", "--b-over-pi",
                          "0.125", "--tail", "none"},
                         raw(x));
  REQUIRE(r.code == 0);
  const auto y = unraw(r.out);
  REQUIRE(y.size() == x.size());
  const auto want = oracle::lptv_convolve(x, fixtures::geometry(d), v, d.b_bins_lower, expect);
  CHECK(fixtures::max_abs_diff(y, want) <= 1e-9 * fixtures::max_abs(want));
  // the first entry repeats the initial bin
  CHECK(r.err.find("48 retunes") != std::string::npos);
  CHECK(r.err.find("D1=15") != std::string::npos);
}

TEST_CASE("filter rejects a retune inside a block") {
  TempDir t;
  write_file(t / "a.json", example1_artifact());
  write_file(t / "s.csv", "0,0.8\n# comment\n\n150,0.85\n");
  const auto r = vbwtool({"filter", t / "a.json", "--retune", t / "s.csv"}, raw({1.0, 2.0}));
  CHECK(r.code == 2);
  CHECK(r.err.find("s.csv:4") != std::string::npos);
  CHECK(vbwtool({"filter", t / "a.json"}, "abc").code == 2);
}

TEST_CASE("filter on white noise suppresses the stopband") {
  TempDir t;
  write_file(t / "a.json", example1_artifact());
  std::mt19937_64 rng(22);
  const auto x = oracle::random_signal(128 * 200, rng);
  const auto r = vbwtool({"filter", t / "a.json", "--b-over-pi", "0.75", "--mode",
                          "conventional", "--tail", "full"},
                         raw(x));
  REQUIRE(r.code == 0);
  const auto y = unraw(r.out);
  CHECK(y.size() == x.size() + 127);
  // Hann-windowed averaged periodogram, 512-point segments
  constexpr std::size_t seg_len = 512;
  std::vector<double> psd(seg_len / 2 + 1, 0.0);
  for (std::size_t s = 256; s + seg_len <= x.size(); s += seg_len) {
    std::vector<oracle::cplx> seg(seg_len);
    for (std::size_t i = 0; i < seg_len; ++i) {
      seg[i] = y[s + i] * (0.5 - 0.5 * std::cos(2 * vbw::kPi * static_cast<double>(i) / seg_len));
    }
    const auto f = oracle::naive_dft(seg);
    for (std::size_t k = 0; k < psd.size(); ++k) psd[k] += std::norm(f[k]);
  }
  double pass = 0.0, stop = 0.0;
  // passband below 0.75pi - delta/2, stopband above 0.75pi + delta/2 (plus margin)
  for (int k = 0; k <= 140; ++k) pass += psd[k] / 141;
  for (int k = 236; k <= 256; ++k) stop += psd[k] / 21;
  CHECK(10 * std::log10(stop / pass) < -45.0);
}

TEST_CASE("report tables") {
  TempDir t;
  write_file(t / "a.json", example1_artifact());
  auto r = vbwtool({"report", t / "a.json", "--format", "csv", "--baselines", "none"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "Design,L,N,M,R_mf,R_mv,R_a,R_md,R_ad,Mem,SBML,SBE\n"
                 "Proposed,31,128,98,5.3,0.3,21,0,0,15,-56.1,-88.9\n");

  write_file(t / "spec3.json", spec_text(0.27, 0.76, 0.85));
  REQUIRE(vbwtool({"design", t / "spec3.json", "-o", t / "b.json"}).code == 0);
  r = vbwtool({"report", t / "b.json", "--baselines", "table3"});
  CHECK(r.out.find("| Proposed | 31 | 128 | 98 | 5.3 | 0.3 | 21 | 0 | 0 | 15 | -56.1 | -92.4 |") !=
        std::string::npos);
  CHECK(r.out.find("FD/FD (minimax)") != std::string::npos);

  r = vbwtool({"report", t / "a.json", t / "b.json", "--format", "csv", "--baselines", "none"});
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 3);
}

TEST_CASE("discretize prints bin-domain parameters") {
  TempDir t;
  write_file(t / "spec.json", spec_text(0.27, 0.76, 0.85));
  const auto r = vbwtool({"discretize", t / "spec.json"});
  REQUIRE(r.code == 0);
  const auto j = vbw::Json::parse(r.out);
  CHECK(j["delta_bins"] == 16);
  CHECK(j["b_bins_lower"] == 48);
  CHECK(j["b_bins_upper"] == 55);
}
