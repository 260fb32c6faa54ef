#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "vbw/errors.hpp"
#include "vbw/ols_engine.hpp"

using namespace vbw;
using fixtures::max_abs;
using fixtures::max_abs_diff;

namespace {

std::vector<double> run(OlsEngine& eng, const std::vector<double>& x) {
  const auto m = static_cast<std::size_t>(eng.block_advance());
  std::vector<double> y;
  for (std::size_t s = 0; s + m <= x.size(); s += m) {
    auto out = eng.process_block(std::span<const double>(x.data() + s, m));
    y.insert(y.end(), out.begin(), out.end());
  }
  return y;
}

double rel(const std::vector<double>& a, const std::vector<double>& b) {
  return max_abs_diff(a, b) / max_abs(b);
}

std::vector<std::complex<double>> delay_spectrum(int n, int delay) {
  std::vector<std::complex<double>> h(n);
  for (int k = 0; k < n; ++k) h[k] = std::polar(1.0, -kTwoPi * ((k * delay) % n) / n);
  return h;
}

}  // namespace

TEST_CASE("identity spectrum passes the input through") {
  auto eng = OlsEngine::fixed_response(32, 10, std::vector<std::complex<double>>(32, 1.0));
  std::mt19937_64 rng(1);
  const auto x = oracle::random_signal(100, rng);
  CHECK(max_abs_diff(run(eng, x), x) < 1e-14);
}

TEST_CASE("zero-padded FIR equals direct convolution") {
  std::mt19937_64 rng(2);
  for (auto [n, l] : {std::pair{16, 7}, std::pair{128, 31}, std::pair{64, 33}}) {
    const int m = n - l + 1;
    const auto h = oracle::random_signal(static_cast<std::size_t>(l), rng);
    std::vector<oracle::cplx> padded(n, 0.0);
    for (int i = 0; i < l; ++i) padded[i] = h[i];
    auto eng = OlsEngine::fixed_response(n, m, oracle::naive_dft(padded));
    const auto x = oracle::random_signal(static_cast<std::size_t>(10 * m), rng);
    auto want = oracle::direct_convolve(x, h);
    want.resize(x.size());
    CHECK(rel(run(eng, x), want) < 1e-10);
  }
}

TEST_CASE("Example 1 matches the time-varying oracle in both modes") {
  const auto d = fixtures::example1();
  const auto& v = fixtures::example1_design().coeffs;
  std::mt19937_64 rng(3);
  const auto x = oracle::random_signal(static_cast<std::size_t>(10 * d.block_advance), rng);
  const auto want = oracle::lptv_convolve(x, fixtures::geometry(d), v.values, 53);
  OlsEngine sym(d, v, 53, OlsMode::Symmetric);
  OlsEngine conv(d, v, 53, OlsMode::Conventional);
  const auto ys = run(sym, x);
  const auto yc = run(conv, x);
  CHECK(rel(ys, want) < 1e-9);
  CHECK(rel(yc, want) < 1e-9);
  CHECK(max_abs_diff(ys, yc) < 1e-10 * max_abs(yc));
}

TEST_CASE("general multiplications per block") {
  const auto d = fixtures::example1();
  OlsEngine sym(d, fixtures::example1_design().coeffs, 50, OlsMode::Symmetric);
  std::vector<double> x(static_cast<std::size_t>(3 * d.block_advance), 0.25);
  run(sym, x);
  CHECK(sym.counters().blocks == 3);
  CHECK(sym.counters().general_multiplications == 3u * 2u * d.k_transition_count);
  CHECK(sym.counters().samples == x.size());
}

TEST_CASE("retune is staged for the next block") {
  const auto d = fixtures::example1();
  const auto& v = fixtures::example1_design().coeffs;
  OlsEngine eng(d, v, 48);
  auto ack = eng.set_bin(55);
  CHECK(ack.changed);
  CHECK(ack.applied_bin == 55);
  CHECK(eng.current_bin() == 48);
  CHECK(eng.pending_bin() == 55);
  ack = eng.set_bin(55);
  CHECK_FALSE(ack.changed);
  // returning to the current bin cancels the staged change
  ack = eng.set_bin(48);
  CHECK(ack.changed);
  CHECK_FALSE(eng.pending_bin().has_value());

  ack = eng.set_bandwidth(0.2 * kPi);
  CHECK(ack.clamped);
  CHECK(ack.applied_bin == 48);
  ack = eng.set_bandwidth(kPi * 110 / 128);
  CHECK(ack.applied_bin == 55);
  CHECK_FALSE(ack.clamped);

  std::vector<double> block(static_cast<std::size_t>(d.block_advance), 0.0);
  eng.process_block(block);
  CHECK(eng.current_bin() == 55);
  CHECK(eng.counters().retunes == 1);
}

TEST_CASE("mid-stream retune splices the two oracle outputs") {
  const auto d = fixtures::example1();
  const auto& v = fixtures::example1_design().coeffs;
  const auto g = fixtures::geometry(d);
  const auto m = static_cast<std::size_t>(d.block_advance);
  std::mt19937_64 rng(4);
  const auto x = oracle::random_signal(10 * m, rng);
  OlsEngine eng(d, v, 48);
  std::vector<double> y;
  for (std::size_t blk = 0; blk < 10; ++blk) {
    if (blk == 4) eng.set_bin(55);
    auto out = eng.process_block(std::span<const double>(x.data() + blk * m, m));
    y.insert(y.end(), out.begin(), out.end());
  }
  const auto before = oracle::lptv_convolve(x, g, v.values, 48);
  const auto spliced = oracle::lptv_convolve(x, g, v.values, 48, {{4 * m, 55}});
  const double scale = max_abs(before);
  for (std::size_t i = 0; i < 4 * m; ++i) CHECK(std::abs(y[i] - before[i]) < 1e-9 * scale);
  CHECK(rel(y, spliced) < 1e-9);
}

TEST_CASE("per-block sweep over Example 2 bins") {
  const auto d = fixtures::example2();
  const auto v = design(d).coeffs;
  const auto m = static_cast<std::size_t>(d.block_advance);
  std::mt19937_64 rng(5);
  const std::size_t blocks = 12;
  const auto x = oracle::random_signal(blocks * m, rng);
  std::vector<oracle::Retune> schedule;
  for (std::size_t blk = 1; blk < blocks; ++blk)
    schedule.push_back({blk * m, d.b_bins_lower + static_cast<int>(blk * 13) % d.bin_count()});
  for (auto mode : {OlsMode::Symmetric, OlsMode::Conventional}) {
    OlsEngine eng(d, v, d.b_bins_lower, mode);
    std::vector<double> y;
    for (std::size_t blk = 0; blk < blocks; ++blk) {
      if (blk > 0) eng.set_bin(schedule[blk - 1].bin);
      auto out = eng.process_block(std::span<const double>(x.data() + blk * m, m));
      y.insert(y.end(), out.begin(), out.end());
    }
    CHECK(rel(y, oracle::lptv_convolve(x, fixtures::geometry(d), v.values, d.b_bins_lower,
                                       schedule)) < 1e-9);
  }
}

TEST_CASE("output is M-periodic in the input shift") {
  const auto d = fixtures::example1();
  const auto& v = fixtures::example1_design().coeffs;
  const auto m = static_cast<std::size_t>(d.block_advance);
  std::mt19937_64 rng(6);
  const auto x = oracle::random_signal(8 * m, rng);
  std::vector<double> shifted(m, 0.0);
  shifted.insert(shifted.end(), x.begin(), x.end());
  OlsEngine a(d, v, 50), b(d, v, 50);
  const auto ya = run(a, x);
  const auto yb = run(b, shifted);
  for (std::size_t i = 0; i < ya.size(); ++i) CHECK(std::abs(yb[i + m] - ya[i]) < 1e-12);
}

TEST_CASE("impulse responses vary with the input phase") {
  const auto d = fixtures::example1();
  const auto& v = fixtures::example1_design().coeffs;
  const auto m = static_cast<std::size_t>(d.block_advance);
  // an impulse train spaced M gives an M-periodic output
  std::vector<double> train(6 * m, 0.0);
  for (std::size_t i = 2 * m; i < train.size(); i += m) train[i] = 1.0;
  OlsEngine a(d, v, 50);
  const auto ya = run(a, train);
  for (std::size_t i = 4 * m; i < 5 * m; ++i) CHECK(std::abs(ya[i] - ya[i + m]) < 1e-12);

  // single impulses one sample apart do not see shifted copies of one response
  std::vector<double> x0(6 * m, 0.0), x1(6 * m, 0.0);
  x0[2 * m] = 1.0;
  x1[2 * m + 1] = 1.0;
  OlsEngine b0(d, v, 50), b1(d, v, 50);
  const auto y0 = run(b0, x0);
  const auto y1 = run(b1, x1);
  double diff = 0.0;
  for (std::size_t i = m; i + 1 < 5 * m; ++i) diff = std::max(diff, std::abs(y1[i + 1] - y0[i]));
  CHECK(diff > 1e-8);
  CHECK(diff < 1e-2);
}

TEST_CASE("block size is enforced") {
  const auto d = fixtures::example1();
  OlsEngine eng(d, fixtures::example1_design().coeffs, 50);
  std::vector<double> bad(10, 0.0);
  CHECK_THROWS_AS(eng.process_block(bad), DimensionError);
  auto fixed = OlsEngine::fixed_response(16, 10, std::vector<std::complex<double>>(16, 1.0));
  CHECK_THROWS_AS(fixed.set_bin(3), std::logic_error);
  auto asym = std::vector<std::complex<double>>(16, 1.0);
  asym[2] = {0.0, 1.0};
  CHECK_THROWS_AS(OlsEngine::fixed_response(16, 10, asym), InputError);
}

TEST_CASE("flush and tail policies") {
  auto eng = OlsEngine::fixed_response(16, 10, delay_spectrum(16, 3));
  const auto z = eng.flush();
  CHECK(z.size() == 10);
  CHECK(max_abs(z) == 0.0);

  for (auto policy : {TailPolicy::None, TailPolicy::OneBlock, TailPolicy::FullSupport}) {
    StreamFilter f(OlsEngine::fixed_response(16, 10, delay_spectrum(16, 3)));
    std::mt19937_64 rng(7);
    const auto x = oracle::random_signal(37, rng);
    auto y = f.write(std::span<const double>(x.data(), 20));
    auto y2 = f.write(std::span<const double>(x.data() + 20, 17));
    y.insert(y.end(), y2.begin(), y2.end());
    auto tail = f.finish(policy);
    y.insert(y.end(), tail.begin(), tail.end());
    CHECK(y.size() == 37 + StreamFilter::tail_length(policy, 16, 10));
    // delayed passthrough
    for (std::size_t i = 3; i < 37; ++i) CHECK(y[i] == doctest::Approx(x[i - 3]));
    if (policy != TailPolicy::None) {
      for (std::size_t i = 37; i < 40; ++i) CHECK(y[i] == doctest::Approx(x[i - 3]));
    }
  }

  StreamFilter empty(OlsEngine::fixed_response(16, 10, delay_spectrum(16, 3)));
  CHECK(empty.finish(TailPolicy::None).empty());
  CHECK(empty.finish(TailPolicy::OneBlock).size() == 10);
}

TEST_CASE("reset clears history") {
  const auto d = fixtures::example1();
  OlsEngine eng(d, fixtures::example1_design().coeffs, 50);
  std::mt19937_64 rng(8);
  const auto x = oracle::random_signal(static_cast<std::size_t>(3 * d.block_advance), rng);
  const auto first = run(eng, x);
  eng.reset();
  CHECK(eng.counters().blocks == 0);
  CHECK(run(eng, x) == first);
}

TEST_CASE("mode and tail names") {
  CHECK(parse_ols_mode("symmetric") == OlsMode::Symmetric);
  CHECK(parse_ols_mode("conventional") == OlsMode::Conventional);
  CHECK_THROWS_AS(parse_ols_mode("other"), InputError);
  CHECK(parse_tail_policy("full") == TailPolicy::FullSupport);
  CHECK(to_string(TailPolicy::OneBlock) == "block");
  CHECK_THROWS_AS(parse_tail_policy("x"), InputError);
}
