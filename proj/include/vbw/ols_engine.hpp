#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vbw/coefficients.hpp"
#include "vbw/spec.hpp"
#include "vbw/transform.hpp"

namespace vbw {

enum class OlsMode {
  Conventional,  ///< multiply by complex H(k), drop the first L-1 samples
  Symmetric,     ///< multiply by real H_R(k), drop (L-1)/2 samples at each end
};

std::string_view to_string(OlsMode mode);
OlsMode parse_ols_mode(std::string_view text);

struct BandwidthAck {
  int applied_bin = 0;
  bool clamped = false;  ///< requested b was outside the design range
  bool changed = false;  ///< a retune was staged for the next block
};

struct EngineCounters {
  std::uint64_t blocks = 0;
  std::uint64_t samples = 0;
  std::uint64_t retunes = 0;
  /// Real multiplications by variable (transition-band) coefficients.
  std::uint64_t general_multiplications = 0;
};

/// Streaming overlap-save filter. Each block takes M new samples, forms an
/// N-sample segment with the previous N - M inputs, filters it in the
/// frequency domain and emits M samples. Output sample i lines up with
/// input sample i (group delay D1 for a linear-phase design); the newest
/// output of a block needs the whole block of input, so the worst-case
/// latency is D1 + M - 1 = D2 samples.
///
/// Both modes give the same output stream. Bandwidth changes are staged and
/// applied at the next block boundary.
class OlsEngine {
 public:
  OlsEngine(const DiscretizedSpec& disc, TransitionCoeffs v, int initial_bin,
            OlsMode mode = OlsMode::Symmetric);

  /// Fixed-coefficient engine for an arbitrary conjugate-symmetric length-N
  /// spectrum (conventional mode, no retuning).
  static OlsEngine fixed_response(int n_fft, int block_advance,
                                  std::vector<std::complex<double>> spectrum);

  OlsEngine(OlsEngine&&) noexcept;
  OlsEngine& operator=(OlsEngine&&) noexcept;
  ~OlsEngine();

  int n_fft() const { return n_fft_; }
  int block_advance() const { return block_advance_; }
  OlsMode mode() const { return mode_; }
  int current_bin() const;
  std::optional<int> pending_bin() const { return pending_bin_; }
  const EngineCounters& counters() const { return counters_; }

  /// Throws DimensionError unless in.size() == out.size() == M.
  void process_block(std::span<const double> in, std::span<double> out);
  std::vector<double> process_block(std::span<const double> in);

  /// Maps b (rad) to a bin (clamped into the design range) and stages it.
  BandwidthAck set_bandwidth(double b);
  BandwidthAck set_bin(int bin);

  /// Output of one all-zero input block.
  std::vector<double> flush();

  /// Clears history, counters and any staged retune.
  void reset();

 private:
  struct Variable;

  OlsEngine(int n_fft, int block_advance, OlsMode mode);
  void apply_pending();

  int n_fft_;
  int block_advance_;
  OlsMode mode_;
  std::unique_ptr<Variable> variable_;
  std::vector<std::complex<double>> fixed_spectrum_;
  std::optional<int> pending_bin_;
  std::unique_ptr<RealTransform> transform_;
  std::vector<double> segment_;
  std::vector<double> time_;
  std::vector<std::complex<double>> spectrum_;
  EngineCounters counters_;
};

enum class TailPolicy {
  None,          ///< output length equals input length
  OneBlock,      ///< M extra samples
  FullSupport,   ///< N - 1 extra samples, the full reach of the LPTV response
};

std::string_view to_string(TailPolicy policy);
TailPolicy parse_tail_policy(std::string_view text);

/// Accepts arbitrary-length writes, runs the engine block by block and pads
/// the final partial block with zeros on finish().
class StreamFilter {
 public:
  explicit StreamFilter(OlsEngine engine);

  std::vector<double> write(std::span<const double> samples);
  /// Remaining output so that the total equals input length + tail length.
  std::vector<double> finish(TailPolicy policy = TailPolicy::OneBlock);

  std::uint64_t samples_in() const { return samples_in_; }
  std::uint64_t samples_out() const { return samples_out_; }
  /// Index of the next input sample; block boundaries are multiples of M.
  std::uint64_t position() const { return samples_in_; }
  OlsEngine& engine() { return engine_; }
  const OlsEngine& engine() const { return engine_; }

  static std::size_t tail_length(TailPolicy policy, int n_fft, int block_advance);

 private:
  OlsEngine engine_;
  std::vector<double> pending_;
  std::uint64_t samples_in_ = 0;
  std::uint64_t samples_out_ = 0;
};

}  // namespace vbw
