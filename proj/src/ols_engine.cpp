#include "vbw/ols_engine.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "vbw/errors.hpp"

namespace vbw {

struct OlsEngine::Variable {
  DiscretizedSpec disc;
  TransitionCoeffs v;
  DftCoefficientSet coeffs;
};

std::string_view to_string(OlsMode mode) {
  return mode == OlsMode::Symmetric ? "symmetric" : "conventional";
}

OlsMode parse_ols_mode(std::string_view text) {
  if (text == "symmetric") return OlsMode::Symmetric;
  if (text == "conventional") return OlsMode::Conventional;
  throw InputError("unknown OLS mode '" + std::string(text) +
                   "' (expected symmetric or conventional)");
}

std::string_view to_string(TailPolicy policy) {
  switch (policy) {
    case TailPolicy::None: return "none";
    case TailPolicy::OneBlock: return "block";
    case TailPolicy::FullSupport: return "full";
  }
  return "block";
}

TailPolicy parse_tail_policy(std::string_view text) {
  if (text == "none") return TailPolicy::None;
  if (text == "block") return TailPolicy::OneBlock;
  if (text == "full") return TailPolicy::FullSupport;
  throw InputError("unknown tail policy '" + std::string(text) + "' (expected none, block or full)");
}

OlsEngine::OlsEngine(int n_fft, int block_advance, OlsMode mode)
    : n_fft_(n_fft),
      block_advance_(block_advance),
      mode_(mode),
      transform_(make_real_transform(static_cast<std::size_t>(n_fft))),
      segment_(static_cast<std::size_t>(n_fft), 0.0),
      time_(static_cast<std::size_t>(n_fft), 0.0),
      spectrum_(static_cast<std::size_t>(n_fft / 2 + 1)) {
  if (block_advance < 1 || block_advance > n_fft) {
    throw InputError("block advance must lie in [1, N]");
  }
  if (mode == OlsMode::Symmetric && (n_fft - block_advance) % 2 != 0) {
    throw InputError("symmetric overlap-save needs an even overlap N - M");
  }
}

OlsEngine::OlsEngine(const DiscretizedSpec& disc, TransitionCoeffs v, int initial_bin,
                     OlsMode mode)
    : OlsEngine(disc.n_fft, disc.block_advance, mode) {
  disc.check_invariants();
  auto coeffs = build_coefficients(disc, v, initial_bin);
  coeffs.check_invariants();
  variable_ = std::make_unique<Variable>(Variable{disc, std::move(v), std::move(coeffs)});
}

OlsEngine OlsEngine::fixed_response(int n_fft, int block_advance,
                                    std::vector<std::complex<double>> spectrum) {
  if (static_cast<int>(spectrum.size()) != n_fft) {
    throw DimensionError("spectrum must have N entries");
  }
  for (int k = 1; k < n_fft; ++k) {
    if (std::abs(spectrum[static_cast<std::size_t>(n_fft - k)] - std::conj(spectrum[k])) > 1e-9) {
      throw InputError("spectrum is not conjugate symmetric at bin " + std::to_string(k));
    }
  }
  OlsEngine engine(n_fft, block_advance, OlsMode::Conventional);
  engine.fixed_spectrum_ = std::move(spectrum);
  return engine;
}

OlsEngine::OlsEngine(OlsEngine&&) noexcept = default;
OlsEngine& OlsEngine::operator=(OlsEngine&&) noexcept = default;
OlsEngine::~OlsEngine() = default;

int OlsEngine::current_bin() const { return variable_ ? variable_->coeffs.b_bin() : 0; }

void OlsEngine::apply_pending() {
  if (!pending_bin_ || !variable_) return;
  auto& var = *variable_;
  var.coeffs = retune(var.coeffs, var.disc, *pending_bin_, var.v);
  var.coeffs.check_invariants();
  pending_bin_.reset();
  ++counters_.retunes;
}

void OlsEngine::process_block(std::span<const double> in, std::span<double> out) {
  const auto m = static_cast<std::size_t>(block_advance_);
  if (in.size() != m || out.size() != m) {
    throw DimensionError("overlap-save block must hold exactly M = " + std::to_string(m) +
                         " samples, got " + std::to_string(in.size()));
  }
  apply_pending();

  // Segment = [previous N - M inputs | M new inputs].
  std::copy(segment_.begin() + static_cast<std::ptrdiff_t>(m), segment_.end(), segment_.begin());
  std::copy(in.begin(), in.end(), segment_.end() - static_cast<std::ptrdiff_t>(m));
  transform_->forward(segment_, spectrum_);

  const std::size_t half = static_cast<std::size_t>(n_fft_ / 2);
  std::size_t discard_head = static_cast<std::size_t>(n_fft_) - m;
  if (!variable_) {
    for (std::size_t k = 0; k <= half; ++k) spectrum_[k] *= fixed_spectrum_[k];
  } else if (mode_ == OlsMode::Symmetric) {
    const auto mag = variable_->coeffs.magnitude();
    for (std::size_t k = 0; k <= half; ++k) {
      const double h = mag[k];
      if (h == 0.0) {
        spectrum_[k] = 0.0;
      } else if (h != 1.0) {
        spectrum_[k] *= h;
        counters_.general_multiplications += 2;
      }
    }
    // Zero-phase product: the wanted samples sit D1 positions earlier.
    discard_head /= 2;
  } else {
    const auto& coeffs = variable_->coeffs;
    const auto mag = coeffs.magnitude();
    for (std::size_t k = 0; k <= half; ++k) {
      const double h = mag[k];
      if (h == 0.0) {
        spectrum_[k] = 0.0;
        continue;
      }
      if (h != 1.0) counters_.general_multiplications += 4;
      spectrum_[k] *= coeffs.coefficient(k);
    }
  }
  transform_->inverse(spectrum_, time_);
  std::copy_n(time_.begin() + static_cast<std::ptrdiff_t>(discard_head), m, out.begin());
  ++counters_.blocks;
  counters_.samples += m;
}

std::vector<double> OlsEngine::process_block(std::span<const double> in) {
  std::vector<double> out(in.size());
  process_block(in, out);
  return out;
}

BandwidthAck OlsEngine::set_bin(int bin) {
  if (!variable_) throw std::logic_error("fixed-response engine cannot be retuned");
  const auto& disc = variable_->disc;
  BandwidthAck ack;
  ack.applied_bin = std::clamp(bin, disc.b_bins_lower, disc.b_bins_upper);
  ack.clamped = ack.applied_bin != bin;
  const int current = variable_->coeffs.b_bin();
  const int effective = pending_bin_.value_or(current);
  if (ack.applied_bin == effective) return ack;
  ack.changed = true;
  if (ack.applied_bin == current) {
    pending_bin_.reset();
  } else {
    pending_bin_ = ack.applied_bin;
  }
  return ack;
}

BandwidthAck OlsEngine::set_bandwidth(double b) {
  if (!variable_) throw std::logic_error("fixed-response engine cannot be retuned");
  const auto mapped = bandwidth_to_bin(b, variable_->disc);
  auto ack = set_bin(mapped.bin);
  ack.clamped = ack.clamped || mapped.clamped;
  return ack;
}

std::vector<double> OlsEngine::flush() {
  const std::vector<double> zeros(static_cast<std::size_t>(block_advance_), 0.0);
  return process_block(zeros);
}

void OlsEngine::reset() {
  std::fill(segment_.begin(), segment_.end(), 0.0);
  pending_bin_.reset();
  counters_ = {};
}

StreamFilter::StreamFilter(OlsEngine engine) : engine_(std::move(engine)) {
  pending_.reserve(static_cast<std::size_t>(engine_.block_advance()));
}

std::size_t StreamFilter::tail_length(TailPolicy policy, int n_fft, int block_advance) {
  switch (policy) {
    case TailPolicy::None: return 0;
    case TailPolicy::OneBlock: return static_cast<std::size_t>(block_advance);
    case TailPolicy::FullSupport: return static_cast<std::size_t>(n_fft - 1);
  }
  return 0;
}

std::vector<double> StreamFilter::write(std::span<const double> samples) {
  const auto m = static_cast<std::size_t>(engine_.block_advance());
  std::vector<double> out;
  out.reserve(((pending_.size() + samples.size()) / m) * m);
  std::vector<double> block(m);
  for (double x : samples) {
    pending_.push_back(x);
    if (pending_.size() == m) {
      engine_.process_block(pending_, block);
      out.insert(out.end(), block.begin(), block.end());
      pending_.clear();
    }
  }
  samples_in_ += samples.size();
  samples_out_ += out.size();
  return out;
}

std::vector<double> StreamFilter::finish(TailPolicy policy) {
  const auto m = static_cast<std::size_t>(engine_.block_advance());
  const std::uint64_t target =
      samples_in_ + tail_length(policy, engine_.n_fft(), engine_.block_advance());
  std::vector<double> out;
  std::vector<double> block(m);
  while (samples_out_ + out.size() < target) {
    pending_.resize(m, 0.0);
    engine_.process_block(pending_, block);
    pending_.clear();
    out.insert(out.end(), block.begin(), block.end());
  }
  out.resize(static_cast<std::size_t>(target - samples_out_));
  samples_out_ = target;
  pending_.clear();
  return out;
}

}  // namespace vbw
