// FFTW3 backend for the transform interfaces.

#include <algorithm>
#include <cstring>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

#include "vbw/errors.hpp"
#include "vbw/transform.hpp"

namespace vbw {
namespace {

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <typename T>
struct FftwBuffer {
  explicit FftwBuffer(std::size_t count)
      : data(static_cast<T*>(fftw_malloc(sizeof(T) * count))), size(count) {
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  T* data;
  std::size_t size;
};

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(want) +
                         " samples, got " + std::to_string(got));
  }
}

class FftwRealTransform final : public RealTransform {
 public:
  explicit FftwRealTransform(std::size_t n) : n_(n), time_(n), freq_(n / 2 + 1) {
    std::lock_guard lock(planner_mutex());
    const int len = static_cast<int>(n);
    forward_.reset(fftw_plan_dft_r2c_1d(len, time_.data, freq_.data, FFTW_ESTIMATE));
    inverse_.reset(fftw_plan_dft_c2r_1d(len, freq_.data, time_.data, FFTW_ESTIMATE));
    if (!forward_ || !inverse_) throw std::runtime_error("FFTW planning failed");
  }

  std::size_t size() const override { return n_; }

  void forward(std::span<const double> in, std::span<std::complex<double>> out) override {
    require_size(in.size(), n_, "real transform input");
    require_size(out.size(), n_ / 2 + 1, "real transform output");
    std::copy(in.begin(), in.end(), time_.data);
    fftw_execute(forward_.get());
    std::memcpy(static_cast<void*>(out.data()), freq_.data, sizeof(fftw_complex) * out.size());
  }

  void inverse(std::span<const std::complex<double>> in, std::span<double> out) override {
    require_size(in.size(), n_ / 2 + 1, "real inverse input");
    require_size(out.size(), n_, "real inverse output");
    std::memcpy(freq_.data, in.data(), sizeof(fftw_complex) * in.size());
    fftw_execute(inverse_.get());
    const double scale = 1.0 / static_cast<double>(n_);
    std::transform(time_.data, time_.data + n_, out.begin(), [scale](double x) { return x * scale; });
  }

 private:
  std::size_t n_;
  FftwBuffer<double> time_;
  FftwBuffer<fftw_complex> freq_;
  Plan forward_;
  Plan inverse_;
};

class FftwComplexTransform final : public ComplexTransform {
 public:
  explicit FftwComplexTransform(std::size_t n) : n_(n), in_(n), out_(n) {
    std::lock_guard lock(planner_mutex());
    const int len = static_cast<int>(n);
    forward_.reset(fftw_plan_dft_1d(len, in_.data, out_.data, FFTW_FORWARD, FFTW_ESTIMATE));
    inverse_.reset(fftw_plan_dft_1d(len, in_.data, out_.data, FFTW_BACKWARD, FFTW_ESTIMATE));
    if (!forward_ || !inverse_) throw std::runtime_error("FFTW planning failed");
  }

  std::size_t size() const override { return n_; }

  void forward(std::span<const std::complex<double>> in,
               std::span<std::complex<double>> out) override {
    run(forward_.get(), in, out, 1.0);
  }

  void inverse(std::span<const std::complex<double>> in,
               std::span<std::complex<double>> out) override {
    run(inverse_.get(), in, out, 1.0 / static_cast<double>(n_));
  }

 private:
  void run(fftw_plan plan, std::span<const std::complex<double>> in,
           std::span<std::complex<double>> out, double scale) {
    require_size(in.size(), n_, "complex transform input");
    require_size(out.size(), n_, "complex transform output");
    std::memcpy(in_.data, in.data(), sizeof(fftw_complex) * n_);
    fftw_execute(plan);
    const auto* result = reinterpret_cast<const std::complex<double>*>(out_.data);
    std::transform(result, result + n_, out.begin(),
                   [scale](std::complex<double> x) { return x * scale; });
  }

  std::size_t n_;
  FftwBuffer<fftw_complex> in_;
  FftwBuffer<fftw_complex> out_;
  Plan forward_;
  Plan inverse_;
};

}  // namespace

std::unique_ptr<RealTransform> make_real_transform(std::size_t n) {
  if (n < 2 || n % 2 != 0) throw InputError("real transform length must be even and >= 2");
  return std::make_unique<FftwRealTransform>(n);
}

std::unique_ptr<ComplexTransform> make_complex_transform(std::size_t n) {
  if (n < 1) throw InputError("transform length must be positive");
  return std::make_unique<FftwComplexTransform>(n);
}

}  // namespace vbw
