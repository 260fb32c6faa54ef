#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace vbw {

/// N-point DFT of real input. forward() writes the N/2 + 1 non-redundant
/// bins; inverse() takes them back to N real samples scaled by 1/N.
class RealTransform {
 public:
  virtual ~RealTransform() = default;
  virtual std::size_t size() const = 0;
  virtual void forward(std::span<const double> in, std::span<std::complex<double>> out) = 0;
  virtual void inverse(std::span<const std::complex<double>> in, std::span<double> out) = 0;
};

/// N-point complex DFT; inverse() is scaled by 1/N.
class ComplexTransform {
 public:
  virtual ~ComplexTransform() = default;
  virtual std::size_t size() const = 0;
  virtual void forward(std::span<const std::complex<double>> in,
                       std::span<std::complex<double>> out) = 0;
  virtual void inverse(std::span<const std::complex<double>> in,
                       std::span<std::complex<double>> out) = 0;
};

std::unique_ptr<RealTransform> make_real_transform(std::size_t n);
std::unique_ptr<ComplexTransform> make_complex_transform(std::size_t n);

}  // namespace vbw
