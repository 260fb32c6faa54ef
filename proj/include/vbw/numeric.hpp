#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>

#include <Eigen/Core>

namespace vbw {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Energies at or below zero are reported at this level.
inline constexpr double kDbFloor = -400.0;

inline double power_db(double linear) {
  if (!(linear > 0.0)) return kDbFloor;
  const double db = 10.0 * std::log10(linear);
  return db < kDbFloor ? kDbFloor : db;
}

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Element-wise Neumaier accumulation of equally shaped matrices.
class CompensatedMatrixSum {
 public:
  CompensatedMatrixSum(Eigen::Index rows, Eigen::Index cols)
      : sum_(Eigen::MatrixXd::Zero(rows, cols)),
        comp_(Eigen::MatrixXd::Zero(rows, cols)) {}

  void add(const Eigen::MatrixXd& x) {
    for (Eigen::Index j = 0; j < sum_.cols(); ++j) {
      for (Eigen::Index i = 0; i < sum_.rows(); ++i) {
        const double s = sum_(i, j);
        const double v = x(i, j);
        const double t = s + v;
        comp_(i, j) += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
        sum_(i, j) = t;
      }
    }
  }
  Eigen::MatrixXd value() const { return sum_ + comp_; }

 private:
  Eigen::MatrixXd sum_;
  Eigen::MatrixXd comp_;
};

/// Worker count for parallel loops: VBW_THREADS if set and positive,
/// otherwise the hardware concurrency.
unsigned worker_count();

/// Runs fn(i) for i in [0, count) on up to worker_count() threads. Callers
/// write results into per-index slots and reduce them in index order, so
/// results do not depend on the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace vbw
