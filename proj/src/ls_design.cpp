#include "vbw/ls_design.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "vbw/errors.hpp"
#include "vbw/numeric.hpp"

namespace vbw {
namespace {

long long wrap(long long a, long long n) {
  const long long r = a % n;
  return r < 0 ? r + n : r;
}

double condition_estimate(const Eigen::MatrixXd& q) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const auto& ev = eig.eigenvalues();
  const double lo = ev.minCoeff();
  const double hi = ev.cwiseAbs().maxCoeff();
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

struct BinTerms {
  Eigen::MatrixXd q;
  Eigen::VectorXd c;
};

// Contribution of one bandwidth bin, summed over phases in increasing n.
BinTerms assemble_bin(const DiscretizedSpec& disc, int bin_index, int phases,
                      const Eigen::MatrixXd* weights, const std::vector<double>& cos_table) {
  const int n_fft = disc.n_fft;
  const int k_count = disc.k_transition_count;
  const long long d2 = disc.delay_system;
  const int b_bin = disc.b_bins_lower + bin_index;
  const double b_rad = disc.bin_to_rad(b_bin);
  const double delta = disc.delta_truncated;
  const int k1 = b_bin - disc.delta_bins / 2 + 1;

  // Every kernel below depends on q and n only through t = q + n.
  const int span = n_fft + phases - 1;
  Eigen::MatrixXd f_tab(span, k_count);
  Eigen::VectorXd base(span);
  Eigen::VectorXd i2(span);
  for (int t = 0; t < span; ++t) {
    const long long lag = d2 - t;
    for (int r = 0; r < k_count; ++r) {
      f_tab(t, r) = cos_table[static_cast<std::size_t>(wrap((r + k1) * lag, n_fft))];
    }
    CompensatedSum acc;
    for (int k = 1; k < k1; ++k) {
      acc.add(cos_table[static_cast<std::size_t>(wrap(k * lag, n_fft))]);
    }
    base(t) = 1.0 + 2.0 * acc.value();
    i2(t) = kernel_i2(t, 0, b_rad, delta, disc);
  }

  Eigen::MatrixXd i1(n_fft, n_fft);
  for (int q = 0; q < n_fft; ++q) {
    for (int p = 0; p < n_fft; ++p) i1(q, p) = kernel_i1(q, p, b_rad, delta);
  }

  CompensatedMatrixSum q_acc(k_count, k_count);
  CompensatedMatrixSum c_acc(k_count, 1);
  const double inv_n = 1.0 / n_fft;
  for (int n = 0; n < phases; ++n) {
    const auto f = f_tab.middleRows(n, n_fft);
    const Eigen::MatrixXd g = i1 * f;
    Eigen::MatrixXd q_term = f.transpose() * g;
    Eigen::VectorXd c_term =
        f.transpose() * ((i1 * base.segment(n, n_fft)) * inv_n - i2.segment(n, n_fft));
    if (weights) {
      const double w2 = (*weights)(n, bin_index) * (*weights)(n, bin_index);
      q_term *= w2;
      c_term *= w2;
    }
    q_acc.add(q_term);
    c_acc.add(c_term);
  }
  return {q_acc.value(), c_acc.value()};
}

LsSystem assemble_impl(const DiscretizedSpec& disc, PhaseLimitMode mode,
                       const Eigen::MatrixXd* weights) {
  disc.check_invariants();
  const int phases = phase_count(disc, mode);
  const int bins = disc.bin_count();
  std::vector<double> cos_table(static_cast<std::size_t>(disc.n_fft));
  for (int j = 0; j < disc.n_fft; ++j) cos_table[j] = std::cos(kTwoPi * j / disc.n_fft);

  std::vector<BinTerms> partial(static_cast<std::size_t>(bins));
  parallel_for(partial.size(), [&](std::size_t i) {
    partial[i] = assemble_bin(disc, static_cast<int>(i), phases, weights, cos_table);
  });

  const int k_count = disc.k_transition_count;
  CompensatedMatrixSum q_acc(k_count, k_count);
  CompensatedMatrixSum c_acc(k_count, 1);
  for (const auto& p : partial) {
    q_acc.add(p.q);
    c_acc.add(p.c);
  }
  const double n = disc.n_fft;
  LsSystem sys;
  sys.disc = disc;
  sys.q_matrix = q_acc.value() * (4.0 / (n * n));
  sys.c_vector = c_acc.value().col(0) * (2.0 / n);
  const double scale = sys.q_matrix.cwiseAbs().maxCoeff();
  const Eigen::MatrixXd asym = sys.q_matrix - sys.q_matrix.transpose();
  sys.asymmetry = scale > 0.0 ? asym.cwiseAbs().maxCoeff() / scale : 0.0;
  if (sys.asymmetry > 1e-10) {
    throw std::logic_error("assembled Q is not symmetric (relative asymmetry " +
                           std::to_string(sys.asymmetry) + ")");
  }
  sys.q_matrix = 0.5 * (sys.q_matrix + sys.q_matrix.transpose()).eval();
  return sys;
}

}  // namespace

int phase_count(const DiscretizedSpec& disc, PhaseLimitMode mode) {
  return mode == PhaseLimitMode::BlockAdvance ? disc.block_advance : disc.n_fft;
}

std::string_view to_string(PhaseLimitMode mode) {
  return mode == PhaseLimitMode::BlockAdvance ? "block_advance" : "fft_length";
}

PhaseLimitMode parse_phase_limit_mode(std::string_view text) {
  if (text == "block_advance") return PhaseLimitMode::BlockAdvance;
  if (text == "fft_length") return PhaseLimitMode::FftLength;
  throw InputError("unknown phase limit mode '" + std::string(text) +
                   "' (expected block_advance or fft_length)");
}

double kernel_f(int k, int q, int n, const DiscretizedSpec& disc) {
  const long long arg = static_cast<long long>(k) * (disc.delay_system - (q + n));
  return std::cos(kTwoPi * static_cast<double>(wrap(arg, disc.n_fft)) / disc.n_fft);
}

double kernel_i1_offdiagonal(double m, double b_rad, double delta_rad) {
  return -2.0 * std::sin(delta_rad * m / 2.0) * std::cos(b_rad * m) / (kPi * m);
}

double kernel_i1(int q, int p, double b_rad, double delta_rad) {
  if (q == p) return (kPi - delta_rad) / kPi;
  return kernel_i1_offdiagonal(static_cast<double>(q - p), b_rad, delta_rad);
}

double kernel_i2(int p, int n, double b_rad, double delta_rad, const DiscretizedSpec& disc) {
  const double edge = b_rad - delta_rad / 2.0;
  const int lag = disc.delay_system - (p + n);
  if (lag == 0) return edge / kPi;
  return std::sin(edge * lag) / (kPi * lag);
}

LsSystem assemble(const DiscretizedSpec& disc, PhaseLimitMode mode) {
  return assemble_impl(disc, mode, nullptr);
}

LsSystem assemble_weighted(const DiscretizedSpec& disc, const DesignWeights& weights,
                           PhaseLimitMode mode) {
  const int phases = phase_count(disc, mode);
  if (weights.w.rows() != phases || weights.w.cols() != disc.bin_count()) {
    throw DimensionError("weights must be " + std::to_string(phases) + " x " +
                         std::to_string(disc.bin_count()) + ", got " +
                         std::to_string(weights.w.rows()) + " x " +
                         std::to_string(weights.w.cols()));
  }
  if (!weights.w.allFinite() || !(weights.w.array() > 0.0).all()) {
    throw std::domain_error("design weights must be finite and strictly positive");
  }
  return assemble_impl(disc, mode, &weights.w);
}

double residual(const LsSystem& sys, const TransitionCoeffs& v) {
  const Eigen::Map<const Eigen::VectorXd> x(v.values.data(), static_cast<Eigen::Index>(v.size()));
  const double r = (sys.q_matrix * x + sys.c_vector).norm();
  const double c = sys.c_vector.norm();
  return c > 0.0 ? r / c : r;
}

TransitionCoeffs solve(const LsSystem& sys) {
  const Eigen::LLT<Eigen::MatrixXd> llt(sys.q_matrix);
  bool positive = llt.info() == Eigen::Success;
  if (positive) {
    const Eigen::MatrixXd l = llt.matrixL();
    positive = (l.diagonal().array() > 0.0).all();
  }
  if (!positive) {
    const double cond = condition_estimate(sys.q_matrix);
    throw NumericalError("Q is not positive definite (condition estimate " +
                             std::to_string(cond) + ")",
                         cond);
  }
  const Eigen::VectorXd x = -llt.solve(sys.c_vector);
  TransitionCoeffs v{std::vector<double>(x.data(), x.data() + x.size())};
  const double res = residual(sys, v);
  if (!(res <= 1e-10)) {
    const double cond = condition_estimate(sys.q_matrix);
    throw NumericalError("normal-equation residual " + std::to_string(res) +
                             " exceeds 1e-10 (condition estimate " + std::to_string(cond) + ")",
                         cond);
  }
  return v;
}

DesignWeights derive_weights(const Eigen::MatrixXd& sbe_profile) {
  if (sbe_profile.size() == 0) throw std::domain_error("empty stopband-energy profile");
  if (!sbe_profile.allFinite() || !(sbe_profile.array() > 0.0).all()) {
    throw std::domain_error("stopband energies must be finite and positive");
  }
  const double floor = sbe_profile.minCoeff();
  return {(sbe_profile.array() / floor).sqrt().matrix()};
}

}  // namespace vbw
