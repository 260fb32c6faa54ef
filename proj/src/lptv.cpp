#include "vbw/lptv.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "vbw/errors.hpp"
#include "vbw/numeric.hpp"
#include "vbw/transform.hpp"

namespace vbw {
namespace {

int wrap(long long a, int n) {
  const long long r = a % n;
  return static_cast<int>(r < 0 ? r + n : r);
}

// Phases drift from the sliding update by a few ulps per step; recompute
// the sum directly this often.
constexpr int kReseedInterval = 32;

// Calls visit(n, H_n) for n = 0..phases-1 with H_n sampled on omega.
// S_s(w) = sum_q d((q + s) mod N) e^{-jwq} satisfies
//   S_{s+1}(w) = e^{jw} (S_s(w) + d(s mod N) (e^{-jwN} - 1)),
// and H_n(w) = e^{-jwn} S_{n-M+1}(w).
void for_each_phase(const PtvirSet& set, int phases, std::span<const double> omega,
                    const std::function<void(int, std::span<const std::complex<double>>)>& visit) {
  const int n_fft = set.n_fft();
  const std::size_t g = omega.size();
  const auto d = set.d_base();
  std::vector<std::complex<double>> step(g), wrap_term(g), s(g), h(g);
  for (std::size_t i = 0; i < g; ++i) {
    step[i] = std::polar(1.0, omega[i]);
    wrap_term[i] = std::polar(1.0, -omega[i] * n_fft) - 1.0;
  }
  auto seed = [&](int shift) {
    for (std::size_t i = 0; i < g; ++i) {
      std::complex<double> acc = 0.0;
      for (int q = 0; q < n_fft; ++q) {
        acc += d[static_cast<std::size_t>(wrap(q + shift, n_fft))] * std::polar(1.0, -omega[i] * q);
      }
      s[i] = acc;
    }
  };
  const int first_shift = 1 - set.block_advance();
  for (int n = 0; n < phases; ++n) {
    const int shift = first_shift + n;
    if (n % kReseedInterval == 0) seed(shift);
    for (std::size_t i = 0; i < g; ++i) h[i] = std::polar(1.0, -omega[i] * n) * s[i];
    visit(n, h);
    const double dv = d[static_cast<std::size_t>(wrap(shift, n_fft))];
    for (std::size_t i = 0; i < g; ++i) s[i] = step[i] * (s[i] + dv * wrap_term[i]);
  }
}

std::vector<double> grid_over(double from, double to, int points_per_pi) {
  const int intervals =
      std::max(1, static_cast<int>(std::ceil((to - from) / kPi * points_per_pi)));
  return uniform_grid(from, to, intervals + 1);
}

RangeMetrics aggregate(std::vector<BinMetrics> rows) {
  RangeMetrics out;
  double peak = 0.0;
  CompensatedSum db_sum;
  CompensatedSum lin_sum;
  double max_sbe = 0.0;
  std::size_t count = 0;
  for (const auto& row : rows) {
    peak = std::max(peak, row.stopband.peak_power);
    for (double e : row.stopband.sbe) {
      db_sum.add(power_db(e));
      lin_sum.add(e);
      max_sbe = std::max(max_sbe, e);
      ++count;
    }
  }
  out.per_setting = std::move(rows);
  out.sbml_db = power_db(peak);
  out.sbe_mean_db = count ? db_sum.value() / static_cast<double>(count) : kDbFloor;
  out.sbe_energy_db = count ? power_db(lin_sum.value() / static_cast<double>(count)) : kDbFloor;
  out.sbe_max_db = power_db(max_sbe);
  return out;
}

}  // namespace

std::vector<double> base_response(const DftCoefficientSet& coeffs) {
  return base_response(coeffs.complex_coeffs());
}

std::vector<double> base_response(std::span<const std::complex<double>> h) {
  const int n = static_cast<int>(h.size());
  if (n < 2) throw DimensionError("spectrum needs at least two bins");
  for (int k = 1; k < n; ++k) {
    if (std::abs(h[static_cast<std::size_t>(n - k)] - std::conj(h[static_cast<std::size_t>(k)])) >
        1e-9) {
      throw InputError("filter coefficients are not conjugate symmetric at bin " +
                       std::to_string(k));
    }
  }
  auto transform = make_complex_transform(static_cast<std::size_t>(n));
  std::vector<std::complex<double>> time(static_cast<std::size_t>(n));
  transform->inverse(h, time);
  std::vector<double> d(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) {
    if (std::abs(time[q].imag()) > 1e-12) {
      throw std::logic_error("inverse DFT of conjugate-symmetric coefficients is not real");
    }
    d[q] = time[q].real();
  }
  return d;
}

PtvirSet::PtvirSet(std::vector<double> d_base, int block_advance, int b_bin)
    : d_base_(std::move(d_base)), block_advance_(block_advance), b_bin_(b_bin) {
  if (d_base_.empty()) throw DimensionError("empty base response");
  if (block_advance_ < 1 || block_advance_ > static_cast<int>(d_base_.size())) {
    throw InputError("block advance must lie in [1, N]");
  }
}

double PtvirSet::d(int n, int q) const {
  return d_base_[static_cast<std::size_t>(wrap(static_cast<long long>(q) + n - block_advance_ + 1,
                                               n_fft()))];
}

std::vector<double> PtvirSet::phase_response(int n) const {
  if (n < 0 || n >= block_advance_) throw std::out_of_range("phase index outside [0, M)");
  std::vector<double> out(d_base_.size());
  for (int q = 0; q < n_fft(); ++q) out[q] = d(n, q);
  return out;
}

std::vector<double> PtvirSet::impulse_response(int n) const {
  if (n < 0 || n >= block_advance_) throw std::out_of_range("phase index outside [0, M)");
  const int n_fft = this->n_fft();
  std::vector<double> out(static_cast<std::size_t>(n_fft + block_advance_ - 1), 0.0);
  for (int q = n; q < n + n_fft; ++q) {
    out[q] = d_base_[static_cast<std::size_t>(wrap(q - block_advance_ + 1, n_fft))];
  }
  return out;
}

PtvirSet make_ptvir(const DftCoefficientSet& coeffs, const DiscretizedSpec& disc) {
  if (coeffs.n_fft() != disc.n_fft) throw DimensionError("coefficient length differs from N");
  return PtvirSet(base_response(coeffs), disc.block_advance, coeffs.b_bin());
}

std::vector<double> uniform_grid(double from, double to, int points) {
  if (points < 2) throw InputError("a grid needs at least two points");
  if (!(to > from)) throw InputError("grid bounds must be increasing");
  std::vector<double> g(static_cast<std::size_t>(points));
  const double step = (to - from) / (points - 1);
  for (int i = 0; i < points; ++i) g[i] = from + step * i;
  g.back() = to;
  return g;
}

std::vector<std::complex<double>> frequency_response(const PtvirSet& set, int n,
                                                     std::span<const double> omega) {
  const auto dn = set.phase_response(n);
  std::vector<std::complex<double>> out(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) {
    std::complex<double> acc = 0.0;
    for (int q = 0; q < set.n_fft(); ++q) acc += dn[q] * std::polar(1.0, -omega[i] * (q + n));
    out[i] = acc;
  }
  return out;
}

std::vector<std::complex<double>> frequency_response_fft(const PtvirSet& set, int n, int points) {
  const int len = 2 * (points - 1);
  if (points < 2 || len < set.n_fft()) {
    throw InputError("zero-padded grid must have at least N/2 + 1 points");
  }
  const auto dn = set.phase_response(n);
  std::vector<std::complex<double>> padded(static_cast<std::size_t>(len), 0.0);
  std::copy(dn.begin(), dn.end(), padded.begin());
  std::vector<std::complex<double>> spectrum(padded.size());
  make_complex_transform(padded.size())->forward(padded, spectrum);
  std::vector<std::complex<double>> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double w = kPi * i / (points - 1);
    out[i] = std::polar(1.0, -w * n) * spectrum[i];
  }
  return out;
}

Eigen::MatrixXd phase_power_responses(const PtvirSet& set, int phases,
                                      std::span<const double> omega) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(omega.size()), phases);
  for_each_phase(set, phases, omega, [&](int n, std::span<const std::complex<double>> h) {
    for (std::size_t i = 0; i < h.size(); ++i) out(static_cast<Eigen::Index>(i), n) = std::norm(h[i]);
  });
  return out;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("trapezoid: grid and values differ in length");
  CompensatedSum acc;
  for (std::size_t i = 1; i < x.size(); ++i) acc.add(0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]));
  return acc.value();
}

double StopbandMetrics::sbml_db() const { return power_db(peak_power); }

double StopbandMetrics::sbe_mean_db() const {
  if (sbe.empty()) return kDbFloor;
  CompensatedSum acc;
  for (double e : sbe) acc.add(power_db(e));
  return acc.value() / static_cast<double>(sbe.size());
}

double StopbandMetrics::sbe_energy_db() const {
  if (sbe.empty()) return kDbFloor;
  CompensatedSum acc;
  for (double e : sbe) acc.add(e);
  return power_db(acc.value() / static_cast<double>(sbe.size()));
}

double StopbandMetrics::sbe_max_db() const {
  return sbe.empty() ? kDbFloor : power_db(*std::max_element(sbe.begin(), sbe.end()));
}

int metric_grid_points(const DiscretizedSpec& disc) { return 16 * disc.n_fft; }

StopbandMetrics stopband_metrics_from(const PtvirSet& set, double stopband_edge,
                                      int grid_points_per_pi) {
  if (!(stopband_edge < kPi)) throw InputError("empty stopband");
  if (grid_points_per_pi < 1) throw InputError("grid density must be positive");
  const auto omega = grid_over(stopband_edge, kPi, grid_points_per_pi);
  const Eigen::MatrixXd power = phase_power_responses(set, set.block_advance(), omega);
  StopbandMetrics m;
  m.sbe.resize(static_cast<std::size_t>(set.block_advance()));
  std::vector<double> column(omega.size());
  for (int n = 0; n < set.block_advance(); ++n) {
    for (std::size_t i = 0; i < omega.size(); ++i) column[i] = power(static_cast<Eigen::Index>(i), n);
    m.sbe[n] = trapezoid(omega, column) / kPi;
  }
  m.peak_power = power.size() ? power.maxCoeff() : 0.0;
  return m;
}

StopbandMetrics stopband_metrics(const PtvirSet& set, const DiscretizedSpec& disc,
                                 int grid_points_per_pi) {
  const double edge = disc.bin_to_rad(set.b_bin()) + disc.delta_truncated / 2.0;
  return stopband_metrics_from(set, edge,
                               grid_points_per_pi > 0 ? grid_points_per_pi : metric_grid_points(disc));
}

RangeMetrics evaluate_bins(const DiscretizedSpec& disc, const TransitionCoeffs& v,
                           int grid_points_per_pi) {
  v.check(disc);
  std::vector<BinMetrics> rows(static_cast<std::size_t>(disc.bin_count()));
  parallel_for(rows.size(), [&](std::size_t i) {
    const int bin = disc.b_bins_lower + static_cast<int>(i);
    const auto set = make_ptvir(build_coefficients(disc, v, bin), disc);
    rows[i] = {bin, disc.bin_to_rad(bin), stopband_metrics(set, disc, grid_points_per_pi)};
  });
  return aggregate(std::move(rows));
}

RangeMetrics evaluate_continuous(const DiscretizedSpec& disc, const TransitionCoeffs& v,
                                 double b_lower, double b_upper, double delta, int samples,
                                 int grid_points_per_pi) {
  v.check(disc);
  if (samples < 1) throw InputError("need at least one bandwidth sample");
  if (b_upper < b_lower) throw InputError("bandwidth range inverted");
  const int density = grid_points_per_pi > 0 ? grid_points_per_pi : metric_grid_points(disc);
  std::vector<BinMetrics> rows(static_cast<std::size_t>(samples));
  parallel_for(rows.size(), [&](std::size_t i) {
    const double b = samples == 1 ? b_lower
                                  : b_lower + (b_upper - b_lower) * static_cast<double>(i) /
                                                  static_cast<double>(samples - 1);
    const int bin = bandwidth_to_bin(b, disc).bin;
    const auto set = make_ptvir(build_coefficients(disc, v, bin), disc);
    rows[i] = {bin, b, stopband_metrics_from(set, b + delta / 2.0, density)};
  });
  return aggregate(std::move(rows));
}

Eigen::MatrixXd sbe_profile(const DiscretizedSpec& disc, const TransitionCoeffs& v,
                            int grid_points_per_pi) {
  const auto metrics = evaluate_bins(disc, v, grid_points_per_pi);
  Eigen::MatrixXd out(disc.block_advance, disc.bin_count());
  for (int b = 0; b < disc.bin_count(); ++b) {
    const auto& sbe = metrics.per_setting[static_cast<std::size_t>(b)].stopband.sbe;
    for (int n = 0; n < disc.block_advance; ++n) out(n, b) = sbe[n];
  }
  return out;
}

double numeric_error_energy(const TransitionCoeffs& v, const DiscretizedSpec& disc,
                            PhaseLimitMode mode, int grid_points_per_pi,
                            const DesignWeights* weights) {
  v.check(disc);
  const int density = grid_points_per_pi > 0 ? grid_points_per_pi : 64 * disc.n_fft;
  const int phases = phase_count(disc, mode);
  if (weights && (weights->w.rows() != phases || weights->w.cols() != disc.bin_count())) {
    throw DimensionError("weights do not match the phase and bin counts");
  }
  std::vector<double> per_bin(static_cast<std::size_t>(disc.bin_count()));
  parallel_for(per_bin.size(), [&](std::size_t bi) {
    const int bin = disc.b_bins_lower + static_cast<int>(bi);
    const double b = disc.bin_to_rad(bin);
    const double pass_edge = b - disc.delta_truncated / 2.0;
    const double stop_edge = b + disc.delta_truncated / 2.0;
    // for_each_phase needs M only for the d_n shift, so N phases are fine.
    const PtvirSet set(base_response(build_coefficients(disc, v, bin)), disc.block_advance, bin);
    std::vector<double> pass_grid;
    if (pass_edge > 0.0) pass_grid = grid_over(0.0, pass_edge, density);
    const auto stop_grid = grid_over(stop_edge, kPi, density);

    std::vector<double> pass_err(pass_grid.size()), stop_err(stop_grid.size());
    std::vector<double> pass_energy(static_cast<std::size_t>(phases), 0.0);
    std::vector<double> stop_energy(static_cast<std::size_t>(phases), 0.0);
    if (!pass_grid.empty()) {
      for_each_phase(set, phases, pass_grid, [&](int n, std::span<const std::complex<double>> h) {
        for (std::size_t i = 0; i < h.size(); ++i) {
          const auto desired = std::polar(1.0, -pass_grid[i] * disc.delay_system);
          pass_err[i] = std::norm(h[i] - desired);
        }
        pass_energy[n] = trapezoid(pass_grid, pass_err);
      });
    }
    for_each_phase(set, phases, stop_grid, [&](int n, std::span<const std::complex<double>> h) {
      for (std::size_t i = 0; i < h.size(); ++i) stop_err[i] = std::norm(h[i]);
      stop_energy[n] = trapezoid(stop_grid, stop_err);
    });
    CompensatedSum acc;
    for (int n = 0; n < phases; ++n) {
      const double w = weights ? weights->w(n, static_cast<Eigen::Index>(bi)) : 1.0;
      acc.add(w * w * (pass_energy[n] + stop_energy[n]) / kPi);
    }
    per_bin[bi] = acc.value();
  });
  CompensatedSum total;
  for (double e : per_bin) total.add(e);
  return total.value();
}

}  // namespace vbw
