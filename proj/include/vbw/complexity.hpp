#pragma once

#include <optional>
#include <string>
#include <vector>

namespace vbw {

/// Split-radix real-FFT operation counts for one N-point transform.
struct FftCosts {
  long long multiplications = 0;  ///< C_mf = N log2(N)/2 - 3N/2 + 2
  long long additions = 0;        ///< C_a  = 3N log2(N)/2 - 5N/2 + 4
};

/// Throws InputError unless N is a power of two >= 4.
FftCosts fft_costs(int n_fft);

/// Arithmetic cost of the overlap-save realization per output sample. Rates
/// are kept as exact numerator / M pairs.
struct ComplexityReport {
  int n_fft = 0;
  int filter_length = 0;
  int block_advance = 0;
  int k_transition = 0;
  FftCosts fft;
  long long r_mf_numerator = 0;  ///< N log2 N - 3N + 4
  long long r_mv_numerator = 0;  ///< 2K
  long long r_a_numerator = 0;   ///< 3N log2 N - 5N + 8
  long long memory_words = 0;    ///< K stored transition values
  double reconfig_mults_per_sample = 0.0;  ///< 1/M

  double r_mf() const { return static_cast<double>(r_mf_numerator) / block_advance; }
  double r_mv() const { return static_cast<double>(r_mv_numerator) / block_advance; }
  double r_a() const { return static_cast<double>(r_a_numerator) / block_advance; }
};

/// Throws InputError if M = N - L + 1 < 1.
ComplexityReport rates(int n_fft, int filter_length, int k_transition);

/// One decimal, halves away from zero, trailing ".0" dropped ("21", "5.3").
std::string format_rate(double value);

/// One row of a complexity / approximation-error comparison. Rows built
/// from a design carry computed values; baseline rows carry published
/// numbers verbatim as text.
struct ComparisonRow {
  std::string label;
  std::string l, n, m, r_mf, r_mv, r_a, r_md, r_ad, mem, sbml, sbe;
};

ComparisonRow make_row(const std::string& label, const ComplexityReport& report,
                       std::optional<double> sbml_db, std::optional<double> sbe_db);

/// Published baseline rows for the two comparison tables. `table` is 2 or 3;
/// any other value gives no rows.
std::vector<ComparisonRow> published_baselines(int table);

enum class TableFormat { Markdown, Csv };

std::string comparison_table(const std::vector<ComparisonRow>& rows, TableFormat format);

}  // namespace vbw
