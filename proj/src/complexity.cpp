#include "vbw/complexity.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "vbw/errors.hpp"

namespace vbw {
namespace {

std::string format_db(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", std::round(value * 10.0) / 10.0);
  return buf;
}

}  // namespace

FftCosts fft_costs(int n_fft) {
  if (n_fft < 4 || !std::has_single_bit(static_cast<unsigned>(n_fft))) {
    throw InputError("FFT length must be a power of two >= 4, got " + std::to_string(n_fft));
  }
  const long long n = n_fft;
  const long long log2n = std::countr_zero(static_cast<unsigned>(n_fft));
  // Both counts are exact integers for N = 2^Q >= 4; evaluate at 2x and halve.
  return {(n * log2n - 3 * n + 4) / 2, (3 * n * log2n - 5 * n + 8) / 2};
}

ComplexityReport rates(int n_fft, int filter_length, int k_transition) {
  const int m = n_fft - filter_length + 1;
  if (m < 1) throw InputError("block advance N - L + 1 must be >= 1");
  if (k_transition < 0) throw InputError("transition count must be non-negative");
  ComplexityReport r;
  r.n_fft = n_fft;
  r.filter_length = filter_length;
  r.block_advance = m;
  r.k_transition = k_transition;
  r.fft = fft_costs(n_fft);
  r.r_mf_numerator = 2 * r.fft.multiplications;
  r.r_mv_numerator = 2LL * k_transition;
  r.r_a_numerator = 2 * r.fft.additions;
  r.memory_words = k_transition;
  r.reconfig_mults_per_sample = 1.0 / m;
  return r;
}

std::string format_rate(double value) {
  const double rounded = std::round(value * 10.0) / 10.0;  // std::round rounds halves away
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", rounded);
  std::string s = buf;
  if (s.size() > 2 && s.compare(s.size() - 2, 2, ".0") == 0) s.resize(s.size() - 2);
  if (s == "-0") s = "0";
  return s;
}

ComparisonRow make_row(const std::string& label, const ComplexityReport& report,
                       std::optional<double> sbml_db, std::optional<double> sbe_db) {
  ComparisonRow row;
  row.label = label;
  row.l = std::to_string(report.filter_length);
  row.n = std::to_string(report.n_fft);
  row.m = std::to_string(report.block_advance);
  row.r_mf = format_rate(report.r_mf());
  row.r_mv = format_rate(report.r_mv());
  row.r_a = format_rate(report.r_a());
  // Retuning recomputes one rounded bin index per block: 1/M multiplications
  // per sample, shown as 0 at table precision.
  row.r_md = format_rate(0.0);
  row.r_ad = format_rate(0.0);
  row.mem = std::to_string(report.memory_words);
  row.sbml = sbml_db ? format_db(*sbml_db) : "-";
  row.sbe = sbe_db ? format_db(*sbe_db) : "-";
  return row;
}

std::vector<ComparisonRow> published_baselines(int table) {
  if (table == 2) {
    return {
        {"TD/TD (Farrow)", "29", "-", "-", "75", "4", "145", "0", "1", "1", "-61.9", "-78.3"},
        {"TD/FD (OLS)", "29", "128", "100", "5.2", "1.9", "23.8", "5.2", "5.1", "640", "-61.9",
         "-78.3"},
        {"FD/FD (minimax)", "31", "128", "98", "5.3", "0.3", "21", "0", "0", "15", "-61.2",
         "-83.6"},
    };
  }
  if (table == 3) {
    return {
        {"TD/TD (Farrow)", "27", "-", "-", "70", "4", "135", "0", "1", "1", "-63.1", "-81.3"},
        {"TD/FD (OLS)", "27", "128", "102", "5.1", "1.9", "23.3", "5.0", "5.0", "640", "-63.1",
         "-81.3"},
        {"FD/FD (minimax)", "31", "128", "98", "5.3", "0.3", "21", "0", "0", "15", "-61.2",
         "-86.9"},
    };
  }
  return {};
}

std::string comparison_table(const std::vector<ComparisonRow>& rows, TableFormat format) {
  static const char* const kHeader[] = {"Design", "L",    "N",    "M",   "R_mf", "R_mv",
                                        "R_a",    "R_md", "R_ad", "Mem", "SBML", "SBE"};
  std::ostringstream out;
  auto cells = [](const ComparisonRow& r) {
    return std::vector<std::string>{r.label, r.l,    r.n,    r.m,   r.r_mf, r.r_mv,
                                    r.r_a,   r.r_md, r.r_ad, r.mem, r.sbml, r.sbe};
  };
  if (format == TableFormat::Csv) {
    for (std::size_t i = 0; i < std::size(kHeader); ++i) out << (i ? "," : "") << kHeader[i];
    out << '\n';
    for (const auto& row : rows) {
      const auto c = cells(row);
      for (std::size_t i = 0; i < c.size(); ++i) {
        const bool quote = c[i].find_first_of(",\"") != std::string::npos;
        out << (i ? "," : "");
        if (quote) {
          out << '"';
          for (char ch : c[i]) out << (ch == '"' ? "\"\"" : std::string(1, ch));
          out << '"';
        } else {
          out << c[i];
        }
      }
      out << '\n';
    }
    return out.str();
  }
  out << '|';
  for (const char* h : kHeader) out << ' ' << h << " |";
  out << "\n|";
  for (std::size_t i = 0; i < std::size(kHeader); ++i) out << (i ? "---:|" : "---|");
  out << '\n';
  for (const auto& row : rows) {
    out << '|';
    for (const auto& c : cells(row)) out << ' ' << c << " |";
    out << '\n';
  }
  return out.str();
}

}  // namespace vbw
