#include "overgrad/trace_io.hpp"

#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "number_format.hpp"
#include "overgrad/error.hpp"

namespace overgrad {
namespace {

std::string cell(const std::optional<double>& v) {
  return v ? detail::format_double(*v) : std::string();
}

std::optional<double> optional_double(std::string_view field, std::size_t line_no) {
  if (field.empty()) return std::nullopt;
  const auto v = detail::parse_double(field);
  if (!v) {
    throw FormatError("trace line " + std::to_string(line_no) + ": bad number '" +
                      std::string(field) + "'");
  }
  return v;
}

double required_double(std::string_view field, std::size_t line_no) {
  const auto v = optional_double(field, line_no);
  if (!v) throw FormatError("trace line " + std::to_string(line_no) + ": missing value");
  return *v;
}

}  // namespace

void write_trace_csv(const TrainTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << kTraceHeader << '\n';
  for (const TraceRow& row : trace.rows) {
    out << row.k << ',' << detail::format_double(row.loss) << ','
        << detail::format_double(row.residual_norm) << ',' << detail::format_double(row.b) << ','
        << cell(row.eta_eff) << ',' << cell(row.lambda_min) << ',' << cell(row.lambda_max) << ','
        << cell(row.max_drift) << ',' << (row.flip_count ? std::to_string(*row.flip_count) : "")
        << ',' << detail::format_double(row.grad_max_row_norm) << '\n';
  }
  if (!out) throw FormatError("failed writing " + path.string());
}

TrainTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw FormatError(path.string() + ": unexpected trace header");
  }
  TrainTrace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::size_t start = 0;
    for (;;) {
      const std::size_t pos = line.find(',', start);
      f.push_back(std::string_view(line).substr(
          start, pos == std::string::npos ? std::string::npos : pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (f.size() != 10) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected 10 fields");
    }
    TraceRow row;
    row.k = static_cast<std::size_t>(required_double(f[0], line_no));
    row.loss = required_double(f[1], line_no);
    row.residual_norm = required_double(f[2], line_no);
    row.b = required_double(f[3], line_no);
    row.eta_eff = optional_double(f[4], line_no);
    row.lambda_min = optional_double(f[5], line_no);
    row.lambda_max = optional_double(f[6], line_no);
    row.max_drift = optional_double(f[7], line_no);
    if (const auto flips = optional_double(f[8], line_no)) {
      row.flip_count = static_cast<std::size_t>(*flips);
    }
    row.grad_max_row_norm = required_double(f[9], line_no);
    trace.rows.push_back(row);
  }
  // Totals recoverable from the rows; flags such as converged live in summary.json.
  trace.summary.final_loss =
      trace.rows.empty() ? std::numeric_limits<double>::quiet_NaN() : trace.rows.back().loss;
  for (const auto& row : trace.rows) trace.summary.iterations += row.eta_eff.has_value();
  return trace;
}

}  // namespace overgrad
