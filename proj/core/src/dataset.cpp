#include "overgrad/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "overgrad/error.hpp"
#include "overgrad/network.hpp"
#include "overgrad/rng.hpp"
#include "number_format.hpp"

namespace overgrad {
namespace {

void fill_unit_row(CounterRng& rng, std::span<double> row) {
  for (;;) {
    for (double& v : row) v = rng.normal();
    const double norm = norm2(row);
    if (norm > 0.0) {
      for (double& v : row) v /= norm;
      return;
    }
  }
}

Vector make_labels(const Matrix& features, std::uint64_t seed, LabelMode mode) {
  const std::size_t n = features.rows();
  Vector labels(n);
  if (mode == LabelMode::Uniform) {
    CounterRng rng(seed, Stream::Labels);
    for (double& y : labels) y = rng.uniform(-1.0, 1.0);
    return labels;
  }
  const std::uint64_t teacher_seed = CounterRng(seed, Stream::Teacher).next_u64();
  const NetworkState teacher = init_network(kTeacherWidth, features.cols(), teacher_seed);
  // Labels are unknown here; predict against zero targets.
  const Dataset probe(features, Vector(n, 0.0));
  const Residual res = predict(teacher, probe);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::clamp(res.predictions[i], -1.0, 1.0);
  return labels;
}

void check_dims(std::size_t n, std::size_t d) {
  if (n == 0) throw InvalidArgument("dataset: n must be at least 1");
  if (d == 0) throw InvalidArgument("dataset: d must be at least 1");
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

LabelMode parse_label_mode(std::string_view name) {
  if (name == "uniform") return LabelMode::Uniform;
  if (name == "teacher") return LabelMode::Teacher;
  throw InvalidArgument("unknown label mode '" + std::string(name) + "'");
}

std::string_view to_string(LabelMode mode) {
  return mode == LabelMode::Uniform ? "uniform" : "teacher";
}

Dataset::Dataset(Matrix features, Vector labels, double label_bound)
    : features_(std::move(features)), labels_(std::move(labels)), label_bound_(label_bound) {
  check_dims(features_.rows(), features_.cols());
  if (labels_.size() != features_.rows()) {
    throw DimensionMismatch("dataset: " + std::to_string(labels_.size()) + " labels for " +
                            std::to_string(features_.rows()) + " rows");
  }
  if (!(label_bound_ > 0.0)) throw InvalidArgument("dataset: label bound must be positive");
  if (!all_finite(features_.data()) || !all_finite(labels_)) {
    throw DataError("dataset: non-finite value");
  }
  for (std::size_t i = 0; i < n(); ++i) {
    const double norm = norm2(x(i));
    if (std::abs(norm - 1.0) > kUnitNormTolerance) {
      std::ostringstream msg;
      msg << "dataset: row " << i << " has norm " << norm << ", expected 1";
      throw DataError(msg.str());
    }
    if (std::abs(labels_[i]) > label_bound_) {
      std::ostringstream msg;
      msg << "dataset: label " << i << " = " << labels_[i] << " exceeds bound " << label_bound_;
      throw DataError(msg.str());
    }
  }
}

Dataset gen_iid_gaussian(std::size_t n, std::size_t d, std::uint64_t seed, LabelMode label_mode) {
  return gen_correlated_gaussian(n, d, seed, 0.0, label_mode);
}

Dataset gen_correlated_gaussian(std::size_t n, std::size_t d, std::uint64_t seed, double rho,
                                LabelMode label_mode) {
  check_dims(n, d);
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw InvalidArgument("gen_correlated_gaussian: rho must lie in [0, 1)");
  }
  Matrix features(n, d);
  CounterRng rng(seed, Stream::Features);
  if (rho == 0.0) {
    for (std::size_t i = 0; i < n; ++i) fill_unit_row(rng, features.row(i));
  } else {
    CounterRng shared_rng(seed, Stream::SharedComponent);
    Vector shared(d);
    for (double& v : shared) v = shared_rng.normal();
    const double own = std::sqrt(1.0 - rho);
    const double common = std::sqrt(rho);
    Vector z(d);
    for (std::size_t i = 0; i < n; ++i) {
      auto row = features.row(i);
      for (;;) {
        for (double& v : z) v = rng.normal();
        if (norm2(z) == 0.0) continue;
        for (std::size_t j = 0; j < d; ++j) row[j] = own * z[j] + common * shared[j];
        const double norm = norm2(row);
        if (norm > 0.0) {
          for (double& v : row) v /= norm;
          break;
        }
      }
    }
  }
  Vector labels = make_labels(features, seed, label_mode);
  return Dataset(std::move(features), std::move(labels));
}

Dataset load_csv(const std::filesystem::path& path, const CsvLoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line, ',');
  const std::size_t columns = header.size();
  if (options.expected_d != 0 && columns != options.expected_d + 1) {
    throw FormatError(path.string() + ": expected " + std::to_string(options.expected_d + 1) +
                      " columns (" + std::to_string(options.expected_d) +
                      " features + label), found " + std::to_string(columns));
  }
  if (columns < 2 || header.back() != "y") {
    throw FormatError(path.string() + ": header must be x0,...,x{d-1},y");
  }
  const std::size_t d = columns - 1;
  for (std::size_t j = 0; j < d; ++j) {
    if (header[j] != "x" + std::to_string(j)) {
      throw FormatError(path.string() + ": header column " + std::to_string(j) + " must be x" +
                        std::to_string(j));
    }
  }

  std::vector<double> values;
  Vector labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != columns) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": row has " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(columns));
    }
    for (std::size_t j = 0; j < columns; ++j) {
      const auto parsed = detail::parse_double(fields[j]);
      if (!parsed) {
        throw FormatError(path.string() + ":" + std::to_string(line_no) + ": bad number '" +
                          std::string(fields[j]) + "'");
      }
      if (!std::isfinite(*parsed)) {
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": non-finite value");
      }
      if (j < d) {
        values.push_back(*parsed);
      } else {
        labels.push_back(*parsed);
      }
    }
  }
  const std::size_t n = labels.size();
  if (n == 0) throw FormatError(path.string() + ": no data rows");

  Matrix features(n, d);
  std::copy(values.begin(), values.end(), features.data().begin());
  if (options.normalize) {
    for (std::size_t i = 0; i < n; ++i) {
      auto row = features.row(i);
      const double norm = norm2(row);
      if (norm == 0.0) throw DataError("zero row cannot be normalized");
      for (double& v : row) v /= norm;
    }
  }
  return Dataset(std::move(features), std::move(labels), options.label_bound);
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  for (std::size_t j = 0; j < data.d(); ++j) out << 'x' << j << ',';
  out << "y\n";
  for (std::size_t i = 0; i < data.n(); ++i) {
    for (double v : data.x(i)) out << detail::format_double(v) << ',';
    out << detail::format_double(data.labels()[i]) << '\n';
  }
  if (!out) throw FormatError("failed writing " + path.string());
}

}  // namespace overgrad
