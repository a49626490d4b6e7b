#include "overgrad/gram.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "binary_io.hpp"
#include "number_format.hpp"
#include "overgrad/error.hpp"
#include "overgrad/parallel.hpp"

namespace overgrad {

std::string_view to_string(GramKind kind) {
  return kind == GramKind::Infinite ? "infinite" : "empirical";
}

GramMatrix h_infinity(const Dataset& data) {
  const std::size_t n = data.n();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(norm2(data.x(i)) - 1.0) > kGramUnitNormTolerance) {
      throw DataError("h_infinity: row " + std::to_string(i) + " is not unit norm");
    }
  }
  GramMatrix out{Matrix(n, n), GramKind::Infinite};
  Matrix& h = out.entries;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  parallel_for(0, n, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      h(i, i) = 0.5;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double rho = std::clamp(dot(data.x(i), data.x(j)), -1.0, 1.0);
        const double v = rho * (std::numbers::pi - std::acos(rho)) / kTwoPi;
        h(i, j) = v;
        h(j, i) = v;
      }
    }
  });
  return out;
}

ActivationTable::ActivationTable(const Matrix& preacts)
    : n_(preacts.rows()), m_(preacts.cols()), words_((preacts.cols() + 63) / 64),
      bits_(n_ * words_, 0) {
  for (std::size_t i = 0; i < n_; ++i) {
    const auto p = preacts.row(i);
    std::uint64_t* row = bits_.data() + i * words_;
    for (std::size_t r = 0; r < m_; ++r) {
      if (p[r] >= 0.0) row[r / 64] |= std::uint64_t{1} << (r % 64);
    }
  }
}

std::size_t ActivationTable::common(std::size_t i, std::size_t j) const noexcept {
  const std::uint64_t* a = bits_.data() + i * words_;
  const std::uint64_t* b = bits_.data() + j * words_;
  std::size_t count = 0;
  for (std::size_t w = 0; w < words_; ++w) count += std::popcount(a[w] & b[w]);
  return count;
}

std::size_t ActivationTable::differences(const ActivationTable& other) const {
  if (other.n_ != n_ || other.m_ != m_) {
    throw DimensionMismatch("activation tables have different shapes");
  }
  std::size_t count = 0;
  for (std::size_t k = 0; k < bits_.size(); ++k) count += std::popcount(bits_[k] ^ other.bits_[k]);
  return count;
}

GramMatrix h_empirical(const Dataset& data, const ActivationTable& pattern) {
  const std::size_t n = data.n();
  if (pattern.n() != n) throw DimensionMismatch("h_empirical: pattern rows do not match data");
  const double m = static_cast<double>(pattern.m());
  GramMatrix out{Matrix(n, n), GramKind::Empirical};
  Matrix& h = out.entries;
  parallel_for(0, n, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      // <x_i, x_i> = 1 by the dataset invariant.
      h(i, i) = static_cast<double>(pattern.common(i, i)) / m;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double v = dot(data.x(i), data.x(j)) * static_cast<double>(pattern.common(i, j)) / m;
        h(i, j) = v;
        h(j, i) = v;
      }
    }
  });
  return out;
}

GramMatrix h_empirical(const Dataset& data, const NetworkState& net) {
  if (net.d() != data.d()) throw DimensionMismatch("h_empirical: network and data disagree on d");
  return h_empirical(data, ActivationTable(preactivations(net, data)));
}

void save_gram_csv(const GramMatrix& gram, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  const std::size_t n = gram.n();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j) out << ',';
      out << detail::format_double(gram.entries(i, j));
    }
    out << '\n';
  }
  if (!out) throw FormatError("failed writing " + path.string());
}

GramMatrix load_gram_csv(const std::filesystem::path& path, GramKind kind) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t count = 0;
    std::size_t start = 0;
    for (;;) {
      const std::size_t pos = line.find(',', start);
      const auto field = std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start);
      const auto v = detail::parse_double(field);
      if (!v) throw FormatError(path.string() + ": bad number '" + std::string(field) + "'");
      values.push_back(*v);
      ++count;
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (rows == 0) cols = count;
    if (count != cols) throw FormatError(path.string() + ": ragged gram matrix");
    ++rows;
  }
  if (rows != cols) throw FormatError(path.string() + ": gram matrix is not square");
  GramMatrix out{Matrix(rows, cols), kind};
  std::copy(values.begin(), values.end(), out.entries.data().begin());
  return out;
}

void save_gram_binary(const GramMatrix& gram, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write("OGGM", 4);
  detail::write_pod<std::uint32_t>(out, 1);
  detail::write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(gram.kind));
  detail::write_pod<std::uint64_t>(out, gram.n());
  for (std::size_t i = 0; i < gram.n(); ++i) {
    for (std::size_t j = i; j < gram.n(); ++j) detail::write_pod<double>(out, gram.entries(i, j));
  }
  if (!out) throw FormatError("failed writing " + path.string());
}

GramMatrix load_gram_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  detail::expect_magic(in, "OGGM");
  if (detail::read_pod<std::uint32_t>(in) != 1) throw FormatError("unsupported gram version");
  const auto kind_byte = detail::read_pod<std::uint8_t>(in);
  if (kind_byte > 1) throw FormatError("unknown gram kind");
  const auto n = detail::read_pod<std::uint64_t>(in);
  GramMatrix out{Matrix(n, n), static_cast<GramKind>(kind_byte)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = detail::read_pod<double>(in);
      out.entries(i, j) = v;
      out.entries(j, i) = v;
    }
  }
  return out;
}

}  // namespace overgrad
