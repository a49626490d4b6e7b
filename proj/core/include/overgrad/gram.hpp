#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "overgrad/dataset.hpp"
#include "overgrad/linalg.hpp"
#include "overgrad/network.hpp"

namespace overgrad {

/// Unit-norm precondition used by h_infinity.
inline constexpr double kGramUnitNormTolerance = 1e-9;

enum class GramKind : std::uint8_t { Infinite = 0, Empirical = 1 };

std::string_view to_string(GramKind kind);

struct GramMatrix {
  Matrix entries;
  GramKind kind = GramKind::Infinite;

  std::size_t n() const noexcept { return entries.rows(); }
};

/// H_inf_ij = <x_i,x_j> (pi - arccos <x_i,x_j>) / (2 pi), inner product
/// clamped to [-1, 1]; the diagonal is exactly 0.5.
GramMatrix h_infinity(const Dataset& data);

/// Bit table of activation patterns 1{<w_r, x_i> >= 0}, one row per example.
class ActivationTable {
 public:
  ActivationTable() = default;
  explicit ActivationTable(const Matrix& preacts);

  std::size_t n() const noexcept { return n_; }
  std::size_t m() const noexcept { return m_; }
  bool active(std::size_t i, std::size_t r) const noexcept {
    return (bits_[i * words_ + r / 64] >> (r % 64)) & 1u;
  }
  /// Number of neurons active on both i and j.
  std::size_t common(std::size_t i, std::size_t j) const noexcept;
  /// Number of (i, r) pairs whose pattern differs from `other`.
  std::size_t differences(const ActivationTable& other) const;

 private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
};

/// H_ij = (1/m) sum_r <x_i,x_j> 1{<w_r,x_i> >= 0, <w_r,x_j> >= 0}.
GramMatrix h_empirical(const Dataset& data, const NetworkState& net);
GramMatrix h_empirical(const Dataset& data, const ActivationTable& pattern);

/// n x n CSV without header, same number format as the dataset CSV.
void save_gram_csv(const GramMatrix& gram, const std::filesystem::path& path);
GramMatrix load_gram_csv(const std::filesystem::path& path, GramKind kind);

/// "OGGM" | u32 version=1 | u8 kind | u64 n | upper triangle (row-major, i <= j) f64.
void save_gram_binary(const GramMatrix& gram, const std::filesystem::path& path);
GramMatrix load_gram_binary(const std::filesystem::path& path);

}  // namespace overgrad
