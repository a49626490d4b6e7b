#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "overgrad/linalg.hpp"

namespace overgrad {

/// Row-norm tolerance enforced on every Dataset.
inline constexpr double kUnitNormTolerance = 1e-12;

/// How synthetic labels are produced.
///  - Uniform: y_i ~ U[-1, 1].
///  - Teacher: y_i = f(W*, a*, x_i) for a freshly initialised network of width
///    kTeacherWidth, clipped to [-1, 1].
enum class LabelMode { Uniform, Teacher };

inline constexpr std::size_t kTeacherWidth = 100;

LabelMode parse_label_mode(std::string_view name);
std::string_view to_string(LabelMode mode);

/// n unit-norm feature rows in R^d and bounded labels. Immutable once built.
class Dataset {
 public:
  /// Validates every invariant; throws DataError / InvalidArgument otherwise.
  Dataset(Matrix features, Vector labels, double label_bound = 1.0);

  std::size_t n() const noexcept { return features_.rows(); }
  std::size_t d() const noexcept { return features_.cols(); }
  const Matrix& features() const noexcept { return features_; }
  std::span<const double> x(std::size_t i) const noexcept { return features_.row(i); }
  std::span<const double> labels() const noexcept { return labels_; }
  double label_bound() const noexcept { return label_bound_; }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  Matrix features_;
  Vector labels_;
  double label_bound_;
};

Dataset gen_iid_gaussian(std::size_t n, std::size_t d, std::uint64_t seed,
                         LabelMode label_mode = LabelMode::Uniform);

/// Rows share a common Gaussian component:
///
///     z_i = sqrt(1 - rho) g_i + sqrt(rho) g_0,   x_i = z_i / |z_i|
///
/// with g_0, g_1..g_n i.i.d. N(0, I_d). Each coordinate column is therefore
/// N(0, (1 - rho) I_n + rho 1 1^T) across samples, so pairwise inner products
/// concentrate near rho. The g_i are drawn from the same stream as
/// gen_iid_gaussian, so rho = 0 reproduces it exactly.
Dataset gen_correlated_gaussian(std::size_t n, std::size_t d, std::uint64_t seed, double rho,
                                LabelMode label_mode = LabelMode::Uniform);

struct CsvLoadOptions {
  /// Rescale rows to unit norm instead of rejecting them.
  bool normalize = false;
  double label_bound = 1.0;
  /// When nonzero, the header must declare exactly this many feature columns.
  std::size_t expected_d = 0;
};

/// Header `x0,...,x{d-1},y`, shortest round-trip decimals, LF line endings.
Dataset load_csv(const std::filesystem::path& path, const CsvLoadOptions& options = {});
void save_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace overgrad
