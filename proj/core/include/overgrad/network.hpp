#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>

#include "overgrad/dataset.hpp"
#include "overgrad/linalg.hpp"

namespace overgrad {

/// Two-layer ReLU network f(x) = m^{-1/2} sum_r a_r relu(<w_r, x>).
///
/// Only the first layer W is trainable. The output signs are fixed at
/// construction and exposed read-only.
class NetworkState {
 public:
  NetworkState(Matrix weights, Vector signs, std::uint64_t seed = 0);

  std::size_t m() const noexcept { return weights_.rows(); }
  std::size_t d() const noexcept { return weights_.cols(); }
  std::uint64_t seed() const noexcept { return seed_; }

  const Matrix& weights() const noexcept { return weights_; }
  Matrix& weights() noexcept { return weights_; }
  std::span<const double> signs() const noexcept { return signs_; }

  friend bool operator==(const NetworkState&, const NetworkState&) = default;

 private:
  Matrix weights_;
  Vector signs_;
  std::uint64_t seed_;
};

/// W_ij ~ N(0,1), a_r ~ U{-1,+1}, from independent streams of `seed`.
NetworkState init_network(std::size_t m, std::size_t d, std::uint64_t seed);

/// Predictions u and residual r = u - y at one set of weights.
struct Residual {
  Vector predictions;
  Vector diff;
  /// |y - u|
  double norm = 0.0;
};

double loss(const Residual& res) noexcept;

/// Pre-activations <w_r, x_i> laid out n x m, shared by prediction, gradient
/// and activation-pattern consumers within one iteration.
Matrix preactivations(const NetworkState& net, const Dataset& data);

struct ForwardPass {
  Matrix preacts;
  Residual residual;
};

ForwardPass forward(const NetworkState& net, const Dataset& data);
Residual predict(const NetworkState& net, const Dataset& data);

/// dL/dW, m x d. Row r is (a_r / sqrt(m)) sum_i (u_i - y_i) x_i 1{<w_r, x_i> >= 0}.
Matrix gradient(const NetworkState& net, const Dataset& data, const Residual& res);
Matrix gradient(const NetworkState& net, const Dataset& data, const ForwardPass& pass);

double grad_max_row_norm(const Matrix& grad) noexcept;

/// Binary checkpoint, little-endian:
///   "OGNS" | u32 version=1 | u64 m | u64 d | u64 seed | m*d f64 W (row-major) | m i8 a
void save_network(const NetworkState& net, const std::filesystem::path& path);
NetworkState load_network(const std::filesystem::path& path);

}  // namespace overgrad
