#include "overgrad/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "binary_io.hpp"
#include "overgrad/error.hpp"
#include "overgrad/parallel.hpp"
#include "overgrad/rng.hpp"

namespace overgrad {
namespace {

constexpr std::size_t kRowBlock = 64;

void require_same_d(const NetworkState& net, const Dataset& data, const char* where) {
  if (net.d() != data.d()) {
    throw DimensionMismatch(std::string(where) + ": network d=" + std::to_string(net.d()) +
                            " but data d=" + std::to_string(data.d()));
  }
}

Residual residual_from(const Matrix& preacts, const NetworkState& net, const Dataset& data) {
  const std::size_t n = data.n();
  const std::size_t m = net.m();
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
  const auto signs = net.signs();
  const auto labels = data.labels();
  Residual res;
  res.predictions.assign(n, 0.0);
  res.diff.assign(n, 0.0);
  parallel_for(0, n, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const auto p = preacts.row(i);
      double u = 0.0;
      for (std::size_t r = 0; r < m; ++r) {
        if (p[r] > 0.0) u += signs[r] * p[r];
      }
      res.predictions[i] = u * inv_sqrt_m;
      res.diff[i] = res.predictions[i] - labels[i];
    }
  });
  res.norm = norm2(res.diff);
  return res;
}

}  // namespace

NetworkState::NetworkState(Matrix weights, Vector signs, std::uint64_t seed)
    : weights_(std::move(weights)), signs_(std::move(signs)), seed_(seed) {
  if (weights_.rows() == 0 || weights_.cols() == 0) {
    throw InvalidArgument("network: m and d must be at least 1");
  }
  if (signs_.size() != weights_.rows()) {
    throw DimensionMismatch("network: " + std::to_string(signs_.size()) + " signs for " +
                            std::to_string(weights_.rows()) + " neurons");
  }
  if (!std::all_of(signs_.begin(), signs_.end(), [](double a) { return a == 1.0 || a == -1.0; })) {
    throw InvalidArgument("network: output signs must be exactly +1 or -1");
  }
  if (!all_finite(weights_.data())) throw InvalidArgument("network: non-finite weight");
}

NetworkState init_network(std::size_t m, std::size_t d, std::uint64_t seed) {
  if (m == 0 || d == 0) throw InvalidArgument("init_network: m and d must be at least 1");
  Matrix weights(m, d);
  CounterRng weight_rng(seed, Stream::Weights);
  for (double& w : weights.data()) w = weight_rng.normal();
  Vector signs(m);
  CounterRng sign_rng(seed, Stream::Signs);
  for (double& a : signs) a = sign_rng.rademacher();
  return NetworkState(std::move(weights), std::move(signs), seed);
}

double loss(const Residual& res) noexcept { return 0.5 * res.norm * res.norm; }

Matrix preactivations(const NetworkState& net, const Dataset& data) {
  require_same_d(net, data, "preactivations");
  const std::size_t n = data.n();
  const std::size_t m = net.m();
  Matrix out(n, m);
  const Matrix& w = net.weights();
  // Blocks of neurons stay cache resident while every example streams past.
  const std::size_t blocks = (m + kRowBlock - 1) / kRowBlock;
  parallel_for(0, blocks, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t b = lo; b < hi; ++b) {
      const std::size_t r0 = b * kRowBlock;
      const std::size_t r1 = std::min(m, r0 + kRowBlock);
      for (std::size_t i = 0; i < n; ++i) {
        const auto x = data.x(i);
        auto p = out.row(i);
        for (std::size_t r = r0; r < r1; ++r) p[r] = dot(w.row(r), x);
      }
    }
  });
  return out;
}

ForwardPass forward(const NetworkState& net, const Dataset& data) {
  ForwardPass pass;
  pass.preacts = preactivations(net, data);
  pass.residual = residual_from(pass.preacts, net, data);
  return pass;
}

Residual predict(const NetworkState& net, const Dataset& data) {
  return forward(net, data).residual;
}

Matrix gradient(const NetworkState& net, const Dataset& data, const ForwardPass& pass) {
  require_same_d(net, data, "gradient");
  const std::size_t n = data.n();
  const std::size_t m = net.m();
  const std::size_t d = data.d();
  if (pass.preacts.rows() != n || pass.preacts.cols() != m || pass.residual.diff.size() != n) {
    throw DimensionMismatch("gradient: forward pass does not match network and data");
  }
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
  const auto signs = net.signs();
  const auto& diff = pass.residual.diff;
  Matrix grad(m, d);
  // Each row r sums over i in increasing order regardless of the partition.
  parallel_for(0, m, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = 0; i < n; ++i) {
      if (diff[i] == 0.0) continue;
      const auto p = pass.preacts.row(i);
      const auto x = data.x(i);
      for (std::size_t r = lo; r < hi; ++r) {
        if (p[r] >= 0.0) axpy(diff[i], x, grad.row(r));
      }
    }
    for (std::size_t r = lo; r < hi; ++r) scale(signs[r] * inv_sqrt_m, grad.row(r));
  }, 16);
  return grad;
}

Matrix gradient(const NetworkState& net, const Dataset& data, const Residual& res) {
  ForwardPass pass;
  pass.preacts = preactivations(net, data);
  if (res.diff.size() != data.n()) {
    throw DimensionMismatch("gradient: residual length does not match data");
  }
  pass.residual = res;
  return gradient(net, data, pass);
}

double grad_max_row_norm(const Matrix& grad) noexcept {
  double worst = 0.0;
  for (std::size_t r = 0; r < grad.rows(); ++r) worst = std::max(worst, norm2(grad.row(r)));
  return worst;
}

void save_network(const NetworkState& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write("OGNS", 4);
  detail::write_pod<std::uint32_t>(out, 1);
  detail::write_pod<std::uint64_t>(out, net.m());
  detail::write_pod<std::uint64_t>(out, net.d());
  detail::write_pod<std::uint64_t>(out, net.seed());
  for (double w : net.weights().data()) detail::write_pod<double>(out, w);
  for (double a : net.signs()) detail::write_pod<std::int8_t>(out, a > 0 ? 1 : -1);
  if (!out) throw FormatError("failed writing " + path.string());
}

NetworkState load_network(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  detail::expect_magic(in, "OGNS");
  const auto version = detail::read_pod<std::uint32_t>(in);
  if (version != 1) throw FormatError("unsupported network checkpoint version");
  const auto m = detail::read_pod<std::uint64_t>(in);
  const auto d = detail::read_pod<std::uint64_t>(in);
  const auto seed = detail::read_pod<std::uint64_t>(in);
  Matrix weights(m, d);
  for (double& w : weights.data()) w = detail::read_pod<double>(in);
  Vector signs(m);
  for (double& a : signs) {
    const auto s = detail::read_pod<std::int8_t>(in);
    if (s != 1 && s != -1) throw FormatError("network checkpoint: sign byte must be +1 or -1");
    a = s;
  }
  return NetworkState(std::move(weights), std::move(signs), seed);
}

}  // namespace overgrad
