#include <gtest/gtest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "../support/temp_dir.hpp"
#include "overgrad/overgrad.hpp"

namespace overgrad {
namespace {

Dataset single_point(Vector x, double y) {
  Matrix f(1, x.size());
  for (std::size_t c = 0; c < x.size(); ++c) f(0, c) = x[c];
  return Dataset(f, Vector{y}, 10.0);
}

NetworkState net_from(const std::vector<Vector>& rows, Vector signs) {
  Matrix w(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) w(r, c) = rows[r][c];
  return NetworkState(std::move(w), std::move(signs), 0);
}

Vector signs_of(const NetworkState& net) { return Vector(net.signs().begin(), net.signs().end()); }

Dataset with_labels(const Dataset& data, const Vector& y) { return Dataset(data.features(), y, 1e9); }

double rel_error(const Matrix& a, const Matrix& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    num += (a.data()[i] - b.data()[i]) * (a.data()[i] - b.data()[i]);
    den += b.data()[i] * b.data()[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

TEST(NetworkState, RejectsBadSigns) {
  EXPECT_THROW(NetworkState(Matrix(2, 2), Vector{1.0, 0.5}, 0), InvalidArgument);
  EXPECT_THROW(NetworkState(Matrix(2, 2), Vector{1.0}, 0), DimensionMismatch);
  EXPECT_THROW(NetworkState(Matrix(1, 1, NAN), Vector{1.0}, 0), InvalidArgument);
}

TEST(InitNetwork, Shape) {
  const NetworkState net = init_network(4, 3, 0);
  EXPECT_EQ(net.m(), 4u);
  EXPECT_EQ(net.d(), 3u);
  for (double a : net.signs()) EXPECT_TRUE(a == 1.0 || a == -1.0);
  EXPECT_THROW(init_network(0, 3, 0), InvalidArgument);
  EXPECT_THROW(init_network(3, 0, 0), InvalidArgument);
}

TEST(InitNetwork, WeightMoments) {
  const NetworkState net = init_network(10000, 100, 17);
  double s = 0, s2 = 0;
  for (double v : net.weights().data()) s += v, s2 += v * v;
  const double mean = s / 1e6;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(s2 / 1e6 - mean * mean, 1.0, 0.01);
}

TEST(InitNetwork, SignBalance) {
  const NetworkState net = init_network(1000000, 1, 17);
  double plus = 0;
  for (double a : net.signs()) plus += a > 0;
  EXPECT_NEAR(plus / 1e6, 0.5, 0.005);
}

TEST(InitNetwork, Deterministic) {
  const NetworkState a = init_network(30, 5, 9), b = init_network(30, 5, 9);
  EXPECT_EQ(a.weights(), b.weights());
  EXPECT_EQ(signs_of(a), signs_of(b));
}

TEST(Predict, HandEvaluation) {
  const Dataset data = single_point({1.0, 0.0}, 0.0);
  const NetworkState net = net_from({{1, 0}, {-1, 0}}, {1, -1});
  EXPECT_DOUBLE_EQ(predict(net, data).predictions[0], 1.0 / std::sqrt(2.0));
}

TEST(Predict, ZeroWeightsGiveZero) {
  const Dataset data = gen_iid_gaussian(6, 3, 1);
  const NetworkState net(Matrix(5, 3), signs_of(init_network(5, 3, 1)), 0);
  for (double u : predict(net, data).predictions) EXPECT_EQ(u, 0.0);
}

TEST(Predict, MatchesDoubleLoopOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dataset data = gen_iid_gaussian(5, 3, seed);
    const NetworkState net = init_network(7, 3, seed + 100);
    const Residual res = predict(net, data);
    const auto expect = oracle::predict(net, data);
    for (std::size_t i = 0; i < 5; ++i) {
      EXPECT_NEAR(res.predictions[i], expect[i], 1e-12);
      EXPECT_DOUBLE_EQ(res.diff[i], res.predictions[i] - data.labels()[i]);
    }
    double s = 0;
    for (double r : res.diff) s += r * r;
    EXPECT_NEAR(res.norm * res.norm, s, 1e-12);
  }
}

TEST(Predict, DimensionMismatch) {
  EXPECT_THROW(predict(init_network(3, 4, 0), gen_iid_gaussian(2, 3, 0)), DimensionMismatch);
}

TEST(Predict, PositiveHomogeneityPerRow) {
  const Dataset data = gen_iid_gaussian(4, 3, 2);
  NetworkState net = init_network(1, 3, 5);
  const double u1 = predict(net, data).predictions[0];
  for (double& v : net.weights().row(0)) v *= 2.5;
  EXPECT_NEAR(predict(net, data).predictions[0], 2.5 * u1, 1e-14);
}

TEST(Loss, HandValues) {
  Residual r;
  r.diff = {1, 0};
  r.norm = 1;
  EXPECT_DOUBLE_EQ(loss(r), 0.5);
  r.diff = {0, 0};
  r.norm = 0;
  EXPECT_EQ(loss(r), 0.0);
  r.diff = {3, 4};
  r.norm = 5;
  EXPECT_DOUBLE_EQ(loss(r), 12.5);
}

TEST(Loss, ZeroIffFit) {
  const Dataset data = gen_iid_gaussian(5, 3, 4);
  const NetworkState net = init_network(9, 3, 4);
  const Residual res = predict(net, data);
  EXPECT_GT(loss(res), 0.0);
  const Dataset fitted = with_labels(data, res.predictions);
  EXPECT_EQ(loss(predict(net, fitted)), 0.0);
}

TEST(Gradient, ZeroAtFit) {
  const Dataset data = gen_iid_gaussian(5, 3, 4);
  const NetworkState net = init_network(9, 3, 4);
  const Dataset fitted = with_labels(data, predict(net, data).predictions);
  const Matrix g = gradient(net, fitted, predict(net, fitted));
  for (double v : g.data()) EXPECT_EQ(v, 0.0);
}

TEST(Gradient, HandEvaluation) {
  const Dataset data = single_point({1.0, 0.0}, 0.0);
  const NetworkState net = net_from({{2, 0}}, {1});
  const Residual res = predict(net, data);
  EXPECT_DOUBLE_EQ(res.predictions[0], 2.0);
  const Matrix g = gradient(net, data, res);
  EXPECT_DOUBLE_EQ(g(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(g(0, 1), 0.0);
}

TEST(Gradient, IndicatorActiveAtZero) {
  const Dataset data = single_point({1.0, 0.0}, 1.0);
  const NetworkState net = net_from({{0, 3}}, {1});
  const Residual res = predict(net, data);
  const Matrix g = gradient(net, data, res);
  EXPECT_DOUBLE_EQ(g(0, 0), -1.0);
}

TEST(Gradient, ForwardPassOverloadAgrees) {
  const Dataset data = gen_iid_gaussian(8, 4, 1);
  const NetworkState net = init_network(33, 4, 2);
  EXPECT_EQ(gradient(net, data, forward(net, data)), gradient(net, data, predict(net, data)));
}

TEST(Gradient, FiniteDifferenceAwayFromKinks) {
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 10 && seed < 200; ++seed) {
    const Dataset data = gen_iid_gaussian(6, 4, seed);
    const NetworkState net = init_network(9, 4, seed + 1000);
    if (oracle::min_abs_preactivation(net, data) < 1e-3) continue;
    const Matrix g = gradient(net, data, predict(net, data));
    EXPECT_LE(rel_error(g, oracle::fd_gradient(net, data, 1e-6)), 1e-5) << "seed " << seed;
    ++checked;
  }
  EXPECT_EQ(checked, 10);
}

TEST(GradMaxRowNorm, HandValues) {
  EXPECT_EQ(grad_max_row_norm(Matrix(3, 2)), 0.0);
  Matrix g(2, 2);
  g(0, 0) = 3; g(0, 1) = 4; g(1, 0) = 1;
  EXPECT_DOUBLE_EQ(grad_max_row_norm(g), 5.0);
}

TEST(GradMaxRowNorm, UpperBoundedByResidual) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 2 + seed % 9, d = 1 + seed % 5, m = 1 + (seed * 7) % 40;
    const Dataset data = gen_iid_gaussian(n, d, seed);
    const NetworkState net = init_network(m, d, seed);
    const Residual res = predict(net, data);
    const double bound = std::sqrt(static_cast<double>(n) / static_cast<double>(m)) * res.norm;
    EXPECT_LE(grad_max_row_norm(gradient(net, data, res)), bound + 1e-12);
  }
}

TEST(Checkpoint, RoundTrip) {
  testing::TempDir dir("checkpoint");
  const NetworkState net = init_network(13, 4, 77);
  save_network(net, dir / "n.bin");
  const NetworkState back = load_network(dir / "n.bin");
  EXPECT_EQ(back.weights(), net.weights());
  EXPECT_EQ(signs_of(back), signs_of(net));
  EXPECT_EQ(back.seed(), 77u);
}

TEST(Checkpoint, RejectsGarbage) {
  testing::TempDir dir("checkpoint_bad");
  std::ofstream(dir / "bad.bin") << "not a network";
  EXPECT_THROW(load_network(dir / "bad.bin"), FormatError);
  const NetworkState net = init_network(13, 4, 77);
  save_network(net, dir / "n.bin");
  std::filesystem::resize_file(dir / "n.bin", 40);
  EXPECT_THROW(load_network(dir / "n.bin"), FormatError);
}

}  // namespace
}  // namespace overgrad
