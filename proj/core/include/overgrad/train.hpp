#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "overgrad/dataset.hpp"
#include "overgrad/network.hpp"
#include "overgrad/optim.hpp"
#include "overgrad/spectral.hpp"

namespace overgrad {

enum class Method { GradientDescent, Adaptive };

Method parse_method(std::string_view name);
std::string_view to_string(Method method);

struct OptimizerConfig {
  Method method = Method::Adaptive;
  BUpdate variant = BUpdate::AdaLoss;
  double eta = 1.0;
  /// Adaptive only.
  double b0 = 1.0;
  double alpha = 1.0;
  /// Stop once |y - u|^2 / 2 <= epsilon.
  double epsilon = 1e-3;
  std::size_t max_iters = 1000;

  /// One message per violated field; empty when valid.
  std::vector<std::string> violations() const;
};

struct DiagnosticsConfig {
  /// Record lambda_min / lambda_max of H(k) when k % gram_every == 0.
  std::size_t gram_every = 1;
  std::size_t drift_every = 1;
  std::size_t flip_every = 1;
  /// T0 is the first k with b_k / eta >= threshold. Defaults to lambda_max(H(0)).
  std::optional<double> t0_threshold;
  EigenOptions eigen;

  std::vector<std::string> violations() const;
};

/// One row per evaluated iterate W(k).
///
/// loss, residual_norm, grad_max_row_norm, the Gram spectrum, drift and flips
/// all describe W(k). b is b_k, the denominator before iteration k's update
/// (1 for gradient descent). eta_eff is the step actually applied to W(k),
/// eta / b_{k+1}; it is empty on a terminal row where no step was taken.
struct TraceRow {
  std::size_t k = 0;
  double loss = 0.0;
  double residual_norm = 0.0;
  double b = 1.0;
  std::optional<double> eta_eff;
  std::optional<double> lambda_min;
  std::optional<double> lambda_max;
  std::optional<double> max_drift;
  std::optional<std::size_t> flip_count;
  double grad_max_row_norm = 0.0;
};

struct TraceSummary {
  bool converged = false;
  /// A non-finite loss stopped the run.
  bool diverged = false;
  /// Weight updates performed.
  std::size_t iterations = 0;
  std::optional<std::size_t> t0_observed;
  double t0_threshold = 0.0;
  /// Loss of the last row (NaN for an empty trace).
  double final_loss = 0.0;
};

struct TrainTrace {
  std::vector<TraceRow> rows;
  TraceSummary summary;
};

struct TrainResult {
  TrainTrace trace;
  NetworkState net;
};

/// Runs until the loss reaches epsilon, max_iters updates were made, or the
/// loss becomes non-finite. Deterministic in (data, net0, configs).
TrainResult run_training(const Dataset& data, const NetworkState& net0,
                         const OptimizerConfig& optimizer, const DiagnosticsConfig& diagnostics);

TrainTrace train(const Dataset& data, const NetworkState& net0, const OptimizerConfig& optimizer,
                 const DiagnosticsConfig& diagnostics);

}  // namespace overgrad
