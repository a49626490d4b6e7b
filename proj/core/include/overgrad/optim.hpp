#pragma once

#include <cstddef>
#include <string_view>

#include "overgrad/dataset.hpp"
#include "overgrad/network.hpp"
#include "overgrad/spectral.hpp"

namespace overgrad {

/// Rule used to grow the step-size denominator b.
///
///  AdaLoss      b'^2 = b^2 + alpha^2 sqrt(n) |y - u|
///  GradNorm     b'^2 = b^2 + alpha^2 sqrt(m) max_r |dL/dw_r|
///  LossSquared  b'^2 = b^2 + alpha^2 sqrt(n) |y - u|^2
///  LossLinear   b'   = b   + alpha   sqrt(n) |y - u|
enum class BUpdate { AdaLoss, GradNorm, LossSquared, LossLinear };

BUpdate parse_b_update(std::string_view name);
std::string_view to_string(BUpdate variant);

/// Fixed-step gradient descent.
struct GdConfig {
  double eta = 0.0;
  /// Multiplier applied to 1 / lambda_max when the rate is derived from a spectrum.
  double c_eta = 1.0;
  std::size_t max_iters = 1000;
  double epsilon = 1e-3;

  void validate() const;
};

/// c_eta / lambda_max.
double suggested_gd_eta(const SpectralSummary& spectrum, double c_eta = 1.0);

struct StepResult {
  NetworkState net;
  /// Residual at the new weights.
  Residual residual;
};

/// W' = W - eta dL/dW.
StepResult gd_step(const NetworkState& net, const Dataset& data, double eta);

/// Scalar state of the adaptive methods. b never drops below b0.
struct AdaLossState {
  double b = 1.0;
  double b0 = 1.0;
  double eta = 1.0;
  double alpha = 1.0;
  double epsilon = 1e-3;
  std::size_t k = 0;
  BUpdate variant = BUpdate::AdaLoss;

  static AdaLossState initial(double b0, double eta, double alpha, double epsilon,
                              BUpdate variant = BUpdate::AdaLoss);

  double effective_step() const noexcept { return eta / b; }
  void validate() const;
};

/// What the b-update consumes at one iteration.
struct UpdateSignal {
  double residual_norm = 0.0;
  double grad_max_row_norm = 0.0;
  std::size_t n = 0;
  std::size_t m = 0;
};

/// New b under state.variant.
double b_update_variant(const AdaLossState& state, const UpdateSignal& signal);

struct AdaStepResult {
  AdaLossState state;
  NetworkState net;
  /// Residual at the new weights.
  Residual residual;
};

/// One adaptive iteration: b is grown from the residual at the current
/// weights, then W' = W - (eta / b_{k+1}) dL/dW. Works for every variant.
AdaStepResult adaloss_step(const AdaLossState& state, const NetworkState& net,
                           const Dataset& data);

}  // namespace overgrad
