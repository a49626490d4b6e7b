#include "overgrad/optim.hpp"

#include <cmath>
#include <string>

#include "overgrad/error.hpp"

namespace overgrad {

BUpdate parse_b_update(std::string_view name) {
  if (name == "adaloss") return BUpdate::AdaLoss;
  if (name == "gradnorm") return BUpdate::GradNorm;
  if (name == "loss_squared") return BUpdate::LossSquared;
  if (name == "loss_linear") return BUpdate::LossLinear;
  throw InvalidArgument("unknown b-update variant '" + std::string(name) + "'");
}

std::string_view to_string(BUpdate variant) {
  switch (variant) {
    case BUpdate::AdaLoss: return "adaloss";
    case BUpdate::GradNorm: return "gradnorm";
    case BUpdate::LossSquared: return "loss_squared";
    case BUpdate::LossLinear: return "loss_linear";
  }
  return "unknown";
}

void GdConfig::validate() const {
  if (!(eta > 0.0)) throw InvalidArgument("gd: eta must be positive");
  if (!(c_eta > 0.0)) throw InvalidArgument("gd: c_eta must be positive");
  if (!(epsilon > 0.0)) throw InvalidArgument("gd: epsilon must be positive");
}

double suggested_gd_eta(const SpectralSummary& spectrum, double c_eta) {
  if (!(c_eta > 0.0)) throw InvalidArgument("suggested_gd_eta: c_eta must be positive");
  if (!(spectrum.lambda_max > 0.0)) {
    throw InvalidArgument("suggested_gd_eta: lambda_max must be positive");
  }
  return c_eta / spectrum.lambda_max;
}

StepResult gd_step(const NetworkState& net, const Dataset& data, double eta) {
  if (!(eta > 0.0)) throw InvalidArgument("gd_step: eta must be positive");
  const ForwardPass pass = forward(net, data);
  const Matrix grad = gradient(net, data, pass);
  NetworkState next = net;
  axpy(-eta, grad.data(), next.weights().data());
  Residual res = predict(next, data);
  return {std::move(next), std::move(res)};
}

AdaLossState AdaLossState::initial(double b0, double eta, double alpha, double epsilon,
                                   BUpdate variant) {
  AdaLossState s{b0, b0, eta, alpha, epsilon, 0, variant};
  s.validate();
  return s;
}

void AdaLossState::validate() const {
  if (!(b0 > 0.0)) throw InvalidArgument("adaloss: b0 must be positive");
  if (!(eta > 0.0)) throw InvalidArgument("adaloss: eta must be positive");
  if (!(alpha > 0.0)) throw InvalidArgument("adaloss: alpha must be positive");
  if (!(epsilon > 0.0)) throw InvalidArgument("adaloss: epsilon must be positive");
  if (!(b >= b0)) throw InvalidArgument("adaloss: b fell below b0");
}

double b_update_variant(const AdaLossState& state, const UpdateSignal& signal) {
  if (!(signal.residual_norm >= 0.0) || !(signal.grad_max_row_norm >= 0.0)) {
    throw InvalidArgument("b_update_variant: update signal must be non-negative");
  }
  const double a2 = state.alpha * state.alpha;
  const double sqrt_n = std::sqrt(static_cast<double>(signal.n));
  const double b2 = state.b * state.b;
  switch (state.variant) {
    case BUpdate::AdaLoss:
      return std::sqrt(b2 + a2 * sqrt_n * signal.residual_norm);
    case BUpdate::GradNorm:
      return std::sqrt(b2 + a2 * std::sqrt(static_cast<double>(signal.m)) * signal.grad_max_row_norm);
    case BUpdate::LossSquared:
      return std::sqrt(b2 + a2 * sqrt_n * signal.residual_norm * signal.residual_norm);
    case BUpdate::LossLinear:
      return state.b + state.alpha * sqrt_n * signal.residual_norm;
  }
  throw InvalidArgument("b_update_variant: unknown variant");
}

AdaStepResult adaloss_step(const AdaLossState& state, const NetworkState& net,
                           const Dataset& data) {
  state.validate();
  const ForwardPass pass = forward(net, data);
  const Matrix grad = gradient(net, data, pass);
  AdaLossState next_state = state;
  next_state.b = b_update_variant(
      state, {pass.residual.norm, grad_max_row_norm(grad), data.n(), net.m()});
  next_state.k = state.k + 1;
  NetworkState next = net;
  axpy(-next_state.effective_step(), grad.data(), next.weights().data());
  Residual res = predict(next, data);
  return {next_state, std::move(next), std::move(res)};
}

}  // namespace overgrad
