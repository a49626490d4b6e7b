#include "overgrad/train.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "overgrad/diagnostics.hpp"
#include "overgrad/error.hpp"
#include "overgrad/gram.hpp"

namespace overgrad {

Method parse_method(std::string_view name) {
  if (name == "gd") return Method::GradientDescent;
  if (name == "adaptive") return Method::Adaptive;
  throw InvalidArgument("unknown optimizer method '" + std::string(name) + "'");
}

std::string_view to_string(Method method) {
  return method == Method::GradientDescent ? "gd" : "adaptive";
}

std::vector<std::string> OptimizerConfig::violations() const {
  std::vector<std::string> out;
  if (!(eta > 0.0)) out.push_back("optimizer.eta must be positive");
  if (!(epsilon > 0.0)) out.push_back("optimizer.epsilon must be positive");
  if (method == Method::Adaptive) {
    if (!(b0 > 0.0)) out.push_back("optimizer.b0 must be positive");
    if (!(alpha > 0.0)) out.push_back("optimizer.alpha must be positive");
  }
  return out;
}

std::vector<std::string> DiagnosticsConfig::violations() const {
  std::vector<std::string> out;
  if (gram_every == 0) out.push_back("diagnostics.gram_every must be at least 1");
  if (drift_every == 0) out.push_back("diagnostics.drift_every must be at least 1");
  if (flip_every == 0) out.push_back("diagnostics.flip_every must be at least 1");
  if (t0_threshold && !(*t0_threshold > 0.0)) {
    out.push_back("diagnostics.t0_threshold must be positive");
  }
  if (!(eigen.tol > 0.0)) out.push_back("diagnostics.eig_tol must be positive");
  if (eigen.max_iterations == 0) out.push_back("diagnostics.eig_max_iters must be positive");
  return out;
}

TrainResult run_training(const Dataset& data, const NetworkState& net0,
                         const OptimizerConfig& optimizer, const DiagnosticsConfig& diagnostics) {
  {
    auto problems = optimizer.violations();
    auto more = diagnostics.violations();
    problems.insert(problems.end(), more.begin(), more.end());
    if (!problems.empty()) throw ConfigError(std::move(problems));
  }
  if (net0.d() != data.d()) throw DimensionMismatch("train: network and data disagree on d");

  const bool adaptive = optimizer.method == Method::Adaptive;
  TrainResult result{{}, net0};
  TrainTrace& trace = result.trace;
  NetworkState& net = result.net;
  trace.summary.final_loss = std::numeric_limits<double>::quiet_NaN();
  if (optimizer.max_iters == 0) return result;

  ForwardPass pass = forward(net, data);
  const ActivationTable initial_pattern(pass.preacts);
  SpectralTracker tracker(diagnostics.eigen);

  if (adaptive) {
    trace.summary.t0_threshold =
        diagnostics.t0_threshold
            ? *diagnostics.t0_threshold
            : SpectralTracker(diagnostics.eigen).update(h_empirical(data, initial_pattern)).lambda_max;
  }

  AdaLossState state;
  if (adaptive) {
    state = AdaLossState::initial(optimizer.b0, optimizer.eta, optimizer.alpha, optimizer.epsilon,
                                  optimizer.variant);
  }

  for (std::size_t k = 0; k < optimizer.max_iters; ++k) {
    if (k > 0) pass = forward(net, data);
    TraceRow row;
    row.k = k;
    row.residual_norm = pass.residual.norm;
    row.loss = loss(pass.residual);
    row.b = adaptive ? state.b : 1.0;

    if (!std::isfinite(row.loss)) {
      trace.summary.diverged = true;
      trace.rows.push_back(row);
      break;
    }

    const bool want_gram = k % diagnostics.gram_every == 0;
    const bool want_flip = k % diagnostics.flip_every == 0;
    if (want_gram || want_flip) {
      const ActivationTable pattern(pass.preacts);
      if (want_gram) {
        const SpectralSummary s = tracker.update(h_empirical(data, pattern));
        row.lambda_min = s.lambda_min;
        row.lambda_max = s.lambda_max;
      }
      if (want_flip) row.flip_count = flip_report(pattern, initial_pattern).total_flips;
    }
    if (k % diagnostics.drift_every == 0) row.max_drift = drift_report(net, net0).max_drift;

    const Matrix grad = gradient(net, data, pass);
    row.grad_max_row_norm = grad_max_row_norm(grad);

    if (adaptive && !trace.summary.t0_observed &&
        state.b / state.eta >= trace.summary.t0_threshold) {
      trace.summary.t0_observed = k;
    }

    if (row.loss <= optimizer.epsilon) {
      trace.summary.converged = true;
      trace.rows.push_back(row);
      break;
    }

    double step = optimizer.eta;
    if (adaptive) {
      state.b = b_update_variant(
          state, {pass.residual.norm, row.grad_max_row_norm, data.n(), net.m()});
      state.k = k + 1;
      step = state.effective_step();
    }
    row.eta_eff = step;
    axpy(-step, grad.data(), net.weights().data());
    ++trace.summary.iterations;
    trace.rows.push_back(row);
  }

  if (!trace.rows.empty()) trace.summary.final_loss = trace.rows.back().loss;
  return result;
}

TrainTrace train(const Dataset& data, const NetworkState& net0, const OptimizerConfig& optimizer,
                 const DiagnosticsConfig& diagnostics) {
  return run_training(data, net0, optimizer, diagnostics).trace;
}

}  // namespace overgrad
