#include "overgrad/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "overgrad/error.hpp"
#include "overgrad/gram.hpp"

namespace overgrad {
namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw InvalidArgument(std::string("theory_bounds: ") + name + " must be positive");
}

}  // namespace

double b_inf_bound(double b_start, double alpha, std::size_t n, double eta, double lambda0,
                   double C1, double residual_start) {
  return b_start + 4.0 * alpha * alpha * std::sqrt(static_cast<double>(n)) /
                       (eta * lambda0 * C1) * residual_start;
}

TheoryBounds theory_bounds(const TheoryInputs& in) {
  require_positive(in.b0, "b0");
  require_positive(in.eta, "eta");
  require_positive(in.alpha, "alpha");
  require_positive(static_cast<double>(in.n), "n");
  require_positive(in.epsilon, "epsilon");
  require_positive(in.lambda0, "lambda0");
  require_positive(in.lambda_max, "lambda_max");
  require_positive(in.residual_norm0, "residual_norm0");
  require_positive(in.C, "C");
  require_positive(in.C1, "C1");

  const double n = static_cast<double>(in.n);
  const double a2 = in.alpha * in.alpha;
  const double ceiling = in.eta * in.C * in.lambda_max;

  TheoryBounds out;
  out.C = in.C;
  out.C1 = in.C1;
  if (in.b0 < ceiling) {
    const double steps = (ceiling * ceiling - in.b0 * in.b0) / (a2 * std::sqrt(n * in.epsilon));
    out.t0_predicted = static_cast<std::size_t>(std::ceil(steps)) + 1;
  }
  out.b_inf_bound = b_inf_bound(in.b0, in.alpha, in.n, in.eta, in.lambda0, in.C1, in.residual_norm0);
  const double growth = 2.0 * in.eta * in.eta * std::sqrt(in.lambda0) *
                        std::pow(in.C * in.lambda_max, 1.5) / (a2 * std::sqrt(n));
  out.b_bar_inf_bound = ceiling + 4.0 * a2 * std::sqrt(n) / (in.eta * in.lambda0 * in.C1) *
                                      (in.residual_norm0 + growth);
  const double loss0 = 0.5 * in.residual_norm0 * in.residual_norm0;
  out.gd_iters_predicted =
      (in.lambda_max / in.lambda0) * std::max(0.0, std::log(loss0 / in.epsilon));
  return out;
}

std::size_t dichotomy_horizon(double b0, double gamma, double L, double epsilon) {
  if (!(b0 > 0.0) || !(gamma > 0.0) || !(L > 0.0) || !(epsilon > 0.0)) {
    throw InvalidArgument("dichotomy: b0, gamma, L and epsilon must be positive");
  }
  const double steps = (L * L - b0 * b0) / (gamma * std::sqrt(epsilon));
  return static_cast<std::size_t>(std::max(0.0, std::ceil(steps))) + 1;
}

DichotomyBranch check_dynamical_dichotomy(double b0, double gamma, double L, double epsilon,
                                          std::span<const double> a) {
  const std::size_t horizon = dichotomy_horizon(b0, gamma, L, epsilon);
  if (a.size() < horizon) {
    throw InvalidArgument("dichotomy: sequence has " + std::to_string(a.size()) +
                          " terms, need " + std::to_string(horizon));
  }
  const double root_eps = std::sqrt(epsilon);
  double b2 = b0 * b0;
  double smallest = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < horizon; ++j) {
    if (!(a[j] >= 0.0)) throw InvalidArgument("dichotomy: sequence must be non-negative");
    smallest = std::min(smallest, a[j]);
    b2 += gamma * a[j];
  }
  if (smallest <= root_eps) return DichotomyBranch::MinBelowSqrtEps;
  if (std::sqrt(b2) >= L) return DichotomyBranch::ThresholdReached;
  throw std::logic_error("dichotomy violated: min a_k > sqrt(eps) yet b_N < L");
}

bool sqrt_sum_check(std::span<const double> a) {
  if (a.empty() || !(a[0] > 0.0)) throw InvalidArgument("sqrt_sum_check: a_1 must be positive");
  double partial = 0.0;
  double lhs = 0.0;
  for (double v : a) {
    if (!(v >= 0.0)) throw InvalidArgument("sqrt_sum_check: terms must be non-negative");
    partial += v;
    lhs += v / std::sqrt(partial);
  }
  return lhs <= 2.0 * std::sqrt(partial) + 1e-12;
}

SandwichReport gradient_loss_sandwich_check(const NetworkState& net, const Dataset& data,
                                            double lambda0, const EigenOptions& eigen) {
  SandwichReport report;
  const ForwardPass pass = forward(net, data);
  const Matrix grad = gradient(net, data, pass);
  const double m = static_cast<double>(net.m());
  const double n = static_cast<double>(data.n());
  report.middle = grad_max_row_norm(grad);
  report.upper = std::sqrt(n / m) * pass.residual.norm;
  report.lambda_min_h =
      extreme_eigenvalues(h_empirical(data, ActivationTable(pass.preacts)), eigen).lambda_min;
  if (!(lambda0 > 0.0) || report.lambda_min_h < 0.5 * lambda0) {
    report.status = SandwichStatus::PreconditionUnmet;
    return report;
  }
  report.lower = std::sqrt(lambda0 / (2.0 * m)) * pass.residual.norm;
  const bool ok = report.lower <= report.middle + 1e-12 && report.middle <= report.upper + 1e-12;
  report.status = ok ? SandwichStatus::Holds : SandwichStatus::Violated;
  return report;
}

DriftCheckReport squared_variant_drift_check(const TrainTrace& trace, double eta, double alpha,
                                             std::size_t m) {
  DriftCheckReport report;
  const auto& rows = trace.rows;
  if (rows.empty()) return report;
  const double b0 = rows.front().b;
  const std::size_t last_step =
      trace.summary.t0_observed ? *trace.summary.t0_observed : rows.size();
  const double base = eta / (alpha * alpha * std::sqrt(static_cast<double>(m)));
  // k = 0: no step taken yet, drift(W(0)) = 0.
  if (rows.front().max_drift) {
    const double bound0 = base * std::sqrt(2.0);
    report.margins.push_back(bound0 - *rows.front().max_drift);
  }
  for (std::size_t k = 0; k < last_step && k + 1 < rows.size(); ++k) {
    const TraceRow& next = rows[k + 1];
    if (!next.max_drift) continue;
    const double ratio = next.b / b0;
    const double bound = base * std::sqrt(2.0 * static_cast<double>(k + 1)) *
                         std::sqrt(1.0 + 2.0 * std::log(ratio));
    report.margins.push_back(bound - *next.max_drift);
  }
  for (double margin : report.margins) {
    if (margin < 0.0) report.holds = false;
  }
  return report;
}

}  // namespace overgrad
