#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "overgrad/dataset.hpp"
#include "overgrad/network.hpp"
#include "overgrad/spectral.hpp"
#include "overgrad/train.hpp"

namespace overgrad {

struct TheoryInputs {
  double b0 = 1.0;
  double eta = 1.0;
  double alpha = 1.0;
  std::size_t n = 1;
  double epsilon = 1e-3;
  double lambda0 = 1.0;
  double lambda_max = 1.0;
  /// |y - u(0)|
  double residual_norm0 = 1.0;
  /// Order-one proof constants; only their product with the spectrum matters here.
  double C = 1.0;
  double C1 = 1.0;
};

struct TheoryBounds {
  /// Iterations after which b has crossed eta C lambda_max unless the
  /// residual already dropped to sqrt(epsilon); 0 when b0 is already past it.
  std::size_t t0_predicted = 0;
  /// b0 + 4 alpha^2 sqrt(n) / (eta lambda0 C1) |y - u(0)|
  double b_inf_bound = 0.0;
  /// eta C lambda_max + 4 alpha^2 sqrt(n) / (eta lambda0 C1)
  ///   * (|y - u(0)| + 2 eta^2 sqrt(lambda0) (C lambda_max)^{3/2} / (alpha^2 sqrt(n)))
  double b_bar_inf_bound = 0.0;
  /// (lambda_max / lambda0) log(L0 / epsilon), L0 = |y - u(0)|^2 / 2
  double gd_iters_predicted = 0.0;
  double C = 1.0;
  double C1 = 1.0;
};

TheoryBounds theory_bounds(const TheoryInputs& in);

/// b_start + 4 alpha^2 sqrt(n) / (eta lambda0 C1) residual_start: the ceiling on
/// b once the contraction phase has begun at b_start.
double b_inf_bound(double b_start, double alpha, std::size_t n, double eta, double lambda0,
                   double C1, double residual_start);

enum class DichotomyBranch { MinBelowSqrtEps, ThresholdReached };

/// N = ceil((L^2 - b0^2) / (gamma sqrt(eps))) + 1, and at least 1.
std::size_t dichotomy_horizon(double b0, double gamma, double L, double epsilon);

/// Simulates b_{j+1}^2 = b_j^2 + gamma a_j for N steps and reports which of
/// "min_{k<N} a_k <= sqrt(eps)" or "b_N >= L" held (the first when both do).
/// Throws std::logic_error if neither holds.
DichotomyBranch check_dynamical_dichotomy(double b0, double gamma, double L, double epsilon,
                                          std::span<const double> a);

/// sum_l a_l / sqrt(sum_{i<=l} a_i) <= 2 sqrt(sum_i a_i) + 1e-12.
bool sqrt_sum_check(std::span<const double> a);

enum class SandwichStatus { Holds, Violated, PreconditionUnmet };

struct SandwichReport {
  SandwichStatus status = SandwichStatus::PreconditionUnmet;
  /// sqrt(lambda0 / (2m)) |y - u|
  double lower = 0.0;
  /// max_r |dL/dw_r|
  double middle = 0.0;
  /// sqrt(n / m) |y - u|
  double upper = 0.0;
  double lambda_min_h = 0.0;
};

/// Checks lower <= middle <= upper (1e-12 slack each side) when
/// lambda_min(H) >= lambda0 / 2 and lambda0 > 0.
SandwichReport gradient_loss_sandwich_check(const NetworkState& net, const Dataset& data,
                                            double lambda0, const EigenOptions& eigen = {});

struct DriftCheckReport {
  bool holds = true;
  /// bound - drift for every checked step, in order.
  std::vector<double> margins;
};

/// For a LossSquared trace with per-row drift, checks every step k before
/// T0_observed (or every step when T0 was never reached):
///
///   drift(W(k+1)) <= eta sqrt(2(k+1)) / (alpha^2 sqrt(m)) sqrt(1 + 2 log(b_{k+1} / b0))
DriftCheckReport squared_variant_drift_check(const TrainTrace& trace, double eta, double alpha,
                                             std::size_t m);

}  // namespace overgrad
