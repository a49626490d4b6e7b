#pragma once

#include <cstddef>
#include <cstdint>

#include "overgrad/dataset.hpp"
#include "overgrad/gram.hpp"
#include "overgrad/linalg.hpp"

namespace overgrad {

inline constexpr std::size_t kMaxLanczosBasis = 400;

struct EigenOptions {
  /// Stop when |A v - lambda v| <= tol * max(lambda_max, 1).
  double tol = 1e-8;
  std::size_t max_iterations = 50000;
  /// Seed of the start vector.
  std::uint64_t seed = 0;
};

struct SpectralSummary {
  /// Clipped at 0.
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double residual_min = 0.0;
  double residual_max = 0.0;
  std::size_t iterations_min = 0;
  std::size_t iterations_max = 0;
  /// False when either solve stopped at the iteration cap; residuals then
  /// hold the best value reached.
  bool converged = true;
};

/// Extreme eigenvalues of a symmetric matrix by Lanczos iteration with full
/// reorthogonalization, explicitly restarted from the current extreme Ritz
/// vectors when the basis reaches kMaxLanczosBasis. Keeps the last Ritz
/// vectors so that a sequence of slowly changing matrices (H(k) along a
/// training run) can warm start.
///
/// Residuals are recomputed as |A v - theta v| before a pair is accepted.
/// Ritz values lie inside the spectrum, so an unconverged lambda_max is a
/// lower bound and an unconverged lambda_min an upper bound of the truth.
/// Iteration counts are matrix-vector products.
class SpectralTracker {
 public:
  explicit SpectralTracker(EigenOptions options = {});

  SpectralSummary update(const Matrix& a);
  SpectralSummary update(const GramMatrix& g) { return update(g.entries); }

  const EigenOptions& options() const noexcept { return options_; }

 private:
  EigenOptions options_;
  Vector top_;
  Vector bottom_;
};

SpectralSummary extreme_eigenvalues(const Matrix& a, const EigenOptions& options = {});
SpectralSummary extreme_eigenvalues(const GramMatrix& g, const EigenOptions& options = {});

inline constexpr double kDefaultDegeneracyTolerance = 1e-10;

/// lambda_min(H_inf(data)); throws DegenerateData at or below `degeneracy_tol`.
double lambda0(const Dataset& data, const EigenOptions& options = {},
               double degeneracy_tol = kDefaultDegeneracyTolerance);

}  // namespace overgrad
