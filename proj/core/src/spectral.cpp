#include "overgrad/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "overgrad/error.hpp"
#include "overgrad/parallel.hpp"
#include "overgrad/rng.hpp"

namespace overgrad {
namespace {

void matvec_rows(const Matrix& a, std::span<const double> x, std::span<double> y) {
  parallel_for(0, a.rows(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) y[i] = dot(a.row(i), x);
  }, 64);
}

void random_unit(Vector& v, std::size_t n, std::uint64_t seed, std::uint64_t salt) {
  CounterRng rng(seed ^ salt, Stream::PowerStart);
  v.resize(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  const double norm = norm2(v);
  if (norm == 0.0) {
    std::fill(v.begin(), v.end(), 1.0 / std::sqrt(static_cast<double>(n)));
  } else {
    scale(1.0 / norm, v);
  }
}

// Two passes of classical Gram-Schmidt against the basis; returns the norm left.
double orthogonalize(const std::vector<Vector>& basis, Vector& w) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const Vector& q : basis) axpy(-dot(q, w), q, w);
  }
  return norm2(w);
}

double pair_residual(const Matrix& a, const Vector& v, double theta, Vector& scratch) {
  matvec_rows(a, v, scratch);
  double r2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = scratch[i] - theta * v[i];
    r2 += r * r;
  }
  return std::sqrt(r2);
}

struct RitzPair {
  double value = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  Vector vector;
};

struct LanczosRun {
  RitzPair low;
  RitzPair high;
  std::size_t steps = 0;
  bool converged = false;
};

// One Lanczos cycle from `start` (unit), at most `budget` matrix-vector products.
LanczosRun lanczos(const Matrix& a, const Vector& start, std::size_t budget, double tol,
                   std::uint64_t seed) {
  const std::size_t n = a.rows();
  const std::size_t cap = std::min({n, kMaxLanczosBasis, budget});
  std::vector<Vector> basis;
  std::vector<double> alpha, beta;
  Vector q = start, w(n), scratch(n);
  LanczosRun run;
  std::size_t next_check = 1;
  double anorm = 0.0;

  while (true) {
    basis.push_back(q);
    matvec_rows(a, q, w);
    ++run.steps;
    const double alpha_j = dot(q, w);
    alpha.push_back(alpha_j);
    anorm = std::max(anorm, std::abs(alpha_j));
    double beta_j = orthogonalize(basis, w);
    const std::size_t k = basis.size();

    // An invariant subspace was found: continue from a fresh direction.
    bool restarted = false;
    if (beta_j <= 1e-12 * std::max(anorm, 1e-300) && k < n) {
      random_unit(w, n, seed, 0x5EED + k);
      const double left = orthogonalize(basis, w);
      if (left > 1e-8) {
        scale(1.0 / left, w);
        restarted = true;
      }
      beta_j = 0.0;
    }
    anorm = std::max(anorm, beta_j);

    const bool exhausted = k == n || (beta_j == 0.0 && !restarted);
    const bool last = exhausted || k == cap;
    if (k >= next_check || last) {
      next_check = std::max(k + 8, k + k / 4);
      Eigen::VectorXd diag(k), sub(k > 0 ? k - 1 : 0);
      for (std::size_t i = 0; i < k; ++i) diag[static_cast<Eigen::Index>(i)] = alpha[i];
      for (std::size_t i = 0; i + 1 < k; ++i) sub[static_cast<Eigen::Index>(i)] = beta[i];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
      es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      const auto& vals = es.eigenvalues();
      const auto& vecs = es.eigenvectors();
      const Eigen::Index lo = 0, hi = static_cast<Eigen::Index>(k) - 1;
      const double target = tol * std::max(vals[hi], 1.0);
      const double est_lo = beta_j * std::abs(vecs(hi, lo));
      const double est_hi = beta_j * std::abs(vecs(hi, hi));

      if ((est_lo <= target && est_hi <= target) || last) {
        const auto ritz = [&](Eigen::Index col) {
          RitzPair p;
          p.value = vals[col];
          p.vector.assign(n, 0.0);
          for (std::size_t i = 0; i < k; ++i) {
            axpy(vecs(static_cast<Eigen::Index>(i), col), basis[i], p.vector);
          }
          scale(1.0 / norm2(p.vector), p.vector);
          p.residual = pair_residual(a, p.vector, p.value, scratch);
          return p;
        };
        run.low = ritz(lo);
        run.high = ritz(hi);
        run.steps += 2;
        run.converged = run.low.residual <= target && run.high.residual <= target;
        if (run.converged || last) return run;
      }
    }
    beta.push_back(beta_j);
    if (restarted) {
      q = w;
    } else {
      for (std::size_t i = 0; i < n; ++i) q[i] = w[i] / beta_j;
    }
  }
}

}  // namespace

SpectralTracker::SpectralTracker(EigenOptions options) : options_(options) {
  if (!(options_.tol > 0.0)) throw InvalidArgument("eigen: tol must be positive");
  if (options_.max_iterations == 0) throw InvalidArgument("eigen: max_iterations must be positive");
}

SpectralSummary SpectralTracker::update(const Matrix& a) {
  const std::size_t n = a.rows();
  if (n == 0 || a.cols() != n) throw DimensionMismatch("extreme_eigenvalues: matrix must be square");

  Vector start;
  if (top_.size() == n && bottom_.size() == n) {
    start = top_;
    axpy(1.0, bottom_, start);
  }
  const double start_norm = start.empty() ? 0.0 : norm2(start);
  if (start_norm > 1e-8) {
    scale(1.0 / start_norm, start);
  } else {
    random_unit(start, n, options_.seed, 0x70);
  }

  std::size_t used = 0;
  LanczosRun best;
  while (used < options_.max_iterations) {
    LanczosRun run = lanczos(a, start, options_.max_iterations - used, options_.tol, options_.seed);
    used += run.steps;
    const bool better = std::max(run.low.residual, run.high.residual) <
                        std::max(best.low.residual, best.high.residual);
    if (better || best.low.vector.empty()) best = std::move(run);
    if (best.converged) break;
    start = best.high.vector;
    axpy(1.0, best.low.vector, start);
    const double norm = norm2(start);
    if (norm <= 1e-8) break;
    scale(1.0 / norm, start);
  }

  top_ = best.high.vector;
  bottom_ = best.low.vector;

  SpectralSummary s;
  s.lambda_max = best.high.value;
  s.lambda_min = std::max(0.0, std::min(best.low.value, s.lambda_max));
  s.residual_max = best.high.residual;
  s.residual_min = best.low.residual;
  s.iterations_max = used;
  s.iterations_min = used;
  s.converged = best.converged;
  return s;
}

SpectralSummary extreme_eigenvalues(const Matrix& a, const EigenOptions& options) {
  if (a.rows() == 0 || a.cols() != a.rows()) {
    throw DimensionMismatch("extreme_eigenvalues: matrix must be square");
  }
  if (asymmetry(a) > 1e-12 * std::max(1.0, static_cast<double>(a.rows()))) {
    throw InvalidArgument("extreme_eigenvalues: matrix is not symmetric");
  }
  SpectralTracker tracker(options);
  return tracker.update(a);
}

SpectralSummary extreme_eigenvalues(const GramMatrix& g, const EigenOptions& options) {
  return extreme_eigenvalues(g.entries, options);
}

double lambda0(const Dataset& data, const EigenOptions& options, double degeneracy_tol) {
  const SpectralSummary s = extreme_eigenvalues(h_infinity(data), options);
  if (s.lambda_min <= degeneracy_tol) {
    throw DegenerateData("training data is degenerate: lambda_min(H_inf) = " +
                             std::to_string(s.lambda_min),
                         s.lambda_min);
  }
  return s.lambda_min;
}

}  // namespace overgrad
