#pragma once

// Reference methods MOMP is compared against: classic OMP on a generic dense
// matrix, and projected gradient over the full (dense, length-N) simplex.

#include "sparsepbn/core.hpp"
#include "sparsepbn/dictionary.hpp"
#include "sparsepbn/momp.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace sparsepbn {

struct OmpTrace {
  std::vector<int> selected;
  /// ||y - Phi w|| after each step.
  std::vector<double> residual_norms;
};

struct OmpResult {
  Eigen::VectorXd w;
  OmpTrace trace;
};

/// Orthogonal matching pursuit for y = Phi w: largest |correlation| selection,
/// unconstrained least squares on the selected columns via column-pivoted QR.
/// Stops after `sparsity` atoms or at zero residual. Throws
/// kRankDeficientSupport when the selected columns are dependent.
OmpResult omp_run(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y,
                  int sparsity);

struct PgConfig {
  int max_steps = 100000;
  /// Defaults to 1/L, L = lambda_max(A^T A) estimated by power iteration.
  std::optional<double> step_size;
  StoppingCriteria stop{1e-8, 1e-12, std::nullopt, 100000};
  std::uint64_t n_cap = 100000;
};

struct PgResult {
  /// Atoms with weight above kWeightTol, renormalized.
  SparseSolution solution;
  RunTrace trace;
  /// Final dense iterate, indexed by atom id.
  Eigen::VectorXd dense;
  double step_size = 0.0;
  double lipschitz = 0.0;
  /// 1/2 ||b - A x^t||^2 for t = 0, 1, ...
  std::vector<double> objective;
  bool all_iterates_feasible = true;
};

/// A^T (A x - b) for a dense x indexed by atom id, in O(N M) without forming A.
/// Throws kDictionaryTooLarge when N > n_cap.
Eigen::VectorXd implicit_grad(const StochasticMatrix& p,
                              const ColumnSupportDictionary& dict,
                              const Eigen::VectorXd& x,
                              std::uint64_t n_cap = 100000);
Eigen::VectorXd implicit_grad(const StochasticMatrix& p,
                              const Eigen::VectorXd& x);

/// Sum_j x_j A_j for a dense x indexed by atom id.
Eigen::MatrixXd dense_reconstruct(const ColumnSupportDictionary& dict,
                                  const Eigen::VectorXd& x);

/// lambda_max(A^T A) by power iteration on the implicit operator.
double implicit_lipschitz(const ColumnSupportDictionary& dict,
                          int max_iter = 1000, double rel_tol = 1e-12);

/// x <- proj_simplex(x - eta A^T (A x - b)). InitSpec::zero() starts from the
/// uniform point (x = 0 is not on the simplex). Throws kDictionaryTooLarge
/// when N > cfg.n_cap.
PgResult pg_run(const StochasticMatrix& p, const PgConfig& cfg,
                const InitSpec& init = InitSpec::uniform());

}  // namespace sparsepbn
