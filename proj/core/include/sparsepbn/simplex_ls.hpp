#pragma once

#include "sparsepbn/core.hpp"

#include <span>
#include <vector>

namespace sparsepbn {

/// Euclidean projection onto {z >= 0, sum z = 1}.
Eigen::VectorXd simplex_project(const Eigen::VectorXd& v);

/// min_z 1/2 ||b - A_S z||^2 over the simplex, written through the k x k Gram
/// matrix. Entries of `gram` are integers (column agreement counts) and its
/// diagonal equals `dim`.
struct GramSystem {
  int dim = 0;
  Eigen::MatrixXd gram;  // A_S^T A_S
  Eigen::VectorXd h;     // A_S^T b
  double bsq = 0.0;      // ||b||^2

  int k() const noexcept { return static_cast<int>(h.size()); }
  /// 1/2 ||b - A_S z||^2.
  double objective(const Eigen::VectorXd& z) const;
  /// A_S^T (b - A_S z).
  Eigen::VectorXd correlations(const Eigen::VectorXd& z) const {
    return h - gram * z;
  }
};

/// Throws kDuplicateAtom when an atom repeats.
GramSystem build_gram(std::span<const Atom> atoms, const StochasticMatrix& p);

struct KktReport {
  /// mu = z^T A_S^T (b - A_S z).
  double multiplier = 0.0;
  /// Max over l of |g_l - mu| (z_l > tau_w) or max(0, g_l - mu) (z_l = 0).
  double max_violation = 0.0;
  std::vector<int> active_set;
};

/// Optimality certificate for the simplex-constrained subproblem. Throws
/// kInfeasiblePoint unless z lies in the simplex within 1e-10.
KktReport check_kkt(const GramSystem& sys, const Eigen::VectorXd& z);

struct SimplexLsOptions {
  double tol_kkt = 1e-12;
  int max_inner = 100000;
};

struct SimplexLsResult {
  Eigen::VectorXd z;
  KktReport report;
  int iterations = 0;
  /// False when max_inner was hit before the KKT test passed; z is then the
  /// best iterate found.
  bool converged = false;
  /// Numerical rank of the Gram matrix (k when A_S has full column rank).
  int gram_rank = 0;
};

/// Accelerated projected gradient with step 1/lambda_max(G) and restart on
/// objective increase. Every few accepted steps a primal active-set polish is
/// attempted from the current point; a polished point is returned only when it
/// passes check_kkt at tol_kkt. `warm_start` (if non-empty) is projected
/// onto the simplex and used as the first iterate.
SimplexLsResult solve_simplex_ls(const GramSystem& sys,
                                 const SimplexLsOptions& options = {},
                                 const Eigen::VectorXd& warm_start = {});

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
double power_iteration_lambda_max(const Eigen::MatrixXd& g, int max_iter = 500,
                                  double rel_tol = 1e-13);

/// Numerical rank of a symmetric PSD matrix.
int psd_rank(const Eigen::MatrixXd& g, double rel_tol = 1e-9);

}  // namespace sparsepbn
