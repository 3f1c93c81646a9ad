#pragma once

#include "sparsepbn/core.hpp"
#include "sparsepbn/dictionary.hpp"
#include "sparsepbn/simplex_ls.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sparsepbn {

/// Starting point x^0 for MOMP (and PG).
struct InitSpec {
  enum class Kind { kZero, kRandomSparse, kExplicit, kUniform };

  Kind kind = Kind::kZero;
  int s = 0;
  std::uint64_t seed = 0;
  std::optional<SparseSolution> point;

  static InitSpec zero() { return {}; }
  static InitSpec random_sparse(int s, std::uint64_t seed) {
    return {Kind::kRandomSparse, s, seed, std::nullopt};
  }
  static InitSpec explicit_point(SparseSolution x) {
    return {Kind::kExplicit, 0, 0, std::move(x)};
  }
  /// x = e/N over the whole dictionary; only meaningful for the dense PG
  /// baseline.
  static InitSpec uniform() { return {Kind::kUniform, 0, 0, std::nullopt}; }
};

std::string to_string(InitSpec::Kind kind);

/// zero: empty flagged solution. random_sparse: s distinct atoms drawn
/// uniformly from the dictionary (per-column digits sampled independently,
/// duplicates redrawn) with weights uniform on the simplex (normalized
/// exponential draws); fully determined by `seed`. explicit: validated and
/// returned. Throws kSTooLarge when s exceeds N, kInvalidArgument for s < 1,
/// kInfeasiblePoint for a non-feasible explicit point.
SparseSolution make_init(const InitSpec& init,
                         const ColumnSupportDictionary& dict);

enum class TerminationReason {
  kResidualTol,
  kIterateChangeTol,
  kResidualChangeTol,
  kStagnation,
  kMaxIterations,
};

std::string to_string(TerminationReason reason);

struct IterationRecord {
  int k = 0;
  std::optional<Atom> selected_atom;
  std::optional<std::uint64_t> selected_atom_id;
  /// e_j^T A^T (b - A x^k) for the selected atom.
  double score = 0.0;
  /// (x^k)^T A^T (b - A x^k).
  double current_correlation = 0.0;
  /// ||A(e_j - x^k)||^2.
  double step_norm_sq = 0.0;
  double residual_norm_before = 0.0;
  double residual_norm_after = 0.0;
  std::optional<double> sigma_k;
  double kkt_violation = 0.0;
  /// ||x^{k+1} - x^k||_1 over the union of supports.
  double dx_l1 = 0.0;
  bool stagnated = false;
  /// False at k = 0: the decrease bound is only claimed for k >= 1.
  bool decrease_applicable = true;
  bool inner_converged = true;
  std::optional<bool> inside_target_support;
};

struct RunTrace {
  std::vector<IterationRecord> iterations;
  TerminationReason termination = TerminationReason::kMaxIterations;
  std::vector<std::string> warnings;
  /// Residual of the starting point.
  double initial_residual = 0.0;
};

struct MompOptions {
  SimplexLsOptions inner;
  double tau_supp = kSupportTol;
  /// Attempts with s - mu at or below this count as stagnation: adding the
  /// atom cannot lower the residual.
  double stagnation_tol = 1e-12;
  /// When set, each record reports whether the selected atom lies in it.
  std::optional<std::vector<Atom>> target_support;
};

struct MompResult {
  SparseSolution solution;
  RunTrace trace;
  /// x^0, x^1, ..., x^final.
  std::vector<SparseSolution> iterates;
};

/// Modified orthogonal matching pursuit. Each iteration adds the atom with the
/// largest residual correlation to S and re-solves the simplex-constrained
/// least squares problem on S (warm-started from x^k padded with 0). S starts
/// empty regardless of x^0. Stops on the residual, iterate-change or
/// residual-change thresholds, on stagnation (the selected atom is already in
/// S, or its correlation does not exceed that of the current combination),
/// or after stop.max_iter iterations. Inner solves that hit max_inner are
/// recorded as warnings.
MompResult momp_run(const StochasticMatrix& p, const InitSpec& init,
                    const StoppingCriteria& stop,
                    const MompOptions& options = {});

/// sigma_k = <A(e_j - x^k), b - A x^k> / ||A(e_j - x^k)||^2, absent when
/// A e_j = A x^k (within 1e-12 in squared norm).
std::optional<double> sigma_k(const ResidualMatrix& r_before, const Atom& atom,
                              const SparseSolution& x_k);

}  // namespace sparsepbn
