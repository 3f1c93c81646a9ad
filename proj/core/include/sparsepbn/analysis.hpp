#pragma once

// Post-run reporting (res/sum tables), recovery-condition diagnostics, the
// decrease-theorem audit and a planted-instance generator.

#include "sparsepbn/core.hpp"
#include "sparsepbn/dictionary.hpp"
#include "sparsepbn/momp.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sparsepbn {

struct ResSumRow {
  int j = 0;
  double res = 0.0;
  double sum = 0.0;
  std::uint64_t atom_id = 0;
  Atom atom;
  double weight = 0.0;
};

struct ResSumTable {
  std::vector<ResSumRow> rows;
};

/// Weights tied within this are ordered by atom id.
inline constexpr double kTableTieTol = 1e-10;

/// res(j) = ||b - sum of the j largest weighted atoms|| with the weights left
/// unrenormalized; sum(j) is their total mass. Nonzero weights only, sorted by
/// descending weight, ties by descending atom id. Rows j = 1..min(j_max, nnz).
ResSumTable res_sum_table(const SparseSolution& x, const StochasticMatrix& p,
                          int j_max);

enum class ComplementMethod { kEnumeration, kBestFirst };

std::string to_string(ComplementMethod method);

struct ProbeReport {
  double residual_norm = 0.0;
  double in_support_max = 0.0;
  /// Empty when the target support is the whole dictionary.
  std::optional<double> out_support_max;
  std::optional<Atom> best_outside;
  double margin = 0.0;
  bool passed = false;
  /// Residual is zero: both maxima vanish, counted as a pass.
  bool degenerate = false;
  ComplementMethod method = ComplementMethod::kEnumeration;
};

struct RecoveryReport {
  std::vector<ProbeReport> probes;
  int support_size = 0;
  int gram_rank = 0;
  bool full_column_rank = false;
  bool all_passed = false;
};

/// Residual below which a probe counts as an exact fit.
inline constexpr double kDegenerateResidual = 1e-12;
/// The in-support maximum must exceed the complement maximum by more than this.
inline constexpr double kRecoveryMarginTol = 1e-12;
/// Above this N the complement maximum comes from a best-first search.
inline constexpr std::uint64_t kEnumerationLimit = 10000;

/// For each probe x compares max_{j in S} (A^T(b - Ax))_j against the maximum
/// over atoms outside S. The complement maximum is exact: exhaustive for
/// N <= 1e4, otherwise a best-first walk over per-column sorted candidates
/// that pops at most |S| + 1 atoms. Throws kDuplicateAtom.
RecoveryReport recovery_condition_check(
    const StochasticMatrix& p, const std::vector<Atom>& target_support,
    const std::vector<SparseSolution>& probes);

struct PlantedInstance {
  StochasticMatrix p;
  std::vector<Atom> true_support;
  std::vector<double> true_weights;
  std::uint64_t seed = 0;
  int candidates_per_column = 0;
  /// Nonzeros per column of p (planted atoms sharing a row merge mass).
  std::vector<int> effective_nnz;

  /// x* bound to the dictionary of p.
  SparseSolution truth() const;
};

/// Random pattern with `per_column_candidates` rows per column, d distinct
/// atoms drawn from it, Dirichlet(1) weights, P = sum w_j A_j.
/// Throws kPatternTooSmall when the pattern has fewer than d atoms.
PlantedInstance plant_instance(int dim, int per_column_candidates, int d,
                               std::uint64_t seed);

struct DecreaseAudit {
  bool passed = true;
  /// Largest violation found (lhs - rhs); <= 0 when every check holds exactly.
  double worst_slack = 0.0;
  std::optional<int> failing_iteration;
  std::string failure;
};

/// Per iteration: equality under stagnation; otherwise residual
/// nonincreasing, 0 <= sigma_k <= 1 and
/// res_after^2 <= res_before^2 - sigma_k^2 ||A(e_j - x^k)||^2.
/// Iterations with decrease_applicable == false (k = 0) are only checked for
/// chaining: x^1 is forced to a vertex, so ||b - A x^1|| may exceed ||b - A x^0||.
DecreaseAudit decrease_audit(const RunTrace& trace, double slack = 1e-8);

}  // namespace sparsepbn
