#pragma once

// Domain types shared by every module: the prescribed transition matrix,
// atoms (constituent Boolean networks), sparse simplex-weighted solutions and
// stopping criteria.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sparsepbn {

/// Column sums of a valid transition matrix must equal 1 within this tolerance.
inline constexpr double kColumnSumTol = 1e-8;
/// An entry of P counts as nonzero (a candidate row) when it exceeds this.
inline constexpr double kSupportTol = 1e-12;
/// Weights at or below this are reported as exact zeros.
inline constexpr double kWeightTol = 1e-12;
/// Entries in (-kNegativeClamp, 0) are clamped to zero during validation.
inline constexpr double kNegativeClamp = 1e-14;

enum class ErrorCode {
  kNotSquare,
  kNegativeEntry,
  kColumnSumViolation,
  kEmptyColumnSupport,
  kIndexOutOfRange,
  kDuplicateAtom,
  kInfeasiblePoint,
  kSTooLarge,
  kDictionaryTooLarge,
  kRankDeficientSupport,
  kPatternTooSmall,
  kParse,
  kDimensionMismatch,
  kInvalidArgument,
};

const char* to_string(ErrorCode code);

/// Single exception type for the library. `code()` identifies the failure; the
/// message carries the offending indices/values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

  /// True for input problems (malformed or non-stochastic matrices, bad
  /// arguments) as opposed to solver-side conditions.
  bool is_validation() const noexcept;

 private:
  ErrorCode code_;
};

/// A column-stochastic M x M matrix. Immutable once validated.
class StochasticMatrix {
 public:
  /// Validates `entries`: square, entries in [0, 1] (tiny negatives above
  /// -1e-14 are clamped to 0), every column summing to 1 within `tol_col`.
  static StochasticMatrix validate(Eigen::MatrixXd entries,
                                   double tol_col = kColumnSumTol);

  int dim() const noexcept { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  double operator()(int row, int col) const { return entries_(row, col); }

 private:
  explicit StochasticMatrix(Eigen::MatrixXd entries)
      : entries_(std::move(entries)) {}

  Eigen::MatrixXd entries_;
};

/// Matrix form of r = b - A x. Entries may be negative.
using ResidualMatrix = Eigen::MatrixXd;

/// One constituent Boolean network: `rows[c]` is the row holding the single 1
/// of column c.
struct Atom {
  std::vector<int> rows;

  int dim() const noexcept { return static_cast<int>(rows.size()); }

  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom&, const Atom&) = default;
};

/// Identifies the dictionary a solution was built against.
struct DictionaryBinding {
  int dim = 0;
  std::vector<int> counts;

  friend bool operator==(const DictionaryBinding&,
                         const DictionaryBinding&) = default;
};

/// x restricted to its support set S: atoms paired with weights. Atoms in S may
/// carry weight 0 (MOMP never removes an index from S).
class SparseSolution {
 public:
  SparseSolution() = default;
  SparseSolution(DictionaryBinding binding, std::vector<Atom> atoms,
                 std::vector<double> weights);

  /// The x = 0 starting point: empty support, flagged infeasible.
  static SparseSolution zero(DictionaryBinding binding);

  const DictionaryBinding& binding() const noexcept { return binding_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }

  double weight_sum() const;
  /// Weights sum to 1 within 1e-10 (all weights are already >= 0).
  bool is_feasible() const;
  /// Number of weights strictly above kWeightTol.
  std::size_t nonzero_count() const;
  /// Weight of `atom`, 0 when absent.
  double weight_of(const Atom& atom) const;
  /// Position of `atom` in the support, if present.
  std::optional<std::size_t> find(const Atom& atom) const;

 private:
  DictionaryBinding binding_;
  std::vector<Atom> atoms_;
  std::vector<double> weights_;
};

struct StoppingCriteria {
  double tol_res = 1e-8;
  double tol_dx = 1e-5;
  std::optional<double> tol_dres;
  int max_iter = 1;

  /// ||x+ - x||_1 <= 1e-5 or ||Ax - b|| <= 1e-8, at most m iterations.
  static StoppingCriteria default_profile(int m);
  /// Adds |delta residual| <= 1e-3 and loosens the iterate test to 1e-2.
  static StoppingCriteria large_profile(int m);

  /// Throws kInvalidArgument unless all tolerances are > 0 and max_iter >= 1.
  void validate() const;
};

/// Column-stacked vectorization: out[i + M*c] = P(i, c).
Eigen::VectorXd vectorize(const Eigen::MatrixXd& matrix);
inline Eigen::VectorXd vectorize(const StochasticMatrix& p) {
  return vectorize(p.entries());
}
/// Inverse of vectorize for a length-M^2 vector.
Eigen::MatrixXd devectorize(const Eigen::VectorXd& v, int dim);

/// Frobenius norm, equal to the l2 norm of vectorize(r).
double residual_norm(const ResidualMatrix& r);

/// Adds `weight` at (atom.rows[c], c) for every column c; nothing else changes.
void atom_apply(const Atom& atom, double weight, Eigen::MatrixXd& accumulator);

/// Sum_j x_j A_j as an M x M matrix.
Eigen::MatrixXd reconstruct(const SparseSolution& x, int dim);

/// P - reconstruct(x).
ResidualMatrix residual_matrix(const StochasticMatrix& p,
                               const SparseSolution& x);

}  // namespace sparsepbn
