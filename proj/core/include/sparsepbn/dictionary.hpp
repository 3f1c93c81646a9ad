#pragma once

#include "sparsepbn/core.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace sparsepbn {

/// The implicit atom set induced by the support pattern of P: an atom picks one
/// candidate row per column, so N = prod_c counts[c]. Atoms are never
/// materialized as an m x N matrix.
///
/// Atom ids use a mixed-radix encoding with column 0 as the least significant
/// digit: id = sum_c idx_c * prod_{c' < c} counts[c'], where idx_c is the
/// position of rows[c] within candidates[c].
class ColumnSupportDictionary {
 public:
  /// Candidates are the rows with P(i, c) > tau_supp.
  static ColumnSupportDictionary build(const StochasticMatrix& p,
                                       double tau_supp = kSupportTol);

  /// Dictionary over an explicit pattern; candidate lists are sorted and
  /// deduplicated. Tie-break values default to zero.
  ColumnSupportDictionary(int dim, std::vector<std::vector<int>> candidates);

  int dim() const noexcept { return dim_; }
  const std::vector<int>& candidates(int col) const { return candidates_[col]; }
  int count(int col) const {
    return static_cast<int>(candidates_[col].size());
  }
  std::vector<int> counts() const;
  std::size_t nnz() const noexcept { return nnz_; }

  /// N when it fits in 64 bits.
  std::optional<std::uint64_t> atom_count() const noexcept {
    return atom_count_;
  }
  bool atom_count_overflows() const noexcept { return !atom_count_; }
  /// sum_c log(counts[c]); always available.
  double atom_count_log() const noexcept { return atom_count_log_; }

  DictionaryBinding binding() const { return {dim_, counts()}; }

  /// Position of `row` within candidates[col], or -1.
  int position(int col, int row) const;
  bool contains(const Atom& atom) const;

  /// Throws kIndexOutOfRange for rows outside the pattern or when N
  /// overflows 64 bits.
  std::uint64_t encode(const Atom& atom) const;
  /// Throws kIndexOutOfRange unless id < N.
  Atom decode(std::uint64_t id) const;
  /// Same as decode() but from per-column positions.
  Atom from_positions(const std::vector<int>& positions) const;

  /// Value used to break correlation ties in favor of dominant entries of P
  /// (zero for dictionaries not built from a matrix).
  double tie_value(int col, int position) const {
    return tie_values_[col][position];
  }

  /// Calls fn(id, atom) for every atom in increasing id order. Requires N to
  /// fit in 64 bits.
  void for_each_atom(
      const std::function<void(std::uint64_t, const Atom&)>& fn) const;

 private:
  ColumnSupportDictionary() = default;
  void finalize();

  int dim_ = 0;
  std::vector<std::vector<int>> candidates_;
  std::vector<std::vector<double>> tie_values_;
  std::vector<std::vector<int>> position_of_row_;
  std::optional<std::uint64_t> atom_count_;
  double atom_count_log_ = 0.0;
  std::size_t nnz_ = 0;
};

struct Correlation {
  Atom atom;
  /// e_j^T A^T r = sum_c R(rows[c], c) for the selected atom.
  double score = 0.0;
};

/// Residual entries within this distance of a column maximum count as tied.
inline constexpr double kCorrelationTieTol = 1e-12;

/// The atom maximizing e_j^T A^T r. The objective separates over columns, so
/// each column independently takes its best candidate row: O(nnz(P)), never
/// O(N). Within a column, near-ties (kCorrelationTieTol) go to the larger
/// entry of P, then to the smaller row index.
Correlation correlation_argmax(const ResidualMatrix& r,
                               const ColumnSupportDictionary& dict);

/// <vec(A_a), vec(A_b)>: the number of columns where the atoms agree.
int gram_entry(const Atom& a, const Atom& b);

/// <vec(A_a), vec(matrix)> = sum_c matrix(rows[c], c). With matrix = P this is
/// the atom's correlation with b; with a residual it is e_j^T A^T r.
double atom_dot(const Atom& atom, const Eigen::MatrixXd& matrix);
inline double atom_dot_b(const Atom& atom, const StochasticMatrix& p) {
  return atom_dot(atom, p.entries());
}

}  // namespace sparsepbn
