#include "sparsepbn/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace sparsepbn {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotSquare: return "NotSquare";
    case ErrorCode::kNegativeEntry: return "NegativeEntry";
    case ErrorCode::kColumnSumViolation: return "ColumnSumViolation";
    case ErrorCode::kEmptyColumnSupport: return "EmptyColumnSupport";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kDuplicateAtom: return "DuplicateAtom";
    case ErrorCode::kInfeasiblePoint: return "InfeasiblePoint";
    case ErrorCode::kSTooLarge: return "STooLarge";
    case ErrorCode::kDictionaryTooLarge: return "DictionaryTooLarge";
    case ErrorCode::kRankDeficientSupport: return "RankDeficientSupport";
    case ErrorCode::kPatternTooSmall: return "PatternTooSmall";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

bool Error::is_validation() const noexcept {
  switch (code_) {
    case ErrorCode::kNotSquare:
    case ErrorCode::kNegativeEntry:
    case ErrorCode::kColumnSumViolation:
    case ErrorCode::kEmptyColumnSupport:
    case ErrorCode::kParse:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kSTooLarge:
    case ErrorCode::kPatternTooSmall:
    case ErrorCode::kDictionaryTooLarge:
      return true;
    default:
      return false;
  }
}

StochasticMatrix StochasticMatrix::validate(Eigen::MatrixXd entries,
                                            double tol_col) {
  if (entries.rows() != entries.cols()) {
    std::ostringstream os;
    os << "matrix is " << entries.rows() << "x" << entries.cols();
    throw Error(ErrorCode::kNotSquare, os.str());
  }
  if (entries.rows() < 1) {
    throw Error(ErrorCode::kNotSquare, "matrix is empty");
  }
  const auto m = entries.rows();
  for (Eigen::Index c = 0; c < m; ++c) {
    for (Eigen::Index i = 0; i < m; ++i) {
      double& e = entries(i, c);
      if (!std::isfinite(e)) {
        std::ostringstream os;
        os << "non-finite entry at (" << i << ", " << c << ")";
        throw Error(ErrorCode::kNegativeEntry, os.str());
      }
      if (e < 0.0) {
        if (e > -kNegativeClamp) {
          e = 0.0;
        } else {
          std::ostringstream os;
          os << "entry (" << i << ", " << c << ") = " << e;
          throw Error(ErrorCode::kNegativeEntry, os.str());
        }
      }
    }
    // Nonnegative entries above 1 necessarily push the column sum past 1.
    const double sum = entries.col(c).sum();
    if (std::abs(sum - 1.0) > tol_col) {
      std::ostringstream os;
      os.precision(17);
      os << "column " << c << " sums to " << sum;
      throw Error(ErrorCode::kColumnSumViolation, os.str());
    }
  }
  return StochasticMatrix(std::move(entries));
}

SparseSolution::SparseSolution(DictionaryBinding binding,
                               std::vector<Atom> atoms,
                               std::vector<double> weights)
    : binding_(std::move(binding)),
      atoms_(std::move(atoms)),
      weights_(std::move(weights)) {
  if (atoms_.size() != weights_.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "support and weights differ in length");
  }
  std::set<Atom> seen;
  for (const auto& a : atoms_) {
    if (a.dim() != binding_.dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "atom dimension does not match the dictionary");
    }
    if (!seen.insert(a).second) {
      throw Error(ErrorCode::kDuplicateAtom, "support lists an atom twice");
    }
  }
  for (double& w : weights_) {
    if (w < -kWeightTol) {
      std::ostringstream os;
      os << "negative weight " << w;
      throw Error(ErrorCode::kInfeasiblePoint, os.str());
    }
    if (w <= kWeightTol) w = 0.0;
  }
}

SparseSolution SparseSolution::zero(DictionaryBinding binding) {
  return SparseSolution(std::move(binding), {}, {});
}

double SparseSolution::weight_sum() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

bool SparseSolution::is_feasible() const {
  return !atoms_.empty() && std::abs(weight_sum() - 1.0) <= 1e-10;
}

std::size_t SparseSolution::nonzero_count() const {
  return static_cast<std::size_t>(std::count_if(
      weights_.begin(), weights_.end(), [](double w) { return w > kWeightTol; }));
}

double SparseSolution::weight_of(const Atom& atom) const {
  const auto pos = find(atom);
  return pos ? weights_[*pos] : 0.0;
}

std::optional<std::size_t> SparseSolution::find(const Atom& atom) const {
  const auto it = std::find(atoms_.begin(), atoms_.end(), atom);
  if (it == atoms_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - atoms_.begin());
}

StoppingCriteria StoppingCriteria::default_profile(int m) {
  return StoppingCriteria{1e-8, 1e-5, std::nullopt, std::max(1, m)};
}

StoppingCriteria StoppingCriteria::large_profile(int m) {
  return StoppingCriteria{1e-8, 1e-2, 1e-3, std::max(1, m)};
}

void StoppingCriteria::validate() const {
  if (!(tol_res > 0.0) || !(tol_dx > 0.0) ||
      (tol_dres && !(*tol_dres > 0.0))) {
    throw Error(ErrorCode::kInvalidArgument, "tolerances must be positive");
  }
  if (max_iter < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_iter must be >= 1");
  }
}

Eigen::VectorXd vectorize(const Eigen::MatrixXd& matrix) {
  // Eigen's default storage is column-major, so a flat copy is column stacking.
  return Eigen::Map<const Eigen::VectorXd>(matrix.data(), matrix.size());
}

Eigen::MatrixXd devectorize(const Eigen::VectorXd& v, int dim) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim) {
    throw Error(ErrorCode::kDimensionMismatch, "vector length is not dim^2");
  }
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), dim, dim);
}

double residual_norm(const ResidualMatrix& r) { return r.norm(); }

void atom_apply(const Atom& atom, double weight, Eigen::MatrixXd& accumulator) {
  for (int c = 0; c < atom.dim(); ++c) accumulator(atom.rows[c], c) += weight;
}

Eigen::MatrixXd reconstruct(const SparseSolution& x, int dim) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t j = 0; j < x.size(); ++j) {
    atom_apply(x.atoms()[j], x.weights()[j], out);
  }
  return out;
}

ResidualMatrix residual_matrix(const StochasticMatrix& p,
                               const SparseSolution& x) {
  return p.entries() - reconstruct(x, p.dim());
}

}  // namespace sparsepbn
