#include "sparsepbn/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sparsepbn {

ColumnSupportDictionary ColumnSupportDictionary::build(const StochasticMatrix& p,
                                                       double tau_supp) {
  ColumnSupportDictionary d;
  d.dim_ = p.dim();
  d.candidates_.resize(d.dim_);
  d.tie_values_.resize(d.dim_);
  for (int c = 0; c < d.dim_; ++c) {
    for (int i = 0; i < d.dim_; ++i) {
      if (p(i, c) > tau_supp) {
        d.candidates_[c].push_back(i);
        d.tie_values_[c].push_back(p(i, c));
      }
    }
    if (d.candidates_[c].empty()) {
      std::ostringstream os;
      os << "column " << c << " has no entry above " << tau_supp;
      throw Error(ErrorCode::kEmptyColumnSupport, os.str());
    }
  }
  d.finalize();
  return d;
}

ColumnSupportDictionary::ColumnSupportDictionary(
    int dim, std::vector<std::vector<int>> candidates)
    : dim_(dim), candidates_(std::move(candidates)) {
  if (dim_ < 1 || static_cast<int>(candidates_.size()) != dim_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "need one candidate list per column");
  }
  for (int c = 0; c < dim_; ++c) {
    auto& list = candidates_[c];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    if (list.empty()) {
      std::ostringstream os;
      os << "column " << c << " has no candidates";
      throw Error(ErrorCode::kEmptyColumnSupport, os.str());
    }
    if (list.front() < 0 || list.back() >= dim_) {
      throw Error(ErrorCode::kIndexOutOfRange, "candidate row out of range");
    }
    tie_values_.emplace_back(list.size(), 0.0);
  }
  finalize();
}

void ColumnSupportDictionary::finalize() {
  position_of_row_.assign(dim_, std::vector<int>(dim_, -1));
  nnz_ = 0;
  atom_count_log_ = 0.0;
  std::uint64_t n = 1;
  bool overflow = false;
  for (int c = 0; c < dim_; ++c) {
    const auto& list = candidates_[c];
    for (std::size_t k = 0; k < list.size(); ++k) {
      position_of_row_[c][list[k]] = static_cast<int>(k);
    }
    nnz_ += list.size();
    atom_count_log_ += std::log(static_cast<double>(list.size()));
    if (!overflow) {
      if (n > std::numeric_limits<std::uint64_t>::max() / list.size()) {
        overflow = true;
      } else {
        n *= list.size();
      }
    }
  }
  atom_count_ = overflow ? std::nullopt : std::optional<std::uint64_t>(n);
}

std::vector<int> ColumnSupportDictionary::counts() const {
  std::vector<int> out(dim_);
  for (int c = 0; c < dim_; ++c) out[c] = count(c);
  return out;
}

int ColumnSupportDictionary::position(int col, int row) const {
  if (col < 0 || col >= dim_ || row < 0 || row >= dim_) return -1;
  return position_of_row_[col][row];
}

bool ColumnSupportDictionary::contains(const Atom& atom) const {
  if (atom.dim() != dim_) return false;
  for (int c = 0; c < dim_; ++c) {
    if (position(c, atom.rows[c]) < 0) return false;
  }
  return true;
}

std::uint64_t ColumnSupportDictionary::encode(const Atom& atom) const {
  if (!atom_count_) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "atom count exceeds 64-bit ids");
  }
  if (atom.dim() != dim_) {
    throw Error(ErrorCode::kIndexOutOfRange, "atom dimension mismatch");
  }
  std::uint64_t id = 0;
  std::uint64_t radix = 1;
  for (int c = 0; c < dim_; ++c) {
    const int pos = position(c, atom.rows[c]);
    if (pos < 0) {
      std::ostringstream os;
      os << "row " << atom.rows[c] << " is not a candidate of column " << c;
      throw Error(ErrorCode::kIndexOutOfRange, os.str());
    }
    id += static_cast<std::uint64_t>(pos) * radix;
    radix *= static_cast<std::uint64_t>(count(c));
  }
  return id;
}

Atom ColumnSupportDictionary::decode(std::uint64_t id) const {
  if (!atom_count_ || id >= *atom_count_) {
    std::ostringstream os;
    os << "atom id " << id << " out of range";
    throw Error(ErrorCode::kIndexOutOfRange, os.str());
  }
  Atom atom;
  atom.rows.resize(dim_);
  for (int c = 0; c < dim_; ++c) {
    const auto n = static_cast<std::uint64_t>(count(c));
    atom.rows[c] = candidates_[c][static_cast<std::size_t>(id % n)];
    id /= n;
  }
  return atom;
}

Atom ColumnSupportDictionary::from_positions(
    const std::vector<int>& positions) const {
  if (static_cast<int>(positions.size()) != dim_) {
    throw Error(ErrorCode::kIndexOutOfRange, "position vector length");
  }
  Atom atom;
  atom.rows.resize(dim_);
  for (int c = 0; c < dim_; ++c) {
    if (positions[c] < 0 || positions[c] >= count(c)) {
      throw Error(ErrorCode::kIndexOutOfRange, "candidate position");
    }
    atom.rows[c] = candidates_[c][positions[c]];
  }
  return atom;
}

void ColumnSupportDictionary::for_each_atom(
    const std::function<void(std::uint64_t, const Atom&)>& fn) const {
  if (!atom_count_) {
    throw Error(ErrorCode::kDictionaryTooLarge,
                "cannot enumerate more than 2^64 atoms");
  }
  std::vector<int> digits(dim_, 0);
  Atom atom = from_positions(digits);
  for (std::uint64_t id = 0; id < *atom_count_; ++id) {
    fn(id, atom);
    // Odometer increment, column 0 fastest.
    for (int c = 0; c < dim_; ++c) {
      if (++digits[c] < count(c)) {
        atom.rows[c] = candidates_[c][digits[c]];
        break;
      }
      digits[c] = 0;
      atom.rows[c] = candidates_[c][0];
    }
  }
}

Correlation correlation_argmax(const ResidualMatrix& r,
                               const ColumnSupportDictionary& dict) {
  if (r.rows() != dict.dim() || r.cols() != dict.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "residual and dictionary dimensions differ");
  }
  Correlation out;
  out.atom.rows.resize(dict.dim());
  for (int c = 0; c < dict.dim(); ++c) {
    const auto& cands = dict.candidates(c);
    double best = -std::numeric_limits<double>::infinity();
    for (int row : cands) best = std::max(best, r(row, c));
    // Ascending row order; the first candidate inside the tie window with the
    // largest tie value wins.
    int chosen = -1;
    for (std::size_t k = 0; k < cands.size(); ++k) {
      if (r(cands[k], c) < best - kCorrelationTieTol) continue;
      if (chosen < 0 || dict.tie_value(c, static_cast<int>(k)) >
                            dict.tie_value(c, chosen) + kCorrelationTieTol) {
        chosen = static_cast<int>(k);
      }
    }
    out.atom.rows[c] = cands[chosen];
  }
  out.score = atom_dot(out.atom, r);
  return out;
}

int gram_entry(const Atom& a, const Atom& b) {
  int agree = 0;
  for (int c = 0; c < a.dim(); ++c) agree += (a.rows[c] == b.rows[c]) ? 1 : 0;
  return agree;
}

double atom_dot(const Atom& atom, const Eigen::MatrixXd& matrix) {
  double s = 0.0;
  for (int c = 0; c < atom.dim(); ++c) s += matrix(atom.rows[c], c);
  return s;
}

}  // namespace sparsepbn
