#include "sparsepbn/baselines.hpp"

#include "sparsepbn/parallel.hpp"
#include "sparsepbn/simplex_ls.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sparsepbn {

OmpResult omp_run(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y,
                  int sparsity) {
  if (phi.rows() != y.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "Phi rows differ from len(y)");
  }
  if (sparsity < 1 || sparsity > std::min(phi.rows(), phi.cols())) {
    throw Error(ErrorCode::kInvalidArgument,
                "sparsity must lie in [1, min(q, Q)]");
  }
  for (Eigen::Index j = 0; j < phi.cols(); ++j) {
    if (phi.col(j).squaredNorm() == 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "Phi has a zero column");
    }
  }

  OmpResult out;
  out.w = Eigen::VectorXd::Zero(phi.cols());
  Eigen::VectorXd r = y;
  Eigen::VectorXd coef;
  std::vector<int>& selected = out.trace.selected;
  const double zero_tol = 1e-12 * std::max(1.0, y.norm());

  while (static_cast<int>(selected.size()) < sparsity && r.norm() > zero_tol) {
    Eigen::Index j = 0;
    (phi.transpose() * r).cwiseAbs().maxCoeff(&j);
    if (std::find(selected.begin(), selected.end(), j) != selected.end()) break;
    selected.push_back(static_cast<int>(j));

    Eigen::MatrixXd sub(phi.rows(), static_cast<Eigen::Index>(selected.size()));
    for (std::size_t s = 0; s < selected.size(); ++s) {
      sub.col(static_cast<Eigen::Index>(s)) = phi.col(selected[s]);
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
    if (qr.rank() < sub.cols()) {
      throw Error(ErrorCode::kRankDeficientSupport,
                  "selected columns are linearly dependent");
    }
    coef = qr.solve(y);
    r = y - sub * coef;
    out.trace.residual_norms.push_back(r.norm());
  }
  for (std::size_t s = 0; s < selected.size(); ++s) {
    out.w(selected[s]) = coef(static_cast<Eigen::Index>(s));
  }
  return out;
}

namespace {

std::uint64_t checked_atom_count(const ColumnSupportDictionary& dict,
                                 std::uint64_t n_cap) {
  const auto n = dict.atom_count();
  if (!n || *n > n_cap) {
    std::ostringstream os;
    os << "N = ";
    if (n) {
      os << *n;
    } else {
      os << "exp(" << dict.atom_count_log() << ")";
    }
    os << " exceeds n_cap = " << n_cap;
    throw Error(ErrorCode::kDictionaryTooLarge, os.str());
  }
  return *n;
}

// Visits atoms with ids in [begin, end) in order: fn(id, rows).
template <typename Fn>
void for_atom_range(const ColumnSupportDictionary& dict, std::uint64_t begin,
                    std::uint64_t end, Fn&& fn) {
  if (begin >= end) return;
  const int dim = dict.dim();
  std::vector<int> digits(dim);
  std::uint64_t rest = begin;
  for (int c = 0; c < dim; ++c) {
    const auto n = static_cast<std::uint64_t>(dict.count(c));
    digits[c] = static_cast<int>(rest % n);
    rest /= n;
  }
  std::vector<int> rows(dim);
  for (int c = 0; c < dim; ++c) rows[c] = dict.candidates(c)[digits[c]];
  for (std::uint64_t id = begin; id < end; ++id) {
    fn(id, rows);
    for (int c = 0; c < dim; ++c) {
      if (++digits[c] < dict.count(c)) {
        rows[c] = dict.candidates(c)[digits[c]];
        break;
      }
      digits[c] = 0;
      rows[c] = dict.candidates(c)[0];
    }
  }
}

// out_j = sum_c mat(rows_j[c], c) for all atoms j.
void apply_transpose(const ColumnSupportDictionary& dict,
                     const Eigen::MatrixXd& mat, Eigen::VectorXd& out) {
  const auto n = static_cast<std::size_t>(out.size());
  parallel_for_chunks(n, 4096, [&](std::size_t begin, std::size_t end) {
    for_atom_range(dict, begin, end,
                   [&](std::uint64_t id, const std::vector<int>& rows) {
                     double s = 0.0;
                     for (std::size_t c = 0; c < rows.size(); ++c) {
                       s += mat(rows[c], static_cast<Eigen::Index>(c));
                     }
                     out(static_cast<Eigen::Index>(id)) = s;
                   });
  });
}

}  // namespace

Eigen::MatrixXd dense_reconstruct(const ColumnSupportDictionary& dict,
                                  const Eigen::VectorXd& x) {
  const auto n = dict.atom_count();
  if (!n || static_cast<std::uint64_t>(x.size()) != *n) {
    throw Error(ErrorCode::kDimensionMismatch, "dense x must have length N");
  }
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(dict.dim(), dict.dim());
  // Sequential accumulation keeps the floating-point sum order fixed.
  for_atom_range(dict, 0, *n,
                 [&](std::uint64_t id, const std::vector<int>& rows) {
                   const double w = x(static_cast<Eigen::Index>(id));
                   if (w == 0.0) return;
                   for (std::size_t c = 0; c < rows.size(); ++c) {
                     acc(rows[c], static_cast<Eigen::Index>(c)) += w;
                   }
                 });
  return acc;
}

Eigen::VectorXd implicit_grad(const StochasticMatrix& p,
                              const ColumnSupportDictionary& dict,
                              const Eigen::VectorXd& x, std::uint64_t n_cap) {
  const auto n = checked_atom_count(dict, n_cap);
  if (static_cast<std::uint64_t>(x.size()) != n) {
    throw Error(ErrorCode::kDimensionMismatch, "dense x must have length N");
  }
  const Eigen::MatrixXd residual = dense_reconstruct(dict, x) - p.entries();
  Eigen::VectorXd grad(static_cast<Eigen::Index>(n));
  apply_transpose(dict, residual, grad);
  return grad;
}

Eigen::VectorXd implicit_grad(const StochasticMatrix& p,
                              const Eigen::VectorXd& x) {
  return implicit_grad(p, ColumnSupportDictionary::build(p), x);
}

double implicit_lipschitz(const ColumnSupportDictionary& dict, int max_iter,
                          double rel_tol) {
  const auto n = dict.atom_count();
  if (!n) {
    throw Error(ErrorCode::kDictionaryTooLarge, "N overflows 64 bits");
  }
  // A^T A is entrywise nonnegative, so the all-ones start vector overlaps its
  // Perron vector.
  Eigen::VectorXd v = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(*n));
  v.normalize();
  Eigen::VectorXd w(v.size());
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    apply_transpose(dict, dense_reconstruct(dict, v), w);
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    const bool done = std::abs(next - lambda) <= rel_tol * std::abs(next);
    lambda = next;
    if (done) break;
  }
  return lambda;
}

PgResult pg_run(const StochasticMatrix& p, const PgConfig& cfg,
                const InitSpec& init) {
  cfg.stop.validate();
  if (cfg.max_steps < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_steps must be >= 1");
  }
  if (cfg.step_size && !(*cfg.step_size > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "step size must be positive");
  }
  const auto dict = ColumnSupportDictionary::build(p);
  const auto n = checked_atom_count(dict, cfg.n_cap);
  const auto size = static_cast<Eigen::Index>(n);

  PgResult out;
  Eigen::VectorXd x = Eigen::VectorXd::Constant(size, 1.0 / static_cast<double>(n));
  if (init.kind == InitSpec::Kind::kZero) {
    out.trace.warnings.push_back(
        "PG starts from the uniform point: x = 0 is not on the simplex");
  } else if (init.kind != InitSpec::Kind::kUniform) {
    const SparseSolution start = make_init(init, dict);
    x.setZero();
    for (std::size_t l = 0; l < start.size(); ++l) {
      x(static_cast<Eigen::Index>(dict.encode(start.atoms()[l]))) =
          start.weights()[l];
    }
  }

  out.lipschitz = implicit_lipschitz(dict);
  out.step_size = cfg.step_size.value_or(1.0 / (out.lipschitz * (1.0 + 1e-9)));

  Eigen::MatrixXd recon = dense_reconstruct(dict, x);
  double res = (p.entries() - recon).norm();
  out.trace.initial_residual = res;
  out.objective.push_back(0.5 * res * res);

  const int steps = std::min(cfg.max_steps, cfg.stop.max_iter);
  out.trace.termination = TerminationReason::kMaxIterations;
  Eigen::VectorXd grad(size);
  for (int t = 0; t < steps; ++t) {
    if (res <= cfg.stop.tol_res) {
      out.trace.termination = TerminationReason::kResidualTol;
      break;
    }
    apply_transpose(dict, recon - p.entries(), grad);
    Eigen::VectorXd next = simplex_project(x - out.step_size * grad);
    if (std::abs(next.sum() - 1.0) > 1e-10 || next.minCoeff() < 0.0) {
      out.all_iterates_feasible = false;
    }
    const double dx = (next - x).lpNorm<1>();
    x = std::move(next);
    recon = dense_reconstruct(dict, x);
    const double next_res = (p.entries() - recon).norm();

    IterationRecord rec;
    rec.k = t;
    rec.residual_norm_before = res;
    rec.residual_norm_after = next_res;
    rec.dx_l1 = dx;
    out.trace.iterations.push_back(rec);
    out.objective.push_back(0.5 * next_res * next_res);

    const double prev = res;
    res = next_res;
    if (res <= cfg.stop.tol_res) {
      out.trace.termination = TerminationReason::kResidualTol;
      break;
    }
    if (dx <= cfg.stop.tol_dx) {
      out.trace.termination = TerminationReason::kIterateChangeTol;
      break;
    }
    if (cfg.stop.tol_dres && std::abs(res - prev) <= *cfg.stop.tol_dres) {
      out.trace.termination = TerminationReason::kResidualChangeTol;
      break;
    }
  }

  std::vector<Atom> atoms;
  std::vector<double> weights;
  double kept = 0.0;
  for (Eigen::Index j = 0; j < size; ++j) {
    if (x(j) > kWeightTol) {
      atoms.push_back(dict.decode(static_cast<std::uint64_t>(j)));
      weights.push_back(x(j));
      kept += x(j);
    }
  }
  for (double& w : weights) w /= kept;
  out.solution = SparseSolution(dict.binding(), std::move(atoms), std::move(weights));
  out.dense = std::move(x);
  return out;
}

}  // namespace sparsepbn
