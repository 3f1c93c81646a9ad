#include "sparsepbn/simplex_ls.hpp"

#include "sparsepbn/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

namespace sparsepbn {

Eigen::VectorXd simplex_project(const Eigen::VectorXd& v) {
  const auto n = v.size();
  if (n == 0) return v;
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    cumsum += u[j];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  Eigen::VectorXd out = (v.array() - theta).max(0.0);
  // Remove the rounding drift of the threshold so the output sums to 1.
  const double s = out.sum();
  if (s > 0.0) out /= s;
  return out;
}

double GramSystem::objective(const Eigen::VectorXd& z) const {
  return 0.5 * (bsq - 2.0 * h.dot(z) + z.dot(gram * z));
}

GramSystem build_gram(std::span<const Atom> atoms, const StochasticMatrix& p) {
  std::set<Atom> seen;
  for (const auto& a : atoms) {
    if (a.dim() != p.dim()) {
      throw Error(ErrorCode::kDimensionMismatch, "atom dimension mismatch");
    }
    if (!seen.insert(a).second) {
      throw Error(ErrorCode::kDuplicateAtom, "atom listed twice in support");
    }
  }
  const auto k = static_cast<Eigen::Index>(atoms.size());
  GramSystem sys;
  sys.dim = p.dim();
  sys.gram.resize(k, k);
  sys.h.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    sys.h(i) = atom_dot_b(atoms[i], p);
    for (Eigen::Index j = i; j < k; ++j) {
      const double g = gram_entry(atoms[i], atoms[j]);
      sys.gram(i, j) = g;
      sys.gram(j, i) = g;
    }
  }
  sys.bsq = p.entries().squaredNorm();
  return sys;
}

KktReport check_kkt(const GramSystem& sys, const Eigen::VectorXd& z) {
  if (z.size() != sys.k()) {
    throw Error(ErrorCode::kDimensionMismatch, "z has the wrong length");
  }
  if (z.size() == 0 || std::abs(z.sum() - 1.0) > 1e-10 ||
      z.minCoeff() < -1e-10) {
    std::ostringstream os;
    os.precision(17);
    os << "point is not in the simplex (sum " << z.sum() << ")";
    throw Error(ErrorCode::kInfeasiblePoint, os.str());
  }
  const Eigen::VectorXd g = sys.correlations(z);
  KktReport report;
  report.multiplier = z.dot(g);
  for (Eigen::Index l = 0; l < z.size(); ++l) {
    const double gap = g(l) - report.multiplier;
    double v = 0.0;
    if (z(l) > kWeightTol) {
      report.active_set.push_back(static_cast<int>(l));
      v = std::abs(gap);
    } else {
      v = std::max(0.0, gap);
    }
    report.max_violation = std::max(report.max_violation, v);
  }
  return report;
}

double power_iteration_lambda_max(const Eigen::MatrixXd& g, int max_iter,
                                  double rel_tol) {
  const auto n = g.rows();
  if (n == 0) return 0.0;
  // A nonnegative start vector has a component along the Perron vector of the
  // (entrywise nonnegative) Gram matrix.
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd w = g * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    const double next = v.dot(w);
    v = w / norm;
    if (std::abs(next - lambda) <= rel_tol * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda;
}

int psd_rank(const Eigen::MatrixXd& g, double rel_tol) {
  if (g.size() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  const double top = ev.maxCoeff();
  if (top <= 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > rel_tol * top) ++rank;
  }
  return rank;
}

namespace {

// Minimizer of the objective over {sum z_W = 1, z_l = 0 for l not in W},
// or nullopt when the equality-constrained problem is unbounded/inconsistent.
std::optional<Eigen::VectorXd> solve_on_working_set(
    const GramSystem& sys, const std::vector<int>& working) {
  const auto w = static_cast<Eigen::Index>(working.size());
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(w + 1, w + 1);
  Eigen::VectorXd rhs(w + 1);
  for (Eigen::Index a = 0; a < w; ++a) {
    for (Eigen::Index b = 0; b < w; ++b) {
      kkt(a, b) = sys.gram(working[a], working[b]);
    }
    kkt(a, w) = 1.0;
    kkt(w, a) = 1.0;
    rhs(a) = sys.h(working[a]);
  }
  rhs(w) = 1.0;
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(kkt);
  const Eigen::VectorXd sol = cod.solve(rhs);
  if ((kkt * sol - rhs).norm() > 1e-9 * (1.0 + rhs.norm())) return std::nullopt;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(sys.k());
  for (Eigen::Index a = 0; a < w; ++a) z(working[a]) = sol(a);
  return z;
}

// Primal active-set method started from a feasible point. Returns a point
// passing check_kkt at tol, or nullopt.
std::optional<Eigen::VectorXd> active_set_polish(const GramSystem& sys,
                                                 Eigen::VectorXd z,
                                                 double tol) {
  const int k = sys.k();
  std::vector<char> in_set(k, 0);
  for (int l = 0; l < k; ++l) {
    if (z(l) > 0.0) in_set[l] = 1;
  }
  for (int step = 0; step < 4 * k + 16; ++step) {
    std::vector<int> working;
    for (int l = 0; l < k; ++l) {
      if (in_set[l]) working.push_back(l);
    }
    if (working.empty()) return std::nullopt;
    const auto target = solve_on_working_set(sys, working);
    if (!target) return std::nullopt;
    const Eigen::VectorXd dir = *target - z;

    double alpha = 1.0;
    int blocking = -1;
    for (int l : working) {
      if (dir(l) < 0.0 && (*target)(l) < 0.0) {
        const double a = z(l) / -dir(l);
        if (a < alpha) {
          alpha = a;
          blocking = l;
        }
      }
    }
    z += alpha * dir;
    if (blocking >= 0) {
      z(blocking) = 0.0;
      in_set[blocking] = 0;
      continue;
    }
    for (int l = 0; l < k; ++l) {
      if (!in_set[l] || z(l) < 0.0) z(l) = 0.0;
    }
    const double s = z.sum();
    if (!(s > 0.0)) return std::nullopt;
    z /= s;

    const Eigen::VectorXd g = sys.correlations(z);
    const double mu = z.dot(g);
    int entering = -1;
    double worst = tol;
    for (int l = 0; l < k; ++l) {
      if (!in_set[l] && g(l) - mu > worst) {
        worst = g(l) - mu;
        entering = l;
      }
    }
    if (entering < 0) {
      if (check_kkt(sys, z).max_violation <= tol) return z;
      return std::nullopt;
    }
    in_set[entering] = 1;
  }
  return std::nullopt;
}

}  // namespace

SimplexLsResult solve_simplex_ls(const GramSystem& sys,
                                 const SimplexLsOptions& options,
                                 const Eigen::VectorXd& warm_start) {
  const int k = sys.k();
  if (k < 1) {
    throw Error(ErrorCode::kInvalidArgument, "empty support");
  }
  SimplexLsResult result;
  result.gram_rank = psd_rank(sys.gram);

  if (k == 1) {
    result.z = Eigen::VectorXd::Ones(1);
    result.report = check_kkt(sys, result.z);
    result.converged = true;
    return result;
  }

  Eigen::VectorXd z = warm_start.size() == k
                          ? simplex_project(warm_start)
                          : Eigen::VectorXd::Constant(k, 1.0 / k);
  const double lipschitz = power_iteration_lambda_max(sys.gram) * (1.0 + 1e-6);
  const double step = 1.0 / lipschitz;

  double f = sys.objective(z);
  Eigen::VectorXd best = z;
  double best_f = f;
  Eigen::VectorXd y = z;
  double t = 1.0;
  int accepted = 0;
  constexpr int kPolishEvery = 8;

  auto finish = [&](const Eigen::VectorXd& point, int iters, bool ok) {
    result.z = point;
    result.report = check_kkt(sys, point);
    result.iterations = iters;
    result.converged = ok;
    return result;
  };

  if (auto polished = active_set_polish(sys, z, options.tol_kkt)) {
    return finish(*polished, 0, true);
  }

  for (int it = 1; it <= options.max_inner; ++it) {
    const Eigen::VectorXd grad = sys.gram * y - sys.h;
    const Eigen::VectorXd next = simplex_project(y - step * grad);
    const double next_f = sys.objective(next);
    if (next_f > f) {
      // Momentum overshoot: restart from the last accepted iterate.
      y = z;
      t = 1.0;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / t_next) * (next - z);
    z = next;
    f = next_f;
    t = t_next;
    if (f < best_f) {
      best_f = f;
      best = z;
    }
    ++accepted;

    if (check_kkt(sys, z).max_violation <= options.tol_kkt) {
      return finish(z, it, true);
    }
    if (accepted % kPolishEvery == 0) {
      if (auto polished = active_set_polish(sys, z, options.tol_kkt)) {
        return finish(*polished, it, true);
      }
    }
  }
  if (auto polished = active_set_polish(sys, best, options.tol_kkt)) {
    return finish(*polished, options.max_inner, true);
  }
  return finish(best, options.max_inner, false);
}

}  // namespace sparsepbn
