#include "sparsepbn/momp.hpp"

#include "sparsepbn/random.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace sparsepbn {

std::string to_string(InitSpec::Kind kind) {
  switch (kind) {
    case InitSpec::Kind::kZero: return "zero";
    case InitSpec::Kind::kRandomSparse: return "random";
    case InitSpec::Kind::kExplicit: return "explicit";
    case InitSpec::Kind::kUniform: return "uniform";
  }
  return "unknown";
}

std::string to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::kResidualTol: return "ResidualTol";
    case TerminationReason::kIterateChangeTol: return "IterateChangeTol";
    case TerminationReason::kResidualChangeTol: return "ResidualChangeTol";
    case TerminationReason::kStagnation: return "Stagnation";
    case TerminationReason::kMaxIterations: return "MaxIterations";
  }
  return "unknown";
}

SparseSolution make_init(const InitSpec& init,
                         const ColumnSupportDictionary& dict) {
  switch (init.kind) {
    case InitSpec::Kind::kZero:
      return SparseSolution::zero(dict.binding());

    case InitSpec::Kind::kRandomSparse: {
      if (init.s < 1) {
        throw Error(ErrorCode::kInvalidArgument, "s must be positive");
      }
      const auto n = dict.atom_count();
      if (n && static_cast<std::uint64_t>(init.s) > *n) {
        std::ostringstream os;
        os << "s = " << init.s << " exceeds N = " << *n;
        throw Error(ErrorCode::kSTooLarge, os.str());
      }
      std::mt19937_64 rng(init.seed);
      std::set<Atom> seen;
      std::vector<Atom> atoms;
      std::vector<int> digits(dict.dim());
      while (static_cast<int>(atoms.size()) < init.s) {
        for (int c = 0; c < dict.dim(); ++c) {
          digits[c] = static_cast<int>(detail::uniform_below(
              rng, static_cast<std::uint64_t>(dict.count(c))));
        }
        Atom a = dict.from_positions(digits);
        if (seen.insert(a).second) atoms.push_back(std::move(a));
      }
      std::vector<double> weights(atoms.size());
      double total = 0.0;
      for (double& w : weights) {
        w = detail::exponential(rng);
        total += w;
      }
      for (double& w : weights) w /= total;
      return SparseSolution(dict.binding(), std::move(atoms),
                            std::move(weights));
    }

    case InitSpec::Kind::kExplicit: {
      if (!init.point) {
        throw Error(ErrorCode::kInvalidArgument, "explicit init without point");
      }
      const auto& x = *init.point;
      if (x.binding() != dict.binding()) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "explicit init built against another dictionary");
      }
      for (const auto& a : x.atoms()) {
        if (!dict.contains(a)) {
          throw Error(ErrorCode::kIndexOutOfRange,
                      "explicit init uses an atom outside the dictionary");
        }
      }
      if (!x.is_feasible()) {
        throw Error(ErrorCode::kInfeasiblePoint,
                    "explicit init must lie on the simplex");
      }
      return x;
    }

    case InitSpec::Kind::kUniform: {
      const auto n = dict.atom_count();
      if (!n || *n > 1'000'000) {
        throw Error(ErrorCode::kDictionaryTooLarge,
                    "uniform init needs N <= 1e6");
      }
      std::vector<Atom> atoms;
      atoms.reserve(*n);
      dict.for_each_atom(
          [&](std::uint64_t, const Atom& a) { atoms.push_back(a); });
      std::vector<double> weights(atoms.size(),
                                  1.0 / static_cast<double>(*n));
      return SparseSolution(dict.binding(), std::move(atoms),
                            std::move(weights));
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown init kind");
}

namespace {

double current_correlation(const SparseSolution& x, const ResidualMatrix& r) {
  double mu = 0.0;
  for (std::size_t l = 0; l < x.size(); ++l) {
    mu += x.weights()[l] * atom_dot(x.atoms()[l], r);
  }
  return mu;
}

// ||A(e_j - x)||^2 computed on the M x M matrices.
double step_norm_sq(const Atom& atom, const SparseSolution& x, int dim) {
  Eigen::MatrixXd diff = -reconstruct(x, dim);
  atom_apply(atom, 1.0, diff);
  return diff.squaredNorm();
}

constexpr double kDegenerateStep = 1e-12;

}  // namespace

std::optional<double> sigma_k(const ResidualMatrix& r_before, const Atom& atom,
                              const SparseSolution& x_k) {
  const double denom =
      step_norm_sq(atom, x_k, static_cast<int>(r_before.rows()));
  if (denom <= kDegenerateStep) return std::nullopt;
  return (atom_dot(atom, r_before) - current_correlation(x_k, r_before)) /
         denom;
}

MompResult momp_run(const StochasticMatrix& p, const InitSpec& init,
                    const StoppingCriteria& stop, const MompOptions& options) {
  stop.validate();
  const auto dict = ColumnSupportDictionary::build(p, options.tau_supp);
  const int dim = p.dim();

  MompResult out;
  SparseSolution x = make_init(init, dict);
  ResidualMatrix r = residual_matrix(p, x);
  double res = residual_norm(r);
  out.trace.initial_residual = res;
  out.iterates.push_back(x);

  std::vector<Atom> support;
  Eigen::VectorXd z;  // weights aligned with `support`
  double last_kkt = 0.0;

  if (res <= stop.tol_res) {
    out.trace.termination = TerminationReason::kResidualTol;
    out.solution = x;
    return out;
  }

  out.trace.termination = TerminationReason::kMaxIterations;
  for (int k = 0; k < stop.max_iter; ++k) {
    IterationRecord rec;
    rec.k = k;
    rec.residual_norm_before = res;

    const Correlation best = correlation_argmax(r, dict);
    rec.selected_atom = best.atom;
    if (dict.atom_count()) rec.selected_atom_id = dict.encode(best.atom);
    rec.score = best.score;
    rec.current_correlation = current_correlation(x, r);
    rec.step_norm_sq = step_norm_sq(best.atom, x, dim);
    if (rec.step_norm_sq > kDegenerateStep) {
      rec.sigma_k = (rec.score - rec.current_correlation) / rec.step_norm_sq;
    }
    if (options.target_support) {
      const auto& target = *options.target_support;
      rec.inside_target_support =
          std::find(target.begin(), target.end(), best.atom) != target.end();
    }

    const bool already_selected =
        std::find(support.begin(), support.end(), best.atom) != support.end();
    if (already_selected || !rec.sigma_k ||
        rec.score - rec.current_correlation <= options.stagnation_tol) {
      rec.stagnated = true;
      rec.residual_norm_after = res;
      rec.kkt_violation = last_kkt;
      out.trace.iterations.push_back(rec);
      out.trace.termination = TerminationReason::kStagnation;
      break;
    }

    // The bound needs x^k on the simplex with supp(x^k) in S^k. At k = 0
    // x^0 = 0 is off the simplex, and a random x^0 is not supported on S^0.
    rec.decrease_applicable = k >= 1;

    support.push_back(best.atom);
    Eigen::VectorXd warm(static_cast<Eigen::Index>(support.size()));
    warm.head(z.size()) = z;
    warm(warm.size() - 1) = 0.0;
    if (z.size() == 0) warm.setOnes();

    const GramSystem sys = build_gram(support, p);
    const SimplexLsResult inner = solve_simplex_ls(sys, options.inner, warm);
    rec.inner_converged = inner.converged;
    if (!inner.converged) {
      std::ostringstream os;
      os << "iteration " << k << ": inner solver hit max_inner ("
         << options.inner.max_inner << "), KKT violation "
         << inner.report.max_violation;
      out.trace.warnings.push_back(os.str());
    }

    z = inner.z.cwiseMax(0.0);
    for (Eigen::Index l = 0; l < z.size(); ++l) {
      if (z(l) <= kWeightTol) z(l) = 0.0;
    }
    z /= z.sum();
    last_kkt = check_kkt(sys, z).max_violation;

    SparseSolution next(dict.binding(), support,
                        std::vector<double>(z.data(), z.data() + z.size()));
    double dx = 0.0;
    for (std::size_t l = 0; l < next.size(); ++l) {
      dx += std::abs(next.weights()[l] - x.weight_of(next.atoms()[l]));
    }
    for (std::size_t l = 0; l < x.size(); ++l) {
      if (!next.find(x.atoms()[l])) dx += x.weights()[l];
    }

    r = residual_matrix(p, next);
    const double next_res = residual_norm(r);
    rec.residual_norm_after = next_res;
    rec.kkt_violation = last_kkt;
    rec.dx_l1 = dx;
    out.trace.iterations.push_back(rec);
    out.iterates.push_back(next);

    const double prev_res = res;
    x = std::move(next);
    res = next_res;

    if (res <= stop.tol_res) {
      out.trace.termination = TerminationReason::kResidualTol;
      break;
    }
    if (dx <= stop.tol_dx) {
      out.trace.termination = TerminationReason::kIterateChangeTol;
      break;
    }
    if (stop.tol_dres && std::abs(res - prev_res) <= *stop.tol_dres) {
      out.trace.termination = TerminationReason::kResidualChangeTol;
      break;
    }
  }
  out.solution = std::move(x);
  return out;
}

}  // namespace sparsepbn
