#include "sparsepbn/analysis.hpp"

#include "sparsepbn/random.hpp"
#include "sparsepbn/simplex_ls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

namespace sparsepbn {

ResSumTable res_sum_table(const SparseSolution& x, const StochasticMatrix& p,
                          int j_max) {
  const auto dict = ColumnSupportDictionary::build(p);
  if (x.binding() != dict.binding()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "solution is not bound to this matrix's dictionary");
  }
  struct Entry {
    long long key;
    std::uint64_t id;
    std::size_t index;
  };
  std::vector<Entry> order;
  for (std::size_t l = 0; l < x.size(); ++l) {
    const double w = x.weights()[l];
    if (w <= 0.0) continue;
    order.push_back({std::llround(w / kTableTieTol), dict.encode(x.atoms()[l]), l});
  }
  std::sort(order.begin(), order.end(), [](const Entry& a, const Entry& b) {
    if (a.key != b.key) return a.key > b.key;
    return a.id > b.id;
  });

  ResSumTable table;
  Eigen::MatrixXd residual = p.entries();
  double sum = 0.0;
  const int rows = std::min<int>(std::max(j_max, 0), static_cast<int>(order.size()));
  for (int j = 0; j < rows; ++j) {
    const auto& e = order[static_cast<std::size_t>(j)];
    const Atom& atom = x.atoms()[e.index];
    const double w = x.weights()[e.index];
    atom_apply(atom, -w, residual);
    sum += w;
    table.rows.push_back({j + 1, residual.norm(), sum, e.id, atom, w});
  }
  return table;
}

std::string to_string(ComplementMethod method) {
  return method == ComplementMethod::kEnumeration ? "enumeration" : "best_first";
}

namespace {

struct Outside {
  double score;
  Atom atom;
};

std::optional<Outside> complement_max_enumerate(
    const ColumnSupportDictionary& dict, const Eigen::MatrixXd& r,
    const std::set<Atom>& excluded) {
  std::optional<Outside> best;
  dict.for_each_atom([&](std::uint64_t, const Atom& a) {
    if (excluded.count(a)) return;
    const double s = atom_dot(a, r);
    if (!best || s > best->score) best = Outside{s, a};
  });
  return best;
}

// Atoms pop in nonincreasing score order. A state increments only columns at
// or after its last incremented column, so every position tuple is generated
// exactly once.
std::optional<Outside> complement_max_best_first(
    const ColumnSupportDictionary& dict, const Eigen::MatrixXd& r,
    const std::set<Atom>& excluded) {
  const int dim = dict.dim();
  std::vector<std::vector<int>> sorted(dim);
  for (int c = 0; c < dim; ++c) {
    sorted[c] = dict.candidates(c);
    std::stable_sort(sorted[c].begin(), sorted[c].end(), [&](int a, int b) {
      return r(a, c) > r(b, c);
    });
  }
  struct State {
    double score;
    std::vector<int> pos;
    int last;
  };
  auto cmp = [](const State& a, const State& b) { return a.score < b.score; };
  std::priority_queue<State, std::vector<State>, decltype(cmp)> heap(cmp);

  State root{0.0, std::vector<int>(dim, 0), 0};
  for (int c = 0; c < dim; ++c) root.score += r(sorted[c][0], c);
  heap.push(std::move(root));

  while (!heap.empty()) {
    State top = heap.top();
    heap.pop();
    Atom atom;
    atom.rows.resize(dim);
    for (int c = 0; c < dim; ++c) atom.rows[c] = sorted[c][top.pos[c]];
    if (!excluded.count(atom)) return Outside{atom_dot(atom, r), std::move(atom)};
    for (int c = top.last; c < dim; ++c) {
      const int next = top.pos[c] + 1;
      if (next >= static_cast<int>(sorted[c].size())) continue;
      State child{top.score - r(sorted[c][top.pos[c]], c) + r(sorted[c][next], c),
                  top.pos, c};
      child.pos[c] = next;
      heap.push(std::move(child));
    }
  }
  return std::nullopt;
}

}  // namespace

RecoveryReport recovery_condition_check(
    const StochasticMatrix& p, const std::vector<Atom>& target_support,
    const std::vector<SparseSolution>& probes) {
  const auto dict = ColumnSupportDictionary::build(p);
  const std::set<Atom> target(target_support.begin(), target_support.end());
  if (target.size() != target_support.size()) {
    throw Error(ErrorCode::kDuplicateAtom, "target support repeats an atom");
  }
  for (const auto& a : target_support) {
    if (!dict.contains(a)) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "target atom outside the dictionary of P");
    }
  }

  RecoveryReport report;
  report.support_size = static_cast<int>(target_support.size());
  if (!target_support.empty()) {
    report.gram_rank = psd_rank(build_gram(target_support, p).gram);
  }
  report.full_column_rank = report.gram_rank == report.support_size;

  const auto n = dict.atom_count();
  const bool enumerate = n && *n <= kEnumerationLimit;
  report.all_passed = true;
  for (const auto& x : probes) {
    ProbeReport probe;
    probe.method = enumerate ? ComplementMethod::kEnumeration
                             : ComplementMethod::kBestFirst;
    const ResidualMatrix r = residual_matrix(p, x);
    probe.residual_norm = residual_norm(r);

    probe.in_support_max = -std::numeric_limits<double>::infinity();
    for (const auto& a : target_support) {
      probe.in_support_max = std::max(probe.in_support_max, atom_dot(a, r));
    }
    const auto outside = enumerate ? complement_max_enumerate(dict, r, target)
                                   : complement_max_best_first(dict, r, target);
    if (outside) {
      probe.out_support_max = outside->score;
      probe.best_outside = outside->atom;
      probe.margin = probe.in_support_max - outside->score;
    } else {
      probe.margin = std::numeric_limits<double>::infinity();
    }

    if (probe.residual_norm <= kDegenerateResidual) {
      probe.degenerate = true;
      probe.passed = true;
    } else {
      probe.passed = probe.margin > kRecoveryMarginTol;
    }
    report.all_passed = report.all_passed && probe.passed;
    report.probes.push_back(std::move(probe));
  }
  return report;
}

SparseSolution PlantedInstance::truth() const {
  const auto dict = ColumnSupportDictionary::build(p);
  return SparseSolution(dict.binding(), true_support, true_weights);
}

PlantedInstance plant_instance(int dim, int per_column_candidates, int d,
                               std::uint64_t seed) {
  if (dim < 1) throw Error(ErrorCode::kInvalidArgument, "dim must be >= 1");
  if (d < 1) throw Error(ErrorCode::kInvalidArgument, "d must be >= 1");
  if (per_column_candidates < 1 || per_column_candidates > dim) {
    throw Error(ErrorCode::kInvalidArgument,
                "candidates per column must lie in [1, dim]");
  }
  // cands^dim, saturating at d.
  std::uint64_t pattern_atoms = 1;
  for (int c = 0; c < dim && pattern_atoms < static_cast<std::uint64_t>(d); ++c) {
    pattern_atoms *= static_cast<std::uint64_t>(per_column_candidates);
  }
  if (pattern_atoms < static_cast<std::uint64_t>(d)) {
    std::ostringstream os;
    os << "pattern has " << pattern_atoms << " atoms, fewer than d = " << d;
    throw Error(ErrorCode::kPatternTooSmall, os.str());
  }

  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> pattern(dim);
  for (int c = 0; c < dim; ++c) {
    std::vector<int> rows(dim);
    std::iota(rows.begin(), rows.end(), 0);
    for (int i = 0; i < per_column_candidates; ++i) {
      const auto pick = i + static_cast<int>(detail::uniform_below(
                                rng, static_cast<std::uint64_t>(dim - i)));
      std::swap(rows[i], rows[pick]);
    }
    rows.resize(per_column_candidates);
    std::sort(rows.begin(), rows.end());
    pattern[c] = std::move(rows);
  }

  std::set<Atom> seen;
  std::vector<Atom> atoms;
  while (static_cast<int>(atoms.size()) < d) {
    Atom a;
    a.rows.resize(dim);
    for (int c = 0; c < dim; ++c) {
      a.rows[c] = pattern[c][detail::uniform_below(
          rng, static_cast<std::uint64_t>(per_column_candidates))];
    }
    if (seen.insert(a).second) atoms.push_back(std::move(a));
  }

  std::vector<double> weights(atoms.size());
  double total = 0.0;
  for (double& w : weights) {
    w = detail::exponential(rng);
    total += w;
  }
  for (double& w : weights) w /= total;

  Eigen::MatrixXd entries = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t l = 0; l < atoms.size(); ++l) {
    atom_apply(atoms[l], weights[l], entries);
  }

  PlantedInstance inst{StochasticMatrix::validate(entries), std::move(atoms),
                       std::move(weights), seed, per_column_candidates, {}};
  for (int c = 0; c < dim; ++c) {
    inst.effective_nnz.push_back(
        static_cast<int>((inst.p.entries().col(c).array() > kSupportTol).count()));
  }
  return inst;
}

DecreaseAudit decrease_audit(const RunTrace& trace, double slack) {
  DecreaseAudit audit;
  audit.worst_slack = -std::numeric_limits<double>::infinity();
  auto check = [&](const IterationRecord& rec, double excess,
                   const char* what) {
    audit.worst_slack = std::max(audit.worst_slack, excess);
    if (excess > slack && audit.passed) {
      audit.passed = false;
      audit.failing_iteration = rec.k;
      std::ostringstream os;
      os << "iteration " << rec.k << ": " << what << " violated by " << excess;
      audit.failure = os.str();
    }
  };

  for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
    const auto& rec = trace.iterations[i];
    const double before = rec.residual_norm_before;
    const double after = rec.residual_norm_after;
    if (i > 0) {
      check(rec, std::abs(before - trace.iterations[i - 1].residual_norm_after),
            "residual chaining");
    }
    if (rec.stagnated) {
      check(rec, std::abs(after - before), "equality under stagnation");
      continue;
    }
    if (!rec.decrease_applicable) continue;
    check(rec, after - before, "residual monotonicity");
    if (!rec.sigma_k) {
      check(rec, std::numeric_limits<double>::infinity(), "sigma_k defined");
      continue;
    }
    const double sigma = *rec.sigma_k;
    check(rec, -sigma, "sigma_k >= 0");
    check(rec, sigma - 1.0, "sigma_k <= 1");
    check(rec,
          after * after - (before * before - sigma * sigma * rec.step_norm_sq),
          "sigma_k decrease bound");
  }
  if (trace.iterations.empty()) audit.worst_slack = 0.0;
  return audit;
}

}  // namespace sparsepbn
