// sparsepbn: reconstruct a sparse PBN from a transition matrix, or generate
// planted benchmark instances.
//
//   sparsepbn solve --example p1 --method momp --init zero --out run.json
//   sparsepbn gen --dim 4 --cands 2 --sparsity 3 --seed 7 --out-matrix p.csv
//
// Exit codes: 0 ok, 1 unexpected failure, 2 invalid input or flags,
// 3 solver warnings with --strict.

#include "sparsepbn/analysis.hpp"
#include "sparsepbn/baselines.hpp"
#include "sparsepbn/examples.hpp"
#include "sparsepbn/io.hpp"
#include "sparsepbn/momp.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using namespace sparsepbn;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitStrict = 3;

struct SolveArgs {
  std::string input;
  std::string example;
  std::string method = "momp";
  std::string init;
  int s = 1;
  std::uint64_t seed = 0;
  std::string profile = "default";
  std::optional<double> tol_res;
  std::optional<double> tol_dx;
  std::optional<double> tol_dres;
  std::optional<int> max_iter;
  std::optional<double> col_tol;
  std::optional<double> step_size;
  int j_max = 0;
  std::string out;
  std::string table;
  std::string curve;
  std::string check_recovery;
  std::string truth;
  bool strict = false;
};

struct GenArgs {
  int dim = 4;
  int cands = 2;
  int sparsity = 3;
  std::uint64_t seed = 0;
  std::string out_matrix;
  std::string out_truth;
};

template <typename Fn>
void write_with(const std::string& path, Fn&& fn) {
  std::ostringstream os;
  fn(os);
  write_text_file(path, os.str());
}

int run_solve(const SolveArgs& a) {
  StochasticMatrix p = [&] {
    if (!a.example.empty()) {
      const ExampleMatrix ex = example_matrix(a.example);
      return StochasticMatrix::validate(ex.entries, a.col_tol.value_or(ex.column_tol));
    }
    return parse_matrix_csv(a.input, a.col_tol.value_or(kColumnSumTol));
  }();
  const int m = p.dim() * p.dim();
  const bool pg = a.method == "pg";

  ConfigEcho echo;
  echo.source = a.example.empty() ? a.input : "example:" + a.example;
  echo.init = a.init.empty() ? (pg ? "uniform" : "zero") : a.init;
  echo.s = a.s;
  echo.seed = a.seed;
  echo.col_tol = a.col_tol.value_or(a.example.empty() ? kColumnSumTol
                                                      : example_matrix(a.example).column_tol);

  InitSpec init = InitSpec::zero();
  if (echo.init == "random") init = InitSpec::random_sparse(a.s, a.seed);
  if (echo.init == "uniform") init = InitSpec::uniform();

  StoppingCriteria stop;
  if (pg) {
    stop = PgConfig{}.stop;
    echo.profile = "pg";
  } else {
    stop = a.profile == "large" ? StoppingCriteria::large_profile(m)
                                : StoppingCriteria::default_profile(m);
    echo.profile = a.profile;
  }
  if (a.tol_res) stop.tol_res = *a.tol_res;
  if (a.tol_dx) stop.tol_dx = *a.tol_dx;
  if (a.tol_dres) stop.tol_dres = *a.tol_dres;
  if (a.max_iter) stop.max_iter = *a.max_iter;
  if (a.tol_res || a.tol_dx || a.tol_dres || a.max_iter) echo.profile += "+custom";
  stop.validate();
  echo.tol_res = stop.tol_res;
  echo.tol_dx = stop.tol_dx;
  echo.tol_dres = stop.tol_dres;
  echo.max_iter = stop.max_iter;

  std::optional<TruthFile> truth;
  if (!a.truth.empty()) {
    truth = truth_from_json(read_text_file(a.truth));
    if (truth->dim != p.dim()) {
      throw Error(ErrorCode::kDimensionMismatch, "truth file dim differs from the matrix");
    }
  }

  const auto t0 = std::chrono::steady_clock::now();
  SparseSolution solution;
  RunTrace trace;
  std::vector<SparseSolution> probes;
  if (pg) {
    PgConfig cfg;
    cfg.stop = stop;
    cfg.max_steps = stop.max_iter;
    cfg.step_size = a.step_size;
    PgResult r = pg_run(p, cfg, init);
    solution = std::move(r.solution);
    trace = std::move(r.trace);
    probes.push_back(solution);
  } else {
    MompOptions options;
    if (truth) options.target_support = truth->atoms;
    MompResult r = momp_run(p, init, stop, options);
    solution = std::move(r.solution);
    trace = std::move(r.trace);
    probes = std::move(r.iterates);
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const int j_max = a.j_max > 0 ? a.j_max : static_cast<int>(solution.size());
  const ResSumTable table = res_sum_table(solution, p, j_max);
  const RunResult result =
      make_run_result(a.method, p, solution, trace, table, echo, wall);

  std::cout << "method " << result.method << ", " << result.trace.iterations
            << " iterations, " << result.trace.termination << ", residual "
            << format_double(result.trace.final_residual) << ", support "
            << result.solution.size() << "\n";
  for (const auto& w : trace.warnings) std::cerr << "warning: " << w << "\n";

  if (!a.out.empty()) write_text_file(a.out, to_json(result));
  if (!a.table.empty()) {
    write_with(a.table, [&](std::ostream& os) { write_table_csv(os, table); });
  }
  if (!a.curve.empty()) {
    write_with(a.curve, [&](std::ostream& os) { write_curve_csv(os, trace); });
  }
  if (!a.check_recovery.empty()) {
    std::vector<Atom> target;
    if (truth) {
      target = truth->atoms;
    } else {
      for (std::size_t l = 0; l < solution.size(); ++l) {
        if (solution.weights()[l] > 0.0) target.push_back(solution.atoms()[l]);
      }
    }
    const RecoveryReport report = recovery_condition_check(p, target, probes);
    write_text_file(a.check_recovery, recovery_to_json(report));
    std::cout << "recovery check " << (report.all_passed ? "passed" : "failed")
              << " at " << report.probes.size() << " probes, gram rank "
              << report.gram_rank << "/" << report.support_size << "\n";
  }

  if (a.strict && !trace.warnings.empty()) return kExitStrict;
  return kExitOk;
}

int run_gen(const GenArgs& a) {
  const PlantedInstance inst = plant_instance(a.dim, a.cands, a.sparsity, a.seed);
  if (a.out_matrix.empty()) {
    write_matrix_csv(std::cout, inst.p.entries());
  } else {
    write_with(a.out_matrix, [&](std::ostream& os) {
      os << "# planted dim=" << a.dim << " cands=" << a.cands
         << " sparsity=" << a.sparsity << " seed=" << a.seed << "\n";
      write_matrix_csv(os, inst.p.entries());
    });
  }
  if (!a.out_truth.empty()) write_text_file(a.out_truth, truth_to_json(inst));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse probabilistic Boolean network reconstruction"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Decompose a transition matrix");
  auto* input = solve->add_option("--input", sa.input, "CSV matrix file")
                    ->check(CLI::ExistingFile);
  auto* example = solve->add_option("--example", sa.example, "Embedded matrix")
                      ->check(CLI::IsMember(example_names()));
  input->excludes(example);
  example->excludes(input);
  solve->add_option("--method", sa.method)->check(CLI::IsMember({"momp", "pg"}))
      ->capture_default_str();
  solve->add_option("--init", sa.init, "zero|random|uniform (default: zero for momp, uniform for pg)")
      ->check(CLI::IsMember({"zero", "random", "uniform"}));
  solve->add_option("--s", sa.s, "Atoms in a random init")->capture_default_str();
  solve->add_option("--seed", sa.seed)->capture_default_str();
  solve->add_option("--profile", sa.profile, "MOMP stopping profile")
      ->check(CLI::IsMember({"default", "large"}))
      ->capture_default_str();
  solve->add_option("--tol-res", sa.tol_res);
  solve->add_option("--tol-dx", sa.tol_dx);
  solve->add_option("--tol-dres", sa.tol_dres);
  solve->add_option("--max-iter", sa.max_iter);
  solve->add_option("--col-tol", sa.col_tol, "Column-sum tolerance for validation");
  solve->add_option("--step-size", sa.step_size, "PG step (default 1/L)");
  solve->add_option("--j-max", sa.j_max, "Rows in the res/sum table (default: all)");
  solve->add_option("--out", sa.out, "Result document (JSON)");
  solve->add_option("--table", sa.table, "res/sum CSV");
  solve->add_option("--curve", sa.curve, "Per-iteration k,residual,sigma_k CSV");
  solve->add_option("--check-recovery", sa.check_recovery, "Recovery diagnostics (JSON)");
  solve->add_option("--truth", sa.truth, "Ground-truth file from `gen`")
      ->check(CLI::ExistingFile);
  solve->add_flag("--strict", sa.strict, "Exit 3 when the solver warns");

  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "Generate a planted instance");
  gen->add_option("--dim", ga.dim)->capture_default_str();
  gen->add_option("--cands", ga.cands, "Candidate rows per column")->capture_default_str();
  gen->add_option("--sparsity", ga.sparsity)->capture_default_str();
  gen->add_option("--seed", ga.seed)->capture_default_str();
  gen->add_option("--out-matrix", ga.out_matrix, "Matrix CSV (default: stdout)");
  gen->add_option("--out-truth", ga.out_truth, "Ground-truth JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (solve->parsed()) {
      if (sa.input.empty() && sa.example.empty()) {
        std::cerr << "solve: one of --input or --example is required\n";
        return kExitInvalid;
      }
      return run_solve(sa);
    }
    return run_gen(ga);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_validation() ? kExitInvalid : kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
