#pragma once

// Matrix CSV ingestion, result documents, and table/curve CSV writers.

#include "sparsepbn/analysis.hpp"
#include "sparsepbn/core.hpp"
#include "sparsepbn/momp.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sparsepbn {

/// Reads M rows of M comma-separated decimals. Lines starting with '#' and
/// blank lines are skipped; '\r' is tolerated. Errors (kParse) carry the
/// 1-based line number.
Eigen::MatrixXd read_matrix_csv(std::istream& in,
                                std::string_view source = "<stream>");

/// read_matrix_csv followed by StochasticMatrix::validate.
StochasticMatrix parse_matrix_csv(const std::filesystem::path& path,
                                  double tol_col = kColumnSumTol);
StochasticMatrix parse_matrix_csv(std::istream& in, double tol_col = kColumnSumTol,
                                  std::string_view source = "<stream>");

/// Shortest round-trip decimal form of v.
std::string format_double(double v);

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);

/// "fnv1a64:<16 hex digits>" over the shortest round-trip text of the entries
/// in column-major order.
std::string input_digest(const Eigen::MatrixXd& p);

struct SolutionAtom {
  std::uint64_t id = 0;
  /// rows[c] is the row chosen in column c.
  std::vector<int> rows;
  double weight = 0.0;

  friend bool operator==(const SolutionAtom&, const SolutionAtom&) = default;
};

struct TableRow {
  int j = 0;
  double res = 0.0;
  double sum = 0.0;
  std::uint64_t atom_id = 0;

  friend bool operator==(const TableRow&, const TableRow&) = default;
};

struct TraceSummary {
  int iterations = 0;
  std::string termination;
  double initial_residual = 0.0;
  double final_residual = 0.0;
  /// residuals[k] = ||b - A x^k||, k = 0..iterations.
  std::vector<double> residuals;
  /// sigma_k per iteration; empty where undefined.
  std::vector<std::optional<double>> sigmas;
  std::vector<std::string> warnings;

  friend bool operator==(const TraceSummary&, const TraceSummary&) = default;
};

struct ConfigEcho {
  std::string source;
  std::string init;
  int s = 0;
  std::uint64_t seed = 0;
  std::string profile;
  double tol_res = 0.0;
  double tol_dx = 0.0;
  std::optional<double> tol_dres;
  int max_iter = 0;
  double col_tol = kColumnSumTol;

  friend bool operator==(const ConfigEcho&, const ConfigEcho&) = default;
};

struct RunResult {
  std::string method;
  std::string input_digest;
  int dim = 0;
  std::vector<SolutionAtom> solution;
  TraceSummary trace;
  std::vector<TableRow> table;
  double wall_time = 0.0;
  ConfigEcho config;

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

/// Fills method-independent fields from a finished run.
RunResult make_run_result(std::string method, const StochasticMatrix& p,
                          const SparseSolution& x, const RunTrace& trace,
                          const ResSumTable& table, ConfigEcho config,
                          double wall_time);

/// Pretty-printed JSON document, LF-terminated. Keys are sorted, so output is
/// deterministic apart from wall_time.
std::string to_json(const RunResult& result);
/// Throws kParse on malformed documents.
RunResult run_result_from_json(std::string_view text);

/// j,res,sum,atom_id,weight
void write_table_csv(std::ostream& out, const ResSumTable& table);
/// k,residual,sigma_k for k = 0..K; sigma_k is blank where undefined.
void write_curve_csv(std::ostream& out, const RunTrace& trace);

struct TruthFile {
  int dim = 0;
  std::uint64_t seed = 0;
  int candidates_per_column = 0;
  std::vector<Atom> atoms;
  std::vector<double> weights;
  std::vector<int> effective_nnz;
};

std::string truth_to_json(const PlantedInstance& inst);
TruthFile truth_from_json(std::string_view text);

/// JSON diagnostics for recovery_condition_check.
std::string recovery_to_json(const RecoveryReport& report);

/// Whole-file helpers; throw kParse (read) or kInvalidArgument (write) on I/O
/// failure.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace sparsepbn
