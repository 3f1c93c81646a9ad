#include "sparsepbn/io.hpp"

#include "sparsepbn/dictionary.hpp"

#include <json.hpp>

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace sparsepbn {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void parse_error(std::string_view source, int line,
                              const std::string& msg) {
  std::ostringstream os;
  os << source << ":" << line << ": " << msg;
  throw Error(ErrorCode::kParse, os.str());
}

}  // namespace

Eigen::MatrixXd read_matrix_csv(std::istream& in, std::string_view source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;

    std::vector<double> row;
    std::size_t start = 0;
    int field = 0;
    while (true) {
      ++field;
      const auto comma = body.find(',', start);
      const std::string_view raw =
          trim(body.substr(start, comma == std::string_view::npos ? body.npos
                                                                  : comma - start));
      double v = 0.0;
      const char* first = raw.data();
      const char* last = raw.data() + raw.size();
      if (!raw.empty() && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (raw.empty() || ec != std::errc() || ptr != last) {
        parse_error(source, line_no,
                    "field " + std::to_string(field) + ": not a number '" +
                        std::string(raw) + "'");
      }
      row.push_back(v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      parse_error(source, line_no,
                  "expected " + std::to_string(rows.front().size()) +
                      " fields, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (in.bad()) parse_error(source, line_no, "read error");
  if (rows.empty()) parse_error(source, line_no, "no matrix rows");

  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

StochasticMatrix parse_matrix_csv(std::istream& in, double tol_col,
                                  std::string_view source) {
  return StochasticMatrix::validate(read_matrix_csv(in, source), tol_col);
}

StochasticMatrix parse_matrix_csv(const std::filesystem::path& path,
                                  double tol_col) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kParse, "cannot open '" + path.string() + "'");
  }
  return parse_matrix_csv(in, tol_col, path.string());
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ec == std::errc() ? ptr : buf.data());
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

std::string input_digest(const Eigen::MatrixXd& p) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::string_view s) {
    for (const unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  };
  feed(std::to_string(p.rows()) + "x" + std::to_string(p.cols()) + ";");
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      feed(format_double(p(i, j)));
      feed(",");
    }
  }
  std::ostringstream os;
  os << "fnv1a64:" << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

RunResult make_run_result(std::string method, const StochasticMatrix& p,
                          const SparseSolution& x, const RunTrace& trace,
                          const ResSumTable& table, ConfigEcho config,
                          double wall_time) {
  const auto dict = ColumnSupportDictionary::build(p);
  RunResult r;
  r.method = std::move(method);
  r.input_digest = input_digest(p.entries());
  r.dim = p.dim();
  for (std::size_t l = 0; l < x.size(); ++l) {
    if (x.weights()[l] <= 0.0) continue;
    r.solution.push_back({dict.encode(x.atoms()[l]), x.atoms()[l].rows, x.weights()[l]});
  }
  r.trace.iterations = static_cast<int>(trace.iterations.size());
  r.trace.termination = to_string(trace.termination);
  r.trace.initial_residual = trace.initial_residual;
  r.trace.residuals.push_back(trace.initial_residual);
  for (const auto& rec : trace.iterations) {
    r.trace.residuals.push_back(rec.residual_norm_after);
    r.trace.sigmas.push_back(rec.sigma_k);
  }
  r.trace.final_residual = r.trace.residuals.back();
  r.trace.warnings = trace.warnings;
  for (const auto& row : table.rows) {
    r.table.push_back({row.j, row.res, row.sum, row.atom_id});
  }
  r.wall_time = wall_time;
  r.config = std::move(config);
  return r;
}

namespace {

json optional_to_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> optional_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

std::string to_json(const RunResult& r) {
  json doc;
  doc["format"] = "sparsepbn.result/1";
  doc["method"] = r.method;
  doc["input_digest"] = r.input_digest;
  doc["dim"] = r.dim;

  json atoms = json::array();
  for (const auto& a : r.solution) {
    json rows = json::object();
    for (std::size_t c = 0; c < a.rows.size(); ++c) {
      rows[std::to_string(c)] = a.rows[c];
    }
    atoms.push_back({{"id", a.id}, {"rows", a.rows}, {"column_to_row", rows},
                     {"weight", a.weight}});
  }
  doc["solution"] = {{"atoms", atoms}, {"support_size", r.solution.size()}};

  json sigmas = json::array();
  for (const auto& s : r.trace.sigmas) sigmas.push_back(optional_to_json(s));
  doc["trace"] = {{"iterations", r.trace.iterations},
                  {"termination", r.trace.termination},
                  {"initial_residual", r.trace.initial_residual},
                  {"final_residual", r.trace.final_residual},
                  {"residuals", r.trace.residuals},
                  {"sigmas", sigmas},
                  {"warnings", r.trace.warnings}};

  json table = json::array();
  for (const auto& row : r.table) {
    table.push_back({{"j", row.j}, {"res", row.res}, {"sum", row.sum},
                     {"atom_id", row.atom_id}});
  }
  doc["res_sum"] = table;
  doc["wall_time"] = r.wall_time;

  const auto& c = r.config;
  doc["config"] = {{"source", c.source},   {"init", c.init},
                   {"s", c.s},             {"seed", c.seed},
                   {"profile", c.profile}, {"tol_res", c.tol_res},
                   {"tol_dx", c.tol_dx},   {"tol_dres", optional_to_json(c.tol_dres)},
                   {"max_iter", c.max_iter}, {"col_tol", c.col_tol}};
  return doc.dump(2) + "\n";
}

RunResult run_result_from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    RunResult r;
    r.method = doc.at("method").get<std::string>();
    r.input_digest = doc.at("input_digest").get<std::string>();
    r.dim = doc.at("dim").get<int>();
    for (const auto& a : doc.at("solution").at("atoms")) {
      r.solution.push_back({a.at("id").get<std::uint64_t>(),
                            a.at("rows").get<std::vector<int>>(),
                            a.at("weight").get<double>()});
    }
    const auto& t = doc.at("trace");
    r.trace.iterations = t.at("iterations").get<int>();
    r.trace.termination = t.at("termination").get<std::string>();
    r.trace.initial_residual = t.at("initial_residual").get<double>();
    r.trace.final_residual = t.at("final_residual").get<double>();
    r.trace.residuals = t.at("residuals").get<std::vector<double>>();
    for (const auto& s : t.at("sigmas")) r.trace.sigmas.push_back(optional_from_json(s));
    r.trace.warnings = t.at("warnings").get<std::vector<std::string>>();
    for (const auto& row : doc.at("res_sum")) {
      r.table.push_back({row.at("j").get<int>(), row.at("res").get<double>(),
                         row.at("sum").get<double>(),
                         row.at("atom_id").get<std::uint64_t>()});
    }
    r.wall_time = doc.at("wall_time").get<double>();
    const auto& c = doc.at("config");
    r.config.source = c.at("source").get<std::string>();
    r.config.init = c.at("init").get<std::string>();
    r.config.s = c.at("s").get<int>();
    r.config.seed = c.at("seed").get<std::uint64_t>();
    r.config.profile = c.at("profile").get<std::string>();
    r.config.tol_res = c.at("tol_res").get<double>();
    r.config.tol_dx = c.at("tol_dx").get<double>();
    r.config.tol_dres = optional_from_json(c.at("tol_dres"));
    r.config.max_iter = c.at("max_iter").get<int>();
    r.config.col_tol = c.at("col_tol").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("result document: ") + e.what());
  }
}

void write_table_csv(std::ostream& out, const ResSumTable& table) {
  out << "j,res,sum,atom_id,weight\n";
  for (const auto& row : table.rows) {
    out << row.j << ',' << format_double(row.res) << ','
        << format_double(row.sum) << ',' << row.atom_id << ','
        << format_double(row.weight) << '\n';
  }
}

void write_curve_csv(std::ostream& out, const RunTrace& trace) {
  out << "k,residual,sigma_k\n";
  const auto& its = trace.iterations;
  for (std::size_t k = 0; k <= its.size(); ++k) {
    const double res = k == 0 ? trace.initial_residual : its[k - 1].residual_norm_after;
    out << k << ',' << format_double(res) << ',';
    if (k < its.size() && its[k].sigma_k) out << format_double(*its[k].sigma_k);
    out << '\n';
  }
}

std::string truth_to_json(const PlantedInstance& inst) {
  json atoms = json::array();
  for (std::size_t l = 0; l < inst.true_support.size(); ++l) {
    atoms.push_back({{"rows", inst.true_support[l].rows},
                     {"weight", inst.true_weights[l]}});
  }
  json doc = {{"format", "sparsepbn.truth/1"},
              {"dim", inst.p.dim()},
              {"seed", inst.seed},
              {"candidates_per_column", inst.candidates_per_column},
              {"atoms", atoms},
              {"effective_nnz", inst.effective_nnz}};
  return doc.dump(2) + "\n";
}

TruthFile truth_from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    TruthFile t;
    t.dim = doc.at("dim").get<int>();
    t.seed = doc.at("seed").get<std::uint64_t>();
    t.candidates_per_column = doc.at("candidates_per_column").get<int>();
    for (const auto& a : doc.at("atoms")) {
      t.atoms.push_back(Atom{a.at("rows").get<std::vector<int>>()});
      t.weights.push_back(a.at("weight").get<double>());
    }
    t.effective_nnz = doc.at("effective_nnz").get<std::vector<int>>();
    return t;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("truth document: ") + e.what());
  }
}

std::string recovery_to_json(const RecoveryReport& report) {
  json probes = json::array();
  for (std::size_t i = 0; i < report.probes.size(); ++i) {
    const auto& p = report.probes[i];
    probes.push_back(
        {{"index", i},
         {"residual", p.residual_norm},
         {"in_support_max", p.in_support_max},
         {"out_support_max", optional_to_json(p.out_support_max)},
         {"best_outside", p.best_outside ? json(p.best_outside->rows) : json(nullptr)},
         {"margin", p.out_support_max ? json(p.margin) : json(nullptr)},
         {"passed", p.passed},
         {"degenerate", p.degenerate},
         {"complement_method", to_string(p.method)}});
  }
  json doc = {{"format", "sparsepbn.recovery/1"},
              {"support_size", report.support_size},
              {"gram_rank", report.gram_rank},
              {"full_column_rank", report.full_column_rank},
              {"all_passed", report.all_passed},
              {"probes", probes}};
  return doc.dump(2) + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kParse, "cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot write '" + path.string() + "'");
  }
  out << text;
  if (!out) {
    throw Error(ErrorCode::kInvalidArgument,
                "write failed for '" + path.string() + "'");
  }
}

}  // namespace sparsepbn
