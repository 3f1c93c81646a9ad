#include "sparsepbn/examples.hpp"

namespace sparsepbn {

namespace {

Eigen::MatrixXd rows_to_matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd out(m, m);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) out(i, j++) = v;
    ++i;
  }
  return out;
}

Eigen::MatrixXd p1() {
  return rows_to_matrix({{0.1, 0.3, 0.5, 0.6},
                         {0.0, 0.7, 0.0, 0.0},
                         {0.0, 0.0, 0.5, 0.0},
                         {0.9, 0.0, 0.0, 0.4}});
}

Eigen::MatrixXd p2() {
  return rows_to_matrix({{0.1, 0.3, 0.2, 0.1},
                         {0.2, 0.3, 0.2, 0.0},
                         {0.0, 0.0, 0.6, 0.4},
                         {0.7, 0.4, 0.0, 0.5}});
}

Eigen::MatrixXd p4() {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(8, 8);
  out.topLeftCorner(4, 4) = p2();
  out.bottomRightCorner(4, 4) = p2();
  return out;
}

Eigen::MatrixXd p5() {
  return rows_to_matrix({{0.12, 0.0, 0.6, 0.42, 0.0, 0.0, 0.0, 0.0},
                         {0.28, 0.0, 0.0, 0.18, 0.0, 0.0, 0.0, 0.0},
                         {0.0, 0.4, 0.0, 0.0, 0.4, 0.18, 0.0, 0.0},
                         {0.0, 0.0, 0.0, 0.0, 0.0, 0.42, 0.0, 0.6},
                         {0.18, 0.0, 0.4, 0.28, 0.0, 0.0, 0.0, 0.0},
                         {0.42, 0.0, 0.0, 0.12, 0.0, 0.0, 0.0, 0.0},
                         {0.0, 0.6, 0.0, 0.0, 0.6, 0.12, 0.0, 0.0},
                         {0.0, 0.0, 0.0, 0.0, 0.0, 0.28, 1.0, 0.4}});
}

Eigen::MatrixXd p6() {
  return rows_to_matrix({{0.57, 0.0, 0.1, 0.0, 0.0, 0.04, 0.0, 0.0},
                         {0.14, 0.31, 0.0, 0.5, 0.13, 0.13, 0.33, 0.06},
                         {0.0, 0.08, 0.4, 0.25, 0.25, 0.0, 0.67, 0.0},
                         {0.0, 0.15, 0.0, 0.0, 0.0, 0.08, 0.0, 0.0},
                         {0.0, 0.15, 0.3, 0.0, 0.0, 0.13, 0.0, 0.0},
                         {0.29, 0.31, 0.2, 0.0, 0.25, 0.29, 0.0, 0.39},
                         {0.0, 0.0, 0.0, 0.0, 0.38, 0.0, 0.0, 0.0},
                         {0.0, 0.0, 0.0, 0.25, 0.0, 0.33, 0.0, 0.56}});
}

}  // namespace

Eigen::MatrixXd example3_entries(double eps) {
  const double a = 1.0 - eps;
  // The printed matrix also has a 1.0 at (7, 5) (one-based), which would make
  // column 5 sum to 2; it is left out.
  return rows_to_matrix({{a, 0, 0, 0.2, 0, 0, 0, 0},
                         {0, 0, 0, 0.2, 0, 0, 0, 0},
                         {0, 0, 0, 0, a, 0, 0, 0},
                         {eps, eps, eps, 0, eps, 0, 0, eps},
                         {0, 0, 0, 0.3, 0, 0, 0.5, 0},
                         {0, 0, 0, 0.3, 0, 0, 0.5, 0},
                         {0, a, a, 0, 0, 0.5, 0, 0},
                         {0, 0, 0, 0, 0, 0.5, 0, a}});
}

std::vector<std::string> example_names() {
  return {"p1", "p2", "p3a", "p3b", "p4", "p5", "p6"};
}

ExampleMatrix example_matrix(std::string_view name) {
  if (name == "p1") return {"p1", p1()};
  if (name == "p2") return {"p2", p2()};
  if (name == "p3a") return {"p3a", example3_entries(0.01)};
  if (name == "p3b") return {"p3b", example3_entries(0.02)};
  if (name == "p4") return {"p4", p4()};
  if (name == "p5") return {"p5", p5()};
  if (name == "p6") return {"p6", p6(), 0.015};
  throw Error(ErrorCode::kInvalidArgument,
              "unknown example '" + std::string(name) +
                  "' (expected p1, p2, p3a, p3b, p4, p5 or p6)");
}

StochasticMatrix load_example(std::string_view name) {
  const ExampleMatrix ex = example_matrix(name);
  return StochasticMatrix::validate(ex.entries, ex.column_tol);
}

}  // namespace sparsepbn
