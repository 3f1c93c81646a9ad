#pragma once

// The six benchmark transition matrices (p3a/p3b are the eps = 0.01 / 0.02
// variants of the third).

#include "sparsepbn/core.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace sparsepbn {

struct ExampleMatrix {
  std::string name;
  Eigen::MatrixXd entries;
  /// Column-sum tolerance the printed values satisfy (p6 sums to 1.01 in two
  /// columns).
  double column_tol = kColumnSumTol;
};

/// p1, p2, p3a, p3b, p4, p5, p6.
std::vector<std::string> example_names();

/// Throws kInvalidArgument for an unknown name.
ExampleMatrix example_matrix(std::string_view name);

/// example_matrix(name) validated with its column tolerance.
StochasticMatrix load_example(std::string_view name);

/// The third example for any eps in (0, 1).
Eigen::MatrixXd example3_entries(double eps);

}  // namespace sparsepbn
