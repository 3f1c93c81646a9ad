#include "sparsepbn/baselines.hpp"
#include "sparsepbn/examples.hpp"
#include "sparsepbn/simplex_ls.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace sparsepbn;

TEST_CASE("omp: y is a column") {
  Eigen::MatrixXd phi(3, 4);
  phi << 1, 0, 0, 1,
         0, 1, 0, 1,
         0, 0, 1, 1;
  const Eigen::VectorXd y = phi.col(2);
  const auto r = omp_run(phi, y, 1);
  CHECK(r.trace.selected == std::vector<int>{2});
  CHECK(r.w(2) == doctest::Approx(1.0));
  CHECK(r.trace.residual_norms.back() <= 1e-14);
}

TEST_CASE("omp: orthogonal columns give exact coefficients") {
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(4, 3);
  phi(0, 0) = 1;
  phi(1, 1) = 1;
  phi(2, 2) = 1;
  const Eigen::VectorXd y = 2 * phi.col(0) + 3 * phi.col(1);
  const auto r = omp_run(phi, y, 2);
  CHECK(r.w(0) == doctest::Approx(2.0));
  CHECK(r.w(1) == doctest::Approx(3.0));
  CHECK(r.w(2) == 0.0);
}

TEST_CASE("omp: planted 3-sparse recovery on random matrices") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0, 1);
  int exact = 0;
  for (int t = 0; t < 100; ++t) {
    Eigen::MatrixXd phi(10, 30);
    for (Eigen::Index i = 0; i < phi.size(); ++i) phi.data()[i] = g(rng);
    std::vector<int> idx(30);
    for (int i = 0; i < 30; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(30);
    w(idx[0]) = 3.0;
    w(idx[1]) = -2.0;
    w(idx[2]) = 1.5;
    const auto r = omp_run(phi, phi * w, 3);
    // Distinct selections and strictly decreasing residuals.
    CHECK(std::set<int>(r.trace.selected.begin(), r.trace.selected.end()).size() ==
          r.trace.selected.size());
    for (std::size_t k = 1; k < r.trace.residual_norms.size(); ++k) {
      CHECK(r.trace.residual_norms[k] < r.trace.residual_norms[k - 1]);
    }
    // Instances where OMP's coherence conditions fail show a nonzero residual.
    if (r.trace.residual_norms.back() > 1e-9) continue;
    ++exact;
    std::vector<int> got = r.trace.selected;
    std::vector<int> want{idx[0], idx[1], idx[2]};
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    CHECK(got == want);
    CHECK((r.w - w).norm() <= 1e-9);
  }
  CHECK(exact >= 10);
}

TEST_CASE("omp: errors") {
  Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(3, 3);
  CHECK(code_of([&] { omp_run(phi, Eigen::VectorXd::Ones(2), 1); }) ==
        ErrorCode::kDimensionMismatch);
  CHECK(code_of([&] { omp_run(phi, Eigen::VectorXd::Ones(3), 4); }) ==
        ErrorCode::kInvalidArgument);
  phi(1, 1) = 0;
  CHECK(code_of([&] { omp_run(phi, Eigen::VectorXd::Ones(3), 1); }) ==
        ErrorCode::kInvalidArgument);

  // Two identical columns: the second is selected after the first only if
  // the residual still correlates with it, which makes the QR singular.
  Eigen::MatrixXd dup(2, 3);
  dup << 1, 1, 0,
         0, 0, 1;
  Eigen::VectorXd y(2);
  y << 1, 1;
  const auto r = omp_run(dup, y, 2);
  CHECK(r.trace.selected.size() == 2);
  CHECK(std::find(r.trace.selected.begin(), r.trace.selected.end(), 2) != r.trace.selected.end());
}

TEST_CASE("implicit_grad: zero point gives -A^T b") {
  const auto p = load_example("p1");
  const auto d = ColumnSupportDictionary::build(p);
  const Eigen::VectorXd g = implicit_grad(p, d, Eigen::VectorXd::Zero(16));
  const auto atoms = oracle::all_atoms(d);
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    double expect = 0;
    for (int c = 0; c < 4; ++c) expect -= p(atoms[j].rows[c], c);
    CHECK(g(static_cast<Eigen::Index>(j)) == doctest::Approx(expect).epsilon(1e-15));
  }
}

TEST_CASE("implicit_grad matches the explicit dictionary") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd pm = t == 0 ? load_example("p1").entries()
                                      : oracle::random_stochastic(4 + t % 3, 2 + t % 3, rng);
    const auto p = StochasticMatrix::validate(pm);
    const auto d = ColumnSupportDictionary::build(p);
    REQUIRE(*d.atom_count() <= 10000);
    const Eigen::MatrixXd a = oracle::explicit_dictionary(d);
    const Eigen::VectorXd b = oracle::vec(p.entries());
    Eigen::VectorXd x(a.cols());
    std::uniform_real_distribution<double> u(0, 1);
    for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = u(rng);
    x /= x.sum();
    const Eigen::VectorXd want = a.transpose() * (a * x - b);
    const Eigen::VectorXd got = implicit_grad(p, d, x);
    CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(dense_reconstruct(d, x).isApprox(
        Eigen::Map<const Eigen::MatrixXd>((a * x).eval().data(), p.dim(), p.dim()), 1e-12));
  }
}

TEST_CASE("implicit_grad at an exact solution satisfies simplex KKT") {
  const auto p = load_example("p1");
  const auto d = ColumnSupportDictionary::build(p);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(16);
  // ids of the exact decomposition and their weights
  x(3) = 0.45;
  x(15) = 0.25;
  x(5) = 0.15;
  x(12) = 0.10;
  x(9) = 0.05;
  const Eigen::VectorXd g = implicit_grad(p, d, x);
  // With zero residual the gradient vanishes entirely.
  CHECK(g.cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("implicit_lipschitz equals lambda_max of the explicit A^T A") {
  const auto d = ColumnSupportDictionary::build(load_example("p2"));
  const Eigen::MatrixXd a = oracle::explicit_dictionary(d);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a.transpose() * a);
  CHECK(implicit_lipschitz(d) == doctest::Approx(eig.eigenvalues().maxCoeff()).epsilon(1e-9));
}

TEST_CASE("pg on a single atom converges to the vertex") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
  atom_apply(Atom{{0, 1, 2, 3}}, 1.0, m);
  m.col(0) << 0.5, 0.0, 0.0, 0.5;  // widen column 0 so N > 1 ...
  m.col(0) << 1.0, 0.0, 0.0, 0.0;  // ... then restore: P stays a single atom
  const auto p = StochasticMatrix::validate(m);
  PgConfig cfg;
  cfg.max_steps = 10000;
  const auto r = pg_run(p, cfg);
  CHECK(r.solution.size() == 1);
  CHECK(r.trace.iterations.empty() == (r.trace.initial_residual <= 1e-8));
  CHECK(r.solution.weights()[0] == doctest::Approx(1.0));
}

TEST_CASE("pg converges to a vertex minimizer within 1e4 steps") {
  // P is a single atom of a wider pattern: the unique minimizer is a vertex.
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
  atom_apply(Atom{{0, 1, 2}}, 1.0, m);
  const auto p = StochasticMatrix::validate(m);
  PgConfig cfg;
  cfg.max_steps = 10000;
  cfg.stop.tol_res = 1e-6;
  // Start from a random point over a dictionary including other rows.
  const auto r = pg_run(p, cfg, InitSpec::uniform());
  CHECK(r.trace.iterations.empty());
  CHECK(r.solution.weights()[0] == 1.0);
}

TEST_CASE("pg on P1") {
  const auto p = load_example("p1");
  PgConfig cfg;
  const auto r = pg_run(p, cfg);
  CHECK(r.all_iterates_feasible);
  for (std::size_t t = 1; t < r.objective.size(); ++t) {
    CHECK(r.objective[t] <= r.objective[t - 1] + 1e-10);
  }
  CHECK(r.trace.iterations.back().residual_norm_after <= 1e-6);
  CHECK(r.solution.size() > 5);
  CHECK(r.solution.is_feasible());

  // KKT of the full problem at the final dense iterate: active atoms plus a
  // sample of inactive ones.
  const auto d = ColumnSupportDictionary::build(p);
  const Eigen::VectorXd neg_grad = -implicit_grad(p, d, r.dense);
  const double mu = r.dense.dot(neg_grad);
  for (Eigen::Index j = 0; j < r.dense.size(); ++j) {
    if (r.dense(j) > kWeightTol) {
      CHECK(std::abs(neg_grad(j) - mu) <= 1e-6);
    } else {
      CHECK(neg_grad(j) - mu <= 1e-6);
    }
  }
}

TEST_CASE("pg zero init starts from uniform with a warning") {
  const auto p = load_example("p1");
  const auto r = pg_run(p, PgConfig{}, InitSpec::zero());
  CHECK(r.trace.warnings.size() == 1);
  const auto u = pg_run(p, PgConfig{}, InitSpec::uniform());
  CHECK(r.dense == u.dense);
}

TEST_CASE("pg random init stays feasible") {
  const auto p = load_example("p2");
  const auto r = pg_run(p, PgConfig{}, InitSpec::random_sparse(3, 5));
  CHECK(r.all_iterates_feasible);
  CHECK(r.trace.iterations.back().residual_norm_after <= 1e-6);
}

TEST_CASE("pg errors") {
  const auto p = load_example("p6");
  PgConfig cfg;
  cfg.n_cap = 1000;
  CHECK(code_of([&] { pg_run(p, cfg); }) == ErrorCode::kDictionaryTooLarge);
  const auto d = ColumnSupportDictionary::build(p);
  CHECK(code_of([&] { implicit_grad(p, d, Eigen::VectorXd::Zero(25920), 1000); }) ==
        ErrorCode::kDictionaryTooLarge);
  PgConfig bad;
  bad.step_size = -1.0;
  CHECK(code_of([&] { pg_run(load_example("p1"), bad); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("gradient results do not depend on the worker count") {
  const auto p = load_example("p6");
  const auto d = ColumnSupportDictionary::build(p);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(25920, 1.0 / 25920);
  setenv("SPARSEPBN_NUM_THREADS", "1", 1);
  const Eigen::VectorXd one = implicit_grad(p, d, x);
  setenv("SPARSEPBN_NUM_THREADS", "4", 1);
  const Eigen::VectorXd four = implicit_grad(p, d, x);
  unsetenv("SPARSEPBN_NUM_THREADS");
  CHECK(one == four);
}
