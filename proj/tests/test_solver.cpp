#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lapreg/error.hpp"
#include "lapreg/solver.hpp"
#include "lapreg/rng.hpp"
#include "oracles.hpp"

using namespace lapreg;

namespace {

PointCloud line_cloud() {
  PointCloud c;
  c.points = {{0.0, 0.0, 0.0}, {0.1, 0.0, 0.0}, {0.2, 0.0, 0.0}};
  return c;
}

std::vector<double> labels_for(const PointCloud& c, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> y(c.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = std::sin(3.0 * c.points[i][0]) + std::cos(2.0 * c.points[i][1]) + 0.4 * (rng.uniform() - 0.5);
  return y;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("residual and objective on the two-vertex graph") {
  PointCloud c;
  c.points = {{0.2, 0.2, 0.0}, {0.25, 0.2, 0.0}};
  const auto g = build_graph(c, 0.1);
  const double w = g.weight(g.row_begin(0));
  const std::vector<double> u{0.9, -0.2}, y{0.5, 0.1};
  const double beta = 0.3;
  const auto r = residual(g, u, y, beta, LossModel::quadratic());
  CHECK(r[0] == doctest::Approx(beta * w * 1.1 + 0.4).epsilon(1e-13));
  CHECK(r[1] == doctest::Approx(-beta * w * 1.1 - 0.3).epsilon(1e-13));

  // b R + (1/n) sum F with R = (1/2)(2 w 1.1^2)
  const double obj = objective_eval(g, u, y, beta, LossModel::quadratic());
  CHECK(obj == doctest::Approx(beta * w * 1.21 + 0.5 * (0.5 * 0.16 + 0.5 * 0.09)).epsilon(1e-13));

  const auto r0 = residual(g, u, y, 0.0, LossModel::quartic());
  CHECK(r0[0] == doctest::Approx(std::pow(0.4, 3)));
  CHECK(r0[1] == doctest::Approx(std::pow(-0.3, 3)));

  const std::vector<double> flat{2.0, 2.0};
  for (double v : residual(g, flat, flat, 5.0, LossModel::quartic())) CHECK(v == 0.0);
  CHECK(objective_eval(g, flat, flat, 5.0, LossModel::quartic()) == 0.0);
  CHECK(objective_eval(g, u, u, 0.0, LossModel::quadratic()) == 0.0);
  CHECK_THROWS_AS(residual(g, u, std::vector<double>{1.0}, beta, LossModel::quadratic()), Error);
}

TEST_CASE("three-point system against elimination") {
  const auto c = line_cloud();
  const auto g = build_graph(c, 0.15);
  const double w = g.weight(g.row_begin(0));
  const double beta = 0.1;
  const std::vector<double> y{1.0, 0.0, 0.0};
  const auto x = oracle::eliminate({{1 + beta * w, -beta * w, 0.0},
                                    {-beta * w, 1 + 2 * beta * w, -beta * w},
                                    {0.0, -beta * w, 1 + beta * w}},
                                   y);
  const auto rep = solve_quadratic(g, y, beta);
  CHECK(rep.converged);
  CHECK(rep.newton_iters == 1);
  CHECK(max_diff(rep.u, x) <= 1e-10);
  CHECK(max_diff(dense_spectral_solve(g, y, beta), x) <= 1e-12);
}

TEST_CASE("degenerate inputs") {
  const auto c = sample_cloud(Manifold::UnitSquare, 60, 2);
  const auto g = build_graph(c, 0.3);
  const std::vector<double> cst(60, 0.75);
  const auto q = solve_quadratic(g, cst, 0.2);
  for (double v : q.u) CHECK(v == doctest::Approx(0.75).epsilon(1e-14));
  for (double v : dense_spectral_solve(g, cst, 0.2)) CHECK(v == doctest::Approx(0.75).epsilon(1e-12));

  const auto quart = solve_semilinear(g, cst, 0.2, LossModel::quartic());
  CHECK(quart.newton_iters <= 1);
  for (double v : quart.u) CHECK(v == 0.75);

  const auto y = labels_for(c, 1);
  CHECK(solve_quadratic(g, y, 0.0).u == y);
  CHECK(solve_semilinear(g, y, 0.0, LossModel::quartic()).u == y);
  CHECK_THROWS_AS(solve_semilinear(g, y, -1.0, LossModel::quadratic()), Error);
  CHECK_THROWS_AS(solve_semilinear(g, std::vector<double>(59), 1.0, LossModel::quadratic()), Error);

  SolverConfig bad;
  bad.newton_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("quadratic paths agree") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto c = sample_cloud(s % 2 ? Manifold::FlatTorus : Manifold::UnitSquare, 128, s);
    const auto g = build_graph(c, 0.2);
    const auto y = labels_for(c, s);
    const auto a = solve_quadratic(g, y, 0.05);
    const auto b = solve_semilinear(g, y, 0.05, LossModel::quadratic());
    const auto sp = dense_spectral_solve(g, y, 0.05);
    CHECK(max_diff(a.u, b.u) <= 1e-9);
    CHECK(max_diff(a.u, sp) <= 1e-8);

    Eigen::MatrixXd A = 0.05 * oracle::dense_bump_laplacian(c, 0.2);
    A.diagonal().array() += 1.0;
    const Eigen::VectorXd ref = A.llt().solve(Eigen::Map<const Eigen::VectorXd>(y.data(), 128));
    CHECK(max_diff(a.u, std::vector<double>(ref.data(), ref.data() + 128)) <= 1e-8);
  }
  const auto big = sample_cloud(Manifold::UnitSquare, kDenseLimit + 1, 1);
  CHECK_THROWS_AS(dense_spectral_solve(build_graph(big, 0.1), labels_for(big, 1), 0.1), Error);
}

TEST_CASE("semilinear solves against a dense Newton minimizer") {
  for (std::uint64_t s = 0; s < 6; ++s) {
    const auto c = sample_cloud(Manifold::UnitSquare, 150, 40 + s);
    const auto g = build_graph(c, 0.25);
    const auto y = labels_for(c, s);
    const Eigen::MatrixXd L = oracle::dense_bump_laplacian(c, 0.25);
    const Eigen::VectorXd ey = Eigen::Map<const Eigen::VectorXd>(y.data(), 150);
    for (const auto& loss : {LossModel::quartic(), LossModel::quad_quartic(0.3, 1.5)}) {
      const double beta = 0.02 * static_cast<double>(s + 1);
      const auto rep = solve_semilinear(g, y, beta, loss);
      REQUIRE(rep.converged);
      const Eigen::VectorXd ref = oracle::dense_minimizer(
          L, ey, beta, [&](double t) { return loss.F(t); }, [&](double t) { return loss.f(t); },
          [&](double t) { return loss.fprime(t); });
      CHECK(max_diff(rep.u, std::vector<double>(ref.data(), ref.data() + 150)) <= 1e-8);
    }
  }
}

TEST_CASE("solutions obey the maximum principle and first-order conditions") {
  for (std::uint64_t s = 0; s < 12; ++s) {
    const auto c = sample_cloud(s % 3 == 0 ? Manifold::Sphere : Manifold::FlatTorus, 300, s);
    const auto g = build_graph(c, 0.3);
    const auto y = labels_for(c, s);
    const LossModel loss = s % 2 ? LossModel::quartic() : LossModel::quad_quartic(1.0, 3.0);
    const double beta = 0.1 + 0.05 * static_cast<double>(s);
    const auto rep = solve_semilinear(g, y, beta, loss);
    REQUIRE(rep.converged);
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    for (double v : rep.u) {
      CHECK(v >= *lo - 1e-9);
      CHECK(v <= *hi + 1e-9);
    }
    for (std::size_t k = 1; k < rep.objective_history.size(); ++k)
      CHECK(rep.objective_history[k] <= rep.objective_history[k - 1]);
    CHECK(rep.objective_history.back() ==
          doctest::Approx(objective_eval(g, rep.u, y, variational_beta(beta), loss)).epsilon(1e-9));

    for (double v : objective_gradient(g, rep.u, y, variational_beta(beta), loss)) CHECK(std::abs(v) <= 1e-8);

    // z = u - max y satisfies the hypothesis with g = f and h = max y - y.
    std::vector<double> z(rep.u.size()), h(rep.u.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] = rep.u[i] - *hi;
      h[i] = *hi - y[i];
    }
    const auto lhs = max_principle_lhs(g, z, h, beta, [&](double t) { return loss.f(t); });
    const auto mp = max_principle_check(z, lhs, 1e-9);
    CHECK(mp.hypothesis);
    CHECK(mp.conclusion);
  }
}

TEST_CASE("max_principle_check") {
  const auto c = sample_cloud(Manifold::UnitSquare, 40, 9);
  const auto g = build_graph(c, 0.4);
  const std::vector<double> zero(40, 0.0), minus(40, -1.0);
  const auto id = [](double t) { return t; };
  CHECK(max_principle_check(zero, max_principle_lhs(g, zero, zero, 1.0, id)).consistent());
  const auto m = max_principle_check(minus, max_principle_lhs(g, minus, zero, 0.7, id));
  CHECK(m.hypothesis);
  CHECK(m.conclusion);

  Rng rng(77);
  int positive_rejected = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> z(40), h(40);
    for (std::size_t i = 0; i < 40; ++i) {
      z[i] = rng.uniform() - 0.9;
      h[i] = 2.0 * rng.uniform() - 1.0;
    }
    const double beta = rng.uniform();
    const auto cube = [](double t) { return t * t * t + t; };
    const auto chk = max_principle_check(z, max_principle_lhs(g, z, h, beta, cube));
    CHECK(chk.consistent());
    if (!chk.conclusion && !chk.hypothesis) ++positive_rejected;
  }
  CHECK(positive_rejected > 0);
}

TEST_CASE("objective gradient against finite differences") {
  Rng rng(5);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto c = sample_cloud(Manifold::UnitSquare, 80, s);
    const auto g = build_graph(c, 0.3);
    const auto y = labels_for(c, s);
    std::vector<double> u(80), d(80);
    for (std::size_t i = 0; i < 80; ++i) {
      u[i] = y[i] + rng.uniform() - 0.5;
      d[i] = rng.uniform() - 0.5;
    }
    for (const auto& loss : {LossModel::quadratic(), LossModel::quartic(), LossModel::quad_quartic(0.5, 1.0)}) {
      const double b = 0.01 + 0.1 * rng.uniform();
      const auto grad = objective_gradient(g, u, y, b, loss);
      double analytic = 0.0;
      for (std::size_t i = 0; i < 80; ++i) analytic += grad[i] * d[i];
      const double h = 1e-6;
      std::vector<double> up(u), um(u);
      for (std::size_t i = 0; i < 80; ++i) {
        up[i] += h * d[i];
        um[i] -= h * d[i];
      }
      const double fd = (objective_eval(g, up, y, b, loss) - objective_eval(g, um, y, b, loss)) / (2 * h);
      CHECK(std::abs(fd - analytic) <= 1e-5 * std::abs(analytic));
    }
  }
}

TEST_CASE("CG budget exhaustion is reported") {
  const auto c = sample_cloud(Manifold::UnitSquare, 200, 3);
  const auto g = build_graph(c, 0.3);
  const auto y = labels_for(c, 3);
  SolverConfig cfg;
  cfg.cg_max_iter = 1;
  cfg.newton_max_iter = 2;
  const auto rep = solve_quadratic(g, y, 1.0, cfg);
  CHECK_FALSE(rep.converged);
  CHECK(rep.status == SolveStatus::CgStall);
  CHECK(rep.u.size() == 200);
}

TEST_CASE("beta conversions") {
  CHECK(variational_beta(0.4) == 0.1);
  CHECK(pde_beta(variational_beta(0.37)) == doctest::Approx(0.37));
}
