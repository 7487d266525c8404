#include <doctest.h>

#include <cmath>
#include <vector>

#include "lapreg/error.hpp"
#include "lapreg/geograph.hpp"
#include "lapreg/rng.hpp"
#include "oracles.hpp"

using namespace lapreg;

namespace {

PointCloud line_cloud() {
  PointCloud c;
  c.manifold = Manifold::UnitSquare;
  c.points = {{0.0, 0.0, 0.0}, {0.1, 0.0, 0.0}, {0.2, 0.0, 0.0}};
  return c;
}

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = 2.0 * rng.uniform() - 1.0;
  return v;
}

double inner(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST_CASE("tau and normalization against 2-D quadrature") {
  const Kernel bump{KernelKind::TriangularBump, 2};
  const Kernel ind{KernelKind::Indicator, 2};
  CHECK(bump.tau() == doctest::Approx(0.15).epsilon(1e-14));
  CHECK(ind.tau() == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(Kernel{KernelKind::Indicator, 1}.tau() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  for (const auto& k : {bump, ind}) {
    const double mass = oracle::disc_integral([&](double a, double b) { return k(std::hypot(a, b)); });
    const double second = oracle::disc_integral([&](double a, double b) { return a * a * k(std::hypot(a, b)); });
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(second == doctest::Approx(k.tau()).epsilon(1e-10));
  }
}

TEST_CASE("two far points have no edges") {
  PointCloud c;
  c.points = {{0.1, 0.1, 0.0}, {0.6, 0.1, 0.0}};
  const auto g = build_graph(c, 0.4);
  CHECK(g.edge_count() == 0);
  CHECK(degrees(g) == std::vector<double>{0.0, 0.0});
}

TEST_CASE("three-point hand graph") {
  const auto c = line_cloud();
  const double eps = 0.15;
  const auto g = build_graph(c, eps);
  REQUIRE(g.edge_count() == 4);
  CHECK(g.neighbors(0).size() == 1);
  CHECK(g.neighbors(1).size() == 2);
  CHECK(g.neighbors(0)[0] == 1);

  const double c2 = 3.0 / oracle::pi;
  const double eta_raw = c2 * (1.0 - 0.1 / eps) / (3.0 * eps * eps);
  const double w = 2.0 / (0.15 * std::pow(eps, 4) * 3.0) * c2 * (1.0 - 0.1 / eps);
  CHECK(g.weight(g.row_begin(0)) == doctest::Approx(w).epsilon(1e-13));
  CHECK(g.weight_scale() * g.eta_row(0)[0] == doctest::Approx(w).epsilon(1e-13));

  const auto deg = degrees(g);
  CHECK(deg[0] == doctest::Approx(eta_raw).epsilon(1e-13));
  CHECK(deg[1] == doctest::Approx(2.0 * eta_raw).epsilon(1e-13));
  CHECK(deg[2] == doctest::Approx(eta_raw).epsilon(1e-13));

  const auto lu = laplacian_apply(g, std::vector<double>{1.0, 0.0, 0.0});
  CHECK(lu[0] == doctest::Approx(w).epsilon(1e-13));
  CHECK(lu[1] == doctest::Approx(-w).epsilon(1e-13));
  CHECK(lu[2] == 0.0);
}

TEST_CASE("bucketed build equals all-pairs bit-exactly") {
  for (auto m : {Manifold::UnitSquare, Manifold::FlatTorus, Manifold::Sphere})
    for (double eps : {0.05, 0.2, 0.45, 0.9, 3.0}) {
      const auto c = sample_cloud(m, 300, 17);
      for (const auto kind : {KernelKind::TriangularBump, KernelKind::Indicator}) {
        const auto a = build_graph(c, eps, {kind, 2});
        const auto b = build_graph_all_pairs(c, eps, {kind, 2});
        REQUIRE(a.edge_count() == b.edge_count());
        for (std::size_t i = 0; i < c.size(); ++i) {
          const auto na = a.neighbors(i), nb = b.neighbors(i);
          CHECK(std::vector<std::uint32_t>(na.begin(), na.end()) == std::vector<std::uint32_t>(nb.begin(), nb.end()));
          const auto ea = a.eta_row(i), eb = b.eta_row(i);
          CHECK(std::vector<double>(ea.begin(), ea.end()) == std::vector<double>(eb.begin(), eb.end()));
        }
        CHECK(a.degrees() == b.degrees());
      }
    }
}

TEST_CASE("graph matches a brute-force dense Laplacian") {
  const auto c = sample_cloud(Manifold::FlatTorus, 120, 4);
  const auto g = build_graph(c, 0.25);
  const Eigen::MatrixXd L = oracle::dense_bump_laplacian(c, 0.25);
  const Eigen::MatrixXd D = dense_laplacian(g);
  CHECK((L - D).cwiseAbs().maxCoeff() <= 1e-9 * L.cwiseAbs().maxCoeff());
  const auto u = random_vector(120, 8);
  const auto lu = laplacian_apply(g, u);
  const Eigen::VectorXd ref = L * Eigen::Map<const Eigen::VectorXd>(u.data(), 120);
  for (int i = 0; i < 120; ++i) CHECK(std::abs(lu[i] - ref[i]) <= 1e-9 * ref.cwiseAbs().maxCoeff());
}

TEST_CASE("Laplacian invariants") {
  const auto c = sample_cloud(Manifold::UnitSquare, 50, 3);
  const auto g = build_graph(c, 0.3);
  const std::size_t n = c.size();

  const auto ones = laplacian_apply(g, std::vector<double>(n, 3.25));
  for (double v : ones) CHECK(v == 0.0);

  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto u = random_vector(n, s);
    const auto v = random_vector(n, s + 100);
    const auto lu = laplacian_apply(g, u);
    const auto lv = laplacian_apply(g, v);
    const double uLu = inner(u, lu);
    CHECK(uLu >= 0.0);
    CHECK(inner(v, lu) == doctest::Approx(inner(u, lv)).epsilon(1e-12));

    double half_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t e = g.row_begin(i); e < g.row_end(i); ++e) {
        const double d = u[i] - u[g.column(e)];
        half_sum += 0.5 * g.weight(e) * d * d;
      }
    CHECK(uLu == doctest::Approx(half_sum).epsilon(1e-12));
    CHECK(uLu == doctest::Approx(0.5 * static_cast<double>(n) * dirichlet_energy(g, u)).epsilon(1e-12));
  }
  CHECK(dirichlet_energy(g, std::vector<double>(n, -1.0)) == 0.0);
  CHECK_THROWS_AS(laplacian_apply(g, std::vector<double>(n + 1)), Error);
  CHECK_THROWS_AS(dirichlet_energy(g, std::vector<double>(n - 1)), Error);
}

TEST_CASE("two-vertex energy and random walk") {
  PointCloud c;
  c.points = {{0.2, 0.2, 0.0}, {0.25, 0.2, 0.0}};
  const auto g = build_graph(c, 0.1);
  REQUIRE(g.edge_count() == 2);
  const double w = g.weight(g.row_begin(0));
  CHECK(w == g.weight(g.row_begin(1)));
  const std::vector<double> u{1.0, 0.0};
  CHECK(dirichlet_energy(g, u) == doctest::Approx(w).epsilon(1e-14));
  const auto lu = laplacian_apply(g, u);
  CHECK(lu[0] == doctest::Approx(w));
  CHECK(lu[1] == doctest::Approx(-w));
  const auto rw = random_walk_laplacian_apply(g, std::vector<double>{0.7, -0.4});
  CHECK(rw[0] == doctest::Approx(1.1).epsilon(1e-14));
  CHECK(rw[1] == doctest::Approx(-1.1).epsilon(1e-14));
}

TEST_CASE("random walk Laplacian rows sum to one") {
  auto c = sample_cloud(Manifold::UnitSquare, 80, 6);
  c.points.push_back({5.0, 5.0, 0.0});  // isolated
  const auto g = build_graph(c, 0.2);
  const std::size_t n = c.size();
  for (double v : random_walk_laplacian_apply(g, std::vector<double>(n, 2.0))) CHECK(v == doctest::Approx(0.0));
  // With u = e_i, row i of I - W~ gives (Lrw e_i)_i = 1 for a non-isolated vertex.
  const auto d = g.weighted_degrees();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> e(n, 0.0);
    e[i] = 1.0;
    const double diag = random_walk_laplacian_apply(g, e)[i];
    CHECK(diag == doctest::Approx(d[i] > 0.0 ? 1.0 : 0.0));
  }
  CHECK(random_walk_laplacian_apply(g, random_vector(n, 1))[n - 1] == 0.0);
}

TEST_CASE("degrees are bounded in the dense limit") {
  int good = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto c = sample_cloud(Manifold::FlatTorus, 5000, s);
    const auto g = build_graph(c, 0.1);
    const auto deg = degrees(g);
    const auto [lo, hi] = std::minmax_element(deg.begin(), deg.end());
    if (*lo > 0.2 && *hi < 5.0) ++good;
  }
  CHECK(good >= 19);
}

TEST_CASE("dense guard and invalid eps") {
  const auto c = sample_cloud(Manifold::UnitSquare, kDenseLimit + 1, 1);
  CHECK_THROWS_AS(dense_laplacian(build_graph(c, 0.05)), Error);
  CHECK_THROWS_AS(build_graph(c, 0.0), Error);
  CHECK(parse_kernel("bump") == KernelKind::TriangularBump);
  CHECK(parse_kernel("indicator") == KernelKind::Indicator);
  CHECK_FALSE(Kernel{KernelKind::Indicator, 2}.lipschitz());
}
