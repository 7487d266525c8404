#include "lapreg/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "lapreg/error.hpp"
#include "lapreg/newton.hpp"
#include "lapreg/quadrature.hpp"
#include "lapreg/spatial_grid.hpp"

namespace lapreg {

namespace {

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

double boundary_distance(Manifold m, const Point& x) {
  if (m != Manifold::UnitSquare) return std::numeric_limits<double>::infinity();
  return std::min({x[0], 1.0 - x[0], x[1], 1.0 - x[1]});
}

ConsistencyReport finish_report(const PointCloud& cloud, double eps, KernelKind kind,
                                const Trend& trend, const std::vector<double>& lh) {
  ConsistencyReport rep;
  rep.n = cloud.size();
  rep.eps = eps;
  rep.kernel = kind;
  rep.seed = cloud.seed;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& x = cloud.points[i];
    const double err = std::abs(lh[i] - trend_laplacian(trend, cloud.manifold, x));
    rep.sup_error = std::max(rep.sup_error, err);
    if (boundary_distance(cloud.manifold, x) > 2.0 * eps)
      rep.interior_sup_error = std::max(rep.interior_sup_error, err);
  }
  return rep;
}

// Lattice problem for the continuum Newton solve.
struct GridProblem {
  std::size_t n;  // per axis
  double inv_h2;
  double beta;
  const ExpectedLoss& ed;
  const std::vector<double>& mu;

  std::size_t size() const { return n * n; }
  void apply(std::span<const double> x, std::span<double> out) const {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t jm = (j + n - 1) % n, jp = (j + 1) % n;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t im = (i + n - 1) % n, ip = (i + 1) % n;
        const double c = x[j * n + i];
        const double s = x[j * n + im] + x[j * n + ip] + x[jm * n + i] + x[jp * n + i];
        out[j * n + i] = beta * (4.0 * c - s) * inv_h2;
      }
    }
  }
  std::vector<double> diag() const { return std::vector<double>(size(), 4.0 * beta * inv_h2); }
  double grad(std::size_t i, double v) const { return ed.f(v - mu[i]); }
  double hess(std::size_t i, double v) const { return ed.fprime(v - mu[i]); }
  double value(std::size_t i, double v) const { return ed.F(v - mu[i]); }
  double increment(std::size_t i, double v, double h) const { return ed.F_increment(v - mu[i], h); }
};

}  // namespace

double nonlocal_laplacian(const ScalarField& h, Manifold manifold, const Point& x, double eps,
                          const Kernel& kernel, int quad_order) {
  require(manifold == Manifold::FlatTorus, ErrorKind::UnsupportedManifold,
          "nonlocal Laplacian oracle is implemented on the flat torus only");
  require(quad_order >= 16, ErrorKind::InvalidArgument, "quad_order must be >= 16");
  require(eps > 0.0 && eps < 0.5, ErrorKind::InvalidArgument, "eps must lie in (0, 0.5)");
  require(kernel.dim == 2, ErrorKind::InvalidArgument, "torus kernel must have m = 2");
  const auto radial = gauss_legendre(quad_order, 0.0, eps);
  const auto angular = gauss_legendre(quad_order, 0.0, 2.0 * std::numbers::pi);
  const double hx = h(x);
  double integral = 0.0;
  for (std::size_t a = 0; a < radial.nodes.size(); ++a) {
    const double r = radial.nodes[a];
    double ring = 0.0;
    for (std::size_t b = 0; b < angular.nodes.size(); ++b) {
      Point y{x[0] + r * std::cos(angular.nodes[b]), x[1] + r * std::sin(angular.nodes[b]), 0.0};
      y[0] -= std::floor(y[0]);
      y[1] -= std::floor(y[1]);
      ring += angular.weights[b] * (hx - h(y));
    }
    integral += radial.weights[a] * r * kernel(r / eps) * ring;
  }
  return 2.0 / (kernel.tau() * std::pow(eps, 4)) * integral;
}

double nonlocal_laplacian(const Trend& trend, Manifold manifold, const Point& x, double eps,
                          const Kernel& kernel, int quad_order) {
  return nonlocal_laplacian([&](const Point& p) { return trend_eval(trend, p); }, manifold, x, eps,
                            kernel, quad_order);
}

ConsistencyReport pointwise_consistency(const PointCloud& cloud, const GeometricGraph& graph,
                                        const Trend& trend) {
  require(graph.size() == cloud.size(), ErrorKind::DimensionMismatch, "graph and cloud sizes differ");
  std::vector<double> h(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) h[i] = trend_eval(trend, cloud.points[i]);
  return finish_report(cloud, graph.eps(), graph.kernel().kind, trend, laplacian_apply(graph, h));
}

ConsistencyReport pointwise_consistency(const PointCloud& cloud, double eps, const Kernel& kernel,
                                        const Trend& trend) {
  require(eps > 0.0 && std::isfinite(eps), ErrorKind::InvalidArgument, "eps must be positive");
  const std::size_t n = cloud.size();
  const auto& pts = cloud.points;
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = trend_eval(trend, pts[i]);
  const double scale = 2.0 / (kernel.tau() * eps * eps) * kernel.normalization() /
                       (static_cast<double>(n) * std::pow(eps, kernel.dim));
  const double eps2 = eps * eps;
  const detail::SpatialGrid grid(cloud.manifold, pts, eps);
  std::vector<double> lh(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    grid.for_each_in_block(pts[i], [&](std::uint32_t j) {
      if (j == i) return;
      const double d2 = squared_distance(cloud.manifold, pts[i], pts[j]);
      if (d2 >= eps2) return;
      acc += scale * kernel.profile(std::sqrt(d2) / eps) * (h[i] - h[j]);
    });
    lh[i] = acc;
  }
  return finish_report(cloud, eps, kernel.kind, trend, lh);
}

ContinuumSolution continuum_solve(const Trend& trend, const NoiseModel& noise,
                                  const LossModel& loss, double beta, std::size_t grid_n,
                                  const SolverConfig& cfg) {
  require(is_power_of_two(grid_n) && grid_n >= 64, ErrorKind::InvalidArgument,
          "grid_n must be a power of two >= 64");
  require(beta > 0.0 && std::isfinite(beta), ErrorKind::InvalidArgument, "beta must be positive");
  cfg.validate();
  const ExpectedLoss ed(loss, noise);
  ContinuumSolution sol;
  sol.grid_n = grid_n;
  sol.h_grid = 1.0 / static_cast<double>(grid_n);
  sol.beta = beta;
  sol.loss = loss;
  sol.noise = noise;
  const std::size_t total = grid_n * grid_n;
  sol.mu.resize(total);
  std::vector<double> v0(total);
  for (std::size_t k = 0; k < total; ++k) {
    sol.mu[k] = trend_eval(trend, sol.node(k));
    v0[k] = modified_trend(ed, sol.mu[k]);
  }

  NewtonSettings s;
  s.tol = cfg.newton_tol;
  s.max_iter = cfg.newton_max_iter;
  s.cg_tol = cfg.cg_tol;
  s.cg_max_iter = cfg.cg_max_iter;
  s.damping = cfg.damping;
  s.min_step = cfg.min_step;
  s.jacobian_floor = cfg.jacobian_floor;
  s.objective_scale = sol.h_grid * sol.h_grid;
  const GridProblem prob{grid_n, 1.0 / (sol.h_grid * sol.h_grid), beta, ed, sol.mu};
  auto trace = detail::damped_newton(prob, std::move(v0), s);
  sol.v = std::move(trace.u);
  sol.newton_iters = trace.iterations;
  sol.residual = trace.residual_history.back();
  sol.objective_history = std::move(trace.objective_history);
  sol.status = trace.status;
  return sol;
}

double continuum_residual(const ContinuumSolution& sol) {
  const ExpectedLoss ed(sol.loss, sol.noise);
  const GridProblem prob{sol.grid_n, 1.0 / (sol.h_grid * sol.h_grid), sol.beta, ed, sol.mu};
  std::vector<double> lv(sol.v.size());
  prob.apply(sol.v, lv);
  double r = 0.0;
  for (std::size_t k = 0; k < lv.size(); ++k) r = std::max(r, std::abs(lv[k] + ed.f(sol.v[k] - sol.mu[k])));
  return r;
}

BiasCheck bias_check(const ContinuumSolution& sol, const Trend& trend, const LossModel& loss,
                     const NoiseModel& noise) {
  const ExpectedLoss ed(loss, noise);
  BiasCheck out;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t k = 0; k < sol.v.size(); ++k) {
    const Point x = sol.node(k);
    const double mu = trend_eval(trend, x);
    out.sup_dev = std::max(out.sup_dev, std::abs(sol.v[k] - modified_trend(ed, mu)));
    out.sup_laplacian =
        std::max(out.sup_laplacian, std::abs(trend_laplacian(trend, Manifold::FlatTorus, x)));
    lo = std::min(lo, sol.v[k] - mu);
    hi = std::max(hi, sol.v[k] - mu);
  }
  const double bound_b = noise.support_bound();
  out.c1 = ed.min_fprime(lo - bound_b, hi + bound_b);
  out.bound = sol.beta * out.sup_laplacian / out.c1;
  return out;
}

}  // namespace lapreg
