#include "lapreg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "lapreg/error.hpp"

namespace lapreg {

namespace {

void check_inputs(const GeometricGraph& graph, std::span<const double> u, std::span<const double> y) {
  require(u.size() == graph.size() && y.size() == graph.size(), ErrorKind::DimensionMismatch,
          "expected vectors of length " + std::to_string(graph.size()) + ", got " +
              std::to_string(u.size()) + " and " + std::to_string(y.size()));
}

void check_beta(double beta) {
  require(beta >= 0.0 && std::isfinite(beta), ErrorKind::InvalidArgument, "beta must be >= 0");
}

struct GraphProblem {
  const GeometricGraph& graph;
  std::span<const double> y;
  double beta;
  const LossModel& loss;

  std::size_t size() const { return graph.size(); }
  void apply(std::span<const double> x, std::span<double> out) const {
    laplacian_apply(graph, x, out);
    for (auto& v : out) v *= beta;
  }
  std::vector<double> diag() const {
    auto d = graph.weighted_degrees();
    for (auto& v : d) v *= beta;
    return d;
  }
  double grad(std::size_t i, double ui) const { return loss.f(ui - y[i]); }
  double hess(std::size_t i, double ui) const { return loss.fprime(ui - y[i]); }
  double value(std::size_t i, double ui) const { return loss.F(ui - y[i]); }
  double increment(std::size_t i, double ui, double h) const {
    return loss.F_increment(ui - y[i], h);
  }
};

SolveReport run(const GeometricGraph& graph, std::span<const double> y, double beta,
                const LossModel& loss, const SolverConfig& cfg) {
  cfg.validate();
  loss.validate();
  check_beta(beta);
  check_inputs(graph, y, y);
  SolveReport rep;
  if (beta == 0.0) {
    rep.u.assign(y.begin(), y.end());
    rep.residual_history = {0.0};
    rep.objective_history = {0.0};
    rep.converged = true;
    rep.status = SolveStatus::Converged;
    return rep;
  }
  NewtonSettings s;
  s.tol = cfg.newton_tol;
  s.max_iter = cfg.newton_max_iter;
  s.cg_tol = cfg.cg_tol;
  s.cg_max_iter = cfg.cg_max_iter;
  s.damping = cfg.damping;
  s.min_step = cfg.min_step;
  s.jacobian_floor = cfg.jacobian_floor;
  s.objective_scale = 1.0 / static_cast<double>(graph.size());
  auto trace = detail::damped_newton(GraphProblem{graph, y, beta, loss},
                                     std::vector<double>(y.begin(), y.end()), s);
  rep.u = std::move(trace.u);
  rep.newton_iters = trace.iterations;
  rep.cg_iters_total = trace.cg_iterations;
  rep.residual_history = std::move(trace.residual_history);
  rep.objective_history = std::move(trace.objective_history);
  rep.status = trace.status;
  rep.converged = trace.status == SolveStatus::Converged;
  return rep;
}

}  // namespace

void SolverConfig::validate() const {
  require(newton_tol > 0.0 && cg_tol > 0.0 && jacobian_floor > 0.0, ErrorKind::ValidationError,
          "solver tolerances must be positive");
  require(newton_max_iter >= 1, ErrorKind::ValidationError, "newton_max_iter must be >= 1");
  require(damping > 0.0 && damping < 1.0, ErrorKind::ValidationError, "damping must lie in (0, 1)");
  require(min_step > 0.0 && min_step <= 1.0, ErrorKind::ValidationError,
          "min_step must lie in (0, 1]");
}

std::vector<double> residual(const GeometricGraph& graph, std::span<const double> u,
                             std::span<const double> y, double beta, const LossModel& loss) {
  check_inputs(graph, u, y);
  auto r = laplacian_apply(graph, u);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = beta * r[i] + loss.f(u[i] - y[i]);
  return r;
}

double objective_eval(const GeometricGraph& graph, std::span<const double> u,
                      std::span<const double> y, double beta, const LossModel& loss) {
  check_inputs(graph, u, y);
  double fit = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) fit += loss.F(u[i] - y[i]);
  return beta * dirichlet_energy(graph, u) + fit / static_cast<double>(graph.size());
}

std::vector<double> objective_gradient(const GeometricGraph& graph, std::span<const double> u,
                                       std::span<const double> y, double beta,
                                       const LossModel& loss) {
  check_inputs(graph, u, y);
  const double n = static_cast<double>(graph.size());
  auto g = laplacian_apply(graph, u);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = (4.0 * beta * g[i] + loss.f(u[i] - y[i])) / n;
  return g;
}

SolveReport solve_quadratic(const GeometricGraph& graph, std::span<const double> y, double beta,
                            const SolverConfig& cfg) {
  return run(graph, y, beta, LossModel::quadratic(), cfg);
}

SolveReport solve_semilinear(const GeometricGraph& graph, std::span<const double> y, double beta,
                             const LossModel& loss, const SolverConfig& cfg) {
  return run(graph, y, beta, loss, cfg);
}

std::vector<double> dense_spectral_solve(const GeometricGraph& graph, std::span<const double> y,
                                         double beta) {
  check_inputs(graph, y, y);
  check_beta(beta);
  const Eigen::MatrixXd L = dense_laplacian(graph);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(L);
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  Eigen::VectorXd coeff = eig.eigenvectors().transpose() * yv;
  for (Eigen::Index k = 0; k < coeff.size(); ++k)
    coeff[k] /= 1.0 + beta * std::max(eig.eigenvalues()[k], 0.0);
  const Eigen::VectorXd u = eig.eigenvectors() * coeff;
  return {u.data(), u.data() + u.size()};
}

std::vector<double> max_principle_lhs(const GeometricGraph& graph, std::span<const double> z,
                                      std::span<const double> h, double beta,
                                      const std::function<double(double)>& g) {
  check_inputs(graph, z, h);
  auto lz = laplacian_apply(graph, z);
  for (std::size_t i = 0; i < lz.size(); ++i) lz[i] = -beta * lz[i] - (g(z[i] + h[i]) - g(h[i]));
  return lz;
}

MaxPrincipleCheck max_principle_check(std::span<const double> z, std::span<const double> lhs,
                                      double tol) {
  require(z.size() == lhs.size(), ErrorKind::DimensionMismatch, "z and lhs lengths differ");
  MaxPrincipleCheck c;
  c.hypothesis = std::all_of(lhs.begin(), lhs.end(), [&](double v) { return v >= -tol; });
  c.conclusion = std::all_of(z.begin(), z.end(), [&](double v) { return v <= tol; });
  return c;
}

}  // namespace lapreg
