#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "lapreg/geograph.hpp"
#include "lapreg/loss.hpp"
#include "lapreg/manifolds.hpp"
#include "lapreg/solver.hpp"

namespace lapreg {

using ScalarField = std::function<double(const Point&)>;

// (2 / (tau eps^(m+2))) * integral of eta(|z|/eps) (h(x) - h(x + z)) dz over the
// eps-ball, by Gauss-Legendre in r and theta. Flat torus only.
double nonlocal_laplacian(const ScalarField& h, Manifold manifold, const Point& x, double eps,
                          const Kernel& kernel = {}, int quad_order = 32);
double nonlocal_laplacian(const Trend& trend, Manifold manifold, const Point& x, double eps,
                          const Kernel& kernel = {}, int quad_order = 32);

struct ConsistencyReport {
  double sup_error = 0.0;
  double interior_sup_error = 0.0;  // points farther than 2 eps from the boundary
  std::size_t n = 0;
  double eps = 0.0;
  KernelKind kernel = KernelKind::TriangularBump;
  std::uint64_t seed = 0;
};

// max_i |(L h)(x_i) - Delta_M h(x_i)| with h = trend.
ConsistencyReport pointwise_consistency(const PointCloud& cloud, const GeometricGraph& graph,
                                        const Trend& trend);

// Same report without storing the graph: rows of L h are accumulated on the fly.
ConsistencyReport pointwise_consistency(const PointCloud& cloud, double eps, const Kernel& kernel,
                                        const Trend& trend);

struct ContinuumSolution {
  std::size_t grid_n = 0;
  double h_grid = 0.0;
  std::vector<double> v;   // row-major, v[j * grid_n + i] at (i h, j h)
  std::vector<double> mu;  // trend on the same lattice
  double beta = 0.0;
  LossModel loss;
  NoiseModel noise;
  std::size_t newton_iters = 0;
  double residual = 0.0;  // final max-norm residual
  std::vector<double> objective_history;
  SolveStatus status = SolveStatus::MaxIterations;

  Point node(std::size_t idx) const {
    return {static_cast<double>(idx % grid_n) * h_grid, static_cast<double>(idx / grid_n) * h_grid,
            0.0};
  }
};

// Periodic 5-point discretization of  beta Delta v + E f(v - mu - xi) = 0  on
// the flat torus, solved by the damped Newton scheme of the graph solver.
ContinuumSolution continuum_solve(const Trend& trend, const NoiseModel& noise,
                                  const LossModel& loss, double beta, std::size_t grid_n,
                                  const SolverConfig& cfg = {});

// Discrete residual of a continuum solution (max-norm).
double continuum_residual(const ContinuumSolution& sol);

struct BiasCheck {
  double sup_dev = 0.0;  // max |v - mu_f| on the lattice
  double bound = 0.0;    // beta sup|Delta mu| / c1
  double c1 = 0.0;
  double sup_laplacian = 0.0;
};

BiasCheck bias_check(const ContinuumSolution& sol, const Trend& trend, const LossModel& loss,
                     const NoiseModel& noise);

}  // namespace lapreg
