#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "lapreg/geograph.hpp"
#include "lapreg/loss.hpp"
#include "lapreg/newton.hpp"

namespace lapreg {

// beta is the coefficient of the PDE  beta * L u + f(u - y) = 0. Its
// variational counterpart in  b R(u) + (1/n) sum F(u_i - y_i)  is b = beta / 4.
struct SolverConfig {
  double newton_tol = 1e-10;      // max-norm of the residual
  std::size_t newton_max_iter = 50;
  double cg_tol = 1e-12;          // relative 2-norm
  std::size_t cg_max_iter = 0;    // 0 means 10 n
  double damping = 0.5;
  double min_step = 0x1.0p-20;
  double jacobian_floor = 1e-10;

  void validate() const;
  bool operator==(const SolverConfig&) const = default;
};

struct SolveReport {
  std::vector<double> u;
  std::size_t newton_iters = 0;
  std::size_t cg_iters_total = 0;
  std::vector<double> residual_history;
  std::vector<double> objective_history;  // variational objective at beta / 4
  bool converged = false;
  SolveStatus status = SolveStatus::MaxIterations;
};

inline double variational_beta(double pde_beta) { return 0.25 * pde_beta; }
inline double pde_beta(double variational) { return 4.0 * variational; }

// r_i = beta (L u)_i + f(u_i - y_i)
std::vector<double> residual(const GeometricGraph& graph, std::span<const double> u,
                             std::span<const double> y, double beta, const LossModel& loss);

// beta R(u) + (1/n) sum F(u_i - y_i); here beta is the variational weight.
double objective_eval(const GeometricGraph& graph, std::span<const double> u,
                      std::span<const double> y, double beta, const LossModel& loss);

// Gradient of objective_eval: (4 beta / n) L u + (1/n) f(u - y).
std::vector<double> objective_gradient(const GeometricGraph& graph, std::span<const double> u,
                                       std::span<const double> y, double beta,
                                       const LossModel& loss);

// CG on (beta L + I) u = y started from u = y, with iterative refinement until
// the residual meets newton_tol.
SolveReport solve_quadratic(const GeometricGraph& graph, std::span<const double> y, double beta,
                            const SolverConfig& cfg = {});

SolveReport solve_semilinear(const GeometricGraph& graph, std::span<const double> y, double beta,
                             const LossModel& loss, const SolverConfig& cfg = {});

// sum_k <y, v_k> v_k / (1 + beta lambda_k) over the eigenpairs of the dense L.
std::vector<double> dense_spectral_solve(const GeometricGraph& graph, std::span<const double> y,
                                         double beta);

// z <= 0 whenever  -beta L z - (g(z + h) - g(h)) >= 0  holds pointwise.
struct MaxPrincipleCheck {
  bool hypothesis = false;  // lhs_i >= -tol for every i
  bool conclusion = false;  // max z <= tol
  bool consistent() const { return !hypothesis || conclusion; }
};

std::vector<double> max_principle_lhs(const GeometricGraph& graph, std::span<const double> z,
                                      std::span<const double> h, double beta,
                                      const std::function<double(double)>& g);

MaxPrincipleCheck max_principle_check(std::span<const double> z, std::span<const double> lhs,
                                      double tol = 1e-12);

}  // namespace lapreg
