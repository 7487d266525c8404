#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "lapreg/cg.hpp"

namespace lapreg {

enum class SolveStatus { Converged, CgStall, NewtonStall, MaxIterations };

inline std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::CgStall: return "cg_stall";
    case SolveStatus::NewtonStall: return "newton_stall";
    case SolveStatus::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

struct NewtonSettings {
  double tol = 1e-10;
  std::size_t max_iter = 50;
  double cg_tol = 1e-12;
  std::size_t cg_max_iter = 0;
  double damping = 0.5;
  double min_step = 0x1.0p-20;
  double jacobian_floor = 1e-10;
  double objective_scale = 1.0;
};

struct NewtonTrace {
  std::vector<double> u;
  std::size_t iterations = 0;
  std::size_t cg_iterations = 0;
  std::vector<double> residual_history;
  std::vector<double> objective_history;
  SolveStatus status = SolveStatus::MaxIterations;
};

namespace detail {

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Damped Newton for  A u + g(u) = 0  with A symmetric positive semi-definite
// and g separable, i.e. the gradient of
//   Phi(u) = 1/2 <u, A u> + sum_i phi_i(u_i).
// Problem supplies size(), apply(x, out) for A, diag() of A, and per-entry
// grad/hess/value/increment of phi_i. The line search accepts a step once the
// increment of Phi, evaluated without cancellation, is <= 0; the objective
// history (objective_scale * Phi) therefore never increases.
template <typename Problem>
NewtonTrace damped_newton(const Problem& prob, std::vector<double> u, const NewtonSettings& cfg) {
  const std::size_t n = prob.size();
  const std::size_t cg_max = cfg.cg_max_iter ? cfg.cg_max_iter : 10 * n;
  const std::vector<double> adiag = prob.diag();
  NewtonTrace trace;
  std::vector<double> au(n), r(n), d(n), pre(n), rhs(n), delta(n), ad(n);

  auto gradient = [&] {
    prob.apply(std::span<const double>(u), std::span<double>(au));
    for (std::size_t i = 0; i < n; ++i) r[i] = au[i] + prob.grad(i, u[i]);
  };

  gradient();
  double phi = 0.5 * dot(u, au);
  for (std::size_t i = 0; i < n; ++i) phi += prob.value(i, u[i]);
  trace.objective_history.push_back(cfg.objective_scale * phi);

  bool cg_stalled = false;
  while (true) {
    const double res = max_abs(r);
    trace.residual_history.push_back(res);
    if (res <= cfg.tol) {
      trace.status = SolveStatus::Converged;
      break;
    }
    if (trace.iterations >= cfg.max_iter) {
      trace.status = cg_stalled ? SolveStatus::CgStall : SolveStatus::MaxIterations;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = std::max(prob.hess(i, u[i]), cfg.jacobian_floor);
      pre[i] = adiag[i] + d[i];
      rhs[i] = -r[i];
      delta[i] = 0.0;
    }
    const auto cg = pcg(
        [&](std::span<const double> x, std::span<double> out) {
          prob.apply(x, out);
          for (std::size_t i = 0; i < n; ++i) out[i] += d[i] * x[i];
        },
        pre, rhs, delta, cfg.cg_tol, cg_max);
    trace.cg_iterations += cg.iterations;
    if (!cg.converged) cg_stalled = true;
    ++trace.iterations;

    prob.apply(std::span<const double>(delta), std::span<double>(ad));
    const double lin = dot(delta, au);
    const double curv = dot(delta, ad);
    double t = 1.0;
    double change = 0.0;
    bool accepted = false;
    while (t >= cfg.min_step) {
      change = t * lin + 0.5 * t * t * curv;
      for (std::size_t i = 0; i < n; ++i) change += prob.increment(i, u[i], t * delta[i]);
      if (change <= 0.0) {
        accepted = true;
        break;
      }
      t *= cfg.damping;
    }
    if (!accepted) {
      trace.status = cg_stalled ? SolveStatus::CgStall : SolveStatus::NewtonStall;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) u[i] += t * delta[i];
    phi += change;
    trace.objective_history.push_back(cfg.objective_scale * phi);
    gradient();
  }
  trace.u = std::move(u);
  return trace;
}

}  // namespace detail

}  // namespace lapreg
