#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace lapreg {

struct CgResult {
  std::size_t iterations = 0;
  double relative_residual = 0.0;  // recurrence residual / |b|
  bool converged = false;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// Jacobi-preconditioned conjugate gradients for an SPD operator given as
// apply(x, out). Stops when |r|_2 <= rtol * |b|_2. x holds the initial guess.
template <typename Apply>
CgResult pcg(Apply&& apply, std::span<const double> precond_diag, std::span<const double> b,
             std::span<double> x, double rtol, std::size_t max_iter) {
  const std::size_t n = b.size();
  CgResult res;
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) {
    for (auto& v : x) v = 0.0;
    res.converged = true;
    return res;
  }
  std::vector<double> r(n), z(n), p(n), q(n);
  apply(std::span<const double>(x), std::span<double>(q));
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / precond_diag[i];
  p = z;
  double rz = dot(r, z);
  double rnorm = std::sqrt(dot(r, r));
  while (true) {
    res.relative_residual = rnorm / bnorm;
    if (res.relative_residual <= rtol) {
      res.converged = true;
      return res;
    }
    if (res.iterations >= max_iter) return res;
    apply(std::span<const double>(p), std::span<double>(q));
    const double pq = dot(p, q);
    if (!(pq > 0.0)) return res;  // breakdown: operator not SPD on p
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    ++res.iterations;
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / precond_diag[i];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rnorm = std::sqrt(dot(r, r));
  }
}

}  // namespace lapreg
