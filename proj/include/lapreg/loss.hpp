#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lapreg/manifolds.hpp"

namespace lapreg {

// Strictly convex polynomial losses F with F(0) = 0.
//   Quadratic:    F = t^2/2
//   Quartic:      F = t^4/4           (f'(0) = 0, see solver Jacobian floor)
//   QuadQuartic:  F = a t^2/2 + b t^4/4, a > 0, b >= 0
struct LossModel {
  enum class Kind { Quadratic, Quartic, QuadQuartic };
  Kind kind = Kind::Quadratic;
  double a = 1.0;
  double b = 0.0;

  static LossModel quadratic() { return {Kind::Quadratic, 1.0, 0.0}; }
  static LossModel quartic() { return {Kind::Quartic, 0.0, 1.0}; }
  static LossModel quad_quartic(double a, double b) { return {Kind::QuadQuartic, a, b}; }

  void validate() const;
  // Guaranteed lower bound of f' over R (0 for the pure quartic).
  double fprime_lower_bound() const { return a; }

  double F(double t) const { return 0.5 * a * t * t + 0.25 * b * t * t * t * t; }
  double f(double t) const { return a * t + b * t * t * t; }
  double fprime(double t) const { return a + 3.0 * b * t * t; }
  // F(t + h) - F(t) without cancellation when h is small relative to t.
  double F_increment(double t, double h) const {
    const double quad = h * (t + 0.5 * h);
    const double quart = h * (t * t * t + h * (1.5 * t * t + h * (t + 0.25 * h)));
    return a * quad + b * quart;
  }

  bool operator==(const LossModel&) const = default;
};

// Free-function spellings of the closed forms.
inline double F_eval(const LossModel& loss, double t) { return loss.F(t); }
inline double f_eval(const LossModel& loss, double t) { return loss.f(t); }
inline double fprime_eval(const LossModel& loss, double t) { return loss.fprime(t); }

LossModel parse_loss(std::string_view spec);
std::string to_string(const LossModel& loss);
NoiseModel parse_noise(std::string_view spec);
std::string to_string(const NoiseModel& noise);

// Expectations of the loss against the noise law: exact finite sums for the
// Bernoulli kinds, 32-point Gauss-Legendre for uniform noise (exact for the
// shipped polynomial losses).
class ExpectedLoss {
 public:
  ExpectedLoss(LossModel loss, NoiseModel noise);

  const LossModel& loss() const { return loss_; }
  const NoiseModel& noise() const { return noise_; }
  // (value s, probability p) pairs; the noise law is sum_k p_k delta_{s_k}.
  const std::vector<std::pair<double, double>>& atoms() const { return atoms_; }

  // E F(t - xi)
  double F(double t) const;
  // E f(t - xi)
  double f(double t) const;
  // E f'(t - xi)
  double fprime(double t) const;
  // E [F(t + h - xi) - F(t - xi)]
  double F_increment(double t, double h) const;
  // Minimum of E f' over [lo, hi]. E f' is convex for every shipped loss,
  // so a ternary search is exact up to its tolerance.
  double min_fprime(double lo, double hi) const;

 private:
  LossModel loss_;
  NoiseModel noise_;
  std::vector<std::pair<double, double>> atoms_;
};

inline double expected_f(const ExpectedLoss& ed, double t) { return ed.f(t); }

// Root w of E f(w - mu_x - xi) = 0, by bisection on [mu_x - B, mu_x + B]
// refined to an interval shorter than 1e-12.
double modified_trend(const LossModel& loss, const NoiseModel& noise, double mu_x);
double modified_trend(const ExpectedLoss& ed, double mu_x);

}  // namespace lapreg
