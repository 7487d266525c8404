#include <doctest.h>

#include <cmath>
#include <vector>

#include "lapreg/error.hpp"
#include "lapreg/loss.hpp"
#include "lapreg/rng.hpp"
#include "oracles.hpp"

using namespace lapreg;

namespace {

std::vector<LossModel> losses() {
  return {LossModel::quadratic(), LossModel::quartic(), LossModel::quad_quartic(0.5, 2.0)};
}

std::vector<NoiseModel> noises() {
  return {NoiseModel::symmetric(0.3), NoiseModel::asymmetric(0.3, 0.8), NoiseModel::asymmetric(0.2, 0.35),
          NoiseModel::uniform(0.4)};
}

}  // namespace

TEST_CASE("closed forms") {
  CHECK(f_eval(LossModel::quadratic(), 0.3) == 0.3);
  CHECK(f_eval(LossModel::quartic(), 2.0) == 8.0);
  CHECK(fprime_eval(LossModel::quartic(), 2.0) == 12.0);
  CHECK(F_eval(LossModel::quartic(), 2.0) == 4.0);
  for (const auto& l : losses()) {
    CHECK(l.f(0.0) == 0.0);
    CHECK(l.F(0.0) == 0.0);
  }
}

TEST_CASE("derivatives match central differences") {
  const double h = 1e-6;
  for (const auto& l : losses())
    for (double t = -3.0; t <= 3.0; t += 0.125) {
      const double dF = (l.F(t + h) - l.F(t - h)) / (2 * h);
      const double df = (l.f(t + h) - l.f(t - h)) / (2 * h);
      CHECK(std::abs(dF - l.f(t)) <= 1e-6 * std::max(1.0, std::abs(l.f(t))));
      CHECK(std::abs(df - l.fprime(t)) <= 1e-6 * std::max(1.0, std::abs(l.fprime(t))));
    }
}

TEST_CASE("F_increment equals the plain difference") {
  for (const auto& l : losses())
    for (double t : {-2.0, -0.3, 0.0, 0.7, 1.9})
      for (double d : {-0.5, -1e-3, 1e-3, 0.25})
        CHECK(l.F_increment(t, d) == doctest::Approx(l.F(t + d) - l.F(t)).epsilon(1e-12));
}

TEST_CASE("expected_f closed cases") {
  for (const auto& noise : noises()) {
    const ExpectedLoss q(LossModel::quadratic(), noise);
    for (double t : {-1.0, -0.2, 0.0, 0.4, 2.0}) CHECK(expected_f(q, t) == doctest::Approx(t).epsilon(1e-13).scale(1.0));
  }
  const double s = 0.3;
  const ExpectedLoss quart(LossModel::quartic(), NoiseModel::symmetric(s));
  for (double t : {-1.0, -0.2, 0.0, 0.4, 2.0})
    CHECK(expected_f(quart, t) == doctest::Approx(t * t * t + 3 * t * s * s).epsilon(1e-13).scale(1.0));

  const ExpectedLoss uq(LossModel::quartic(), NoiseModel::uniform(s));
  // E (t - xi)^3 with xi uniform on [-s, s]: t^3 + t s^2.
  for (double t : {-1.0, 0.0, 0.4})
    CHECK(expected_f(uq, t) == doctest::Approx(t * t * t + t * s * s).epsilon(1e-13).scale(1.0));
}

TEST_CASE("asymmetric quartic expectation against Monte Carlo") {
  const auto noise = NoiseModel::asymmetric(0.3, 0.8);
  const ExpectedLoss ed(LossModel::quartic(), noise);
  const double exact = 0.8 * std::pow(-0.3, 3) + 0.2 * std::pow(1.2, 3);
  CHECK(expected_f(ed, 0.0) == doctest::Approx(exact).epsilon(1e-14));

  Rng rng(2024);
  const int samples = 10'000'000;
  double sum = 0.0, sum2 = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double v = LossModel::quartic().f(-noise.sample(rng));
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / samples;
  const double se = std::sqrt((sum2 / samples - mean * mean) / samples);
  CHECK(std::abs(mean - exact) <= 3.0 * se);
}

TEST_CASE("expected_f is strictly increasing") {
  Rng rng(3);
  for (const auto& l : losses())
    for (const auto& noise : noises()) {
      const ExpectedLoss ed(l, noise);
      std::vector<double> ts(200);
      for (auto& t : ts) t = 6.0 * rng.uniform() - 3.0;
      std::sort(ts.begin(), ts.end());
      for (std::size_t k = 1; k < ts.size(); ++k)
        if (ts[k] > ts[k - 1]) CHECK(ed.f(ts[k]) > ed.f(ts[k - 1]));
    }
}

TEST_CASE("modified_trend") {
  for (const auto& noise : noises())
    for (double mu : {-0.8, 0.0, 0.37})
      CHECK(std::abs(modified_trend(LossModel::quadratic(), noise, mu) - mu) <= 1e-12);

  for (double mu : {-0.5, 0.0, 1.0})
    CHECK(std::abs(modified_trend(LossModel::quartic(), NoiseModel::symmetric(0.3), mu) - mu) <= 1e-12);

  const double offset =
      oracle::bisect([](double t) { return 0.8 * std::pow(t - 0.3, 3) + 0.2 * std::pow(t + 1.2, 3); }, -2.0, 2.0);
  for (double mu : {-0.5, 0.0, 0.8})
    CHECK(modified_trend(LossModel::quartic(), NoiseModel::asymmetric(0.3, 0.8), mu) - mu ==
          doctest::Approx(offset).epsilon(1e-10));
  CHECK(offset < 0.0);

  for (const auto& l : losses())
    for (const auto& noise : noises()) {
      const ExpectedLoss ed(l, noise);
      for (double mu : {-1.0, 0.25}) {
        const double w = modified_trend(ed, mu);
        CHECK(std::abs(ed.f(w - mu)) <= 1e-10);
      }
    }
}

TEST_CASE("min_fprime is the minimum over the interval") {
  for (const auto& l : losses())
    for (const auto& noise : noises()) {
      const ExpectedLoss ed(l, noise);
      for (auto [lo, hi] : {std::pair{-2.0, 1.5}, std::pair{0.5, 3.0}, std::pair{-3.0, -1.0}}) {
        double scan = 1e300;
        for (int k = 0; k <= 20000; ++k) scan = std::min(scan, ed.fprime(lo + (hi - lo) * k / 20000.0));
        CHECK(ed.min_fprime(lo, hi) == doctest::Approx(scan).epsilon(1e-6).scale(1.0));
      }
    }
}

TEST_CASE("atoms are a mean-zero probability law") {
  for (const auto& noise : noises()) {
    const ExpectedLoss ed(LossModel::quadratic(), noise);
    double mass = 0.0, mean = 0.0;
    for (auto [s, p] : ed.atoms()) {
      CHECK(std::abs(s) <= noise.support_bound() + 1e-15);
      mass += p;
      mean += p * s;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(mean) <= 1e-15);
  }
}

TEST_CASE("parsing") {
  CHECK(parse_loss("quadratic") == LossModel::quadratic());
  CHECK(parse_loss("quartic") == LossModel::quartic());
  CHECK(parse_loss("quadquartic:0.5,2") == LossModel::quad_quartic(0.5, 2.0));
  CHECK(parse_noise("sym:0.3") == NoiseModel::symmetric(0.3));
  CHECK(parse_noise("asym:0.3:0.8") == NoiseModel::asymmetric(0.3, 0.8));
  CHECK(parse_noise("asym:0.25") == NoiseModel::asymmetric(0.25, 0.8));
  CHECK(parse_noise("uniform:0.1") == NoiseModel::uniform(0.1));
  for (const auto& l : losses()) CHECK(parse_loss(to_string(l)) == l);
  for (const auto& n : noises()) CHECK(parse_noise(to_string(n)) == n);
  for (const char* bad : {"cubic", "quadquartic:0,1", "quadquartic:1", "quadquartic:1,-1"})
    CHECK_THROWS_AS(parse_loss(bad), Error);
  for (const char* bad : {"sym", "sym:-1", "asym:0.3:1.5", "gauss:0.1", "uniform:x"})
    CHECK_THROWS_AS(parse_noise(bad), Error);
}
