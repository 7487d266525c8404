#include "lapreg/loss.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

#include "lapreg/error.hpp"
#include "lapreg/quadrature.hpp"

namespace lapreg {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_number(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value))
    throw Error(ErrorKind::ValidationError,
                "bad number '" + std::string(text) + "' in " + std::string(what));
  return value;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void LossModel::validate() const {
  switch (kind) {
    case Kind::Quadratic:
      require(a == 1.0 && b == 0.0, ErrorKind::ValidationError, "quadratic loss has a=1, b=0");
      break;
    case Kind::Quartic:
      require(a == 0.0 && b == 1.0, ErrorKind::ValidationError, "quartic loss has a=0, b=1");
      break;
    case Kind::QuadQuartic:
      require(a > 0.0 && std::isfinite(a) && b >= 0.0 && std::isfinite(b),
              ErrorKind::ValidationError, "quadquartic loss needs a > 0 and b >= 0");
      break;
  }
}

LossModel parse_loss(std::string_view spec) {
  if (spec == "quadratic") return LossModel::quadratic();
  if (spec == "quartic") return LossModel::quartic();
  constexpr std::string_view prefix = "quadquartic:";
  if (spec.starts_with(prefix)) {
    const auto parts = split(spec.substr(prefix.size()), ',');
    require(parts.size() == 2, ErrorKind::ValidationError, "expected quadquartic:a,b");
    auto loss = LossModel::quad_quartic(parse_number(parts[0], "loss"), parse_number(parts[1], "loss"));
    loss.validate();
    return loss;
  }
  throw Error(ErrorKind::ValidationError, "unknown loss '" + std::string(spec) + "'");
}

std::string to_string(const LossModel& loss) {
  switch (loss.kind) {
    case LossModel::Kind::Quadratic: return "quadratic";
    case LossModel::Kind::Quartic: return "quartic";
    case LossModel::Kind::QuadQuartic:
      return "quadquartic:" + format_number(loss.a) + "," + format_number(loss.b);
  }
  return "quadratic";
}

NoiseModel parse_noise(std::string_view spec) {
  const auto parts = split(spec, ':');
  NoiseModel noise;
  if (parts[0] == "sym" && parts.size() == 2) {
    noise = NoiseModel::symmetric(parse_number(parts[1], "noise"));
  } else if (parts[0] == "asym" && (parts.size() == 2 || parts.size() == 3)) {
    noise = NoiseModel::asymmetric(parse_number(parts[1], "noise"),
                                   parts.size() == 3 ? parse_number(parts[2], "noise") : 0.8);
  } else if (parts[0] == "uniform" && parts.size() == 2) {
    noise = NoiseModel::uniform(parse_number(parts[1], "noise"));
  } else {
    throw Error(ErrorKind::ValidationError, "unknown noise '" + std::string(spec) + "'");
  }
  noise.validate();
  return noise;
}

std::string to_string(const NoiseModel& noise) {
  switch (noise.kind) {
    case NoiseModel::Kind::SymmetricBernoulli: return "sym:" + format_number(noise.sigma);
    case NoiseModel::Kind::AsymmetricBernoulli:
      return "asym:" + format_number(noise.sigma) + ":" + format_number(noise.p_plus);
    case NoiseModel::Kind::Uniform: return "uniform:" + format_number(noise.sigma);
  }
  return "sym:0.3";
}

ExpectedLoss::ExpectedLoss(LossModel loss, NoiseModel noise) : loss_(loss), noise_(noise) {
  loss_.validate();
  noise_.validate();
  const double s = noise_.sigma;
  switch (noise_.kind) {
    case NoiseModel::Kind::SymmetricBernoulli:
      atoms_ = {{-s, 0.5}, {s, 0.5}};
      break;
    case NoiseModel::Kind::AsymmetricBernoulli: {
      const double p = noise_.p_plus;
      atoms_ = {{-s * p / (1.0 - p), 1.0 - p}, {s, p}};
      break;
    }
    case NoiseModel::Kind::Uniform: {
      const auto rule = gauss_legendre(32, -s, s);
      for (std::size_t k = 0; k < rule.nodes.size(); ++k)
        atoms_.emplace_back(rule.nodes[k], rule.weights[k] / (2.0 * s));
      break;
    }
  }
}

double ExpectedLoss::F(double t) const {
  double acc = 0.0;
  for (const auto& [s, p] : atoms_) acc += p * loss_.F(t - s);
  return acc;
}

double ExpectedLoss::f(double t) const {
  double acc = 0.0;
  for (const auto& [s, p] : atoms_) acc += p * loss_.f(t - s);
  return acc;
}

double ExpectedLoss::fprime(double t) const {
  double acc = 0.0;
  for (const auto& [s, p] : atoms_) acc += p * loss_.fprime(t - s);
  return acc;
}

double ExpectedLoss::F_increment(double t, double h) const {
  double acc = 0.0;
  for (const auto& [s, p] : atoms_) acc += p * loss_.F_increment(t - s, h);
  return acc;
}

double ExpectedLoss::min_fprime(double lo, double hi) const {
  require(lo <= hi, ErrorKind::InvalidArgument, "min_fprime needs lo <= hi");
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (fprime(m1) <= fprime(m2)) hi = m2;
    else lo = m1;
  }
  return std::min({fprime(lo), fprime(hi), fprime(0.5 * (lo + hi))});
}

double modified_trend(const ExpectedLoss& ed, double mu_x) {
  const double bound = ed.noise().support_bound();
  double lo = mu_x - bound;
  double hi = mu_x + bound;
  const double g_lo = ed.f(lo - mu_x);
  const double g_hi = ed.f(hi - mu_x);
  if (g_lo == 0.0) return lo;
  if (g_hi == 0.0) return hi;
  require(g_lo < 0.0 && g_hi > 0.0, ErrorKind::BracketFailure,
          "expected f has equal signs at both bracket ends");
  while (hi - lo >= 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double g = ed.f(mid - mu_x);
    if (g == 0.0) return mid;
    if (g < 0.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double modified_trend(const LossModel& loss, const NoiseModel& noise, double mu_x) {
  return modified_trend(ExpectedLoss(loss, noise), mu_x);
}

}  // namespace lapreg
