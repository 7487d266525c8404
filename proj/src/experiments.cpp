#include "lapreg/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <string>

#include "lapreg/error.hpp"
#include "lapreg/io.hpp"
#include "lapreg/rng.hpp"
#include "lapreg/semisup.hpp"

namespace lapreg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point& mark) {
  const auto now = Clock::now();
  const double s = std::chrono::duration<double>(now - mark).count();
  mark = now;
  return s;
}

struct Accum {
  double sup = 0.0;
  double sumsq = 0.0;
  double sum = 0.0;
  std::size_t count = 0;
  void add(double e) {
    sup = std::max(sup, std::abs(e));
    sumsq += e * e;
    sum += e;
    ++count;
  }
  double rms() const { return count ? std::sqrt(sumsq / static_cast<double>(count)) : 0.0; }
  double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
};

// Blue - white - red.
std::array<unsigned char, 3> colour(double t) {
  t = std::clamp(t, 0.0, 1.0);
  auto byte = [](double v) { return static_cast<unsigned char>(std::lround(255.0 * std::clamp(v, 0.0, 1.0))); };
  if (t < 0.5) {
    const double s = t / 0.5;
    return {byte(s), byte(s), 255};
  }
  const double s = (t - 0.5) / 0.5;
  return {255, byte(1.0 - s), byte(1.0 - s)};
}

std::size_t column_index(const CsvTable& table, std::string_view name) {
  const auto it = std::find(table.header.begin(), table.header.end(), name);
  require(it != table.header.end(), ErrorKind::MalformedCsv,
          "missing column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - table.header.begin());
}

}  // namespace

double Schedule::eps_for(std::size_t n) const {
  return kind == Kind::Paper ? std::pow(static_cast<double>(n), -0.2) : eps;
}

double Schedule::beta_for(std::size_t n) const {
  return kind == Kind::Paper ? std::pow(static_cast<double>(n), -0.2) : beta;
}

void ExperimentConfig::validate() const {
  require(n >= 1, ErrorKind::ValidationError, "n must be >= 1");
  require(labeled() >= 1 && labeled() <= n, ErrorKind::ValidationError,
          "q=" + std::to_string(q) + " must lie in [1, n=" + std::to_string(n) + "]");
  if (schedule.kind == Schedule::Kind::Explicit) {
    require(schedule.eps > 0.0 && std::isfinite(schedule.eps), ErrorKind::ValidationError,
            "schedule eps must be positive");
    require(schedule.beta >= 0.0 && std::isfinite(schedule.beta), ErrorKind::ValidationError,
            "schedule beta must be >= 0");
  }
  require(!seeds.empty(), ErrorKind::ValidationError, "at least one seed is required");
  require(knn_k <= labeled(), ErrorKind::ValidationError, "knn_k must not exceed q");
  noise.validate();
  loss.validate();
  solver.validate();
  if (manifold == Manifold::FlatTorus && trend.kind == Trend::Kind::SumOfSines)
    for (const auto& mode : trend.modes)
      for (double k : mode.frequency)
        require(k == std::round(k), ErrorKind::ValidationError,
                "torus sine modes need integer frequencies");
}

bool in_report_interior(Manifold m, const Point& x) {
  if (m != Manifold::UnitSquare) return true;
  return x[0] >= 0.1 && x[0] <= 0.9 && x[1] >= 0.1 && x[1] <= 0.9;
}

ErrorReport run_experiment(const ExperimentConfig& config, std::uint64_t seed) {
  config.validate();
  ErrorReport rep;
  rep.seed = seed;
  rep.n = config.n;
  rep.q = config.labeled();
  rep.eps = config.schedule.eps_for(config.n);
  rep.beta = config.schedule.beta_for(config.n);

  auto mark = Clock::now();
  rep.cloud = sample_cloud(config.manifold, config.n, derive_seed(seed, 0));
  rep.times.sample = seconds_since(mark);

  const auto ds = make_dataset(rep.cloud, config.trend, config.noise, rep.q, derive_seed(seed, 1));
  rep.times.label = seconds_since(mark);

  std::vector<double> y = ds.labels;
  if (rep.q < rep.n) y = voronoi_extend(ds).extended_y;
  rep.times.extend = seconds_since(mark);

  const auto graph =
      build_graph(rep.cloud, rep.eps, Kernel{config.kernel, intrinsic_dim(config.manifold)});
  rep.times.graph = seconds_since(mark);

  auto solve = solve_semilinear(graph, y, rep.beta, config.loss, config.solver);
  rep.times.solve = seconds_since(mark);
  rep.u = std::move(solve.u);
  rep.newton_iters = solve.newton_iters;
  rep.cg_iters = solve.cg_iters_total;
  rep.status = solve.status;
  rep.converged = solve.converged;
  rep.objective_history = std::move(solve.objective_history);

  const ExpectedLoss ed(config.loss, config.noise);
  rep.knn_k = config.knn_k ? config.knn_k : default_knn_k(rep.q);
  const auto knn = knn_regress(ds, rep.knn_k);
  const std::size_t n = rep.n;
  rep.mu = ds.trend_values;
  rep.mu_f.resize(n);
  rep.error.resize(n);
  rep.error_mu.resize(n);
  rep.knn_error.resize(n);
  rep.interior.resize(n);
  Accum all, inner, all_mu, inner_mu, offset, knn_all, knn_inner;
  for (std::size_t i = 0; i < n; ++i) {
    rep.mu_f[i] = modified_trend(ed, rep.mu[i]);
    rep.error[i] = rep.u[i] - rep.mu_f[i];
    rep.error_mu[i] = rep.u[i] - rep.mu[i];
    rep.knn_error[i] = knn[i] - rep.mu_f[i];
    rep.interior[i] = in_report_interior(config.manifold, rep.cloud.points[i]);
    all.add(rep.error[i]);
    all_mu.add(rep.error_mu[i]);
    knn_all.add(rep.knn_error[i]);
    if (rep.interior[i]) {
      inner.add(rep.error[i]);
      inner_mu.add(rep.error_mu[i]);
      offset.add(rep.mu_f[i] - rep.mu[i]);
      knn_inner.add(rep.knn_error[i]);
    }
  }
  rep.sup_error = all.sup;
  rep.interior_sup_error = inner.sup;
  rep.rmse = all.rms();
  rep.interior_rmse = inner.rms();
  rep.sup_error_mu = all_mu.sup;
  rep.interior_sup_error_mu = inner_mu.sup;
  rep.interior_mean_error_mu = inner_mu.mean();
  rep.interior_mean_offset = offset.mean();
  rep.knn_sup_error = knn_all.sup;
  rep.knn_interior_sup_error = knn_inner.sup;
  rep.knn_rmse = knn_all.rms();
  rep.times.evaluate = seconds_since(mark);
  return rep;
}

double median(std::vector<double> values) {
  require(!values.empty(), ErrorKind::InvalidArgument, "median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

namespace {

RateRow summarize(const ExperimentConfig& cfg, const std::vector<std::uint64_t>& seeds) {
  std::vector<double> sup, inner, rmse;
  for (auto s : seeds) {
    const auto rep = run_experiment(cfg, s);
    sup.push_back(rep.sup_error);
    inner.push_back(rep.interior_sup_error);
    rmse.push_back(rep.rmse);
  }
  return {cfg.n, cfg.schedule.eps_for(cfg.n), cfg.schedule.beta_for(cfg.n), median(sup),
          median(inner), median(rmse)};
}

}  // namespace

std::vector<RateRow> rate_study(const ExperimentConfig& base, const std::vector<std::size_t>& n_list,
                                const std::vector<std::uint64_t>& seeds) {
  require(std::is_sorted(n_list.begin(), n_list.end()) &&
              std::adjacent_find(n_list.begin(), n_list.end()) == n_list.end(),
          ErrorKind::InvalidArgument, "n_list must be strictly increasing");
  std::vector<RateRow> rows;
  for (auto n : n_list) {
    auto cfg = base;
    cfg.n = n;
    if (base.q != 0 && base.n != 0)
      cfg.q = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(
                                           static_cast<double>(n) * base.q / base.n)));
    else
      cfg.q = 0;
    cfg.knn_k = 0;
    rows.push_back(summarize(cfg, seeds));
  }
  return rows;
}

std::vector<RateRow> beta_sweep(const ExperimentConfig& base, double eps,
                                const std::vector<double>& betas,
                                const std::vector<std::uint64_t>& seeds) {
  std::vector<RateRow> rows;
  for (double beta : betas) {
    auto cfg = base;
    cfg.schedule = Schedule::explicit_values(eps, beta);
    rows.push_back(summarize(cfg, seeds));
  }
  return rows;
}

HeatmapImage render_heatmap(const std::string& csv_path, const std::string& out_path,
                            std::size_t size) {
  require(size >= 1, ErrorKind::InvalidArgument, "heatmap size must be >= 1");
  const auto table = read_csv(csv_path);
  const auto c1 = column_index(table, "x1");
  const auto c2 = column_index(table, "x2");
  const auto cv = column_index(table, "value");
  column_index(table, "idx");
  require(!table.rows.empty(), ErrorKind::MalformedCsv, "error field has no rows");

  PointCloud cloud;
  cloud.manifold = Manifold::UnitSquare;  // plain Euclidean nearest-sample search in the plane
  std::vector<double> values;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    cloud.points.push_back({parse_double(row[c1], r + 1, "x1"), parse_double(row[c2], r + 1, "x2"), 0.0});
    values.push_back(parse_double(row[cv], r + 1, "value"));
  }
  double lo1 = cloud.points[0][0], hi1 = lo1, lo2 = cloud.points[0][1], hi2 = lo2;
  for (const auto& p : cloud.points) {
    lo1 = std::min(lo1, p[0]);
    hi1 = std::max(hi1, p[0]);
    lo2 = std::min(lo2, p[1]);
    hi2 = std::max(hi2, p[1]);
  }

  HeatmapImage img;
  img.width = img.height = size;
  std::vector<Point> centres;
  centres.reserve(size * size);
  for (std::size_t r = 0; r < size; ++r)
    for (std::size_t c = 0; c < size; ++c)
      centres.push_back({lo1 + (static_cast<double>(c) + 0.5) / static_cast<double>(size) * (hi1 - lo1),
                         hi2 - (static_cast<double>(r) + 0.5) / static_cast<double>(size) * (hi2 - lo2),
                         0.0});
  img.field = out_of_sample(cloud, values, centres);
  img.lo = *std::min_element(values.begin(), values.end());
  img.hi = *std::max_element(values.begin(), values.end());
  img.pixels.reserve(3 * size * size);
  for (double v : img.field) {
    const double t = img.hi > img.lo ? (v - img.lo) / (img.hi - img.lo) : 0.5;
    for (auto b : colour(t)) img.pixels.push_back(b);
  }

  std::ofstream out(out_path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::InvalidArgument, "cannot write " + out_path);
  out << "P6\n" << size << " " << size << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  require(static_cast<bool>(out), ErrorKind::InvalidArgument, "failed writing " + out_path);
  return img;
}

}  // namespace lapreg
