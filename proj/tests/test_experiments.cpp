#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lapreg/error.hpp"
#include "lapreg/experiments.hpp"
#include "lapreg/io.hpp"
#include "oracles.hpp"

using namespace lapreg;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config(std::size_t n = 2000) {
  ExperimentConfig cfg;
  cfg.n = n;
  return cfg;
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("lapreg_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string csv_bytes(const CsvTable& t) {
  std::ostringstream out;
  write_csv(out, t);
  return out.str();
}

}  // namespace

TEST_CASE("schedule") {
  CHECK(Schedule::paper().eps_for(10000) == doctest::Approx(std::pow(10000.0, -0.2)));
  CHECK(Schedule::paper().beta_for(32) == doctest::Approx(0.5));
  const auto e = Schedule::explicit_values(0.1, 0.02);
  CHECK(e.eps_for(5) == 0.1);
  CHECK(e.beta_for(5) == 0.02);
}

TEST_CASE("config validation") {
  auto cfg = small_config();
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.labeled() == 2000);
  cfg.q = 2001;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = small_config();
  cfg.seeds.clear();
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = small_config();
  cfg.manifold = Manifold::FlatTorus;
  cfg.trend = Trend::sum_of_sines({{1.0, {0.5, 0.0, 0.0}}});
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("experiment report is deterministic and self-consistent") {
  const auto cfg = small_config();
  const auto a = run_experiment(cfg, 5);
  const auto b = run_experiment(cfg, 5);
  CHECK(a.u == b.u);
  CHECK(csv_bytes(error_field_table(a)) == csv_bytes(error_field_table(b)));
  CHECK(a.converged);
  for (std::size_t i = 0; i < a.mu.size(); ++i) CHECK(std::abs(a.mu_f[i] - a.mu[i]) <= 1e-12);
  CHECK(a.interior_sup_error <= a.sup_error);
  CHECK(a.rmse <= a.sup_error);
  CHECK(a.knn_k == 45);
  CHECK(a.eps == doctest::Approx(std::pow(2000.0, -0.2)));

  double sup = 0.0, ss = 0.0;
  for (std::size_t i = 0; i < a.u.size(); ++i) {
    const double e = a.u[i] - trend_eval(cfg.trend, a.cloud.points[i]);
    CHECK(std::abs(a.error[i] - e) <= 1e-11);
    sup = std::max(sup, std::abs(e));
    ss += e * e;
  }
  CHECK(a.sup_error == doctest::Approx(sup));
  CHECK(a.rmse == doctest::Approx(std::sqrt(ss / 2000.0)));
  CHECK(run_experiment(cfg, 6).u != a.u);
}

TEST_CASE("near-noiseless run is bias dominated") {
  auto cfg = small_config();
  cfg.noise = NoiseModel::symmetric(1e-6);
  const auto r = run_experiment(cfg, 1);
  const double bound = r.beta * oracle::pi * oracle::pi + 1e-3;
  CHECK(r.sup_error <= bound);
}

TEST_CASE("asymmetric quartic reports an offset") {
  auto cfg = small_config();
  cfg.loss = LossModel::quartic();
  cfg.noise = NoiseModel::asymmetric(0.3, 0.8);
  const auto r = run_experiment(cfg, 2);
  const double shift = modified_trend(cfg.loss, cfg.noise, 0.0);
  CHECK(r.interior_mean_offset == doctest::Approx(shift).epsilon(1e-9));
  CHECK(r.interior_mean_error_mu < 0.0);
  for (std::size_t i = 0; i < r.mu.size(); ++i) CHECK(r.mu_f[i] - r.mu[i] == doctest::Approx(shift).epsilon(1e-9));
}

TEST_CASE("semi-supervised run") {
  auto cfg = small_config();
  cfg.q = 500;
  const auto r = run_experiment(cfg, 3);
  CHECK(r.q == 500);
  CHECK(r.knn_k == 22);
  CHECK(r.u.size() == 2000);
  CHECK(r.knn_error.size() == 2000);
  CHECK(r.knn_interior_sup_error <= r.knn_sup_error);
}

TEST_CASE("rate study and beta sweep") {
  auto cfg = small_config();
  const auto rows = rate_study(cfg, {500, 1000}, {1, 2, 3});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].n == 500);
  std::vector<double> sups;
  for (std::uint64_t s : {1, 2, 3}) {
    auto c = cfg;
    c.n = 1000;
    sups.push_back(run_experiment(c, s).interior_sup_error);
  }
  CHECK(rows[1].median_interior_sup == doctest::Approx(median(sups)));
  CHECK_THROWS_AS(rate_study(cfg, {1000, 1000}, {1}), Error);

  const auto sweep = beta_sweep(cfg, 0.2, {1e-4, 0.01, 0.05, 3.0}, {1, 2, 3});
  REQUIRE(sweep.size() == 4);
  const auto best = std::min_element(sweep.begin(), sweep.end(),
                                     [](const auto& x, const auto& y) { return x.median_rmse < y.median_rmse; });
  CHECK(best != sweep.begin());
  CHECK(best != sweep.end() - 1);
}

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
}

TEST_CASE("heatmap rendering") {
  const auto dir = scratch_dir("heatmap");
  const auto cloud = sample_cloud(Manifold::UnitSquare, 3000, 4);
  auto write_field = [&](const std::string& name, auto fn) {
    CsvTable t;
    t.header = {"idx", "x1", "x2", "value"};
    for (std::size_t i = 0; i < cloud.size(); ++i)
      t.rows.push_back({std::to_string(i), format_double(cloud.points[i][0]), format_double(cloud.points[i][1]),
                        format_double(fn(cloud.points[i]))});
    write_csv((dir / name).string(), t);
    return (dir / name).string();
  };

  const auto zero = render_heatmap(write_field("zero.csv", [](const Point&) { return 0.0; }), (dir / "zero.ppm").string());
  CHECK(zero.width == 256);
  for (std::size_t k = 3; k < zero.pixels.size(); ++k) CHECK(zero.pixels[k] == zero.pixels[k % 3]);

  const auto grad = render_heatmap(write_field("x1.csv", [](const Point& p) { return p[0]; }), (dir / "x1.ppm").string(), 64);
  std::vector<double> col(64, 0.0);
  for (std::size_t r = 0; r < 64; ++r)
    for (std::size_t c = 0; c < 64; ++c) col[c] += grad.field[r * 64 + c];
  for (std::size_t c = 1; c < 64; ++c) CHECK(col[c] > col[c - 1]);

  std::ifstream ppm(dir / "x1.ppm", std::ios::binary);
  std::string magic;
  std::size_t w = 0, h = 0, depth = 0;
  ppm >> magic >> w >> h >> depth;
  CHECK(magic == "P6");
  CHECK(w == 64);
  CHECK(depth == 255);
  CHECK(fs::file_size(dir / "x1.ppm") == 13 + 3 * 64 * 64);

  const auto report = run_experiment(small_config(500), 1);
  write_csv((dir / "field.csv").string(), error_field_table(report));
  CHECK_NOTHROW(render_heatmap((dir / "field.csv").string(), (dir / "field.ppm").string()));

  CsvTable bad;
  bad.header = {"idx", "x1", "value"};
  bad.rows.push_back({"0", "0.5", "1"});
  write_csv((dir / "bad.csv").string(), bad);
  CHECK_THROWS_AS(render_heatmap((dir / "bad.csv").string(), (dir / "bad.ppm").string()), Error);
  fs::remove_all(dir);
}
