// lapreg: command line front end.
//
// Exit codes: 0 success, 2 invalid input (bad flags, config, CSV), 3 solver
// did not converge (outputs are still written).
//
// --beta is the coefficient of the graph PDE  beta L u + f(u - y) = 0.  The
// variational weight b of  b R(u) + (1/n) sum F(u_i - y_i)  maps to beta = 4 b;
// pass --variational-beta to give b instead.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lapreg/error.hpp"
#include "lapreg/experiments.hpp"
#include "lapreg/io.hpp"
#include "lapreg/rng.hpp"
#include "lapreg/semisup.hpp"
#include "lapreg/solver.hpp"
#include "lapreg/validate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lapreg;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitNotConverged = 3;

struct Options {
  std::uint64_t seed = 1;
  bool seed_set = false;
  std::string out;
  std::string config;

  std::string in;
  std::string manifold = "unit_square";
  std::string trend = "paper_sine";
  std::string noise = "sym:0.3";
  std::string loss = "quadratic";
  std::string kernel = "bump";
  std::size_t n = 1000;
  std::size_t q = 0;
  std::optional<double> eps;
  std::optional<double> beta;
  std::optional<double> variational_beta;
  std::size_t grid = 128;
  std::size_t seeds = 1;
  std::size_t size = 256;
  std::vector<std::size_t> n_list;
  std::vector<double> beta_list;
  std::string points;
  std::string edges;
  std::string solution;
};

Trend parse_trend_flag(const std::string& s) {
  if (s == "paper_sine") return Trend::paper_sine();
  if (s == "torus_sine") return Trend::sum_of_sines({{0.5, {1.0, 0.0, 0.0}}, {0.5, {0.0, 1.0, 0.0}}});
  if (s.rfind("constant:", 0) == 0) {
    try {
      return Trend::constant_value(std::stod(s.substr(9)));
    } catch (const std::exception&) {
    }
  }
  throw Error(ErrorKind::ValidationError, "unknown trend '" + s + "' (paper_sine, torus_sine, constant:<c>)");
}

double pde_beta_from(const Options& o, double fallback) {
  if (o.variational_beta) return pde_beta(*o.variational_beta);
  return o.beta.value_or(fallback);
}

// Output file path, defaulting to name inside the current directory.
fs::path output_file(const Options& o, const std::string& name) {
  fs::path p = o.out.empty() ? fs::path(name) : fs::path(o.out);
  if (fs::is_directory(p)) p /= name;
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p;
}

void finish(const fs::path& file, const json& echo, std::vector<std::uint64_t> seeds,
            std::map<std::string, double> stages = {}) {
  const fs::path dir = file.has_parent_path() ? file.parent_path() : fs::path(".");
  RunManifest m;
  m.config_json = echo.dump();
  m.seeds = std::move(seeds);
  m.stage_seconds = std::move(stages);
  write_manifest(dir.string(), m, {file.filename().string()});
  std::cout << "wrote " << file.string() << '\n';
}

Manifold manifold_for_table(const CsvTable& t, const Options& o) {
  for (const auto& h : t.header)
    if (h == "x3") return Manifold::Sphere;
  return parse_manifold(o.manifold);
}

ExperimentConfig base_config(const Options& o, const CLI::App& sub) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (o.config.empty() || sub.count("--manifold")) cfg.manifold = parse_manifold(o.manifold);
  if (o.config.empty() || sub.count("--trend")) cfg.trend = parse_trend_flag(o.trend);
  if (o.config.empty() || sub.count("--noise")) cfg.noise = parse_noise(o.noise);
  if (o.config.empty() || sub.count("--loss")) cfg.loss = parse_loss(o.loss);
  if (o.config.empty() || sub.count("--kernel")) cfg.kernel = parse_kernel(o.kernel);
  if (o.config.empty() || sub.count("--n")) cfg.n = o.n;
  if (o.config.empty() || sub.count("--q")) cfg.q = o.q;
  if (o.eps || o.beta || o.variational_beta) {
    const double n = static_cast<double>(cfg.n);
    cfg.schedule = Schedule::explicit_values(o.eps.value_or(cfg.schedule.eps_for(cfg.n)),
                                             pde_beta_from(o, cfg.schedule.beta_for(static_cast<std::size_t>(n))));
  }
  if (o.seed_set) cfg.seeds = {o.seed};
  cfg.validate();
  return cfg;
}

int cmd_generate(const Options& o, const CLI::App& sub) {
  const auto cfg = base_config(o, sub);
  const auto seed = cfg.seeds.front();
  const auto cloud = sample_cloud(cfg.manifold, cfg.n, derive_seed(seed, 0));
  const auto ds = make_dataset(cloud, cfg.trend, cfg.noise, cfg.labeled(), derive_seed(seed, 1));
  const auto file = output_file(o, "dataset.csv");
  write_csv(file.string(), dataset_table(ds));
  finish(file, json::parse(serialize_config(cfg)), {seed});
  return 0;
}

int cmd_solve(const Options& o) {
  const auto table = read_csv(o.in);
  const auto manifold = manifold_for_table(table, o);
  const auto ds = dataset_from_table(table, manifold);
  const std::size_t n = ds.size();
  const double eps = o.eps.value_or(std::pow(static_cast<double>(n), -0.2));
  const double beta = pde_beta_from(o, std::pow(static_cast<double>(n), -0.2));
  const auto loss = parse_loss(o.loss);

  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> y = ds.q < n ? voronoi_extend(ds).extended_y : ds.labels;
  const auto graph = build_graph(ds.cloud, eps, {parse_kernel(o.kernel), intrinsic_dim(manifold)});
  const auto rep = solve_semilinear(graph, y, beta, loss);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const auto r = residual(graph, rep.u, y, beta, loss);
  std::vector<SolutionRow> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = {i, rep.u[i], r[i]};
  const auto file = output_file(o, "solution.csv");
  write_csv(file.string(), solution_table(rows));
  if (!o.edges.empty()) write_csv(o.edges, edges_table(edge_rows(ds.cloud, graph)));
  finish(file,
         {{"command", "solve"}, {"in", o.in}, {"manifold", std::string(to_string(manifold))}, {"eps", eps},
          {"beta", beta}, {"variational_beta", variational_beta(beta)}, {"loss", to_string(loss)},
          {"kernel", o.kernel}},
         {}, {{"solve", secs}});
  std::cout << "newton iterations " << rep.newton_iters << ", cg iterations " << rep.cg_iters_total << ", status "
            << to_string(rep.status) << '\n';
  return rep.converged ? 0 : kExitNotConverged;
}

int cmd_extend(const Options& o) {
  const auto table = read_csv(o.in);
  const auto manifold = manifold_for_table(table, o);
  const auto assign = voronoi_extend(dataset_from_table(table, manifold));
  const auto file = output_file(o, "extension.csv");
  write_csv(file.string(), extension_table(assign));
  finish(file, {{"command", "extend"}, {"in", o.in}, {"manifold", std::string(to_string(manifold))}}, {});
  return 0;
}

int cmd_predict(const Options& o) {
  const auto table = read_csv(o.points);
  const auto manifold = manifold_for_table(table, o);
  const auto ds = dataset_from_table(table, manifold);
  const auto sol = solution_from_table(read_csv(o.solution));
  require(sol.size() == ds.size(), ErrorKind::DimensionMismatch, "solution and points have different lengths");
  std::vector<double> u(sol.size());
  for (std::size_t i = 0; i < sol.size(); ++i) u[i] = sol[i].u;
  const auto queries = queries_from_table(read_csv(o.in));
  const auto pred = out_of_sample(ds.cloud, u, queries);
  std::vector<PredictionRow> rows(queries.size());
  for (std::size_t k = 0; k < queries.size(); ++k) rows[k] = {k, queries[k], pred[k]};
  const auto file = output_file(o, "predictions.csv");
  write_csv(file.string(), predictions_table(rows, ds.cloud.dim()));
  finish(file, {{"command", "predict"}, {"in", o.in}, {"points", o.points}, {"solution", o.solution}}, {});
  return 0;
}

int cmd_consistency(const Options& o, const CLI::App& sub) {
  const auto manifold = sub.count("--manifold") ? parse_manifold(o.manifold) : Manifold::FlatTorus;
  const Trend trend = manifold == Manifold::UnitSquare && !sub.count("--trend")
                          ? Trend::paper_sine()
                          : (sub.count("--trend") ? parse_trend_flag(o.trend)
                                                  : Trend::sum_of_sines({{1.0, {1.0, 0.0, 0.0}}}));
  const Kernel kernel{parse_kernel(o.kernel), intrinsic_dim(manifold)};
  const auto n_list = o.n_list.empty() ? std::vector<std::size_t>{2000, 8000, 32000} : o.n_list;
  std::vector<ConsistencyRow> rows;
  std::vector<std::uint64_t> seeds;
  for (std::size_t s = 0; s < o.seeds; ++s) seeds.push_back(o.seed + s);
  for (auto n : n_list) {
    const double nd = static_cast<double>(n);
    const double eps = o.eps.value_or(std::pow(std::log(nd) / nd, 1.0 / (intrinsic_dim(manifold) + 2)));
    for (auto s : seeds) {
      const auto rep = pointwise_consistency(sample_cloud(manifold, n, s), eps, kernel, trend);
      rows.push_back({n, eps, s, rep.sup_error, rep.interior_sup_error});
    }
  }
  const auto file = output_file(o, "consistency.csv");
  write_csv(file.string(), consistency_table(rows));
  finish(file,
         {{"command", "consistency"}, {"manifold", std::string(to_string(manifold))}, {"kernel", o.kernel},
          {"n", n_list}},
         seeds);
  return 0;
}

int cmd_bias(const Options& o, const CLI::App& sub) {
  const Trend trend = sub.count("--trend") ? parse_trend_flag(o.trend)
                                           : Trend::sum_of_sines({{0.5, {1.0, 0.0, 0.0}}, {0.5, {0.0, 1.0, 0.0}}});
  const auto loss = sub.count("--loss") ? parse_loss(o.loss) : LossModel::quartic();
  const auto noise = sub.count("--noise") ? parse_noise(o.noise) : NoiseModel::asymmetric(0.3, 0.8);
  std::vector<double> betas = o.beta_list;
  if (betas.empty()) {
    if (o.beta || o.variational_beta) betas = {pde_beta_from(o, 0.0)};
    else betas = {0.05, 0.025, 0.0125};
  }
  std::vector<BiasRow> rows;
  bool converged = true;
  for (double b : betas) {
    const auto sol = continuum_solve(trend, noise, loss, b, o.grid);
    converged = converged && sol.status == SolveStatus::Converged;
    const auto chk = bias_check(sol, trend, loss, noise);
    rows.push_back({b, o.grid, chk.sup_dev, chk.bound});
  }
  const auto file = output_file(o, "bias.csv");
  write_csv(file.string(), bias_table(rows));
  finish(file, {{"command", "bias"}, {"loss", to_string(loss)}, {"noise", to_string(noise)}, {"grid", o.grid},
                {"beta", betas}},
         {});
  return converged ? 0 : kExitNotConverged;
}

int cmd_experiment(const Options& o, const CLI::App& sub) {
  const auto cfg = base_config(o, sub);
  const fs::path dir = o.out.empty() ? fs::path(cfg.output_dir) : fs::path(o.out);
  fs::create_directories(dir);
  CsvTable summary;
  summary.header = {"seed", "n", "q", "eps", "beta", "sup_error", "interior_sup_error", "rmse", "interior_rmse",
                    "sup_error_mu", "interior_sup_error_mu", "interior_mean_error_mu", "interior_mean_offset",
                    "knn_k", "knn_sup_error", "knn_interior_sup_error", "knn_rmse", "newton_iters", "cg_iters",
                    "status"};
  std::vector<std::string> outputs;
  std::map<std::string, double> stages;
  bool converged = true;
  for (auto seed : cfg.seeds) {
    const auto rep = run_experiment(cfg, seed);
    converged = converged && rep.converged;
    const std::string name = "error_field_seed" + std::to_string(seed) + ".csv";
    write_csv((dir / name).string(), error_field_table(rep));
    outputs.push_back(name);
    summary.rows.push_back({std::to_string(seed), std::to_string(rep.n), std::to_string(rep.q),
                            format_double(rep.eps), format_double(rep.beta), format_double(rep.sup_error),
                            format_double(rep.interior_sup_error), format_double(rep.rmse),
                            format_double(rep.interior_rmse), format_double(rep.sup_error_mu),
                            format_double(rep.interior_sup_error_mu), format_double(rep.interior_mean_error_mu),
                            format_double(rep.interior_mean_offset), std::to_string(rep.knn_k),
                            format_double(rep.knn_sup_error), format_double(rep.knn_interior_sup_error),
                            format_double(rep.knn_rmse), std::to_string(rep.newton_iters),
                            std::to_string(rep.cg_iters), std::string(to_string(rep.status))});
    stages["sample"] += rep.times.sample;
    stages["label"] += rep.times.label;
    stages["extend"] += rep.times.extend;
    stages["graph"] += rep.times.graph;
    stages["solve"] += rep.times.solve;
    stages["evaluate"] += rep.times.evaluate;
    std::printf("seed %llu: interior sup |u - mu_f| %.4f, rmse %.4f, knn interior sup %.4f, %s\n",
                static_cast<unsigned long long>(seed), rep.interior_sup_error, rep.rmse,
                rep.knn_interior_sup_error, std::string(to_string(rep.status)).c_str());
  }
  write_csv((dir / "summary.csv").string(), summary);
  outputs.push_back("summary.csv");
  RunManifest m;
  m.config_json = serialize_config(cfg);
  m.seeds = cfg.seeds;
  m.stage_seconds = stages;
  write_manifest(dir.string(), m, outputs);
  std::cout << "wrote " << outputs.size() << " files to " << dir.string() << '\n';
  return converged ? 0 : kExitNotConverged;
}

int cmd_rates(const Options& o, const CLI::App& sub) {
  auto cfg = base_config(o, sub);
  std::vector<std::uint64_t> seeds;
  for (std::size_t s = 0; s < o.seeds; ++s) seeds.push_back(cfg.seeds.front() + s);
  const auto n_list = o.n_list.empty() ? std::vector<std::size_t>{1000, 4000, 16000} : o.n_list;
  const auto rows = rate_study(cfg, n_list, seeds);
  const auto file = output_file(o, "rates.csv");
  write_csv(file.string(), rates_table(rows));
  finish(file, json::parse(serialize_config(cfg)), seeds);
  return 0;
}

int cmd_heatmap(const Options& o) {
  const auto file = output_file(o, "heatmap.ppm");
  const auto img = render_heatmap(o.in, file.string(), o.size);
  std::printf("range [%.6g, %.6g]\n", img.lo, img.hi);
  finish(file, {{"command", "heatmap"}, {"in", o.in}, {"size", o.size}}, {});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph Laplacian regularized regression on point clouds"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--seed", o.seed, "Base seed (overrides config seeds)")
      ->each([&](const std::string&) { o.seed_set = true; });
  app.add_option("--out", o.out, "Output file, or directory for 'experiment'");
  app.add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);

  auto model_flags = [&](CLI::App* s) {
    s->add_option("--manifold", o.manifold, "unit_square, flat_torus or sphere");
    s->add_option("--trend", o.trend, "paper_sine, torus_sine or constant:<c>");
    s->add_option("--noise", o.noise, "sym:<sigma>, asym:<sigma>[:<p_plus>] or uniform:<sigma>");
    s->add_option("--loss", o.loss, "quadratic, quartic or quadquartic:<a>,<b>");
    s->add_option("--kernel", o.kernel, "bump or indicator");
    s->add_option("--n", o.n, "Number of samples");
    s->add_option("--q", o.q, "Number of labeled samples (0 means n)");
  };
  auto schedule_flags = [&](CLI::App* s) {
    s->add_option("--eps", o.eps, "Graph length scale");
    auto b = s->add_option("--beta", o.beta, "PDE regularization beta (= 4 x variational weight)");
    s->add_option("--variational-beta", o.variational_beta, "Variational weight b; beta = 4 b")->excludes(b);
  };

  auto gen = app.add_subcommand("generate", "Sample a labeled dataset (idx,x1..xd,labeled,y,mu)");
  model_flags(gen);

  auto solve = app.add_subcommand("solve", "Solve the graph PDE on a dataset CSV (idx,u,residual)");
  solve->add_option("--in", o.in, "Dataset CSV")->required()->check(CLI::ExistingFile);
  solve->add_option("--manifold", o.manifold, "Metric for 2-D datasets: unit_square or flat_torus");
  solve->add_option("--loss", o.loss, "quadratic, quartic or quadquartic:<a>,<b>");
  solve->add_option("--kernel", o.kernel, "bump or indicator");
  solve->add_option("--edges", o.edges, "Also write the graph as i,j,dist,w (i < j)");
  schedule_flags(solve);

  auto extend = app.add_subcommand("extend", "Voronoi extension of the labels (idx,owner,y_ext)");
  extend->add_option("--in", o.in, "Dataset CSV")->required()->check(CLI::ExistingFile);
  extend->add_option("--manifold", o.manifold, "Metric for 2-D datasets: unit_square or flat_torus");

  auto predict = app.add_subcommand("predict", "1-NN out-of-sample prediction (idx,x1..xd,prediction)");
  predict->add_option("--in", o.in, "Query CSV (idx,x1..xd)")->required()->check(CLI::ExistingFile);
  predict->add_option("--points", o.points, "Dataset CSV the solution belongs to")->required()->check(CLI::ExistingFile);
  predict->add_option("--solution", o.solution, "Solution CSV from 'solve'")->required()->check(CLI::ExistingFile);
  predict->add_option("--manifold", o.manifold, "Metric for 2-D datasets: unit_square or flat_torus");

  auto cons = app.add_subcommand("consistency", "Pointwise graph Laplacian error (n,eps,seed,sup_error,...)");
  cons->add_option("--manifold", o.manifold, "Default flat_torus");
  cons->add_option("--trend", o.trend, "Test function; default sin(2 pi x1) on the torus");
  cons->add_option("--kernel", o.kernel, "bump or indicator");
  cons->add_option("--n", o.n_list, "Sample sizes")->delimiter(',');
  cons->add_option("--seeds", o.seeds, "Seeds per n, counting up from --seed");
  cons->add_option("--eps", o.eps, "Fixed eps; default (log n / n)^(1/(m+2))");

  auto bias = app.add_subcommand("bias", "Continuum torus bias check (beta,grid_n,sup_dev,bound)");
  bias->add_option("--trend", o.trend, "Default torus_sine");
  bias->add_option("--loss", o.loss, "Default quartic");
  bias->add_option("--noise", o.noise, "Default asym:0.3:0.8");
  bias->add_option("--grid", o.grid, "Grid points per side (power of two >= 64)");
  auto bl = bias->add_option("--betas", o.beta_list, "PDE betas")->delimiter(',');
  auto bb = bias->add_option("--beta", o.beta, "Single PDE beta")->excludes(bl);
  bias->add_option("--variational-beta", o.variational_beta, "Variational weight b; beta = 4 b")->excludes(bl)->excludes(bb);

  auto exp = app.add_subcommand("experiment", "Full pipeline with error fields, summary and manifest");
  model_flags(exp);
  schedule_flags(exp);

  auto rates = app.add_subcommand("rates", "Median errors along n (n,eps,beta,median_sup,...)");
  model_flags(rates);
  rates->remove_option(rates->get_option("--n"));
  rates->add_option("--n", o.n_list, "Increasing sample sizes")->delimiter(',');
  rates->add_option("--seeds", o.seeds, "Seeds per n, counting up from --seed");

  auto heat = app.add_subcommand("heatmap", "Render an idx,x1,x2,value CSV as a PPM image");
  heat->add_option("--in", o.in, "Error field CSV")->required()->check(CLI::ExistingFile);
  heat->add_option("--size", o.size, "Image side in pixels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*gen) return cmd_generate(o, *gen);
    if (*solve) return cmd_solve(o);
    if (*extend) return cmd_extend(o);
    if (*predict) return cmd_predict(o);
    if (*cons) return cmd_consistency(o, *cons);
    if (*bias) return cmd_bias(o, *bias);
    if (*exp) return cmd_experiment(o, *exp);
    if (*rates) {
      if (o.n_list.empty()) o.n = 1000;
      else o.n = o.n_list.front();
      return cmd_rates(o, *rates);
    }
    if (*heat) return cmd_heatmap(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}
