#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lapreg/experiments.hpp"
#include "lapreg/geograph.hpp"
#include "lapreg/manifolds.hpp"
#include "lapreg/semisup.hpp"

namespace lapreg {

// ---- config ----------------------------------------------------------------

// Missing keys take defaults (q = n, paper schedule, quadratic loss, sym:0.3
// noise); unknown keys are rejected.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

// ---- csv -------------------------------------------------------------------

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// 17 significant digits; NaN and infinities are rejected.
std::string format_double(double v);
double parse_double(std::string_view text, std::size_t row, std::string_view column);
std::size_t parse_index(std::string_view text, std::size_t row, std::string_view column);

void write_csv(std::ostream& out, const CsvTable& table);
void write_csv(const std::string& path, const CsvTable& table);
// Rows must match the header width; `expected` (when non-empty) must equal it.
CsvTable read_csv(std::istream& in, const std::vector<std::string>& expected = {});
CsvTable read_csv(const std::string& path, const std::vector<std::string>& expected = {});

// idx,x1..xd,labeled,y,mu
CsvTable dataset_table(const LabeledDataset& ds);
LabeledDataset dataset_from_table(const CsvTable& table, Manifold manifold);

// i,j,dist,w with i < j
struct EdgeRow {
  std::size_t i = 0;
  std::size_t j = 0;
  double dist = 0.0;
  double w = 0.0;
  bool operator==(const EdgeRow&) const = default;
};
std::vector<EdgeRow> edge_rows(const PointCloud& cloud, const GeometricGraph& graph);
CsvTable edges_table(const std::vector<EdgeRow>& rows);
std::vector<EdgeRow> edges_from_table(const CsvTable& table);

// idx,u,residual
struct SolutionRow {
  std::size_t idx = 0;
  double u = 0.0;
  double residual = 0.0;
  bool operator==(const SolutionRow&) const = default;
};
CsvTable solution_table(const std::vector<SolutionRow>& rows);
std::vector<SolutionRow> solution_from_table(const CsvTable& table);

// idx,owner,y_ext
CsvTable extension_table(const VoronoiAssignment& assign);
VoronoiAssignment extension_from_table(const CsvTable& table);

// idx,x1..xd (queries) and idx,x1..xd,prediction
struct PredictionRow {
  std::size_t idx = 0;
  Point x{};
  double prediction = 0.0;
  bool operator==(const PredictionRow&) const = default;
};
CsvTable queries_table(const std::vector<Point>& queries, int dim);
std::vector<Point> queries_from_table(const CsvTable& table);
CsvTable predictions_table(const std::vector<PredictionRow>& rows, int dim);
std::vector<PredictionRow> predictions_from_table(const CsvTable& table);

// n,eps,seed,sup_error,interior_sup_error
struct ConsistencyRow {
  std::size_t n = 0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  double sup_error = 0.0;
  double interior_sup_error = 0.0;
  bool operator==(const ConsistencyRow&) const = default;
};
CsvTable consistency_table(const std::vector<ConsistencyRow>& rows);
std::vector<ConsistencyRow> consistency_from_table(const CsvTable& table);

// beta,grid_n,sup_dev,bound
struct BiasRow {
  double beta = 0.0;
  std::size_t grid_n = 0;
  double sup_dev = 0.0;
  double bound = 0.0;
  bool operator==(const BiasRow&) const = default;
};
CsvTable bias_table(const std::vector<BiasRow>& rows);
std::vector<BiasRow> bias_from_table(const CsvTable& table);

// n,eps,beta,median_sup,median_interior_sup,median_rmse
CsvTable rates_table(const std::vector<RateRow>& rows);
std::vector<RateRow> rates_from_table(const CsvTable& table);

// idx,x1,x2,value,error_mu,u,mu,mu_f[,x3]; value = u - mu_f
CsvTable error_field_table(const ErrorReport& report);

// ---- manifest --------------------------------------------------------------

struct RunManifest {
  std::string config_json;
  std::string version;
  std::vector<std::uint64_t> seeds;
  std::map<std::string, double> stage_seconds;
  std::map<std::string, std::string> outputs;  // file name -> sha256 hex
};

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::string& path);
// Digests every listed output (relative to dir) and writes dir/manifest.json.
void write_manifest(const std::string& dir, RunManifest manifest,
                    const std::vector<std::string>& output_files);
RunManifest read_manifest(const std::string& path);

inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace lapreg
