#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "lapreg/error.hpp"
#include "lapreg/io.hpp"

namespace lapreg {

namespace {

std::string where(std::size_t row, std::string_view column) {
  return "row " + std::to_string(row) + ", column '" + std::string(column) + "'";
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> coord_names(int dim) {
  std::vector<std::string> names;
  for (int k = 1; k <= dim; ++k) names.push_back("x" + std::to_string(k));
  return names;
}

int dim_from_header(const CsvTable& t, std::size_t first_coord) {
  int dim = 0;
  while (first_coord + dim < t.header.size() &&
         t.header[first_coord + dim] == "x" + std::to_string(dim + 1))
    ++dim;
  require(dim == 2 || dim == 3, ErrorKind::MalformedCsv, "expected coordinate columns x1..x2 or x1..x3");
  return dim;
}

void expect_header(const CsvTable& t, const std::vector<std::string>& expected) {
  if (t.header == expected) return;
  std::string want;
  for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
  throw Error(ErrorKind::MalformedCsv, "header must be '" + want + "'");
}

void check_idx(const CsvTable& t, std::size_t r) {
  require(parse_index(t.rows[r][0], r + 1, t.header[0]) == r, ErrorKind::MalformedCsv,
          where(r + 1, t.header[0]) + ": idx must equal the row position");
}

}  // namespace

std::string format_double(double v) {
  require(std::isfinite(v), ErrorKind::ValidationError, "non-finite value cannot be written to CSV");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view text, std::size_t row, std::string_view column) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  require(!text.empty() && ec == std::errc() && ptr == end && std::isfinite(v),
          ErrorKind::MalformedCsv, where(row, column) + ": bad number '" + std::string(text) + "'");
  return v;
}

std::size_t parse_index(std::string_view text, std::size_t row, std::string_view column) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  require(!text.empty() && ec == std::errc() && ptr == end, ErrorKind::MalformedCsv,
          where(row, column) + ": bad index '" + std::string(text) + "'");
  return static_cast<std::size_t>(v);
}

void write_csv(std::ostream& out, const CsvTable& table) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) out << (k ? "," : "") << cells[k];
    out << '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) {
    require(row.size() == table.header.size(), ErrorKind::InvalidArgument,
            "row width differs from header width");
    line(row);
  }
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ostringstream buf;
  write_csv(buf, table);
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::InvalidArgument, "cannot write " + path);
  out << buf.str();
  require(static_cast<bool>(out), ErrorKind::InvalidArgument, "failed writing " + path);
}

CsvTable read_csv(std::istream& in, const std::vector<std::string>& expected) {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  bool saw_blank = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      saw_blank = true;
      continue;
    }
    require(!saw_blank, ErrorKind::MalformedCsv, "blank line before line " + std::to_string(lineno));
    auto cells = split_line(line);
    if (lineno == 1) {
      t.header = std::move(cells);
      continue;
    }
    require(cells.size() == t.header.size(), ErrorKind::MalformedCsv,
            "row " + std::to_string(t.rows.size() + 1) + ": expected " +
                std::to_string(t.header.size()) + " fields, got " + std::to_string(cells.size()));
    t.rows.push_back(std::move(cells));
  }
  require(!t.header.empty(), ErrorKind::MalformedCsv, "missing header");
  if (!expected.empty()) expect_header(t, expected);
  return t;
}

CsvTable read_csv(const std::string& path, const std::vector<std::string>& expected) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::InvalidArgument, "cannot open " + path);
  return read_csv(in, expected);
}

CsvTable dataset_table(const LabeledDataset& ds) {
  const int d = ds.cloud.dim();
  CsvTable t;
  t.header = {"idx"};
  for (auto& c : coord_names(d)) t.header.push_back(c);
  for (const char* c : {"labeled", "y", "mu"}) t.header.emplace_back(c);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    std::vector<std::string> row{std::to_string(i)};
    for (int k = 0; k < d; ++k) row.push_back(format_double(ds.cloud.points[i][k]));
    const bool labeled = i < ds.q;
    row.emplace_back(labeled ? "1" : "0");
    row.push_back(labeled ? format_double(ds.labels[i]) : "");
    row.push_back(format_double(ds.trend_values[i]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

LabeledDataset dataset_from_table(const CsvTable& t, Manifold manifold) {
  const int d = ambient_dim(manifold);
  require(!t.header.empty() && dim_from_header(t, 1) == d, ErrorKind::MalformedCsv,
          "coordinate columns do not match the manifold dimension");
  std::vector<std::string> expected{"idx"};
  for (auto& c : coord_names(d)) expected.push_back(c);
  for (const char* c : {"labeled", "y", "mu"}) expected.emplace_back(c);
  expect_header(t, expected);

  LabeledDataset ds;
  ds.cloud.manifold = manifold;
  bool labeled_prefix = true;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    check_idx(t, r);
    Point p{};
    for (int k = 0; k < d; ++k) p[k] = parse_double(row[1 + k], r + 1, t.header[1 + k]);
    ds.cloud.points.push_back(p);
    const auto& flag = row[1 + d];
    require(flag == "0" || flag == "1", ErrorKind::MalformedCsv, where(r + 1, "labeled") + ": expected 0 or 1");
    if (flag == "1") {
      require(labeled_prefix, ErrorKind::MalformedCsv,
              where(r + 1, "labeled") + ": labeled rows must come first");
      ds.labels.push_back(parse_double(row[2 + d], r + 1, "y"));
    } else {
      labeled_prefix = false;
      require(row[2 + d].empty(), ErrorKind::MalformedCsv, where(r + 1, "y") + ": must be empty when unlabeled");
    }
    ds.trend_values.push_back(parse_double(row[3 + d], r + 1, "mu"));
  }
  ds.q = ds.labels.size();
  return ds;
}

std::vector<EdgeRow> edge_rows(const PointCloud& cloud, const GeometricGraph& graph) {
  require(cloud.size() == graph.size(), ErrorKind::DimensionMismatch, "graph and cloud sizes differ");
  std::vector<EdgeRow> rows;
  for (std::size_t i = 0; i < graph.size(); ++i)
    for (auto e = graph.row_begin(i); e < graph.row_end(i); ++e) {
      const std::size_t j = graph.column(e);
      if (j <= i) continue;
      rows.push_back({i, j, std::sqrt(squared_distance(cloud.manifold, cloud.points[i], cloud.points[j])),
                      graph.weight(e)});
    }
  return rows;
}

CsvTable edges_table(const std::vector<EdgeRow>& rows) {
  CsvTable t{{"i", "j", "dist", "w"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({std::to_string(r.i), std::to_string(r.j), format_double(r.dist), format_double(r.w)});
  return t;
}

std::vector<EdgeRow> edges_from_table(const CsvTable& t) {
  expect_header(t, {"i", "j", "dist", "w"});
  std::vector<EdgeRow> rows;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& c = t.rows[r];
    EdgeRow e{parse_index(c[0], r + 1, "i"), parse_index(c[1], r + 1, "j"),
              parse_double(c[2], r + 1, "dist"), parse_double(c[3], r + 1, "w")};
    require(e.i < e.j, ErrorKind::MalformedCsv, "row " + std::to_string(r + 1) + ": edges need i < j");
    rows.push_back(e);
  }
  return rows;
}

CsvTable solution_table(const std::vector<SolutionRow>& rows) {
  CsvTable t{{"idx", "u", "residual"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({std::to_string(r.idx), format_double(r.u), format_double(r.residual)});
  return t;
}

std::vector<SolutionRow> solution_from_table(const CsvTable& t) {
  expect_header(t, {"idx", "u", "residual"});
  std::vector<SolutionRow> rows;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    check_idx(t, r);
    rows.push_back({r, parse_double(t.rows[r][1], r + 1, "u"), parse_double(t.rows[r][2], r + 1, "residual")});
  }
  return rows;
}

CsvTable extension_table(const VoronoiAssignment& assign) {
  CsvTable t{{"idx", "owner", "y_ext"}, {}};
  for (std::size_t i = 0; i < assign.owner.size(); ++i)
    t.rows.push_back({std::to_string(i), std::to_string(assign.owner[i]), format_double(assign.extended_y[i])});
  return t;
}

VoronoiAssignment extension_from_table(const CsvTable& t) {
  expect_header(t, {"idx", "owner", "y_ext"});
  VoronoiAssignment a;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    check_idx(t, r);
    a.owner.push_back(parse_index(t.rows[r][1], r + 1, "owner"));
    a.extended_y.push_back(parse_double(t.rows[r][2], r + 1, "y_ext"));
  }
  return a;
}

CsvTable queries_table(const std::vector<Point>& queries, int dim) {
  CsvTable t;
  t.header = {"idx"};
  for (auto& c : coord_names(dim)) t.header.push_back(c);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    std::vector<std::string> row{std::to_string(i)};
    for (int k = 0; k < dim; ++k) row.push_back(format_double(queries[i][k]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<Point> queries_from_table(const CsvTable& t) {
  require(!t.header.empty() && t.header[0] == "idx", ErrorKind::MalformedCsv, "first column must be idx");
  const int d = dim_from_header(t, 1);
  require(t.header.size() == static_cast<std::size_t>(1 + d), ErrorKind::MalformedCsv,
          "query CSV has columns idx,x1..xd only");
  std::vector<Point> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    check_idx(t, r);
    Point p{};
    for (int k = 0; k < d; ++k) p[k] = parse_double(t.rows[r][1 + k], r + 1, t.header[1 + k]);
    out.push_back(p);
  }
  return out;
}

CsvTable predictions_table(const std::vector<PredictionRow>& rows, int dim) {
  CsvTable t;
  t.header = {"idx"};
  for (auto& c : coord_names(dim)) t.header.push_back(c);
  t.header.emplace_back("prediction");
  for (const auto& r : rows) {
    std::vector<std::string> row{std::to_string(r.idx)};
    for (int k = 0; k < dim; ++k) row.push_back(format_double(r.x[k]));
    row.push_back(format_double(r.prediction));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<PredictionRow> predictions_from_table(const CsvTable& t) {
  require(!t.header.empty() && t.header[0] == "idx", ErrorKind::MalformedCsv, "first column must be idx");
  const int d = dim_from_header(t, 1);
  require(t.header.size() == static_cast<std::size_t>(2 + d) && t.header.back() == "prediction",
          ErrorKind::MalformedCsv, "prediction CSV has columns idx,x1..xd,prediction");
  std::vector<PredictionRow> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    check_idx(t, r);
    PredictionRow p;
    p.idx = r;
    for (int k = 0; k < d; ++k) p.x[k] = parse_double(t.rows[r][1 + k], r + 1, t.header[1 + k]);
    p.prediction = parse_double(t.rows[r][1 + d], r + 1, "prediction");
    out.push_back(p);
  }
  return out;
}

CsvTable consistency_table(const std::vector<ConsistencyRow>& rows) {
  CsvTable t{{"n", "eps", "seed", "sup_error", "interior_sup_error"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({std::to_string(r.n), format_double(r.eps), std::to_string(r.seed),
                      format_double(r.sup_error), format_double(r.interior_sup_error)});
  return t;
}

std::vector<ConsistencyRow> consistency_from_table(const CsvTable& t) {
  expect_header(t, {"n", "eps", "seed", "sup_error", "interior_sup_error"});
  std::vector<ConsistencyRow> rows;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& c = t.rows[r];
    rows.push_back({parse_index(c[0], r + 1, "n"), parse_double(c[1], r + 1, "eps"),
                    parse_index(c[2], r + 1, "seed"), parse_double(c[3], r + 1, "sup_error"),
                    parse_double(c[4], r + 1, "interior_sup_error")});
  }
  return rows;
}

CsvTable bias_table(const std::vector<BiasRow>& rows) {
  CsvTable t{{"beta", "grid_n", "sup_dev", "bound"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({format_double(r.beta), std::to_string(r.grid_n), format_double(r.sup_dev),
                      format_double(r.bound)});
  return t;
}

std::vector<BiasRow> bias_from_table(const CsvTable& t) {
  expect_header(t, {"beta", "grid_n", "sup_dev", "bound"});
  std::vector<BiasRow> rows;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& c = t.rows[r];
    rows.push_back({parse_double(c[0], r + 1, "beta"), parse_index(c[1], r + 1, "grid_n"),
                    parse_double(c[2], r + 1, "sup_dev"), parse_double(c[3], r + 1, "bound")});
  }
  return rows;
}

CsvTable rates_table(const std::vector<RateRow>& rows) {
  CsvTable t{{"n", "eps", "beta", "median_sup", "median_interior_sup", "median_rmse"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({std::to_string(r.n), format_double(r.eps), format_double(r.beta),
                      format_double(r.median_sup), format_double(r.median_interior_sup),
                      format_double(r.median_rmse)});
  return t;
}

std::vector<RateRow> rates_from_table(const CsvTable& t) {
  expect_header(t, {"n", "eps", "beta", "median_sup", "median_interior_sup", "median_rmse"});
  std::vector<RateRow> rows;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& c = t.rows[r];
    rows.push_back({parse_index(c[0], r + 1, "n"), parse_double(c[1], r + 1, "eps"),
                    parse_double(c[2], r + 1, "beta"), parse_double(c[3], r + 1, "median_sup"),
                    parse_double(c[4], r + 1, "median_interior_sup"),
                    parse_double(c[5], r + 1, "median_rmse")});
  }
  return rows;
}

CsvTable error_field_table(const ErrorReport& rep) {
  const bool sphere = rep.cloud.dim() == 3;
  CsvTable t{{"idx", "x1", "x2", "value", "error_mu", "u", "mu", "mu_f"}, {}};
  if (sphere) t.header.emplace_back("x3");
  for (std::size_t i = 0; i < rep.u.size(); ++i) {
    const auto& p = rep.cloud.points[i];
    std::vector<std::string> row{std::to_string(i), format_double(p[0]), format_double(p[1]),
                                 format_double(rep.error[i]), format_double(rep.error_mu[i]),
                                 format_double(rep.u[i]), format_double(rep.mu[i]),
                                 format_double(rep.mu_f[i])};
    if (sphere) row.push_back(format_double(p[2]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace lapreg
