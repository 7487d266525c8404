#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lapreg/error.hpp"
#include "lapreg/io.hpp"

namespace lapreg {

using nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& msg) {
  throw Error(ErrorKind::ParseError, "field '" + field + "': " + msg);
}

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& known) {
  for (const auto& item : obj.items())
    if (!known.count(item.key()))
      field_error(where.empty() ? item.key() : where + "." + item.key(), "unknown key");
}

double get_real(const json& j, const std::string& field) {
  if (!j.is_number()) field_error(field, "expected a number");
  return j.get<double>();
}

std::uint64_t get_count(const json& j, const std::string& field) {
  if (!j.is_number_unsigned()) field_error(field, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

const std::string& get_string(const json& j, const std::string& field) {
  if (!j.is_string()) field_error(field, "expected a string");
  return j.get_ref<const std::string&>();
}

template <typename Fn>
auto with_field(const std::string& field, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ParseError) throw;
    field_error(field, e.what());
  }
}

Trend parse_trend(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "paper_sine") return Trend::paper_sine();
    field_error("trend", "unknown trend '" + j.get<std::string>() + "'");
  }
  if (!j.is_object()) field_error("trend", "expected a string or an object");
  if (!j.contains("kind")) field_error("trend.kind", "missing");
  const auto& kind = get_string(j.at("kind"), "trend.kind");
  if (kind == "paper_sine") {
    reject_unknown(j, "trend", {"kind"});
    return Trend::paper_sine();
  }
  if (kind == "constant") {
    reject_unknown(j, "trend", {"kind", "value"});
    if (!j.contains("value")) field_error("trend.value", "missing");
    return Trend::constant_value(get_real(j.at("value"), "trend.value"));
  }
  if (kind == "sum_of_sines") {
    reject_unknown(j, "trend", {"kind", "modes"});
    if (!j.contains("modes") || !j.at("modes").is_array()) field_error("trend.modes", "expected an array");
    std::vector<SineMode> modes;
    for (std::size_t k = 0; k < j.at("modes").size(); ++k) {
      const auto& m = j.at("modes")[k];
      const std::string where = "trend.modes[" + std::to_string(k) + "]";
      if (!m.is_object()) field_error(where, "expected an object");
      reject_unknown(m, where, {"coefficient", "frequency"});
      SineMode mode;
      if (m.contains("coefficient")) mode.coefficient = get_real(m.at("coefficient"), where + ".coefficient");
      if (!m.contains("frequency") || !m.at("frequency").is_array() || m.at("frequency").size() < 1 ||
          m.at("frequency").size() > 3)
        field_error(where + ".frequency", "expected an array of 1 to 3 numbers");
      for (std::size_t c = 0; c < m.at("frequency").size(); ++c)
        mode.frequency[c] = get_real(m.at("frequency")[c], where + ".frequency");
      modes.push_back(mode);
    }
    return Trend::sum_of_sines(std::move(modes));
  }
  field_error("trend.kind", "unknown kind '" + kind + "'");
}

json trend_json(const Trend& t) {
  switch (t.kind) {
    case Trend::Kind::PaperSine: return "paper_sine";
    case Trend::Kind::Constant: return {{"kind", "constant"}, {"value", t.constant}};
    case Trend::Kind::SumOfSines: {
      json modes = json::array();
      for (const auto& m : t.modes)
        modes.push_back({{"coefficient", m.coefficient},
                         {"frequency", {m.frequency[0], m.frequency[1], m.frequency[2]}}});
      return {{"kind", "sum_of_sines"}, {"modes", modes}};
    }
  }
  return "paper_sine";
}

Schedule parse_schedule(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "paper") return Schedule::paper();
    field_error("schedule", "unknown schedule '" + j.get<std::string>() + "'");
  }
  if (!j.is_object()) field_error("schedule", "expected \"paper\" or an object");
  reject_unknown(j, "schedule", {"kind", "eps", "beta"});
  const auto kind = j.contains("kind") ? get_string(j.at("kind"), "schedule.kind") : "explicit";
  if (kind == "paper") return Schedule::paper();
  if (kind != "explicit") field_error("schedule.kind", "unknown kind '" + kind + "'");
  if (!j.contains("eps")) field_error("schedule.eps", "missing");
  if (!j.contains("beta")) field_error("schedule.beta", "missing");
  return Schedule::explicit_values(get_real(j.at("eps"), "schedule.eps"),
                                   get_real(j.at("beta"), "schedule.beta"));
}

SolverConfig parse_solver(const json& j) {
  if (!j.is_object()) field_error("solver", "expected an object");
  reject_unknown(j, "solver", {"newton_tol", "newton_max_iter", "cg_tol", "cg_max_iter", "damping",
                               "min_step", "jacobian_floor"});
  SolverConfig s;
  if (j.contains("newton_tol")) s.newton_tol = get_real(j.at("newton_tol"), "solver.newton_tol");
  if (j.contains("newton_max_iter")) s.newton_max_iter = get_count(j.at("newton_max_iter"), "solver.newton_max_iter");
  if (j.contains("cg_tol")) s.cg_tol = get_real(j.at("cg_tol"), "solver.cg_tol");
  if (j.contains("cg_max_iter")) s.cg_max_iter = get_count(j.at("cg_max_iter"), "solver.cg_max_iter");
  if (j.contains("damping")) s.damping = get_real(j.at("damping"), "solver.damping");
  if (j.contains("min_step")) s.min_step = get_real(j.at("min_step"), "solver.min_step");
  if (j.contains("jacobian_floor")) s.jacobian_floor = get_real(j.at("jacobian_floor"), "solver.jacobian_floor");
  return s;
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k)
    if (text[k] == '\n') ++line;
  return line;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError,
                "line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::ParseError, "line 1: config must be a JSON object");
  reject_unknown(doc, "", {"manifold", "trend", "noise", "loss", "kernel", "n", "q", "schedule",
                           "seeds", "output_dir", "knn_k", "solver"});

  ExperimentConfig cfg;
  if (doc.contains("manifold"))
    cfg.manifold = with_field("manifold", [&] { return parse_manifold(get_string(doc["manifold"], "manifold")); });
  if (doc.contains("trend")) cfg.trend = parse_trend(doc["trend"]);
  if (doc.contains("noise"))
    cfg.noise = with_field("noise", [&] { return parse_noise(get_string(doc["noise"], "noise")); });
  if (doc.contains("loss"))
    cfg.loss = with_field("loss", [&] { return parse_loss(get_string(doc["loss"], "loss")); });
  if (doc.contains("kernel"))
    cfg.kernel = with_field("kernel", [&] { return parse_kernel(get_string(doc["kernel"], "kernel")); });
  if (doc.contains("n")) cfg.n = get_count(doc["n"], "n");
  if (doc.contains("q")) cfg.q = get_count(doc["q"], "q");
  if (doc.contains("schedule")) cfg.schedule = parse_schedule(doc["schedule"]);
  if (doc.contains("seeds")) {
    const auto& s = doc["seeds"];
    if (!s.is_array()) field_error("seeds", "expected an array of non-negative integers");
    cfg.seeds.clear();
    for (const auto& v : s) cfg.seeds.push_back(get_count(v, "seeds"));
  }
  if (doc.contains("output_dir")) cfg.output_dir = get_string(doc["output_dir"], "output_dir");
  if (doc.contains("knn_k")) cfg.knn_k = get_count(doc["knn_k"], "knn_k");
  if (doc.contains("solver")) cfg.solver = parse_solver(doc["solver"]);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::ValidationError, "cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  json doc;
  doc["manifold"] = std::string(to_string(cfg.manifold));
  doc["trend"] = trend_json(cfg.trend);
  doc["noise"] = to_string(cfg.noise);
  doc["loss"] = to_string(cfg.loss);
  doc["kernel"] = std::string(to_string(cfg.kernel));
  doc["n"] = cfg.n;
  doc["q"] = cfg.q;
  if (cfg.schedule.kind == Schedule::Kind::Paper)
    doc["schedule"] = "paper";
  else
    doc["schedule"] = {{"kind", "explicit"}, {"eps", cfg.schedule.eps}, {"beta", cfg.schedule.beta}};
  doc["seeds"] = cfg.seeds;
  doc["output_dir"] = cfg.output_dir;
  doc["knn_k"] = cfg.knn_k;
  const auto& s = cfg.solver;
  doc["solver"] = {{"newton_tol", s.newton_tol}, {"newton_max_iter", s.newton_max_iter},
                   {"cg_tol", s.cg_tol},         {"cg_max_iter", s.cg_max_iter},
                   {"damping", s.damping},       {"min_step", s.min_step},
                   {"jacobian_floor", s.jacobian_floor}};
  return doc.dump(2);
}

}  // namespace lapreg
