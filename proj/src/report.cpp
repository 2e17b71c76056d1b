#include "dsn/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dsn {

using nlohmann::json;

bool SolveSummary::operator==(const SolveSummary& o) const {
  return norms == o.norms && solve.residual_norm == o.solve.residual_norm &&
         solve.iterations == o.solve.iterations && solve.wall_time == o.solve.wall_time &&
         solve.method == o.solve.method && forcing_norm == o.forcing_norm &&
         norm_convention == o.norm_convention && divergence_warning == o.divergence_warning;
}

namespace {

json rect_json(const Rect& r) { return json::array({r.x0, r.x1, r.y0, r.y1}); }

json field_json(const FieldSpec& f) {
  json j{{"type", f.type}, {"amplitude", f.amplitude}, {"value", f.value}, {"kx", f.kx},
         {"ky", f.ky},     {"cx", f.cx},               {"cy", f.cy},       {"rx", f.rx},
         {"ry", f.ry}};
  j["power"] = f.power ? json(*f.power) : json(nullptr);
  j["support"] = f.support ? rect_json(*f.support) : json(nullptr);
  return j;
}

// JSON has no non-finite numbers; those are written as strings.
json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double num_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  throw std::invalid_argument("bad number '" + s + "'");
}

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::vector<double> nums_from(const json& j) {
  std::vector<double> v;
  for (const json& x : j) v.push_back(num_from(x));
  return v;
}

json series(const std::map<std::string, std::vector<double>>& m) {
  json o = json::object();
  for (const auto& [k, v] : m) o[k] = nums(v);
  return o;
}

std::map<std::string, std::vector<double>> series_from(const json& j) {
  std::map<std::string, std::vector<double>> m;
  for (const auto& [k, v] : j.items()) m[k] = nums_from(v);
  return m;
}

template <typename T>
std::optional<T> opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

json to_json(const RunConfig& c) {
  const StudyConfig& s = c.study;
  const StudyThresholds& t = s.thresholds;
  const GameConfig& g = c.game;
  json j;
  j["command"] = to_string(c.command);
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  j["output_dir"] = c.output_dir;
  j["grid"] = {{"nx", c.nx}, {"ny", c.ny}, {"alpha", c.alpha}};
  j["scheme"] = to_string(c.scheme);
  j["theta"] = c.theta;
  j["tol"] = c.tol;
  j["norm_convention"] = to_string(c.convention);
  j["forcing"] = field_json(c.forcing);
  j["verify"] = {{"manufactured", to_string(c.verify_manufactured)},
                 {"test_functions", c.verify_test_functions}};
  j["study"] = {{"kind", to_string(s.kind)},
                {"levels", s.levels},
                {"manufactured", to_string(s.manufactured)},
                {"samples", s.samples},
                {"q", s.qs},
                {"exponents", s.exponents},
                {"p", s.p},
                {"min_radius", s.min_radius},
                {"energy_growth", t.energy_growth},
                {"inclusion_plateau", t.inclusion_plateau},
                {"inclusion_from_level", t.inclusion_from_level},
                {"upwind_order", t.upwind_order},
                {"centered_order", t.centered_order},
                {"embedding_growth", t.embedding_growth},
                {"coercivity_safety", t.coercivity_safety}};
  j["game"] = {{"omega", rect_json(g.omega)},
               {"omega1", rect_json(g.omega1)},
               {"omega2", rect_json(g.omega2)},
               {"G1", rect_json(g.g1)},
               {"G2", rect_json(g.g2)},
               {"leader", field_json(g.leader)},
               {"yd1", field_json(g.yd1)},
               {"yd2", field_json(g.yd2)},
               {"M1", g.m1},
               {"M2", g.m2},
               {"br_tol", g.br_tol},
               {"br_max_iters", g.br_max_iters},
               {"inner_tol", g.inner_tol},
               {"inner_max_iters", g.inner_max_iters},
               {"deviation_samples", g.deviation_samples},
               {"cert_rel_tol", g.cert_rel_tol},
               {"solve_tol", g.solve_tol}};
  j["defaults_applied"] = c.defaults_applied;
  return j;
}

// Result records

namespace {

json norms_json(const NormReport& n) {
  return {{"l2", n.l2},
          {"dx_l2", n.dx_l2},
          {"weighted_dy_l2", n.weighted_dy_l2},
          {"dy_l2", n.dy_l2},
          {"mixed_l2", n.mixed_l2 ? json(*n.mixed_l2) : json(nullptr)},
          {"w11", n.w11},
          {"v_norm", n.v_norm ? json(*n.v_norm) : json(nullptr)}};
}

NormReport norms_from(const json& j) {
  NormReport n;
  n.l2 = j.at("l2").get<double>();
  n.dx_l2 = j.at("dx_l2").get<double>();
  n.weighted_dy_l2 = j.at("weighted_dy_l2").get<double>();
  n.dy_l2 = j.at("dy_l2").get<double>();
  n.mixed_l2 = opt<double>(j, "mixed_l2");
  n.w11 = j.at("w11").get<double>();
  n.v_norm = opt<double>(j, "v_norm");
  return n;
}

json study_json(const StudyResult& s) {
  return {{"study", s.study},
          {"levels", s.levels},
          {"metrics", series(s.metrics)},
          {"observed_orders", nums(s.observed_orders)},
          {"samples", series(s.samples)},
          {"verdict", to_string(s.verdict)},
          {"thresholds", s.thresholds},
          {"note", s.note}};
}

StudyResult study_from(const json& j) {
  StudyResult s;
  s.study = j.at("study").get<std::string>();
  s.levels = j.at("levels").get<std::vector<int>>();
  s.metrics = series_from(j.at("metrics"));
  s.observed_orders = nums_from(j.at("observed_orders"));
  s.samples = series_from(j.at("samples"));
  s.verdict = parse_verdict(j.at("verdict").get<std::string>());
  s.thresholds = j.at("thresholds").get<std::map<std::string, double>>();
  s.note = j.at("note").get<std::string>();
  return s;
}

json nash_json(const NashSummary& n) {
  return {{"j1", num(n.j1)},
          {"j2", num(n.j2)},
          {"norm_f1", n.norm_f1},
          {"norm_f2", n.norm_f2},
          {"br_iterations", n.br_iterations},
          {"br_residuals", n.br_residuals},
          {"j1_history", n.j1_history},
          {"j2_history", n.j2_history},
          {"converged", n.converged},
          {"certified", n.certified},
          {"certification_margin", num(n.certification_margin)},
          {"margin1", num(n.margin1)},
          {"margin2", num(n.margin2)},
          {"cert_tol1", n.cert_tol1},
          {"cert_tol2", n.cert_tol2},
          {"deviations", n.deviations},
          {"fixed_point_residual1", num(n.fixed_point_residual1)},
          {"fixed_point_residual2", num(n.fixed_point_residual2)},
          {"iteration_order", n.iteration_order},
          {"gradient_convention", n.gradient_convention}};
}

NashSummary nash_from(const json& j) {
  NashSummary n;
  n.j1 = num_from(j.at("j1"));
  n.j2 = num_from(j.at("j2"));
  n.norm_f1 = j.at("norm_f1").get<double>();
  n.norm_f2 = j.at("norm_f2").get<double>();
  n.br_iterations = j.at("br_iterations").get<int>();
  n.br_residuals = j.at("br_residuals").get<std::vector<double>>();
  n.j1_history = j.at("j1_history").get<std::vector<double>>();
  n.j2_history = j.at("j2_history").get<std::vector<double>>();
  n.converged = j.at("converged").get<bool>();
  n.certified = j.at("certified").get<bool>();
  n.certification_margin = num_from(j.at("certification_margin"));
  n.margin1 = num_from(j.at("margin1"));
  n.margin2 = num_from(j.at("margin2"));
  n.cert_tol1 = j.at("cert_tol1").get<double>();
  n.cert_tol2 = j.at("cert_tol2").get<double>();
  n.deviations = j.at("deviations").get<int>();
  n.fixed_point_residual1 = num_from(j.at("fixed_point_residual1"));
  n.fixed_point_residual2 = num_from(j.at("fixed_point_residual2"));
  n.iteration_order = j.at("iteration_order").get<std::string>();
  n.gradient_convention = j.at("gradient_convention").get<std::string>();
  return n;
}

}  // namespace

std::string serialize(const RunReport& r) {
  json j;
  j["version"] = r.version;
  j["timestamp"] = r.timestamp;
  j["command"] = r.command;
  j["config"] = r.config;
  if (r.solve) {
    const SolveSummary& s = *r.solve;
    j["solve"] = {{"norms", norms_json(s.norms)},
                  {"residual_norm", s.solve.residual_norm},
                  {"iterations", s.solve.iterations},
                  {"wall_time", s.solve.wall_time},
                  {"method", s.solve.method},
                  {"forcing_norm", s.forcing_norm},
                  {"norm_convention", s.norm_convention},
                  {"divergence_warning", s.divergence_warning}};
  }
  if (r.verify) {
    const VerifySummary& v = *r.verify;
    j["verify"] = {{"levels", v.levels},
                   {"max_weak_residual", v.max_weak_residual},
                   {"max_theta_residual", v.max_theta_residual},
                   {"theta", v.theta},
                   {"test_functions", v.test_functions}};
  }
  if (r.study) j["study"] = study_json(*r.study);
  if (r.game) j["game"] = nash_json(*r.game);
  j["verdicts"] = r.verdicts;
  j["errors"] = r.errors;
  return j.dump(2);
}

RunReport parse_report(const std::string& text) {
  const json j = json::parse(text);
  RunReport r;
  r.version = j.at("version").get<std::string>();
  r.timestamp = j.at("timestamp").get<std::string>();
  r.command = j.at("command").get<std::string>();
  r.config = j.at("config");
  if (j.contains("solve")) {
    const json& s = j.at("solve");
    SolveSummary out;
    out.norms = norms_from(s.at("norms"));
    out.solve.residual_norm = s.at("residual_norm").get<double>();
    out.solve.iterations = s.at("iterations").get<int>();
    out.solve.wall_time = s.at("wall_time").get<double>();
    out.solve.method = s.at("method").get<std::string>();
    out.forcing_norm = s.at("forcing_norm").get<double>();
    out.norm_convention = s.at("norm_convention").get<std::string>();
    out.divergence_warning = s.at("divergence_warning").get<bool>();
    r.solve = out;
  }
  if (j.contains("verify")) {
    const json& v = j.at("verify");
    VerifySummary out;
    out.levels = v.at("levels").get<std::vector<int>>();
    out.max_weak_residual = v.at("max_weak_residual").get<std::vector<double>>();
    out.max_theta_residual = v.at("max_theta_residual").get<std::vector<double>>();
    out.theta = v.at("theta").get<double>();
    out.test_functions = v.at("test_functions").get<int>();
    r.verify = out;
  }
  if (j.contains("study")) r.study = study_from(j.at("study"));
  if (j.contains("game")) r.game = nash_from(j.at("game"));
  r.verdicts = j.at("verdicts").get<std::map<std::string, std::string>>();
  r.errors = j.at("errors").get<std::vector<std::string>>();
  return r;
}

// Tables

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void Table::add_row(const std::vector<double>& row) {
  if (row.size() != columns_.size()) throw std::invalid_argument("table row has wrong width");
  rows_.push_back(row);
}

std::string Table::str() const {
  std::ostringstream os;
  for (std::size_t c = 0; c < columns_.size(); ++c) os << (c ? "," : "") << columns_[c];
  os << '\n';
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_number(row[c]);
    os << '\n';
  }
  return os.str();
}

void Table::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << str();
}

}  // namespace dsn
