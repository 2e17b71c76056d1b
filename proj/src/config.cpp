#include "dsn/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace dsn {

std::string to_string(Command c) {
  switch (c) {
    case Command::Solve: return "solve";
    case Command::Verify: return "verify";
    case Command::Study: return "study";
    case Command::Game: return "game";
  }
  return "solve";
}

Command parse_command(const std::string& s) {
  if (s == "solve") return Command::Solve;
  if (s == "verify") return Command::Verify;
  if (s == "study") return Command::Study;
  if (s == "game") return Command::Game;
  throw std::invalid_argument("unknown command '" + s + "' (solve, verify, study, game)");
}

std::string to_string(StudyKind k) {
  switch (k) {
    case StudyKind::Convergence: return "convergence";
    case StudyKind::Energy: return "energy";
    case StudyKind::Coercivity: return "coercivity";
    case StudyKind::Inclusion: return "inclusion";
    case StudyKind::Embedding: return "embedding";
    case StudyKind::Muckenhoupt: return "muckenhoupt";
  }
  return "convergence";
}

StudyKind parse_study_kind(const std::string& s) {
  for (StudyKind k : {StudyKind::Convergence, StudyKind::Energy, StudyKind::Coercivity,
                      StudyKind::Inclusion, StudyKind::Embedding, StudyKind::Muckenhoupt}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown study '" + s +
                              "' (convergence, energy, coercivity, inclusion, embedding, "
                              "muckenhoupt)");
}

ConfigError::ConfigError(int line, std::string field, const std::string& message)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                         (field.empty() ? std::string() : field + ": ") + message),
      line_(line),
      field_(std::move(field)) {}

namespace {

int line_of(const YAML::Node& n) { return n.Mark().is_null() ? 0 : n.Mark().line + 1; }

/// Walks one YAML mapping, remembering which keys were consumed so that
/// leftovers can be reported as unknown.
class Section {
 public:
  Section(YAML::Node node, std::string path, RunConfig& cfg)
      : node_(std::move(node)), path_(std::move(path)), cfg_(cfg) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) {
      throw ConfigError(line_of(node_), path_, "expected a mapping");
    }
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) const { return node_ && node_.IsMap() && node_[key]; }

  YAML::Node child(const std::string& key) {
    seen_.insert(key);
    return has(key) ? node_[key] : YAML::Node();
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) {
      seen_.insert(key);
      cfg_.defaults_applied.push_back(field(key));
      return fallback;
    }
    return require<T>(key);
  }

  template <typename T>
  T require(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) throw ConfigError(line_of(node_), field(key), "missing required field");
    const YAML::Node n = node_[key];
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(line_of(n), field(key), "cannot convert '" + scalar(n) + "'");
    }
  }

  void mark_default(const std::string& key) {
    seen_.insert(key);
    cfg_.defaults_applied.push_back(field(key));
  }

  int line(const std::string& key) const { return has(key) ? line_of(node_[key]) : line_of(node_); }

  void reject_unknown() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const std::string k = kv.first.as<std::string>();
      if (!seen_.count(k)) throw ConfigError(line_of(kv.first), field(k), "unknown field");
    }
  }

 private:
  static std::string scalar(const YAML::Node& n) {
    if (n.IsScalar()) return n.Scalar();
    std::ostringstream os;
    os << n;
    return os.str();
  }

  YAML::Node node_;
  std::string path_;
  RunConfig& cfg_;
  std::set<std::string> seen_;
};

template <typename F>
auto checked(int line, const std::string& field, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(line, field, e.what());
  }
}

void require_range(bool ok, int line, const std::string& field, const std::string& msg) {
  if (!ok) throw ConfigError(line, field, msg);
}

Rect parse_rect(Section& s, const std::string& key, Rect fallback) {
  if (!s.has(key)) {
    s.mark_default(key);
    return fallback;
  }
  const YAML::Node n = s.child(key);
  const int line = line_of(n);
  if (!n.IsSequence() || n.size() != 4) {
    throw ConfigError(line, s.field(key), "expected [x0, x1, y0, y1]");
  }
  Rect r;
  try {
    r = {n[0].as<double>(), n[1].as<double>(), n[2].as<double>(), n[3].as<double>()};
  } catch (const YAML::Exception&) {
    throw ConfigError(line, s.field(key), "rectangle entries must be numbers");
  }
  require_range(0.0 <= r.x0 && r.x0 < r.x1 && r.x1 <= 1.0 && 0.0 <= r.y0 && r.y0 < r.y1 &&
                    r.y1 <= 1.0,
                line, s.field(key), "rectangle must satisfy 0 <= x0 < x1 <= 1, 0 <= y0 < y1 <= 1");
  return r;
}

FieldSpec parse_field(Section& parent, const std::string& key, FieldSpec fallback,
                      RunConfig& cfg) {
  if (!parent.has(key)) {
    parent.mark_default(key);
    return fallback;
  }
  Section s(parent.child(key), parent.field(key), cfg);
  FieldSpec f;
  f.type = s.require<std::string>("type");
  const int line = s.line("type");
  static const std::set<std::string> types{"zero",       "constant",   "sinsin",
                                           "xpow_siny",  "polynomial", "bump"};
  require_range(types.count(f.type) > 0, line, s.field("type"),
                "unknown field type '" + f.type +
                    "' (zero, constant, sinsin, xpow_siny, polynomial, bump)");
  f.amplitude = s.get<double>("amplitude", 1.0);
  f.value = s.get<double>("value", 0.0);
  f.kx = s.get<double>("kx", 1.0);
  f.ky = s.get<double>("ky", 1.0);
  if (s.has("power")) f.power = s.require<double>("power");
  f.cx = s.get<double>("cx", 0.5);
  f.cy = s.get<double>("cy", 0.5);
  f.rx = s.get<double>("rx", 0.25);
  f.ry = s.get<double>("ry", 0.25);
  if (s.has("support")) f.support = parse_rect(s, "support", Rect{});
  s.reject_unknown();
  return f;
}

std::vector<int> default_levels(StudyKind k) {
  switch (k) {
    case StudyKind::Convergence:
    case StudyKind::Energy: return {16, 32, 64, 128};
    case StudyKind::Coercivity: return {64};
    case StudyKind::Inclusion: return {16, 32, 64, 128, 256};
    case StudyKind::Embedding: return {64, 128};
    case StudyKind::Muckenhoupt: return {};
  }
  return {};
}

int default_samples(StudyKind k) {
  switch (k) {
    case StudyKind::Embedding: return 100;
    case StudyKind::Muckenhoupt: return 500;
    default: return 200;
  }
}

void parse_study(Section& root, RunConfig& cfg) {
  Section s(root.child("study"), "study", cfg);
  StudyConfig& st = cfg.study;
  const std::string kind = s.require<std::string>("kind");
  st.kind = checked(s.line("kind"), "study.kind", [&] { return parse_study_kind(kind); });
  st.levels = s.get<std::vector<int>>("levels", default_levels(st.kind));
  for (std::size_t k = 0; k < st.levels.size(); ++k) {
    require_range(st.levels[k] >= 2, s.line("levels"), "study.levels", "levels must be >= 2");
    require_range(k == 0 || st.levels[k] > st.levels[k - 1], s.line("levels"), "study.levels",
                  "levels must be strictly increasing");
  }
  if (st.kind == StudyKind::Convergence) {
    require_range(st.levels.size() >= 3, s.line("levels"), "study.levels",
                  "convergence study needs at least 3 levels");
  }
  const std::string man = s.get<std::string>("manufactured", "sinsin");
  st.manufactured = checked(s.line("manufactured"), "study.manufactured",
                            [&] { return parse_manufactured(man); });
  st.samples = s.get<int>("samples", default_samples(st.kind));
  require_range(st.samples >= 1, s.line("samples"), "study.samples", "samples must be >= 1");
  st.qs = s.get<std::vector<double>>("q", {2.0, 3.0, 4.0});
  for (double q : st.qs) {
    require_range(q >= 2.0 && q <= 4.0, s.line("q"), "study.q", "q must lie in [2, 4]");
  }
  st.exponents = s.get<std::vector<double>>("exponents", {0.0, 0.5, -3.0});
  st.p = s.get<double>("p", 2.0);
  require_range(st.p > 1.0, s.line("p"), "study.p", "p must be > 1");
  st.min_radius = s.get<double>("min_radius", 1.0 / 128.0);
  require_range(st.min_radius > 0.0 && st.min_radius < 1.4, s.line("min_radius"),
                "study.min_radius", "min_radius must lie in (0, diam)");

  StudyThresholds& t = st.thresholds;
  t.energy_growth = s.get<double>("energy_growth", t.energy_growth);
  t.inclusion_plateau = s.get<double>("inclusion_plateau", t.inclusion_plateau);
  t.inclusion_from_level = s.get<int>("inclusion_from_level", t.inclusion_from_level);
  t.upwind_order = s.get<double>("upwind_order", t.upwind_order);
  t.centered_order = s.get<double>("centered_order", t.centered_order);
  t.embedding_growth = s.get<double>("embedding_growth", t.embedding_growth);
  t.coercivity_safety = s.get<double>("coercivity_safety", t.coercivity_safety);
  require_range(t.coercivity_safety >= 1.0, s.line("coercivity_safety"),
                "study.coercivity_safety", "safety factor must be >= 1");
  s.reject_unknown();
}

void parse_game(Section& root, RunConfig& cfg) {
  Section s(root.child("game"), "game", cfg);
  GameConfig& g = cfg.game;
  const GameConfig d;
  g.omega = parse_rect(s, "omega", d.omega);
  g.omega1 = parse_rect(s, "omega1", d.omega1);
  g.omega2 = parse_rect(s, "omega2", d.omega2);
  g.g1 = parse_rect(s, "G1", d.g1);
  g.g2 = parse_rect(s, "G2", d.g2);
  g.leader = parse_field(s, "leader", d.leader, cfg);
  g.yd1 = parse_field(s, "yd1", d.yd1, cfg);
  g.yd2 = parse_field(s, "yd2", d.yd2, cfg);
  g.m1 = s.get<double>("M1", d.m1);
  require_range(g.m1 >= 0.0, s.line("M1"), "game.M1", "ball radius must be >= 0");
  g.m2 = s.get<double>("M2", d.m2);
  require_range(g.m2 >= 0.0, s.line("M2"), "game.M2", "ball radius must be >= 0");
  g.br_tol = s.get<double>("br_tol", d.br_tol);
  require_range(g.br_tol > 0.0, s.line("br_tol"), "game.br_tol", "must be > 0");
  g.br_max_iters = s.get<int>("br_max_iters", d.br_max_iters);
  require_range(g.br_max_iters >= 1, s.line("br_max_iters"), "game.br_max_iters", "must be >= 1");
  g.inner_tol = s.get<double>("inner_tol", d.inner_tol);
  require_range(g.inner_tol > 0.0, s.line("inner_tol"), "game.inner_tol", "must be > 0");
  g.inner_max_iters = s.get<int>("inner_max_iters", d.inner_max_iters);
  require_range(g.inner_max_iters >= 1, s.line("inner_max_iters"), "game.inner_max_iters",
                "must be >= 1");
  g.deviation_samples = s.get<int>("deviation_samples", d.deviation_samples);
  require_range(g.deviation_samples >= 1, s.line("deviation_samples"), "game.deviation_samples",
                "must be >= 1");
  g.cert_rel_tol = s.get<double>("cert_rel_tol", d.cert_rel_tol);
  require_range(g.cert_rel_tol >= 0.0, s.line("cert_rel_tol"), "game.cert_rel_tol",
                "must be >= 0");
  g.solve_tol = s.get<double>("solve_tol", d.solve_tol);
  require_range(g.solve_tol > 0.0, s.line("solve_tol"), "game.solve_tol", "must be > 0");
  s.reject_unknown();
  if (g.yd1 == g.yd2) {
    cfg.defaults_applied.push_back("warning: game.yd1 equals game.yd2");
  }
}

void sync_game(RunConfig& cfg) {
  cfg.game.nx = cfg.nx;
  cfg.game.ny = cfg.ny;
  cfg.game.alpha = cfg.alpha;
  cfg.game.seed = cfg.seed.value_or(0);
}

}  // namespace

bool needs_seed(const RunConfig& cfg) {
  switch (cfg.command) {
    case Command::Verify:
    case Command::Game: return true;
    case Command::Study:
      return cfg.study.kind == StudyKind::Coercivity || cfg.study.kind == StudyKind::Embedding ||
             cfg.study.kind == StudyKind::Muckenhoupt;
    case Command::Solve: return false;
  }
  return false;
}

RunConfig parse_config(const std::string& text) {
  YAML::Node doc;
  try {
    doc = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.mark.line + 1, "", "malformed YAML: " + e.msg);
  }
  if (!doc.IsMap()) throw ConfigError(0, "", "configuration must be a YAML mapping");

  RunConfig cfg;
  Section root(doc, "", cfg);
  const std::string cmd = root.require<std::string>("command");
  cfg.command = checked(root.line("command"), "command", [&] { return parse_command(cmd); });
  if (root.has("seed")) {
    const long long seed = root.require<long long>("seed");
    require_range(seed >= 0, root.line("seed"), "seed", "seed must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(seed);
  } else {
    root.child("seed");
  }
  cfg.output_dir = root.get<std::string>("output_dir", "out");

  {
    Section g(root.child("grid"), "grid", cfg);
    cfg.nx = g.get<int>("nx", 64);
    require_range(cfg.nx >= 2, g.line("nx"), "grid.nx", "nx must be >= 2");
    cfg.ny = g.get<int>("ny", cfg.nx);
    require_range(cfg.ny >= 2, g.line("ny"), "grid.ny", "ny must be >= 2");
    cfg.alpha = g.get<double>("alpha", 0.5);
    require_range(cfg.alpha > 0.0 && cfg.alpha <= 1.0, g.line("alpha"), "grid.alpha",
                  "alpha must lie in (0,1]");
    g.reject_unknown();
  }

  const std::string scheme = root.get<std::string>("scheme", "upwind");
  cfg.scheme = checked(root.line("scheme"), "scheme", [&] { return parse_y_scheme(scheme); });
  cfg.theta = root.get<double>("theta", 1.0);
  require_range(cfg.theta >= 0.0, root.line("theta"), "theta", "theta must be >= 0");
  cfg.tol = root.get<double>("tol", 1e-10);
  require_range(cfg.tol > 0.0, root.line("tol"), "tol", "tol must be > 0");
  const std::string conv = root.get<std::string>("norm_convention", "half-exponent");
  cfg.convention = checked(root.line("norm_convention"), "norm_convention",
                           [&] { return parse_weight_convention(conv); });
  cfg.forcing = parse_field(root, "forcing", FieldSpec{}, cfg);

  if (root.has("verify")) {
    Section v(root.child("verify"), "verify", cfg);
    const std::string man = v.get<std::string>("manufactured", "sinsin");
    cfg.verify_manufactured =
        checked(v.line("manufactured"), "verify.manufactured", [&] { return parse_manufactured(man); });
    cfg.verify_test_functions = v.get<int>("test_functions", 10);
    require_range(cfg.verify_test_functions >= 1, v.line("test_functions"),
                  "verify.test_functions", "must be >= 1");
    v.reject_unknown();
  } else {
    root.child("verify");
  }

  if (cfg.command == Command::Study) {
    if (!root.has("study")) throw ConfigError(0, "study", "study command needs a study section");
    parse_study(root, cfg);
  } else if (root.has("study")) {
    parse_study(root, cfg);
  } else {
    root.child("study");
  }

  if (root.has("game") || cfg.command == Command::Game) {
    parse_game(root, cfg);
  } else {
    root.child("game");
  }
  root.reject_unknown();

  if (needs_seed(cfg) && !cfg.seed) {
    throw ConfigError(0, "seed", "a seed is mandatory for sampling commands");
  }
  sync_game(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "", "cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void apply_overrides(RunConfig& cfg, std::optional<std::uint64_t> seed,
                     std::optional<int> level_override) {
  if (seed) cfg.seed = seed;
  if (level_override) {
    const int n = *level_override;
    if (n < 2) throw ConfigError(0, "--level-override", "level must be >= 2");
    cfg.nx = cfg.ny = n;
    auto& lv = cfg.study.levels;
    lv.erase(std::remove_if(lv.begin(), lv.end(), [n](int l) { return l > n; }), lv.end());
    if (cfg.study.kind == StudyKind::Coercivity || lv.empty()) lv = {n};
  }
  if (needs_seed(cfg) && !cfg.seed) {
    throw ConfigError(0, "seed", "a seed is mandatory for sampling commands");
  }
  sync_game(cfg);
}

}  // namespace dsn
