#ifndef DSN_CONFIG_HPP
#define DSN_CONFIG_HPP

#include "dsn/analysis.hpp"
#include "dsn/fields.hpp"
#include "dsn/game.hpp"
#include "dsn/norms.hpp"
#include "dsn/operator.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsn {

enum class Command { Solve, Verify, Study, Game };
enum class StudyKind { Convergence, Energy, Coercivity, Inclusion, Embedding, Muckenhoupt };

std::string to_string(Command c);
Command parse_command(const std::string& s);
std::string to_string(StudyKind k);
StudyKind parse_study_kind(const std::string& s);

struct StudyConfig {
  StudyKind kind = StudyKind::Convergence;
  std::vector<int> levels;
  Manufactured manufactured = Manufactured::SinSin;
  /// Test functions (coercivity, embedding) or balls (muckenhoupt).
  int samples = 200;
  std::vector<double> qs{2.0, 3.0, 4.0};
  std::vector<double> exponents{0.0, 0.5, -3.0};
  double p = 2.0;
  double min_radius = 1.0 / 128.0;
  StudyThresholds thresholds;

  bool operator==(const StudyConfig&) const = default;
};

struct RunConfig {
  Command command = Command::Solve;
  int nx = 64;
  int ny = 64;
  double alpha = 0.5;
  YScheme scheme = YScheme::Upwind;
  double theta = 1.0;
  double tol = 1e-10;
  WeightConvention convention = WeightConvention::HalfExponent;
  FieldSpec forcing;
  Manufactured verify_manufactured = Manufactured::SinSin;
  int verify_test_functions = 10;
  StudyConfig study;
  GameConfig game;
  std::string output_dir = "out";
  std::optional<std::uint64_t> seed;
  /// Dotted names of the fields that took their default value.
  std::vector<std::string> defaults_applied;

  bool operator==(const RunConfig&) const = default;
};

/// Malformed or out-of-range configuration. `line` is 1-based, 0 if unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, std::string field, const std::string& message);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

/// Parses the YAML run configuration described in README.md. Unknown keys
/// are rejected. Study and game sections inherit the top-level grid.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Applies a command-line seed override and re-checks the seed requirement.
void apply_overrides(RunConfig& cfg, std::optional<std::uint64_t> seed,
                     std::optional<int> level_override);

/// Sampling commands (verify, game, coercivity/embedding/muckenhoupt studies)
/// need a seed.
bool needs_seed(const RunConfig& cfg);

}  // namespace dsn

#endif  // DSN_CONFIG_HPP
