#ifndef DSN_REPORT_HPP
#define DSN_REPORT_HPP

#include "dsn/analysis.hpp"
#include "dsn/config.hpp"
#include "dsn/norms.hpp"
#include "dsn/operator.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dsn {

struct SolveSummary {
  NormReport norms;
  SolveReport solve;
  double forcing_norm = 0.0;
  std::string norm_convention;
  bool divergence_warning = false;

  bool operator==(const SolveSummary&) const;
};

struct VerifySummary {
  std::vector<int> levels;
  std::vector<double> max_weak_residual;
  std::vector<double> max_theta_residual;
  double theta = 1.0;
  int test_functions = 0;

  bool operator==(const VerifySummary&) const = default;
};

struct NashSummary {
  double j1 = 0.0;
  double j2 = 0.0;
  double norm_f1 = 0.0;
  double norm_f2 = 0.0;
  int br_iterations = 0;
  std::vector<double> br_residuals;
  std::vector<double> j1_history;
  std::vector<double> j2_history;
  bool converged = false;
  bool certified = false;
  double certification_margin = 0.0;
  double margin1 = 0.0;
  double margin2 = 0.0;
  double cert_tol1 = 0.0;
  double cert_tol2 = 0.0;
  int deviations = 0;
  double fixed_point_residual1 = 0.0;
  double fixed_point_residual2 = 0.0;
  std::string iteration_order;
  std::string gradient_convention;

  bool operator==(const NashSummary&) const = default;
};

/// Everything a run produces, serialized as one JSON record.
struct RunReport {
  std::string version;
  std::string timestamp;
  std::string command;
  nlohmann::json config;  ///< resolved configuration echo
  std::optional<SolveSummary> solve;
  std::optional<VerifySummary> verify;
  std::optional<StudyResult> study;
  std::optional<NashSummary> game;
  std::map<std::string, std::string> verdicts;
  std::vector<std::string> errors;

  bool operator==(const RunReport&) const = default;
};

nlohmann::json to_json(const RunConfig& cfg);
std::string serialize(const RunReport& report);
RunReport parse_report(const std::string& text);

/// Delimiter-separated table with a header row; numbers use 17 significant
/// digits so files are lossless and byte-stable.
class Table {
 public:
  explicit Table(std::vector<std::string> columns);
  void add_row(const std::vector<double>& row);
  std::string str() const;
  void write(const std::string& path) const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

std::string format_number(double v);

}  // namespace dsn

#endif  // DSN_REPORT_HPP
