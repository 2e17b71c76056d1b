#ifndef DSN_RUN_HPP
#define DSN_RUN_HPP

#include "dsn/config.hpp"
#include "dsn/report.hpp"

#include <string>

namespace dsn {

inline constexpr const char* kVersion = "1.0.0";

/// Runs one command and persists report.json plus the command's CSV tables
/// in cfg.output_dir. Module failures are caught and listed in
/// `errors`; whatever was computed before the failure is still written.
RunReport run(const RunConfig& cfg);

/// 0 when every verdict is pass or inconclusive, 2 when any verdict is fail,
/// 1 when the run recorded an error.
int exit_status(const RunReport& report);

}  // namespace dsn

#endif  // DSN_RUN_HPP
