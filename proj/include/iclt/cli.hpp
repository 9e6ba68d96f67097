#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace iclt::cli {

/// Record format version carried as the first field of every record.
inline constexpr int kSchemaVersion = 1;

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kSuccess = 0,
  kVerificationFailed = 1,
  kUsageError = 2,
  kNumericalFailure = 3,
};

using Record = nlohmann::ordered_json;

/// One line, fields in insertion order, doubles in shortest round-trip form.
std::string serialize_record(const Record& record);
Record parse_record(const std::string& line);

/// Runs `iclt <args...>`; records and tables go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace iclt::cli
