#pragma once

// One entry point per CLI subcommand. Reports are JSON objects whose key
// order is fixed; see schema/report.schema.json.

#include "eqkit/config.hpp"

#include <json.hpp>

#include <string>

namespace eqkit {

using Json = nlohmann::ordered_json;

struct RunResult {
  Json report;
  int exit_code = 0;  // 0 ok, 1 error, 2 verify found the params not admissible
  std::string csv;    // trace output
};

// Never throws: errors become {"error": {"kind", "message"}} with exit 1.
RunResult run(const RunConfig& config);

std::string tool_version();

}  // namespace eqkit
