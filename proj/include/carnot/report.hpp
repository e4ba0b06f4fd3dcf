#ifndef CARNOT_REPORT_HPP
#define CARNOT_REPORT_HPP

#include "carnot/mcp.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace carnot {

enum class RenderMode { table, json, csv };

/// One run of a CLI command: echo of the invocation, digest of the input
/// spec, and the numeric outputs. The JSON and table renderings carry the
/// same quantities; tables round to 6 significant digits, JSON keeps full
/// precision. Rendering is a pure function of the report.
struct RunReport {
  std::string command;
  std::string input_digest;
  std::uint64_t seed = 0;
  double wall_time_ms = 0.0;
  nlohmann::ordered_json outputs;
};

std::string render_report(const RunReport& report, RenderMode mode);

/// McpReport -> the `outputs` payload (shared by `mcp check` and the tests).
nlohmann::ordered_json mcp_report_json(const McpReport& rep);
/// CSV rows `t,lhs,rhs,margin,std_error`, full precision.
std::string mcp_report_csv(const McpReport& rep);

std::string format_sig6(double v);

}  // namespace carnot

#endif
