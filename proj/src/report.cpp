#include "carnot/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <utility>
#include <vector>

namespace carnot {

std::string format_sig6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

namespace {

std::string full_precision(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void flatten(const std::string& prefix, const nlohmann::ordered_json& j,
             std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (const auto& [key, val] : j.items())
      flatten(prefix.empty() ? key : prefix + "." + key, val, rows);
    return;
  }
  if (j.is_array()) {
    // Arrays of scalars render inline; arrays of objects recurse by index.
    bool scalar = true;
    for (const auto& v : j) scalar = scalar && !v.is_structured();
    if (scalar) {
      std::ostringstream os;
      os << "(";
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) os << ", ";
        const auto& v = j[i];
        os << (v.is_number_float() ? format_sig6(v.get<double>()) : v.dump());
      }
      os << ")";
      rows.push_back({prefix, os.str()});
    } else {
      for (size_t i = 0; i < j.size(); ++i)
        flatten(prefix + "[" + std::to_string(i) + "]", j[i], rows);
    }
    return;
  }
  if (j.is_number_float())
    rows.push_back({prefix, format_sig6(j.get<double>())});
  else if (j.is_string())
    rows.push_back({prefix, j.get<std::string>()});
  else
    rows.push_back({prefix, j.dump()});
}

}  // namespace

std::string render_report(const RunReport& report, RenderMode mode) {
  if (mode == RenderMode::json) {
    nlohmann::ordered_json j;
    j["command"] = report.command;
    j["input_digest"] = report.input_digest;
    j["seed"] = report.seed;
    j["wall_time_ms"] = report.wall_time_ms;
    j["outputs"] = report.outputs;
    return j.dump(2) + "\n";
  }
  if (mode == RenderMode::csv) {
    // The mcp t-series renders as the documented 5-column table; everything
    // else falls back to key,value rows.
    if (report.outputs.contains("rows")) {
      std::ostringstream os;
      os << "t,lhs,rhs,margin,std_error\n";
      for (const auto& row : report.outputs["rows"])
        os << full_precision(row["t"].get<double>()) << ","
           << full_precision(row["lhs"].get<double>()) << ","
           << full_precision(row["rhs"].get<double>()) << ","
           << full_precision(row["margin"].get<double>()) << ","
           << full_precision(row["std_error"].get<double>()) << "\n";
      return os.str();
    }
    std::vector<std::pair<std::string, std::string>> rows;
    flatten("", report.outputs, rows);
    std::ostringstream os;
    os << "key,value\n";
    for (const auto& [k, v] : rows) os << k << ",\"" << v << "\"\n";
    return os.str();
  }

  std::vector<std::pair<std::string, std::string>> rows;
  rows.push_back({"command", report.command});
  rows.push_back({"input digest", report.input_digest});
  flatten("", report.outputs, rows);
  size_t width = 0;
  for (const auto& [k, v] : rows) width = std::max(width, k.size());
  std::ostringstream os;
  for (const auto& [k, v] : rows)
    os << k << std::string(width - k.size() + 2, ' ') << v << "\n";
  return os.str();
}

nlohmann::ordered_json mcp_report_json(const McpReport& rep) {
  nlohmann::ordered_json j;
  j["K"] = rep.K;
  j["N"] = rep.N;
  j["samples"] = rep.samples;
  j["workers"] = rep.workers;
  j["verdict"] = to_string(rep.verdict);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (size_t i = 0; i < rep.t_grid.size(); ++i) {
    nlohmann::ordered_json row;
    row["t"] = rep.t_grid[i];
    row["lhs"] = rep.lhs[i];
    row["rhs"] = rep.rhs[i];
    row["margin"] = rep.margins[i];
    row["std_error"] = rep.std_errors[i];
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  if (rep.witness) {
    nlohmann::ordered_json w;
    w["p_x"] = std::vector<double>(rep.witness->p.px.data(),
                                   rep.witness->p.px.data() + rep.witness->p.px.size());
    w["p_z"] = rep.witness->p.pz;
    w["t"] = rep.witness->t;
    w["lhs"] = rep.witness->lhs;
    w["rhs"] = rep.witness->rhs;
    j["witness"] = std::move(w);
  }
  return j;
}

std::string mcp_report_csv(const McpReport& rep) {
  std::ostringstream os;
  os << "t,lhs,rhs,margin,std_error\n";
  for (size_t i = 0; i < rep.t_grid.size(); ++i)
    os << full_precision(rep.t_grid[i]) << "," << full_precision(rep.lhs[i]) << ","
       << full_precision(rep.rhs[i]) << "," << full_precision(rep.margins[i]) << ","
       << full_precision(rep.std_errors[i]) << "\n";
  return os.str();
}

}  // namespace carnot
