// carnot: invariants of Carnot groups and numerical verification of measure
// contraction properties on corank-1 groups.

#include "carnot/builtins.hpp"
#include "carnot/errors.hpp"
#include "carnot/mcp.hpp"
#include "carnot/report.hpp"
#include "carnot/spec_io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace carnot;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;  // mathematical fail: violation found
constexpr int kExitInconclusive = 2;
constexpr int kExitInputError = 3;

std::vector<double> parse_numbers(const std::string& text, char sep = ',') {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, sep)) {
    size_t pos = 0;
    out.push_back(std::stod(tok, &pos));
    if (pos != tok.size()) throw DomainError("bad number '" + tok + "'");
  }
  return out;
}

Covector parse_covector(const Corank1Group& g, const std::string& text) {
  const auto v = parse_numbers(text);
  if (static_cast<int>(v.size()) != g.k + 1)
    throw DomainError("covector needs k+1 = " + std::to_string(g.k + 1) +
                      " comma-separated values (p_x..., p_z)");
  Covector p;
  p.px = Eigen::Map<const Eigen::VectorXd>(v.data(), g.k);
  p.pz = v.back();
  return p;
}

GroupPoint parse_point(const Corank1Group& g, const std::string& text) {
  const auto v = parse_numbers(text);
  if (static_cast<int>(v.size()) != g.k + 1)
    throw DomainError("point needs k+1 = " + std::to_string(g.k + 1) +
                      " comma-separated values (x..., z)");
  GroupPoint q;
  q.x = Eigen::Map<const Eigen::VectorXd>(v.data(), g.k);
  q.z = v.back();
  return q;
}

// box:a,b;c,d           all p_x coordinates in [a,b], p_z in [c,d]
// box:a1,b1;...;c,d     k+1 pairs, per-coordinate bounds then p_z
// ball:r;P              |p_x| <= r, |p_z| <= P
OmegaSpec parse_omega(const Corank1Group& g, const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw DomainError("omega must be box:... or ball:...");
  const std::string kind = text.substr(0, colon);
  std::vector<std::string> groups;
  {
    std::stringstream ss(text.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ';')) groups.push_back(tok);
  }
  if (kind == "ball") {
    if (groups.size() != 2) throw DomainError("ball omega is ball:<radius>;<pz_cap>");
    const double r = parse_numbers(groups[0]).at(0);
    const double cap = parse_numbers(groups[1]).at(0);
    return OmegaSpec::ball(g.k, r, cap);
  }
  if (kind != "box") throw DomainError("omega must be box:... or ball:...");
  std::vector<std::pair<double, double>> pairs;
  for (const auto& grp : groups) {
    const auto v = parse_numbers(grp);
    if (v.size() != 2) throw DomainError("omega intervals are <lo>,<hi>");
    pairs.push_back({v[0], v[1]});
  }
  if (pairs.size() == 2)
    return OmegaSpec::uniform_box(g.k, pairs[0].first, pairs[0].second, pairs[1].first,
                                  pairs[1].second);
  if (static_cast<int>(pairs.size()) != g.k + 1)
    throw DomainError("box omega needs 2 or k+1 intervals");
  Eigen::VectorXd lo(g.k), hi(g.k);
  for (int i = 0; i < g.k; ++i) {
    lo(i) = pairs[static_cast<size_t>(i)].first;
    hi(i) = pairs[static_cast<size_t>(i)].second;
  }
  return OmegaSpec::box(lo, hi, pairs.back().first, pairs.back().second);
}

const Corank1Group& require_group(const LoadedSpec& spec) {
  if (!spec.group)
    throw DomainError("'" + spec.source + "' is not a corank-1 group with A != 0");
  return *spec.group;
}

nlohmann::ordered_json vec_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

struct Output {
  RenderMode mode = RenderMode::table;
  std::string out_path;

  void emit(const RunReport& rep) const {
    const std::string text = render_report(rep, mode);
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) throw DomainError("cannot write '" + out_path + "'");
      f << text;
    }
  }
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CARNOT_SEED")) return std::strtoull(env, nullptr, 10);
  return 20240915ull;
}

class Timer {
public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

private:
  std::chrono::steady_clock::time_point start_;
};

nlohmann::ordered_json info_outputs(const LoadedSpec& spec) {
  nlohmann::ordered_json out;
  const StratifiedLieAlgebra& alg = *spec.algebra;
  out["name"] = spec.source;
  out["n"] = alg.n();
  out["k"] = alg.rank();
  out["step"] = alg.step();
  out["growth_vector"] = growth_vector(alg);
  out["hausdorff_dimension"] = hausdorff_dimension(alg);
  try {
    const FlagReport flag = max_geodesic_growth(alg);
    out["geodesic_growth_vector"] = flag.geodesic_growth;
    out["ample"] = flag.ample;
    if (flag.inconclusive) out["flag_inconclusive"] = true;
    out["geodesic_dimension"] = geodesic_dimension(alg, flag);
  } catch (const NotAmple&) {
    out["geodesic_growth_vector"] = "n/a (no ample line direction)";
    out["ample"] = false;
    out["geodesic_dimension"] = "n/a (no ample line direction)";
  }
  out["rifford_bound"] = rifford_bound(alg);
  const FatnessReport fat = is_fat(alg);
  out["fat"] = fat.fat;
  out["ideal"] = fat.fat;
  if (fat.witness) {
    std::vector<std::string> w;
    for (const auto& c : *fat.witness) w.push_back(to_string(c));
    out["fat_witness_direction"] = w;
  }
  if (const auto dir = find_abnormal_line_direction(alg)) {
    std::vector<std::string> d, l;
    for (const auto& c : *dir) d.push_back(to_string(c));
    const auto abn = has_abnormal_line(alg, *dir);
    for (const auto& c : *abn.annihilator) l.push_back(to_string(c));
    out["abnormal_line_direction"] = d;
    out["abnormal_line_annihilator"] = l;
  } else {
    out["abnormal_line_direction"] = "none found";
  }
  if (spec.group) {
    const Corank1Group& g = *spec.group;
    out["corank1"] = nlohmann::ordered_json{{"k", g.k},
                                            {"d", g.d},
                                            {"kernel_dim", g.kernel_dim()},
                                            {"alphas", vec_json(g.alphas)},
                                            {"pz_bound", g.pz_bound()}};
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"invariants and measure-contraction checks for Carnot groups"};
  app.require_subcommand(1);

  Output output;
  std::string format = "table";
  app.add_option("--format", format, "table|json|csv")->capture_default_str();
  app.add_option("--out", output.out_path, "write the report to this path");

  std::string spec_arg;
  auto add_spec = [&](CLI::App* cmd) {
    cmd->fallthrough();  // let --format / --out appear after the subcommand
    cmd->add_option("spec", spec_arg, "builtin name or spec file path")->required();
  };

  auto* validate_cmd = app.add_subcommand("validate", "parse and validate a spec");
  add_spec(validate_cmd);

  auto* info_cmd = app.add_subcommand("info", "growth vectors, dimensions, classification");
  add_spec(info_cmd);

  std::string covector_arg;
  auto* exp_cmd = app.add_subcommand("exp", "exponential map at the identity");
  add_spec(exp_cmd);
  exp_cmd->add_option("--covector", covector_arg, "p_x...,p_z")->required();

  std::string point_arg;
  auto* log_cmd = app.add_subcommand("log", "inverse exponential map");
  add_spec(log_cmd);
  log_cmd->add_option("--point", point_arg, "x...,z")->required();

  std::vector<std::string> point_pair;
  auto* dist_cmd = app.add_subcommand("dist", "Carnot-Caratheodory distance");
  add_spec(dist_cmd);
  dist_cmd->add_option("--point", point_pair, "x...,z (twice)")->expected(2);

  auto* jac_cmd = app.add_subcommand("jacobian", "Jacobian determinant of exp");
  add_spec(jac_cmd);
  jac_cmd->add_option("--covector", covector_arg, "p_x...,p_z")->required();

  auto* mcp_cmd = app.add_subcommand("mcp", "measure contraction property tools");
  mcp_cmd->fallthrough();
  mcp_cmd->require_subcommand(1);

  double arg_K = 0.0, arg_N = 5.0, arg_eps = 0.1;
  std::string omega_arg = "box:0.2,1;-2,2", tgrid_arg;
  long arg_samples = 200000;
  std::uint64_t arg_seed = default_seed();
  int arg_workers = 1;
  bool ball_volume = false;

  auto* check_cmd = mcp_cmd->add_subcommand("check", "Monte-Carlo MCP(K,N) verification");
  add_spec(check_cmd);
  check_cmd->add_option("--K", arg_K, "curvature parameter (<= 0)")->capture_default_str();
  check_cmd->add_option("--N", arg_N, "dimension parameter (>= 1)")->capture_default_str();
  check_cmd->add_option("--omega", omega_arg, "box:a,b;c,d or ball:r;P")->capture_default_str();
  check_cmd->add_option("--samples", arg_samples, "Monte-Carlo samples")->capture_default_str();
  check_cmd->add_option("--seed", arg_seed, "random stream seed");
  check_cmd->add_option("--tgrid", tgrid_arg, "comma-separated t values in (0,1]");
  check_cmd->add_option("--workers", arg_workers, "worker threads")->capture_default_str();

  auto* expo_cmd = mcp_cmd->add_subcommand("exponent", "estimate the curvature exponent");
  add_spec(expo_cmd);

  auto* fit_cmd = mcp_cmd->add_subcommand("fit", "log-log contraction slope");
  add_spec(fit_cmd);
  fit_cmd->add_option("--omega", omega_arg, "box:a,b;c,d or ball:r;P")->capture_default_str();
  fit_cmd->add_option("--samples", arg_samples, "Monte-Carlo samples")->capture_default_str();
  fit_cmd->add_option("--seed", arg_seed, "random stream seed");
  fit_cmd->add_option("--tgrid", tgrid_arg, "comma-separated t values");
  fit_cmd->add_flag("--ball-volume", ball_volume,
                    "scale only the horizontal radius (metric-ball volume mode)");

  auto* violate_cmd = mcp_cmd->add_subcommand("violate", "search for a pointwise violation");
  add_spec(violate_cmd);
  violate_cmd->add_option("--N", arg_N, "dimension parameter")->required();
  violate_cmd->add_option("--eps-pz", arg_eps, "restrict the search to |p_z| <= eps")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (format == "json")
    output.mode = RenderMode::json;
  else if (format == "csv")
    output.mode = RenderMode::csv;
  else if (format != "table")
    throw DomainError("unknown format '" + format + "'");

  std::ostringstream echo;
  for (int i = 0; i < argc; ++i) echo << (i ? " " : "") << argv[i];

  Timer timer;
  const LoadedSpec spec = load_spec(spec_arg);
  RunReport rep;
  rep.command = echo.str();
  rep.input_digest = spec.digest;
  rep.seed = arg_seed;
  int exit_code = kExitPass;

  if (*validate_cmd) {
    rep.outputs["valid"] = true;
    rep.outputs["name"] = spec.source;
    rep.outputs["n"] = spec.algebra->n();
    rep.outputs["step"] = spec.algebra->step();
    rep.outputs["corank1_group"] = spec.group.has_value();
  } else if (*info_cmd) {
    rep.outputs = info_outputs(spec);
  } else if (*exp_cmd) {
    const Corank1Group& g = require_group(spec);
    const GroupPoint q = exp_map(g, parse_covector(g, covector_arg));
    rep.outputs["x"] = vec_json(q.x);
    rep.outputs["z"] = q.z;
  } else if (*log_cmd) {
    const Corank1Group& g = require_group(spec);
    const Covector p = log_map(g, parse_point(g, point_arg));
    rep.outputs["p_x"] = vec_json(p.px);
    rep.outputs["p_z"] = p.pz;
  } else if (*dist_cmd) {
    const Corank1Group& g = require_group(spec);
    rep.outputs["distance"] =
        distance(g, parse_point(g, point_pair.at(0)), parse_point(g, point_pair.at(1)));
  } else if (*jac_cmd) {
    const Corank1Group& g = require_group(spec);
    rep.outputs["jacobian"] = jacobian(g, parse_covector(g, covector_arg));
  } else if (*check_cmd) {
    const Corank1Group& g = require_group(spec);
    std::vector<double> tgrid;
    if (tgrid_arg.empty()) {
      for (int j = 1; j <= 10; ++j) tgrid.push_back(0.1 * j);
      for (int j = 1; j <= 7; ++j) tgrid.push_back(std::ldexp(1.0, -j));
      std::sort(tgrid.begin(), tgrid.end());
      tgrid.erase(std::unique(tgrid.begin(), tgrid.end()), tgrid.end());
    } else {
      tgrid = parse_numbers(tgrid_arg);
    }
    const McpReport mcp = mcp_check(g, arg_K, arg_N, parse_omega(g, omega_arg), tgrid,
                                    arg_samples, arg_seed, arg_workers);
    rep.outputs = mcp_report_json(mcp);
    exit_code = mcp.verdict == McpReport::Verdict::pass   ? kExitPass
                : mcp.verdict == McpReport::Verdict::fail ? kExitFail
                                                          : kExitInconclusive;
  } else if (*expo_cmd) {
    const Corank1Group& g = require_group(spec);
    rep.outputs["curvature_exponent_estimate"] = estimate_curvature_exponent(g);
    rep.outputs["k_plus_3"] = g.k + 3;
  } else if (*fit_cmd) {
    const Corank1Group& g = require_group(spec);
    const std::vector<double> tgrid =
        tgrid_arg.empty() ? default_fit_t_grid() : parse_numbers(tgrid_arg);
    const FitResult fit =
        contraction_fit(g, parse_omega(g, omega_arg), tgrid, arg_samples, arg_seed,
                        ball_volume ? FitMode::ball_volume : FitMode::homothety);
    rep.outputs["slope"] = fit.slope;
    rep.outputs["intercept"] = fit.intercept;
    rep.outputs["residual"] = fit.residual;
    rep.outputs["t"] = fit.t_grid;
    rep.outputs["mu"] = fit.mu;
  } else if (*violate_cmd) {
    const Corank1Group& g = require_group(spec);
    const auto witness = find_violation(g, arg_N, arg_eps);
    rep.outputs["violation_found"] = witness.has_value();
    if (witness) {
      rep.outputs["witness"] = {{"p_x", vec_json(witness->p.px)},
                                {"p_z", witness->p.pz},
                                {"t", witness->t},
                                {"lhs", witness->lhs},
                                {"rhs", witness->rhs}};
      exit_code = kExitFail;
    }
  }

  rep.wall_time_ms = timer.ms();
  output.emit(rep);
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const carnot::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}
