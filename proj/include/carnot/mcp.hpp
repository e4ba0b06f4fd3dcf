#ifndef CARNOT_MCP_HPP
#define CARNOT_MCP_HPP

#include "carnot/corank1.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace carnot {

/// Region A in covector coordinates; the verified set is Omega = exp_e(A).
/// Boxes must sit inside the injectivity domain D with margin 0.01 (vertical
/// cap and at least one rotation block bounded away from zero). Ball
/// pullbacks are {|p_x| <= r} x {|p_z| <= P} intersected with D; the
/// abnormal slice {A p_x = 0} is null and J extends by 0, so only the
/// vertical margin is enforced there.
struct OmegaSpec {
  enum class Kind { covector_box, covector_ball_pullback };
  Kind kind = Kind::covector_box;
  Eigen::VectorXd px_lo, px_hi;  // box bounds per coordinate
  double ball_radius = 0.0;      // ball pullback
  double pz_lo = 0.0, pz_hi = 0.0;

  static OmegaSpec box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, double pz_lo,
                       double pz_hi);
  static OmegaSpec uniform_box(int k, double lo, double hi, double pz_lo, double pz_hi);
  static OmegaSpec ball(int k, double radius, double pz_cap);

  double volume(int k) const;
};

/// Throws BadOmega unless the region is admissible for the group.
void validate_omega(const Corank1Group& g, const OmegaSpec& omega);

/// Distortion coefficient of the constant-curvature model spaces:
/// sin / linear / sinh branches, continuous in K at 0 (series for small
/// |K| t^2). Throws DomainError for K > 0, t >= pi/sqrt(K).
double s_K(double K, double t);

struct PointwiseWitness {
  Covector p;
  double t = 0.0;
  double lhs = 0.0, rhs = 0.0;

  bool operator==(const PointwiseWitness& o) const {
    return p == o.p && t == o.t && lhs == o.lhs && rhs == o.rhs;
  }
};

struct PointwiseResult {
  bool pass = true;
  double worst_ratio = 1.0;  // min over nodes of J(tp) / (t^{N-k-1} J(p))
  std::optional<PointwiseWitness> witness;
};

/// Default covector grid: per-block and all-block radius patterns with radii
/// log-spaced in [1e-3, 3], p_z symmetric (log-spaced toward 0, linear toward
/// the domain boundary minus 0.05) plus the p_z = 0 node.
std::vector<Covector> default_p_grid(const Corank1Group& g);
/// Default t grid: {j/50} plus {2^-j, j = 1..20}.
std::vector<double> default_t_grid();

/// Pointwise form of MCP(0, N) after the covector change of variables:
/// J(t p) >= t^{N-(k+1)} J(p) at every (grid node, t), with 1e-12 relative
/// slack for the exact-equality case p_z = 0.
PointwiseResult pointwise_contraction_check(const Corank1Group& g, double N,
                                            const std::vector<Covector>& p_grid,
                                            const std::vector<double>& t_grid);
PointwiseResult pointwise_contraction_check(const Corank1Group& g, double N);

/// Searches |p_z| <= eps_pz (including 0) and t in {2^-j} for a covector
/// violating the pointwise inequality; returns the worst witness found.
std::optional<PointwiseWitness> find_violation(const Corank1Group& g, double N, double eps_pz);

/// K-aware pointwise refutation used to confirm Monte-Carlo failures:
/// t^{k+1} J(tp) < t [s_K(t dist/sqrt(N-1)) / s_K(dist/sqrt(N-1))]^{N-1} J(p).
std::optional<PointwiseWitness> find_pointwise_violation(const Corank1Group& g, double K,
                                                         double N, double eps_pz);

struct McpReport {
  double K = 0.0, N = 0.0;
  std::vector<double> t_grid, lhs, rhs, margins, std_errors;
  enum class Verdict { pass, fail, inconclusive } verdict = Verdict::inconclusive;
  std::optional<PointwiseWitness> witness;
  std::uint64_t seed = 0;
  long samples = 0;
  int workers = 1;

  bool operator==(const McpReport&) const = default;
};

const char* to_string(McpReport::Verdict v);

/// Common-random-number Monte-Carlo MCP(K, N) verification on Omega = exp(A):
///   lhs(t) = mu(Omega_t) = t^{k+1} V(A) E[J(t p)],
///   rhs(t) = V(A) E[t (s_K(t |p_x|/sqrt(N-1))/s_K(|p_x|/sqrt(N-1)))^{N-1} J(p)]
/// (bracket = 1 when N = 1). Verdict: pass if every margin >= -3 sigma; fail
/// if some margin < -3 sigma and a pointwise witness confirms; inconclusive
/// otherwise. Bit-identical for fixed (seed, samples) at any worker count.
McpReport mcp_check(const Corank1Group& g, double K, double N, const OmegaSpec& omega,
                    const std::vector<double>& t_grid, long samples, std::uint64_t seed,
                    int workers = 1);

/// (k+1) + sup over the grids of log(J(tp)/J(p)) / log(t): the exponent below
/// which the pointwise contraction fails. Approaches k+3 from below as the
/// grids refine toward p_z = 0.
double estimate_curvature_exponent(const Corank1Group& g, const std::vector<Covector>& p_grid,
                                   const std::vector<double>& t_grid);
double estimate_curvature_exponent(const Corank1Group& g);

enum class FitMode { homothety, ball_volume };

struct FitResult {
  double slope = 0.0, intercept = 0.0, residual = 0.0;
  std::vector<double> t_grid, mu;
};

/// Least-squares slope of log mu(Omega_t) against log t. Homothety mode
/// scales the whole covector set (slope -> geodesic dimension); ball-volume
/// mode scales only the horizontal radius (slope -> Hausdorff dimension).
FitResult contraction_fit(const Corank1Group& g, const OmegaSpec& omega,
                          const std::vector<double>& t_grid, long samples, std::uint64_t seed,
                          FitMode mode = FitMode::homothety, double measure_scale = 1.0);

std::vector<double> default_fit_t_grid(int nodes = 15);

struct DilationConsistency {
  bool pass = true;
  struct Entry {
    double eps;
    double max_margin_gap;  // max_t |margin - margin_scaled|
    double allowance;       // 3 (sigma + sigma_scaled), maximized over t
  };
  std::vector<Entry> entries;
};

/// Verifies the dilation/scaling symmetry: the MCP(K, N) margins on Omega
/// match the MCP(eps^2 K, N) margins on the dilated set delta_{1/eps}(Omega)
/// (computed with the same random stream), within Monte-Carlo error.
DilationConsistency dilation_consistency_check(const Corank1Group& g, double K, double N,
                                               const OmegaSpec& omega,
                                               const std::vector<double>& eps_list,
                                               const std::vector<double>& t_grid, long samples,
                                               std::uint64_t seed);

}  // namespace carnot

#endif
