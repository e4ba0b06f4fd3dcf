#include "carnot/mcp.hpp"

#include "carnot/errors.hpp"
#include "carnot/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>

namespace carnot {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kOmegaMargin = 0.01;
constexpr long kBlockSize = 8192;  // fixed reduction granularity, see mcp_check
}  // namespace

OmegaSpec OmegaSpec::box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, double pz_lo,
                         double pz_hi) {
  OmegaSpec o;
  o.kind = Kind::covector_box;
  o.px_lo = lo;
  o.px_hi = hi;
  o.pz_lo = pz_lo;
  o.pz_hi = pz_hi;
  return o;
}

OmegaSpec OmegaSpec::uniform_box(int k, double lo, double hi, double pz_lo, double pz_hi) {
  return box(Eigen::VectorXd::Constant(k, lo), Eigen::VectorXd::Constant(k, hi), pz_lo, pz_hi);
}

OmegaSpec OmegaSpec::ball(int k, double radius, double pz_cap) {
  OmegaSpec o;
  o.kind = Kind::covector_ball_pullback;
  o.px_lo = Eigen::VectorXd::Constant(k, -radius);
  o.px_hi = Eigen::VectorXd::Constant(k, radius);
  o.ball_radius = radius;
  o.pz_lo = -pz_cap;
  o.pz_hi = pz_cap;
  return o;
}

double OmegaSpec::volume(int k) const {
  const double vertical = pz_hi - pz_lo;
  if (kind == Kind::covector_ball_pullback) {
    const double vk = std::pow(kPi, k / 2.0) / std::tgamma(k / 2.0 + 1.0) *
                      std::pow(ball_radius, k);
    return vk * vertical;
  }
  double v = vertical;
  for (int i = 0; i < px_lo.size(); ++i) v *= px_hi(i) - px_lo(i);
  return v;
}

void validate_omega(const Corank1Group& g, const OmegaSpec& omega) {
  if (omega.kind == OmegaSpec::Kind::covector_box &&
      (omega.px_lo.size() != g.k || omega.px_hi.size() != g.k))
    throw BadOmega("box bounds must have one interval per horizontal coordinate");
  if (!(omega.pz_hi > omega.pz_lo)) throw BadOmega("empty vertical interval");
  if (omega.kind == OmegaSpec::Kind::covector_ball_pullback && !(omega.ball_radius > 0))
    throw BadOmega("ball radius must be positive");
  for (int i = 0; omega.kind == OmegaSpec::Kind::covector_box && i < g.k; ++i)
    if (!(omega.px_hi(i) > omega.px_lo(i))) throw BadOmega("empty box interval");

  const double cap = std::max(std::abs(omega.pz_lo), std::abs(omega.pz_hi));
  if (cap > g.pz_bound() - kOmegaMargin)
    throw BadOmega("vertical extent reaches within " + std::to_string(kOmegaMargin) +
                   " of the injectivity bound 2*pi/alpha_d");

  if (omega.kind == OmegaSpec::Kind::covector_box) {
    // Some 2x2 block must stay bounded away from zero across the whole box,
    // so that closure(Omega) avoids {A p_x = 0}.
    double best = 0.0;
    for (int i = 0; i < g.d; ++i) {
      const int o = g.block_offset(i);
      double n2 = 0.0;
      for (int c = o; c < o + 2; ++c) {
        const double lo = omega.px_lo(c), hi = omega.px_hi(c);
        const double m = (lo > 0) ? lo : (hi < 0 ? -hi : 0.0);
        n2 += m * m;
      }
      best = std::max(best, std::sqrt(n2));
    }
    if (best < kOmegaMargin)
      throw BadOmega("no rotation block is bounded away from A p_x = 0 by " +
                     std::to_string(kOmegaMargin));
  }
}

double s_K(double K, double t) {
  if (t < 0) throw DomainError("s_K needs t >= 0");
  if (K > 0 && !(t < kPi / std::sqrt(K)))
    throw DomainError("s_K(K > 0) requires t < pi/sqrt(K)");
  const double u = K * t * t;
  if (std::abs(u) < 1e-8) {
    // Unified series t * sum (-u)^m / (2m+1)! valid across K = 0.
    return t * (1.0 - u / 6.0 + u * u / 120.0);
  }
  if (K > 0) return std::sin(std::sqrt(K) * t) / std::sqrt(K);
  return std::sinh(std::sqrt(-K) * t) / std::sqrt(-K);
}

namespace {

std::vector<double> log_spaced(double lo, double hi, int nodes) {
  std::vector<double> out;
  if (nodes == 1) return {lo};
  const double l0 = std::log(lo), l1 = std::log(hi);
  for (int i = 0; i < nodes; ++i)
    out.push_back(std::exp(l0 + (l1 - l0) * static_cast<double>(i) / (nodes - 1)));
  return out;
}

Covector make_covector(const Corank1Group& g, const std::vector<int>& blocks, double radius) {
  Covector p;
  p.px = Eigen::VectorXd::Zero(g.k);
  for (int b : blocks) p.px(g.block_offset(b)) = radius;
  p.pz = 0.0;
  return p;
}

Covector scaled(const Covector& p, double t) { return Covector{t * p.px, t * p.pz}; }

}  // namespace

std::vector<Covector> default_p_grid(const Corank1Group& g) {
  // Radius patterns: each block alone, then all blocks together.
  std::vector<std::vector<int>> patterns;
  for (int b = 0; b < g.d; ++b) patterns.push_back({b});
  if (g.d > 1) {
    std::vector<int> all(static_cast<size_t>(g.d));
    for (int b = 0; b < g.d; ++b) all[static_cast<size_t>(b)] = b;
    patterns.push_back(std::move(all));
  }

  const std::vector<double> radii = log_spaced(1e-3, 3.0, 20);

  const double pz_max = g.pz_bound() - 0.05;
  if (!(pz_max > 0))
    throw DomainError("vertical injectivity domain thinner than the 0.05 grid margin");
  // Log-spaced toward 0 up to `mid`, linear from there to the domain edge.
  const double mid = std::min(0.1, 0.5 * pz_max);
  std::vector<double> pz_nodes{0.0};
  for (double v : log_spaced(std::min(1e-3, mid / 100.0), mid, 15)) {
    pz_nodes.push_back(v);
    pz_nodes.push_back(-v);
  }
  for (int i = 1; i <= 15; ++i) {
    const double v = mid + (pz_max - mid) * static_cast<double>(i) / 15.0;
    pz_nodes.push_back(v);
    pz_nodes.push_back(-v);
  }

  std::vector<Covector> grid;
  for (const auto& pat : patterns)
    for (double r : radii)
      for (double pz : pz_nodes) {
        Covector p = make_covector(g, pat, r);
        p.pz = pz;
        grid.push_back(std::move(p));
      }
  return grid;
}

std::vector<double> default_t_grid() {
  std::vector<double> t;
  for (int j = 1; j <= 50; ++j) t.push_back(static_cast<double>(j) / 50.0);
  for (int j = 1; j <= 20; ++j) t.push_back(std::ldexp(1.0, -j));
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

PointwiseResult pointwise_contraction_check(const Corank1Group& g, double N,
                                            const std::vector<Covector>& p_grid,
                                            const std::vector<double>& t_grid) {
  const double expo = N - (g.k + 1);
  PointwiseResult res;
  res.worst_ratio = std::numeric_limits<double>::infinity();
  for (const Covector& p : p_grid) {
    if (!in_injectivity_domain(g, p)) continue;
    const double jp = jacobian(g, p);
    if (jp <= 0.0) continue;
    for (double t : t_grid) {
      if (!(t > 0.0) || t > 1.0) continue;
      const double lhs = jacobian(g, scaled(p, t));
      const double rhs = std::pow(t, expo) * jp;
      const double ratio = lhs / rhs;
      if (ratio < res.worst_ratio) res.worst_ratio = ratio;
      if (lhs < rhs * (1.0 - 1e-12) &&
          (!res.witness || ratio < res.witness->lhs / res.witness->rhs))
        res.witness = PointwiseWitness{p, t, lhs, rhs};
    }
  }
  res.pass = !res.witness.has_value();
  return res;
}

PointwiseResult pointwise_contraction_check(const Corank1Group& g, double N) {
  return pointwise_contraction_check(g, N, default_p_grid(g), default_t_grid());
}

namespace {

std::optional<PointwiseWitness> violation_search(const Corank1Group& g, double K, double N,
                                                 double eps_pz) {
  std::vector<std::vector<int>> patterns;
  for (int b = 0; b < g.d; ++b) patterns.push_back({b});
  if (g.d > 1) {
    std::vector<int> all(static_cast<size_t>(g.d));
    for (int b = 0; b < g.d; ++b) all[static_cast<size_t>(b)] = b;
    patterns.push_back(std::move(all));
  }
  const std::vector<double> radii = log_spaced(1e-2, 3.0, 12);
  std::vector<double> pz_nodes{0.0};
  const double cap = std::min(eps_pz, g.pz_bound() - 0.05);
  for (double v : log_spaced(std::max(1e-6, cap / 1e4), cap, 12)) {
    pz_nodes.push_back(v);
    pz_nodes.push_back(-v);
  }
  std::vector<double> ts;
  for (int j = 1; j <= 30; ++j) ts.push_back(std::ldexp(1.0, -j));

  std::optional<PointwiseWitness> worst;
  double worst_ratio = 1.0;
  for (const auto& pat : patterns)
    for (double r : radii)
      for (double pz : pz_nodes) {
        Covector p = make_covector(g, pat, r);
        p.pz = pz;
        if (!in_injectivity_domain(g, p)) continue;
        const double jp = jacobian(g, p);
        if (jp <= 0.0) continue;
        const double dist = p.px.norm();
        for (double t : ts) {
          // lhs/rhs densities of the MCP integrand at (p, t).
          const double lhs = std::pow(t, g.k + 1) * jacobian(g, scaled(p, t));
          double bracket = 1.0;
          if (N > 1.0) {
            const double root = std::sqrt(N - 1.0);
            bracket = std::pow(s_K(K, t * dist / root) / s_K(K, dist / root), N - 1.0);
          }
          const double rhs = t * bracket * jp;
          if (lhs < rhs * (1.0 - 1e-12)) {
            const double ratio = lhs / rhs;
            if (ratio < worst_ratio) {
              worst_ratio = ratio;
              worst = PointwiseWitness{p, t, lhs, rhs};
            }
          }
        }
      }
  return worst;
}

}  // namespace

std::optional<PointwiseWitness> find_violation(const Corank1Group& g, double N, double eps_pz) {
  return violation_search(g, 0.0, N, eps_pz);
}

std::optional<PointwiseWitness> find_pointwise_violation(const Corank1Group& g, double K,
                                                         double N, double eps_pz) {
  return violation_search(g, K, N, eps_pz);
}

const char* to_string(McpReport::Verdict v) {
  switch (v) {
    case McpReport::Verdict::pass: return "pass";
    case McpReport::Verdict::fail: return "fail";
    default: return "inconclusive";
  }
}

namespace {

// Deterministic sampler: sample s is a pure function of (seed, s).
class OmegaSampler {
public:
  OmegaSampler(const Corank1Group& g, const OmegaSpec& omega, std::uint64_t seed)
      : g_(g), omega_(omega), rng_(seed), stride_(static_cast<std::uint64_t>(g.k) + 4) {}

  Covector sample(long s) const {
    const std::uint64_t base = static_cast<std::uint64_t>(s) * stride_;
    Covector p;
    p.px.resize(g_.k);
    if (omega_.kind == OmegaSpec::Kind::covector_box) {
      for (int c = 0; c < g_.k; ++c)
        p.px(c) = rng_.uniform(base + static_cast<std::uint64_t>(c), omega_.px_lo(c),
                               omega_.px_hi(c));
      p.pz = rng_.uniform(base + static_cast<std::uint64_t>(g_.k), omega_.pz_lo, omega_.pz_hi);
      return p;
    }
    // Uniform in the |p_x| <= r ball: normal direction, radius by u^(1/k).
    double norm2 = 0.0;
    for (int c = 0; c < g_.k; ++c) {
      p.px(c) = rng_.normal(base + 2 * static_cast<std::uint64_t>(c));
      norm2 += p.px(c) * p.px(c);
    }
    const std::uint64_t tail = base + 2 * static_cast<std::uint64_t>(g_.k);
    const double u = rng_.uniform01(tail);
    const double r = omega_.ball_radius * std::pow(u, 1.0 / g_.k);
    p.px *= (norm2 > 0 ? r / std::sqrt(norm2) : 0.0);
    p.pz = rng_.uniform(tail + 1, omega_.pz_lo, omega_.pz_hi);
    return p;
  }

private:
  const Corank1Group& g_;
  const OmegaSpec& omega_;
  CounterRng rng_;
  std::uint64_t stride_;
};

// Per-(block, t) partial sums. Combined sequentially in block order so the
// result is independent of how blocks were scheduled onto workers.
struct BlockTotals {
  std::vector<double> sum_lhs, sum_rhs, sum_diff, sum_diff2;
};

}  // namespace

McpReport mcp_check(const Corank1Group& g, double K, double N, const OmegaSpec& omega,
                    const std::vector<double>& t_grid, long samples, std::uint64_t seed,
                    int workers) {
  if (K > 0)
    throw PositiveK("MCP(K > 0) forces bounded spaces; Carnot groups are unbounded");
  if (N < 1.0) throw DomainError("mcp_check requires N >= 1");
  if (samples <= 0) throw DomainError("mcp_check requires samples >= 1");
  if (t_grid.empty()) throw DomainError("empty t grid");
  for (double t : t_grid)
    if (!(t > 0.0) || t > 1.0) throw DomainError("t grid must lie in (0, 1]");
  validate_omega(g, omega);

  const int nt = static_cast<int>(t_grid.size());
  const long nblocks = (samples + kBlockSize - 1) / kBlockSize;
  std::vector<BlockTotals> totals(static_cast<size_t>(nblocks));
  const OmegaSampler sampler(g, omega, seed);
  const double root = N > 1.0 ? std::sqrt(N - 1.0) : 1.0;

  // Per-t constants: lhs prefactor t^{k+1}; for K = 0 the whole rhs factor
  // t * t^{N-1} is sample-independent.
  std::vector<double> pref_lhs(static_cast<size_t>(nt)), pref_rhs0(static_cast<size_t>(nt));
  for (int i = 0; i < nt; ++i) {
    const double t = t_grid[static_cast<size_t>(i)];
    pref_lhs[static_cast<size_t>(i)] = std::pow(t, g.k + 1);
    pref_rhs0[static_cast<size_t>(i)] = N > 1.0 ? std::pow(t, N) : t;
  }

  auto run_block = [&](long b) {
    BlockTotals bt;
    bt.sum_lhs.assign(static_cast<size_t>(nt), 0.0);
    bt.sum_rhs.assign(static_cast<size_t>(nt), 0.0);
    bt.sum_diff.assign(static_cast<size_t>(nt), 0.0);
    bt.sum_diff2.assign(static_cast<size_t>(nt), 0.0);
    const long lo = b * kBlockSize, hi = std::min(samples, (b + 1) * kBlockSize);
    for (long s = lo; s < hi; ++s) {
      const Covector p = sampler.sample(s);
      const double jp = jacobian(g, p);
      const double dist = p.px.norm();
      const double sk_base = (K < 0 && N > 1.0) ? s_K(K, dist / root) : 1.0;
      for (int i = 0; i < nt; ++i) {
        const double t = t_grid[static_cast<size_t>(i)];
        const double lhs = pref_lhs[static_cast<size_t>(i)] * jacobian(g, scaled(p, t));
        double rhs;
        if (K < 0 && N > 1.0)
          rhs = t * std::pow(s_K(K, t * dist / root) / sk_base, N - 1.0) * jp;
        else
          rhs = pref_rhs0[static_cast<size_t>(i)] * jp;
        const double diff = lhs - rhs;
        bt.sum_lhs[static_cast<size_t>(i)] += lhs;
        bt.sum_rhs[static_cast<size_t>(i)] += rhs;
        bt.sum_diff[static_cast<size_t>(i)] += diff;
        bt.sum_diff2[static_cast<size_t>(i)] += diff * diff;
      }
    }
    totals[static_cast<size_t>(b)] = std::move(bt);
  };

  if (workers <= 1) {
    for (long b = 0; b < nblocks; ++b) run_block(b);
  } else {
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (long b = next.fetch_add(1); b < nblocks; b = next.fetch_add(1)) run_block(b);
      });
    for (auto& th : pool) th.join();
  }

  McpReport rep;
  rep.K = K;
  rep.N = N;
  rep.t_grid = t_grid;
  rep.seed = seed;
  rep.samples = samples;
  rep.workers = workers;
  const double vol = omega.volume(g.k);
  for (int i = 0; i < nt; ++i) {
    double sl = 0, sr = 0, sd = 0, sd2 = 0;
    for (long b = 0; b < nblocks; ++b) {
      const auto& bt = totals[static_cast<size_t>(b)];
      sl += bt.sum_lhs[static_cast<size_t>(i)];
      sr += bt.sum_rhs[static_cast<size_t>(i)];
      sd += bt.sum_diff[static_cast<size_t>(i)];
      sd2 += bt.sum_diff2[static_cast<size_t>(i)];
    }
    const double inv = 1.0 / static_cast<double>(samples);
    const double mean_l = sl * inv, mean_r = sr * inv, mean_d = sd * inv;
    const double var_d = samples > 1 ? std::max(0.0, (sd2 - sd * sd * inv) / (samples - 1)) : 0.0;
    rep.lhs.push_back(vol * mean_l);
    rep.rhs.push_back(vol * mean_r);
    rep.margins.push_back(mean_l > 0 ? mean_d / mean_l : 0.0);
    rep.std_errors.push_back(mean_l > 0 ? std::sqrt(var_d * inv) / mean_l : 0.0);
  }

  bool suspicious = false;
  for (int i = 0; i < nt; ++i)
    if (rep.margins[static_cast<size_t>(i)] < -3.0 * rep.std_errors[static_cast<size_t>(i)])
      suspicious = true;
  if (!suspicious) {
    rep.verdict = McpReport::Verdict::pass;
  } else {
    rep.witness = find_pointwise_violation(g, K, N, 0.25);
    rep.verdict = rep.witness ? McpReport::Verdict::fail : McpReport::Verdict::inconclusive;
  }
  return rep;
}

double estimate_curvature_exponent(const Corank1Group& g, const std::vector<Covector>& p_grid,
                                   const std::vector<double>& t_grid) {
  double sup = -std::numeric_limits<double>::infinity();
  for (const Covector& p : p_grid) {
    if (!in_injectivity_domain(g, p)) continue;
    const double jp = jacobian(g, p);
    if (jp <= 0.0) continue;
    for (double t : t_grid) {
      if (!(t > 0.0) || t >= 1.0) continue;
      const double jt = jacobian(g, scaled(p, t));
      if (jt <= 0.0) continue;
      sup = std::max(sup, std::log(jt / jp) / std::log(t));
    }
  }
  if (!std::isfinite(sup)) throw DomainError("no admissible grid node");
  return static_cast<double>(g.k + 1) + sup;
}

double estimate_curvature_exponent(const Corank1Group& g) {
  return estimate_curvature_exponent(g, default_p_grid(g), default_t_grid());
}

std::vector<double> default_fit_t_grid(int nodes) {
  std::vector<double> t;
  for (int i = 0; i < nodes; ++i)
    t.push_back(std::pow(10.0, -3.0 + 2.0 * static_cast<double>(i) / (nodes - 1)));
  return t;
}

FitResult contraction_fit(const Corank1Group& g, const OmegaSpec& omega,
                          const std::vector<double>& t_grid, long samples, std::uint64_t seed,
                          FitMode mode, double measure_scale) {
  if (mode == FitMode::ball_volume && omega.kind != OmegaSpec::Kind::covector_ball_pullback)
    throw BadOmega("ball-volume mode needs a ball-pullback omega");
  if (samples <= 0 || t_grid.empty()) throw DomainError("contraction_fit needs samples and t grid");
  validate_omega(g, omega);

  const OmegaSampler sampler(g, omega, seed);
  const int nt = static_cast<int>(t_grid.size());
  std::vector<double> acc(static_cast<size_t>(nt), 0.0);
  for (long s = 0; s < samples; ++s) {
    const Covector p = sampler.sample(s);
    for (int i = 0; i < nt; ++i) {
      const double t = t_grid[static_cast<size_t>(i)];
      Covector q = p;
      q.px *= t;
      if (mode == FitMode::homothety) q.pz *= t;
      acc[static_cast<size_t>(i)] += jacobian(g, q);
    }
  }
  const double vol = omega.volume(g.k);
  FitResult fit;
  fit.t_grid = t_grid;
  std::vector<double> lx, ly;
  for (int i = 0; i < nt; ++i) {
    const double t = t_grid[static_cast<size_t>(i)];
    const double prefactor = mode == FitMode::homothety ? std::pow(t, g.k + 1) : std::pow(t, g.k);
    const double mu = measure_scale * prefactor * vol * acc[static_cast<size_t>(i)] /
                      static_cast<double>(samples);
    fit.mu.push_back(mu);
    if (mu > 0) {
      lx.push_back(std::log(t));
      ly.push_back(std::log(mu));
    }
  }
  if (lx.size() < 2) throw DomainError("not enough positive measure estimates to fit");
  const double n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

DilationConsistency dilation_consistency_check(const Corank1Group& g, double K, double N,
                                               const OmegaSpec& omega,
                                               const std::vector<double>& eps_list,
                                               const std::vector<double>& t_grid, long samples,
                                               std::uint64_t seed) {
  if (!(K < 0)) throw DomainError("dilation consistency needs K < 0");
  const McpReport base = mcp_check(g, K, N, omega, t_grid, samples, seed);
  DilationConsistency out;
  for (double eps : eps_list) {
    if (!(eps > 0)) throw DomainError("dilation factor must be positive");
    OmegaSpec scaled_omega = omega;
    scaled_omega.px_lo /= eps;
    scaled_omega.px_hi /= eps;
    scaled_omega.ball_radius /= eps;
    const McpReport other = mcp_check(g, eps * eps * K, N, scaled_omega, t_grid, samples, seed);
    DilationConsistency::Entry e{eps, 0.0, 0.0};
    for (size_t i = 0; i < t_grid.size(); ++i) {
      e.max_margin_gap = std::max(e.max_margin_gap,
                                  std::abs(base.margins[i] - other.margins[i]));
      e.allowance = std::max(e.allowance, 3.0 * (base.std_errors[i] + other.std_errors[i]));
    }
    if (e.max_margin_gap > std::max(e.allowance, 1e-12)) out.pass = false;
    out.entries.push_back(e);
  }
  return out;
}

}  // namespace carnot
