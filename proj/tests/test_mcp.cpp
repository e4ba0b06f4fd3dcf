#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "carnot/builtins.hpp"
#include "carnot/errors.hpp"
#include "carnot/lie_algebra.hpp"
#include "carnot/mcp.hpp"
#include "carnot/spec_io.hpp"

#include <cmath>
#include <numbers>

using namespace carnot;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

Corank1Group group(const std::string& name) { return *load_spec(name).group; }

OmegaSpec h3_box() { return OmegaSpec::uniform_box(2, 0.2, 1.0, -2.0, 2.0); }

std::vector<double> coarse_t() { return {1.0 / 64, 1.0 / 16, 0.125, 0.25, 0.5, 0.75, 1.0}; }

}  // namespace

TEST_CASE("s_K branches") {
  for (double t : {0.0, 0.3, 1.0, 2.5}) CHECK(s_K(0.0, t) == t);
  for (double t : {0.1, 1.0, 2.0}) CHECK(s_K(-1.0, t) == Approx(std::sinh(t)).epsilon(1e-15));
  CHECK(s_K(1.0, kPi / 2) == Approx(1.0).epsilon(1e-15));
  CHECK(s_K(4.0, kPi / 4) == Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(s_K(1.0, kPi), DomainError);
}

TEST_CASE("s_K is continuous in K at 0") {
  for (double t : {0.5, 1.0, 3.0}) {
    // Leading correction is -K t^3 / 6.
    CHECK(s_K(1e-9, t) == Approx(t - 1e-9 * t * t * t / 6).epsilon(1e-13));
    CHECK(s_K(-1e-9, t) == Approx(t + 1e-9 * t * t * t / 6).epsilon(1e-13));
    // Series and closed form agree across the switch point |K| t^2 = 1e-8.
    const double k_lo = -0.99e-8 / (t * t), k_hi = -1.01e-8 / (t * t);
    CHECK(s_K(k_lo, t) == Approx(s_K(k_hi, t)).epsilon(1e-10));
  }
}

TEST_CASE("pointwise contraction: h3 passes at N = 5, equality at p_z = 0") {
  const auto g = group("heisenberg:1");
  const auto res = pointwise_contraction_check(g, 5.0);
  CHECK(res.pass);
  CHECK(res.worst_ratio >= 1.0 - 1e-12);

  // A p_z = 0 node contracts at exactly t^2.
  Covector p;
  p.px = Eigen::VectorXd::Zero(2);
  p.px(0) = 0.7;
  p.pz = 0.0;
  for (double t : {0.25, 0.5, 0.75}) {
    Covector tp = p;
    tp.px *= t;
    CHECK(jacobian(g, tp) == Approx(t * t * jacobian(g, p)).epsilon(1e-14));
  }
}

TEST_CASE("pointwise contraction: h3 fails at N = 4.9 near p_z = 0") {
  const auto g = group("heisenberg:1");
  const auto res = pointwise_contraction_check(g, 4.9);
  CHECK(!res.pass);
  REQUIRE(res.witness.has_value());
  CHECK(std::abs(res.witness->p.pz) <= 0.1);
}

TEST_CASE("find_violation: h3") {
  const auto g = group("heisenberg:1");
  const auto w1 = find_violation(g, 4.99, 0.05);
  REQUIRE(w1.has_value());
  CHECK(std::abs(w1->p.pz) <= 0.05);
  CHECK(w1->lhs < w1->rhs);
  CHECK(!find_violation(g, 5.0, 0.05).has_value());
}

TEST_CASE("find_violation: k = 4 kernel group, threshold 7 (grid oracle)") {
  const auto g = group("kernel:2:1");
  // Independent scan: the contraction exponent e(p, t) with
  // J(tp) = t^e J(p) stays <= 2 and approaches 2 as p_z -> 0.
  double max_e = 0;
  for (double pz : {0.4, 0.1, 0.01, 1e-3, 1e-4}) {
    for (double t : {0.5, 0.25, 0.0625}) {
      Covector p;
      p.px = Eigen::VectorXd::Zero(4);
      p.px(2) = 1.0;
      p.pz = pz;
      Covector tp = p;
      tp.px *= t;
      tp.pz *= t;
      max_e = std::max(max_e, std::log(jacobian(g, tp) / jacobian(g, p)) / std::log(t));
    }
  }
  CHECK(max_e <= 2.0 + 1e-12);
  CHECK(max_e > 1.9);  // so N = 6.9 must fail and N = 7 must hold

  CHECK(find_violation(g, 6.9, 0.1).has_value());
  CHECK(!find_violation(g, 7.0, 0.1).has_value());
  CHECK(pointwise_contraction_check(g, 7.0).pass);
}

TEST_CASE("mcp_check: h3 verdicts for (0,5), (-1,5), (0,4)") {
  const auto g = group("heisenberg:1");
  const auto pass0 = mcp_check(g, 0.0, 5.0, h3_box(), coarse_t(), 100000, 42);
  CHECK(pass0.verdict == McpReport::Verdict::pass);
  for (double m : pass0.margins) CHECK(m >= 0.0);  // CRN makes the pass exact

  const auto passneg = mcp_check(g, -1.0, 5.0, h3_box(), coarse_t(), 100000, 42);
  CHECK(passneg.verdict == McpReport::Verdict::pass);

  const auto fail = mcp_check(g, 0.0, 4.0, h3_box(), coarse_t(), 100000, 42);
  CHECK(fail.verdict == McpReport::Verdict::fail);
  REQUIRE(fail.witness.has_value());
  CHECK(fail.witness->lhs < fail.witness->rhs);

  // Verdicts agree with the pointwise checker.
  CHECK(pointwise_contraction_check(g, 5.0).pass);
  CHECK(!pointwise_contraction_check(g, 4.0).pass);
}

TEST_CASE("mcp_check: h3 passes (0, 5) at one million samples") {
  const auto g = group("heisenberg:1");
  const auto rep = mcp_check(g, 0.0, 5.0, h3_box(), {0.25, 0.5, 1.0}, 1000000, 8);
  CHECK(rep.verdict == McpReport::Verdict::pass);
}

TEST_CASE("mcp_check: K = 0 rhs reduces exactly to t^N mu(Omega)") {
  const auto g = group("heisenberg:1");
  const auto rep = mcp_check(g, 0.0, 5.0, h3_box(), {0.25, 0.5, 1.0}, 20000, 3);
  const double mu = rep.lhs.back();  // t = 1
  CHECK(rep.rhs[0] == Approx(std::pow(0.25, 5.0) * mu).epsilon(1e-13));
  CHECK(rep.rhs[1] == Approx(std::pow(0.5, 5.0) * mu).epsilon(1e-13));
}

TEST_CASE("mcp_check works on ball pullbacks") {
  const auto g = group("heisenberg:1");
  const OmegaSpec ball = OmegaSpec::ball(2, 1.0, 2.0);
  const auto rep = mcp_check(g, 0.0, 5.0, ball, coarse_t(), 50000, 64);
  CHECK(rep.verdict == McpReport::Verdict::pass);
  for (double m : rep.margins) CHECK(m >= 0.0);
}

TEST_CASE("mcp_check: N = 1 bracket reduces to t") {
  const auto g = group("heisenberg:1");
  const auto rep = mcp_check(g, 0.0, 1.0, h3_box(), {0.5}, 20000, 7);
  // rhs = t mu(Omega); lhs = mu(Omega_t).
  const auto base = mcp_check(g, 0.0, 5.0, h3_box(), {1.0}, 20000, 7);
  CHECK(rep.rhs[0] == Approx(0.5 * base.lhs[0]).epsilon(1e-12));
}

TEST_CASE("mcp_check margins are monotone in K (same seed)") {
  const auto g = group("heisenberg:1");
  const auto k0 = mcp_check(g, 0.0, 5.0, h3_box(), coarse_t(), 50000, 99);
  const auto kneg = mcp_check(g, -1.0, 5.0, h3_box(), coarse_t(), 50000, 99);
  for (size_t i = 0; i < k0.margins.size(); ++i) CHECK(kneg.margins[i] >= k0.margins[i] - 1e-15);
}

TEST_CASE("mcp_check is bit-identical across worker counts") {
  const auto g = group("kernel:2:1");
  const OmegaSpec omega = OmegaSpec::uniform_box(4, 0.15, 0.9, -3.0, 3.0);
  const auto r1 = mcp_check(g, 0.0, 7.0, omega, coarse_t(), 30000, 2024, 1);
  const auto r4 = mcp_check(g, 0.0, 7.0, omega, coarse_t(), 30000, 2024, 4);
  const auto r8 = mcp_check(g, 0.0, 7.0, omega, coarse_t(), 30000, 2024, 8);
  auto strip = [](McpReport r) {  // the workers field is run metadata
    r.workers = 1;
    return r;
  };
  CHECK(strip(r1) == strip(r4));
  CHECK(strip(r1) == strip(r8));
  CHECK(r1.verdict == McpReport::Verdict::pass);
}

TEST_CASE("mcp_check rejects bad input") {
  const auto g = group("heisenberg:1");
  CHECK_THROWS_AS(mcp_check(g, 0.5, 5.0, h3_box(), coarse_t(), 100, 1), PositiveK);
  CHECK_THROWS_AS(mcp_check(g, 0.0, 0.5, h3_box(), coarse_t(), 100, 1), DomainError);
  // Box reaching the vertical boundary.
  CHECK_THROWS_AS(
      mcp_check(g, 0.0, 5.0, OmegaSpec::uniform_box(2, 0.2, 1.0, -6.3, 6.3), coarse_t(), 100, 1),
      BadOmega);
  // Box containing A p_x = 0 in its closure.
  CHECK_THROWS_AS(
      mcp_check(g, 0.0, 5.0, OmegaSpec::uniform_box(2, -1.0, 1.0, -2.0, 2.0), coarse_t(), 100, 1),
      BadOmega);
}

TEST_CASE("curvature exponent estimates approach k + 3") {
  CHECK(estimate_curvature_exponent(group("heisenberg:1")) == Approx(5.0).epsilon(0.01));
  CHECK(estimate_curvature_exponent(group("heisenberg:2")) == Approx(7.0).epsilon(0.01));
  CHECK(estimate_curvature_exponent(group("kernel:2:1")) == Approx(7.0).epsilon(0.01));
  // Large alpha squeezes the vertical domain; the default grids must adapt.
  CHECK(estimate_curvature_exponent(group("kernel:1:50")) == Approx(6.0).epsilon(0.01));
  CHECK(estimate_curvature_exponent(group("kernel:0:1,100")) == Approx(7.0).epsilon(0.01));
}

TEST_CASE("exponent estimate is consistent with the exact geodesic dimension") {
  for (const std::string name : {"heisenberg:1", "heisenberg:2", "kernel:1:1", "kernel:2:1"}) {
    const auto spec = load_spec(name);
    const long nd = geodesic_dimension(*spec.algebra, max_geodesic_growth(*spec.algebra));
    const double est = estimate_curvature_exponent(*spec.group);
    INFO(name);
    CHECK(est >= static_cast<double>(nd) - 0.05);
    CHECK(est <= static_cast<double>(nd) + 1e-9);
  }
}

TEST_CASE("contraction fit: homothety slope is the geodesic dimension") {
  const auto g = group("heisenberg:1");
  const auto fit =
      contraction_fit(g, h3_box(), default_fit_t_grid(), 100000, 31415, FitMode::homothety);
  CHECK(fit.slope == Approx(5.0).epsilon(0.02));
  CHECK(fit.residual < 0.01);
}

TEST_CASE("contraction fit: ball-volume slope is the Hausdorff dimension") {
  const auto g = group("heisenberg:1");
  const OmegaSpec ball = OmegaSpec::ball(2, 1.0, g.pz_bound() - 0.05);
  const auto fit =
      contraction_fit(g, ball, default_fit_t_grid(), 100000, 31415, FitMode::ball_volume);
  CHECK(fit.slope == Approx(4.0).epsilon(1e-6));
  CHECK_THROWS_AS(contraction_fit(g, h3_box(), default_fit_t_grid(), 1000, 1,
                                  FitMode::ball_volume),
                  BadOmega);
}

TEST_CASE("contraction fit: kernel group slope is 7") {
  const auto g = group("kernel:2:1");
  const auto fit = contraction_fit(g, OmegaSpec::uniform_box(4, 0.15, 0.9, -3.0, 3.0),
                                   default_fit_t_grid(), 60000, 777, FitMode::homothety);
  CHECK(fit.slope == Approx(7.0).epsilon(0.02));
}

TEST_CASE("contraction fit slope is invariant under measure rescaling") {
  const auto g = group("heisenberg:1");
  const auto f1 =
      contraction_fit(g, h3_box(), default_fit_t_grid(), 20000, 5, FitMode::homothety, 1.0);
  const auto f7 =
      contraction_fit(g, h3_box(), default_fit_t_grid(), 20000, 5, FitMode::homothety, 7.0);
  CHECK(f1.slope == Approx(f7.slope).epsilon(1e-12));
  CHECK(f7.intercept == Approx(f1.intercept + std::log(7.0)).epsilon(1e-9));
}

TEST_CASE("dilation consistency: margins transport through delta_eps") {
  const auto g = group("heisenberg:1");
  const auto res = dilation_consistency_check(g, -1.0, 5.0, h3_box(), {0.5, 1.0, 2.0},
                                              coarse_t(), 20000, 11);
  CHECK(res.pass);
  REQUIRE(res.entries.size() == 3);
  // eps = 1 is identical by construction.
  CHECK(res.entries[1].max_margin_gap == 0.0);
  // eps = 2 pairs K = -1 with K' = -4; gaps stay at rounding level.
  for (const auto& e : res.entries) CHECK(e.max_margin_gap < 1e-10);

  // The K = -0.25 vs K = -1 pairing under eps = 2, common seed.
  const auto pair = dilation_consistency_check(g, -0.25, 5.0, h3_box(), {2.0}, coarse_t(),
                                               20000, 11);
  CHECK(pair.pass);
  CHECK(pair.entries[0].max_margin_gap < 1e-10);
}

TEST_CASE("default grids satisfy their contracts") {
  const auto g = group("heisenberg:2");
  const auto grid = default_p_grid(g);
  CHECK(!grid.empty());
  for (const auto& p : grid) {
    CHECK(std::abs(p.pz) <= g.pz_bound() - 0.05 + 1e-12);
    CHECK(p.px.size() == g.k);
  }
  const auto ts = default_t_grid();
  CHECK(ts.front() > 0);
  CHECK(ts.back() == 1.0);
  for (size_t i = 1; i < ts.size(); ++i) CHECK(ts[i] > ts[i - 1]);
}
