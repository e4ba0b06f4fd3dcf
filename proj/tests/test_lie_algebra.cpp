#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "carnot/builtins.hpp"
#include "carnot/errors.hpp"
#include "carnot/lie_algebra.hpp"
#include "carnot/spec_io.hpp"

using namespace carnot;

namespace {

StratifiedLieAlgebra builtin(const std::string& name) {
  return validate_algebra(*builtin_algebra(name));
}

RatVec unit(int n, int i) {
  RatVec v(static_cast<size_t>(n), Rational(0));
  v[static_cast<size_t>(i - 1)] = 1;
  return v;
}

RatVec direction(std::initializer_list<int> entries) {
  RatVec v;
  for (int e : entries) v.push_back(Rational(e));
  return v;
}

}  // namespace

TEST_CASE("heisenberg h3 validates, step 2") {
  const auto h3 = builtin("heisenberg:1");
  CHECK(h3.n() == 3);
  CHECK(h3.rank() == 2);
  CHECK(h3.step() == 2);
}

TEST_CASE("engel validates, step 3") {
  const auto engel = builtin("engel");
  CHECK(engel.n() == 4);
  CHECK(engel.rank() == 2);
  CHECK(engel.step() == 3);
}

TEST_CASE("antisymmetry violation: c12 = c21 = 1") {
  AlgebraSpecData s;
  s.n = 3;
  s.layers = {1, 1, 2};
  s.brackets.push_back({{1, 2}, unit(3, 3)});
  s.brackets.push_back({{2, 1}, unit(3, 3)});  // should be -e3
  CHECK_THROWS_AS(validate_algebra(s), AntisymmetryViolation);
}

TEST_CASE("jacobi violation on a rank-3 step-3 table") {
  // e4 = [e1,e2], e5 = [e1,e3], e6 = [e2,e3]; [e1,e6] = e7, [e2,e5] = -l e7,
  // [e3,e4] = m e7. Jacobi on (e1,e2,e3) gives (-m - 1 - l) e7 = 0.
  auto make = [](int l, int m) {
    AlgebraSpecData s;
    s.n = 7;
    s.layers = {1, 1, 1, 2, 2, 2, 3};
    s.brackets.push_back({{1, 2}, unit(7, 4)});
    s.brackets.push_back({{1, 3}, unit(7, 5)});
    s.brackets.push_back({{2, 3}, unit(7, 6)});
    s.brackets.push_back({{1, 6}, unit(7, 7)});
    RatVec v25(7, Rational(0));
    v25[6] = -l;
    s.brackets.push_back({{2, 5}, v25});
    RatVec v34(7, Rational(0));
    v34[6] = m;
    s.brackets.push_back({{3, 4}, v34});
    return s;
  };
  CHECK_THROWS_AS(validate_algebra(make(1, 1)), JacobiViolation);
  CHECK_NOTHROW(validate_algebra(make(-2, 1)));
}

TEST_CASE("grading violation: bracket lands in the wrong stratum") {
  AlgebraSpecData s;
  s.n = 3;
  s.layers = {1, 1, 2};
  s.brackets.push_back({{1, 2}, unit(3, 1)});  // [g1,g1] must land in g2
  CHECK_THROWS_AS(validate_algebra(s), GradingViolation);
}

TEST_CASE("not stratified: empty second stratum span") {
  AlgebraSpecData s;
  s.n = 4;
  s.layers = {1, 1, 2, 3};
  s.brackets.push_back({{1, 2}, unit(4, 3)});  // no [g1, g2] bracket at all
  CHECK_THROWS_AS(validate_algebra(s), NotStratified);
}

TEST_CASE("growth vectors") {
  CHECK(growth_vector(builtin("engel")) == std::vector<int>{2, 3, 4});
  CHECK(growth_vector(builtin("heisenberg:1")) == std::vector<int>{2, 3});
  // Free step-2 rank-3: dim g2 = 3 choose 2 = 3 by bracket enumeration.
  CHECK(growth_vector(builtin("free:3:2")) == std::vector<int>{3, 6});
}

TEST_CASE("hausdorff dimensions") {
  CHECK(hausdorff_dimension(builtin("engel")) == 7);
  CHECK(hausdorff_dimension(builtin("heisenberg:1")) == 4);
  CHECK(hausdorff_dimension(builtin("kernel:2:1")) == 6);   // corank-1, k = 4
  CHECK(hausdorff_dimension(builtin("kernel:1:1")) == 5);   // corank-1, k = 3
  CHECK(hausdorff_dimension(builtin("abelian:3")) == 3);
}

TEST_CASE("adjoint power spans") {
  const auto engel = builtin("engel");
  const auto spans = adjoint_power_span(engel, direction({1, 0}), 2);
  REQUIRE(spans.size() == 3);
  CHECK(spans[0].rows() == 2);
  CHECK(spans[1].rows() == 1);  // ad_{X1}(g1) = span{X3}
  CHECK(spans[2].rows() == 0);  // [X1, X3] = 0

  const auto h3 = builtin("heisenberg:1");
  const auto hs = adjoint_power_span(h3, direction({1, 0}), 2);
  CHECK(hs[0].rows() == 2);
  CHECK(hs[1].rows() == 1);
  CHECK(hs[2].rows() == 0);
  // g1 + ad(g1) is everything.
  RatMatrix stacked = hs[0];
  for (int r = 0; r < hs[1].rows(); ++r) stacked.append_row(hs[1].row(r));
  CHECK(exact_rank(stacked) == 3);

  // Nilpotency: spans beyond the step vanish for any direction.
  const auto tail = adjoint_power_span(engel, direction({2, 3}), 5);
  for (size_t j = 3; j < tail.size(); ++j) CHECK(tail[j].rows() == 0);

  CHECK_THROWS_AS(adjoint_power_span(engel, direction({0, 0}), 2), ZeroDirection);
}

TEST_CASE("line geodesic growth on engel") {
  const auto engel = builtin("engel");
  const auto f2 = line_geodesic_growth(engel, direction({0, 1}));
  CHECK(f2.geodesic_growth == std::vector<int>{2, 3, 4});
  CHECK(f2.ample);
  CHECK(f2.geodesic_step == 3);

  const auto f1 = line_geodesic_growth(engel, direction({1, 0}));
  CHECK(f1.geodesic_growth == std::vector<int>{2, 3});
  CHECK(!f1.ample);
}

TEST_CASE("line geodesic growth on h3 is (2,3) for every direction") {
  const auto h3 = builtin("heisenberg:1");
  for (auto u : {direction({1, 0}), direction({0, 1}), direction({3, -7}), direction({-2, 5})}) {
    const auto f = line_geodesic_growth(h3, u);
    CHECK(f.geodesic_growth == std::vector<int>{2, 3});
    CHECK(f.ample);
  }
}

TEST_CASE("max geodesic growth") {
  const auto engel_flag = max_geodesic_growth(builtin("engel"), 32);
  CHECK(engel_flag.geodesic_growth == std::vector<int>{2, 3, 4});
  CHECK(engel_flag.ample);
  CHECK(!engel_flag.inconclusive);

  CHECK(max_geodesic_growth(builtin("heisenberg:1")).geodesic_growth == std::vector<int>{2, 3});
  // Fat groups: (k, n).
  CHECK(max_geodesic_growth(builtin("heisenberg:2")).geodesic_growth == std::vector<int>{4, 5});
}

TEST_CASE("free:3:2 has no ample line directions") {
  CHECK_THROWS_AS(max_geodesic_growth(builtin("free:3:2")), NotAmple);
}

TEST_CASE("geodesic dimension") {
  auto ndim = [](const StratifiedLieAlgebra& alg) {
    return geodesic_dimension(alg, max_geodesic_growth(alg));
  };
  CHECK(ndim(builtin("engel")) == 10);  // 2 + 3 + 5
  CHECK(ndim(builtin("heisenberg:1")) == 5);
  CHECK(ndim(builtin("heisenberg:2")) == 7);
  CHECK(ndim(builtin("heisenberg:3")) == 9);
  // Fat rank-k dim-n: 3n - 2k.
  const auto h5 = builtin("heisenberg:2");
  CHECK(ndim(h5) == 3 * h5.n() - 2 * h5.rank());
  CHECK(ndim(builtin("abelian:3")) == 3);
}

TEST_CASE("rifford bound") {
  CHECK(rifford_bound(builtin("engel")) == 9);
  CHECK(rifford_bound(builtin("heisenberg:1")) == 5);  // 4 + 3 - 2
  // Fat groups attain the bound.
  const auto h5 = builtin("heisenberg:2");
  CHECK(rifford_bound(h5) == geodesic_dimension(h5, max_geodesic_growth(h5)));
}

TEST_CASE("fatness") {
  CHECK(is_fat(builtin("heisenberg:1")).fat);
  CHECK(is_fat(builtin("heisenberg:2")).fat);

  const auto engel_fat = is_fat(builtin("engel"));
  CHECK(!engel_fat.fat);
  REQUIRE(engel_fat.witness.has_value());
  CHECK(*engel_fat.witness == direction({1, 0}));

  const auto kernel_fat = is_fat(builtin("kernel:2:1"));
  CHECK(!kernel_fat.fat);
  REQUIRE(kernel_fat.witness.has_value());
  // Witness lies in ker A: only the first two (kernel block) coordinates.
  CHECK((*kernel_fat.witness)[2] == 0);
  CHECK((*kernel_fat.witness)[3] == 0);

  CHECK(!is_fat(builtin("free:3:2")).fat);
  CHECK(is_fat(builtin("abelian:3")).fat);
}

TEST_CASE("abnormal lines") {
  const auto engel = builtin("engel");
  const auto abn = has_abnormal_line(engel, direction({1, 0}));
  CHECK(abn.abnormal);
  REQUIRE(abn.annihilator.has_value());
  // Annihilator is the dual of e4 (up to scale).
  const RatVec lam = *abn.annihilator;
  CHECK(lam[0] == 0);
  CHECK(lam[1] == 0);
  CHECK(lam[2] == 0);
  CHECK(lam[3] != 0);
  CHECK(!has_abnormal_line(engel, direction({0, 1})).abnormal);

  const auto h3 = builtin("heisenberg:1");
  for (auto u : {direction({1, 0}), direction({0, 1}), direction({5, 3})})
    CHECK(!has_abnormal_line(h3, u).abnormal);

  // Kernel-block directions of the corank-1 family are abnormal.
  const auto kg = builtin("kernel:2:1");
  CHECK(has_abnormal_line(kg, direction({1, 0, 0, 0})).abnormal);
  CHECK(has_abnormal_line(kg, direction({0, 1, 0, 0})).abnormal);
  CHECK(!has_abnormal_line(kg, direction({0, 0, 1, 0})).abnormal);
}

TEST_CASE("quaternionic Heisenberg: fat step-2 group with dim g2 = 3 < k") {
  // R^4 + Im H with [u, v]_c = <J_c u, v> for the three left quaternion
  // multiplications; exercises the sampling branch of is_fat.
  AlgebraSpecData s;
  s.n = 7;
  s.layers = {1, 1, 1, 1, 2, 2, 2};
  auto put = [&](int i, int j, int target, int sign) {
    RatVec v(7, Rational(0));
    v[static_cast<size_t>(target - 1)] = sign;
    s.brackets.push_back({{i, j}, v});
  };
  put(1, 2, 5, 1);
  put(3, 4, 5, 1);
  put(1, 3, 6, 1);
  put(2, 4, 6, -1);
  put(1, 4, 7, 1);
  put(2, 3, 7, 1);
  const auto q = validate_algebra(s);

  CHECK(growth_vector(q) == std::vector<int>{4, 7});
  CHECK(hausdorff_dimension(q) == 10);  // 4 + 2*3
  const auto flag = max_geodesic_growth(q);
  CHECK(flag.geodesic_growth == std::vector<int>{4, 7});
  CHECK(geodesic_dimension(q, flag) == 13);  // 3n - 2k
  CHECK(rifford_bound(q) == 13);

  const auto fat = is_fat(q);
  CHECK(fat.fat);
  CHECK(!fat.exact);  // certified by sampling, not by a closed-form criterion
  CHECK(!find_abnormal_line_direction(q).has_value());
}

TEST_CASE("product h3 x h3: step-2, dim g2 = 2 < k, not fat") {
  AlgebraSpecData s;
  s.n = 6;
  s.layers = {1, 1, 1, 1, 2, 2};
  RatVec v5(6, Rational(0)), v6(6, Rational(0));
  v5[4] = 1;
  v6[5] = 1;
  s.brackets.push_back({{1, 2}, v5});
  s.brackets.push_back({{3, 4}, v6});
  const auto prod = validate_algebra(s);
  const auto fat = is_fat(prod);
  CHECK(!fat.fat);
  REQUIRE(fat.witness.has_value());
  CHECK(has_abnormal_line(prod, *fat.witness).abnormal);
  // Lines inside one factor stall: ample flags need both factors.
  const auto f = line_geodesic_growth(prod, direction({1, 0, 0, 0}));
  CHECK(!f.ample);
  CHECK(f.geodesic_growth == std::vector<int>{4, 5});
  const auto mix = line_geodesic_growth(prod, direction({1, 1, 1, 2}));
  CHECK(mix.ample);
  CHECK(mix.geodesic_growth == std::vector<int>{4, 6});
  CHECK(geodesic_dimension(prod, max_geodesic_growth(prod)) == 10);  // = N_R, step 2
  CHECK(rifford_bound(prod) == 10);
}

TEST_CASE("ideal iff fat across the library") {
  CHECK(is_ideal(builtin("heisenberg:1")));
  CHECK(!is_ideal(builtin("engel")));
  CHECK(!is_ideal(builtin("kernel:1:1")));
  CHECK(!is_ideal(builtin("kernel:2:1")));
}

TEST_CASE("fat = false iff an abnormal line direction exists (library sweep)") {
  for (const auto& name : standard_library_names()) {
    const auto alg = builtin(name);
    const auto fat = is_fat(alg);
    const auto abnormal_dir = find_abnormal_line_direction(alg);
    INFO(name);
    CHECK(fat.fat == !abnormal_dir.has_value());
    if (fat.witness) {
      // The fatness witness itself carries an abnormal line (step <= 2), or
      // at least some direction does (step >= 3).
      if (alg.step() <= 2) CHECK(has_abnormal_line(alg, *fat.witness).abnormal);
    }
  }
}

TEST_CASE("dimension orderings across the library") {
  for (const auto& name : standard_library_names()) {
    const auto alg = builtin(name);
    INFO(name);
    const auto growth = growth_vector(alg);
    CHECK(growth.front() == alg.rank());
    CHECK(growth.back() == alg.n());
    for (size_t i = 1; i < growth.size(); ++i) CHECK(growth[i] >= growth[i - 1]);

    const long q = hausdorff_dimension(alg);
    CHECK(q >= alg.n());
    CHECK((q == alg.n()) == (alg.step() == 1));

    FlagReport flag;
    try {
      flag = max_geodesic_growth(alg);
    } catch (const NotAmple&) {
      continue;  // free:3:2 — no line-certifiable flag
    }
    const long nd = geodesic_dimension(alg, flag);
    const long nr = rifford_bound(alg);
    CHECK(nd >= nr);
    if (alg.step() > 2) CHECK(nd > nr);
    if (is_fat(alg).fat) CHECK(nd == nr);
    if (alg.rank() < alg.n()) {
      CHECK(nd > q);
      CHECK(q > alg.n());
    } else {
      CHECK(nd == q);
      CHECK(q == alg.n());
    }
  }
}

TEST_CASE("exact determinism: repeated runs are identical") {
  const auto a1 = builtin("engel");
  const auto a2 = builtin("engel");
  CHECK(growth_vector(a1) == growth_vector(a2));
  CHECK(max_geodesic_growth(a1).geodesic_growth == max_geodesic_growth(a2).geodesic_growth);
  const auto f1 = is_fat(a1), f2 = is_fat(a2);
  CHECK(f1.fat == f2.fat);
  CHECK(f1.witness == f2.witness);
}

TEST_CASE("zero direction errors") {
  const auto h3 = builtin("heisenberg:1");
  CHECK_THROWS_AS(line_geodesic_growth(h3, direction({0, 0})), ZeroDirection);
  CHECK_THROWS_AS(has_abnormal_line(h3, direction({0, 0})), ZeroDirection);
}
