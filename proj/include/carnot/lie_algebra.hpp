#ifndef CARNOT_LIE_ALGEBRA_HPP
#define CARNOT_LIE_ALGEBRA_HPP

#include "carnot/rational_linalg.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace carnot {

/// Raw structure-constant table as read from a file or a built-in. Bracket
/// entries are keyed by (i, j) with 1-based basis indices; the coefficient
/// vector has length n. Missing entries mean a zero bracket.
struct AlgebraSpecData {
  int n = 0;
  std::vector<int> layers;  // layer_of, 1-based strata labels, one per basis index
  std::vector<std::pair<std::pair<int, int>, RatVec>> brackets;
  std::string name;
};

/// Validated stratified nilpotent Lie algebra over the rationals.
///
/// Basis elements are indexed 1..n and ordered by stratum: the first k indices
/// span the first stratum. Construct through validate_algebra(); all results
/// derived from a validated instance are exact.
class StratifiedLieAlgebra {
public:
  int n() const { return n_; }
  int rank() const { return k_; }
  int step() const { return step_; }
  int layer_of(int i) const { return layers_[static_cast<size_t>(i - 1)]; }
  int layer_dim(int s) const { return layer_count_[static_cast<size_t>(s)]; }
  const std::string& name() const { return name_; }

  /// [e_i, e_j] as a coefficient vector of length n (1-based indices).
  RatVec bracket_basis(int i, int j) const;
  /// [u, v] for arbitrary coefficient vectors of length n.
  RatVec bracket(const RatVec& u, const RatVec& v) const;

  /// Sparse table (i < j only), for serialization.
  const std::map<std::pair<int, int>, RatVec>& bracket_table() const { return table_; }

  friend StratifiedLieAlgebra validate_algebra(const AlgebraSpecData& spec);

private:
  StratifiedLieAlgebra() = default;
  int n_ = 0, k_ = 0, step_ = 0;
  std::vector<int> layers_;
  std::vector<int> layer_count_;  // index s -> dim of stratum s (index 0 unused)
  std::map<std::pair<int, int>, RatVec> table_;
  std::string name_;
};

/// Checks antisymmetry, the Jacobi identity, the grading [g_i, g_j] <= g_{i+j}
/// and the stratification condition [g_1, g_j] = g_{1+j}, all in exact
/// arithmetic. Throws AntisymmetryViolation / JacobiViolation /
/// GradingViolation / NotStratified naming the offending indices.
StratifiedLieAlgebra validate_algebra(const AlgebraSpecData& spec);

/// Distribution growth vector (d_1, ..., d_s), d_i = dim(g_1 + ... + g_i),
/// re-verified against the bracket-generated flag by exact rank.
std::vector<int> growth_vector(const StratifiedLieAlgebra& alg);

/// Hausdorff dimension Q = sum_i i (d_i - d_{i-1}).
long hausdorff_dimension(const StratifiedLieAlgebra& alg);

/// Exact bases of span{ad_X^j(g_1)} for j = 0..max_power, X = sum u_i e_i.
std::vector<RatMatrix> adjoint_power_span(const StratifiedLieAlgebra& alg, const RatVec& u,
                                          int max_power);

struct FlagReport {
  std::vector<int> growth;           // distribution growth vector
  std::vector<int> geodesic_growth;  // k_i up to stabilization
  bool ample = false;
  int geodesic_step = 0;  // m when ample, index of stabilization otherwise
  bool inconclusive = false;  // sample batches disagreed (max_geodesic_growth only)
};

/// Geodesic growth vector along the line direction u (constant control):
/// k_i = dim span{ad_u^j(g_1) : j <= i-1}.
FlagReport line_geodesic_growth(const StratifiedLieAlgebra& alg, const RatVec& u);

/// Componentwise maximum of line flags over `samples` seeded random integer
/// directions plus all basis directions, split into two disjoint batches that
/// must agree (else inconclusive). Throws NotAmple if no direction is ample.
FlagReport max_geodesic_growth(const StratifiedLieAlgebra& alg, int samples = 32,
                               std::uint64_t seed = 0x5eed);

/// N = sum (2i-1)(k_i - k_{i-1}) over the ample flag.
long geodesic_dimension(const StratifiedLieAlgebra& alg, const FlagReport& flag);

/// N_R = Q + n - k.
long rifford_bound(const StratifiedLieAlgebra& alg);

struct FatnessReport {
  bool fat = false;
  std::optional<RatVec> witness;  // direction X with g_1 + [X, g_1] proper, when not fat
  bool exact = true;              // false when decided by sampling alone
};

/// Strong bracket-generating test: fat iff g_1 + [X, g_1] = g for every
/// nonzero X in g_1. Exact for step != 2, for corank-1 (kernel of the bracket
/// matrix) and for dim g_2 >= k; decided by exact-rational sampling with a
/// deterministic confirmation search otherwise. Witnesses are always verified
/// exactly.
FatnessReport is_fat(const StratifiedLieAlgebra& alg, int samples = 32,
                     std::uint64_t seed = 0x5eed);

struct AbnormalLineReport {
  bool abnormal = false;
  std::optional<RatVec> annihilator;  // nonzero covector annihilating the adjoint span
};

/// The line e^{tX} is abnormal iff span{ad_X^i(g_1) : 0 <= i <= s-1} is a
/// proper subspace; the annihilator is an exact kernel vector.
AbnormalLineReport has_abnormal_line(const StratifiedLieAlgebra& alg, const RatVec& u);

/// Searches basis directions, then seeded integer samples, for an abnormal
/// line; used by reporting and the fat/abnormal consistency tests.
std::optional<RatVec> find_abnormal_line_direction(const StratifiedLieAlgebra& alg,
                                                   int samples = 32,
                                                   std::uint64_t seed = 0x5eed);

/// Ideal iff fat (Carnot groups).
bool is_ideal(const StratifiedLieAlgebra& alg, int samples = 32, std::uint64_t seed = 0x5eed);

}  // namespace carnot

#endif
