#ifndef CARNOT_BUILTINS_HPP
#define CARNOT_BUILTINS_HPP

#include "carnot/lie_algebra.hpp"
#include "carnot/rational_linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace carnot {

/// Built-in example library. Recognized names:
///   heisenberg:d   Heisenberg group H_{2d+1} (d = 1..4)
///   engel          rank-2 step-3 Engel group
///   free:r:2       free nilpotent of rank r (2 or 3) and step 2
///   kernel:m:a,... corank-1 with A = blockdiag(0_m, a_1 J, a_2 J, ...)
///   abelian:n      abelian R^n
std::optional<AlgebraSpecData> builtin_algebra(const std::string& name);

/// True if `name` looks like a builtin spec (used to disambiguate from paths).
bool is_builtin_name(const std::string& name);

/// Canonical instances used by the test-suite sweeps.
std::vector<std::string> standard_library_names();

/// Exact rational bracket matrix of a corank-1 algebra ([e_i, e_j] = A_ij e_n);
/// empty when the algebra is not corank-1.
std::optional<RatMatrix> corank1_matrix(const StratifiedLieAlgebra& alg);

}  // namespace carnot

#endif
