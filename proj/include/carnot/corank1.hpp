#ifndef CARNOT_CORANK1_HPP
#define CARNOT_CORANK1_HPP

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace carnot {

/// Canonical-form model of a corank-1 Carnot group. The input bracket matrix
/// A is reduced by an orthogonal change of x-coordinates to
///
///     O^T A O = blockdiag(0_{k-2d}, a_1 J, ..., a_d J),   J = [[0,1],[-1,0]],
///
/// with 0 < a_1 <= ... <= a_d the nonzero singular values. All geometry
/// (points, covectors, group law) lives in these canonical coordinates.
struct Corank1Group {
  int k = 0;                //< rank; total dimension is k+1
  int d = 0;                //< number of 2x2 rotation blocks
  Eigen::MatrixXd A;        //< canonical block matrix
  Eigen::MatrixXd A_input;  //< matrix as supplied
  Eigen::MatrixXd O;        //< orthogonal change of basis, O^T A_input O = A
  Eigen::VectorXd alphas;   //< ascending, size d

  int n() const { return k + 1; }
  int kernel_dim() const { return k - 2 * d; }
  double alpha_max() const { return alphas(d - 1); }
  /// Vertical extent of the injectivity domain: |p_z| < 2*pi/alpha_d.
  double pz_bound() const;
  /// Offset of block i (0-based) inside an x or p_x vector.
  int block_offset(int i) const { return kernel_dim() + 2 * i; }
};

/// Initial covector (p_x, p_z) in T_e*G, canonical coordinates.
struct Covector {
  Eigen::VectorXd px;
  double pz = 0.0;
};

/// Point (x, z) of G = R^k x R in exponential coordinates.
struct GroupPoint {
  Eigen::VectorXd x;
  double z = 0.0;
};

inline bool operator==(const Covector& a, const Covector& b) {
  return a.pz == b.pz && a.px.size() == b.px.size() && (a.px.array() == b.px.array()).all();
}
inline bool operator==(const GroupPoint& a, const GroupPoint& b) {
  return a.z == b.z && a.x.size() == b.x.size() && (a.x.array() == b.x.array()).all();
}

/// Orthogonal reduction of a skew-symmetric matrix to the canonical block
/// form. Singular values below 1e-10 * max|A| are zeroed into the kernel
/// block. Throws NotSkew (with the worst entry pair) and AllZero (A = 0 is
/// the abelian group, out of scope for this geometry kernel).
Corank1Group canonicalize(const Eigen::MatrixXd& a_raw, double tol = 1e-12);

/// Hamiltonian exponential map at the identity (total map).
GroupPoint exp_map(const Corank1Group& g, const Covector& p);

/// Jacobian determinant of exp_map, in the cancellation-free form
///   J = sum_i |p_x^i|^2 (a_i^2/4) gtilde(w_i) sinc(w_i) prod_{j!=i} sinc(w_j)^2,
/// w_i = a_i p_z / 2. Defined for |p_z| < 2*pi/alpha_d; throws OutOfDomain
/// beyond.
double jacobian(const Corank1Group& g, const Covector& p);

/// |p_z| < 2*pi/alpha_d and A p_x != 0 (some rotation-block component nonzero).
bool in_injectivity_domain(const Corank1Group& g, const Covector& p);

/// Inverse of exp_map on the injectivity domain: reduces to a monotone scalar
/// equation in p_z (bracketing + bisection + Newton), then inverts each 2x2
/// block. Throws IdentityPoint at q = e and CutLocus when no admissible
/// covector exists. Guarantees |exp(log(q)) - q| <= tol * max(1, |q|).
Covector log_map(const Corank1Group& g, const GroupPoint& q, double tol = 1e-9);

/// Carnot-Caratheodory distance via log of the left quotient; CutLocus
/// propagates from log_map.
double distance(const Corank1Group& g, const GroupPoint& q1, const GroupPoint& q2);

/// Group operations: a * b = (x_a + x_b, z_a + z_b + <x_a, A x_b>/2).
GroupPoint group_mul(const Corank1Group& g, const GroupPoint& a, const GroupPoint& b);
GroupPoint group_inv(const Corank1Group& g, const GroupPoint& a);

/// Dilation (eps x, eps^2 z); group automorphism scaling distances by eps.
GroupPoint dilate(const Corank1Group& g, const GroupPoint& a, double eps);

/// Point at parameter t of the unique minimizing geodesic from x0 to y.
GroupPoint homothety(const Corank1Group& g, const GroupPoint& x0, const GroupPoint& y, double t);

struct GCheckWitness {
  double x = 0.0, t = 0.0, lhs = 0.0, rhs = 0.0;
};

struct GCheckResult {
  bool pass = true;
  double worst_margin = 0.0;  // min of lhs - rhs over the grid
  std::optional<GCheckWitness> witness;
  bool f_nonnegative = true;  // (3-s^2) sin s - 3 s cos s >= 0 on (0, pi)
};

/// Grid verification of g(t x) >= t^N g(x) for g(x) = sin x - x cos x on
/// (0, pi) x [0, 1], plus the auxiliary inequality f >= 0 underlying it.
GCheckResult g_contraction_check(double N, const std::vector<double>& grid_x,
                                 const std::vector<double>& grid_t);

std::vector<double> default_g_grid_x(int nodes = 200);
std::vector<double> default_g_grid_t(int nodes = 200);

// Stable scalar kernels (Taylor fallbacks below |w| = 1e-4). Exposed for the
// oracle tests; sinc(w) = sin(w)/w, gtilde(w) = (sin w - w cos w)/w^3,
// h_ratio(w) = (w - sin w)/w^2, phi(w) = (w - sin w)/sin^2(w/2).
namespace scalar {
double sinc(double w);
double gtilde(double w);
double h_ratio(double w);
double phi(double w);
double phi_prime(double w);
}  // namespace scalar

}  // namespace carnot

#endif
