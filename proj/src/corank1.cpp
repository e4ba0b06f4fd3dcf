#include "carnot/corank1.hpp"

#include "carnot/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace carnot {

namespace scalar {

double sinc(double w) {
  if (std::abs(w) < 1e-4) {
    const double w2 = w * w;
    return 1.0 + w2 * (-1.0 / 6 + w2 * (1.0 / 120 + w2 * (-1.0 / 5040 + w2 / 362880)));
  }
  return std::sin(w) / w;
}

double gtilde(double w) {
  if (std::abs(w) < 1e-4) {
    const double w2 = w * w;
    return 1.0 / 3 + w2 * (-1.0 / 30 + w2 * (1.0 / 840 + w2 * (-1.0 / 45360 + w2 / 3991680)));
  }
  return (std::sin(w) - w * std::cos(w)) / (w * w * w);
}

double h_ratio(double w) {
  if (std::abs(w) < 1e-4) {
    const double w2 = w * w;
    return w * (1.0 / 6 + w2 * (-1.0 / 120 + w2 * (1.0 / 5040 + w2 * (-1.0 / 362880 + w2 / 39916800))));
  }
  return (w - std::sin(w)) / (w * w);
}

// q(w) = (w - sin w)/w^3, used by phi and phi'.
static double q_ratio(double w) {
  if (std::abs(w) < 1e-4) {
    const double w2 = w * w;
    return 1.0 / 6 + w2 * (-1.0 / 120 + w2 * (1.0 / 5040 + w2 * (-1.0 / 362880 + w2 / 39916800)));
  }
  return (w - std::sin(w)) / (w * w * w);
}

double phi(double w) {
  const double s = sinc(w / 2);
  return 4.0 * q_ratio(w) * w / (s * s);
}

double phi_prime(double w) {
  const double s = sinc(w / 2);
  return 2.0 - 8.0 * q_ratio(w) * std::cos(w / 2) / (s * s * s);
}

}  // namespace scalar

double Corank1Group::pz_bound() const { return 2.0 * std::numbers::pi / alpha_max(); }

Corank1Group canonicalize(const Eigen::MatrixXd& a_raw, double tol) {
  const int k = static_cast<int>(a_raw.rows());
  if (a_raw.cols() != k) throw NotSkew(0, 0, "matrix must be square");
  double worst = 0.0;
  int wi = 0, wj = 0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      const double r = std::abs(a_raw(i, j) + a_raw(j, i));
      if (r > worst) {
        worst = r;
        wi = i;
        wj = j;
      }
    }
  if (worst > tol)
    throw NotSkew(wi, wj, "A(" + std::to_string(wi) + "," + std::to_string(wj) +
                              ") + A(" + std::to_string(wj) + "," + std::to_string(wi) +
                              ") = " + std::to_string(worst));
  const Eigen::MatrixXd a = 0.5 * (a_raw - a_raw.transpose());  // exact skew part

  const double scale = a.cwiseAbs().maxCoeff();
  const double rank_tol = 1e-10 * std::max(scale, 1e-300);
  // Eigenvectors of A^T A = -A^2 (symmetric PSD); eigenvalues are alpha_i^2
  // in pairs plus zeros.
  const Eigen::MatrixXd ata = a.transpose() * a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ata);
  if (es.info() != Eigen::Success) throw Error("Internal", "eigendecomposition failed");

  std::vector<Eigen::VectorXd> kernel_cols;
  int nonzero_count = 0;
  for (int i = 0; i < k; ++i) {
    // |A v| classifies more sharply than sqrt of the A^T A eigenvalue, whose
    // noise floor is sqrt(eps)-sized.
    const double sv = (a * es.eigenvectors().col(i)).norm();
    if (sv <= rank_tol)
      kernel_cols.push_back(es.eigenvectors().col(i));
    else
      ++nonzero_count;
  }
  if (nonzero_count == 0)
    throw AllZero("A vanishes (abelian group); the corank-1 geometry requires d >= 1");
  if (nonzero_count % 2 != 0)
    throw Error("Internal", "odd number of nonzero singular directions");

  // Extract invariant 2-planes one at a time: pick a singular direction v in
  // the orthogonal complement of what is already assembled, pair it with
  // b1 = A v / |A v| (the complement is A-invariant).
  struct Block {
    double alpha;
    Eigen::VectorXd b1, b2;
  };
  std::vector<Block> blocks;
  Eigen::MatrixXd assembled(k, 0);
  auto append_col = [&](const Eigen::VectorXd& c) {
    assembled.conservativeResize(Eigen::NoChange, assembled.cols() + 1);
    assembled.col(assembled.cols() - 1) = c;
  };
  for (const auto& kc : kernel_cols) append_col(kc);
  const int num_blocks = nonzero_count / 2;
  for (int blk = 0; blk < num_blocks; ++blk) {
    const int m = static_cast<int>(assembled.cols());
    Eigen::MatrixXd comp(k, k - m);  // complement basis
    if (m == 0) {
      comp = Eigen::MatrixXd::Identity(k, k);
    } else {
      const Eigen::HouseholderQR<Eigen::MatrixXd> qr(assembled);
      const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(k, k);
      comp = q.rightCols(k - m);
    }
    const Eigen::MatrixXd s = comp.transpose() * ata * comp;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sub(s);
    Eigen::VectorXd v = comp * sub.eigenvectors().col(k - m - 1);  // largest remaining alpha^2
    v.normalize();
    Eigen::VectorXd b1 = a * v;
    const double alpha = b1.norm();
    b1 /= alpha;
    // Clean residual components outside the invariant complement.
    if (m > 0) b1 -= assembled * (assembled.transpose() * b1);
    b1 -= v * v.dot(b1);
    b1.normalize();
    blocks.push_back({alpha, b1, v});
    append_col(b1);
    append_col(v);
  }
  std::stable_sort(blocks.begin(), blocks.end(),
                   [](const Block& x, const Block& y) { return x.alpha < y.alpha; });

  Corank1Group g;
  g.k = k;
  g.d = static_cast<int>(blocks.size());
  g.A_input = a_raw;
  g.O.resize(k, k);
  int col = 0;
  for (const auto& kc : kernel_cols) g.O.col(col++) = kc;
  g.alphas.resize(g.d);
  for (int i = 0; i < g.d; ++i) {
    g.alphas(i) = blocks[static_cast<size_t>(i)].alpha;
    g.O.col(col++) = blocks[static_cast<size_t>(i)].b1;
    g.O.col(col++) = blocks[static_cast<size_t>(i)].b2;
  }
  g.A = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < g.d; ++i) {
    const int o = g.block_offset(i);
    g.A(o, o + 1) = g.alphas(i);
    g.A(o + 1, o) = -g.alphas(i);
  }

  // Construction sanity, per the canonical-form contract.
  const double ortho_err = (g.O.transpose() * g.O - Eigen::MatrixXd::Identity(k, k))
                               .cwiseAbs()
                               .maxCoeff();
  const double block_err = (g.O.transpose() * a * g.O - g.A).cwiseAbs().maxCoeff();
  if (ortho_err > 1e-12 || block_err > 1e-10 * std::max(1.0, scale))
    throw Error("Internal", "canonicalization residual too large (ortho " +
                                std::to_string(ortho_err) + ", block " +
                                std::to_string(block_err) + ")");
  return g;
}

namespace {

// M_i(pz) = sinc(theta) I - (theta/2) sinc(theta/2)^2 J, theta = alpha_i pz;
// x^i = M_i p_x^i. Returns {a, b} with M = a I + b J.
inline std::pair<double, double> block_coeffs(double theta) {
  const double a = scalar::sinc(theta);
  const double b = -(theta / 2.0) * scalar::sinc(theta / 2.0) * scalar::sinc(theta / 2.0);
  return {a, b};
}

inline void check_sizes(const Corank1Group& g, const Eigen::VectorXd& v, const char* what) {
  if (static_cast<int>(v.size()) != g.k)
    throw DomainError(std::string(what) + " has wrong dimension for rank " + std::to_string(g.k));
}

}  // namespace

GroupPoint exp_map(const Corank1Group& g, const Covector& p) {
  check_sizes(g, p.px, "covector");
  GroupPoint q;
  q.x.resize(g.k);
  const int kd = g.kernel_dim();
  q.x.head(kd) = p.px.head(kd);
  double z = 0.0;
  for (int i = 0; i < g.d; ++i) {
    const int o = g.block_offset(i);
    const double theta = g.alphas(i) * p.pz;
    const auto [a, b] = block_coeffs(theta);
    const double u = p.px(o), v = p.px(o + 1);
    // (a I + b J)(u, v) with J(u, v) = (v, -u).
    q.x(o) = a * u + b * v;
    q.x(o + 1) = a * v - b * u;
    z += (u * u + v * v) * (g.alphas(i) / 2.0) * scalar::h_ratio(theta);
  }
  q.z = z;
  return q;
}

double jacobian(const Corank1Group& g, const Covector& p) {
  check_sizes(g, p.px, "covector");
  if (std::abs(p.pz) >= g.pz_bound())
    throw OutOfDomain("jacobian defined for |p_z| < 2*pi/alpha_d = " +
                      std::to_string(g.pz_bound()));
  // Precompute sinc(w_j)^2 product over all blocks, then divide per term.
  double j_total = 0.0;
  for (int i = 0; i < g.d; ++i) {
    const int o = g.block_offset(i);
    const double norm2 = p.px(o) * p.px(o) + p.px(o + 1) * p.px(o + 1);
    if (norm2 == 0.0) continue;
    const double wi = g.alphas(i) * p.pz / 2.0;
    double term = norm2 * (g.alphas(i) * g.alphas(i) / 4.0) * scalar::gtilde(wi) * scalar::sinc(wi);
    for (int j = 0; j < g.d; ++j) {
      if (j == i) continue;
      const double wj = g.alphas(j) * p.pz / 2.0;
      const double s = scalar::sinc(wj);
      term *= s * s;
    }
    j_total += term;
  }
  return j_total;
}

bool in_injectivity_domain(const Corank1Group& g, const Covector& p) {
  check_sizes(g, p.px, "covector");
  if (!(std::abs(p.pz) < g.pz_bound())) return false;
  for (int i = 0; i < g.d; ++i) {
    const int o = g.block_offset(i);
    if (p.px(o) != 0.0 || p.px(o + 1) != 0.0) return true;
  }
  return false;
}

Covector log_map(const Corank1Group& g, const GroupPoint& q, double tol) {
  check_sizes(g, q.x, "point");
  const int kd = g.kernel_dim();
  const bool x_zero = (q.x.lpNorm<Eigen::Infinity>() == 0.0);
  if (x_zero && q.z == 0.0) throw IdentityPoint();

  // Active rotation blocks (x^i != 0). Inactive blocks force p_x^i = 0.
  std::vector<int> active;
  double alpha_act = 0.0;
  for (int i = 0; i < g.d; ++i) {
    const int o = g.block_offset(i);
    if (q.x(o) != 0.0 || q.x(o + 1) != 0.0) {
      active.push_back(i);
      alpha_act = std::max(alpha_act, g.alphas(i));
    }
  }
  if (active.empty())
    throw CutLocus("no rotation-block component; the point is reached only by covectors "
                   "with A p_x = 0, outside the injectivity domain");

  // z(p_z) = sum_active |x^i|^2 (alpha_i/8) phi(alpha_i p_z): odd and strictly
  // increasing, so the root is unique on (-2pi/alpha_act, 2pi/alpha_act).
  auto z_of = [&](double pz) {
    double acc = 0.0;
    for (int i : active) {
      const int o = g.block_offset(i);
      const double n2 = q.x(o) * q.x(o) + q.x(o + 1) * q.x(o + 1);
      acc += n2 * (g.alphas(i) / 8.0) * scalar::phi(g.alphas(i) * pz);
    }
    return acc;
  };
  auto dz_of = [&](double pz) {
    double acc = 0.0;
    for (int i : active) {
      const int o = g.block_offset(i);
      const double n2 = q.x(o) * q.x(o) + q.x(o + 1) * q.x(o + 1);
      acc += n2 * (g.alphas(i) * g.alphas(i) / 8.0) * scalar::phi_prime(g.alphas(i) * pz);
    }
    return acc;
  };

  const double bound = 2.0 * std::numbers::pi / alpha_act;
  double pz = 0.0;
  if (q.z != 0.0) {
    const double target = std::abs(q.z);
    // Bracket on the positive side, creeping toward the asymptote.
    double lo = 0.0, hi = 0.0;
    double gap = bound / 2.0;
    for (int it = 0; it < 2048; ++it) {
      const double cand = bound - gap;
      if (z_of(cand) >= target) {
        hi = cand;
        break;
      }
      lo = cand;
      gap *= 0.5;
    }
    if (hi == 0.0)
      throw CutLocus("z outside the reachable range of the injectivity domain");
    while (hi - lo > 1e-3) {
      const double mid = 0.5 * (lo + hi);
      (z_of(mid) < target ? lo : hi) = mid;
    }
    pz = 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
      const double f = z_of(pz) - target;
      const double df = dz_of(pz);
      double step = f / df;
      double next = pz - step;
      if (next <= lo || next >= hi) {  // safeguard: fall back to bisection
        (f > 0 ? hi : lo) = pz;
        next = 0.5 * (lo + hi);
        step = pz - next;
      } else {
        (f > 0 ? hi : lo) = pz;
      }
      pz = next;
      if (std::abs(step) < 1e-13) break;
    }
    if (q.z < 0) pz = -pz;
  }

  if (!(std::abs(pz) < g.pz_bound()))
    throw CutLocus("recovered |p_z| = " + std::to_string(std::abs(pz)) +
                   " >= 2*pi/alpha_d; the point lies on the cut locus");

  Covector p;
  p.px = Eigen::VectorXd::Zero(g.k);
  p.px.head(kd) = q.x.head(kd);
  for (int i : active) {
    const int o = g.block_offset(i);
    const double theta = g.alphas(i) * pz;
    const auto [a, b] = block_coeffs(theta);
    const double det = a * a + b * b;  // = 4 sin^2(theta/2)/theta^2 > 0 for |theta| < 2pi
    // (a I + b J)^{-1} = (a I - b J)/det; J(u,v) = (v,-u).
    const double u = q.x(o), v = q.x(o + 1);
    p.px(o) = (a * u - b * v) / det;
    p.px(o + 1) = (a * v + b * u) / det;
  }
  p.pz = pz;

  const GroupPoint back = exp_map(g, p);
  const double scale = std::max(1.0, std::max(q.x.lpNorm<Eigen::Infinity>(), std::abs(q.z)));
  const double err =
      std::max((back.x - q.x).lpNorm<Eigen::Infinity>(), std::abs(back.z - q.z));
  if (err > tol * scale)
    throw CutLocus("roundtrip residual " + std::to_string(err) +
                   " exceeds tolerance; point not in exp(D)");
  return p;
}

GroupPoint group_mul(const Corank1Group& g, const GroupPoint& a, const GroupPoint& b) {
  check_sizes(g, a.x, "point");
  check_sizes(g, b.x, "point");
  GroupPoint out;
  out.x = a.x + b.x;
  // <x_a, A x_b> blockwise: alpha_i (u_a v_b - v_a u_b); exact zero for b = a^{-1}.
  double cross = 0.0;
  for (int i = 0; i < g.d; ++i) {
    const int o = g.block_offset(i);
    cross += g.alphas(i) * (a.x(o) * b.x(o + 1) - a.x(o + 1) * b.x(o));
  }
  out.z = a.z + b.z + 0.5 * cross;
  return out;
}

GroupPoint group_inv(const Corank1Group& g, const GroupPoint& a) {
  check_sizes(g, a.x, "point");
  return GroupPoint{-a.x, -a.z};
}

GroupPoint dilate(const Corank1Group& g, const GroupPoint& a, double eps) {
  check_sizes(g, a.x, "point");
  if (!(eps > 0.0)) throw DomainError("dilation factor must be positive");
  return GroupPoint{eps * a.x, eps * eps * a.z};
}

double distance(const Corank1Group& g, const GroupPoint& q1, const GroupPoint& q2) {
  const GroupPoint m = group_mul(g, group_inv(g, q1), q2);
  if (m.x.lpNorm<Eigen::Infinity>() == 0.0 && m.z == 0.0) return 0.0;
  return log_map(g, m).px.norm();
}

GroupPoint homothety(const Corank1Group& g, const GroupPoint& x0, const GroupPoint& y, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("homothety parameter must lie in [0, 1]");
  const GroupPoint m = group_mul(g, group_inv(g, x0), y);
  if (m.x.lpNorm<Eigen::Infinity>() == 0.0 && m.z == 0.0) return x0;  // y == x0
  Covector p = log_map(g, m);
  p.px *= t;
  p.pz *= t;
  return group_mul(g, x0, exp_map(g, p));
}

GCheckResult g_contraction_check(double N, const std::vector<double>& grid_x,
                                 const std::vector<double>& grid_t) {
  auto gfun = [](double x) { return std::sin(x) - x * std::cos(x); };
  GCheckResult res;
  res.worst_margin = std::numeric_limits<double>::infinity();
  for (double x : grid_x) {
    const double gx = gfun(x);
    for (double t : grid_t) {
      const double lhs = gfun(t * x);
      const double rhs = std::pow(t, N) * gx;
      const double margin = lhs - rhs;
      if (margin < res.worst_margin) res.worst_margin = margin;
      if (lhs < rhs * (1.0 - 1e-12) && (!res.witness || lhs - rhs < res.witness->lhs - res.witness->rhs))
        res.witness = GCheckWitness{x, t, lhs, rhs};
    }
  }
  res.pass = !res.witness.has_value();
  // Auxiliary inequality from the differential form of the bound.
  auto f = [](double s) { return (3.0 - s * s) * std::sin(s) - 3.0 * s * std::cos(s); };
  for (double s : grid_x)
    if (f(s) < 0.0) res.f_nonnegative = false;
  return res;
}

std::vector<double> default_g_grid_x(int nodes) {
  std::vector<double> xs;
  for (int i = 1; i <= nodes; ++i)
    xs.push_back(std::numbers::pi * static_cast<double>(i) / (nodes + 1));
  return xs;
}

std::vector<double> default_g_grid_t(int nodes) {
  std::vector<double> ts;
  for (int i = 0; i <= nodes; ++i) ts.push_back(static_cast<double>(i) / nodes);
  return ts;
}

}  // namespace carnot
