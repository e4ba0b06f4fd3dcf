#include "carnot/lie_algebra.hpp"

#include "carnot/errors.hpp"
#include "carnot/rng.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace carnot {

namespace {

std::string vec_to_string(const RatVec& v) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << to_string(v[i]);
  os << ")";
  return os.str();
}

}  // namespace

RatVec StratifiedLieAlgebra::bracket_basis(int i, int j) const {
  RatVec out(static_cast<size_t>(n_), Rational(0));
  if (i == j) return out;
  const bool flip = i > j;
  if (flip) std::swap(i, j);
  auto it = table_.find({i, j});
  if (it == table_.end()) return out;
  out = it->second;
  if (flip)
    for (auto& c : out) c = -c;
  return out;
}

RatVec StratifiedLieAlgebra::bracket(const RatVec& u, const RatVec& v) const {
  RatVec out(static_cast<size_t>(n_), Rational(0));
  for (const auto& [key, coeffs] : table_) {
    const auto [i, j] = key;
    const Rational w = u[i - 1] * v[j - 1] - u[j - 1] * v[i - 1];
    if (w == 0) continue;
    for (int m = 0; m < n_; ++m) out[m] += w * coeffs[m];
  }
  return out;
}

StratifiedLieAlgebra validate_algebra(const AlgebraSpecData& spec) {
  const int n = spec.n;
  if (n <= 0) throw ValidationError("dimension n must be positive");
  if (static_cast<int>(spec.layers.size()) != n)
    throw ValidationError("expected one layer label per basis index");

  StratifiedLieAlgebra alg;
  alg.n_ = n;
  alg.layers_ = spec.layers;
  alg.name_ = spec.name;

  int step = 0;
  for (int i = 0; i < n; ++i) {
    const int s = spec.layers[i];
    if (s < 1) throw ValidationError("layer labels must be >= 1");
    if (i > 0 && s < spec.layers[i - 1])
      throw ValidationError("basis must be ordered by stratum (layer labels nondecreasing)");
    step = std::max(step, s);
  }
  alg.step_ = step;
  alg.layer_count_.assign(static_cast<size_t>(step) + 1, 0);
  for (int s : spec.layers) ++alg.layer_count_[static_cast<size_t>(s)];
  for (int s = 1; s <= step; ++s)
    if (alg.layer_count_[static_cast<size_t>(s)] == 0)
      throw ValidationError("stratum " + std::to_string(s) + " is empty");
  alg.k_ = alg.layer_count_[1];

  // Assemble the sparse table, checking antisymmetry of duplicated entries.
  for (const auto& [key, coeffs] : spec.brackets) {
    auto [i, j] = key;
    if (i < 1 || i > n || j < 1 || j > n)
      throw ValidationError("bracket index out of range: (" + std::to_string(i) + ", " +
                            std::to_string(j) + ")");
    if (static_cast<int>(coeffs.size()) != n)
      throw ValidationError("bracket coefficient vector must have length n");
    if (i == j) {
      if (!is_zero_vec(coeffs))
        throw AntisymmetryViolation(i, j, "[e_" + std::to_string(i) + ", e_" + std::to_string(i) +
                                              "] must vanish");
      continue;
    }
    RatVec c = coeffs;
    if (i > j) {
      std::swap(i, j);
      for (auto& x : c) x = -x;
    }
    auto [it, inserted] = alg.table_.try_emplace({i, j}, c);
    if (!inserted && it->second != c)
      throw AntisymmetryViolation(i, j, "conflicting entries for [e_" + std::to_string(i) +
                                            ", e_" + std::to_string(j) +
                                            "] violate c_ij = -c_ji");
  }
  // Drop explicit zero entries.
  for (auto it = alg.table_.begin(); it != alg.table_.end();)
    it = is_zero_vec(it->second) ? alg.table_.erase(it) : std::next(it);

  // Grading: every nonzero coefficient of [e_i, e_j] must sit in stratum
  // layer(i) + layer(j); strata above `step` are zero.
  for (const auto& [key, coeffs] : alg.table_) {
    const auto [i, j] = key;
    const int target = alg.layer_of(i) + alg.layer_of(j);
    for (int m = 1; m <= n; ++m) {
      if (coeffs[static_cast<size_t>(m - 1)] == 0) continue;
      if (target > step || alg.layer_of(m) != target)
        throw GradingViolation(i, j, m,
                               "[e_" + std::to_string(i) + ", e_" + std::to_string(j) +
                                   "] has a component on e_" + std::to_string(m) +
                                   " outside stratum " + std::to_string(target));
    }
  }

  // Jacobi identity on all basis triples, exactly.
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      for (int l = j + 1; l <= n; ++l) {
        RatVec acc(static_cast<size_t>(n), Rational(0));
        const RatVec bij = alg.bracket_basis(i, j);
        const RatVec bjl = alg.bracket_basis(j, l);
        const RatVec bli = alg.bracket_basis(l, i);
        RatVec e(static_cast<size_t>(n), Rational(0));
        auto add = [&](const RatVec& w, int idx) {
          std::fill(e.begin(), e.end(), Rational(0));
          e[static_cast<size_t>(idx - 1)] = 1;
          const RatVec b = alg.bracket(w, e);
          for (int m = 0; m < n; ++m) acc[m] += b[m];
        };
        add(bij, l);
        add(bjl, i);
        add(bli, j);
        if (!is_zero_vec(acc))
          throw JacobiViolation(i, j, l,
                                "Jacobi identity fails on (e_" + std::to_string(i) + ", e_" +
                                    std::to_string(j) + ", e_" + std::to_string(l) +
                                    "): residue " + vec_to_string(acc));
      }

  // Stratification: span[g_1, g_j] must be all of g_{1+j} for 1 <= j < s.
  for (int j = 1; j < step; ++j) {
    RatMatrix span(0, n);
    for (int a = 1; a <= n; ++a) {
      if (alg.layer_of(a) != 1) continue;
      for (int b = 1; b <= n; ++b) {
        if (alg.layer_of(b) != j) continue;
        const RatVec br = alg.bracket_basis(a, b);
        if (!is_zero_vec(br)) span.append_row(br);
      }
    }
    if (exact_rank(span) != alg.layer_count_[static_cast<size_t>(j + 1)])
      throw NotStratified(j + 1, "[g_1, g_" + std::to_string(j) +
                                     "] does not span stratum " + std::to_string(j + 1));
  }

  return alg;
}

std::vector<int> growth_vector(const StratifiedLieAlgebra& alg) {
  const int n = alg.n();
  // Re-verify: D^1 = g_1, D^{i+1} = D^i + [g_1, D^i], by exact rank.
  RatMatrix flag(0, n);
  std::vector<RatVec> current;  // spanning vectors of D^i
  for (int a = 1; a <= alg.rank(); ++a) {
    RatVec e(static_cast<size_t>(n), Rational(0));
    e[static_cast<size_t>(a - 1)] = 1;
    flag.append_row(e);
    current.push_back(std::move(e));
  }
  std::vector<int> dims;
  dims.push_back(exact_rank(flag));
  RatVec e(static_cast<size_t>(n), Rational(0));
  for (int i = 2; i <= alg.step(); ++i) {
    std::vector<RatVec> next;
    for (int a = 1; a <= alg.rank(); ++a) {
      std::fill(e.begin(), e.end(), Rational(0));
      e[static_cast<size_t>(a - 1)] = 1;
      for (const auto& v : current) {
        RatVec b = alg.bracket(e, v);
        if (!is_zero_vec(b)) {
          flag.append_row(b);
          next.push_back(std::move(b));
        }
      }
    }
    dims.push_back(exact_rank(flag));
    for (auto& v : next) current.push_back(std::move(v));
  }
  // Cross-check against the cumulative layer counts.
  int cum = 0;
  for (int s = 1; s <= alg.step(); ++s) {
    cum += alg.layer_dim(s);
    if (dims[static_cast<size_t>(s - 1)] != cum)
      throw ValidationError("growth vector disagrees with layer labels at stratum " +
                            std::to_string(s));
  }
  return dims;
}

long hausdorff_dimension(const StratifiedLieAlgebra& alg) {
  const std::vector<int> d = growth_vector(alg);
  long q = 0;
  int prev = 0;
  for (size_t i = 0; i < d.size(); ++i) {
    q += static_cast<long>(i + 1) * (d[i] - prev);
    prev = d[i];
  }
  return q;
}

namespace {

RatVec embed_direction(const StratifiedLieAlgebra& alg, const RatVec& u) {
  if (static_cast<int>(u.size()) != alg.rank() && static_cast<int>(u.size()) != alg.n())
    throw ZeroDirection("direction must have length k (or n with zero tail)");
  RatVec x(static_cast<size_t>(alg.n()), Rational(0));
  for (size_t i = 0; i < u.size(); ++i) x[i] = u[i];
  for (int i = alg.rank(); i < alg.n(); ++i)
    if (x[static_cast<size_t>(i)] != 0)
      throw ZeroDirection("direction must lie in the first stratum");
  if (is_zero_vec(x)) throw ZeroDirection();
  return x;
}

}  // namespace

std::vector<RatMatrix> adjoint_power_span(const StratifiedLieAlgebra& alg, const RatVec& u,
                                          int max_power) {
  const RatVec x = embed_direction(alg, u);
  const int n = alg.n();
  std::vector<RatMatrix> out;
  std::vector<RatVec> current;
  for (int a = 1; a <= alg.rank(); ++a) {
    RatVec e(static_cast<size_t>(n), Rational(0));
    e[static_cast<size_t>(a - 1)] = 1;
    current.push_back(std::move(e));
  }
  for (int j = 0; j <= max_power; ++j) {
    RatMatrix m(0, n);
    for (const auto& v : current) m.append_row(v);
    out.push_back(row_space_basis(m));
    std::vector<RatVec> next;
    for (const auto& v : current) next.push_back(alg.bracket(x, v));
    current = std::move(next);
  }
  return out;
}

FlagReport line_geodesic_growth(const StratifiedLieAlgebra& alg, const RatVec& u) {
  const RatVec x = embed_direction(alg, u);
  const int n = alg.n();
  FlagReport report;
  report.growth = growth_vector(alg);

  RatMatrix flag(0, n);
  std::vector<RatVec> current;
  for (int a = 1; a <= alg.rank(); ++a) {
    RatVec e(static_cast<size_t>(n), Rational(0));
    e[static_cast<size_t>(a - 1)] = 1;
    flag.append_row(e);
    current.push_back(std::move(e));
  }
  int dim = exact_rank(flag);
  report.geodesic_growth.push_back(dim);
  // Dimensions strictly increase until the flag stabilizes, so n steps suffice.
  for (int i = 2; i <= n + 1; ++i) {
    std::vector<RatVec> next;
    for (const auto& v : current) {
      RatVec b = alg.bracket(x, v);
      if (!is_zero_vec(b)) {
        flag.append_row(b);
        next.push_back(std::move(b));
      }
    }
    const int d = exact_rank(flag);
    current = std::move(next);
    if (d == dim) break;  // stabilized
    dim = d;
    report.geodesic_growth.push_back(dim);
    if (dim == n) break;
  }
  report.ample = (dim == n);
  report.geodesic_step = static_cast<int>(report.geodesic_growth.size());
  return report;
}

namespace {

// Componentwise maximum of flags extended by their stabilized tails.
std::vector<int> componentwise_max(const std::vector<std::vector<int>>& flags) {
  size_t len = 0;
  for (const auto& f : flags) len = std::max(len, f.size());
  std::vector<int> out(len, 0);
  for (const auto& f : flags)
    for (size_t i = 0; i < len; ++i) {
      const int v = i < f.size() ? f[i] : f.back();
      out[i] = std::max(out[i], v);
    }
  // Trim the stabilized tail.
  while (out.size() > 1 && out[out.size() - 1] == out[out.size() - 2]) out.pop_back();
  return out;
}

struct BatchResult {
  std::vector<int> max_flag;
  bool any_ample = false;
};

BatchResult run_batch(const StratifiedLieAlgebra& alg, const std::vector<RatVec>& dirs) {
  BatchResult r;
  std::vector<std::vector<int>> flags;
  for (const auto& u : dirs) {
    const FlagReport f = line_geodesic_growth(alg, u);
    flags.push_back(f.geodesic_growth);
    r.any_ample = r.any_ample || f.ample;
  }
  r.max_flag = componentwise_max(flags);
  return r;
}

}  // namespace

FlagReport max_geodesic_growth(const StratifiedLieAlgebra& alg, int samples, std::uint64_t seed) {
  if (samples < 2) throw DomainError("max_geodesic_growth needs samples >= 2");
  const int k = alg.rank();
  const CounterRng rng(seed);

  std::vector<RatVec> basis_dirs;
  for (int a = 0; a < k; ++a) {
    RatVec e(static_cast<size_t>(k), Rational(0));
    e[static_cast<size_t>(a)] = 1;
    basis_dirs.push_back(std::move(e));
  }
  auto random_dir = [&](std::uint64_t index) {
    RatVec u(static_cast<size_t>(k), Rational(0));
    bool nonzero = false;
    for (int c = 0; c < k; ++c) {
      const long v = rng.uniform_int(index * static_cast<std::uint64_t>(k) + c, -9, 9);
      u[static_cast<size_t>(c)] = v;
      nonzero = nonzero || v != 0;
    }
    if (!nonzero) u[0] = 1;
    return u;
  };

  const int half = samples / 2;
  std::vector<RatVec> batch1 = basis_dirs, batch2 = basis_dirs;
  for (int s = 0; s < half; ++s) batch1.push_back(random_dir(static_cast<std::uint64_t>(s)));
  for (int s = half; s < samples; ++s) batch2.push_back(random_dir(static_cast<std::uint64_t>(s)));

  const BatchResult r1 = run_batch(alg, batch1);
  const BatchResult r2 = run_batch(alg, batch2);

  if (!r1.any_ample && !r2.any_ample)
    throw NotAmple("no sampled line direction is ample; the maximal geodesic growth vector "
                   "cannot be certified from lines");

  FlagReport report;
  report.growth = growth_vector(alg);
  report.inconclusive = (r1.max_flag != r2.max_flag);
  report.geodesic_growth = componentwise_max({r1.max_flag, r2.max_flag});
  report.ample = (report.geodesic_growth.back() == alg.n());
  report.geodesic_step = static_cast<int>(report.geodesic_growth.size());
  return report;
}

long geodesic_dimension(const StratifiedLieAlgebra& alg, const FlagReport& flag) {
  if (!flag.ample || flag.inconclusive)
    throw NotAmple("geodesic dimension requires a certified ample flag");
  if (flag.geodesic_growth.empty() || flag.geodesic_growth.back() != alg.n())
    throw NotAmple("flag does not reach the full dimension");
  long acc = 0;
  int prev = 0;
  for (size_t i = 0; i < flag.geodesic_growth.size(); ++i) {
    acc += static_cast<long>(2 * (i + 1) - 1) * (flag.geodesic_growth[i] - prev);
    prev = flag.geodesic_growth[i];
  }
  return acc;
}

long rifford_bound(const StratifiedLieAlgebra& alg) {
  return hausdorff_dimension(alg) + alg.n() - alg.rank();
}

namespace {

// dim(g_1 + [x, g_1]) for x given as a full-length coefficient vector.
int fat_span_dim(const StratifiedLieAlgebra& alg, const RatVec& x) {
  const int n = alg.n();
  RatMatrix m(0, n);
  RatVec e(static_cast<size_t>(n), Rational(0));
  for (int a = 1; a <= alg.rank(); ++a) {
    std::fill(e.begin(), e.end(), Rational(0));
    e[static_cast<size_t>(a - 1)] = 1;
    m.append_row(e);
    const RatVec b = alg.bracket(x, e);
    if (!is_zero_vec(b)) m.append_row(b);
  }
  return exact_rank(m);
}

// Bracket matrix A of a corank-1 algebra: [e_i, e_j] = A_ij e_n.
RatMatrix corank1_bracket_matrix(const StratifiedLieAlgebra& alg) {
  const int k = alg.rank();
  RatMatrix a(k, k);
  for (int i = 1; i <= k; ++i) {
    for (int j = 1; j <= k; ++j) {
      const RatVec b = alg.bracket_basis(i, j);
      a(i - 1, j - 1) = b[static_cast<size_t>(alg.n() - 1)];
    }
  }
  return a;
}

}  // namespace

FatnessReport is_fat(const StratifiedLieAlgebra& alg, int samples, std::uint64_t seed) {
  FatnessReport rep;
  const int n = alg.n();
  const int k = alg.rank();

  auto make_witness = [&](RatVec u_k) {
    rep.fat = false;
    rep.witness = std::move(u_k);
    return rep;
  };
  auto e_dir = [&](int a) {
    RatVec u(static_cast<size_t>(k), Rational(0));
    u[static_cast<size_t>(a)] = 1;
    return u;
  };
  auto deficient = [&](const RatVec& u_k) {
    return fat_span_dim(alg, embed_direction(alg, u_k)) < n;
  };

  if (alg.step() == 1) {  // Riemannian: D = TM
    rep.fat = true;
    return rep;
  }
  if (alg.step() >= 3) {
    // g_1 + [X, g_1] sits inside g_1 + g_2, a proper subspace.
    RatVec w = e_dir(0);
    if (!deficient(w)) throw ValidationError("internal: step>=3 algebra with fat direction");
    return make_witness(std::move(w));
  }

  // Step 2.
  const int dim_g2 = n - k;
  if (dim_g2 == 1) {
    // Corank 1: fat iff the bracket matrix has trivial kernel.
    const auto ker = kernel_basis(corank1_bracket_matrix(alg));
    if (ker.empty()) {
      rep.fat = true;
      return rep;
    }
    RatVec w = ker.front();
    if (!deficient(w)) throw ValidationError("internal: kernel direction not deficient");
    return make_witness(std::move(w));
  }
  if (dim_g2 >= k) {
    // rank(ad_X : g_1 -> g_2) <= k-1 < dim g_2 for every X.
    RatVec w = e_dir(0);
    if (!deficient(w)) throw ValidationError("internal: dim g_2 >= k but direction not deficient");
    return make_witness(std::move(w));
  }

  // Deterministic confirmation search, then seeded random batches. A found
  // witness is an exact certificate; absence after sampling is reported as
  // fat with exact=false.
  // TODO: step-2 groups whose non-fat locus is a proper subvariety (e.g.
  // quaternionic-type examples) need a resultant-based search here.
  for (int a = 0; a < k; ++a) {
    RatVec u = e_dir(a);
    if (deficient(u)) return make_witness(std::move(u));
  }
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b)
      for (int sgn : {1, -1}) {
        RatVec u = e_dir(a);
        u[static_cast<size_t>(b)] = sgn;
        if (deficient(u)) return make_witness(std::move(u));
      }
  const CounterRng rng(seed ^ 0xfa7);
  for (int s = 0; s < samples; ++s) {
    RatVec u(static_cast<size_t>(k), Rational(0));
    bool nonzero = false;
    for (int c = 0; c < k; ++c) {
      const long v = rng.uniform_int(static_cast<std::uint64_t>(s * k + c), -9, 9);
      u[static_cast<size_t>(c)] = v;
      nonzero = nonzero || v != 0;
    }
    if (!nonzero) u[0] = 1;
    if (deficient(u)) return make_witness(std::move(u));
  }
  rep.fat = true;
  rep.exact = false;
  return rep;
}

AbnormalLineReport has_abnormal_line(const StratifiedLieAlgebra& alg, const RatVec& u) {
  const RatVec x = embed_direction(alg, u);
  const int n = alg.n();
  RatMatrix span(0, n);
  std::vector<RatVec> current;
  for (int a = 1; a <= alg.rank(); ++a) {
    RatVec e(static_cast<size_t>(n), Rational(0));
    e[static_cast<size_t>(a - 1)] = 1;
    span.append_row(e);
    current.push_back(std::move(e));
  }
  for (int i = 1; i <= alg.step() - 1; ++i) {
    std::vector<RatVec> next;
    for (const auto& v : current) {
      RatVec b = alg.bracket(x, v);
      if (!is_zero_vec(b)) {
        span.append_row(b);
        next.push_back(std::move(b));
      }
    }
    current = std::move(next);
  }
  AbnormalLineReport rep;
  if (exact_rank(span) == n) return rep;
  const auto ker = kernel_basis(span);  // rows have full width n, so the right
                                        // kernel of the span matrix is the annihilator
  rep.abnormal = true;
  rep.annihilator = ker.front();
  return rep;
}

std::optional<RatVec> find_abnormal_line_direction(const StratifiedLieAlgebra& alg, int samples,
                                                   std::uint64_t seed) {
  const int k = alg.rank();
  for (int a = 0; a < k; ++a) {
    RatVec u(static_cast<size_t>(k), Rational(0));
    u[static_cast<size_t>(a)] = 1;
    if (has_abnormal_line(alg, u).abnormal) return u;
  }
  // Corank-1 kernel directions, when applicable.
  if (alg.step() == 2 && alg.n() == k + 1) {
    const auto ker = kernel_basis(corank1_bracket_matrix(alg));
    if (!ker.empty() && has_abnormal_line(alg, ker.front()).abnormal) return ker.front();
  }
  const CounterRng rng(seed ^ 0xab0);
  for (int s = 0; s < samples; ++s) {
    RatVec u(static_cast<size_t>(k), Rational(0));
    bool nonzero = false;
    for (int c = 0; c < k; ++c) {
      const long v = rng.uniform_int(static_cast<std::uint64_t>(s * k + c), -9, 9);
      u[static_cast<size_t>(c)] = v;
      nonzero = nonzero || v != 0;
    }
    if (!nonzero) u[0] = 1;
    if (has_abnormal_line(alg, u).abnormal) return u;
  }
  return std::nullopt;
}

bool is_ideal(const StratifiedLieAlgebra& alg, int samples, std::uint64_t seed) {
  return is_fat(alg, samples, seed).fat;
}

}  // namespace carnot
