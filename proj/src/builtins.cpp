#include "carnot/builtins.hpp"

#include "carnot/errors.hpp"

#include <sstream>

namespace carnot {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

RatVec unit(int n, int i) {  // 1-based
  RatVec v(static_cast<size_t>(n), Rational(0));
  v[static_cast<size_t>(i - 1)] = 1;
  return v;
}

AlgebraSpecData heisenberg(int d) {
  AlgebraSpecData s;
  s.name = "heisenberg:" + std::to_string(d);
  const int k = 2 * d;
  s.n = k + 1;
  s.layers.assign(static_cast<size_t>(k), 1);
  s.layers.push_back(2);
  for (int i = 0; i < d; ++i)
    s.brackets.push_back({{2 * i + 1, 2 * i + 2}, unit(s.n, s.n)});
  return s;
}

AlgebraSpecData engel() {
  AlgebraSpecData s;
  s.name = "engel";
  s.n = 4;
  s.layers = {1, 1, 2, 3};
  s.brackets.push_back({{1, 2}, unit(4, 3)});
  RatVec m4 = unit(4, 4);
  m4[3] = -1;
  s.brackets.push_back({{2, 3}, m4});
  return s;
}

AlgebraSpecData free_step2(int rank) {
  AlgebraSpecData s;
  s.name = "free:" + std::to_string(rank) + ":2";
  const int pairs = rank * (rank - 1) / 2;
  s.n = rank + pairs;
  s.layers.assign(static_cast<size_t>(rank), 1);
  for (int i = 0; i < pairs; ++i) s.layers.push_back(2);
  int next = rank + 1;
  for (int i = 1; i <= rank; ++i)
    for (int j = i + 1; j <= rank; ++j) s.brackets.push_back({{i, j}, unit(s.n, next++)});
  return s;
}

AlgebraSpecData kernel_family(int m, const std::vector<Rational>& alphas) {
  AlgebraSpecData s;
  const int k = m + 2 * static_cast<int>(alphas.size());
  s.n = k + 1;
  s.layers.assign(static_cast<size_t>(k), 1);
  s.layers.push_back(2);
  for (size_t i = 0; i < alphas.size(); ++i) {
    RatVec v(static_cast<size_t>(s.n), Rational(0));
    v[static_cast<size_t>(s.n - 1)] = alphas[i];
    s.brackets.push_back({{m + 2 * static_cast<int>(i) + 1, m + 2 * static_cast<int>(i) + 2}, v});
  }
  return s;
}

AlgebraSpecData abelian(int n) {
  AlgebraSpecData s;
  s.name = "abelian:" + std::to_string(n);
  s.n = n;
  s.layers.assign(static_cast<size_t>(n), 1);
  return s;
}

}  // namespace

std::optional<AlgebraSpecData> builtin_algebra(const std::string& name) {
  const auto parts = split(name, ':');
  try {
    if (parts[0] == "engel" && parts.size() == 1) return engel();
    if (parts[0] == "heisenberg" && parts.size() == 2) {
      const int d = std::stoi(parts[1]);
      if (d < 1 || d > 4) throw DomainError("heisenberg:d supports d = 1..4");
      return heisenberg(d);
    }
    if (parts[0] == "free" && parts.size() == 3) {
      const int rank = std::stoi(parts[1]);
      if (std::stoi(parts[2]) != 2 || rank < 2 || rank > 3)
        throw DomainError("free:r:s supports rank 2..3, step 2");
      return free_step2(rank);
    }
    if (parts[0] == "kernel" && parts.size() == 3) {
      const int m = std::stoi(parts[1]);
      if (m < 0) throw DomainError("kernel:m:... needs m >= 0");
      std::vector<Rational> alphas;
      for (const auto& a : split(parts[2], ',')) {
        Rational r = parse_rational(a);
        if (r <= 0) throw DomainError("kernel block weights must be positive");
        alphas.push_back(std::move(r));
      }
      if (alphas.empty()) throw DomainError("kernel:m:... needs at least one block");
      AlgebraSpecData s = kernel_family(m, alphas);
      s.name = name;
      return s;
    }
    if (parts[0] == "abelian" && parts.size() == 2) {
      const int n = std::stoi(parts[1]);
      if (n < 1) throw DomainError("abelian:n needs n >= 1");
      return abelian(n);
    }
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  } catch (const std::out_of_range&) {
    return std::nullopt;
  }
  return std::nullopt;
}

bool is_builtin_name(const std::string& name) {
  const auto parts = split(name, ':');
  return parts[0] == "engel" || parts[0] == "heisenberg" || parts[0] == "free" ||
         parts[0] == "kernel" || parts[0] == "abelian";
}

std::vector<std::string> standard_library_names() {
  return {"heisenberg:1", "heisenberg:2", "heisenberg:3", "heisenberg:4", "engel",
          "free:2:2",     "free:3:2",     "kernel:1:1",   "kernel:2:1",   "abelian:3"};
}

std::optional<RatMatrix> corank1_matrix(const StratifiedLieAlgebra& alg) {
  if (alg.step() != 2 || alg.n() != alg.rank() + 1) return std::nullopt;
  const int k = alg.rank();
  RatMatrix a(k, k);
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= k; ++j)
      a(i - 1, j - 1) = alg.bracket_basis(i, j)[static_cast<size_t>(alg.n() - 1)];
  return a;
}

}  // namespace carnot
