#include "carnot/spec_io.hpp"

#include "carnot/builtins.hpp"
#include "carnot/errors.hpp"

#include <fstream>
#include <sstream>

namespace carnot {

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string digest_hex(const std::string& data) {
  static const char* hex = "0123456789abcdef";
  const std::uint64_t h = fnv1a64(data);
  std::string out(16, '0');
  for (int i = 0; i < 16; ++i) out[static_cast<size_t>(15 - i)] = hex[(h >> (4 * i)) & 0xf];
  return out;
}

namespace {

struct Statement {
  int line;
  std::string key;
  std::vector<std::string> args;
};

std::vector<Statement> tokenize(const std::string& text) {
  std::vector<Statement> out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    Statement st{lineno, key, {}};
    std::string tok;
    while (ls >> tok) st.args.push_back(tok);
    out.push_back(std::move(st));
  }
  return out;
}

Rational arg_rational(const Statement& st, size_t idx) {
  try {
    return parse_rational(st.args.at(idx));
  } catch (const std::exception& e) {
    throw ParseError(st.line, static_cast<int>(idx + 2), e.what());
  }
}

int arg_int(const Statement& st, size_t idx) {
  try {
    size_t pos = 0;
    const int v = std::stoi(st.args.at(idx), &pos);
    if (pos != st.args.at(idx).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError(st.line, static_cast<int>(idx + 2),
                     "expected an integer, got '" + st.args.at(idx) + "'");
  }
}

LoadedSpec finish_from_algebra(AlgebraSpecData spec, const std::string& source,
                               const std::string& text) {
  LoadedSpec out;
  out.source = source;
  out.digest = digest_hex(text);
  spec.name = spec.name.empty() ? source : spec.name;
  out.algebra = validate_algebra(spec);
  out.corank1_A = corank1_matrix(*out.algebra);
  if (out.corank1_A) {
    Eigen::MatrixXd a(out.corank1_A->rows(), out.corank1_A->cols());
    for (int i = 0; i < a.rows(); ++i)
      for (int j = 0; j < a.cols(); ++j)
        a(i, j) = (*out.corank1_A)(i, j).convert_to<double>();
    // The abelian case (A = 0) has no corank-1 geometry; leave group empty.
    if (a.cwiseAbs().maxCoeff() > 0) out.group = canonicalize(a);
  }
  return out;
}

}  // namespace

LoadedSpec parse_spec_text(const std::string& text, const std::string& source_name) {
  const auto statements = tokenize(text);

  std::optional<int> version;
  std::string type;
  std::optional<int> k, n;
  std::vector<int> layers;
  std::vector<RatVec> a_rows;
  std::vector<std::pair<std::pair<int, int>, RatVec>> brackets;

  for (const auto& st : statements) {
    if (st.key == "format_version") {
      if (st.args.size() != 1) throw ParseError(st.line, 1, "format_version takes one value");
      version = arg_int(st, 0);
    } else if (st.key == "type") {
      if (st.args.size() != 1 ||
          (st.args[0] != "corank1" && st.args[0] != "structure_constants"))
        throw ParseError(st.line, 2, "type must be corank1 or structure_constants");
      type = st.args[0];
    } else if (st.key == "k") {
      k = arg_int(st, 0);
    } else if (st.key == "n") {
      n = arg_int(st, 0);
    } else if (st.key == "A") {
      RatVec row;
      for (size_t i = 0; i < st.args.size(); ++i) row.push_back(arg_rational(st, i));
      a_rows.push_back(std::move(row));
    } else if (st.key == "layers") {
      for (size_t i = 0; i < st.args.size(); ++i) layers.push_back(arg_int(st, static_cast<int>(i)));
    } else if (st.key == "bracket") {
      if (st.args.size() < 2) throw ParseError(st.line, 2, "bracket needs i j coefficients...");
      const int i = arg_int(st, 0), j = arg_int(st, 1);
      RatVec coeffs;
      for (size_t c = 2; c < st.args.size(); ++c) coeffs.push_back(arg_rational(st, c));
      brackets.push_back({{i, j}, std::move(coeffs)});
    } else {
      throw ParseError(st.line, 1, "unknown key '" + st.key + "'");
    }
  }

  if (!version || *version != 1) throw ParseError(1, 1, "missing or unsupported format_version");
  if (type.empty()) throw ParseError(1, 1, "missing type");

  if (type == "corank1") {
    if (!k) throw ParseError(1, 1, "corank1 spec needs k");
    if (n || !layers.empty() || !brackets.empty())
      throw ParseError(1, 1, "corank1 specs take only k and A rows");
    if (static_cast<int>(a_rows.size()) != *k)
      throw ParseError(1, 1, "expected " + std::to_string(*k) + " rows of A, got " +
                                 std::to_string(a_rows.size()));
    for (const auto& row : a_rows)
      if (static_cast<int>(row.size()) != *k) throw ParseError(1, 1, "A row of wrong length");
    // Materialize the corank-1 algebra from the matrix.
    AlgebraSpecData spec;
    spec.n = *k + 1;
    spec.layers.assign(static_cast<size_t>(*k), 1);
    spec.layers.push_back(2);
    for (int i = 1; i <= *k; ++i)
      for (int j = i + 1; j <= *k; ++j) {
        RatVec v(static_cast<size_t>(*k + 1), Rational(0));
        v[static_cast<size_t>(*k)] = a_rows[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)];
        // Exact skewness of the rational input is part of validation below.
        const Rational& mirror = a_rows[static_cast<size_t>(j - 1)][static_cast<size_t>(i - 1)];
        if (mirror != -v[static_cast<size_t>(*k)])
          throw NotSkew(i - 1, j - 1,
                        "A(" + std::to_string(i - 1) + "," + std::to_string(j - 1) +
                            ") != -A(" + std::to_string(j - 1) + "," + std::to_string(i - 1) + ")");
        brackets.push_back({{i, j}, std::move(v)});
      }
    for (int i = 1; i <= *k; ++i)
      if (a_rows[static_cast<size_t>(i - 1)][static_cast<size_t>(i - 1)] != 0)
        throw NotSkew(i - 1, i - 1, "nonzero diagonal entry");
    bool all_zero = true;
    for (const auto& row : a_rows)
      for (const auto& entry : row) all_zero = all_zero && entry == 0;
    if (all_zero) throw AllZero("corank1 spec with A = 0 (abelian group)");
    spec.brackets = std::move(brackets);
    spec.name = source_name;
    return finish_from_algebra(std::move(spec), source_name, text);
  }

  // structure_constants
  if (!n) throw ParseError(1, 1, "structure_constants spec needs n");
  if (k || !a_rows.empty())
    throw ParseError(1, 1, "structure_constants specs take n, layers and brackets only");
  AlgebraSpecData spec;
  spec.n = *n;
  spec.layers = layers;
  for (auto& [key, coeffs] : brackets) {
    if (static_cast<int>(coeffs.size()) != *n)
      throw ParseError(1, 1, "bracket coefficient list must have length n");
    spec.brackets.push_back({key, coeffs});
  }
  spec.name = source_name;
  return finish_from_algebra(std::move(spec), source_name, text);
}

LoadedSpec load_spec(const std::string& path_or_name) {
  if (is_builtin_name(path_or_name)) {
    const auto spec = builtin_algebra(path_or_name);
    if (!spec)
      throw ParseError(1, 1, "unrecognized builtin '" + path_or_name + "'");
    const std::string canonical = serialize_algebra_spec(validate_algebra(*spec));
    return finish_from_algebra(*spec, path_or_name, canonical);
  }
  std::ifstream in(path_or_name, std::ios::binary);
  if (!in) throw ParseError(0, 0, "cannot open '" + path_or_name + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec_text(buf.str(), path_or_name);
}

std::string serialize_algebra_spec(const StratifiedLieAlgebra& alg) {
  std::ostringstream os;
  os << "format_version 1\n";
  os << "type structure_constants\n";
  os << "n " << alg.n() << "\n";
  os << "layers";
  for (int i = 1; i <= alg.n(); ++i) os << " " << alg.layer_of(i);
  os << "\n";
  for (const auto& [key, coeffs] : alg.bracket_table()) {
    os << "bracket " << key.first << " " << key.second;
    for (const auto& c : coeffs) os << " " << to_string(c);
    os << "\n";
  }
  return os.str();
}

std::string serialize_corank1_spec(const RatMatrix& a) {
  std::ostringstream os;
  os << "format_version 1\n";
  os << "type corank1\n";
  os << "k " << a.rows() << "\n";
  for (int i = 0; i < a.rows(); ++i) {
    os << "A";
    for (int j = 0; j < a.cols(); ++j) os << " " << to_string(a(i, j));
    os << "\n";
  }
  return os.str();
}

}  // namespace carnot
