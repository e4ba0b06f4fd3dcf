#ifndef CARNOT_SPEC_IO_HPP
#define CARNOT_SPEC_IO_HPP

#include "carnot/corank1.hpp"
#include "carnot/lie_algebra.hpp"
#include "carnot/rational_linalg.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace carnot {

/// Parsed + validated group specification. Corank-1 structure-constant specs
/// are detected and materialized in both forms.
struct LoadedSpec {
  std::string source;  // builtin name or file path
  std::string digest;  // fnv1a-64 of the defining text, hex
  std::optional<StratifiedLieAlgebra> algebra;
  std::optional<RatMatrix> corank1_A;  // exact bracket matrix, when corank-1
  std::optional<Corank1Group> group;
};

/// Text key-value format, one `key value...` statement per line, `#` comments.
///
///   format_version 1
///   type corank1 | structure_constants
///   # corank1:
///   k 2
///   A 0 1
///   A -1 0
///   # structure_constants:
///   n 4
///   layers 1 1 2 3
///   bracket 1 2  0 0 1 0
///
/// Entries are exact rationals ("p/q", integers, or finite decimals).
/// Unknown keys are rejected (ParseError with line/column).
LoadedSpec parse_spec_text(const std::string& text, const std::string& source_name);

/// Loads a builtin name (see builtins.hpp) or a file path.
LoadedSpec load_spec(const std::string& path_or_name);

/// Serializes back to the file format; parse(serialize(x)) == x exactly.
std::string serialize_algebra_spec(const StratifiedLieAlgebra& alg);
std::string serialize_corank1_spec(const RatMatrix& a);

std::uint64_t fnv1a64(const std::string& data);
std::string digest_hex(const std::string& data);

}  // namespace carnot

#endif
