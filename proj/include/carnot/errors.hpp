#ifndef CARNOT_ERRORS_HPP
#define CARNOT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace carnot {

/// Base class for every error raised by this library. `code()` is a stable
/// machine-readable tag; `what()` carries the human-readable detail.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

private:
  std::string code_;
};

// Algebra validation failures. Each names the offending pair/triple.
class ValidationError : public Error {
public:
  using Error::Error;
  explicit ValidationError(const std::string& msg) : Error("ValidationError", msg) {}
};

class AntisymmetryViolation : public ValidationError {
public:
  AntisymmetryViolation(int i, int j, const std::string& msg)
      : ValidationError("AntisymmetryViolation", msg), i(i), j(j) {}
  int i, j;
};

class JacobiViolation : public ValidationError {
public:
  JacobiViolation(int i, int j, int k, const std::string& msg)
      : ValidationError("JacobiViolation", msg), i(i), j(j), k(k) {}
  int i, j, k;
};

class GradingViolation : public ValidationError {
public:
  GradingViolation(int i, int j, int m, const std::string& msg)
      : ValidationError("GradingViolation", msg), i(i), j(j), m(m) {}
  int i, j, m;
};

class NotStratified : public ValidationError {
public:
  NotStratified(int layer, const std::string& msg)
      : ValidationError("NotStratified", msg), layer(layer) {}
  int layer;
};

class ZeroDirection : public Error {
public:
  explicit ZeroDirection(const std::string& msg = "direction vector is zero")
      : Error("ZeroDirection", msg) {}
};

class NotAmple : public Error {
public:
  explicit NotAmple(const std::string& msg) : Error("NotAmple", msg) {}
};

// Corank-1 geometry errors.
class NotSkew : public Error {
public:
  NotSkew(int i, int j, const std::string& msg) : Error("NotSkew", msg), i(i), j(j) {}
  int i, j;
};

class AllZero : public Error {
public:
  explicit AllZero(const std::string& msg) : Error("AllZero", msg) {}
};

class OutOfDomain : public Error {
public:
  explicit OutOfDomain(const std::string& msg) : Error("OutOfDomain", msg) {}
};

class CutLocus : public Error {
public:
  explicit CutLocus(const std::string& msg) : Error("CutLocus", msg) {}
};

class IdentityPoint : public Error {
public:
  explicit IdentityPoint(const std::string& msg = "point is the identity")
      : Error("Identity", msg) {}
};

class DomainError : public Error {
public:
  explicit DomainError(const std::string& msg) : Error("DomainError", msg) {}
};

// MCP verification errors.
class BadOmega : public Error {
public:
  explicit BadOmega(const std::string& msg) : Error("BadOmega", msg) {}
};

class PositiveK : public Error {
public:
  explicit PositiveK(const std::string& msg) : Error("PositiveK", msg) {}
};

// File format errors.
class ParseError : public Error {
public:
  ParseError(int line, int column, const std::string& msg)
      : Error("ParseError", "line " + std::to_string(line) + ", column " +
                                std::to_string(column) + ": " + msg),
        line(line), column(column) {}
  int line, column;
};

}  // namespace carnot

#endif
