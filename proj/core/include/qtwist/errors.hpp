#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qtwist {

/// Base of every error thrown by the library. `kind()` is a stable short tag
/// used by the CLI when it reports failures as JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Input outside the operation's domain (empty family, empty sample set, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain", what) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("parse", "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A loaded object violates one of its declared invariants.
class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& what) : Error("invariant", what) {}
};

/// Coefficient data requested for a prime the provider does not know.
class MissingDataError : public Error {
 public:
  explicit MissingDataError(std::uint64_t prime)
      : Error("missing-data", "no Satake parameters for prime " + std::to_string(prime)),
        prime_(prime) {}
  std::uint64_t prime() const noexcept { return prime_; }

 private:
  std::uint64_t prime_;
};

/// A random assignment or grid does not reach far enough.
class CoverageError : public Error {
 public:
  explicit CoverageError(const std::string& what) : Error("coverage", what) {}
};

class BudgetError : public Error {
 public:
  explicit BudgetError(const std::string& what) : Error("budget", what) {}
};

/// Fourier inversion attempted on a characteristic function that has not
/// decayed at the edge of the box.
class TruncationError : public Error {
 public:
  explicit TruncationError(const std::string& what) : Error("truncation", what) {}
};

/// Pole in an Euler factor: some |alpha_j(p)| >= p.
class SingularFactorError : public Error {
 public:
  explicit SingularFactorError(const std::string& what) : Error("singular-factor", what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace qtwist
