#pragma once

// Elementary number theory: prime tables, von Mangoldt weights, Kronecker
// symbols and fundamental discriminants.

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace qtwist {

/// A fundamental discriminant D, i.e. the conductor-signed discriminant of a
/// quadratic field, with D = 1 admitted for the trivial character.
///
/// Either D = 1 (mod 4) and D is squarefree, or D = 4m with m = 2, 3 (mod 4)
/// and m squarefree.
class FundamentalDiscriminant {
 public:
  /// Throws DomainError unless `value` satisfies the invariant above.
  explicit FundamentalDiscriminant(std::int64_t value);

  static bool is_valid(std::int64_t value);
  static std::optional<FundamentalDiscriminant> try_make(std::int64_t value);

  std::int64_t value() const noexcept { return value_; }
  std::uint64_t modulus() const noexcept {
    return static_cast<std::uint64_t>(value_ < 0 ? -value_ : value_);
  }

  friend auto operator<=>(const FundamentalDiscriminant&, const FundamentalDiscriminant&) = default;

 private:
  struct Unchecked {};
  FundamentalDiscriminant(std::int64_t value, Unchecked) : value_(value) {}
  friend std::vector<FundamentalDiscriminant> enumerate_discriminants(std::uint64_t);

  std::int64_t value_;
};

struct PrimePower {
  std::uint64_t prime;
  unsigned exponent;
  std::uint64_t value;  // prime^exponent
};

/// Primes and prime powers up to a limit. Immutable after construction.
class PrimeTable {
 public:
  PrimeTable() = default;

  std::uint64_t limit() const noexcept { return limit_; }
  std::span<const std::uint64_t> primes() const noexcept { return primes_; }
  /// Every p^m <= limit with m >= 1, ascending by value.
  std::span<const PrimePower> prime_powers() const noexcept { return powers_; }

  /// Primes p with lo <= p <= hi (clamped to the table).
  std::span<const std::uint64_t> primes_between(std::uint64_t lo, std::uint64_t hi) const;
  bool is_prime(std::uint64_t n) const;
  /// Lambda(n) looked up in the prime-power index; n must be <= limit().
  double mangoldt(std::uint64_t n) const;

 private:
  friend PrimeTable sieve_primes(std::uint64_t limit);

  std::uint64_t limit_ = 0;
  std::vector<std::uint64_t> primes_;
  std::vector<PrimePower> powers_;
};

/// Sieve of Eratosthenes. limit < 2 yields an empty table.
PrimeTable sieve_primes(std::uint64_t limit);

/// All fundamental discriminants with |D| <= n, ascending. Throws DomainError
/// for n == 0.
std::vector<FundamentalDiscriminant> enumerate_discriminants(std::uint64_t n);

/// Kronecker symbol (d/n) for any integer d and n >= 0.
int kronecker(std::int64_t d, std::uint64_t n);
inline int kronecker(FundamentalDiscriminant d, std::uint64_t n) { return kronecker(d.value(), n); }

/// Lambda(n): log p when n = p^m, otherwise 0. Factors n by trial division.
double mangoldt(std::uint64_t n);

bool is_squarefree(std::uint64_t n);

/// Distinct prime divisors of n, ascending (trial division).
std::vector<std::uint64_t> prime_divisors(std::uint64_t n);

}  // namespace qtwist
