#include "qtwist/ntcore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "qtwist/errors.hpp"
#include "qtwist/parallel.hpp"

namespace qtwist {

namespace {

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// D = 1 (mod 4) squarefree, or D = 4m with m = 2,3 (mod 4) squarefree;
// `squarefree` answers for positive arguments.
template <class SquarefreeFn>
bool fundamental_by_rule(std::int64_t d, SquarefreeFn&& squarefree) {
  if (d == 0) return false;
  const std::uint64_t n = d < 0 ? static_cast<std::uint64_t>(-d) : static_cast<std::uint64_t>(d);
  const std::int64_t r = ((d % 4) + 4) % 4;
  if (r == 1) return squarefree(n);
  if (r != 0) return false;
  const std::int64_t m = d / 4;
  const std::int64_t mr = ((m % 4) + 4) % 4;
  return (mr == 2 || mr == 3) && squarefree(n / 4);
}

}  // namespace

// ---------------------------------------------------------------------------
// FundamentalDiscriminant

FundamentalDiscriminant::FundamentalDiscriminant(std::int64_t value) : value_(value) {
  if (!is_valid(value)) {
    throw DomainError(std::to_string(value) + " is not a fundamental discriminant");
  }
}

bool FundamentalDiscriminant::is_valid(std::int64_t value) {
  return fundamental_by_rule(value, [](std::uint64_t n) { return is_squarefree(n); });
}

std::optional<FundamentalDiscriminant> FundamentalDiscriminant::try_make(std::int64_t value) {
  if (!is_valid(value)) return std::nullopt;
  return FundamentalDiscriminant(value, Unchecked{});
}

// ---------------------------------------------------------------------------
// Primes

PrimeTable sieve_primes(std::uint64_t limit) {
  PrimeTable table;
  table.limit_ = limit;
  if (limit < 2) return table;

  // composite[i] describes the odd number 2i+1.
  const std::uint64_t half = (limit + 1) / 2;
  std::vector<std::uint8_t> composite(half, 0);
  composite[0] = 1;
  for (std::uint64_t i = 1; (2 * i + 1) * (2 * i + 1) <= limit; ++i) {
    if (composite[i]) continue;
    const std::uint64_t p = 2 * i + 1;
    for (std::uint64_t j = (p * p) / 2; j < half; j += p) composite[j] = 1;
  }

  table.primes_.push_back(2);
  for (std::uint64_t i = 1; i < half; ++i) {
    if (!composite[i]) table.primes_.push_back(2 * i + 1);
  }

  for (const std::uint64_t p : table.primes_) {
    std::uint64_t q = p;
    unsigned m = 1;
    for (;;) {
      table.powers_.push_back({p, m, q});
      if (q > limit / p) break;
      q *= p;
      ++m;
    }
  }
  std::sort(table.powers_.begin(), table.powers_.end(),
            [](const PrimePower& a, const PrimePower& b) { return a.value < b.value; });
  return table;
}

std::span<const std::uint64_t> PrimeTable::primes_between(std::uint64_t lo,
                                                         std::uint64_t hi) const {
  const auto first = std::lower_bound(primes_.begin(), primes_.end(), lo);
  const auto last = std::upper_bound(first, primes_.end(), hi);
  return {first, last};
}

bool PrimeTable::is_prime(std::uint64_t n) const {
  return std::binary_search(primes_.begin(), primes_.end(), n);
}

double PrimeTable::mangoldt(std::uint64_t n) const {
  if (n > limit_) {
    throw CoverageError("mangoldt(" + std::to_string(n) + ") beyond prime table limit " +
                        std::to_string(limit_));
  }
  const auto it = std::lower_bound(powers_.begin(), powers_.end(), n,
                                   [](const PrimePower& pp, std::uint64_t v) { return pp.value < v; });
  if (it == powers_.end() || it->value != n) return 0.0;
  return std::log(static_cast<double>(it->prime));
}

double mangoldt(std::uint64_t n) {
  if (n < 2) return 0.0;
  const auto divisors = prime_divisors(n);
  return divisors.size() == 1 ? std::log(static_cast<double>(divisors.front())) : 0.0;
}

std::vector<std::uint64_t> prime_divisors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  if (n % 2 == 0) {
    out.push_back(2);
    while (n % 2 == 0) n /= 2;
  }
  for (std::uint64_t p = 3; p * p <= n; p += 2) {
    if (n % p != 0) continue;
    out.push_back(p);
    while (n % p == 0) n /= p;
  }
  if (n > 1) out.push_back(n);
  return out;
}

bool is_squarefree(std::uint64_t n) {
  if (n == 0) return false;
  if (n % 4 == 0) return false;
  for (std::uint64_t p = 3; p * p <= n; p += 2) {
    if (n % p != 0) continue;
    n /= p;
    if (n % p == 0) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Kronecker symbol: binary Jacobi algorithm with the (a/2) and sign rules.

int kronecker(std::int64_t a, std::uint64_t b) {
  if (b == 0) return (a == 1 || a == -1) ? 1 : 0;
  if ((a & 1) == 0 && (b & 1) == 0) return 0;

  int k = 1;
  const int v = std::countr_zero(b);
  b >>= v;
  if (v & 1) {
    // (a/2) = 0 for even a, +1 for a = +-1 (mod 8), -1 for a = +-3 (mod 8).
    const auto r = static_cast<std::uint64_t>(a) & 7;
    if (r == 3 || r == 5) k = -k;
  }

  std::uint64_t x;
  if (a < 0) {
    x = static_cast<std::uint64_t>(0) - static_cast<std::uint64_t>(a);
    if ((b & 3) == 3) k = -k;
  } else {
    x = static_cast<std::uint64_t>(a);
  }

  // b is odd and positive from here on; this is the Jacobi symbol (x/b).
  x %= b;
  while (x != 0) {
    const int z = std::countr_zero(x);
    x >>= z;
    if ((z & 1) && ((b & 7) == 3 || (b & 7) == 5)) k = -k;
    if (x & b & 2) k = -k;
    const std::uint64_t r = x;
    x = b % r;
    b = r;
  }
  return b == 1 ? k : 0;
}

// ---------------------------------------------------------------------------
// Enumeration over [-n, n] with a segmented squarefree sieve on [1, n].

std::vector<FundamentalDiscriminant> enumerate_discriminants(std::uint64_t n) {
  if (n == 0) throw DomainError("enumerate_discriminants: N must be >= 1");

  const PrimeTable small = sieve_primes(isqrt(n));
  std::vector<std::uint8_t> squarefree(n + 1, 1);
  squarefree[0] = 0;

  constexpr std::size_t kSegment = std::size_t{1} << 16;
  for_each_block(n + 1, kSegment, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (const std::uint64_t p : small.primes()) {
      const std::uint64_t sq = p * p;
      if (sq >= hi) break;
      for (std::uint64_t j = (lo + sq - 1) / sq * sq; j < hi; j += sq) squarefree[j] = 0;
    }
  });

  const auto sf = [&](std::uint64_t m) { return squarefree[m] != 0; };
  std::vector<FundamentalDiscriminant> out;
  out.reserve(static_cast<std::size_t>(0.61 * static_cast<double>(n)) + 16);
  const auto signed_n = static_cast<std::int64_t>(n);
  for (std::int64_t d = -signed_n; d <= signed_n; ++d) {
    if (fundamental_by_rule(d, sf)) {
      out.push_back(FundamentalDiscriminant(d, FundamentalDiscriminant::Unchecked{}));
    }
  }
  return out;
}

}  // namespace qtwist
