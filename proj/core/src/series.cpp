#include "qtwist/series.hpp"

#include <algorithm>
#include <cmath>

#include "qtwist/ntcore.hpp"

namespace qtwist {

PrimePowerSeries::PrimePowerSeries(const SatakeProvider& provider, double length, double t)
    : length_(length), t_(t) {
  if (!(length >= 2.0)) return;
  const auto limit = static_cast<std::uint64_t>(std::floor(length));
  const PrimeTable table = sieve_primes(limit);
  primes_.assign(table.primes().begin(), table.primes().end());
  provider.require_primes(table, limit);

  even_.assign(primes_.size(), 0.0);
  odd_.assign(primes_.size(), 0.0);
  conj_even_.assign(primes_.size(), 0.0);
  conj_odd_.assign(primes_.size(), 0.0);

  for (std::size_t i = 0; i < primes_.size(); ++i) {
    const std::uint64_t p = primes_[i];
    const double log_p = std::log(static_cast<double>(p));
    std::uint64_t q = p;
    for (unsigned m = 1;; ++m) {
      const Complex lam = provider.lambda(p, m);
      const double log_q = m * log_p;
      // n^{-(1 +- it)} = n^{-1} e^{-+ i t log n}
      const Complex phase = std::polar(1.0, -t * log_q);
      const double scale = log_p / static_cast<double>(q);
      const Complex c = scale * lam * phase;
      const Complex cc = scale * std::conj(lam) * std::conj(phase);
      terms_.push_back({p, m, q, i, c, cc});
      if (m % 2 == 0) {
        even_[i] += c;
        conj_even_[i] += cc;
      } else {
        odd_[i] += c;
        conj_odd_[i] += cc;
      }
      if (q > limit / p) break;
      q *= p;
    }
  }
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return a.value < b.value; });
}

}  // namespace qtwist
