#include <cmath>
#include <limits>
#include <string>

#include "qtwist/analysis.hpp"
#include "qtwist/errors.hpp"
#include "qtwist/ntcore.hpp"

namespace qtwist {

SmallValueStats small_values(const ComplexSampleSet& values, double eta) {
  if (!(eta > 0.0)) throw DomainError("small_values: eta must be positive");
  if (values.empty()) throw DomainError("small_values of an empty sample set");
  SmallValueStats out;
  out.min_modulus = std::numeric_limits<double>::infinity();
  for (const Complex& w : values.values) {
    const double r = std::abs(w);
    if (r <= eta) ++out.count;
    out.min_modulus = std::min(out.min_modulus, r);
  }
  return out;
}

PrimeSumDiagnostics prime_sum_diagnostics(const SatakeProvider& provider, double X,
                                          std::uint64_t P, double t) {
  if (!(X >= 2.0)) throw DomainError("prime_sum_diagnostics: X must be >= 2");
  if (static_cast<double>(P) < X) {
    throw DomainError("prime_sum_diagnostics: cutoff P = " + std::to_string(P) +
                      " lies below X = " + std::to_string(X));
  }
  PrimeSumDiagnostics out;
  out.X = X;
  out.P = P;
  const PrimeTable table = sieve_primes(P);
  const auto lo = static_cast<std::uint64_t>(std::floor(X)) + 1;
  for (const std::uint64_t p : table.primes_between(lo, P)) {
    const double pd = static_cast<double>(p);
    const double lp = std::log(pd);
    const Complex lam = provider.lambda(p, 1);
    out.abs_sum += lp * lp * std::norm(lam) / (pd * pd);
    out.signed_sum += lp * lp * lam * lam / (pd * pd) * std::polar(1.0, -2.0 * t * lp);
  }
  const double log_x = std::log(X);
  out.abs_comparator = log_x / X;
  if (const auto tau0 = provider.self_dual_twist()) {
    const Complex s(1.0, -2.0 * t + *tau0);
    out.signed_comparator = log_x / (s * std::exp(s * log_x));
  }
  return out;
}

}  // namespace qtwist
