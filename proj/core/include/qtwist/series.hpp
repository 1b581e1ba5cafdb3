#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "qtwist/coeffs.hpp"

namespace qtwist {

/// The prime-power terms of
///
///     sum_{n <= Y} Lambda(n) lambda(n) s(n) / n^{1+it}
///
/// for a completely multiplicative sign s with s(p) in {-1, 0, +1}. Both the
/// quadratic characters chi_D and the random model X_n are such signs, so
/// the family and the model share this table. Terms with p^m > Y are
/// excluded exactly.
class PrimePowerSeries {
 public:
  struct Term {
    std::uint64_t prime;
    unsigned exponent;
    std::uint64_t value;     // p^m
    std::size_t prime_index; // into primes()
    Complex coeff;           // log p * lambda(p^m) / p^{m(1+it)}
    Complex conj_coeff;      // log p * conj(lambda(p^m)) / p^{m(1-it)}
  };

  /// Throws MissingDataError when the provider lacks a prime <= Y.
  PrimePowerSeries(const SatakeProvider& provider, double length, double t);

  double length() const noexcept { return length_; }
  double t() const noexcept { return t_; }
  std::span<const Term> terms() const noexcept { return terms_; }
  std::span<const std::uint64_t> primes() const noexcept { return primes_; }

  /// sum_p [s_p != 0] (even_p + s_p * odd_p), with sign(i) giving s at
  /// primes()[i]. Compensated summation once there are many primes.
  template <class SignFn>
  Complex evaluate(SignFn&& sign) const {
    return accumulate(std::forward<SignFn>(sign), even_, odd_);
  }
  /// Same series with conjugate coefficients, evaluated term by term.
  template <class SignFn>
  Complex evaluate_conjugate(SignFn&& sign) const {
    return accumulate(std::forward<SignFn>(sign), conj_even_, conj_odd_);
  }

  /// The coefficient of the prime-p block when s_p = +1 and s_p = -1, i.e.
  /// log p * sum_j alpha/(p^{1+it} - alpha) truncated at Y, and its mirror.
  Complex block_plus(std::size_t prime_index) const { return even_[prime_index] + odd_[prime_index]; }
  Complex block_minus(std::size_t prime_index) const { return even_[prime_index] - odd_[prime_index]; }

 private:
  static constexpr std::size_t kCompensateAbove = 78498;  // pi(10^6)

  template <class SignFn>
  Complex accumulate(SignFn&& sign, const std::vector<Complex>& even,
                     const std::vector<Complex>& odd) const;

  double length_;
  double t_;
  std::vector<Term> terms_;
  std::vector<std::uint64_t> primes_;
  std::vector<Complex> even_, odd_, conj_even_, conj_odd_;
};

}  // namespace qtwist

#include "qtwist/summation.hpp"

namespace qtwist {

template <class SignFn>
Complex PrimePowerSeries::accumulate(SignFn&& sign, const std::vector<Complex>& even,
                                     const std::vector<Complex>& odd) const {
  const std::size_t n = primes_.size();
  if (n > kCompensateAbove) {
    CompensatedSum sum;
    for (std::size_t i = 0; i < n; ++i) {
      const int s = sign(i);
      if (s != 0) sum.add(s > 0 ? even[i] + odd[i] : even[i] - odd[i]);
    }
    return sum.value();
  }
  Complex sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const int s = sign(i);
    if (s != 0) sum += s > 0 ? even[i] + odd[i] : even[i] - odd[i];
  }
  return sum;
}

}  // namespace qtwist
