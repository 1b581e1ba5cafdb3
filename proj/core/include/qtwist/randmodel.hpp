#pragma once

// The random model: independent X_p with
//
//     P(X_p = +1) = P(X_p = -1) = p / (2(p+1)),   P(X_p = 0) = 1/(p+1),
//
// X_n = prod_p X_p^{v_p(n)}, and the truncated random series
// sum_{n <= Y} Lambda(n) lambda(n) X_n / n^{1+it}.

#include <cstdint>
#include <span>
#include <vector>

#include "qtwist/coeffs.hpp"
#include "qtwist/family.hpp"
#include "qtwist/series.hpp"

namespace qtwist {

/// Counter-based draws of X_p: the value at (key, prime index) is a pure
/// function of both, so any subset of primes or draws can be generated
/// independently and in any order.
class ModelSampler {
 public:
  explicit ModelSampler(std::span<const std::uint64_t> primes);

  std::span<const std::uint64_t> primes() const noexcept { return primes_; }
  int sign(std::uint64_t key, std::size_t prime_index) const;

  /// Key of the assignment generated from a user seed.
  static std::uint64_t assignment_key(std::uint64_t seed);
  /// Seed of draw number `draw` in a sample set generated from `seed`;
  /// sample_assignment(P, derive_seed(seed, k)) reproduces that draw.
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t draw);

 private:
  std::vector<std::uint64_t> primes_;
  std::vector<std::uint64_t> zero_below_;  // uniform < this => X_p = 0
  std::vector<std::uint64_t> plus_below_;  // else uniform < this => X_p = +1
};

struct RandomAssignment {
  std::uint64_t cutoff = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> primes;  // every prime <= cutoff
  std::vector<std::int8_t> values;    // X_p, parallel to primes

  /// Throws CoverageError for p > cutoff and DomainError for non-primes.
  int at(std::uint64_t p) const;
};

struct RandomSeriesValue {
  Complex value;
  double truncation = 0.0;
  std::uint64_t seed = 0;
};

struct MonteCarloEstimate {
  Complex estimate;
  double standard_error = 0.0;
};

/// Throws DomainError for P < 2.
RandomAssignment sample_assignment(std::uint64_t prime_limit, std::uint64_t seed);

/// X_n for the given assignment; X_1 = 1. Throws CoverageError when a prime
/// factor of n exceeds the cutoff.
int x_n(const RandomAssignment& assignment, std::uint64_t n);

/// E[X_n] = prod_{p | n} p/(p+1) when n is a perfect square, else 0.
double expected_x(std::uint64_t n);

RandomSeriesValue random_partial_sum(const RandomAssignment& assignment, double length, double t,
                                     const SatakeProvider& provider);
Complex random_partial_sum(const PrimePowerSeries& series, const ModelSampler& sampler,
                           std::uint64_t key);

inline constexpr double kDefaultTupleBudget = 1e8;

/// E[S^j T^l] for the truncated series S and its conjugate-coefficient twin
/// T, by enumerating (j+l)-tuples of prime powers <= Y and weighting each
/// with E[X_{n_1 ... n_{j+l}}]. Throws BudgetError when (#prime powers)^(j+l)
/// exceeds `tuple_budget`.
Complex exact_moment(unsigned j, unsigned l, double length, double t,
                     const SatakeProvider& provider, double tuple_budget = kDefaultTupleBudget);
Complex exact_moment(const PrimePowerSeries& series, unsigned j, unsigned l,
                     double tuple_budget = kDefaultTupleBudget);

/// Sample mean of S^j T^l over independent assignments with its standard
/// error. Requires samples >= 2.
MonteCarloEstimate mc_moment(unsigned j, unsigned l, double length, double t,
                             const SatakeProvider& provider, std::uint64_t samples,
                             std::uint64_t seed);

/// `count` independent realizations of the truncated series; labels are the
/// draw indices.
ComplexSampleSet mc_value_set(double length, double t, const SatakeProvider& provider,
                              std::uint64_t count, std::uint64_t seed);
ComplexSampleSet mc_value_set(const PrimePowerSeries& series, int dimension,
                              std::uint64_t count, std::uint64_t seed);

/// Truncation length for model value sets that keeps the characteristic
/// function tail below the grid resolution up to |z| = max_frequency:
/// 16 * max_frequency^{2/(1-2 theta)}.
double model_length_for(double max_frequency, double theta);

}  // namespace qtwist
