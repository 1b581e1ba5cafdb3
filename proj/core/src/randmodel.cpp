#include "qtwist/randmodel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qtwist/errors.hpp"
#include "qtwist/ntcore.hpp"
#include "qtwist/parallel.hpp"

namespace qtwist {

namespace {

// SplitMix64 output function.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

__extension__ typedef unsigned __int128 uint128;

std::uint64_t scaled_threshold(std::uint64_t num, std::uint64_t den) {
  // floor(2^64 * num / den), saturating at 2^64 - 1.
  const uint128 v = (static_cast<uint128>(num) << 64) / den;
  return v > ~std::uint64_t{0} ? ~std::uint64_t{0} : static_cast<std::uint64_t>(v);
}

Complex ipow(Complex z, unsigned k) {
  Complex r = 1.0;
  for (; k != 0; k >>= 1) {
    if (k & 1) r *= z;
    z *= z;
  }
  return r;
}

// Depth-first enumeration of prime-power tuples for exact_moment. Only the
// parity of each prime's total exponent matters for E[X_n]; a branch dies
// as soon as more primes have odd exponent than positions remain to fix.
class TupleEnumerator {
 public:
  TupleEnumerator(const PrimePowerSeries& series, unsigned j, unsigned l)
      : terms_(series.terms()), primes_(series.primes()), j_(j), depth_(j + l) {
    slots_.reserve(depth_);
  }

  Complex run_from(std::size_t first) {
    total_ = 0.0;
    visit(0, first, 1.0, 1.0);
    return total_;
  }

 private:
  struct Slot {
    std::size_t prime_index;
    unsigned parity;
  };

  void visit(unsigned pos, std::size_t k, Complex coeff, double weight) {
    const auto& term = terms_[k];
    const Complex c = coeff * (pos < j_ ? term.coeff : term.conj_coeff);
    double w = weight;

    auto it = std::find_if(slots_.begin(), slots_.end(),
                           [&](const Slot& s) { return s.prime_index == term.prime_index; });
    const bool fresh = it == slots_.end();
    if (fresh) {
      const double p = static_cast<double>(primes_[term.prime_index]);
      w *= p / (p + 1.0);
      slots_.push_back({term.prime_index, term.exponent & 1u});
      odd_ += term.exponent & 1u;
    } else {
      odd_ -= it->parity;
      it->parity ^= term.exponent & 1u;
      odd_ += it->parity;
    }

    const unsigned remaining = depth_ - pos - 1;
    if (odd_ <= remaining) {
      if (remaining == 0) {
        total_ += c * w;
      } else {
        for (std::size_t next = 0; next < terms_.size(); ++next) visit(pos + 1, next, c, w);
      }
    }

    if (fresh) {
      odd_ -= slots_.back().parity;
      slots_.pop_back();
    } else {
      auto& slot = *std::find_if(slots_.begin(), slots_.end(),
                                 [&](const Slot& s) { return s.prime_index == term.prime_index; });
      odd_ -= slot.parity;
      slot.parity ^= term.exponent & 1u;
      odd_ += slot.parity;
    }
  }

  std::span<const PrimePowerSeries::Term> terms_;
  std::span<const std::uint64_t> primes_;
  unsigned j_;
  unsigned depth_;
  std::vector<Slot> slots_;
  unsigned odd_ = 0;
  Complex total_ = 0.0;
};

}  // namespace

// ---------------------------------------------------------------------------
// Sampling

ModelSampler::ModelSampler(std::span<const std::uint64_t> primes)
    : primes_(primes.begin(), primes.end()) {
  zero_below_.reserve(primes_.size());
  plus_below_.reserve(primes_.size());
  for (const std::uint64_t p : primes_) {
    zero_below_.push_back(scaled_threshold(1, p + 1));
    plus_below_.push_back(scaled_threshold(p + 2, 2 * (p + 1)));
  }
}

int ModelSampler::sign(std::uint64_t key, std::size_t prime_index) const {
  const std::uint64_t u = mix64(key + (prime_index + 1) * 0x9e3779b97f4a7c15ULL);
  if (u < zero_below_[prime_index]) return 0;
  return u < plus_below_[prime_index] ? 1 : -1;
}

std::uint64_t ModelSampler::assignment_key(std::uint64_t seed) {
  return mix64(seed ^ 0x5851f42d4c957f2dULL);
}

std::uint64_t ModelSampler::derive_seed(std::uint64_t seed, std::uint64_t draw) {
  return mix64(mix64(seed) + draw);
}

int RandomAssignment::at(std::uint64_t p) const {
  if (p > cutoff) {
    throw CoverageError("prime " + std::to_string(p) + " exceeds assignment cutoff " +
                        std::to_string(cutoff));
  }
  const auto it = std::lower_bound(primes.begin(), primes.end(), p);
  if (it == primes.end() || *it != p) throw DomainError(std::to_string(p) + " is not prime");
  return values[static_cast<std::size_t>(it - primes.begin())];
}

RandomAssignment sample_assignment(std::uint64_t prime_limit, std::uint64_t seed) {
  if (prime_limit < 2) throw DomainError("sample_assignment: prime limit must be >= 2");
  const PrimeTable table = sieve_primes(prime_limit);
  const ModelSampler sampler(table.primes());
  const std::uint64_t key = ModelSampler::assignment_key(seed);
  RandomAssignment a;
  a.cutoff = prime_limit;
  a.seed = seed;
  a.primes.assign(table.primes().begin(), table.primes().end());
  a.values.resize(a.primes.size());
  for (std::size_t i = 0; i < a.primes.size(); ++i) {
    a.values[i] = static_cast<std::int8_t>(sampler.sign(key, i));
  }
  return a;
}

int x_n(const RandomAssignment& assignment, std::uint64_t n) {
  if (n == 0) throw DomainError("x_n: n must be >= 1");
  int result = 1;
  for (const std::uint64_t p : prime_divisors(n)) {
    const int xp = assignment.at(p);
    unsigned valuation = 0;
    for (std::uint64_t r = n; r % p == 0; r /= p) ++valuation;
    // x^v for x in {-1, 0, 1}: decided by parity.
    if (xp == 0) return 0;
    if (xp < 0 && (valuation & 1)) result = -result;
  }
  return result;
}

double expected_x(std::uint64_t n) {
  if (n == 0) throw DomainError("expected_x: n must be >= 1");
  double prod = 1.0;
  for (const std::uint64_t p : prime_divisors(n)) {
    unsigned valuation = 0;
    for (std::uint64_t r = n; r % p == 0; r /= p) ++valuation;
    if (valuation & 1) return 0.0;
    prod *= static_cast<double>(p) / static_cast<double>(p + 1);
  }
  return prod;
}

Complex random_partial_sum(const PrimePowerSeries& series, const ModelSampler& sampler,
                           std::uint64_t key) {
  if (series.primes().size() > sampler.primes().size()) {
    throw CoverageError("sampler does not cover the primes of the series");
  }
  return series.evaluate([&](std::size_t i) { return sampler.sign(key, i); });
}

RandomSeriesValue random_partial_sum(const RandomAssignment& assignment, double length, double t,
                                     const SatakeProvider& provider) {
  const PrimePowerSeries series(provider, length, t);
  if (!series.primes().empty() && series.primes().back() > assignment.cutoff) {
    throw CoverageError("assignment cutoff " + std::to_string(assignment.cutoff) +
                        " does not reach Y = " + std::to_string(length));
  }
  const Complex value =
      series.evaluate([&](std::size_t i) { return static_cast<int>(assignment.values[i]); });
  return {value, length, assignment.seed};
}

// ---------------------------------------------------------------------------
// Moments

Complex exact_moment(const PrimePowerSeries& series, unsigned j, unsigned l,
                     double tuple_budget) {
  if (j + l == 0) throw DomainError("moment order j + l must be >= 1");
  const std::size_t count = series.terms().size();
  if (count == 0) return 0.0;
  const double tuples = std::pow(static_cast<double>(count), static_cast<double>(j + l));
  if (tuples > tuple_budget) {
    throw BudgetError("exact moment needs " + std::to_string(tuples) + " tuples (budget " +
                      std::to_string(tuple_budget) + "); use the Monte Carlo estimate instead");
  }
  std::vector<Complex> partial(count);
  parallel_for(
      count, [&](std::size_t first) { partial[first] = TupleEnumerator(series, j, l).run_from(first); },
      1);
  CompensatedSum sum;
  for (const Complex& c : partial) sum.add(c);
  return sum.value();
}

Complex exact_moment(unsigned j, unsigned l, double length, double t,
                     const SatakeProvider& provider, double tuple_budget) {
  const PrimePowerSeries series(provider, length, t);
  return exact_moment(series, j, l, tuple_budget);
}

ComplexSampleSet mc_value_set(const PrimePowerSeries& series, int dimension, std::uint64_t count,
                              std::uint64_t seed) {
  if (count == 0) throw DomainError("mc_value_set: count must be >= 1");
  const ModelSampler sampler(series.primes());
  ComplexSampleSet out;
  out.dimension = dimension;
  out.values.resize(count);
  out.labels.resize(count);
  parallel_for(
      count,
      [&](std::size_t s) {
        const std::uint64_t key = ModelSampler::assignment_key(ModelSampler::derive_seed(seed, s));
        out.values[s] = random_partial_sum(series, sampler, key);
        out.labels[s] = static_cast<std::int64_t>(s);
      },
      256);
  out.validate();
  return out;
}

ComplexSampleSet mc_value_set(double length, double t, const SatakeProvider& provider,
                              std::uint64_t count, std::uint64_t seed) {
  const PrimePowerSeries series(provider, length, t);
  return mc_value_set(series, provider.is_self_dual_at(t) ? 1 : 2, count, seed);
}

MonteCarloEstimate mc_moment(unsigned j, unsigned l, double length, double t,
                             const SatakeProvider& provider, std::uint64_t samples,
                             std::uint64_t seed) {
  if (j + l == 0) throw DomainError("moment order j + l must be >= 1");
  if (samples < 2) throw DomainError("mc_moment: samples must be >= 2");
  const PrimePowerSeries series(provider, length, t);
  const ComplexSampleSet draws = mc_value_set(series, 2, samples, seed);

  std::vector<Complex> terms(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    terms[i] = ipow(draws.values[i], j) * ipow(std::conj(draws.values[i]), l);
  }
  CompensatedSum sum;
  for (const Complex& z : terms) sum.add(z);
  const double n = static_cast<double>(samples);
  const Complex mean = sum.value() / n;
  double squares = 0.0;
  for (const Complex& z : terms) squares += std::norm(z - mean);
  return {mean, std::sqrt(squares / (n - 1.0) / n)};
}

double model_length_for(double max_frequency, double theta) {
  return 16.0 * std::pow(std::max(max_frequency, 1.0), 2.0 / (1.0 - 2.0 * theta));
}

}  // namespace qtwist
