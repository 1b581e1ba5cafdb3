#include "qtwist/family.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "qtwist/errors.hpp"
#include "qtwist/parallel.hpp"

namespace qtwist {

namespace {

constexpr double kRealTolerance = 1e-9;

Complex ipow(Complex z, unsigned k) {
  Complex r = 1.0;
  for (; k != 0; k >>= 1) {
    if (k & 1) r *= z;
    z *= z;
  }
  return r;
}

}  // namespace

void ComplexSampleSet::validate() const {
  if (!labels.empty() && labels.size() != values.size()) {
    throw InvariantError("sample set labels are not parallel to values");
  }
  if (dimension != 1 && dimension != 2) throw InvariantError("dimension must be 1 or 2");
  if (dimension == 1) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!(std::abs(values[i].imag()) < kRealTolerance)) {
        throw InvariantError("1-dimensional sample set has a value with imaginary part " +
                             std::to_string(values[i].imag()));
      }
    }
  }
}

double FamilyConfig::default_length(std::uint64_t N) {
  const double l = std::log(static_cast<double>(N));
  return l * l;
}

void FamilyConfig::validate() const {
  if (N == 0) throw DomainError("family cutoff N must be >= 1");
  if (!(Y >= 0.0)) throw DomainError("polynomial length Y must be >= 0");
  if (!std::isfinite(t)) throw DomainError("t must be finite");
  if (!provider) throw DomainError("family configuration has no provider");
}

Complex short_polynomial(const PrimePowerSeries& series, std::int64_t d) {
  const auto primes = series.primes();
  return series.evaluate([&](std::size_t i) { return kronecker(d, primes[i]); });
}

Complex short_polynomial_conjugate(const PrimePowerSeries& series, std::int64_t d) {
  const auto primes = series.primes();
  return series.evaluate_conjugate([&](std::size_t i) { return kronecker(d, primes[i]); });
}

Complex short_polynomial(const FamilyConfig& cfg, FundamentalDiscriminant d) {
  cfg.validate();
  const PrimePowerSeries series(*cfg.provider, cfg.Y, cfg.t);
  return short_polynomial(series, d.value());
}

ComplexSampleSet family_sweep(const PrimePowerSeries& series,
                              std::span<const FundamentalDiscriminant> family, int dimension) {
  ComplexSampleSet out;
  out.dimension = dimension;
  out.values.resize(family.size());
  out.labels.resize(family.size());
  parallel_for(
      family.size(),
      [&](std::size_t i) {
        const std::int64_t d = family[i].value();
        out.labels[i] = d;
        out.values[i] = short_polynomial(series, d);
      },
      4096);
  out.validate();
  return out;
}

ComplexSampleSet family_sweep(const FamilyConfig& cfg) {
  cfg.validate();
  const PrimePowerSeries series(*cfg.provider, cfg.Y, cfg.t);
  const auto family = enumerate_discriminants(cfg.N);
  return family_sweep(series, family, cfg.provider->is_self_dual_at(cfg.t) ? 1 : 2);
}

Complex sample_moment(const ComplexSampleSet& values, unsigned j, unsigned l) {
  if (j + l == 0) throw DomainError("moment order j + l must be >= 1");
  if (values.empty()) throw DomainError("moment of an empty sample set");
  CompensatedSum sum;
  for (const Complex& v : values.values) sum.add(ipow(v, j) * ipow(std::conj(v), l));
  return sum.value() / static_cast<double>(values.size());
}

Complex arithmetic_moment(const FamilyConfig& cfg, unsigned j, unsigned l) {
  if (j + l == 0) throw DomainError("moment order j + l must be >= 1");
  return sample_moment(family_sweep(cfg), j, l);
}

double second_moment(const FamilyConfig& cfg) {
  return arithmetic_moment(cfg, 1, 1).real();
}

double square_char_average(std::span<const FundamentalDiscriminant> family, std::uint64_t m) {
  if (m == 0) throw DomainError("square_char_average: m must be >= 1");
  if (family.empty()) throw DomainError("square_char_average over an empty family");
  std::size_t coprime = 0;
  for (const auto& d : family) {
    if (std::gcd(d.modulus(), m) == 1) ++coprime;
  }
  return static_cast<double>(coprime) / static_cast<double>(family.size());
}

double square_char_average(std::uint64_t N, std::uint64_t m) {
  if (m == 0) throw DomainError("square_char_average: m must be >= 1");
  return square_char_average(enumerate_discriminants(N), m);
}

double square_char_limit(std::uint64_t m) {
  if (m == 0) throw DomainError("square_char_limit: m must be >= 1");
  double prod = 1.0;
  for (const std::uint64_t p : prime_divisors(m)) {
    prod *= static_cast<double>(p) / static_cast<double>(p + 1);
  }
  return prod;
}

}  // namespace qtwist
