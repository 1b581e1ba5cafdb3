#pragma once

// The arithmetic side: short Dirichlet polynomials
//
//     S_Y(D) = sum_{n <= Y} Lambda(n) lambda(n) chi_D(n) / n^{1+it}
//
// evaluated over every fundamental discriminant |D| <= N, and their moments.

#include <cstdint>
#include <memory>
#include <vector>

#include "qtwist/coeffs.hpp"
#include "qtwist/ntcore.hpp"
#include "qtwist/series.hpp"

namespace qtwist {

/// A finite multiset of complex values with optional integer labels
/// (discriminants for the family, draw indices for the model).
struct ComplexSampleSet {
  std::vector<Complex> values;
  std::vector<std::int64_t> labels;  // empty, or parallel to values
  int dimension = 2;                 // 1 when the values are real

  std::size_t size() const noexcept { return values.size(); }
  bool empty() const noexcept { return values.empty(); }
  /// Throws InvariantError if dimension is 1 and some |Im v| >= 1e-9, or if
  /// labels are present but not parallel to values.
  void validate() const;
};

struct FamilyConfig {
  std::uint64_t N = 1;
  double Y = 0.0;
  double t = 0.0;
  std::shared_ptr<const SatakeProvider> provider;

  /// (log N)^2, the polynomial length used by default.
  static double default_length(std::uint64_t N);
  /// Throws DomainError for N = 0, Y < 0 or a missing provider.
  void validate() const;
};

Complex short_polynomial(const PrimePowerSeries& series, std::int64_t d);
/// The conjugate-coefficient polynomial T_Y(D); equals conj(S_Y(D)) for real t.
Complex short_polynomial_conjugate(const PrimePowerSeries& series, std::int64_t d);
Complex short_polynomial(const FamilyConfig& cfg, FundamentalDiscriminant d);

/// One value per D in F(N), ascending by D, labels set to D.
ComplexSampleSet family_sweep(const FamilyConfig& cfg);
ComplexSampleSet family_sweep(const PrimePowerSeries& series,
                              std::span<const FundamentalDiscriminant> family,
                              int dimension);

/// Mean of S^j conj(S)^l over a sample set (j + l >= 1). Summed in index
/// order, so the result does not depend on how the values were produced.
Complex sample_moment(const ComplexSampleSet& values, unsigned j, unsigned l);
/// (1/|F(N)|) sum_D S_Y(D)^j T_Y(D)^l.
Complex arithmetic_moment(const FamilyConfig& cfg, unsigned j, unsigned l);
/// Mean of |S_Y(D)|^2 over F(N).
double second_moment(const FamilyConfig& cfg);

/// (1/|F(N)|) #{D in F(N) : gcd(D, m) = 1}, the average of chi_D(m^2).
double square_char_average(std::uint64_t N, std::uint64_t m);
double square_char_average(std::span<const FundamentalDiscriminant> family, std::uint64_t m);
/// prod_{p | m} p/(p+1), the N -> infinity limit of square_char_average.
double square_char_limit(std::uint64_t m);

}  // namespace qtwist
