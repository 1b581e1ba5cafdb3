#pragma once

// Satake parameters alpha_j(p) of a fixed representation and the prime-power
// coefficients lambda(p^m) = sum_j alpha_j(p)^m built from them.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qtwist {

class PrimeTable;

using Complex = std::complex<double>;

/// Absolute tolerance of the self-duality check on load.
inline constexpr double kSelfDualTolerance = 1e-9;

/// Supplies alpha_1(p), ..., alpha_d(p) for each prime it knows about.
///
/// Immutable once built; every constructor path validates the bound
/// |alpha_j(p)| <= p^theta and, when a twist tau0 is declared, that the
/// parameters at p are closed under alpha -> conj(alpha) * p^{i tau0}.
class SatakeProvider {
 public:
  using ParameterTable = std::map<std::uint64_t, std::vector<Complex>>;

  /// d = 1, alpha(p) = 1 for every prime; the coefficients of zeta.
  static SatakeProvider trivial();

  /// Throws InvariantError naming the first offending prime.
  static SatakeProvider from_table(unsigned degree, double theta,
                                   std::optional<double> self_dual_twist, ParameterTable table,
                                   std::string id = "table");

  unsigned degree() const noexcept { return degree_; }
  double theta() const noexcept { return theta_; }
  std::optional<double> self_dual_twist() const noexcept { return self_dual_twist_; }
  bool is_trivial() const noexcept { return trivial_; }
  const std::string& id() const noexcept { return id_; }
  /// Non-fatal remarks produced on load (e.g. theta >= 1/4).
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  bool has_prime(std::uint64_t p) const;
  /// Throws MissingDataError for an unknown prime.
  std::span<const Complex> parameters(std::uint64_t p) const;
  /// lambda(p^m) = sum_j alpha_j(p)^m, m >= 1.
  Complex lambda(std::uint64_t p, unsigned m) const;

  /// True when the values at height t are real, i.e. tau0 is declared and
  /// equals 2t.
  bool is_self_dual_at(double t) const;

  /// Throws MissingDataError for the first prime <= limit in `primes`
  /// without parameters.
  void require_primes(const PrimeTable& primes, std::uint64_t limit) const;

 private:
  SatakeProvider() = default;

  unsigned degree_ = 1;
  double theta_ = 0.0;
  std::optional<double> self_dual_twist_;
  bool trivial_ = false;
  std::string id_;
  ParameterTable table_;
  std::vector<std::string> warnings_;
};

SatakeProvider trivial_provider();

/// Reads the text format
///
///     #degree d theta T [selfdual tau0]
///     p re(a1) im(a1) ... re(ad) im(ad)
///
/// Further `#` lines are comments. An empty input gives a degree-1 provider
/// without primes. Throws ParseError (with line number) or InvariantError.
SatakeProvider parse_satake(std::istream& in, std::string id = "stream");
SatakeProvider file_provider(const std::filesystem::path& path);

/// Unitary-normalized GL(2) holomorphic newform of weight k from its Hecke
/// eigenvalues a_p: alpha + conj(alpha) = a_p p^{-(k-1)/2}, |alpha| = 1.
SatakeProvider gl2_holomorphic_provider(const std::map<std::uint64_t, double>& hecke_ap,
                                        double weight, std::string id = "gl2");

inline Complex lambda(const SatakeProvider& provider, std::uint64_t p, unsigned m) {
  return provider.lambda(p, m);
}

/// sum_{p <= P} (log p)^2 |lambda(p^k)|^2 / p^k, a convergence diagnostic for
/// the k-th prime-power sums (k >= 2).
double hypothesis_h_partial(const SatakeProvider& provider, unsigned k, std::uint64_t prime_cutoff);

}  // namespace qtwist
