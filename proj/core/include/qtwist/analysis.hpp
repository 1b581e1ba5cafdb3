#pragma once

// Comparing the family with the random model: characteristic functions,
// the Euler product of the model's characteristic function, Fourier
// inversion, rectangle discrepancy, the two-dimensional Berry-Esseen bound
// and small-value statistics.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qtwist/coeffs.hpp"
#include "qtwist/family.hpp"

namespace qtwist {

// ---------------------------------------------------------------------------
// Characteristic functions

enum class CharFnSource { Empirical, Model, Analytic };
const char* to_string(CharFnSource source);

/// Phi(u, v) sampled on the product of two ascending axes, u-major.
struct CharFnGrid {
  std::vector<double> u;
  std::vector<double> v;
  std::vector<Complex> values;  // values[i * v.size() + k] = Phi(u[i], v[k])
  CharFnSource source = CharFnSource::Empirical;
  /// Prime cutoff P for the model, sample count for empirical grids.
  std::uint64_t truncation = 0;

  Complex at(std::size_t i, std::size_t k) const { return values[i * v.size() + k]; }
  std::optional<std::size_t> u_index(double x) const;
  std::optional<std::size_t> v_index(double y) const;
  /// Throws CoverageError when (x, y) is not a grid point.
  Complex value_at(double x, double y) const;
  /// Throws InvariantError on |Phi| > 1 + 1e-9, Phi(0,0) != 1, or a broken
  /// conjugate symmetry Phi(-u,-v) = conj(Phi(u,v)).
  void validate() const;
};

/// `points` equally spaced values on [-half_width, half_width]; an odd count
/// puts an exact 0 in the middle and the axis is exactly symmetric.
std::vector<double> symmetric_axis(double half_width, std::size_t points);

/// E[exp(i(u Re w + v Im w))] over a sample set. Throws DomainError if empty.
Complex phi_empirical(const ComplexSampleSet& values, double u, double v);
/// Evaluates phi_empirical on a whole grid. One-dimensional sets do not
/// depend on v and are evaluated once per u.
CharFnGrid empirical_charfn_grid(const ComplexSampleSet& values, std::span<const double> u,
                                 std::span<const double> v);

/// The model's characteristic function as the Euler product of the local
/// factors M_p over p <= P.
class ModelCharFn {
 public:
  /// Throws MissingDataError / SingularFactorError.
  ModelCharFn(const SatakeProvider& provider, double t, std::uint64_t prime_cutoff);

  std::uint64_t prime_cutoff() const noexcept { return cutoff_; }
  /// True when every local factor depends on u only (real model values).
  bool one_dimensional() const noexcept { return one_dimensional_; }

  Complex factor(std::size_t prime_index, double u, double v) const;
  Complex operator()(double u, double v) const;
  /// |z| sum_{P < p <= 2P} (log p) p^{theta - 2}, extrapolated geometrically
  /// over the remaining dyadic blocks.
  double tail_estimate(double u, double v) const;

  CharFnGrid grid(std::span<const double> u, std::span<const double> v) const;

 private:
  std::uint64_t cutoff_;
  bool one_dimensional_;
  std::vector<std::uint64_t> primes_;
  std::vector<Complex> plus_, minus_;  // T+_p, T-_p
  double tail_block_ = 0.0;
  double tail_ratio_ = 0.5;
};

/// M_p(u, v) = 1/(p+1) + p/(2(p+1)) (e^{i Re(conj(z) T+_p)} + e^{i Re(conj(z) T-_p)}),
/// T+_p = log p sum_j alpha_j/(p^{1+it} - alpha_j),
/// T-_p = -log p sum_j alpha_j/(p^{1+it} + alpha_j).
Complex mp_factor(std::uint64_t p, double u, double v, double t, const SatakeProvider& provider);

struct PhiRandValue {
  Complex value;
  double tail_estimate = 0.0;
};
PhiRandValue phi_rand(double u, double v, double t, const SatakeProvider& provider,
                      std::uint64_t prime_cutoff);

/// f(u,v) - f(u,0) f(0,v) with all three values read from the grid.
Complex hat_phi(const CharFnGrid& grid, double u, double v);

// ---------------------------------------------------------------------------
// Berry-Esseen

/// 3 sqrt(2) + 4 sqrt(3) + 24/pi.
double berry_esseen_constant();

struct BerryEsseenReport {
  double bound = 0.0;
  double double_integral = 0.0;   // int int |(fhat - ghat)/(uv)|
  double u_line_integral = 0.0;   // int |(f - g)(u,0)/u|
  double v_line_integral = 0.0;   // int |(f - g)(0,v)/v|
  double smoothing_term = 0.0;    // C * 2(A1 + A2)/R
  double strip_integral = 0.0;    // part of the double integral within r of an axis
  double coarse_bound = 0.0;      // same bound on every other grid point
  double relative_change = 0.0;   // |bound - coarse| / bound
  bool converged = false;         // relative_change < 0.5%
  double R = 0.0, A1 = 0.0, A2 = 0.0, inner_cutoff = 0.0;
};

/// Right-hand side of the planar Berry-Esseen inequality
///
///   2/(2pi)^2 int int |(fhat - ghat)/(uv)| + 2/pi int |(f-g)(u,0)/u|
///   + 2/pi int |(f-g)(0,v)/v| + C 2(A1 + A2)/R
///
/// over [-R, R]^2 by the composite trapezoid rule. At u = 0 or v = 0 the
/// difference quotients take their one-sided limits from the neighbouring
/// grid point of the same cell. Both grids must share their axes, contain 0
/// and have +-R as grid points (CoverageError otherwise).
BerryEsseenReport berry_esseen_bound(const CharFnGrid& f, const CharFnGrid& g, double R,
                                     double A1, double A2, double inner_cutoff = 0.0);

/// R = log N / (log log N)^2 and r = (log N)^{-2}.
double default_smoothing_radius(std::uint64_t N);
double default_inner_cutoff(std::uint64_t N);

// ---------------------------------------------------------------------------
// Discrepancy

struct DiscrepancyOptions {
  /// When both sets exceed this many points, each is subsampled (seeded) to
  /// it before the 2D sweep. 0 disables subsampling.
  std::size_t max_points = 0;
  std::uint64_t seed = 0;
};

struct DiscrepancyReport {
  double sup_cdf_diff = 0.0;  // sup |F_A - F_B| over all corners
  double rect_bound = 0.0;    // 4 * sup_cdf_diff
  int dimension = 1;
  std::size_t size_a = 0, size_b = 0;
  std::size_t used_a = 0, used_b = 0;
  bool subsampled = false;
  std::string method;
};

/// 1D: two-sample Kolmogorov-Smirnov statistic of the real parts. 2D: exact
/// sup over all corners of |F_A(x,y) - F_B(x,y)| by a plane sweep. Counts are
/// kept as integers so ties and both closed/open corner conventions are
/// handled exactly. Throws DomainError for empty sets or mismatched
/// dimensions.
DiscrepancyReport discrepancy(const ComplexSampleSet& a, const ComplexSampleSet& b,
                              const DiscrepancyOptions& options = {});
double ks_statistic(std::span<const double> a, std::span<const double> b);
double planar_cdf_sup(std::span<const Complex> a, std::span<const Complex> b);

// ---------------------------------------------------------------------------
// Densities

struct DensitySpec {
  int dimension = 1;
  double x_min = -4.0, x_max = 4.0;
  std::size_t x_points = 401;
  double y_min = -3.0, y_max = 3.0;
  std::size_t y_points = 121;
  /// Reject grids that have not decayed at the box boundary. Empirical
  /// characteristic functions never decay below their sampling noise, so
  /// comparisons of empirical inversions switch this off.
  bool require_decay = true;

  static DensitySpec default_for(int dimension);
};

struct DensityGrid {
  int dimension = 1;
  std::vector<double> x;
  std::vector<double> y;        // empty in 1D
  std::vector<double> density;  // x-major in 2D
  double half_width = 0.0;      // inversion box U
  double step = 0.0;            // quadrature step in u (and v)
  double boundary_modulus = 0.0;  // max |Phi| on the boundary of the box
  double imag_residue = 0.0;
  double mass = 0.0;
  double min_density = 0.0;

  double at(std::size_t i, std::size_t k = 0) const {
    return density[dimension == 1 ? i : i * y.size() + k];
  }
  /// Empty when mass is within 1% of 1 and density >= -1e-3 everywhere.
  std::vector<std::string> check() const;
};

/// Fourier inversion by the trapezoid rule over [-U, U] (or its square):
/// M(x) = (1/2pi) int e^{-iux} Phi(u) du. Throws TruncationError when
/// |Phi| >= 1e-4 on the boundary of the box (unless spec.require_decay is
/// off), CoverageError when +-U are not
/// grid points and InvariantError when the imaginary residue reaches 1e-6.
DensityGrid invert_density(const CharFnGrid& grid, double half_width, const DensitySpec& spec);

/// (sup of the x-marginal, sup of the y-marginal) of a density grid, the
/// numerical stand-in for A1 and A2. 1D grids give (max density, 0).
std::pair<double, double> density_marginal_sups(const DensityGrid& density);

// ---------------------------------------------------------------------------
// Small values and prime-sum diagnostics

struct SmallValueStats {
  std::size_t count = 0;     // #{|w| <= eta}
  double min_modulus = 0.0;  // m_N
};
SmallValueStats small_values(const ComplexSampleSet& values, double eta);

struct PrimeSumDiagnostics {
  double X = 0.0;
  std::uint64_t P = 0;
  double abs_sum = 0.0;         // sum_{X<p<=P} (log p)^2 |lambda(p)|^2 / p^2
  Complex signed_sum;           // sum_{X<p<=P} (log p)^2 lambda(p)^2 / p^{2+2it}
  double abs_comparator = 0.0;  // log X / X
  std::optional<Complex> signed_comparator;  // log X / (s X^s), s = 1 - 2it + i tau0
};

/// Tail prime sums over X < p <= P. Throws DomainError for P < X.
PrimeSumDiagnostics prime_sum_diagnostics(const SatakeProvider& provider, double X,
                                          std::uint64_t P, double t);

}  // namespace qtwist
