#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qtwist/analysis.hpp"
#include "qtwist/errors.hpp"
#include "qtwist/ntcore.hpp"
#include "qtwist/parallel.hpp"

namespace qtwist {

namespace {

constexpr double kGridTolerance = 1e-9;

std::optional<std::size_t> find_on_axis(const std::vector<double>& axis, double x) {
  const auto it = std::lower_bound(axis.begin(), axis.end(), x - 1e-12 * (1.0 + std::abs(x)));
  if (it != axis.end() && std::abs(*it - x) <= 1e-12 * (1.0 + std::abs(x))) {
    return static_cast<std::size_t>(it - axis.begin());
  }
  return std::nullopt;
}

}  // namespace

const char* to_string(CharFnSource source) {
  switch (source) {
    case CharFnSource::Empirical: return "empirical";
    case CharFnSource::Model: return "model";
    case CharFnSource::Analytic: return "analytic";
  }
  return "unknown";
}

std::optional<std::size_t> CharFnGrid::u_index(double x) const { return find_on_axis(u, x); }
std::optional<std::size_t> CharFnGrid::v_index(double y) const { return find_on_axis(v, y); }

Complex CharFnGrid::value_at(double x, double y) const {
  const auto i = u_index(x);
  const auto k = v_index(y);
  if (!i || !k) {
    throw CoverageError("(" + std::to_string(x) + ", " + std::to_string(y) +
                        ") is not a point of the characteristic-function grid");
  }
  return at(*i, *k);
}

void CharFnGrid::validate() const {
  if (values.size() != u.size() * v.size()) throw InvariantError("grid shape mismatch");
  for (const Complex& z : values) {
    if (!(std::abs(z) <= 1.0 + kGridTolerance)) {
      throw InvariantError("|Phi| = " + std::to_string(std::abs(z)) + " exceeds 1");
    }
  }
  const auto i0 = u_index(0.0);
  const auto k0 = v_index(0.0);
  if (i0 && k0 && at(*i0, *k0) != Complex(1.0, 0.0)) {
    throw InvariantError("Phi(0,0) != 1");
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto mi = u_index(-u[i]);
    if (!mi) continue;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const auto mk = v_index(-v[k]);
      if (mk && std::abs(at(*mi, *mk) - std::conj(at(i, k))) > kGridTolerance) {
        throw InvariantError("Phi(-u,-v) != conj(Phi(u,v)) at u = " + std::to_string(u[i]));
      }
    }
  }
}

std::vector<double> symmetric_axis(double half_width, std::size_t points) {
  if (points < 2 || !(half_width > 0.0)) {
    throw DomainError("axis needs at least two points and a positive half-width");
  }
  std::vector<double> axis(points);
  const auto last = static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    axis[i] = half_width * (2.0 * static_cast<double>(i) - last) / last;
  }
  return axis;
}

// ---------------------------------------------------------------------------
// Empirical

Complex phi_empirical(const ComplexSampleSet& values, double u, double v) {
  if (values.empty()) throw DomainError("characteristic function of an empty sample set");
  Complex sum = 0.0;
  for (const Complex& w : values.values) sum += std::polar(1.0, u * w.real() + v * w.imag());
  return sum / static_cast<double>(values.size());
}

CharFnGrid empirical_charfn_grid(const ComplexSampleSet& values, std::span<const double> u,
                                 std::span<const double> v) {
  if (values.empty()) throw DomainError("characteristic function of an empty sample set");
  CharFnGrid grid;
  grid.u.assign(u.begin(), u.end());
  grid.v.assign(v.begin(), v.end());
  grid.source = CharFnSource::Empirical;
  grid.truncation = values.size();
  grid.values.assign(u.size() * v.size(), 0.0);
  const double n = static_cast<double>(values.size());

  if (values.dimension == 1) {
    parallel_for(
        u.size(),
        [&](std::size_t i) {
          Complex sum = 0.0;
          for (const Complex& w : values.values) sum += std::polar(1.0, u[i] * w.real());
          const Complex phi = sum / n;
          for (std::size_t k = 0; k < v.size(); ++k) grid.values[i * v.size() + k] = phi;
        },
        1);
    return grid;
  }

  // Phi = A B^T / n with A(i,s) = e^{i u_i Re w_s}, B(k,s) = e^{i v_k Im w_s},
  // accumulated over fixed chunks of samples so the sum order never changes.
  constexpr std::size_t kChunk = 2048;
  constexpr std::size_t kChunksPerBlock = 16;
  const std::size_t chunks = (values.size() + kChunk - 1) / kChunk;
  const std::size_t blocks = (chunks + kChunksPerBlock - 1) / kChunksPerBlock;
  std::vector<Eigen::MatrixXcd> partial(blocks);
  for_each_block(chunks, kChunksPerBlock, [&](std::size_t b, std::size_t c0, std::size_t c1) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(u.size()),
                                                  static_cast<Eigen::Index>(v.size()));
    for (std::size_t c = c0; c < c1; ++c) {
      const std::size_t s0 = c * kChunk;
      const std::size_t s1 = std::min(values.size(), s0 + kChunk);
      const auto width = static_cast<Eigen::Index>(s1 - s0);
      Eigen::MatrixXcd a(static_cast<Eigen::Index>(u.size()), width);
      Eigen::MatrixXcd bt(width, static_cast<Eigen::Index>(v.size()));
      for (std::size_t s = s0; s < s1; ++s) {
        const auto col = static_cast<Eigen::Index>(s - s0);
        const Complex w = values.values[s];
        for (std::size_t i = 0; i < u.size(); ++i) {
          a(static_cast<Eigen::Index>(i), col) = std::polar(1.0, u[i] * w.real());
        }
        for (std::size_t k = 0; k < v.size(); ++k) {
          bt(col, static_cast<Eigen::Index>(k)) = std::polar(1.0, v[k] * w.imag());
        }
      }
      acc.noalias() += a * bt;
    }
    partial[b] = std::move(acc);
  });
  Eigen::MatrixXcd total = partial.front();
  for (std::size_t b = 1; b < blocks; ++b) total += partial[b];
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t k = 0; k < v.size(); ++k) {
      grid.values[i * v.size() + k] =
          total(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) / n;
    }
  }
  if (const auto i0 = grid.u_index(0.0), k0 = grid.v_index(0.0); i0 && k0) {
    grid.values[*i0 * v.size() + *k0] = 1.0;  // exact: n terms equal to one
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Model

namespace {

struct EulerBlocks {
  Complex plus, minus;
};

EulerBlocks euler_blocks(std::uint64_t p, double t, const SatakeProvider& provider) {
  const double pd = static_cast<double>(p);
  const double log_p = std::log(pd);
  const Complex ps = pd * std::polar(1.0, t * log_p);  // p^{1+it}
  EulerBlocks out{0.0, 0.0};
  for (const Complex& a : provider.parameters(p)) {
    if (std::abs(a) >= pd) {
      throw SingularFactorError("|alpha| >= p at prime " + std::to_string(p));
    }
    out.plus += a / (ps - a);
    out.minus -= a / (ps + a);
  }
  out.plus *= log_p;
  out.minus *= log_p;
  return out;
}

Complex local_factor(double p, Complex plus, Complex minus, double u, double v) {
  const Complex e_plus = std::polar(1.0, u * plus.real() + v * plus.imag());
  const Complex e_minus = std::polar(1.0, u * minus.real() + v * minus.imag());
  return (1.0 + 0.5 * p * (e_plus + e_minus)) / (p + 1.0);
}

}  // namespace

ModelCharFn::ModelCharFn(const SatakeProvider& provider, double t, std::uint64_t prime_cutoff)
    : cutoff_(prime_cutoff), one_dimensional_(provider.is_self_dual_at(t)) {
  const PrimeTable table = sieve_primes(2 * std::max<std::uint64_t>(prime_cutoff, 1));
  const auto within = table.primes_between(2, prime_cutoff);
  primes_.assign(within.begin(), within.end());
  provider.require_primes(table, prime_cutoff);
  plus_.reserve(primes_.size());
  minus_.reserve(primes_.size());
  for (const std::uint64_t p : primes_) {
    EulerBlocks b = euler_blocks(p, t, provider);
    if (one_dimensional_) {
      b.plus.imag(0.0);
      b.minus.imag(0.0);
    }
    plus_.push_back(b.plus);
    minus_.push_back(b.minus);
  }
  const double theta = provider.theta();
  for (const std::uint64_t p : table.primes_between(prime_cutoff + 1, 2 * prime_cutoff)) {
    const double pd = static_cast<double>(p);
    tail_block_ += std::log(pd) * std::pow(pd, theta - 2.0);
  }
  tail_ratio_ = std::pow(2.0, theta - 1.0);
}

Complex ModelCharFn::factor(std::size_t prime_index, double u, double v) const {
  return local_factor(static_cast<double>(primes_[prime_index]), plus_[prime_index],
                      minus_[prime_index], u, v);
}

Complex ModelCharFn::operator()(double u, double v) const {
  if (one_dimensional_) v = 0.0;
  Complex prod = 1.0;
  for (std::size_t i = 0; i < primes_.size(); ++i) prod *= factor(i, u, v);
  return prod;
}

double ModelCharFn::tail_estimate(double u, double v) const {
  return std::hypot(u, v) * tail_block_ / (1.0 - tail_ratio_);
}

CharFnGrid ModelCharFn::grid(std::span<const double> u, std::span<const double> v) const {
  CharFnGrid grid;
  grid.u.assign(u.begin(), u.end());
  grid.v.assign(v.begin(), v.end());
  grid.source = CharFnSource::Model;
  grid.truncation = cutoff_;
  grid.values.assign(u.size() * v.size(), 0.0);
  if (one_dimensional_) {
    parallel_for(
        u.size(),
        [&](std::size_t i) {
          const Complex phi = (*this)(u[i], 0.0);
          for (std::size_t k = 0; k < v.size(); ++k) grid.values[i * v.size() + k] = phi;
        },
        1);
  } else {
    parallel_for(
        u.size() * v.size(),
        [&](std::size_t idx) { grid.values[idx] = (*this)(u[idx / v.size()], v[idx % v.size()]); },
        16);
  }
  return grid;
}

Complex mp_factor(std::uint64_t p, double u, double v, double t, const SatakeProvider& provider) {
  const EulerBlocks b = euler_blocks(p, t, provider);
  return local_factor(static_cast<double>(p), b.plus, b.minus, u, v);
}

PhiRandValue phi_rand(double u, double v, double t, const SatakeProvider& provider,
                      std::uint64_t prime_cutoff) {
  const ModelCharFn model(provider, t, prime_cutoff);
  return {model(u, v), model.tail_estimate(u, v)};
}

Complex hat_phi(const CharFnGrid& grid, double u, double v) {
  return grid.value_at(u, v) - grid.value_at(u, 0.0) * grid.value_at(0.0, v);
}

}  // namespace qtwist
