#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qtwist/analysis.hpp"
#include "qtwist/errors.hpp"
#include "qtwist/randmodel.hpp"

using namespace qtwist;

namespace {

ComplexSampleSet real_set(std::vector<double> xs) {
  ComplexSampleSet s;
  s.dimension = 1;
  for (double x : xs) s.values.emplace_back(x, 0.0);
  return s;
}

ComplexSampleSet planar_set(std::size_t n, std::uint64_t seed, double shift, bool ties) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexSampleSet s;
  s.dimension = 2;
  for (std::size_t i = 0; i < n; ++i) {
    double x = g(rng) + shift, y = g(rng);
    if (ties) {
      x = std::round(2.0 * x) / 2.0;
      y = std::round(2.0 * y) / 2.0;
    }
    s.values.emplace_back(x, y);
  }
  return s;
}

// sup over closed lower-left quadrants anchored at data coordinates.
double brute_planar(const ComplexSampleSet& a, const ComplexSampleSet& b) {
  std::vector<double> xs, ys;
  for (const auto* s : {&a, &b}) {
    for (const auto& z : s->values) {
      xs.push_back(z.real());
      ys.push_back(z.imag());
    }
  }
  const auto cdf = [](const ComplexSampleSet& s, double x, double y) {
    std::size_t c = 0;
    for (const auto& z : s.values) c += z.real() <= x && z.imag() <= y;
    return double(c) / double(s.size());
  };
  double best = 0.0;
  for (double x : xs) {
    for (double y : ys) best = std::max(best, std::abs(cdf(a, x, y) - cdf(b, x, y)));
  }
  return best;
}

CharFnGrid analytic_grid(std::span<const double> u, std::span<const double> v,
                         const auto& phi) {
  CharFnGrid g;
  g.u.assign(u.begin(), u.end());
  g.v.assign(v.begin(), v.end());
  g.source = CharFnSource::Analytic;
  for (double a : u) {
    for (double b : v) g.values.push_back(phi(a, b));
  }
  return g;
}

}  // namespace

TEST_CASE("local factors") {
  const auto p = trivial_provider();
  for (const std::uint64_t q : {2u, 3u, 101u}) CHECK(mp_factor(q, 0.0, 0.0, 0.0, p) == Complex(1.0, 0.0));
  const double l2 = std::log(2.0);
  const Complex want = 1.0 / 3.0 + std::polar(1.0, l2) / 3.0 + std::polar(1.0, -l2 / 3.0) / 3.0;
  const Complex got = mp_factor(2, 1.0, 0.0, 0.0, p);
  CHECK(std::abs(got - want) < 1e-15);
  CHECK(std::abs(got) <= 1.0);

  // Monte Carlo over X_2 of the p = 2 Euler term: log 2 * X/(2 - X).
  const std::vector<std::uint64_t> two{2};
  const ModelSampler sampler(two);
  const std::size_t draws = 1000000;
  Complex sum = 0.0;
  for (std::uint64_t s = 0; s < draws; ++s) {
    const int x = sampler.sign(ModelSampler::assignment_key(s), 0);
    sum += std::polar(1.0, l2 * x / (2.0 - x));
  }
  const Complex mc = sum / double(draws);
  CHECK(std::abs(mc - got) < 4.0 / std::sqrt(double(draws)));

  SatakeProvider::ParameterTable table;
  for (const auto q : oracle::primes_upto(50)) {
    table[q] = {std::polar(1.0, 0.2 * double(q)), std::polar(1.0, 1.0 - 0.1 * double(q))};
  }
  const auto g = SatakeProvider::from_table(2, 0.0, std::nullopt, table);
  for (const auto q : oracle::primes_upto(50)) {
    for (const double u : {-3.0, 0.5, 7.0}) {
      for (const double v : {-2.0, 0.0, 4.0}) {
        const Complex m = mp_factor(q, u, v, 0.3, g);
        REQUIRE(std::abs(m) <= 1.0 + 1e-15);
        REQUIRE(std::abs(mp_factor(q, -u, -v, 0.3, g) - std::conj(m)) < 1e-15);
      }
    }
  }
}

TEST_CASE("model characteristic function") {
  const auto p = trivial_provider();
  CHECK(phi_rand(0.0, 0.0, 0.0, p, 100000).value == Complex(1.0, 0.0));

  const ModelCharFn small(p, 0.0, 100);
  Complex prod = 1.0;
  for (const auto q : oracle::primes_upto(100)) prod *= mp_factor(q, 2.5, 0.0, 0.0, p);
  CHECK(std::abs(small(2.5, 0.0) - prod) < 1e-14);
  CHECK(small.one_dimensional());
  CHECK(small.tail_estimate(2.5, 0.0) > 0.0);

  const double a3 = std::abs(phi_rand(3.0, 0.0, 0.0, p, 100000).value);
  const double a10 = std::abs(phi_rand(10.0, 0.0, 0.0, p, 100000).value);
  const double a30 = std::abs(phi_rand(30.0, 0.0, 0.0, p, 100000).value);
  CHECK(a3 > a10);
  CHECK(a10 > a30);

  const ModelCharFn lo(p, 0.0, 100000), hi(p, 0.0, 200000);
  for (double u = -10.0; u <= 10.0; u += 0.5) CHECK(std::abs(lo(u, 0.0) - hi(u, 0.0)) < 1e-3);

  const auto axis = symmetric_axis(4.0, 17);
  const CharFnGrid grid = ModelCharFn(p, 0.5, 2000).grid(axis, axis);
  CHECK_NOTHROW(grid.validate());
  CHECK(grid.source == CharFnSource::Model);
  CHECK(grid.truncation == 2000);
  CHECK(grid.value_at(0.0, 0.0) == Complex(1.0, 0.0));
  CHECK_THROWS_AS(grid.value_at(0.1, 0.0), CoverageError);
}

TEST_CASE("model characteristic function matches model draws") {
  const auto p = trivial_provider();
  const auto draws = mc_value_set(20000.0, 0.0, p, 40000, 3);
  const ModelCharFn model(p, 0.0, 20000);
  for (const double u : {0.5, 1.0, 2.0, 4.0}) {
    CHECK(std::abs(phi_empirical(draws, u, 0.0) - model(u, 0.0)) < 0.02);
  }
}

TEST_CASE("empirical characteristic functions") {
  const auto zero = real_set({0.0});
  CHECK(phi_empirical(zero, 3.0, -2.0) == Complex(1.0, 0.0));
  const auto set = planar_set(5000, 4, 0.3, false);
  CHECK(phi_empirical(set, 0.0, 0.0) == Complex(1.0, 0.0));
  CHECK_THROWS_AS(phi_empirical(ComplexSampleSet{}, 1.0, 1.0), DomainError);

  const auto axis = symmetric_axis(5.0, 11);
  const CharFnGrid grid = empirical_charfn_grid(set, axis, axis);
  CHECK_NOTHROW(grid.validate());
  for (std::size_t i = 0; i < axis.size(); ++i) {
    for (std::size_t k = 0; k < axis.size(); ++k) {
      REQUIRE(std::abs(grid.at(i, k) - phi_empirical(set, axis[i], axis[k])) < 1e-12);
      const Complex mirror = grid.at(axis.size() - 1 - i, axis.size() - 1 - k);
      REQUIRE(std::abs(mirror - std::conj(grid.at(i, k))) < 1e-9);
    }
  }

  CharFnGrid broken = grid;
  broken.values[3] *= 2.0;
  CHECK_THROWS_AS(broken.validate(), InvariantError);
}

TEST_CASE("hat of a characteristic function") {
  const auto axis = symmetric_axis(2.0, 5);
  ComplexSampleSet two;
  two.values = {Complex(1.0, 1.0), Complex(-1.0, -1.0)};
  const auto grid = empirical_charfn_grid(two, axis, axis);
  const double c1 = std::cos(1.0);
  CHECK(std::abs(hat_phi(grid, 1.0, 1.0) - (std::cos(2.0) - c1 * c1)) < 1e-15);
  CHECK(std::abs(hat_phi(grid, 0.0, 2.0)) < 1e-15);

  const auto product = analytic_grid(axis, axis, [](double u, double v) {
    return Complex(std::exp(-u * u), 0.0) * std::polar(1.0, 0.3 * v) * std::exp(-v * v / 4.0);
  });
  for (double u : axis) {
    for (double v : axis) CHECK(std::abs(hat_phi(product, u, v)) < 1e-15);
  }
}

TEST_CASE("Berry-Esseen evaluator") {
  const double C = berry_esseen_constant();
  CHECK(C == doctest::Approx(3.0 * std::sqrt(2.0) + 4.0 * std::sqrt(3.0) + 24.0 / std::numbers::pi));
  const auto axis = symmetric_axis(8.0, 33);
  const auto f = analytic_grid(axis, axis, [](double u, double v) {
    return Complex(std::exp(-(u * u + v * v) / 2.0), 0.0);
  });
  const auto r4 = berry_esseen_bound(f, f, 4.0, 0.4, 0.3);
  CHECK(r4.bound == C * 2.0 * 0.7 / 4.0);
  CHECK(r4.double_integral == 0.0);
  const auto r8 = berry_esseen_bound(f, f, 8.0, 0.4, 0.3);
  CHECK(r8.bound == doctest::Approx(r4.bound / 2.0).epsilon(1e-15));
  CHECK(berry_esseen_bound(f, f, 4.0, 0.0, 0.0).bound == 0.0);
  double prev = 1e300;
  for (const double R : {1.0, 2.0, 3.0, 5.0, 8.0}) {
    const double b = berry_esseen_bound(f, f, R, 0.2, 0.2).bound;
    CHECK(b <= prev);
    prev = b;
  }
  CHECK_THROWS_AS(berry_esseen_bound(f, f, 4.2, 0.1, 0.1), CoverageError);
  CHECK_THROWS_AS(berry_esseen_bound(f, f, -1.0, 0.1, 0.1), DomainError);

  // Gaussians with different variances: every piece is positive and the
  // quadrature has converged on this grid.
  const auto fine = symmetric_axis(8.0, 129);
  const auto g1 = analytic_grid(fine, fine, [](double u, double v) {
    return Complex(std::exp(-(u * u + 2.0 * v * v) / 2.0), 0.0);
  });
  const auto g2 = analytic_grid(fine, fine, [](double u, double v) {
    return Complex(std::exp(-(1.2 * u * u + v * v + 0.5 * u * v) / 2.0), 0.0);
  });
  const auto r = berry_esseen_bound(g1, g2, 8.0, 0.4, 0.4, 0.05);
  CHECK(r.double_integral > 0.0);
  CHECK(r.u_line_integral > 0.0);
  CHECK(r.v_line_integral > 0.0);
  CHECK(r.strip_integral <= r.double_integral);
  CHECK(r.converged);
  CHECK(r.bound > r.smoothing_term);

  // The u-line integral equals the closed form of int |e^{-u^2/2} - e^{-0.6 u^2}|/|u|.
  const double closed = 2.0 * 0.5 * std::log(1.2);  // Frullani, both halves
  CHECK(r.u_line_integral == doctest::Approx(closed).epsilon(2e-3));
}

TEST_CASE("default smoothing parameters") {
  const double l = std::log(1e6);
  CHECK(default_smoothing_radius(1000000) == doctest::Approx(l / std::pow(std::log(l), 2)));
  CHECK(default_inner_cutoff(1000000) == doctest::Approx(1.0 / (l * l)));
}

TEST_CASE("one-dimensional discrepancy") {
  const auto a = real_set({0.0});
  const auto b = real_set({1.0});
  CHECK(discrepancy(a, b).sup_cdf_diff == 1.0);
  CHECK(discrepancy(a, b).rect_bound == 4.0);
  const auto x = real_set({0.1, 0.4, 0.4, 2.0, -1.0});
  CHECK(discrepancy(x, x).sup_cdf_diff == 0.0);
  const auto y = real_set({0.4, 0.0, 3.0});
  CHECK(discrepancy(x, y).sup_cdf_diff == discrepancy(y, x).sup_cdf_diff);

  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> xa(40 + trial), xb(25 + 2 * trial);
    for (auto& v : xa) v = std::round(3.0 * g(rng)) / 3.0;
    for (auto& v : xb) v = std::round(3.0 * (g(rng) + 0.3)) / 3.0;
    double want = 0.0;
    for (const auto* s : {&xa, &xb}) {
      for (double t : *s) {
        const auto fa = double(std::count_if(xa.begin(), xa.end(), [&](double z) { return z <= t; }));
        const auto fb = double(std::count_if(xb.begin(), xb.end(), [&](double z) { return z <= t; }));
        want = std::max(want, std::abs(fa / double(xa.size()) - fb / double(xb.size())));
      }
    }
    const double got = ks_statistic(xa, xb);
    CHECK(got == doctest::Approx(want).epsilon(1e-14));
    CHECK(got >= 0.0);
    CHECK(got <= 1.0);
  }
  CHECK_THROWS_AS(discrepancy(a, ComplexSampleSet{}), DomainError);
}

TEST_CASE("two-dimensional discrepancy") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const bool ties = seed % 2 == 0;
    const auto a = planar_set(60 + seed, seed, 0.0, ties);
    const auto b = planar_set(45, seed + 100, 0.4, ties);
    const auto r = discrepancy(a, b);
    CHECK(r.dimension == 2);
    CHECK(r.sup_cdf_diff == doctest::Approx(brute_planar(a, b)).epsilon(1e-14));
    CHECK(r.sup_cdf_diff == discrepancy(b, a).sup_cdf_diff);
    CHECK(r.rect_bound <= 4.0 * r.sup_cdf_diff + 1e-12);
    CHECK(discrepancy(a, a).sup_cdf_diff == 0.0);
  }

  // Real data embedded in the plane reproduces the one-dimensional statistic.
  auto xa = real_set({});
  auto xb = real_set({});
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < 3000; ++i) xa.values.emplace_back(g(rng), 0.0);
  for (int i = 0; i < 2000; ++i) xb.values.emplace_back(g(rng) + 0.05, 0.0);
  const double one_d = discrepancy(xa, xb).sup_cdf_diff;
  xa.dimension = xb.dimension = 2;
  CHECK(std::abs(discrepancy(xa, xb).sup_cdf_diff - one_d) < 1e-12);

  ComplexSampleSet big_a = planar_set(5000, 1, 0.0, false);
  ComplexSampleSet big_b = planar_set(5000, 2, 0.0, false);
  const auto sub = discrepancy(big_a, big_b, {4000, 9});
  CHECK(sub.subsampled);
  CHECK(sub.used_a == 4000);
  CHECK(sub.size_a == 5000);
  CHECK(sub.sup_cdf_diff == discrepancy(big_a, big_b, {4000, 9}).sup_cdf_diff);
  CHECK_THROWS_AS(discrepancy(real_set({1.0}), big_a), DomainError);
}

TEST_CASE("density inversion: Gaussian oracle") {
  const auto axis = symmetric_axis(8.0, 257);
  const std::vector<double> zero{0.0};
  const auto gauss = analytic_grid(axis, zero, [](double u, double) {
    return Complex(std::exp(-u * u / 2.0), 0.0);
  });
  const auto d = invert_density(gauss, 8.0, DensitySpec::default_for(1));
  CHECK(d.x.size() == 401);
  CHECK(std::abs(d.at(200) - 1.0 / std::sqrt(2.0 * std::numbers::pi)) < 1e-6);
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    const double want = std::exp(-d.x[i] * d.x[i] / 2.0) / std::sqrt(2.0 * std::numbers::pi);
    REQUIRE(std::abs(d.at(i) - want) < 1e-6);
  }
  CHECK(d.check().empty());
  CHECK(d.imag_residue < 1e-12);

  const auto one = analytic_grid(axis, zero, [](double, double) { return Complex(1.0, 0.0); });
  CHECK_THROWS_AS(invert_density(one, 8.0, DensitySpec::default_for(1)), TruncationError);
  CHECK_THROWS_AS(invert_density(gauss, 7.1, DensitySpec::default_for(1)), CoverageError);
}

TEST_CASE("density inversion: planar Gaussian") {
  const auto axis = symmetric_axis(8.0, 97);
  const auto gauss = analytic_grid(axis, axis, [](double u, double v) {
    return Complex(std::exp(-(u * u + v * v) / 2.0), 0.0);
  });
  const auto d = invert_density(gauss, 8.0, DensitySpec::default_for(2));
  CHECK(d.y.size() == 121);
  CHECK(std::abs(d.at(60, 60) - 1.0 / (2.0 * std::numbers::pi)) < 1e-6);
  CHECK(d.check().empty());
  const auto [a1, a2] = density_marginal_sups(d);
  CHECK(a1 == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(2e-3));
  CHECK(a2 == doctest::Approx(a1).epsilon(1e-12));
}

TEST_CASE("model density") {
  const auto p = trivial_provider();
  const auto axis = symmetric_axis(8.0, 513);
  const std::vector<double> zero{0.0};
  const auto grid = ModelCharFn(p, 0.0, 20000).grid(axis, zero);
  const auto d = invert_density(grid, 8.0, DensitySpec::default_for(1));
  CHECK(d.check().empty());
  CHECK(d.at(200) > 0.0);
  CHECK(std::abs(d.mass - 1.0) < 0.01);
}

TEST_CASE("empirical densities approach the model density") {
  const auto p = trivial_provider();
  const auto axis = symmetric_axis(8.0, 257);
  const std::vector<double> zero{0.0};
  DensitySpec spec = DensitySpec::default_for(1);
  spec.x_min = -2.0;
  spec.x_max = 2.0;
  spec.x_points = 81;
  const auto model = invert_density(ModelCharFn(p, 0.0, 20000).grid(axis, zero), 8.0, spec);
  spec.require_decay = false;
  const auto draws = mc_value_set(20000.0, 0.0, p, 100000, 77);
  const auto gap = [&](std::size_t n) {
    ComplexSampleSet head;
    head.dimension = 1;
    head.values.assign(draws.values.begin(), draws.values.begin() + static_cast<std::ptrdiff_t>(n));
    const auto d = invert_density(empirical_charfn_grid(head, axis, zero), 8.0, spec);
    CHECK(d.boundary_modulus > 0.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < d.x.size(); ++i) worst = std::max(worst, std::abs(d.at(i) - model.at(i)));
    return worst;
  };
  CHECK(gap(100000) < gap(10000));
}

TEST_CASE("small values") {
  const auto s = real_set({0.5, -0.2, 3.0});
  CHECK(small_values(s, 100.0).count == 3);
  CHECK(small_values(s, 0.3).count == 1);
  CHECK(small_values(s, 0.3).min_modulus == doctest::Approx(0.2));
  ComplexSampleSet z;
  z.values = {Complex(3.0, 4.0)};
  CHECK(small_values(z, 5.0).count == 1);
  CHECK(small_values(z, 5.0).min_modulus == 5.0);
  CHECK_THROWS_AS(small_values(ComplexSampleSet{}, 1.0), DomainError);
  CHECK_THROWS_AS(small_values(z, 0.0), DomainError);
}

TEST_CASE("prime sum diagnostics") {
  const auto p = trivial_provider();
  const auto d = prime_sum_diagnostics(p, 1000.0, 10000000, 0.0);
  CHECK(d.abs_comparator == doctest::Approx(std::log(1000.0) / 1000.0));
  CHECK(std::abs(d.abs_sum / d.abs_comparator - 1.0) < 0.25);
  REQUIRE(d.signed_comparator.has_value());
  CHECK(std::abs(d.signed_sum - d.abs_sum) < 1e-15);

  const auto e = prime_sum_diagnostics(p, 5000.0, 5000, 0.0);
  CHECK(e.abs_sum == 0.0);
  CHECK(e.signed_sum == Complex(0.0, 0.0));
  CHECK_THROWS_AS(prime_sum_diagnostics(p, 5000.0, 4000, 0.0), DomainError);

  double prev = 1e300;
  for (const double X : {1000.0, 2000.0, 4000.0}) {
    const double cur = prime_sum_diagnostics(p, X, 1000000, 0.0).abs_sum;
    CHECK(cur < prev);
    prev = cur;
  }
}
