#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qtwist/analysis.hpp"
#include "qtwist/errors.hpp"
#include "qtwist/parallel.hpp"

namespace qtwist {

namespace {

constexpr double kDecayThreshold = 1e-4;
constexpr double kImagResidueLimit = 1e-6;

struct Window {
  std::size_t lo, hi;
};

Window window(const std::optional<std::size_t>& lo, const std::optional<std::size_t>& hi,
              double U, const char* name) {
  if (!lo || !hi || *hi <= *lo) {
    throw CoverageError(std::string("grid ") + name + "-axis must contain -U and U (U = " +
                        std::to_string(U) + ")");
  }
  return {*lo, *hi};
}

std::vector<double> trapezoid_weights(const std::vector<double>& axis, Window w) {
  std::vector<double> out(w.hi - w.lo + 1, 0.0);
  for (std::size_t i = w.lo; i < w.hi; ++i) {
    const double h = axis[i + 1] - axis[i];
    out[i - w.lo] += 0.5 * h;
    out[i + 1 - w.lo] += 0.5 * h;
  }
  return out;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  if (n < 2) throw DomainError("density axis needs at least two points");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) s += 0.5 * (x[i + 1] - x[i]) * (f[i] + f[i + 1]);
  return s;
}

}  // namespace

DensitySpec DensitySpec::default_for(int dimension) {
  DensitySpec spec;
  spec.dimension = dimension;
  if (dimension == 2) {
    spec.x_min = -3.0;
    spec.x_max = 3.0;
    spec.x_points = 121;
  }
  return spec;
}

std::vector<std::string> DensityGrid::check() const {
  std::vector<std::string> problems;
  if (!(std::abs(mass - 1.0) <= 0.01)) {
    problems.push_back("total mass " + std::to_string(mass) + " is not within 1% of 1");
  }
  if (!(min_density >= -1e-3)) {
    problems.push_back("density dips to " + std::to_string(min_density) + " below -1e-3");
  }
  return problems;
}

DensityGrid invert_density(const CharFnGrid& grid, double half_width, const DensitySpec& spec) {
  if (!(half_width > 0.0)) throw DomainError("inversion half-width U must be positive");
  if (spec.dimension != 1 && spec.dimension != 2) throw DomainError("dimension must be 1 or 2");

  DensityGrid out;
  out.dimension = spec.dimension;
  out.half_width = half_width;
  out.x = linspace(spec.x_min, spec.x_max, spec.x_points);

  const Window uw = window(grid.u_index(-half_width), grid.u_index(half_width),
                           half_width, "u");
  const auto wu = trapezoid_weights(grid.u, uw);
  out.step = grid.u[uw.lo + 1] - grid.u[uw.lo];
  constexpr double kTwoPi = 2.0 * std::numbers::pi;

  if (spec.dimension == 1) {
    const auto k0 = grid.v_index(0.0);
    if (!k0) throw CoverageError("1D inversion needs v = 0 on the grid");
    const double edge = std::max(std::abs(grid.at(uw.lo, *k0)), std::abs(grid.at(uw.hi, *k0)));
    out.boundary_modulus = edge;
    if (spec.require_decay && !(edge < kDecayThreshold)) {
      throw TruncationError("|Phi| = " + std::to_string(edge) + " at |u| = U; increase U");
    }
    out.density.assign(out.x.size(), 0.0);
    std::vector<double> residue(out.x.size(), 0.0);
    parallel_for(
        out.x.size(),
        [&](std::size_t j) {
          Complex sum = 0.0;
          for (std::size_t i = uw.lo; i <= uw.hi; ++i) {
            sum += wu[i - uw.lo] * std::polar(1.0, -grid.u[i] * out.x[j]) * grid.at(i, *k0);
          }
          sum /= kTwoPi;
          out.density[j] = sum.real();
          residue[j] = std::abs(sum.imag());
        },
        8);
    out.imag_residue = *std::max_element(residue.begin(), residue.end());
    out.mass = trapezoid(out.x, out.density);
  } else {
    out.y = linspace(spec.y_min, spec.y_max, spec.y_points);
    const Window vw = window(grid.v_index(-half_width), grid.v_index(half_width),
                             half_width, "v");
    const auto wv = trapezoid_weights(grid.v, vw);
    double edge = 0.0;
    for (std::size_t k = vw.lo; k <= vw.hi; ++k) {
      edge = std::max({edge, std::abs(grid.at(uw.lo, k)), std::abs(grid.at(uw.hi, k))});
    }
    for (std::size_t i = uw.lo; i <= uw.hi; ++i) {
      edge = std::max({edge, std::abs(grid.at(i, vw.lo)), std::abs(grid.at(i, vw.hi))});
    }
    out.boundary_modulus = edge;
    if (spec.require_decay && !(edge < kDecayThreshold)) {
      throw TruncationError("|Phi| = " + std::to_string(edge) + " on the box boundary; increase U");
    }
    const std::size_t nu = uw.hi - uw.lo + 1;
    const std::size_t ny = out.y.size();
    // inner[i][m] = sum_k w_k e^{-i v_k y_m} Phi(u_i, v_k)
    std::vector<Complex> inner(nu * ny);
    parallel_for(
        nu,
        [&](std::size_t a) {
          const std::size_t i = uw.lo + a;
          for (std::size_t m = 0; m < ny; ++m) {
            Complex sum = 0.0;
            for (std::size_t k = vw.lo; k <= vw.hi; ++k) {
              sum += wv[k - vw.lo] * std::polar(1.0, -grid.v[k] * out.y[m]) * grid.at(i, k);
            }
            inner[a * ny + m] = sum;
          }
        },
        4);
    out.density.assign(out.x.size() * ny, 0.0);
    std::vector<double> residue(out.x.size(), 0.0);
    parallel_for(
        out.x.size(),
        [&](std::size_t j) {
          for (std::size_t m = 0; m < ny; ++m) {
            Complex sum = 0.0;
            for (std::size_t a = 0; a < nu; ++a) {
              sum += wu[a] * std::polar(1.0, -grid.u[uw.lo + a] * out.x[j]) * inner[a * ny + m];
            }
            sum /= kTwoPi * kTwoPi;
            out.density[j * ny + m] = sum.real();
            residue[j] = std::max(residue[j], std::abs(sum.imag()));
          }
        },
        4);
    out.imag_residue = *std::max_element(residue.begin(), residue.end());
    std::vector<double> rows(out.x.size());
    for (std::size_t j = 0; j < out.x.size(); ++j) {
      rows[j] = trapezoid(out.y, std::vector<double>(out.density.begin() + j * ny,
                                                     out.density.begin() + (j + 1) * ny));
    }
    out.mass = trapezoid(out.x, rows);
  }

  out.min_density = *std::min_element(out.density.begin(), out.density.end());
  if (!(out.imag_residue < kImagResidueLimit)) {
    throw InvariantError("inverted density has imaginary residue " +
                         std::to_string(out.imag_residue));
  }
  return out;
}

std::pair<double, double> density_marginal_sups(const DensityGrid& density) {
  if (density.dimension == 1) {
    return {*std::max_element(density.density.begin(), density.density.end()), 0.0};
  }
  const std::size_t nx = density.x.size(), ny = density.y.size();
  double a1 = 0.0, a2 = 0.0;
  std::vector<double> line(ny);
  for (std::size_t j = 0; j < nx; ++j) {
    for (std::size_t m = 0; m < ny; ++m) line[m] = density.at(j, m);
    a1 = std::max(a1, trapezoid(density.y, line));
  }
  line.resize(nx);
  for (std::size_t m = 0; m < ny; ++m) {
    for (std::size_t j = 0; j < nx; ++j) line[j] = density.at(j, m);
    a2 = std::max(a2, trapezoid(density.x, line));
  }
  return {a1, a2};
}

}  // namespace qtwist
