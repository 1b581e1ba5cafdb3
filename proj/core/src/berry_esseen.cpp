#include <cmath>
#include <numbers>
#include <string>

#include "qtwist/analysis.hpp"
#include "qtwist/errors.hpp"

namespace qtwist {

namespace {

struct AxisRange {
  std::size_t lo, zero, hi;
};

AxisRange locate(const CharFnGrid& g, bool u_axis, double R) {
  const auto lo = u_axis ? g.u_index(-R) : g.v_index(-R);
  const auto zero = u_axis ? g.u_index(0.0) : g.v_index(0.0);
  const auto hi = u_axis ? g.u_index(R) : g.v_index(R);
  if (!lo || !zero || !hi) {
    throw CoverageError(std::string("grid ") + (u_axis ? "u" : "v") +
                        "-axis must contain -R, 0 and R as points (R = " + std::to_string(R) + ")");
  }
  return {*lo, *zero, *hi};
}

struct Integrals {
  double two_d = 0.0, u_line = 0.0, v_line = 0.0, strip = 0.0;
};

bool stride_fits(const AxisRange& r, std::size_t s) {
  return (r.zero - r.lo) % s == 0 && (r.hi - r.lo) % s == 0;
}

Integrals integrate(const CharFnGrid& f, const CharFnGrid& g, const AxisRange& ur,
                    const AxisRange& vr, std::size_t stride, double inner_cutoff) {
  const auto& u = f.u;
  const auto& v = f.v;
  const std::size_t iz = ur.zero, kz = vr.zero;

  const auto line_u = [&](std::size_t i) {
    return std::abs(f.at(i, kz) - g.at(i, kz)) / std::abs(u[i]);
  };
  const auto line_v = [&](std::size_t k) {
    return std::abs(f.at(iz, k) - g.at(iz, k)) / std::abs(v[k]);
  };
  const auto quotient = [&](std::size_t i, std::size_t k) {
    const Complex fh = f.at(i, k) - f.at(i, kz) * f.at(iz, k);
    const Complex gh = g.at(i, k) - g.at(i, kz) * g.at(iz, k);
    return std::abs(fh - gh) / std::abs(u[i] * v[k]);
  };

  Integrals out;
  for (std::size_t i = ur.lo; i < ur.hi; i += stride) {
    const std::size_t j = i + stride;
    // At the origin the quotient takes its one-sided limit from the cell.
    const double a = i == iz ? line_u(j) : line_u(i);
    const double b = j == iz ? line_u(i) : line_u(j);
    out.u_line += 0.5 * (u[j] - u[i]) * (a + b);
  }
  for (std::size_t k = vr.lo; k < vr.hi; k += stride) {
    const std::size_t m = k + stride;
    const double a = k == kz ? line_v(m) : line_v(k);
    const double b = m == kz ? line_v(k) : line_v(m);
    out.v_line += 0.5 * (v[m] - v[k]) * (a + b);
  }
  for (std::size_t i = ur.lo; i < ur.hi; i += stride) {
    const std::size_t i1 = i + stride;
    const double du = u[i1] - u[i];
    const bool near_u = std::min(std::abs(u[i]), std::abs(u[i1])) <= inner_cutoff || i == iz || i1 == iz;
    for (std::size_t k = vr.lo; k < vr.hi; k += stride) {
      const std::size_t k1 = k + stride;
      const auto corner = [&](std::size_t ci, std::size_t ck) {
        const std::size_t ei = ci == iz ? (ci == i ? i1 : i) : ci;
        const std::size_t ek = ck == kz ? (ck == k ? k1 : k) : ck;
        return quotient(ei, ek);
      };
      const double cell = 0.25 * du * (v[k1] - v[k]) *
                          (corner(i, k) + corner(i1, k) + corner(i, k1) + corner(i1, k1));
      out.two_d += cell;
      const bool near_v =
          std::min(std::abs(v[k]), std::abs(v[k1])) <= inner_cutoff || k == kz || k1 == kz;
      if (near_u || near_v) out.strip += cell;
    }
  }
  return out;
}

double assemble(const Integrals& in, double smoothing) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  return 2.0 / (kTwoPi * kTwoPi) * in.two_d + 2.0 / std::numbers::pi * in.u_line +
         2.0 / std::numbers::pi * in.v_line + smoothing;
}

}  // namespace

double berry_esseen_constant() {
  return 3.0 * std::sqrt(2.0) + 4.0 * std::sqrt(3.0) + 24.0 / std::numbers::pi;
}

double default_smoothing_radius(std::uint64_t N) {
  const double l = std::log(static_cast<double>(N));
  const double ll = std::log(l);
  return l / (ll * ll);
}

double default_inner_cutoff(std::uint64_t N) {
  const double l = std::log(static_cast<double>(N));
  return 1.0 / (l * l);
}

BerryEsseenReport berry_esseen_bound(const CharFnGrid& f, const CharFnGrid& g, double R,
                                     double A1, double A2, double inner_cutoff) {
  if (!(R > 0.0)) throw DomainError("Berry-Esseen radius R must be positive");
  if (!(A1 >= 0.0) || !(A2 >= 0.0)) throw DomainError("A1 and A2 must be nonnegative");
  if (f.u != g.u || f.v != g.v) throw DomainError("Berry-Esseen grids must share their axes");
  if (f.values.size() != f.u.size() * f.v.size() || g.values.size() != f.values.size()) {
    throw DomainError("grid shape mismatch");
  }
  const AxisRange ur = locate(f, true, R);
  const AxisRange vr = locate(f, false, R);

  BerryEsseenReport report;
  report.R = R;
  report.A1 = A1;
  report.A2 = A2;
  report.inner_cutoff = inner_cutoff;
  report.smoothing_term = berry_esseen_constant() * (2.0 * (A1 + A2)) / R;

  const Integrals fine = integrate(f, g, ur, vr, 1, inner_cutoff);
  report.double_integral = fine.two_d;
  report.u_line_integral = fine.u_line;
  report.v_line_integral = fine.v_line;
  report.strip_integral = fine.strip;
  report.bound = assemble(fine, report.smoothing_term);

  if (stride_fits(ur, 2) && stride_fits(vr, 2) && ur.hi - ur.lo >= 4 && vr.hi - vr.lo >= 4) {
    report.coarse_bound = assemble(integrate(f, g, ur, vr, 2, inner_cutoff), report.smoothing_term);
    report.relative_change =
        report.bound > 0.0 ? std::abs(report.bound - report.coarse_bound) / report.bound : 0.0;
    report.converged = report.relative_change < 0.005;
  } else {
    report.coarse_bound = report.bound;
  }
  return report;
}

}  // namespace qtwist
