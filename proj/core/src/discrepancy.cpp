#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <limits>
#include <random>

#include "qtwist/analysis.hpp"
#include "qtwist/errors.hpp"

namespace qtwist {

namespace {

// Suffix-add / global max-min tree over y ranks. Node layout: the left child
// of a node covering [l, r] sits at node + 1, the right child after the
// whole left subtree, so 2m - 1 nodes suffice.
class SuffixAddTree {
 public:
  explicit SuffixAddTree(std::size_t m) : m_(m), mx_(2 * m), mn_(2 * m), tag_(2 * m) {}

  void add_suffix(std::size_t from, std::int64_t w) { add(0, 0, m_ - 1, from, w); }
  std::int64_t max() const { return mx_[0]; }
  std::int64_t min() const { return mn_[0]; }

 private:
  void add(std::size_t node, std::size_t l, std::size_t r, std::size_t from, std::int64_t w) {
    if (from <= l) {
      mx_[node] += w;
      mn_[node] += w;
      tag_[node] += w;
      return;
    }
    const std::size_t mid = l + (r - l) / 2;
    const std::size_t left = node + 1;
    const std::size_t right = node + 2 * (mid - l + 1);
    if (from <= mid) add(left, l, mid, from, w);
    add(right, mid + 1, r, from, w);
    mx_[node] = tag_[node] + std::max(mx_[left], mx_[right]);
    mn_[node] = tag_[node] + std::min(mn_[left], mn_[right]);
  }

  std::size_t m_;
  std::vector<std::int64_t> mx_, mn_, tag_;
};

std::vector<Complex> subsample(const std::vector<Complex>& values, std::size_t k,
                               std::uint64_t seed) {
  std::vector<Complex> out;
  out.reserve(k);
  std::mt19937_64 rng(seed);
  std::sample(values.begin(), values.end(), std::back_inserter(out), k, rng);
  return out;
}

}  // namespace

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("KS statistic of an empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const auto na = static_cast<std::int64_t>(x.size());
  const auto nb = static_cast<std::int64_t>(y.size());
  // (count_a * nb - count_b * na) / (na * nb) = F_A - F_B, kept exact.
  std::int64_t diff = 0, best = 0;
  std::size_t i = 0, j = 0;
  while (i < x.size() || j < y.size()) {
    const double t = j == y.size() || (i < x.size() && x[i] <= y[j]) ? x[i] : y[j];
    while (i < x.size() && x[i] == t) { diff += nb; ++i; }
    while (j < y.size() && y[j] == t) { diff -= na; ++j; }
    best = std::max(best, diff < 0 ? -diff : diff);
  }
  return static_cast<double>(best) / (static_cast<double>(na) * static_cast<double>(nb));
}

double planar_cdf_sup(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.empty() || b.empty()) throw DomainError("discrepancy of an empty sample");
  const auto na = static_cast<std::int64_t>(a.size());
  const auto nb = static_cast<std::int64_t>(b.size());

  struct Point {
    double x, y;
    std::int64_t w;
  };
  std::vector<Point> pts;
  pts.reserve(a.size() + b.size());
  for (const Complex& z : a) pts.push_back({z.real(), z.imag(), nb});
  for (const Complex& z : b) pts.push_back({z.real(), z.imag(), -na});

  std::vector<double> ys;
  ys.reserve(pts.size());
  for (const auto& p : pts) ys.push_back(p.y);
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  std::sort(pts.begin(), pts.end(), [](const Point& p, const Point& q) { return p.x < q.x; });

  // After all points with x <= x0 are inserted, leaf k holds the scaled
  // F_A(x0, y_k) - F_B(x0, y_k); every corner of the step functions is
  // visited this way, including the half-open ones (they coincide with the
  // closed value at the preceding corner, or with 0).
  SuffixAddTree tree(ys.size());
  std::int64_t best = 0;
  for (std::size_t i = 0; i < pts.size();) {
    const double x0 = pts[i].x;
    for (; i < pts.size() && pts[i].x == x0; ++i) {
      const auto rank = static_cast<std::size_t>(
          std::lower_bound(ys.begin(), ys.end(), pts[i].y) - ys.begin());
      tree.add_suffix(rank, pts[i].w);
    }
    best = std::max({best, tree.max(), -tree.min()});
  }
  return static_cast<double>(best) / (static_cast<double>(na) * static_cast<double>(nb));
}

DiscrepancyReport discrepancy(const ComplexSampleSet& a, const ComplexSampleSet& b,
                              const DiscrepancyOptions& options) {
  if (a.empty() || b.empty()) throw DomainError("discrepancy of an empty sample set");
  if (a.dimension != b.dimension) {
    throw DomainError("discrepancy between sample sets of different dimension");
  }
  DiscrepancyReport report;
  report.dimension = a.dimension;
  report.size_a = a.size();
  report.size_b = b.size();

  if (a.dimension == 1) {
    std::vector<double> xa, xb;
    xa.reserve(a.size());
    xb.reserve(b.size());
    for (const Complex& z : a.values) xa.push_back(z.real());
    for (const Complex& z : b.values) xb.push_back(z.real());
    report.sup_cdf_diff = ks_statistic(xa, xb);
    report.used_a = a.size();
    report.used_b = b.size();
    report.method = "two-sample Kolmogorov-Smirnov over merged order statistics";
  } else {
    const std::size_t cap = options.max_points;
    if (cap > 0 && a.size() > cap && b.size() > cap) {
      const auto sa = subsample(a.values, cap, options.seed);
      const auto sb = subsample(b.values, cap, options.seed ^ 0x9e3779b97f4a7c15ULL);
      report.sup_cdf_diff = planar_cdf_sup(sa, sb);
      report.used_a = sa.size();
      report.used_b = sb.size();
      report.subsampled = true;
    } else {
      report.sup_cdf_diff = planar_cdf_sup(a.values, b.values);
      report.used_a = a.size();
      report.used_b = b.size();
    }
    report.method = "plane sweep over all corners of the empirical distribution functions";
  }
  report.rect_bound = 4.0 * report.sup_cdf_diff;
  return report;
}

}  // namespace qtwist
