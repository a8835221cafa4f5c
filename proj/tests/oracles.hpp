#pragma once

// Test-only reference computations.  These deliberately avoid the library's
// root isolation and interval machinery: plain rational bisection on a grid,
// integer recurrences, and direct enumeration.

#include <sidontail/polynomial.hpp>

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace oracle {

template <class C>
mpq_class eval(const std::vector<C>& coeffs, const mpq_class& x) {
  mpq_class acc = 0;
  for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * x + coeffs[k];
  return acc;
}

/// Rational bisection of a sign change of f on [lo, hi].
template <class F>
mpq_class bisect(F f, mpq_class lo, mpq_class hi, int iterations) {
  const int s_lo = sgn(f(lo));
  for (int i = 0; i < iterations; ++i) {
    mpq_class m = (lo + hi) / 2;
    const int s = sgn(f(m));
    if (s == 0) return m;
    if (s == s_lo) lo = m; else hi = m;
  }
  return (lo + hi) / 2;
}

/// Sign-change roots of f on a uniform grid of [lo, hi], refined by bisection.
template <class F>
std::vector<mpq_class> grid_roots(F f, const mpq_class& lo, const mpq_class& hi, int cells, int iterations) {
  std::vector<mpq_class> roots;
  mpq_class step = (hi - lo) / cells;
  mpq_class a = lo;
  int sa = sgn(f(a));
  for (int i = 1; i <= cells; ++i) {
    mpq_class b = lo + step * i;
    const int sb = sgn(f(b));
    if (sa == 0) roots.push_back(a);
    else if (sb != 0 && sb != sa) roots.push_back(bisect(f, a, b, iterations));
    a = b;
    sa = sb;
  }
  if (sa == 0) roots.push_back(a);
  return roots;
}

/// Measure of {lo <= y <= hi : |f(y)| < eps} from grid roots of f - eps and f + eps.
template <class F>
double grid_sublevel_measure(F f, const mpq_class& lo, const mpq_class& hi, const mpq_class& eps, int cells) {
  auto lower = [&](const mpq_class& y) -> mpq_class { return f(y) - eps; };
  auto upper = [&](const mpq_class& y) -> mpq_class { return f(y) + eps; };
  std::vector<mpq_class> pts{lo};
  for (auto& r : grid_roots(lower, lo, hi, cells, 80)) pts.push_back(r);
  for (auto& r : grid_roots(upper, lo, hi, cells, 80)) pts.push_back(r);
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  mpq_class total = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i] == pts[i + 1]) continue;
    mpq_class m = (pts[i] + pts[i + 1]) / 2;
    mpq_class v = f(m);
    if (v < eps && v > -eps) total += pts[i + 1] - pts[i];
  }
  return total.get_d();
}

}  // namespace oracle
