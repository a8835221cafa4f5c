#pragma once

#include <sidontail/roots.hpp>

#include <algorithm>
#include <vector>

namespace sidontail {

/// Certified enclosure of the Lebesgue measure of {y in domain : |p(y)| < eps}.
/// The set is a finite union of intervals delimited by real roots of p - eps
/// and p + eps; root enclosures are refined to `root_bits` and the sign
/// pattern on each gap is decided exactly at a dyadic test point.
inline DyadicInterval sublevel_measure(const IntPolynomial& p, const DyadicInterval& domain,
                                       const Dyadic& eps, Precision root_bits = 96) {
  if (p.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "sublevel_measure");
  if (eps.sign() <= 0) throw std::invalid_argument("sublevel_measure: eps must be positive");

  const IntPolynomial below = shifted_by_dyadic(p, neg(eps));  // roots of p - eps
  const IntPolynomial above = shifted_by_dyadic(p, eps);       // roots of p + eps

  struct Break {
    DyadicInterval iv;
    const IntPolynomial* poly;
  };
  std::vector<Break> breaks;
  for (const IntPolynomial* f : {&below, &above}) {
    if (f->degree() <= 0) continue;
    const IntPolynomial sf = square_free_part(*f);
    for (auto& iv : isolate_real_roots(sf, domain)) {
      breaks.push_back({detail::refine_square_free(sf, iv, root_bits), f});
    }
  }
  std::sort(breaks.begin(), breaks.end(),
            [](const Break& a, const Break& b) { return compare(a.iv.lo(), b.iv.lo()) < 0; });

  // Roots of p - eps and p + eps are distinct, so overlaps vanish under refinement.
  Precision bits = root_bits;
  for (bool overlap = true; overlap;) {
    overlap = false;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      if (compare(breaks[i].iv.hi(), breaks[i + 1].iv.lo()) >= 0) {
        overlap = true;
        break;
      }
    }
    if (!overlap) break;
    bits *= 2;
    for (auto& b : breaks) b.iv = detail::refine_square_free(square_free_part(*b.poly), b.iv, bits);
    std::sort(breaks.begin(), breaks.end(),
              [](const Break& a, const Break& b) { return compare(a.iv.lo(), b.iv.lo()) < 0; });
  }

  auto inside = [&](const Dyadic& t) { return below.sign_at(t) < 0 && above.sign_at(t) > 0; };

  Dyadic inner(0), outer(0);
  // Gap g runs from the end of break g-1 (or domain.lo) to the start of break g (or domain.hi).
  for (std::size_t g = 0; g <= breaks.size(); ++g) {
    const Dyadic& gap_lo_in = g == 0 ? domain.lo() : breaks[g - 1].iv.hi();
    const Dyadic& gap_lo_out = g == 0 ? domain.lo() : breaks[g - 1].iv.lo();
    const Dyadic& gap_hi_in = g == breaks.size() ? domain.hi() : breaks[g].iv.lo();
    const Dyadic& gap_hi_out = g == breaks.size() ? domain.hi() : breaks[g].iv.hi();
    if (compare(gap_lo_in, gap_hi_in) < 0) {
      if (inside(midpoint(gap_lo_in, gap_hi_in))) {
        inner = exact_add(inner, exact_sub(gap_hi_in, gap_lo_in));
        outer = exact_add(outer, exact_sub(gap_hi_out, gap_lo_out));
      }
    } else {
      // Degenerate gap (a root sits on the domain boundary): contributes at most its outer extent.
      outer = exact_add(outer, exact_sub(gap_hi_out, gap_lo_out));
    }
  }
  const Dyadic zero(0);
  const Dyadic total = domain.width();
  if (compare(outer, total) > 0) outer = total;
  if (compare(inner, zero) < 0) inner = zero;
  return {inner, outer, std::max(inner.prec(), outer.prec())};
}

}  // namespace sidontail
