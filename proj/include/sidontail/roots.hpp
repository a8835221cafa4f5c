#pragma once

// Real root isolation (Descartes' rule of signs with bisection on the
// square-free part) and certified refinement (bisection, then Newton steps
// that are accepted only after an exact sign-change bracket check).

#include <sidontail/error.hpp>
#include <sidontail/interval.hpp>
#include <sidontail/polynomial.hpp>

#include <cstdint>
#include <vector>

namespace sidontail {

struct PrecisionPolicy {
  Precision initial_bits = 64;
  Precision max_bits = Precision{1} << 20;
  // escalation_factor = num / den, > 1
  long escalation_num = 2;
  long escalation_den = 1;

  Precision escalate(Precision bits) const {
    Precision next = bits * escalation_num / escalation_den;
    return next > bits ? next : bits + 1;
  }

  void validate() const {
    if (initial_bits < 2 || initial_bits > max_bits) {
      throw std::invalid_argument("PrecisionPolicy: need 2 <= initial_bits <= max_bits");
    }
    if (escalation_den <= 0 || escalation_num <= escalation_den) {
      throw std::invalid_argument("PrecisionPolicy: escalation factor must exceed 1");
    }
  }
};

namespace detail {

/// Integer polynomial with the roots of q(a + (b - a) x) for dyadic a < b.
inline IntPolynomial affine_pullback(const IntPolynomial& q, const Dyadic& a, const Dyadic& b) {
  const Dyadic w = exact_sub(b, a);
  auto [am, ae] = a.mantissa_exponent();
  auto [wm, we] = w.mantissa_exponent();
  long s = 0;
  if (!a.is_zero()) s = std::max(s, -ae);
  s = std::max(s, -we);
  // a = A 2^-s, w = W 2^-s
  mpz_class A = am, W = wm;
  if (!a.is_zero()) mpz_mul_2exp(A.get_mpz_t(), A.get_mpz_t(), static_cast<mp_bitcnt_t>(ae + s));
  mpz_mul_2exp(W.get_mpz_t(), W.get_mpz_t(), static_cast<mp_bitcnt_t>(we + s));
  const IntPolynomial lin(std::vector<mpz_class>{A, W});
  const auto& c = q.coefficients();
  const std::size_t n = c.size() - 1;
  IntPolynomial h(std::vector<mpz_class>{c[n]});
  for (std::size_t i = n; i-- > 0;) {
    mpz_class t = c[i];
    mpz_mul_2exp(t.get_mpz_t(), t.get_mpz_t(), static_cast<mp_bitcnt_t>(s) * (n - i));
    h = h * lin + IntPolynomial(std::vector<mpz_class>{t});
  }
  return h;
}

/// Sign variations of (x + 1)^n Q(1 / (x + 1)), an upper bound (with equal
/// parity) on the number of roots of Q in (0, 1).
inline int descartes_unit_variations(const IntPolynomial& Q) {
  const int n = Q.degree();
  std::vector<mpz_class> r(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) r[n - i] = Q.coeff(i);
  for (int i = 0; i < n; ++i) {
    for (int j = n - 1; j >= i; --j) r[j] += r[j + 1];
  }
  int count = 0, last = 0;
  for (const auto& v : r) {
    const int s = sgn(v);
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

inline void isolate_open(const IntPolynomial& q, const Dyadic& a, const Dyadic& b,
                         std::vector<DyadicInterval>& out) {
  const int v = descartes_unit_variations(affine_pullback(q, a, b));
  if (v == 0) return;
  const Precision bits = std::max(a.prec(), b.prec());
  // Brackets must have nonzero endpoint signs so later refinement can bisect.
  if (v == 1 && q.sign_at(a) != 0 && q.sign_at(b) != 0) {
    out.emplace_back(a, b, bits);
    return;
  }
  Dyadic m = midpoint(a, b);
  isolate_open(q, a, m, out);
  if (q.sign_at(m) == 0) out.push_back(DyadicInterval::point(m));
  isolate_open(q, m, b, out);
}

/// One bisection step on a sign-changing bracket of a simple root.
inline DyadicInterval bisect_once(const IntPolynomial& q, const DyadicInterval& iv, int sign_lo) {
  Dyadic m = iv.mid();
  const int sm = q.sign_at(m);
  if (sm == 0) return DyadicInterval::point(m);
  if (sm == sign_lo) return {m, iv.hi(), iv.bits()};
  return {iv.lo(), m, iv.bits()};
}

}  // namespace detail

/// Disjoint closed intervals, each holding exactly one real root of p, that
/// together cover every real root of p in the closed window, in ascending order.
inline std::vector<DyadicInterval> isolate_real_roots(const IntPolynomial& p, const DyadicInterval& window) {
  if (p.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "isolate_real_roots");
  const IntPolynomial q = square_free_part(p);
  std::vector<DyadicInterval> found;
  if (q.degree() <= 0) return found;
  const Dyadic& lo = window.lo();
  const Dyadic& hi = window.hi();
  if (q.sign_at(lo) == 0) found.push_back(DyadicInterval::point(lo));
  if (lo == hi) return found;
  detail::isolate_open(q, lo, hi, found);
  if (q.sign_at(hi) == 0) found.push_back(DyadicInterval::point(hi));

  // Closed neighbours may share an endpoint; shrink until strictly disjoint.
  bool touching = true;
  while (touching) {
    touching = false;
    for (std::size_t i = 0; i + 1 < found.size(); ++i) {
      if (compare(found[i].hi(), found[i + 1].lo()) < 0) continue;
      touching = true;
      for (std::size_t j : {i, i + 1}) {
        if (found[j].is_point()) continue;
        found[j] = detail::bisect_once(q, found[j], q.sign_at(found[j].lo()));
      }
    }
  }
  return found;
}

/// Number of distinct real roots in the closed window, by Sturm's theorem.
/// Kept separate from the Descartes path so each can check the other.
inline int sturm_root_count(const IntPolynomial& p, const DyadicInterval& window) {
  if (p.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "sturm_root_count");
  return sturm_count_closed(p, window.lo(), window.hi());
}

namespace detail {

inline Dyadic newton_step(const IntPolynomial& q, const IntPolynomial& dq, const Dyadic& x, Precision p) {
  const DyadicInterval xi = DyadicInterval::point(x);
  const Dyadic fx = q.eval(xi, p).mid();
  const Dyadic dfx = dq.eval(xi, p).mid();
  if (dfx.is_zero()) return x;
  return sub(x, div(fx, dfx, p, Round::Nearest), p, Round::Nearest);
}

inline DyadicInterval refine_square_free(const IntPolynomial& q, DyadicInterval iv, Precision target_bits) {
  if (iv.is_point()) {
    if (q.sign_at(iv.lo()) != 0) throw Error(ErrorCode::NotIsolating, "point is not a root");
    return iv;
  }
  const int sa = q.sign_at(iv.lo());
  const int sb = q.sign_at(iv.hi());
  if (sa == 0) return DyadicInterval::point(iv.lo());
  if (sb == 0) return DyadicInterval::point(iv.hi());
  if (sa == sb) throw Error(ErrorCode::NotIsolating, "endpoint signs agree on " + iv.to_string());

  const Dyadic target = pow2(-static_cast<long>(target_bits));
  const IntPolynomial dq = q.derivative();
  auto done = [&] { return iv.is_point() || compare(iv.width(), target) <= 0; };

  // Bisect to a comfortable starting accuracy for Newton.
  const Precision bisect_bits = std::min<Precision>(target_bits, 48);
  const Dyadic bisect_target = pow2(-static_cast<long>(bisect_bits));
  while (!iv.is_point() && compare(iv.width(), bisect_target) > 0) iv = bisect_once(q, iv, sa);

  Precision have = bisect_bits;
  while (!done()) {
    const Precision want = std::min<Precision>(2 * have - 8, target_bits + 2);
    const Precision work = want + 32;
    Dyadic x = iv.mid().with_precision(work);
    for (int it = 0; it < 2; ++it) x = newton_step(q, dq, x, work);
    const Dyadic r = pow2(-static_cast<long>(want + 1));
    Dyadic l = sub(x, r, work, Round::Down);
    Dyadic h = add(x, r, work, Round::Up);
    const int sl = q.sign_at(l);
    const int sh = q.sign_at(h);
    const bool inside = compare(iv.lo(), l) <= 0 && compare(h, iv.hi()) <= 0;
    if (inside && sl != 0 && sh != 0 && sl != sh) {
      iv = DyadicInterval(std::move(l), std::move(h), work);
      have = want;
      continue;
    }
    if (inside && sl == 0) return DyadicInterval::point(l);
    if (inside && sh == 0) return DyadicInterval::point(h);
    // Newton did not land; fall back to bisection for a few steps.
    for (int k = 0; k < 8 && !done(); ++k) iv = bisect_once(q, iv, sa);
    have = std::max<Precision>(have, 16);
  }
  return iv;
}

}  // namespace detail

/// Shrinks an isolating interval of a simple root of p to width <= 2^-target_bits.
/// The result is always a sub-interval of `iso`.
inline DyadicInterval refine_root(const IntPolynomial& p, const DyadicInterval& iso, Precision target_bits) {
  if (p.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "refine_root");
  return detail::refine_square_free(square_free_part(p), iso, target_bits);
}

}  // namespace sidontail
