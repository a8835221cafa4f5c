#pragma once

// Closed intervals [lo, hi] with dyadic endpoints and outward rounding.

#include <sidontail/dyadic.hpp>

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sidontail {

class DyadicInterval {
 public:
  DyadicInterval() : bits_(64) {}

  DyadicInterval(Dyadic lo, Dyadic hi, Precision bits)
      : lo_(std::move(lo)), hi_(std::move(hi)), bits_(clamp_precision(bits)) {
    if (compare(lo_, hi_) > 0) {
      throw std::invalid_argument("DyadicInterval: lo > hi");
    }
  }

  DyadicInterval(Dyadic lo, Dyadic hi)
      : DyadicInterval(lo, hi, std::max(lo.prec(), hi.prec())) {}

  static DyadicInterval point(const Dyadic& x) { return {x, x, std::max<Precision>(x.prec(), 2)}; }
  static DyadicInterval point(long v) { return point(Dyadic(v)); }
  static DyadicInterval from_integer(const mpz_class& z) {
    return point(Dyadic::from_integer(z));
  }
  static DyadicInterval from_rational(const mpq_class& q, Precision bits) {
    return {Dyadic::from_rational(q, bits, Round::Down),
            Dyadic::from_rational(q, bits, Round::Up), bits};
  }

  const Dyadic& lo() const noexcept { return lo_; }
  const Dyadic& hi() const noexcept { return hi_; }
  Precision bits() const noexcept { return bits_; }

  bool is_point() const noexcept { return lo_ == hi_; }
  bool contains(const Dyadic& x) const noexcept {
    return compare(lo_, x) <= 0 && compare(x, hi_) <= 0;
  }
  bool contains(long x) const noexcept { return compare(lo_, x) <= 0 && compare(hi_, x) >= 0; }
  bool contains(const mpq_class& q) const noexcept {
    return compare(lo_, q) <= 0 && compare(hi_, q) >= 0;
  }
  bool contains(const DyadicInterval& o) const noexcept {
    return compare(lo_, o.lo_) <= 0 && compare(o.hi_, hi_) <= 0;
  }
  /// o lies in the open interior (lo, hi).
  bool interior_contains(const DyadicInterval& o) const noexcept {
    return compare(lo_, o.lo_) < 0 && compare(o.hi_, hi_) < 0;
  }
  bool intersects(const DyadicInterval& o) const noexcept {
    return compare(lo_, o.hi_) <= 0 && compare(o.lo_, hi_) <= 0;
  }
  bool positive() const noexcept { return lo_.sign() > 0; }
  bool negative() const noexcept { return hi_.sign() < 0; }
  bool contains_zero() const noexcept { return lo_.sign() <= 0 && hi_.sign() >= 0; }
  /// +1 / -1 when the sign is certified, 0 otherwise.
  int certified_sign() const noexcept { return positive() ? 1 : (negative() ? -1 : 0); }

  /// Strict comparisons that hold for every pair of members.
  bool certainly_less(const DyadicInterval& o) const noexcept { return compare(hi_, o.lo_) < 0; }
  bool certainly_greater(const DyadicInterval& o) const noexcept { return compare(lo_, o.hi_) > 0; }

  Dyadic width() const { return exact_sub(hi_, lo_); }
  Dyadic mid() const { return midpoint(lo_, hi_); }

  DyadicInterval with_bits(Precision bits) const { return {lo_, hi_, bits}; }

  std::pair<DyadicInterval, DyadicInterval> bisect() const {
    Dyadic m = mid();
    return {DyadicInterval(lo_, m, bits_), DyadicInterval(m, hi_, bits_)};
  }

  /// Largest |x| over the interval (exact).
  Dyadic magnitude() const { return max(abs(lo_), abs(hi_)); }
  /// Smallest |x| over the interval (exact).
  Dyadic mignitude() const {
    if (contains_zero()) return Dyadic(0);
    return min(abs(lo_), abs(hi_));
  }

  std::string to_string(int digits = 20) const {
    return "[" + lo_.to_string(digits, Round::Down) + ", " +
           hi_.to_string(digits, Round::Up) + "]";
  }

  friend std::ostream& operator<<(std::ostream& os, const DyadicInterval& x) {
    return os << x.to_string();
  }

 private:
  Dyadic lo_;
  Dyadic hi_;
  Precision bits_;
};

inline Precision join_bits(const DyadicInterval& a, const DyadicInterval& b) {
  return std::max(a.bits(), b.bits());
}

inline DyadicInterval add(const DyadicInterval& a, const DyadicInterval& b, Precision p) {
  return {add(a.lo(), b.lo(), p, Round::Down), add(a.hi(), b.hi(), p, Round::Up), p};
}
inline DyadicInterval sub(const DyadicInterval& a, const DyadicInterval& b, Precision p) {
  return {sub(a.lo(), b.hi(), p, Round::Down), sub(a.hi(), b.lo(), p, Round::Up), p};
}
inline DyadicInterval neg(const DyadicInterval& a) {
  return {neg(a.hi()), neg(a.lo()), a.bits()};
}

inline DyadicInterval mul(const DyadicInterval& a, const DyadicInterval& b, Precision p) {
  if (a.lo().sign() >= 0 && b.lo().sign() >= 0) {
    return {mul(a.lo(), b.lo(), p, Round::Down), mul(a.hi(), b.hi(), p, Round::Up), p};
  }
  const Dyadic* xs[2] = {&a.lo(), &a.hi()};
  const Dyadic* ys[2] = {&b.lo(), &b.hi()};
  std::optional<Dyadic> lo, hi;
  for (const Dyadic* x : xs) {
    for (const Dyadic* y : ys) {
      Dyadic d = mul(*x, *y, p, Round::Down);
      Dyadic u = mul(*x, *y, p, Round::Up);
      if (!lo || compare(d, *lo) < 0) lo = std::move(d);
      if (!hi || compare(u, *hi) > 0) hi = std::move(u);
    }
  }
  return {std::move(*lo), std::move(*hi), p};
}

inline DyadicInterval div(const DyadicInterval& a, const DyadicInterval& b, Precision p) {
  if (b.contains_zero()) {
    throw std::domain_error("interval division by an interval containing zero");
  }
  const Dyadic* xs[2] = {&a.lo(), &a.hi()};
  const Dyadic* ys[2] = {&b.lo(), &b.hi()};
  std::optional<Dyadic> lo, hi;
  for (const Dyadic* x : xs) {
    for (const Dyadic* y : ys) {
      Dyadic d = div(*x, *y, p, Round::Down);
      Dyadic u = div(*x, *y, p, Round::Up);
      if (!lo || compare(d, *lo) < 0) lo = std::move(d);
      if (!hi || compare(u, *hi) > 0) hi = std::move(u);
    }
  }
  return {std::move(*lo), std::move(*hi), p};
}

inline DyadicInterval square(const DyadicInterval& a, Precision p) {
  const Dyadic lo_mag = a.mignitude();
  const Dyadic hi_mag = a.magnitude();
  return {mul(lo_mag, lo_mag, p, Round::Down), mul(hi_mag, hi_mag, p, Round::Up), p};
}

inline DyadicInterval abs(const DyadicInterval& a) {
  return {a.mignitude(), a.magnitude(), a.bits()};
}

inline DyadicInterval operator+(const DyadicInterval& a, const DyadicInterval& b) { return add(a, b, join_bits(a, b)); }
inline DyadicInterval operator-(const DyadicInterval& a, const DyadicInterval& b) { return sub(a, b, join_bits(a, b)); }
inline DyadicInterval operator*(const DyadicInterval& a, const DyadicInterval& b) { return mul(a, b, join_bits(a, b)); }
inline DyadicInterval operator/(const DyadicInterval& a, const DyadicInterval& b) { return div(a, b, join_bits(a, b)); }
inline DyadicInterval operator-(const DyadicInterval& a) { return neg(a); }

/// a * 2^e (exact).
inline DyadicInterval ldexp(const DyadicInterval& a, long e) {
  return {ldexp(a.lo(), e), ldexp(a.hi(), e), a.bits()};
}

inline DyadicInterval hull(const DyadicInterval& a, const DyadicInterval& b) {
  return {min(a.lo(), b.lo()), max(a.hi(), b.hi()), join_bits(a, b)};
}

inline std::optional<DyadicInterval> intersect(const DyadicInterval& a, const DyadicInterval& b) {
  if (!a.intersects(b)) return std::nullopt;
  return DyadicInterval(max(a.lo(), b.lo()), min(a.hi(), b.hi()), join_bits(a, b));
}

namespace detail {
// Positive base, directed rounding at every step; valid because products of
// positive lower (upper) bounds rounded down (up) stay lower (upper) bounds.
inline Dyadic pow_positive(const Dyadic& x, std::uint64_t n, Precision p, Round r) {
  Dyadic result = Dyadic(1).with_precision(p);
  Dyadic base = x.with_precision(std::max(p, x.prec()));
  while (n > 0) {
    if (n & 1U) result = mul(result, base, p, r);
    n >>= 1U;
    if (n > 0) base = mul(base, base, p, r);
  }
  return result;
}
}  // namespace detail

/// Encloses x^n for every x in the interval, by binary exponentiation with
/// outward rounding at `bits`.
inline DyadicInterval pow(const DyadicInterval& x, std::uint64_t n, Precision bits) {
  if (n == 0) return DyadicInterval::point(1).with_bits(bits);
  if (x.lo().sign() >= 0) {
    return {detail::pow_positive(x.lo(), n, bits, Round::Down),
            detail::pow_positive(x.hi(), n, bits, Round::Up), bits};
  }
  const bool even = (n % 2) == 0;
  if (x.hi().sign() <= 0) {
    DyadicInterval m = pow(neg(x), n, bits);
    return even ? m : neg(m);
  }
  // Straddles zero.
  Dyadic up_neg = detail::pow_positive(abs(x.lo()), n, bits, Round::Up);
  Dyadic up_pos = detail::pow_positive(x.hi(), n, bits, Round::Up);
  if (even) return {Dyadic(0), max(up_neg, up_pos), bits};
  return {neg(up_neg), up_pos, bits};
}

inline DyadicInterval sqrt(const DyadicInterval& x, Precision bits) {
  if (x.lo().sign() < 0) throw std::domain_error("sqrt of interval with negative part");
  return {sqrt(x.lo(), bits, Round::Down), sqrt(x.hi(), bits, Round::Up), bits};
}

/// k-th root of a nonnegative interval.
inline DyadicInterval rootn(const DyadicInterval& x, unsigned long k, Precision bits) {
  if (x.lo().sign() < 0) throw std::domain_error("rootn of interval with negative part");
  Dyadic lo = Dyadic::zero(bits);
  Dyadic hi = Dyadic::zero(bits);
  mpfr_rootn_ui(lo.get(), x.lo().get(), k, MPFR_RNDD);
  mpfr_rootn_ui(hi.get(), x.hi().get(), k, MPFR_RNDU);
  return {std::move(lo), std::move(hi), bits};
}

inline DyadicInterval pi(Precision bits) {
  Dyadic lo = Dyadic::zero(bits);
  Dyadic hi = Dyadic::zero(bits);
  mpfr_const_pi(lo.get(), MPFR_RNDD);
  mpfr_const_pi(hi.get(), MPFR_RNDU);
  return {std::move(lo), std::move(hi), bits};
}

inline DyadicInterval two_pi(Precision bits) { return ldexp(pi(bits), 1); }

/// cos over an interval.  Endpoint values are correctly rounded; interior
/// extrema at multiples of pi are added whenever a certified enclosure of
/// j*pi meets the argument interval.
inline DyadicInterval cos(const DyadicInterval& x, Precision bits) {
  const DyadicInterval pi_enc = pi(bits + 16);
  const DyadicInterval two_pi_enc = ldexp(pi_enc, 1);
  if (compare(x.width(), two_pi_enc.lo()) >= 0) {
    return {Dyadic(-1), Dyadic(1), bits};
  }
  auto cos_at = [bits](const Dyadic& t, Round r) {
    Dyadic out = Dyadic::zero(bits);
    mpfr_cos(out.get(), t.get(), to_mpfr(r));
    return out;
  };
  Dyadic lo = min(cos_at(x.lo(), Round::Down), cos_at(x.hi(), Round::Down));
  Dyadic hi = max(cos_at(x.lo(), Round::Up), cos_at(x.hi(), Round::Up));

  Dyadic q_lo = div(x.lo(), pi_enc.hi(), 64, Round::Down);
  const long j0 = mpfr_get_si(q_lo.get(), MPFR_RNDD) - 2;
  Dyadic q_hi = div(x.hi(), pi_enc.lo(), 64, Round::Up);
  const long j1 = mpfr_get_si(q_hi.get(), MPFR_RNDU) + 2;
  for (long j = j0; j <= j1; ++j) {
    DyadicInterval jp = mul(DyadicInterval::point(j), pi_enc, bits + 80);
    if (!jp.intersects(x)) continue;
    if (j % 2 == 0) {
      hi = Dyadic(1);
    } else {
      lo = Dyadic(-1);
    }
  }
  if (compare(lo, -1L) < 0) lo = Dyadic(-1);
  if (compare(hi, 1L) > 0) hi = Dyadic(1);
  return {std::move(lo), std::move(hi), bits};
}

inline DyadicInterval sin(const DyadicInterval& x, Precision bits) {
  const DyadicInterval half_pi = ldexp(pi(bits + 16), -1);
  return cos(sub(x, half_pi, bits + 16), bits);
}

/// Argument of the complex numbers in the rectangle re x im.  Exact corner
/// evaluation is valid when the rectangle avoids the closed negative real
/// axis; otherwise [-pi, pi] is returned.
inline DyadicInterval atan2(const DyadicInterval& im, const DyadicInterval& re, Precision bits) {
  const bool crosses_cut = re.lo().sign() <= 0 && im.contains_zero();
  if (crosses_cut) {
    DyadicInterval p = pi(bits);
    return {neg(p.hi()), p.hi(), bits};
  }
  std::optional<Dyadic> lo, hi;
  const Dyadic* ys[2] = {&im.lo(), &im.hi()};
  const Dyadic* xs[2] = {&re.lo(), &re.hi()};
  for (const Dyadic* y : ys) {
    for (const Dyadic* x : xs) {
      Dyadic d = Dyadic::zero(bits);
      Dyadic u = Dyadic::zero(bits);
      mpfr_atan2(d.get(), y->get(), x->get(), MPFR_RNDD);
      mpfr_atan2(u.get(), y->get(), x->get(), MPFR_RNDU);
      if (!lo || compare(d, *lo) < 0) lo = std::move(d);
      if (!hi || compare(u, *hi) > 0) hi = std::move(u);
    }
  }
  return {std::move(*lo), std::move(*hi), bits};
}

/// Rectangular complex interval.
struct ComplexInterval {
  DyadicInterval re;
  DyadicInterval im;

  static ComplexInterval point(const Dyadic& re, const Dyadic& im) {
    return {DyadicInterval::point(re), DyadicInterval::point(im)};
  }
  static ComplexInterval real(const DyadicInterval& re) {
    return {re, DyadicInterval::point(0)};
  }

  Precision bits() const { return join_bits(re, im); }
  ComplexInterval conj() const { return {re, neg(im)}; }
  bool contains(const Dyadic& x, const Dyadic& y) const { return re.contains(x) && im.contains(y); }
  bool contains_zero() const { return re.contains_zero() && im.contains_zero(); }
  ComplexInterval mid() const { return point(re.mid(), im.mid()); }
};

inline ComplexInterval add(const ComplexInterval& a, const ComplexInterval& b, Precision p) {
  return {add(a.re, b.re, p), add(a.im, b.im, p)};
}
inline ComplexInterval sub(const ComplexInterval& a, const ComplexInterval& b, Precision p) {
  return {sub(a.re, b.re, p), sub(a.im, b.im, p)};
}
inline ComplexInterval mul(const ComplexInterval& a, const ComplexInterval& b, Precision p) {
  return {sub(mul(a.re, b.re, p), mul(a.im, b.im, p), p),
          add(mul(a.re, b.im, p), mul(a.im, b.re, p), p)};
}
inline ComplexInterval mul(const ComplexInterval& a, const DyadicInterval& s, Precision p) {
  return {mul(a.re, s, p), mul(a.im, s, p)};
}
/// |z|^2
inline DyadicInterval norm(const ComplexInterval& z, Precision p) {
  return add(square(z.re, p), square(z.im, p), p);
}
inline DyadicInterval abs(const ComplexInterval& z, Precision p) {
  return sqrt(norm(z, p), p);
}
inline ComplexInterval div(const ComplexInterval& a, const ComplexInterval& b, Precision p) {
  const DyadicInterval n = norm(b, p);
  const ComplexInterval num = mul(a, b.conj(), p);
  return {div(num.re, n, p), div(num.im, n, p)};
}
inline ComplexInterval pow(const ComplexInterval& z, std::uint64_t n, Precision p) {
  ComplexInterval result = ComplexInterval::real(DyadicInterval::point(1).with_bits(p));
  ComplexInterval base = z;
  while (n > 0) {
    if (n & 1U) result = mul(result, base, p);
    n >>= 1U;
    if (n > 0) base = mul(base, base, p);
  }
  return result;
}
inline DyadicInterval arg(const ComplexInterval& z, Precision p) { return atan2(z.im, z.re, p); }

}  // namespace sidontail
