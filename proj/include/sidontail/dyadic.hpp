#pragma once

// Dyadic rationals m * 2^e backed by MPFR.  Every MPFR value with a finite
// exponent is exactly such a number, so MPFR's directed rounding gives us
// bit-exact outward rounding for interval endpoints.

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace sidontail {

using Precision = mpfr_prec_t;

enum class Round { Down, Up, Nearest };

inline mpfr_rnd_t to_mpfr(Round r) noexcept {
  switch (r) {
    case Round::Down: return MPFR_RNDD;
    case Round::Up: return MPFR_RNDU;
    case Round::Nearest: return MPFR_RNDN;
  }
  return MPFR_RNDN;
}

inline Round opposite(Round r) noexcept {
  return r == Round::Down ? Round::Up : (r == Round::Up ? Round::Down : r);
}

inline Precision clamp_precision(Precision p) noexcept {
  return std::clamp<Precision>(p, MPFR_PREC_MIN, MPFR_PREC_MAX);
}

/// Number of bits needed to hold |z| (0 for z == 0).
inline Precision bit_length(const mpz_class& z) {
  return z == 0 ? 0 : static_cast<Precision>(mpz_sizeinbase(z.get_mpz_t(), 2));
}

class Dyadic {
 public:
  Dyadic() {
    mpfr_init2(v_, 64);
    mpfr_set_zero(v_, 1);
  }

  /// Exact conversion of a machine integer.
  explicit Dyadic(long value) {
    mpfr_init2(v_, 64);
    mpfr_set_si(v_, value, MPFR_RNDN);
  }

  /// Zero with room for `prec` mantissa bits.
  static Dyadic zero(Precision prec) {
    Dyadic d;
    mpfr_set_prec(d.v_, clamp_precision(prec));
    mpfr_set_zero(d.v_, 1);
    return d;
  }

  Dyadic(const Dyadic& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }

  Dyadic(Dyadic&& other) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, other.v_);
  }

  Dyadic& operator=(const Dyadic& other) {
    if (this != &other) {
      mpfr_set_prec(v_, mpfr_get_prec(other.v_));
      mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
  }

  Dyadic& operator=(Dyadic&& other) noexcept {
    mpfr_swap(v_, other.v_);
    return *this;
  }

  ~Dyadic() { mpfr_clear(v_); }

  /// Exact conversion of an integer.
  static Dyadic from_integer(const mpz_class& z) {
    Dyadic d = zero(std::max<Precision>(bit_length(z), 2));
    mpfr_set_z(d.v_, z.get_mpz_t(), MPFR_RNDN);
    return d;
  }

  /// Exact m * 2^exp.
  static Dyadic from_mantissa(const mpz_class& m, long exp) {
    Dyadic d = from_integer(m);
    mpfr_mul_2si(d.v_, d.v_, exp, MPFR_RNDN);
    return d;
  }

  /// Rounded conversion of a rational.
  static Dyadic from_rational(const mpq_class& q, Precision prec, Round r) {
    Dyadic d = zero(prec);
    mpfr_set_q(d.v_, q.get_mpq_t(), to_mpfr(r));
    return d;
  }

  static Dyadic from_double(double x) {
    Dyadic d = zero(53);
    mpfr_set_d(d.v_, x, MPFR_RNDN);
    return d;
  }

  /// Parses a decimal (or 0x-prefixed hex) literal, rounding in direction r.
  static Dyadic parse(std::string_view text, Precision prec, Round r) {
    Dyadic d = zero(prec);
    std::string s(text);
    if (mpfr_set_str(d.v_, s.c_str(), 0, to_mpfr(r)) != 0) {
      throw std::invalid_argument("cannot parse number: " + s);
    }
    return d;
  }

  mpfr_srcptr get() const noexcept { return v_; }
  mpfr_ptr get() noexcept { return v_; }

  Precision prec() const noexcept { return mpfr_get_prec(v_); }
  int sign() const noexcept { return mpfr_sgn(v_); }
  bool is_zero() const noexcept { return mpfr_zero_p(v_) != 0; }
  bool is_integer() const noexcept { return mpfr_integer_p(v_) != 0; }
  double to_double(Round r = Round::Nearest) const {
    return mpfr_get_d(v_, to_mpfr(r));
  }

  /// Binary exponent: |x| in [2^(e-1), 2^e).  Zero maps to a very small value.
  long exponent() const noexcept {
    return is_zero() ? std::numeric_limits<int>::min() / 2
                     : static_cast<long>(mpfr_get_exp(v_));
  }

  /// Exponent of the least significant set bit.
  long lsb_exponent() const noexcept {
    if (is_zero()) return std::numeric_limits<int>::max() / 2;
    return exponent() - static_cast<long>(mpfr_min_prec(v_));
  }

  /// Decomposition x = m * 2^e with odd m (or m = 0).
  std::pair<mpz_class, long> mantissa_exponent() const {
    mpz_class m;
    if (is_zero()) return {m, 0};
    long e = mpfr_get_z_2exp(m.get_mpz_t(), v_);
    const auto tz = static_cast<long>(mpz_scan1(m.get_mpz_t(), 0));
    mpz_fdiv_q_2exp(m.get_mpz_t(), m.get_mpz_t(), static_cast<mp_bitcnt_t>(tz));
    return {m, e + tz};
  }

  mpz_class floor() const {
    mpz_class z;
    mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDD);
    return z;
  }

  mpz_class ceil() const {
    mpz_class z;
    mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDU);
    return z;
  }

  /// Exact re-precision: widens the mantissa if needed so no bits are lost.
  Dyadic with_precision(Precision prec, Round r = Round::Nearest) const {
    Dyadic d = zero(prec);
    mpfr_set(d.v_, v_, to_mpfr(r));
    return d;
  }

  /// Shortest-ish decimal rendering with `digits` significant digits
  /// (0 = enough to round-trip at the current precision).
  std::string to_string(int digits = 0, Round r = Round::Nearest) const {
    if (is_zero()) return "0";
    const int nd = digits > 0
                       ? digits
                       : static_cast<int>(prec() * 0.30103) + 2;
    char* buf = nullptr;
    std::string fmt = "%." + std::to_string(nd) + "R*g";
    mpfr_asprintf(&buf, fmt.c_str(), to_mpfr(r), v_);
    std::string out(buf);
    mpfr_free_str(buf);
    return out;
  }

  /// Exact rendering "m*2^e" (or plain integer).
  std::string to_exact_string() const {
    auto [m, e] = mantissa_exponent();
    if (e == 0 || m == 0) return m.get_str();
    return m.get_str() + "*2^" + std::to_string(e);
  }

  friend int compare(const Dyadic& a, const Dyadic& b) noexcept {
    return mpfr_cmp(a.v_, b.v_);
  }
  friend bool operator==(const Dyadic& a, const Dyadic& b) noexcept {
    return mpfr_equal_p(a.v_, b.v_) != 0;
  }
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) noexcept {
    const int c = mpfr_cmp(a.v_, b.v_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }
  friend int compare(const Dyadic& a, long b) noexcept { return mpfr_cmp_si(a.v_, b); }
  friend int compare(const Dyadic& a, const mpz_class& b) noexcept {
    return mpfr_cmp_z(a.v_, b.get_mpz_t());
  }
  friend int compare(const Dyadic& a, const mpq_class& b) noexcept {
    return mpfr_cmp_q(a.v_, b.get_mpq_t());
  }

 private:
  mpfr_t v_;
};

// Rounded arithmetic at an explicit target precision.

inline Dyadic add(const Dyadic& a, const Dyadic& b, Precision p, Round r) {
  Dyadic out = Dyadic::zero(p);
  mpfr_add(out.get(), a.get(), b.get(), to_mpfr(r));
  return out;
}
inline Dyadic sub(const Dyadic& a, const Dyadic& b, Precision p, Round r) {
  Dyadic out = Dyadic::zero(p);
  mpfr_sub(out.get(), a.get(), b.get(), to_mpfr(r));
  return out;
}
inline Dyadic mul(const Dyadic& a, const Dyadic& b, Precision p, Round r) {
  Dyadic out = Dyadic::zero(p);
  mpfr_mul(out.get(), a.get(), b.get(), to_mpfr(r));
  return out;
}
inline Dyadic div(const Dyadic& a, const Dyadic& b, Precision p, Round r) {
  Dyadic out = Dyadic::zero(p);
  mpfr_div(out.get(), a.get(), b.get(), to_mpfr(r));
  return out;
}
inline Dyadic sqrt(const Dyadic& a, Precision p, Round r) {
  Dyadic out = Dyadic::zero(p);
  mpfr_sqrt(out.get(), a.get(), to_mpfr(r));
  return out;
}
inline Dyadic neg(const Dyadic& a) {
  Dyadic out = Dyadic::zero(a.prec());
  mpfr_neg(out.get(), a.get(), MPFR_RNDN);
  return out;
}
inline Dyadic abs(const Dyadic& a) {
  Dyadic out = Dyadic::zero(a.prec());
  mpfr_abs(out.get(), a.get(), MPFR_RNDN);
  return out;
}
/// a * 2^e, exact.
inline Dyadic ldexp(const Dyadic& a, long e) {
  Dyadic out(a);
  mpfr_mul_2si(out.get(), out.get(), e, MPFR_RNDN);
  return out;
}

namespace detail {
inline Precision exact_sum_precision(const Dyadic& a, const Dyadic& b) {
  if (a.is_zero()) return std::max<Precision>(b.prec(), 2);
  if (b.is_zero()) return std::max<Precision>(a.prec(), 2);
  const long hi = std::max(a.exponent(), b.exponent()) + 1;
  const long lo = std::min(a.lsb_exponent(), b.lsb_exponent());
  return clamp_precision(static_cast<Precision>(hi - lo + 1));
}
}  // namespace detail

inline Dyadic exact_add(const Dyadic& a, const Dyadic& b) {
  return add(a, b, detail::exact_sum_precision(a, b), Round::Nearest);
}
inline Dyadic exact_sub(const Dyadic& a, const Dyadic& b) {
  return sub(a, b, detail::exact_sum_precision(a, b), Round::Nearest);
}
inline Dyadic exact_mul(const Dyadic& a, const Dyadic& b) {
  const Precision p = static_cast<Precision>(mpfr_min_prec(a.get()) + mpfr_min_prec(b.get()));
  return mul(a, b, clamp_precision(std::max<Precision>(p, 2)), Round::Nearest);
}
inline Dyadic midpoint(const Dyadic& a, const Dyadic& b) {
  return ldexp(exact_add(a, b), -1);
}

inline const Dyadic& min(const Dyadic& a, const Dyadic& b) { return compare(a, b) <= 0 ? a : b; }
inline const Dyadic& max(const Dyadic& a, const Dyadic& b) { return compare(a, b) >= 0 ? a : b; }

/// Exponent of 2^e as a Dyadic.
inline Dyadic pow2(long e) { return Dyadic::from_mantissa(mpz_class(1), e); }

}  // namespace sidontail
