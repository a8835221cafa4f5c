#pragma once

// Integer polynomials: exact sign evaluation at dyadic points, interval
// Horner evaluation with outward rounding, and the exact algebra needed for
// square-free reduction and Sturm sequences.

#include <sidontail/error.hpp>
#include <sidontail/interval.hpp>

#include <gmpxx.h>

#include <cstdint>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

namespace sidontail {

class IntPolynomial {
 public:
  IntPolynomial() = default;

  /// Coefficients in ascending degree order.
  explicit IntPolynomial(std::vector<mpz_class> coefficients) : c_(std::move(coefficients)) { trim(); }
  IntPolynomial(std::initializer_list<long> coefficients) {
    for (long v : coefficients) c_.emplace_back(v);
    trim();
  }

  static IntPolynomial monomial(std::size_t degree, const mpz_class& coeff = 1) {
    std::vector<mpz_class> c(degree + 1);
    c[degree] = coeff;
    return IntPolynomial(std::move(c));
  }

  /// -1 for the zero polynomial.
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const noexcept { return c_.empty(); }
  const std::vector<mpz_class>& coefficients() const noexcept { return c_; }
  const mpz_class& coeff(std::size_t i) const {
    static const mpz_class zero = 0;
    return i < c_.size() ? c_[i] : zero;
  }
  const mpz_class& leading() const { return c_.back(); }
  bool is_monic() const { return !c_.empty() && c_.back() == 1; }

  IntPolynomial derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<mpz_class> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<unsigned long>(i);
    return IntPolynomial(std::move(d));
  }

  /// p(t^k).
  IntPolynomial compose_power(unsigned k) const {
    if (is_zero()) return {};
    std::vector<mpz_class> out((c_.size() - 1) * k + 1);
    for (std::size_t i = 0; i < c_.size(); ++i) out[i * k] = c_[i];
    return IntPolynomial(std::move(out));
  }

  /// gcd of the coefficients (positive; 0 for the zero polynomial).
  mpz_class content() const {
    mpz_class g = 0;
    for (const auto& v : c_) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    return g;
  }

  /// Divides out the content and makes the leading coefficient positive.
  IntPolynomial primitive() const {
    if (is_zero()) return {};
    mpz_class g = content();
    if (leading() < 0) g = -g;
    std::vector<mpz_class> out(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) mpz_divexact(out[i].get_mpz_t(), c_[i].get_mpz_t(), g.get_mpz_t());
    return IntPolynomial(std::move(out));
  }

  /// Exact sign of p(x) at a dyadic point.
  int sign_at(const Dyadic& x) const {
    if (is_zero()) return 0;
    auto [m, e] = x.mantissa_exponent();
    if (e >= 0) {
      mpz_class xi = m;
      mpz_mul_2exp(xi.get_mpz_t(), xi.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
      return sgn(eval_integer(xi));
    }
    // p(m / 2^s) * 2^(s*deg) = sum c_i m^i 2^(s (deg - i)).
    const auto s = static_cast<mp_bitcnt_t>(-e);
    mpz_class acc = c_.back();
    mpz_class term;
    for (std::size_t k = c_.size() - 1; k-- > 0;) {
      acc *= m;
      term = c_[k];
      mpz_mul_2exp(term.get_mpz_t(), term.get_mpz_t(), s * (c_.size() - 1 - k));
      acc += term;
    }
    return sgn(acc);
  }

  mpz_class eval_integer(const mpz_class& x) const {
    mpz_class acc = 0;
    for (std::size_t k = c_.size(); k-- > 0;) acc = acc * x + c_[k];
    return acc;
  }

  mpq_class eval_rational(const mpq_class& x) const {
    mpq_class acc = 0;
    for (std::size_t k = c_.size(); k-- > 0;) acc = acc * x + mpq_class(c_[k]);
    return acc;
  }

  /// Horner evaluation with outward rounding at `bits`.
  DyadicInterval eval(const DyadicInterval& x, Precision bits) const {
    if (is_zero()) return DyadicInterval::point(0);
    DyadicInterval acc = DyadicInterval::from_integer(c_.back());
    for (std::size_t k = c_.size() - 1; k-- > 0;) {
      acc = add(mul(acc, x, bits), DyadicInterval::from_integer(c_[k]), bits);
    }
    return acc;
  }

  ComplexInterval eval(const ComplexInterval& z, Precision bits) const {
    if (is_zero()) return ComplexInterval::real(DyadicInterval::point(0));
    ComplexInterval acc = ComplexInterval::real(DyadicInterval::from_integer(c_.back()));
    for (std::size_t k = c_.size() - 1; k-- > 0;) {
      acc = mul(acc, z, bits);
      acc.re = add(acc.re, DyadicInterval::from_integer(c_[k]), bits);
    }
    return acc;
  }

  double eval_double(double x) const {
    double acc = 0;
    for (std::size_t k = c_.size(); k-- > 0;) acc = acc * x + c_[k].get_d();
    return acc;
  }

  std::string to_string(const std::string& var = "x") const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t k = c_.size(); k-- > 0;) {
      const mpz_class& v = c_[k];
      if (v == 0) continue;
      mpz_class mag = v < 0 ? mpz_class(-v) : v;
      if (!first) os << (v < 0 ? " - " : " + ");
      else if (v < 0) os << "-";
      if (mag != 1 || k == 0) os << mag.get_str();
      if (k >= 1) os << var;
      if (k >= 2) os << "^" << k;
      first = false;
    }
    return os.str();
  }

  friend bool operator==(const IntPolynomial& a, const IntPolynomial& b) { return a.c_ == b.c_; }

  friend IntPolynomial operator+(const IntPolynomial& a, const IntPolynomial& b) {
    std::vector<mpz_class> out(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.coeff(i) + b.coeff(i);
    return IntPolynomial(std::move(out));
  }
  friend IntPolynomial operator-(const IntPolynomial& a, const IntPolynomial& b) {
    std::vector<mpz_class> out(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.coeff(i) - b.coeff(i);
    return IntPolynomial(std::move(out));
  }
  friend IntPolynomial operator-(const IntPolynomial& a) {
    std::vector<mpz_class> out(a.c_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = -a.c_[i];
    return IntPolynomial(std::move(out));
  }
  friend IntPolynomial operator*(const IntPolynomial& a, const IntPolynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<mpz_class> out(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i] == 0) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
    }
    return IntPolynomial(std::move(out));
  }
  friend IntPolynomial operator*(const mpz_class& s, const IntPolynomial& a) {
    std::vector<mpz_class> out(a.c_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * a.c_[i];
    return IntPolynomial(std::move(out));
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }

  std::vector<mpz_class> c_;
};

/// Pseudo-remainder with a positive multiplier |lc(b)|^(deg a - deg b + 1),
/// so the sign structure of a mod b is preserved.
inline IntPolynomial positive_pseudo_remainder(const IntPolynomial& a, const IntPolynomial& b) {
  if (b.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "pseudo-remainder by zero");
  if (a.degree() < b.degree()) return a;
  std::vector<mpz_class> r = a.coefficients();
  const int db = b.degree();
  const mpz_class& lb = b.leading();
  mpz_class lb_abs = lb < 0 ? mpz_class(-lb) : lb;
  const int sgn_lb = lb < 0 ? -1 : 1;
  int steps = a.degree() - db + 1;
  for (int d = a.degree(); d >= db; --d) {
    mpz_class q = r[d];
    for (auto& v : r) v *= lb_abs;
    --steps;
    if (q != 0) {
      // r -= sgn(lb) * q * x^(d-db) * b.
      for (int i = 0; i <= db; ++i) {
        r[d - db + i] -= sgn_lb * q * b.coeff(i);
      }
    }
    r.resize(d);
  }
  while (steps-- > 0) {
    for (auto& v : r) v *= lb_abs;
  }
  return IntPolynomial(std::move(r));
}

/// Exact quotient a / b over Q, returned as a primitive integer polynomial.
/// Requires b | a over Q.
inline IntPolynomial exact_quotient_primitive(const IntPolynomial& a, const IntPolynomial& b) {
  if (b.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "division by zero polynomial");
  std::vector<mpq_class> r(a.coefficients().begin(), a.coefficients().end());
  const int db = b.degree();
  const int dq = a.degree() - db;
  if (dq < 0) return {};
  std::vector<mpq_class> q(static_cast<std::size_t>(dq) + 1);
  const mpq_class lb(b.leading());
  for (int d = a.degree(); d >= db; --d) {
    mpq_class t = r[d] / lb;
    q[d - db] = t;
    for (int i = 0; i <= db; ++i) r[d - db + i] -= t * mpq_class(b.coeff(i));
  }
  mpz_class den = 1;
  for (auto& v : q) {
    v.canonicalize();
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), v.get_den_mpz_t());
  }
  std::vector<mpz_class> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    mpq_class s = q[i] * mpq_class(den);
    out[i] = s.get_num();
  }
  return IntPolynomial(std::move(out)).primitive();
}

/// Primitive gcd over Q[x] via the primitive remainder sequence.
inline IntPolynomial polynomial_gcd(IntPolynomial a, IntPolynomial b) {
  if (a.is_zero()) return b.primitive();
  if (b.is_zero()) return a.primitive();
  a = a.primitive();
  b = b.primitive();
  if (a.degree() < b.degree()) std::swap(a, b);
  while (!b.is_zero()) {
    IntPolynomial r = positive_pseudo_remainder(a, b);
    a = std::move(b);
    b = r.is_zero() ? IntPolynomial{} : r.primitive();
  }
  return a.primitive();
}

/// p / gcd(p, p'): same real roots, all simple.
inline IntPolynomial square_free_part(const IntPolynomial& p) {
  if (p.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "square-free part of zero");
  if (p.degree() <= 0) return p.primitive();
  IntPolynomial g = polynomial_gcd(p, p.derivative());
  if (g.degree() == 0) return p.primitive();
  return exact_quotient_primitive(p, g);
}

/// Sturm chain p, p', -rem(p, p'), ... with content removed at each step.
inline std::vector<IntPolynomial> sturm_sequence(const IntPolynomial& p) {
  if (p.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "Sturm sequence of zero");
  std::vector<IntPolynomial> seq{p.primitive()};
  if (p.degree() == 0) return seq;
  seq.push_back(p.derivative().primitive());
  while (true) {
    IntPolynomial r = positive_pseudo_remainder(seq[seq.size() - 2], seq.back());
    if (r.is_zero()) break;
    mpz_class g = r.content();
    std::vector<mpz_class> c = r.coefficients();
    for (auto& v : c) {
      mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
      v = -v;
    }
    seq.emplace_back(std::move(c));
  }
  return seq;
}

inline int sign_variations_at(const std::vector<IntPolynomial>& seq, const Dyadic& x) {
  int count = 0;
  int last = 0;
  for (const auto& s : seq) {
    const int v = s.sign_at(x);
    if (v == 0) continue;
    if (last != 0 && v != last) ++count;
    last = v;
  }
  return count;
}

/// Number of distinct real roots in the half-open interval (a, b].
inline int sturm_count(const std::vector<IntPolynomial>& seq, const Dyadic& a, const Dyadic& b) {
  return sign_variations_at(seq, a) - sign_variations_at(seq, b);
}

/// Distinct real roots in the closed interval [a, b].
inline int sturm_count_closed(const IntPolynomial& p, const Dyadic& a, const Dyadic& b) {
  const auto seq = sturm_sequence(p);
  return sturm_count(seq, a, b) + (p.sign_at(a) == 0 ? 1 : 0);
}

/// 2^s * p(x) + m for the dyadic shift c = m * 2^(-s): the integer polynomial
/// with the same roots as p(x) + c.
inline IntPolynomial shifted_by_dyadic(const IntPolynomial& p, const Dyadic& c) {
  auto [m, e] = c.mantissa_exponent();
  if (e >= 0) {
    mpz_class shift = m;
    mpz_mul_2exp(shift.get_mpz_t(), shift.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
    return p + IntPolynomial(std::vector<mpz_class>{shift});
  }
  mpz_class scale = 1;
  mpz_mul_2exp(scale.get_mpz_t(), scale.get_mpz_t(), static_cast<mp_bitcnt_t>(-e));
  return scale * p + IntPolynomial(std::vector<mpz_class>{m});
}

}  // namespace sidontail
