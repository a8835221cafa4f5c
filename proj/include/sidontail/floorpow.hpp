#pragma once

// Certified floor-power sequences floor(x^n) by two routes: direct powering
// with precision escalation, and exact power-sum (trace) recurrences
// combined with the sign of the conjugate residual.

#include <sidontail/algnum.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace sidontail {

/// Either a real algebraic number or an exact dyadic value.
class Base {
 public:
  static Base algebraic(AlgebraicReal a) {
    Base b;
    b.label_ = a.label().empty() ? "root:" + a.min_poly().to_string("t") : a.label();
    b.alg_ = std::move(a);
    return b;
  }
  static Base dyadic(Dyadic x) {
    Base b;
    b.label_ = "dyadic:" + x.to_string();
    b.value_ = std::move(x);
    return b;
  }

  bool is_algebraic() const noexcept { return alg_.has_value(); }
  const AlgebraicReal& algebraic_value() const { return alg_.value(); }
  const Dyadic& dyadic_value() const { return value_; }
  const std::string& label() const noexcept { return label_; }

  /// Enclosure of width <= 2^-bits (a point for dyadic bases).
  DyadicInterval enclosure(Precision bits) const {
    return alg_ ? alg_->enclosure(bits) : DyadicInterval::point(value_);
  }

  double to_double() const { return enclosure(64).mid().to_double(); }

  /// Upper estimate of log2 x, used to size working precision.
  double log2_upper() const {
    return std::log2(std::max(1.0, enclosure(32).hi().to_double(Round::Up)));
  }

 private:
  Base() = default;
  std::optional<AlgebraicReal> alg_;
  Dyadic value_;
  std::string label_;
};

struct FloorPow {
  mpz_class value;
  Precision bits = 0;
  DyadicInterval power;  // encloses x^n
};

namespace detail {

inline void require_above_one(const Base& x) {
  if (compare(x.enclosure(64).hi(), 1L) <= 0 || compare(x.enclosure(256).lo(), 1L) <= 0) {
    throw std::invalid_argument("floor powers need a base x > 1");
  }
}

inline Precision log2_ceil(std::uint64_t n) {
  Precision b = 0;
  while ((std::uint64_t{1} << b) < n + 1 && b < 63) ++b;
  return b;
}

/// Working bits needed to resolve floor(x^n): the integer part plus guard bits.
inline double power_bits_estimate(const Base& x, std::uint64_t n) {
  return static_cast<double>(n) * x.log2_upper() + 32 + static_cast<double>(log2_ceil(n));
}

inline Precision first_useful_bits(const PrecisionPolicy& policy, double estimate) {
  Precision bits = policy.initial_bits;
  while (static_cast<double>(bits) < estimate && bits < policy.max_bits) {
    bits = std::min(policy.max_bits, policy.escalate(bits));
  }
  return bits;
}

inline std::optional<mpz_class> common_floor(const DyadicInterval& v) {
  mpz_class a = v.lo().floor();
  if (a == v.hi().floor()) return a;
  return std::nullopt;
}

}  // namespace detail

/// Exact floor(x^n), escalating precision per policy until the enclosure of
/// x^n has a single floor.  Throws PrecisionExhausted(n) at the cap.
inline FloorPow floor_pow(const Base& x, std::uint64_t n, const PrecisionPolicy& policy = {}) {
  policy.validate();
  detail::require_above_one(x);
  Precision bits = detail::first_useful_bits(policy, detail::power_bits_estimate(x, n));
  const Precision guard = detail::log2_ceil(n) + 8;
  for (;;) {
    const DyadicInterval e = x.enclosure(bits + guard);
    DyadicInterval pw = pow(e, n, bits + guard);
    if (auto a = detail::common_floor(pw)) return {std::move(*a), bits, std::move(pw)};
    if (bits >= policy.max_bits) {
      throw Error(ErrorCode::PrecisionExhausted, "floor_pow undecided at cap", static_cast<std::int64_t>(n));
    }
    bits = std::min(policy.max_bits, policy.escalate(bits));
  }
}

/// Prefix array of a_n = floor(x^n) for n in [start, start + size).
struct FloorPowerSequence {
  std::string base_label;
  std::uint64_t start = 0;
  std::vector<mpz_class> values;
  std::vector<DyadicInterval> frac_enclosures;  // theta_n = x^n - a_n
  std::vector<Precision> precision_log;

  std::uint64_t end() const noexcept { return start + values.size(); }  // one past the last index
  bool contains(std::uint64_t n) const noexcept { return n >= start && n < end(); }
  const mpz_class& at(std::uint64_t n) const {
    if (!contains(n)) throw std::out_of_range("FloorPowerSequence: index " + std::to_string(n));
    return values[n - start];
  }
};

/// Builds a_n for n in [n_lo, n_hi] incrementally at one working precision,
/// falling back to floor_pow for any index that stays ambiguous.
inline FloorPowerSequence floor_power_sequence(const Base& x, std::uint64_t n_lo, std::uint64_t n_hi,
                                               const PrecisionPolicy& policy = {}) {
  policy.validate();
  detail::require_above_one(x);
  if (n_lo > n_hi) throw std::invalid_argument("floor_power_sequence: empty range");
  FloorPowerSequence seq;
  seq.base_label = x.label();
  seq.start = n_lo;
  const std::size_t count = static_cast<std::size_t>(n_hi - n_lo + 1);
  seq.values.reserve(count);
  seq.frac_enclosures.reserve(count);
  seq.precision_log.reserve(count);

  // Each multiplication adds about one ulp of relative error, hence log2(n_hi) guard bits.
  const Precision bits = detail::first_useful_bits(policy, detail::power_bits_estimate(x, n_hi));
  const Precision work = bits + 2 * detail::log2_ceil(n_hi) + 8;
  const DyadicInterval e = x.enclosure(work);
  DyadicInterval pw = pow(e, n_lo, work);
  for (std::uint64_t n = n_lo;; ++n) {
    FloorPow fp;
    if (auto a = detail::common_floor(pw)) {
      fp = {std::move(*a), bits, pw};
    } else {
      PrecisionPolicy retry = policy;
      retry.initial_bits = std::min(policy.max_bits, policy.escalate(bits));
      fp = floor_pow(x, n, retry);
    }
    const Dyadic a = Dyadic::from_integer(fp.value);
    seq.frac_enclosures.emplace_back(exact_sub(fp.power.lo(), a), exact_sub(fp.power.hi(), a));
    seq.values.push_back(std::move(fp.value));
    seq.precision_log.push_back(fp.bits);
    if (n == n_hi) break;
    pw = mul(pw, e, work);
  }
  return seq;
}

/// Power sums T_n of all roots of a monic integer polynomial.
struct TraceSequence {
  IntPolynomial source_poly;
  std::vector<mpz_class> values;            // T_0, T_1, ...
  std::vector<mpz_class> recurrence_coeffs;  // T_n = sum_{i=1..k} c_i T_{n-i}

  int degree() const noexcept { return source_poly.degree(); }
  std::uint64_t size() const noexcept { return values.size(); }
  const mpz_class& at(std::uint64_t n) const {
    if (n >= values.size()) throw std::out_of_range("TraceSequence: index " + std::to_string(n));
    return values[n];
  }

  /// Appends T_n up to and including `up_to` by the companion recurrence.
  void extend(std::uint64_t up_to) {
    const std::size_t k = recurrence_coeffs.size();
    values.reserve(static_cast<std::size_t>(up_to) + 1);
    mpz_class t;
    while (values.size() <= up_to) {
      const std::size_t n = values.size();
      t = 0;
      for (std::size_t i = 1; i <= k; ++i) {
        if (recurrence_coeffs[i - 1] != 0) t += recurrence_coeffs[i - 1] * values[n - i];
      }
      values.push_back(t);
    }
  }
};

/// T_1..T_k by Newton's identities.  Throws NotMonic.
inline std::vector<mpz_class> trace_init_newton(const IntPolynomial& p) {
  if (!p.is_monic()) throw Error(ErrorCode::NotMonic, "trace_init_newton: " + p.to_string());
  const int k = p.degree();
  if (k < 1) throw Error(ErrorCode::BadDegree, "trace_init_newton: degree >= 1 required");
  // p = x^k + a_{k-1} x^{k-1} + ... + a_0
  auto a = [&](int i) -> const mpz_class& { return p.coeff(static_cast<std::size_t>(i)); };
  std::vector<mpz_class> s(static_cast<std::size_t>(k) + 1);
  for (int m = 1; m <= k; ++m) {
    mpz_class v = -m * a(k - m);
    for (int i = 1; i < m; ++i) v -= a(k - i) * s[m - i];
    s[m] = v;
  }
  return {s.begin() + 1, s.end()};
}

inline TraceSequence trace_sequence(const IntPolynomial& p, std::uint64_t up_to) {
  TraceSequence ts;
  ts.source_poly = p;
  const std::vector<mpz_class> init = trace_init_newton(p);
  const int k = p.degree();
  ts.values.push_back(mpz_class(k));
  ts.values.insert(ts.values.end(), init.begin(), init.end());
  for (int i = 1; i <= k; ++i) ts.recurrence_coeffs.push_back(-p.coeff(static_cast<std::size_t>(k - i)));
  ts.extend(up_to);
  ts.values.resize(std::max<std::size_t>(static_cast<std::size_t>(up_to) + 1, 1));
  return ts;
}

inline TraceSequence trace_extend(TraceSequence ts, std::uint64_t up_to) {
  ts.extend(up_to);
  return ts;
}

struct SignSequence {
  std::uint64_t start = 0;
  std::vector<std::uint8_t> bits;            // u_n
  std::vector<DyadicInterval> residual;      // encloses E_n = T_n - x^n
  std::vector<Precision> precision_log;

  std::uint64_t end() const noexcept { return start + bits.size(); }
  bool contains(std::uint64_t n) const noexcept { return n >= start && n < end(); }
  int u(std::uint64_t n) const {
    if (!contains(n)) throw std::out_of_range("SignSequence: index " + std::to_string(n));
    return bits[n - start];
  }
};

/// How E_n is enclosed.  Conjugates sums the n-th powers of the non-dominant
/// roots in polar form; DirectPower subtracts a direct enclosure of x^n from T_n.
enum class SignRoute { Conjugates, DirectPower };

namespace detail {

/// Upper bound 2 rho^n + max(deg - 3, 0) rho_2^n on |E_n|, where rho is the
/// largest non-dominant modulus and rho_2 the largest among the rest.
inline Dyadic residual_bound(const ConjugateSpectrum& s, std::uint64_t n, Precision bits) {
  const DyadicInterval rho = s.dominant_pair_modulus ? *s.dominant_pair_modulus : DyadicInterval::point(0);
  DyadicInterval top = rho;
  std::optional<DyadicInterval> rest = s.second_modulus;
  if (!s.pair_index) {
    // No non-real pair: take the largest and second largest moduli directly.
    std::vector<Dyadic> his;
    for (std::size_t i = 0; i < s.degree(); ++i) {
      if (i != s.dominant_index) his.push_back(s.moduli[i].hi());
    }
    std::sort(his.begin(), his.end(), [](const Dyadic& a, const Dyadic& b) { return compare(a, b) > 0; });
    top = his.empty() ? DyadicInterval::point(0) : DyadicInterval::point(his[0]);
    rest = his.size() > 1 ? std::optional<DyadicInterval>(DyadicInterval::point(his[1])) : std::nullopt;
  }
  Dyadic b = mul(Dyadic(2), pow(top, n, bits).hi(), bits, Round::Up);
  const long extra = std::max(0L, static_cast<long>(s.degree()) - 3);
  if (extra > 0 && rest) b = add(b, mul(Dyadic(extra), pow(*rest, n, bits).hi(), bits, Round::Up), bits, Round::Up);
  return b;
}

inline DyadicInterval conjugate_residual(const ConjugateSpectrum& s, std::uint64_t n, Precision bits) {
  DyadicInterval sum = DyadicInterval::point(0);
  const DyadicInterval nn = DyadicInterval::from_integer(mpz_class(static_cast<unsigned long>(n)));
  for (std::size_t j = 0; j < s.degree(); ++j) {
    if (j == s.dominant_index) continue;
    DyadicInterval term = s.is_real[j]
                              ? pow(s.roots[j].re, n, bits)
                              : mul(pow(s.moduli[j], n, bits), cos(mul(s.arguments[j], nn, bits), bits), bits);
    sum = add(sum, term, bits);
  }
  return sum;
}

}  // namespace detail

/// Least N1 with certified 2 rho^n + max(deg - 3, 0) rho_2^n < 1/10 (and so
/// for every larger n).  Throws NotCertified unless all non-dominant roots are
/// certified inside the unit disk.
inline std::uint64_t residual_threshold(const AlgebraicReal& x, const ConjugateSpectrum& s) {
  (void)x;
  for (std::size_t i = 0; i < s.degree(); ++i) {
    if (i != s.dominant_index && compare(s.moduli[i].hi(), 1L) >= 0) {
      throw Error(ErrorCode::NotCertified, "residual_threshold: a conjugate is not inside the unit disk");
    }
  }
  const mpq_class tenth(1, 10);
  for (std::uint64_t n = 1;; ++n) {
    if (compare(detail::residual_bound(s, n, 64), tenth) < 0) return n;
    if (n > (std::uint64_t{1} << 32)) throw Error(ErrorCode::NotCertified, "residual_threshold: no threshold found");
  }
}

/// u_n = [T_n > x^n] for n in [n_lo, n_hi], all n >= N1.  Precision is
/// escalated per index until the sign of E_n is certified.
inline SignSequence sign_sequence(const AlgebraicReal& x, const TraceSequence& ts, std::uint64_t n_lo, std::uint64_t n_hi,
                                  const PrecisionPolicy& policy = {}, SignRoute route = SignRoute::Conjugates) {
  policy.validate();
  if (n_lo > n_hi) throw std::invalid_argument("sign_sequence: empty range");
  if (ts.size() <= n_hi) throw std::invalid_argument("sign_sequence: trace sequence too short");
  std::map<Precision, ConjugateSpectrum> spectra;
  auto spectrum = [&](Precision bits) -> const ConjugateSpectrum& {
    auto it = spectra.find(bits);
    if (it == spectra.end()) it = spectra.emplace(bits, conjugate_spectrum(x, bits, std::max(policy.max_bits, bits))).first;
    return it->second;
  };
  const std::uint64_t n1 = residual_threshold(x, spectrum(policy.initial_bits));
  if (n_lo < n1) {
    throw std::invalid_argument("sign_sequence: n_lo = " + std::to_string(n_lo) + " is below N1 = " + std::to_string(n1));
  }
  const Base base = Base::algebraic(x);
  SignSequence out;
  out.start = n_lo;
  Precision bits = policy.initial_bits;
  if (route == SignRoute::Conjugates) bits = detail::first_useful_bits(policy, 2.0 * static_cast<double>(detail::log2_ceil(n_hi)) + 48);
  for (std::uint64_t n = n_lo; n <= n_hi; ++n) {
    Precision b = route == SignRoute::Conjugates ? bits
                                                 : detail::first_useful_bits(policy, detail::power_bits_estimate(base, n));
    for (;;) {
      DyadicInterval e;
      if (route == SignRoute::Conjugates) {
        e = detail::conjugate_residual(spectrum(b), n, b + detail::log2_ceil(n) + 16);
      } else {
        const Precision w = b + detail::log2_ceil(n) + 8;
        e = sub(DyadicInterval::from_integer(ts.at(n)), pow(x.enclosure(w), n, w), w);
      }
      if (int sg = e.certified_sign(); sg != 0) {
        out.bits.push_back(sg > 0 ? 1 : 0);
        out.residual.push_back(std::move(e));
        out.precision_log.push_back(b);
        break;
      }
      if (b >= policy.max_bits) {
        throw Error(ErrorCode::PrecisionExhausted, "sign of E_n undecided at cap", static_cast<std::int64_t>(n));
      }
      b = std::min(policy.max_bits, policy.escalate(b));
    }
  }
  return out;
}

/// One record per line: n,a_n,u_n,bits (u_n empty where undefined).
inline void write_sequence_csv(std::ostream& os, const FloorPowerSequence& seq, const SignSequence* signs = nullptr) {
  os << "n,a_n,u_n,bits\n";
  for (std::uint64_t n = seq.start; n < seq.end(); ++n) {
    os << n << ',' << seq.at(n).get_str() << ',';
    if (signs && signs->contains(n)) os << signs->u(n);
    os << ',' << seq.precision_log[n - seq.start] << '\n';
  }
}

}  // namespace sidontail
