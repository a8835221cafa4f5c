#pragma once

// Real algebraic numbers as (integer polynomial, isolating interval) plus
// certified complex enclosures of the full conjugate spectrum.

#include <sidontail/certreal.hpp>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace sidontail {

enum class Irreducibility { Verified, Assumed, Unknown };

class AlgebraicReal {
 public:
  /// Throws NotIsolating unless `iso` holds exactly one real root of `min_poly`.
  AlgebraicReal(IntPolynomial min_poly, DyadicInterval iso, std::string label = {},
                Irreducibility irreducibility = Irreducibility::Unknown)
      : poly_(std::move(min_poly)),
        iso_(std::move(iso)),
        label_(std::move(label)),
        irreducibility_(irreducibility),
        cache_(std::make_shared<Cache>()) {
    if (poly_.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "AlgebraicReal");
    square_free_ = square_free_part(poly_);
    if (sturm_count_closed(square_free_, iso_.lo(), iso_.hi()) != 1) {
      throw Error(ErrorCode::NotIsolating, "AlgebraicReal: " + iso_.to_string() + " for " + poly_.to_string("t"));
    }
  }

  const IntPolynomial& min_poly() const noexcept { return poly_; }
  const IntPolynomial& square_free_poly() const noexcept { return square_free_; }
  const DyadicInterval& iso() const noexcept { return iso_; }
  const std::string& label() const noexcept { return label_; }
  Irreducibility irreducibility() const noexcept { return irreducibility_; }

  /// Enclosure of width <= 2^-bits inside iso.  Results are cached per bit
  /// count; concurrent callers may both compute, and the first insert wins.
  DyadicInterval enclosure(Precision bits) const {
    DyadicInterval start = iso_;
    {
      std::lock_guard<std::mutex> lock(cache_->mutex);
      auto it = cache_->entries.lower_bound(bits);
      if (it != cache_->entries.end()) return it->second;
      if (it != cache_->entries.begin()) start = std::prev(it)->second;
    }
    DyadicInterval refined = detail::refine_square_free(square_free_, start, bits);
    std::lock_guard<std::mutex> lock(cache_->mutex);
    return cache_->entries.emplace(bits, std::move(refined)).first->second;
  }

  double to_double() const { return enclosure(64).mid().to_double(); }

 private:
  struct Cache {
    std::mutex mutex;
    std::map<Precision, DyadicInterval> entries;
  };

  IntPolynomial poly_;
  IntPolynomial square_free_;
  DyadicInterval iso_;
  std::string label_;
  Irreducibility irreducibility_;
  std::shared_ptr<Cache> cache_;
};

namespace detail {

/// Rational root test: a monic polynomial of degree 2 or 3 with no integer
/// root is irreducible over Q.
inline bool small_monic_irreducible(const IntPolynomial& p) {
  if (!p.is_monic() || p.degree() < 2 || p.degree() > 3) return false;
  mpz_class c0 = abs(p.coeff(0));
  if (c0 == 0) return false;
  for (mpz_class d = 1; d * d <= c0; ++d) {
    if (c0 % d != 0) continue;
    for (const mpz_class& cand : {d, mpz_class(c0 / d)}) {
      if (p.eval_integer(cand) == 0 || p.eval_integer(-cand) == 0) return false;
    }
  }
  return true;
}

inline IntPolynomial k_fibonacci_polynomial(int k) {
  std::vector<mpz_class> c(static_cast<std::size_t>(k) + 1, -1);
  c[static_cast<std::size_t>(k)] = 1;
  return IntPolynomial(std::move(c));
}

}  // namespace detail

/// The real root of t^3 - t - 1.
inline AlgebraicReal plastic_constant() {
  IntPolynomial p{-1, -1, 0, 1};
  const Irreducibility irr =
      detail::small_monic_irreducible(p) ? Irreducibility::Verified : Irreducibility::Unknown;
  return AlgebraicReal(std::move(p), {Dyadic::from_mantissa(5, -2), Dyadic::from_mantissa(3, -1)}, "plastic", irr);
}

/// The real root in (1, 2) of x^k - x^(k-1) - ... - x - 1.  Irreducibility is
/// a known result for this family and is flagged as assumed.
inline AlgebraicReal k_fibonacci_root(int k) {
  if (k < 2) throw Error(ErrorCode::BadDegree, "k_fibonacci_root: k >= 2 required");
  IntPolynomial f = detail::k_fibonacci_polynomial(k);
  // 2 - root is about 2^-k, so shrink [1, 2] until both ends are strictly inside.
  DyadicInterval iso = detail::refine_square_free(f, {Dyadic(1), Dyadic(2)}, k + 4);
  return AlgebraicReal(std::move(f), std::move(iso), "kfib:" + std::to_string(k), Irreducibility::Assumed);
}

/// Positive real k-th root of a > 0, with polynomial min_poly(a)(t^k).
inline AlgebraicReal kth_root(const AlgebraicReal& a, int k) {
  if (k < 2) throw Error(ErrorCode::BadDegree, "kth_root: k >= 2 required");
  IntPolynomial q = a.min_poly().compose_power(static_cast<unsigned>(k));
  const IntPolynomial q_sf = square_free_part(q);
  for (Precision bits = 32; bits <= 4096; bits *= 2) {
    const DyadicInterval e = a.enclosure(bits);
    if (!e.positive()) {
      if (e.hi().sign() <= 0) throw std::invalid_argument("kth_root: a must be positive");
      continue;
    }
    DyadicInterval r = rootn(e, static_cast<unsigned long>(k), bits + 8);
    if (sturm_count_closed(q_sf, r.lo(), r.hi()) == 1) {
      const std::string label = a.label().empty() ? std::string() : a.label() + "^(1/" + std::to_string(k) + ")";
      return AlgebraicReal(std::move(q), std::move(r), label, Irreducibility::Unknown);
    }
  }
  throw Error(ErrorCode::PrecisionExhausted, "kth_root: could not isolate the positive root");
}

struct ConjugateSpectrum {
  std::vector<ComplexInterval> roots;
  std::vector<bool> is_real;
  std::vector<DyadicInterval> moduli;
  std::vector<DyadicInterval> arguments;  // in [-pi, pi]
  std::size_t dominant_index = 0;
  // Upper half-plane member of the non-dominant non-real pair of maximal modulus.
  std::optional<std::size_t> pair_index;
  bool pair_is_unique = false;
  std::optional<DyadicInterval> dominant_pair_modulus;   // rho (|alpha| for the plastic case)
  std::optional<DyadicInterval> dominant_pair_argument;  // omega
  std::optional<DyadicInterval> second_modulus;          // rho_2
  Precision bits = 0;

  std::size_t degree() const noexcept { return roots.size(); }

  /// Dominant modulus certified > 1 and every other modulus certified < 1.
  bool unit_disk_separated() const {
    for (std::size_t i = 0; i < roots.size(); ++i) {
      const int c = i == dominant_index ? compare(moduli[i].lo(), 1L) : -compare(moduli[i].hi(), 1L);
      if (c <= 0) return false;
    }
    return true;
  }

  /// Vieta check: lc * prod (x - z_i) encloses every coefficient of p.
  bool reconstructs(const IntPolynomial& p) const {
    const Precision w = bits + 64;
    std::vector<ComplexInterval> c{ComplexInterval::real(DyadicInterval::from_integer(p.leading()))};
    for (const auto& z : roots) {
      std::vector<ComplexInterval> next(c.size() + 1, ComplexInterval::real(DyadicInterval::point(0)));
      for (std::size_t i = 0; i < c.size(); ++i) {
        next[i + 1] = add(next[i + 1], c[i], w);
        next[i] = sub(next[i], mul(c[i], z, w), w);
      }
      c = std::move(next);
    }
    if (static_cast<int>(c.size()) != p.degree() + 1) return false;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (!c[i].re.contains(Dyadic::from_integer(p.coeff(i))) || !c[i].im.contains(Dyadic(0))) return false;
    }
    return true;
  }
};

namespace detail {

inline std::vector<std::complex<double>> aberth_double(const IntPolynomial& p) {
  const int n = p.degree();
  std::vector<double> c(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) c[i] = mpz_class(p.coeff(i)).get_d() / p.leading().get_d();
  double radius = 0;
  for (int i = 0; i < n; ++i) radius = std::max(radius, std::pow(std::abs(c[i]), 1.0 / (n - i)));
  radius = std::max(radius, 0.5);
  std::vector<std::complex<double>> z(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) z[k] = std::polar(radius, 2 * M_PI * k / n + 0.4);
  auto eval = [&](std::complex<double> x, std::complex<double>& d) {
    std::complex<double> v = c[n];
    d = 0;
    for (int i = n - 1; i >= 0; --i) {
      d = d * x + v;
      v = v * x + c[i];
    }
    return v;
  };
  for (int it = 0; it < 2000; ++it) {
    double worst = 0;
    for (int k = 0; k < n; ++k) {
      std::complex<double> d;
      const std::complex<double> v = eval(z[k], d);
      if (v == 0.0) continue;
      const std::complex<double> ratio = v / d;
      std::complex<double> s = 0;
      for (int j = 0; j < n; ++j) {
        if (j != k) s += 1.0 / (z[k] - z[j]);
      }
      const std::complex<double> w = ratio / (1.0 - ratio * s);
      z[k] -= w;
      worst = std::max(worst, std::abs(w) / std::max(1.0, std::abs(z[k])));
    }
    if (worst < 1e-15) break;
  }
  return z;
}

inline ComplexInterval complex_point(const Dyadic& re, const Dyadic& im, Precision w) {
  return ComplexInterval::point(re.with_precision(w), im.with_precision(w));
}

struct Disk {
  Dyadic re, im;
  Dyadic radius;
};

/// Squared distance lower bound between centres versus (r1 + r2)^2.
inline bool disks_apart(const Dyadic& re1, const Dyadic& im1, const Dyadic& r1, const Disk& b, Precision w) {
  const ComplexInterval d = sub(complex_point(re1, im1, w), complex_point(b.re, b.im, w), w);
  const Dyadic dist2 = norm(d, w).lo();
  const Dyadic rr = add(r1, b.radius, w, Round::Up);
  return compare(dist2, mul(rr, rr, w, Round::Up)) > 0;
}

inline std::optional<ConjugateSpectrum> try_certify(const AlgebraicReal& a, const std::vector<std::complex<double>>& seed,
                                                    Precision target_bits, Precision w) {
  const IntPolynomial& p = a.square_free_poly();
  const IntPolynomial dp = p.derivative();
  const int n = p.degree();

  // Newton polish at working precision.
  std::vector<std::pair<Dyadic, Dyadic>> z;
  for (const auto& s : seed) z.emplace_back(Dyadic::from_double(s.real()).with_precision(w), Dyadic::from_double(s.imag()).with_precision(w));
  int iterations = 3;
  for (Precision have = 40; have < w; have *= 2) ++iterations;
  for (auto& [re, im] : z) {
    for (int it = 0; it < iterations; ++it) {
      const ComplexInterval x = complex_point(re, im, w);
      const ComplexInterval d = p.eval(x, w);
      const ComplexInterval dd = dp.eval(x, w);
      if (dd.contains_zero()) break;
      const ComplexInterval step = div(d, dd, w).mid();
      re = sub(re, step.re.mid(), w, Round::Nearest);
      im = sub(im, step.im.mid(), w, Round::Nearest);
    }
  }

  // Weierstrass inclusion radii n |W_i|.
  std::vector<Disk> disks;
  const DyadicInterval lc = DyadicInterval::from_integer(p.leading());
  for (int i = 0; i < n; ++i) {
    const ComplexInterval zi = complex_point(z[i].first, z[i].second, w);
    ComplexInterval prod = ComplexInterval::real(lc);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      prod = mul(prod, sub(zi, complex_point(z[j].first, z[j].second, w), w), w);
    }
    if (prod.contains_zero()) return std::nullopt;
    const DyadicInterval wi = abs(div(p.eval(zi, w), prod, w), w);
    disks.push_back({z[i].first, z[i].second, mul(wi.hi(), Dyadic(n), w, Round::Up)});
  }
  const Dyadic target = pow2(-static_cast<long>(target_bits));
  for (const auto& d : disks) {
    if (compare(d.radius, target) > 0) return std::nullopt;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!disks_apart(disks[i].re, disks[i].im, disks[i].radius, disks[j], w)) return std::nullopt;
    }
  }

  ConjugateSpectrum s;
  s.bits = target_bits;
  std::vector<int> half(n, 0);  // +1 upper, -1 lower, 0 real
  for (int i = 0; i < n; ++i) {
    const Disk& d = disks[i];
    if (compare(abs(d.im), d.radius) > 0) {
      half[i] = d.im.sign();
      continue;
    }
    // The conjugate of the root in D_i lies in conj(D_i); if that meets no
    // other disk, the root is its own conjugate.
    const Dyadic cim = neg(d.im);
    for (int j = 0; j < n; ++j) {
      if (j != i && !disks_apart(d.re, cim, d.radius, disks[j], w)) return std::nullopt;
    }
  }

  const DyadicInterval dom = a.enclosure(target_bits);
  std::optional<std::size_t> dom_index;
  for (int i = 0; i < n; ++i) {
    const Disk& d = disks[i];
    const DyadicInterval re_box(sub(d.re, d.radius, w, Round::Down), add(d.re, d.radius, w, Round::Up), w);
    const DyadicInterval im_box(sub(d.im, d.radius, w, Round::Down), add(d.im, d.radius, w, Round::Up), w);
    if (half[i] == 0) {
      s.roots.push_back(ComplexInterval::real(re_box));
      s.is_real.push_back(true);
      s.moduli.push_back(abs(re_box));
      s.arguments.push_back(re_box.positive() ? DyadicInterval::point(0) : pi(w));
      if (re_box.intersects(dom)) {
        if (dom_index) return std::nullopt;
        dom_index = static_cast<std::size_t>(i);
      }
    } else {
      const ComplexInterval box{re_box, im_box};
      const DyadicInterval centre = abs(complex_point(d.re, d.im, w), w);
      s.roots.push_back(box);
      s.is_real.push_back(false);
      s.moduli.emplace_back(sub(centre.lo(), d.radius, w, Round::Down), add(centre.hi(), d.radius, w, Round::Up), w);
      s.arguments.push_back(arg(box, w));
    }
  }
  if (!dom_index) return std::nullopt;
  s.dominant_index = *dom_index;
  s.roots[s.dominant_index] = ComplexInterval::real(dom);
  s.moduli[s.dominant_index] = abs(dom);

  // Pairwise disjoint boxes.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (s.roots[i].re.intersects(s.roots[j].re) && s.roots[i].im.intersects(s.roots[j].im)) return std::nullopt;
    }
  }

  // Dominant non-real pair and the second modulus.
  std::optional<std::size_t> best;
  for (int i = 0; i < n; ++i) {
    if (half[i] <= 0) continue;
    if (!best || compare(s.moduli[i].mid(), s.moduli[*best].mid()) > 0) best = static_cast<std::size_t>(i);
  }
  if (best) {
    s.pair_index = best;
    s.dominant_pair_modulus = s.moduli[*best];
    s.dominant_pair_argument = s.arguments[*best];
    s.pair_is_unique = true;
    std::optional<Dyadic> r2_lo, r2_hi;
    const Dyadic conj_im = neg(disks[*best].im);
    for (int i = 0; i < n; ++i) {
      if (static_cast<std::size_t>(i) == s.dominant_index || static_cast<std::size_t>(i) == *best) continue;
      // Skip the conjugate partner: the disk meeting conj(D_best).
      if (half[i] < 0 && !disks_apart(disks[*best].re, conj_im, disks[*best].radius, disks[i], w)) continue;
      if (compare(s.moduli[*best].lo(), s.moduli[i].hi()) <= 0) s.pair_is_unique = false;
      if (!r2_lo || compare(s.moduli[i].lo(), *r2_lo) > 0) r2_lo = s.moduli[i].lo();
      if (!r2_hi || compare(s.moduli[i].hi(), *r2_hi) > 0) r2_hi = s.moduli[i].hi();
    }
    if (r2_lo) s.second_modulus = DyadicInterval(*r2_lo, *r2_hi, w);
  }
  return s;
}

}  // namespace detail

/// Certified disjoint enclosures (boxes of width <= 2^(1-bits)) of every
/// complex root of a's polynomial.  Throws PrecisionExhausted if separation
/// fails up to `max_bits` working precision.
inline ConjugateSpectrum conjugate_spectrum(const AlgebraicReal& a, Precision bits, Precision max_bits = Precision{1} << 16) {
  if (bits < 1) throw std::invalid_argument("conjugate_spectrum: bits must be positive");
  const IntPolynomial& p = a.square_free_poly();
  if (p.degree() != a.min_poly().degree()) throw std::invalid_argument("conjugate_spectrum: polynomial is not square-free");
  const auto seed = detail::aberth_double(p);
  Precision work = bits + 2 * bit_length(mpz_class(p.degree())) + 48;
  const Precision cap = std::max(max_bits, work);
  for (;;) {
    if (auto s = detail::try_certify(a, seed, bits, work)) return *s;
    if (work >= cap) break;
    work = std::min(cap, 2 * work);
  }
  throw Error(ErrorCode::PrecisionExhausted, "conjugate_spectrum: roots not separated");
}

/// beta^k (2 - beta), which equals 1 for every root of the k-Fibonacci polynomial.
inline ComplexInterval modulus_equation(int k, const ComplexInterval& beta, Precision bits) {
  const ComplexInterval two = ComplexInterval::real(DyadicInterval::point(2));
  return mul(pow(beta, static_cast<std::uint64_t>(k), bits), sub(two, beta, bits), bits);
}

/// Enclosure of arg(2 - beta) for the dominant pair of a k-Fibonacci spectrum.
inline DyadicInterval two_minus_beta_argument(const ConjugateSpectrum& s, Precision bits) {
  if (!s.pair_index) throw Error(ErrorCode::WindowViolation, "spectrum has no non-real pair");
  const ComplexInterval two = ComplexInterval::real(DyadicInterval::point(2));
  return arg(sub(two, s.roots[*s.pair_index], bits), bits);
}

/// delta = k omega mod 2 pi, computed as -arg(2 - beta) from the modulus
/// equation.  Throws WindowViolation unless beta^k (2 - beta) encloses 1 and
/// the enclosure lies in (0, pi/2).
inline DyadicInterval shift_angle(int k, const ConjugateSpectrum& s) {
  const Precision bits = std::max<Precision>(s.bits, 64) + 16;
  if (!s.pair_index) throw Error(ErrorCode::WindowViolation, "spectrum has no non-real pair");
  const ComplexInterval one = modulus_equation(k, s.roots[*s.pair_index], bits);
  if (!one.re.contains(1L) || !one.im.contains(0L)) {
    throw Error(ErrorCode::WindowViolation, "modulus equation fails for k = " + std::to_string(k));
  }
  const DyadicInterval delta = neg(two_minus_beta_argument(s, bits));
  const DyadicInterval half_pi = ldexp(pi(bits), -1);
  if (!delta.positive() || !delta.certainly_less(half_pi)) {
    throw Error(ErrorCode::WindowViolation, "shift angle " + delta.to_string() + " not inside (0, pi/2)");
  }
  return delta;
}

}  // namespace sidontail
