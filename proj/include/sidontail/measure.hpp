#pragma once

// Exact and sampled mechanics of the almost-everywhere argument (thresholds,
// slope certificates, sublevel bounds for P_{u,v,w}(y) = 1 + y^u - y^w - y^v,
// Monte Carlo decay of the bad sets), plus orbit statistics and the angular
// windows used by the collision patterns.

#include <sidontail/sidon.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <random>
#include <thread>
#include <vector>

namespace sidontail {

struct BadSetConfig {
  mpq_class delta{1, 2};
  std::uint64_t d_lo = 1, d_hi = 40;
  std::uint64_t sample_count = 10000;
  std::uint64_t rng_seed = 42;
  std::uint64_t scan_depth = 60;
  unsigned threads = 0;  // 0 = hardware concurrency

  mpq_class beta() const { return mpq_class(1) / (1 + delta); }
  static mpq_class alpha_sub() { return mpq_class(1, 2); }

  /// Sampling needs I_delta = [1 + delta, 2) nonempty.
  void validate_for_sampling() const {
    if (delta <= 0 || delta >= 1) throw std::invalid_argument("BadSetConfig: need 0 < delta < 1");
    if (d_lo < 1 || d_lo > d_hi || d_hi > scan_depth) throw std::invalid_argument("BadSetConfig: need 1 <= d_lo <= d_hi <= scan_depth");
    if (sample_count == 0) throw std::invalid_argument("BadSetConfig: sample_count must be positive");
  }
};

struct Thresholds {
  std::uint64_t D0 = 0;
  std::uint64_t V = 0;
  std::vector<std::uint64_t> U;  // U[v - 1] for v = 1 .. V - 1
  std::uint64_t U_star = 0;

  std::uint64_t U_of(std::uint64_t v) const { return U.at(v - 1); }
};

namespace detail {

inline mpq_class qpow(const mpq_class& b, std::uint64_t e) {
  mpq_class r = 1;
  for (std::uint64_t i = 0; i < e; ++i) r *= b;
  return r;
}

/// m_v = (v/2) (1/2)^(v-1) = v 2^-v
inline mpq_class slope_margin(std::uint64_t v) {
  mpq_class m(static_cast<unsigned long>(v));
  mpq_div_2exp(m.get_mpq_t(), m.get_mpq_t(), static_cast<mp_bitcnt_t>(v));
  return m;
}

inline IntPolynomial p_uvw(std::uint64_t u, std::uint64_t v, std::uint64_t w) {
  return IntPolynomial{1} + IntPolynomial::monomial(u) - IntPolynomial::monomial(w) - IntPolynomial::monomial(v);
}

inline void check_uvw(std::uint64_t u, std::uint64_t v, std::uint64_t w) {
  if (!(1 <= v && v <= w && w <= u)) throw std::invalid_argument("need 1 <= v <= w <= u");
}

}  // namespace detail

/// Least D0 with 2 beta^D0 <= 1/4, least V with beta^V <= 1/8, and for each
/// v < V the least U(v) with u beta^(u-1) <= (v/4) alpha^(v-1) for all u >= U(v).
inline Thresholds thresholds(const BadSetConfig& config) {
  if (config.delta <= 0) throw std::invalid_argument("thresholds: delta must be positive");
  const mpq_class beta = config.beta();
  const mpq_class alpha = BadSetConfig::alpha_sub();
  Thresholds t;
  mpq_class p = beta;
  for (t.D0 = 1; 2 * p > mpq_class(1, 4); ++t.D0) p *= beta;
  p = beta;
  for (t.V = 1; p > mpq_class(1, 8); ++t.V) p *= beta;
  for (std::uint64_t v = 1; v < t.V; ++v) {
    const mpq_class target = mpq_class(static_cast<unsigned long>(v), 4) * detail::qpow(alpha, v - 1);
    // g(u) = u beta^(u-1) starts at g(1) = 1 > target, rises to its peak and then
    // decreases, so the first u with g(u) <= target bounds every later u too.
    mpq_class b = 1;  // beta^(u-1)
    std::uint64_t u = 1;
    while (mpq_class(static_cast<unsigned long>(u)) * b > target) {
      b *= beta;
      ++u;
    }
    t.U.push_back(u);
    t.U_star = std::max(t.U_star, u);
  }
  return t;
}

struct SlopeCertificate {
  mpq_class m_v;
  std::size_t pieces = 0;
};

/// Certifies P'_{u,v,w}(y) <= -m_v on [alpha, beta] by interval evaluation of
/// the derivative on an adaptive subdivision.  Throws NotCertified on failure.
inline SlopeCertificate slope_certificate(std::uint64_t u, std::uint64_t v, std::uint64_t w, const BadSetConfig& config,
                                          int max_depth = 40) {
  detail::check_uvw(u, v, w);
  const Thresholds th = thresholds(config);
  if (v >= th.V) throw std::invalid_argument("slope_certificate: v must be below V");
  if (u < th.U_of(v)) throw std::invalid_argument("slope_certificate: u must be at least U(v)");
  const IntPolynomial dp = detail::p_uvw(u, v, w).derivative();
  SlopeCertificate cert;
  cert.m_v = detail::slope_margin(v);
  const Precision bits = 128;
  const Dyadic neg_m = neg(Dyadic::from_rational(cert.m_v, bits, Round::Nearest));  // m_v is dyadic
  const DyadicInterval beta = DyadicInterval::from_rational(config.beta(), bits);
  struct Piece {
    DyadicInterval y;
    int depth;
  };
  std::vector<Piece> stack{{{Dyadic::from_mantissa(1, -1), beta.hi()}, 0}};
  while (!stack.empty()) {
    Piece piece = std::move(stack.back());
    stack.pop_back();
    if (compare(dp.eval(piece.y, bits).hi(), neg_m) <= 0) {
      ++cert.pieces;
      continue;
    }
    if (piece.depth >= max_depth) {
      throw Error(ErrorCode::NotCertified, "slope bound not certified for (u,v,w) = (" + std::to_string(u) + "," +
                                               std::to_string(v) + "," + std::to_string(w) + ")");
    }
    auto [a, b] = piece.y.bisect();
    stack.push_back({std::move(a), piece.depth + 1});
    stack.push_back({std::move(b), piece.depth + 1});
  }
  return cert;
}

enum class BoundRegime { Slope, SmallU, LargeV };

struct SublevelBound {
  DyadicInterval exact_measure;
  mpq_class bound;
  bool ok = false;
  BoundRegime regime = BoundRegime::Slope;
};

/// Enclosure of the measure of {y in (alpha, beta] : |P(y)| < eps} for
/// rational beta and eps, using monotonicity in both from dyadic brackets.
inline DyadicInterval sublevel_measure_rational(const IntPolynomial& p, const mpq_class& beta, const mpq_class& eps,
                                                Precision bits = 128) {
  const Dyadic a = Dyadic::from_mantissa(1, -1);
  const Dyadic b_lo = Dyadic::from_rational(beta, bits, Round::Down);
  const Dyadic b_hi = Dyadic::from_rational(beta, bits, Round::Up);
  const Dyadic e_lo = Dyadic::from_rational(eps, bits, Round::Down);
  const Dyadic e_hi = Dyadic::from_rational(eps, bits, Round::Up);
  const DyadicInterval lo = sublevel_measure(p, {a, b_lo}, e_lo, bits);
  const DyadicInterval hi = b_lo == b_hi && e_lo == e_hi ? lo : sublevel_measure(p, {a, b_hi}, e_hi, bits);
  return {lo.lo(), hi.hi()};
}

/// Exact sublevel measure at eps = 2 beta^d against the applicable bound:
/// C_v beta^d with C_v = 4 / m_v when u >= U(v); 4 (beta^d)^(1/U*) otherwise
/// (Polya's lemma for a polynomial with leading coefficient +-1 and degree <= U*,
/// i.e. K* = 4 * 2^(-1/U*)); and 0 when v >= V.
inline SublevelBound sublevel_vs_bound(std::uint64_t u, std::uint64_t v, std::uint64_t w, std::uint64_t d,
                                       const BadSetConfig& config) {
  detail::check_uvw(u, v, w);
  const Thresholds th = thresholds(config);
  if (d < th.D0) throw std::invalid_argument("sublevel_vs_bound: need d >= D0");
  const mpq_class beta = config.beta();
  const mpq_class beta_d = detail::qpow(beta, d);
  SublevelBound out;
  out.exact_measure = sublevel_measure_rational(detail::p_uvw(u, v, w), beta, 2 * beta_d);
  if (v >= th.V) {
    out.regime = BoundRegime::LargeV;
    out.bound = 0;
    out.ok = out.exact_measure.hi().is_zero();
    return out;
  }
  if (u >= th.U_of(v)) {
    out.regime = BoundRegime::Slope;
    out.bound = 4 * beta_d / detail::slope_margin(v);
  } else {
    out.regime = BoundRegime::SmallU;
    const Precision bits = 128;
    const Dyadic bd = Dyadic::from_rational(beta_d, bits, Round::Up);
    Dyadic root = Dyadic::zero(bits);
    mpfr_rootn_ui(root.get(), bd.get(), static_cast<unsigned long>(th.U_star), MPFR_RNDU);
    mpq_class r;
    mpfr_get_q(r.get_mpq_t(), root.get());  // a dyadic upper bound, so exact
    out.bound = 4 * r;
  }
  out.ok = compare(out.exact_measure.hi(), out.bound) <= 0;
  return out;
}

struct DecayPoint {
  std::uint64_t d = 0;
  std::uint64_t hit_count = 0;
  std::uint64_t sample_count = 0;
  double estimated_measure = 0;
};

struct DecayCurve {
  std::vector<DecayPoint> points;
  double fitted_log_slope = 0;
  double slope_stderr = 0;
  std::uint64_t excluded_samples = 0;  // precision failures
  // Samples whose largest collision index is exactly i (index 0: no collision).
  std::vector<std::uint64_t> largest_index_histogram;

  /// Fraction of all samples whose largest collision index is >= t (t >= 1).
  double fraction_largest_at_least(std::uint64_t t) const {
    std::uint64_t total = 0, hit = 0;
    for (std::size_t i = 0; i < largest_index_histogram.size(); ++i) {
      total += largest_index_histogram[i];
      if (i >= t && i > 0) hit += largest_index_histogram[i];
    }
    return total == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(total);
  }
};

namespace detail {

/// Uniform dyadic sample in [lo, hi) from one per-sample stream.
inline Dyadic sample_dyadic(std::mt19937_64& rng, const mpq_class& lo, const mpq_class& hi) {
  for (;;) {
    const std::uint64_t r = rng() >> 11;  // 53 bits
    mpq_class t(mpz_class(static_cast<unsigned long>(r)), mpz_class(1) << 53);
    const Dyadic x = Dyadic::from_rational(lo + (hi - lo) * t, 64, Round::Nearest);
    if (compare(x, lo) >= 0 && compare(x, hi) < 0) return x;
  }
}

struct SampleOutcome {
  std::uint64_t largest = 0;  // 0: no collision
  std::vector<bool> has_top;  // has_top[d]: some collision with largest index exactly d
  bool excluded = false;
};

inline SampleOutcome run_sample(const BadSetConfig& cfg, std::uint64_t i) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.rng_seed), static_cast<std::uint32_t>(cfg.rng_seed >> 32),
                    static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
  std::mt19937_64 rng(seq);
  SampleOutcome out;
  out.has_top.assign(cfg.scan_depth + 1, false);
  const Dyadic x = sample_dyadic(rng, 1 + cfg.delta, mpq_class(2));
  try {
    const FloorPowerSequence s = floor_power_sequence(Base::dyadic(x), 1, cfg.scan_depth);
    for (const auto& c : find_collisions(s, 1, cfg.scan_depth).collisions) {
      out.has_top[c.indices[3]] = true;
      out.largest = std::max(out.largest, c.indices[3]);
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::PrecisionExhausted) throw;
    out.excluded = true;
  }
  return out;
}

inline std::pair<double, double> least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  if (xs.size() < 2) return {0.0, 0.0};
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  if (xs.size() < 3) return {slope, 0.0};
  double rss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (my + slope * (xs[i] - mx));
    rss += r * r;
  }
  return {slope, std::sqrt(rss / (n - 2) / sxx)};
}

}  // namespace detail

/// Seeded Monte Carlo estimate of lambda(E_d), attributing each collision to
/// its largest index d, with a least-squares fit of ln(estimate) against d.
/// Sample i uses its own generator seeded from (seed, i), so results do not
/// depend on the thread count.
inline DecayCurve scan_bad_measure(const BadSetConfig& config) {
  config.validate_for_sampling();
  unsigned threads = config.threads ? config.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, config.sample_count));

  struct Tally {
    std::vector<std::uint64_t> per_d, hist;
    std::uint64_t excluded = 0;
  };
  std::vector<Tally> tallies(threads);
  auto work = [&](unsigned t) {
    Tally& tally = tallies[t];
    tally.per_d.assign(config.scan_depth + 1, 0);
    tally.hist.assign(config.scan_depth + 1, 0);
    for (std::uint64_t i = t; i < config.sample_count; i += threads) {
      const auto s = detail::run_sample(config, i);
      if (s.excluded) {
        ++tally.excluded;
        continue;
      }
      ++tally.hist[s.largest];
      for (std::uint64_t d = 1; d <= config.scan_depth; ++d) tally.per_d[d] += s.has_top[d] ? 1 : 0;
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }

  DecayCurve curve;
  std::vector<std::uint64_t> per_d(config.scan_depth + 1, 0);
  curve.largest_index_histogram.assign(config.scan_depth + 1, 0);
  for (const auto& t : tallies) {
    curve.excluded_samples += t.excluded;
    for (std::size_t d = 0; d <= config.scan_depth; ++d) {
      per_d[d] += t.per_d[d];
      curve.largest_index_histogram[d] += t.hist[d];
    }
  }
  const std::uint64_t used = config.sample_count - curve.excluded_samples;
  const double length = mpq_class(1 - config.delta).get_d();
  std::vector<double> xs, ys;
  for (std::uint64_t d = config.d_lo; d <= config.d_hi; ++d) {
    DecayPoint p{d, per_d[d], used, used ? static_cast<double>(per_d[d]) / static_cast<double>(used) * length : 0.0};
    if (p.hit_count > 0) {
      xs.push_back(static_cast<double>(d));
      ys.push_back(std::log(p.estimated_measure));
    }
    curve.points.push_back(p);
  }
  std::tie(curve.fitted_log_slope, curve.slope_stderr) = detail::least_squares(xs, ys);
  return curve;
}

inline void write_decay_csv(std::ostream& os, const DecayCurve& c) {
  os << "d,hit_count,sample_count,estimated_measure\n";
  char buf[64];
  for (const auto& p : c.points) {
    std::snprintf(buf, sizeof buf, "%.17g", p.estimated_measure);
    os << p.d << ',' << p.hit_count << ',' << p.sample_count << ',' << buf << '\n';
  }
}

/// Open arc (lo, hi) on a circle; endpoints are enclosures, hi - lo is less
/// than one full turn.
struct Arc {
  DyadicInterval lo;
  DyadicInterval hi;
};

inline Arc to_turns(const Arc& radians, Precision bits) {
  const DyadicInterval tp = two_pi(bits);
  return {div(radians.lo, tp, bits), div(radians.hi, tp, bits)};
}

enum class Membership { Inside, Outside, Undecided };

/// Membership of a point enclosure (in turns) in an arc (in turns).
inline Membership arc_membership(const DyadicInterval& p, const Arc& arc, Precision bits) {
  const DyadicInterval s = sub(p, arc.lo, bits);
  const DyadicInterval len = sub(arc.hi, arc.lo, bits);
  const mpz_class k = s.lo().floor();
  const DyadicInterval r = sub(s, DyadicInterval::from_integer(k), bits);
  if (compare(r.hi(), 1L) >= 0) return Membership::Undecided;
  if (r.lo().sign() > 0 && compare(r.hi(), len.lo()) < 0) return Membership::Inside;
  if (compare(r.lo(), len.hi()) >= 0 || r.hi().sign() <= 0) return Membership::Outside;
  return Membership::Undecided;
}

struct OrbitStats {
  DyadicInterval angle;  // turns
  Arc window;            // turns
  std::uint64_t N = 0;
  std::vector<std::uint64_t> visit_indices;
  std::vector<std::uint64_t> undecided_indices;
  double star_discrepancy = 0;
  double extreme_discrepancy = 0;

  double visit_fraction() const { return N ? static_cast<double>(visit_indices.size()) / static_cast<double>(N) : 0.0; }
};

/// Star and extreme discrepancy of points in [0, 1).
inline std::pair<double, double> discrepancies(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double star = 0, dmax = -1e300, dmin = 1e300;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double up = static_cast<double>(i + 1) / n;
    star = std::max({star, up - x[i], x[i] - static_cast<double>(i) / n});
    dmax = std::max(dmax, up - x[i]);
    dmin = std::min(dmin, up - x[i]);
  }
  return {star, x.empty() ? 0.0 : 1.0 / n + dmax - dmin};
}

/// Certified visits n in [1, N] of n theta mod 1 to the window (both in turns).
inline OrbitStats orbit_visits(const DyadicInterval& theta, const Arc& window, std::uint64_t N, Precision bits = 128) {
  if (!window.lo.certainly_less(window.hi)) throw std::invalid_argument("orbit_visits: window must be a nonempty arc");
  OrbitStats st;
  st.angle = theta;
  st.window = window;
  st.N = N;
  std::vector<double> points;
  points.reserve(N);
  const Precision w = bits + 2 * detail::log2_ceil(N) + 8;
  DyadicInterval p = DyadicInterval::point(0);
  const DyadicInterval th = theta.with_bits(w);
  for (std::uint64_t n = 1; n <= N; ++n) {
    p = add(p, th, w);
    // Keep the running point small: subtract whole turns exactly.
    const mpz_class k = p.lo().floor();
    if (k != 0) p = sub(p, DyadicInterval::from_integer(k), w);
    const double f = p.mid().to_double();
    points.push_back(f - std::floor(f));
    switch (arc_membership(p, window, w)) {
      case Membership::Inside: st.visit_indices.push_back(n); break;
      case Membership::Undecided: st.undecided_indices.push_back(n); break;
      case Membership::Outside: break;
    }
  }
  std::tie(st.star_discrepancy, st.extreme_discrepancy) = discrepancies(std::move(points));
  return st;
}

inline void write_orbit_csv(std::ostream& os, const OrbitStats& st) {
  os << "n,membership\n";
  std::size_t i = 0, j = 0;
  while (i < st.visit_indices.size() || j < st.undecided_indices.size()) {
    const bool take_visit = j >= st.undecided_indices.size() ||
                            (i < st.visit_indices.size() && st.visit_indices[i] < st.undecided_indices[j]);
    if (take_visit) os << st.visit_indices[i++] << ",inside\n";
    else os << st.undecided_indices[j++] << ",undecided\n";
  }
}

/// I(omega) = (5 pi / 2 - 3 omega, 7 pi / 2 - 4 omega), in radians.  Requires
/// omega in (3 pi / 4, 5 pi / 6) and verifies the four cosine signs at 100
/// interior points.
inline Arc plastic_window(const DyadicInterval& omega, Precision bits = 128) {
  const DyadicInterval p = pi(bits);
  const DyadicInterval lo_bound = mul(p, DyadicInterval::from_rational(mpq_class(3, 4), bits), bits);
  const DyadicInterval hi_bound = mul(p, DyadicInterval::from_rational(mpq_class(5, 6), bits), bits);
  if (!omega.certainly_greater(lo_bound) || !omega.certainly_less(hi_bound)) {
    throw Error(ErrorCode::WindowViolation, "omega " + omega.to_string() + " outside (3pi/4, 5pi/6)");
  }
  auto lin = [&](long a_num, long a_den, long b) {  // a pi - b omega
    return sub(mul(p, DyadicInterval::from_rational(mpq_class(a_num, a_den), bits), bits),
               mul(omega, DyadicInterval::point(b), bits), bits);
  };
  Arc arc{lin(5, 2, 3), lin(7, 2, 4)};
  if (!arc.lo.certainly_less(arc.hi)) throw Error(ErrorCode::EmptyWindow, "I(omega) is empty");
  const DyadicInterval len = sub(arc.hi, arc.lo, bits);
  for (int i = 0; i < 100; ++i) {
    const DyadicInterval f = DyadicInterval::from_rational(mpq_class(2 * i + 1, 200), bits);
    const DyadicInterval t = add(arc.lo, mul(len, f, bits), bits);
    const bool ok = cos(t, bits).positive() &&
                    cos(add(t, mul(omega, DyadicInterval::point(2), bits), bits), bits).positive() &&
                    cos(add(t, mul(omega, DyadicInterval::point(3), bits), bits), bits).negative() &&
                    cos(add(t, mul(omega, DyadicInterval::point(4), bits), bits), bits).negative();
    if (!ok) throw Error(ErrorCode::WindowViolation, "cosine signs fail inside I(omega)");
  }
  return arc;
}

struct KFibWindow {
  Arc J;             // radians
  DyadicInterval c0;  // sin(eta)
};

/// J = (-pi/2 + eta, pi/2 - (delta + omega) - eta) and c0 = sin(eta), for odd k >= 12.
inline KFibWindow kfib_window(int k, const DyadicInterval& omega, const DyadicInterval& delta, const DyadicInterval& eta,
                              Precision bits = 128) {
  if (k < 12 || k % 2 == 0) throw Error(ErrorCode::BadDegree, "kfib_window: odd k >= 12 required");
  const DyadicInterval p = pi(bits);
  const DyadicInterval half_pi = ldexp(p, -1);
  const DyadicInterval s = add(delta, omega, bits);
  if (!s.certainly_less(mul(p, DyadicInterval::from_rational(mpq_class(3, 4), bits), bits))) {
    throw Error(ErrorCode::WindowViolation, "delta + omega is not below 3pi/4");
  }
  if (!eta.positive() || !eta.certainly_less(ldexp(sub(p, s, bits), -2))) {
    throw Error(ErrorCode::EmptyWindow, "eta must lie in (0, (pi - (delta + omega)) / 4)");
  }
  KFibWindow out{{add(neg(half_pi), eta, bits), sub(sub(half_pi, s, bits), eta, bits)}, sin(eta, bits)};
  if (!out.J.lo.certainly_less(out.J.hi)) throw Error(ErrorCode::EmptyWindow, "J is empty");
  const DyadicInterval lo_ok = add(neg(half_pi), eta, bits);
  const DyadicInterval hi_ok = sub(half_pi, eta, bits);
  const DyadicInterval len = sub(out.J.hi, out.J.lo, bits);
  for (const auto& f : {mpq_class(1, 64), mpq_class(1, 2), mpq_class(63, 64)}) {
    const DyadicInterval t = add(out.J.lo, mul(len, DyadicInterval::from_rational(f, bits), bits), bits);
    for (const DyadicInterval& a : {t, add(t, delta, bits), add(t, s, bits)}) {
      if (!a.certainly_greater(lo_ok) || !a.certainly_less(hi_ok)) {
        throw Error(ErrorCode::WindowViolation, "angle sample leaves (-pi/2 + eta, pi/2 - eta)");
      }
    }
  }
  return out;
}

/// eta = (pi - (delta + omega)) / 8, the default inside the admissible range.
inline DyadicInterval default_eta(const DyadicInterval& omega, const DyadicInterval& delta, Precision bits = 128) {
  return ldexp(sub(pi(bits), add(delta, omega, bits), bits), -3);
}

/// Least n with (k - 3) (rho_2 / rho)^n <= c0, from certified upper bounds.
inline std::uint64_t en_tail_threshold(int k, const ConjugateSpectrum& s, const DyadicInterval& c0, Precision bits = 128) {
  if (!s.dominant_pair_modulus || !s.second_modulus) throw Error(ErrorCode::NotCertified, "spectrum lacks rho or rho_2");
  const DyadicInterval ratio = div(*s.second_modulus, *s.dominant_pair_modulus, bits);
  if (compare(ratio.hi(), 1L) >= 0) throw Error(ErrorCode::NotCertified, "rho_2 / rho is not certified below 1");
  DyadicInterval r = DyadicInterval::point(k - 3);
  for (std::uint64_t n = 0;; ++n) {
    if (compare(r.hi(), c0.lo()) <= 0) return n;
    r = mul(r, ratio, bits);
  }
}

struct EnSignCertificate {
  std::optional<int> sign;    // empty when the envelope straddles zero
  DyadicInterval enclosure;  // 2 rho^n cos(n omega) +- (k - 3) rho_2^n
};

/// Sign of E_n from the dominant pair and the envelope of the other k - 3 roots.
inline EnSignCertificate en_sign_certificate(int k, std::uint64_t n, const ConjugateSpectrum& s, Precision bits = 128) {
  if (!s.dominant_pair_modulus || !s.dominant_pair_argument || !s.second_modulus) {
    throw Error(ErrorCode::NotCertified, "spectrum lacks rho, omega or rho_2");
  }
  const Precision w = bits + 2 * detail::log2_ceil(n);
  const DyadicInterval nn = DyadicInterval::from_integer(mpz_class(static_cast<unsigned long>(n)));
  const DyadicInterval main = mul(ldexp(pow(*s.dominant_pair_modulus, n, w), 1), cos(mul(*s.dominant_pair_argument, nn, w), w), w);
  const Dyadic env = mul(Dyadic(std::max(0, k - 3)), pow(*s.second_modulus, n, w).hi(), w, Round::Up);
  EnSignCertificate c;
  c.enclosure = DyadicInterval(sub(main.lo(), env, w, Round::Down), add(main.hi(), env, w, Round::Up), w);
  if (int sg = c.enclosure.certified_sign(); sg != 0) c.sign = sg;
  return c;
}

}  // namespace sidontail
