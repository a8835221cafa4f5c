#include <sidontail/measure.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

using namespace sidontail;

namespace {

BadSetConfig with_delta(const mpq_class& d) {
  BadSetConfig c;
  c.delta = d;
  return c;
}

// Scans every u up to `cap` and returns one past the last failure of
// u beta^(u-1) <= target.
std::uint64_t u_threshold_oracle(const mpq_class& beta, const mpq_class& target, std::uint64_t cap) {
  std::uint64_t last_fail = 0;
  mpq_class b = 1;
  for (std::uint64_t u = 1; u <= cap; ++u) {
    if (mpq_class(static_cast<unsigned long>(u)) * b > target) last_fail = u;
    b *= beta;
  }
  return last_fail + 1;
}

double closed_form_measure(const mpq_class& beta, const mpq_class& eps, std::uint64_t v) {
  const double lo = std::max(0.5, std::pow(1.0 - eps.get_d(), 1.0 / static_cast<double>(v)));
  return std::max(0.0, beta.get_d() - lo);
}

}  // namespace

TEST(Thresholds, DeltaOne) {
  const Thresholds t = thresholds(with_delta(1));
  EXPECT_EQ(t.D0, 3U);
  EXPECT_EQ(t.V, 3U);
  ASSERT_EQ(t.U.size(), 2U);
  EXPECT_EQ(t.U_of(1), 6U);
  EXPECT_EQ(t.U_of(2), 6U);
  EXPECT_EQ(t.U_star, 6U);
}

TEST(Thresholds, MatchExhaustiveOracle) {
  for (const mpq_class& delta : {mpq_class(1, 10), mpq_class(1, 4), mpq_class(1, 2), mpq_class(3, 4)}) {
    const BadSetConfig cfg = with_delta(delta);
    const Thresholds t = thresholds(cfg);
    const mpq_class beta = cfg.beta();
    const double lb = std::log(beta.get_d());
    EXPECT_EQ(t.D0, static_cast<std::uint64_t>(std::ceil(std::log(1.0 / 8) / lb - 1e-12)));
    EXPECT_EQ(t.V, static_cast<std::uint64_t>(std::ceil(std::log(1.0 / 8) / lb - 1e-12)));
    for (std::uint64_t v = 1; v < t.V; ++v) {
      const mpq_class target = mpq_class(static_cast<unsigned long>(v), 4) / (mpz_class(1) << (v - 1));
      EXPECT_EQ(t.U_of(v), u_threshold_oracle(beta, target, 4000)) << "delta " << delta << " v " << v;
    }
  }
}

TEST(Thresholds, TenthFrozen) {
  const Thresholds t = thresholds(with_delta(mpq_class(1, 10)));
  EXPECT_EQ(t.D0, 22U);
  EXPECT_EQ(t.V, 22U);
  EXPECT_EQ(t.U_of(1), 59U);
  EXPECT_EQ(t.U_of(21), 184U);
  EXPECT_EQ(t.U_star, 184U);
}

TEST(Thresholds, RejectsNonPositiveDelta) {
  EXPECT_THROW(thresholds(with_delta(0)), std::invalid_argument);
  EXPECT_THROW(thresholds(with_delta(-1)), std::invalid_argument);
}

TEST(Slope, CertifiesAboveThreshold) {
  const BadSetConfig cfg = with_delta(mpq_class(1, 2));
  const Thresholds t = thresholds(cfg);
  for (std::uint64_t v = 1; v < t.V; ++v) {
    const std::uint64_t u = t.U_of(v);
    for (std::uint64_t w : {v, (v + u) / 2, u}) {
      const SlopeCertificate c = slope_certificate(u, v, w, cfg);
      EXPECT_EQ(c.m_v, mpq_class(static_cast<unsigned long>(v)) / (mpz_class(1) << v));
      EXPECT_GE(c.pieces, 1U);
    }
  }
}

TEST(Slope, GridOracleAgrees) {
  // P'(y) <= -m_v on a fine rational grid, for every certified triple.
  const BadSetConfig cfg = with_delta(mpq_class(1, 3));
  const Thresholds t = thresholds(cfg);
  const mpq_class beta = cfg.beta();
  for (std::uint64_t v = 1; v < t.V; ++v) {
    const std::uint64_t u = t.U_of(v) + 3;
    const std::uint64_t w = std::min(u, v + 2);
    ASSERT_NO_THROW(slope_certificate(u, v, w, cfg));
    const mpq_class m = mpq_class(static_cast<unsigned long>(v)) / (mpz_class(1) << v);
    for (int i = 0; i <= 200; ++i) {
      const mpq_class y = mpq_class(1, 2) + (beta - mpq_class(1, 2)) * mpq_class(i, 200);
      const mpq_class d = u * detail::qpow(y, u - 1) - w * detail::qpow(y, w - 1) - v * detail::qpow(y, v - 1);
      EXPECT_LE(d, -m);
    }
  }
}

TEST(Slope, RejectsOutOfRegime) {
  const BadSetConfig cfg = with_delta(mpq_class(1, 2));
  const Thresholds t = thresholds(cfg);
  EXPECT_THROW(slope_certificate(t.U_of(1) - 1, 1, 1, cfg), std::invalid_argument);
  EXPECT_THROW(slope_certificate(10, 3, 2, cfg), std::invalid_argument);
  EXPECT_THROW(slope_certificate(50, t.V, t.V, cfg), std::invalid_argument);
}

TEST(Sublevel, ClosedFormDiagonal) {
  // u = v = w gives P = 1 - y^v, whose sublevel set is an explicit interval.
  for (const mpq_class& delta : {mpq_class(1, 10), mpq_class(1, 2)}) {
    const BadSetConfig cfg = with_delta(delta);
    const Thresholds t = thresholds(cfg);
    for (std::uint64_t v : {1UL, 2UL, 5UL, 9UL}) {
      for (std::uint64_t d = t.D0; d < t.D0 + 6; ++d) {
        const mpq_class eps = 2 * detail::qpow(cfg.beta(), d);
        const SublevelBound b = sublevel_vs_bound(v, v, v, d, cfg);
        const double expect = closed_form_measure(cfg.beta(), eps, v);
        EXPECT_NEAR(b.exact_measure.lo().to_double(), expect, 1e-12);
        EXPECT_NEAR(b.exact_measure.hi().to_double(), expect, 1e-12);
        EXPECT_TRUE(b.ok) << "v " << v << " d " << d;
      }
    }
  }
}

TEST(Sublevel, BoundsHoldAcrossRegimes) {
  const BadSetConfig cfg = with_delta(mpq_class(1, 2));
  const Thresholds t = thresholds(cfg);
  std::set<BoundRegime> seen;
  for (std::uint64_t v = 1; v <= t.V + 1; ++v) {
    for (std::uint64_t w = v; w <= v + 4; ++w) {
      for (std::uint64_t u : {w, w + 1, std::max(w, t.U_star), t.U_star + 5}) {
        if (u < w) continue;
        for (std::uint64_t d = t.D0; d <= t.D0 + 8; d += 4) {
          const SublevelBound b = sublevel_vs_bound(u, v, w, d, cfg);
          EXPECT_TRUE(b.ok) << u << ' ' << v << ' ' << w << " d " << d;
          seen.insert(b.regime);
        }
      }
    }
  }
  EXPECT_EQ(seen.size(), 3U);
}

TEST(Sublevel, GridOracleAgrees) {
  const BadSetConfig cfg = with_delta(mpq_class(1, 4));
  const mpq_class beta = cfg.beta();
  for (auto [u, v, w] : {std::tuple{7UL, 2UL, 3UL}, std::tuple{12UL, 1UL, 5UL}, std::tuple{4UL, 4UL, 4UL}}) {
    const std::uint64_t d = thresholds(cfg).D0 + 1;
    const mpq_class eps = 2 * detail::qpow(beta, d);
    auto f = [&](const mpq_class& y) -> mpq_class { return 1 + detail::qpow(y, u) - detail::qpow(y, w) - detail::qpow(y, v); };
    const double grid = oracle::grid_sublevel_measure(f, mpq_class(1, 2), beta, eps, 400);
    const SublevelBound b = sublevel_vs_bound(u, v, w, d, cfg);
    EXPECT_NEAR(b.exact_measure.mid().to_double(), grid, 1e-12);
  }
}

TEST(Sublevel, SlopeLemmaInvariant) {
  // Whenever P' <= -m < 0 on [1/2, beta] is certified, the sublevel measure is at most 2 eps / m.
  const mpq_class beta(2, 3);
  std::size_t applied = 0;
  for (std::uint64_t u = 1; u <= 8; ++u) {
    for (std::uint64_t w = 1; w <= u; ++w) {
      for (std::uint64_t v = 1; v <= w; ++v) {
        const IntPolynomial p = detail::p_uvw(u, v, w);
        const IntPolynomial dp = p.derivative();
        Dyadic top = Dyadic(-1000000);
        for (int i = 0; i < 256; ++i) {
          const DyadicInterval y = DyadicInterval::from_rational(mpq_class(1, 2) + (beta - mpq_class(1, 2)) * mpq_class(i, 256), 64);
          const DyadicInterval z = DyadicInterval::from_rational(mpq_class(1, 2) + (beta - mpq_class(1, 2)) * mpq_class(i + 1, 256), 64);
          const Dyadic e = dp.eval(hull(y, z), 128).hi();
          if (compare(e, top) > 0) top = e;
        }
        if (top.sign() >= 0) continue;
        ++applied;
        const mpq_class m = -[&] { mpq_class q; mpfr_get_q(q.get_mpq_t(), top.get()); return q; }();
        for (long k = 4; k <= 20; ++k) {
          const mpq_class eps(1, mpz_class(1) << k);
          const DyadicInterval meas = sublevel_measure_rational(p, beta, eps);
          EXPECT_LE(compare(meas.hi(), 2 * eps / m), 0) << u << ' ' << v << ' ' << w << " eps 2^-" << k;
        }
      }
    }
  }
  EXPECT_GT(applied, 10U);
}

TEST(Decay, DeterministicAcrossThreads) {
  BadSetConfig cfg = with_delta(mpq_class(1, 2));
  cfg.sample_count = 300;
  cfg.scan_depth = 30;
  cfg.d_lo = 5;
  cfg.d_hi = 30;
  cfg.threads = 1;
  const DecayCurve a = scan_bad_measure(cfg);
  cfg.threads = 3;
  const DecayCurve b = scan_bad_measure(cfg);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) EXPECT_EQ(a.points[i].hit_count, b.points[i].hit_count);
  EXPECT_EQ(a.largest_index_histogram, b.largest_index_histogram);
  EXPECT_EQ(a.fitted_log_slope, b.fitted_log_slope);
}

TEST(Decay, MatchesPerSampleOracle) {
  // Recomputes each sample's largest collision index with the brute-force
  // floor sequence of the same dyadic point.
  BadSetConfig cfg = with_delta(mpq_class(1, 2));
  cfg.sample_count = 60;
  cfg.scan_depth = 24;
  cfg.d_lo = 1;
  cfg.d_hi = 24;
  cfg.threads = 1;
  const DecayCurve c = scan_bad_measure(cfg);
  std::vector<std::uint64_t> hist(cfg.scan_depth + 1, 0);
  for (std::uint64_t i = 0; i < cfg.sample_count; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.rng_seed), static_cast<std::uint32_t>(cfg.rng_seed >> 32),
                      static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
    std::mt19937_64 rng(seq);
    const Dyadic x = detail::sample_dyadic(rng, 1 + cfg.delta, mpq_class(2));
    mpq_class q;
    mpfr_get_q(q.get_mpq_t(), x.get());
    std::vector<mpz_class> a;
    mpq_class p = 1;
    for (std::uint64_t n = 1; n <= cfg.scan_depth; ++n) {
      p *= q;
      a.push_back(mpz_class(p.get_num() / p.get_den()));
    }
    std::uint64_t largest = 0;
    for (std::size_t i1 = 0; i1 < a.size(); ++i1)
      for (std::size_t i2 = i1 + 1; i2 < a.size(); ++i2)
        for (std::size_t i3 = i2; i3 < a.size(); ++i3)
          for (std::size_t i4 = i3 + 1; i4 < a.size(); ++i4)
            if (a[i1] + a[i4] == a[i2] + a[i3] && a[i1] != a[i2] && a[i3] != a[i4]) largest = std::max<std::uint64_t>(largest, i4 + 1);
    ++hist[largest];
  }
  EXPECT_EQ(c.largest_index_histogram, hist);
  EXPECT_EQ(c.excluded_samples, 0U);
}

TEST(Decay, EstimatesDecrease) {
  BadSetConfig cfg = with_delta(mpq_class(1, 2));
  cfg.sample_count = 2000;
  cfg.scan_depth = 40;
  cfg.d_lo = 4;
  cfg.d_hi = 20;
  const DecayCurve c = scan_bad_measure(cfg);
  EXPECT_LT(c.fitted_log_slope, 0.0);
  EXPECT_GT(c.slope_stderr, 0.0);
  std::ostringstream os;
  write_decay_csv(os, c);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "d,hit_count,sample_count,estimated_measure");
}

TEST(Decay, RejectsBadConfig) {
  BadSetConfig cfg = with_delta(1);
  EXPECT_THROW(scan_bad_measure(cfg), std::invalid_argument);
  cfg = with_delta(mpq_class(1, 2));
  cfg.d_hi = cfg.scan_depth + 1;
  EXPECT_THROW(scan_bad_measure(cfg), std::invalid_argument);
}

TEST(Orbit, GoldenRotationMatchesDoubleOracle) {
  const Precision bits = 128;
  const DyadicInterval theta = div(sub(sqrt(DyadicInterval::point(5), bits), DyadicInterval::point(1), bits),
                                   DyadicInterval::point(2), bits);
  const Arc arc{DyadicInterval::from_rational(mpq_class(1, 10), bits), DyadicInterval::from_rational(mpq_class(7, 20), bits)};
  const std::uint64_t N = 5000;
  const OrbitStats st = orbit_visits(theta, arc, N);
  EXPECT_TRUE(st.undecided_indices.empty());
  std::vector<std::uint64_t> expect;
  const long double g = (std::sqrt(5.0L) - 1) / 2;
  for (std::uint64_t n = 1; n <= N; ++n) {
    const long double f = std::fmod(static_cast<long double>(n) * g, 1.0L);
    if (f > 0.1L && f < 0.35L) expect.push_back(n);
  }
  EXPECT_EQ(st.visit_indices, expect);
  EXPECT_LE(std::abs(st.visit_fraction() - 0.25), st.extreme_discrepancy);
  EXPECT_LE(st.star_discrepancy, st.extreme_discrepancy);
  EXPECT_LT(st.extreme_discrepancy, 0.01);
}

TEST(Orbit, ExactBoundaryPointsAreOutside) {
  const Arc arc{DyadicInterval::point(0), DyadicInterval::from_rational(mpq_class(1, 2), 64)};
  const OrbitStats st = orbit_visits(DyadicInterval::from_rational(mpq_class(1, 4), 64), arc, 8);
  // n/4 mod 1 cycles 1/4, 1/2, 3/4, 0; the open arc excludes both endpoints.
  EXPECT_EQ(st.visit_indices, (std::vector<std::uint64_t>{1, 5}));
  EXPECT_TRUE(st.undecided_indices.empty());
  const OrbitStats fuzzy = orbit_visits(DyadicInterval(Dyadic::from_rational(mpq_class(1, 4) - mpq_class(1, 1 << 20), 64, Round::Down),
                                                       Dyadic::from_rational(mpq_class(1, 4) + mpq_class(1, 1 << 20), 64, Round::Up)),
                                        arc, 2);
  EXPECT_EQ(fuzzy.undecided_indices, (std::vector<std::uint64_t>{2}));
}

TEST(Windows, PlasticWindowEqualsSignPattern) {
  const AlgebraicReal rho = plastic_constant();
  const ConjugateSpectrum s = conjugate_spectrum(rho, 128);
  const DyadicInterval omega = abs(*s.dominant_pair_argument);
  const Arc I = plastic_window(omega);
  EXPECT_NEAR((I.hi - I.lo).mid().to_double(), M_PI - omega.mid().to_double(), 1e-15);
  const std::uint64_t M = 2000;
  const PatternScan scan = plastic_pattern_scan(M);
  const OrbitStats st = orbit_visits(div(omega, two_pi(160), 160), to_turns(I, 160), M);
  EXPECT_TRUE(st.undecided_indices.empty());
  std::vector<std::uint64_t> visits, pattern;
  for (auto n : st.visit_indices) if (n >= scan.n1) visits.push_back(n);
  const auto& u = scan.data.signs;
  for (std::uint64_t m = scan.n1; m <= M; ++m)
    if (u.u(m) == 1 && u.u(m + 2) == 1 && u.u(m + 3) == 0 && u.u(m + 4) == 0) pattern.push_back(m);
  EXPECT_EQ(visits, pattern);
  std::set<std::uint64_t> hits(scan.hits.begin(), scan.hits.end());
  for (auto m : visits) EXPECT_TRUE(hits.count(m)) << m;
  EXPECT_LE(std::abs(st.visit_fraction() - (M_PI - omega.mid().to_double()) / (2 * M_PI)), st.extreme_discrepancy);
}

TEST(Windows, PlasticWindowRejectsBadOmega) {
  EXPECT_THROW(plastic_window(DyadicInterval::from_rational(mpq_class(2), 64)), Error);
  EXPECT_THROW(plastic_window(DyadicInterval::from_rational(mpq_class(27, 10), 64)), Error);
}

TEST(Windows, KFibWindowAndTail) {
  const int k = 13;
  const ConjugateSpectrum s = conjugate_spectrum(k_fibonacci_root(k), 128);
  const DyadicInterval omega = abs(*s.dominant_pair_argument);
  const DyadicInterval delta = shift_angle(k, s);
  const DyadicInterval eta = default_eta(omega, delta);
  const KFibWindow win = kfib_window(k, omega, delta, eta);
  EXPECT_NEAR(win.c0.mid().to_double(), std::sin(eta.mid().to_double()), 1e-15);
  const std::uint64_t n_star = en_tail_threshold(k, s, win.c0);
  EXPECT_EQ(n_star, 151U);

  const std::uint64_t M = 1500;
  const PatternScan scan = kfib_pattern_scan(k, M);
  const OrbitStats st = orbit_visits(div(omega, two_pi(160), 160), to_turns(win.J, 160), M);
  EXPECT_TRUE(st.undecided_indices.empty());
  std::set<std::uint64_t> hits(scan.hits.begin(), scan.hits.end());
  std::size_t checked = 0;
  const auto& u = scan.data.signs;
  for (auto n : st.visit_indices) {
    if (n < std::max(n_star, scan.n1)) continue;
    ++checked;
    EXPECT_EQ(u.u(n), 1) << n;
    EXPECT_EQ(u.u(n + k), 1) << n;
    EXPECT_EQ(u.u(n + k + 1), 1) << n;
    EXPECT_TRUE(hits.count(n)) << n;
  }
  EXPECT_GT(checked, 50U);
}

TEST(Windows, KFibRejects) {
  const int k = 13;
  const ConjugateSpectrum s = conjugate_spectrum(k_fibonacci_root(k), 128);
  const DyadicInterval omega = abs(*s.dominant_pair_argument);
  const DyadicInterval delta = shift_angle(k, s);
  EXPECT_THROW(kfib_window(11, omega, delta, default_eta(omega, delta)), Error);
  EXPECT_THROW(kfib_window(14, omega, delta, default_eta(omega, delta)), Error);
  try {
    kfib_window(k, omega, delta, DyadicInterval::point(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyWindow);
  }
}

TEST(Windows, EnSignAgreesWithExactSigns) {
  const int k = 13;
  const AlgebraicReal a = k_fibonacci_root(k);
  const ConjugateSpectrum s = conjugate_spectrum(a, 128);
  const TraceFloors tf = trace_floors(a, 900);
  std::size_t decided = 0;
  for (std::uint64_t n = std::max<std::uint64_t>(tf.n1, 151); n <= 900; ++n) {
    const EnSignCertificate c = en_sign_certificate(k, n, s);
    EXPECT_TRUE(c.enclosure.intersects(tf.signs.residual[n - tf.n1])) << n;
    if (c.sign) {
      ++decided;
      EXPECT_EQ(*c.sign > 0 ? 1 : 0, tf.signs.u(n)) << n;
    }
  }
  EXPECT_GT(decided, 600U);
}
