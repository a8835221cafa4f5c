#include <sidontail/certreal.hpp>

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace sidontail;

namespace {

const IntPolynomial kPlastic{-1, -1, 0, 1};  // t^3 - t - 1

DyadicInterval closed(long lo, long hi) { return {Dyadic(lo), Dyadic(hi)}; }

Dyadic dyadic(double x) { return Dyadic::from_double(x); }

mpq_class to_q(const Dyadic& d) {
  auto [m, e] = d.mantissa_exponent();
  mpq_class q(m);
  if (e >= 0) mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), e);
  else mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), -e);
  return q;
}

}  // namespace

TEST(Dyadic, ExactArithmeticHelpers) {
  Dyadic a = Dyadic::from_mantissa(3, -5);   // 3/32
  Dyadic b = Dyadic::from_mantissa(1, 40);   // 2^40
  Dyadic s = exact_add(a, b);
  EXPECT_EQ(to_q(s), mpq_class(3, 32) + mpq_class(mpz_class(1) << 40));
  EXPECT_EQ(to_q(midpoint(a, b)), (mpq_class(3, 32) + mpq_class(mpz_class(1) << 40)) / 2);
  EXPECT_EQ(Dyadic::from_mantissa(-7, -1).floor(), -4);
  EXPECT_EQ(Dyadic::from_mantissa(-7, -1).ceil(), -3);
}

TEST(IntervalPow, ExactIntegerPower) {
  DyadicInterval r = pow(DyadicInterval::point(2), 10, 64);
  EXPECT_TRUE(r.is_point());
  EXPECT_EQ(compare(r.lo(), 1024L), 0);
}

TEST(IntervalPow, OneIsFixed) {
  for (std::uint64_t n : {0ULL, 1ULL, 17ULL, 1000ULL}) {
    DyadicInterval r = pow(DyadicInterval::point(1), n, 32);
    EXPECT_EQ(compare(r.lo(), 1L), 0);
    EXPECT_EQ(compare(r.hi(), 1L), 0);
  }
}

TEST(IntervalPow, PlasticCubeEnclosesRhoPlusOne) {
  // Bisection oracle for rho, then rho + 1 must sit inside pow(enclosure, 3).
  auto f = [](const mpq_class& x) -> mpq_class { return x * x * x - x - 1; };
  mpq_class rho = oracle::bisect(f, 1, 2, 200);
  DyadicInterval iso = refine_root(kPlastic, closed(1, 2), 128);
  DyadicInterval cube = pow(iso, 3, 128);
  EXPECT_TRUE(cube.contains(mpq_class(rho + 1)));
  EXPECT_NEAR(cube.mid().to_double(), 2.3247179572447460, 1e-15);
}

TEST(IntervalArithmetic, SingleOperationWidthBound) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-4, 4);
  for (int i = 0; i < 500; ++i) {
    DyadicInterval a = DyadicInterval::point(dyadic(u(rng)));
    DyadicInterval b = DyadicInterval::point(dyadic(u(rng)));
    for (Precision p : {24L, 53L, 100L}) {
      for (const DyadicInterval& r : {add(a, b, p), sub(a, b, p), mul(a, b, p)}) {
        const Dyadic bound = mul(pow2(1 - static_cast<long>(p)),
                                 max(max(abs(r.lo()), abs(r.hi())), Dyadic(1)), 256, Round::Up);
        EXPECT_LE(compare(r.width(), bound), 0);
        EXPECT_LE(compare(r.lo(), r.hi()), 0);
      }
    }
  }
}

TEST(IntervalArithmetic, CosineEnclosesExtrema) {
  DyadicInterval around_pi = {dyadic(3.0), dyadic(3.3)};
  DyadicInterval c = cos(around_pi, 64);
  EXPECT_EQ(compare(c.lo(), -1L), 0);
  DyadicInterval around_zero = {dyadic(-0.1), dyadic(0.2)};
  EXPECT_EQ(compare(cos(around_zero, 64).hi(), 1L), 0);
  DyadicInterval narrow = DyadicInterval::point(dyadic(1.0));
  EXPECT_NEAR(cos(narrow, 64).mid().to_double(), std::cos(1.0), 1e-15);
  EXPECT_NEAR(sin(narrow, 64).mid().to_double(), std::sin(1.0), 1e-15);
}

TEST(IntervalArithmetic, Atan2Quadrants) {
  DyadicInterval one = DyadicInterval::point(1);
  DyadicInterval m_one = DyadicInterval::point(-1);
  EXPECT_NEAR(atan2(one, m_one, 64).mid().to_double(), 3 * M_PI / 4, 1e-15);
  EXPECT_NEAR(atan2(m_one, one, 64).mid().to_double(), -M_PI / 4, 1e-15);
  // Straddling the branch cut returns the full range.
  DyadicInterval straddle = {Dyadic(-1), Dyadic(1)};
  EXPECT_TRUE(atan2(straddle, m_one, 64).contains(dyadic(3.14)));
}

TEST(IsolateRealRoots, PlasticInUnitWindow) {
  auto roots = isolate_real_roots(kPlastic, closed(1, 2));
  ASSERT_EQ(roots.size(), 1U);
  auto f = [](const mpq_class& x) -> mpq_class { return x * x * x - x - 1; };
  EXPECT_TRUE(roots[0].contains(mpq_class(oracle::bisect(f, 1, 2, 120))));
}

TEST(IsolateRealRoots, SqrtTwo) {
  auto roots = isolate_real_roots(IntPolynomial{-2, 0, 1}, closed(0, 2));
  ASSERT_EQ(roots.size(), 1U);
  DyadicInterval r = refine_root(IntPolynomial{-2, 0, 1}, roots[0], 60);
  EXPECT_NEAR(r.mid().to_double(), std::sqrt(2.0), 1e-15);
}

TEST(IsolateRealRoots, FiveBonacci) {
  IntPolynomial f5{-1, -1, -1, -1, -1, 1};
  auto roots = isolate_real_roots(f5, closed(1, 2));
  ASSERT_EQ(roots.size(), 1U);
  DyadicInterval r = refine_root(f5, roots[0], 64);
  EXPECT_NEAR(r.mid().to_double(), 1.9659482366454853, 1e-14);
}

TEST(IsolateRealRoots, ZeroPolynomialRejected) {
  try {
    isolate_real_roots(IntPolynomial{}, closed(0, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroPolynomial);
  }
}

TEST(IsolateRealRoots, RootsOnWindowEdgesAndRepeated) {
  // (x - 1)^2 (x - 2) (x - 3/2): roots at both edges of [1, 2] and a double root.
  IntPolynomial p = IntPolynomial{-1, 1} * IntPolynomial{-1, 1} * IntPolynomial{-2, 1} * IntPolynomial{-3, 2};
  auto roots = isolate_real_roots(p, closed(1, 2));
  ASSERT_EQ(roots.size(), 3U);
  EXPECT_TRUE(roots[0].is_point());
  EXPECT_TRUE(roots[1].contains(Dyadic::from_mantissa(3, -1)));
  EXPECT_TRUE(roots[2].is_point());
  for (std::size_t i = 0; i + 1 < roots.size(); ++i) {
    EXPECT_LT(compare(roots[i].hi(), roots[i + 1].lo()), 0);
  }
}

TEST(IsolateRealRoots, CountMatchesSturmOnRandomPolynomials) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<long> coef(-9, 9);
  std::uniform_int_distribution<int> deg(1, 10);
  const DyadicInterval window = closed(-16, 16);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<mpz_class> c(static_cast<std::size_t>(deg(rng)) + 1);
    for (auto& v : c) v = coef(rng);
    if (c.back() == 0) c.back() = 1;
    IntPolynomial p(c);
    auto roots = isolate_real_roots(p, window);
    EXPECT_EQ(static_cast<int>(roots.size()), sturm_root_count(p, window)) << p.to_string();
    const IntPolynomial q = square_free_part(p);
    for (std::size_t i = 0; i < roots.size(); ++i) {
      EXPECT_EQ(sturm_root_count(q, roots[i]), 1) << p.to_string();
      if (i + 1 < roots.size()) EXPECT_LT(compare(roots[i].hi(), roots[i + 1].lo()), 0);
    }
  }
}

TEST(RefineRoot, PlasticTo64Bits) {
  DyadicInterval r = refine_root(kPlastic, closed(1, 2), 64);
  EXPECT_LE(compare(r.width(), pow2(-64)), 0);
  EXPECT_TRUE(r.contains(dyadic(1.3247179572447460)) || std::abs(r.mid().to_double() - 1.324717957244746) < 1e-15);
  auto f = [](const mpq_class& x) -> mpq_class { return x * x * x - x - 1; };
  EXPECT_TRUE(r.contains(mpq_class(oracle::bisect(f, 1, 2, 70))) ||
              r.intersects(DyadicInterval::from_rational(oracle::bisect(f, 1, 2, 70), 80)));
}

TEST(RefineRoot, LinearRootIsExact) {
  DyadicInterval r = refine_root(IntPolynomial{-3, 1}, closed(2, 4), 10);
  EXPECT_TRUE(r.contains(Dyadic(3)));
  EXPECT_LE(compare(r.width(), pow2(-10)), 0);
}

TEST(RefineRoot, ThirteenBonacciApproachesTwo) {
  std::vector<mpz_class> c(14, -1);
  c[13] = 1;
  IntPolynomial f13(c);
  auto roots = isolate_real_roots(f13, closed(1, 2));
  ASSERT_EQ(roots.size(), 1U);
  DyadicInterval r = refine_root(f13, roots[0], 128);
  EXPECT_LE(compare(r.width(), pow2(-128)), 0);
  Dyadic gap = sub(Dyadic(2), r.hi(), 64, Round::Down);
  EXPECT_GT(gap.sign(), 0);
  EXPECT_LT(compare(gap, pow2(-12)), 0);
}

TEST(RefineRoot, HighPrecisionNewtonMatchesBisection) {
  DyadicInterval fast = refine_root(kPlastic, closed(1, 2), 3000);
  EXPECT_LE(compare(fast.width(), pow2(-3000)), 0);
  // Exact sign check at the endpoints certifies the bracket.
  EXPECT_LT(kPlastic.sign_at(fast.lo()), 0);
  EXPECT_GT(kPlastic.sign_at(fast.hi()), 0);
}

TEST(RefineRoot, OutputIsSubinterval) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const long a = std::uniform_int_distribution<long>(-5, 5)(rng);
    const long b = std::uniform_int_distribution<long>(1, 7)(rng);
    IntPolynomial p = IntPolynomial{-a, 1} * IntPolynomial{-1, 0, 0, b};  // (x - a)(b x^3 - 1)
    for (const auto& iso : isolate_real_roots(p, closed(-8, 8))) {
      DyadicInterval r = refine_root(p, iso, 80);
      EXPECT_TRUE(iso.contains(r));
    }
  }
}

TEST(RefineRoot, NotIsolatingReported) {
  try {
    refine_root(IntPolynomial{-2, 0, 1}, closed(2, 3), 20);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotIsolating);
  }
}

TEST(SublevelMeasure, Identity) {
  DyadicInterval m = sublevel_measure(IntPolynomial{0, 1}, closed(0, 1), Dyadic::from_mantissa(1, -2));
  EXPECT_EQ(compare(m.lo(), Dyadic::from_mantissa(1, -2)), 0);
  EXPECT_EQ(compare(m.hi(), Dyadic::from_mantissa(1, -2)), 0);
}

TEST(SublevelMeasure, ShiftedAwayIsEmpty) {
  DyadicInterval m = sublevel_measure(IntPolynomial{-2, 1}, closed(0, 1), Dyadic::from_mantissa(1, -1));
  EXPECT_TRUE(m.lo().is_zero());
  EXPECT_TRUE(m.hi().is_zero());
}

TEST(SublevelMeasure, QuarticRegression) {
  // P(y) = 1 + y^4 - y^2 - y on [1/2, 0.9], eps = 0.05 (both as binary64 values).
  IntPolynomial p{1, -1, -1, 0, 1};
  const Dyadic hi = dyadic(0.9);
  const Dyadic eps = dyadic(0.05);
  DyadicInterval m = sublevel_measure(p, {Dyadic::from_mantissa(1, -1), hi}, eps);
  auto f = [](const mpq_class& y) -> mpq_class { return 1 + y * y * y * y - y * y - y; };
  const double grid = oracle::grid_sublevel_measure(f, mpq_class(1, 2), to_q(hi), to_q(eps), 400);
  EXPECT_NEAR(m.mid().to_double(), grid, 1e-15);
  EXPECT_NEAR(m.mid().to_double(), 0.14792827052, 1e-9);
  EXPECT_LT(m.width().to_double(), 1e-25);
}

TEST(SublevelMeasure, ClosedFormOneMinusPower) {
  // |1 - y^v| < eps on [1/2, b]  <=>  (1 - eps)^(1/v) < y < (1 + eps)^(1/v).
  for (int v = 1; v <= 6; ++v) {
    std::vector<mpz_class> c(static_cast<std::size_t>(v) + 1);
    c[0] = 1;
    c[v] = -1;
    IntPolynomial p(c);
    const double b = 0.875;
    for (int k = 2; k <= 12; k += 2) {
      const double eps = std::ldexp(1.0, -k);
      DyadicInterval m = sublevel_measure(p, {Dyadic::from_mantissa(1, -1), dyadic(b)}, dyadic(eps));
      const double left = std::max(0.5, std::pow(1 - eps, 1.0 / v));
      const double expect = std::max(0.0, b - left);
      EXPECT_NEAR(m.mid().to_double(), expect, 1e-12) << "v=" << v << " eps=" << eps;
    }
  }
}

TEST(Properties, EnclosureSoundAgainstHigherPrecision) {
  // An enclosure at p bits must contain the enclosure of the same expression at 4p bits.
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-3, 3);
  std::uniform_int_distribution<long> coef(-20, 20);
  std::uniform_int_distribution<std::uint64_t> expo(0, 40);
  for (int trial = 0; trial < 10000; ++trial) {
    const Precision p = 24 + trial % 80;
    const double a = u(rng), b = u(rng);
    const DyadicInterval x{dyadic(std::min(a, b)), dyadic(std::max(a, b))};
    DyadicInterval lo_prec, hi_prec;
    switch (trial % 4) {
      case 0: {
        IntPolynomial f{coef(rng), coef(rng), coef(rng), coef(rng), coef(rng)};
        lo_prec = f.eval(x, p);
        hi_prec = f.eval(x, 4 * p);
        break;
      }
      case 1: {
        const std::uint64_t n = expo(rng);
        lo_prec = pow(x, n, p);
        hi_prec = pow(x, n, 4 * p);
        break;
      }
      case 2:
        lo_prec = cos(x, p);
        hi_prec = cos(x, 4 * p);
        break;
      default:
        lo_prec = mul(sub(x, x, p), add(x, DyadicInterval::point(3), p), p);
        hi_prec = mul(sub(x, x, 4 * p), add(x, DyadicInterval::point(3), 4 * p), 4 * p);
        break;
    }
    ASSERT_TRUE(lo_prec.contains(hi_prec)) << trial << " " << lo_prec << " " << hi_prec;
  }
}

TEST(Properties, RefinementIsMonotone) {
  DyadicInterval iv = isolate_real_roots(kPlastic, closed(1, 2)).at(0);
  for (Precision bits = 8; bits <= 1024; bits *= 2) {
    DyadicInterval next = refine_root(kPlastic, iv, bits);
    EXPECT_TRUE(iv.contains(next));
    EXPECT_LE(compare(next.width(), pow2(-bits)), 0);
    iv = next;
  }
}

TEST(Properties, RootCountAgreesWithGridOracle) {
  // Products of distinct rational linear factors: the grid oracle sees every root.
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<long> num(-40, 40);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<long> roots_num;
    IntPolynomial p{1};
    const int n = 1 + trial % 8;
    while (static_cast<int>(roots_num.size()) < n) {
      const long r = num(rng);
      if (std::find(roots_num.begin(), roots_num.end(), r) != roots_num.end()) continue;
      roots_num.push_back(r);
      p = p * IntPolynomial{-r, 8};  // root r / 8
    }
    auto f = [&](const mpq_class& x) -> mpq_class { return oracle::eval(p.coefficients(), x); };
    const auto grid = oracle::grid_roots(f, mpq_class(-61, 10), mpq_class(61, 10), 977, 40);
    EXPECT_EQ(isolate_real_roots(p, closed(-6, 6)).size(), grid.size()) << p.to_string();
  }
}
