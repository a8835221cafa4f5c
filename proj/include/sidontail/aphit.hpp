#pragma once

// Arithmetic-progression hitting: the cells (m^(1/n), (m+1)^(1/n)) with
// m = r (mod d), density witnesses, first hits in floor-power sequences, and a
// greedy nested-interval builder for an x whose floors meet a finite list of
// progressions.

#include <sidontail/floorpow.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sidontail {

struct APSpec {
  std::uint64_t d = 1;
  std::uint64_t r = 0;

  void validate() const {
    if (d < 1 || r >= d) throw std::invalid_argument("APSpec: need d >= 1 and 0 <= r < d");
  }
  bool matches(const mpz_class& m) const {
    mpz_class rem;
    mpz_fdiv_r_ui(rem.get_mpz_t(), m.get_mpz_t(), static_cast<unsigned long>(d));
    return rem == static_cast<unsigned long>(r);
  }
  friend bool operator==(const APSpec& a, const APSpec& b) { return a.d == b.d && a.r == b.r; }
};

/// The cell (m^(1/n), (m+1)^(1/n)) with enclosures of both endpoints.
struct APCell {
  mpz_class m;
  DyadicInterval lo;
  DyadicInterval hi;
};

namespace detail {

inline void require_window(const DyadicInterval& w) {
  if (compare(w.lo(), 1L) < 0) throw std::invalid_argument("window must lie in (1, inf)");
  if (!(compare(w.lo(), w.hi()) < 0)) throw std::invalid_argument("window must have positive length");
}

/// x^n for a dyadic x, exactly, as num / 2^shift.
inline std::pair<mpz_class, unsigned long> exact_pow(const Dyadic& x, std::uint64_t n) {
  mpz_class mant;
  const long e = mpfr_get_z_2exp(mant.get_mpz_t(), x.get());
  mpz_class p;
  mpz_pow_ui(p.get_mpz_t(), mant.get_mpz_t(), static_cast<unsigned long>(n));
  const long total = e * static_cast<long>(n);
  if (total >= 0) {
    p <<= static_cast<mp_bitcnt_t>(total);
    return {p, 0UL};
  }
  return {p, static_cast<unsigned long>(-total)};
}

inline mpz_class exact_pow_floor(const Dyadic& x, std::uint64_t n) {
  auto [num, shift] = exact_pow(x, n);
  mpz_class q;
  mpz_fdiv_q_2exp(q.get_mpz_t(), num.get_mpz_t(), shift);
  return q;
}

/// sign(x^n - m), exactly.
inline int exact_pow_compare(const Dyadic& x, std::uint64_t n, const mpz_class& m) {
  auto [num, shift] = exact_pow(x, n);
  mpz_class rhs = m;
  rhs <<= shift;
  return cmp(num, rhs);
}

inline Precision cell_bits(const Dyadic& hi, std::uint64_t n) {
  const double l = std::max(1.0, std::log2(hi.to_double(Round::Up)));
  return static_cast<Precision>(static_cast<double>(n) * l) + 64 + 2 * log2_ceil(n);
}

inline APCell make_cell(const mpz_class& m, std::uint64_t n, Precision bits) {
  const auto k = static_cast<unsigned long>(n);
  return {m, rootn(DyadicInterval::from_integer(m), k, bits), rootn(DyadicInterval::from_integer(m + 1), k, bits)};
}

/// Smallest m >= lo with m = r (mod d).
inline mpz_class next_in_class(const mpz_class& lo, const APSpec& s) {
  mpz_class rem;
  mpz_fdiv_r_ui(rem.get_mpz_t(), lo.get_mpz_t(), static_cast<unsigned long>(s.d));
  mpz_class shift = mpz_class(static_cast<unsigned long>(s.r)) - rem;
  if (shift < 0) shift += static_cast<unsigned long>(s.d);
  return lo + shift;
}

}  // namespace detail

/// Every cell with m = r (mod d) meeting the open window, in increasing m.
/// Range ends are decided by exact powers of the dyadic window endpoints.
inline std::vector<APCell> ap_interval_union(std::uint64_t n, const APSpec& spec, const DyadicInterval& window) {
  if (n < 1) throw std::invalid_argument("ap_interval_union: n >= 1 required");
  spec.validate();
  detail::require_window(window);
  // (m^(1/n), (m+1)^(1/n)) meets (a, b) iff a^n < m + 1 and m < b^n.
  const mpz_class m_lo = detail::exact_pow_floor(window.lo(), n);
  mpz_class m_hi = detail::exact_pow_floor(window.hi(), n);
  if (detail::exact_pow_compare(window.hi(), n, m_hi) == 0) m_hi -= 1;
  const Precision bits = detail::cell_bits(window.hi(), n);
  std::vector<APCell> out;
  for (mpz_class m = detail::next_in_class(m_lo, spec); m <= m_hi; m += static_cast<unsigned long>(spec.d)) {
    out.push_back(detail::make_cell(m, n, bits));
  }
  return out;
}

/// First n <= n_max with floor(x^n) = r (mod d), from certified floors.
inline std::optional<std::uint64_t> hits_ap(const Base& x, const APSpec& spec, std::uint64_t n_max,
                                            const PrecisionPolicy& policy = {}) {
  spec.validate();
  std::uint64_t lo = 1;
  for (std::uint64_t chunk = 32; lo <= n_max; chunk *= 2) {
    const std::uint64_t hi = std::min(n_max, lo + chunk - 1);
    const FloorPowerSequence seq = floor_power_sequence(x, lo, hi, policy);
    for (std::uint64_t n = lo; n <= hi; ++n) {
      if (spec.matches(seq.at(n))) return n;
    }
    lo = hi + 1;
  }
  return std::nullopt;
}

struct APWitness {
  APSpec spec;
  std::uint64_t n = 0;
  mpz_class m;
};

struct NestedState {
  DyadicInterval current;
  std::vector<APWitness> satisfied;
  std::uint64_t min_next_exponent = 0;
  std::vector<DyadicInterval> history;  // current after each step, starting with the input
};

struct NestedBuilderOptions {
  std::uint64_t max_exponent = std::uint64_t{1} << 16;
  long margin_log2 = -8;  // margin as a fraction of the current width at each end
};

namespace detail {

/// Smallest cell with m = r (mod d) inside [a, b], tried at exponent n.
inline std::optional<APCell> cell_inside(const Dyadic& a, const Dyadic& b, std::uint64_t n, const APSpec& spec) {
  const Precision bits = cell_bits(b, n);
  const DyadicInterval an = pow(DyadicInterval::point(a), n, bits);
  const DyadicInterval bn = pow(DyadicInterval::point(b), n, bits);
  mpz_class m = next_in_class(an.hi().ceil(), spec);
  if (m + 1 > bn.lo().floor()) return std::nullopt;
  APCell c = make_cell(m, n, bits);
  if (compare(c.lo.lo(), a) < 0 || compare(c.hi.hi(), b) > 0) return std::nullopt;
  return c;
}

}  // namespace detail

/// For each spec in order: the least n above all earlier exponents whose image
/// [lo^n, hi^n] is longer than 2d and which admits a cell with m = r (mod d)
/// inside the current interval less a margin at both ends; the current
/// interval then shrinks to a closed dyadic interval whose endpoints are
/// verified exactly to satisfy m < lo^n and hi^n < m + 1.
inline NestedState nested_builder(const std::vector<APSpec>& specs, const DyadicInterval& start,
                                  const NestedBuilderOptions& opt = {}) {
  detail::require_window(start);
  for (const auto& s : specs) s.validate();
  NestedState st;
  st.current = start;
  st.history.push_back(start);
  for (const auto& spec : specs) {
    const Dyadic& lo = st.current.lo();
    const Dyadic& hi = st.current.hi();
    const Dyadic margin = ldexp(st.current.width(), opt.margin_log2);
    const Dyadic a = exact_add(lo, margin);
    const Dyadic b = exact_sub(hi, margin);
    std::optional<APCell> cell;
    std::uint64_t n = st.min_next_exponent + 1;
    for (;; ++n) {
      if (n > opt.max_exponent) {
        throw Error(ErrorCode::ExponentOverflow, "nested_builder: exponent cap " + std::to_string(opt.max_exponent) +
                                                     " reached for (d, r) = (" + std::to_string(spec.d) + ", " +
                                                     std::to_string(spec.r) + ")");
      }
      const Precision bits = detail::cell_bits(hi, n);
      const DyadicInterval image = sub(pow(DyadicInterval::point(hi), n, bits), pow(DyadicInterval::point(lo), n, bits), bits);
      if (compare(image.lo(), static_cast<long>(2 * spec.d)) <= 0) continue;
      if ((cell = detail::cell_inside(a, b, n, spec))) break;
    }
    // Quarter points of the certified inner cell, rounded inward.
    const Precision bits = detail::cell_bits(hi, n) + 16;
    const Dyadic gap = sub(cell->hi.lo(), cell->lo.hi(), bits, Round::Down);
    Dyadic new_lo = add(cell->lo.hi(), ldexp(gap, -2), bits, Round::Up);
    Dyadic new_hi = sub(cell->hi.lo(), ldexp(gap, -2), bits, Round::Down);
    if (!(compare(new_lo, new_hi) < 0) || detail::exact_pow_compare(new_lo, n, cell->m) <= 0 ||
        detail::exact_pow_compare(new_hi, n, cell->m + 1) >= 0) {
      throw Error(ErrorCode::NotCertified, "nested_builder: cell endpoints failed exact verification");
    }
    st.current = DyadicInterval(std::move(new_lo), std::move(new_hi), bits);
    st.satisfied.push_back({spec, n, cell->m});
    st.min_next_exponent = n;
    st.history.push_back(st.current);
  }
  return st;
}

/// Round-robin over the diagonal block (1, 0), (2, 0), (2, 1), (3, 0), ...
/// up to modulus max_d, repeated until `count` specs are produced.
inline std::vector<APSpec> diagonal_ap_specs(std::size_t count, std::uint64_t max_d) {
  if (max_d < 1) throw std::invalid_argument("diagonal_ap_specs: max_d >= 1 required");
  std::vector<APSpec> out;
  while (out.size() < count) {
    for (std::uint64_t d = 1; d <= max_d && out.size() < count; ++d) {
      for (std::uint64_t r = 0; r < d && out.size() < count; ++r) out.push_back({d, r});
    }
  }
  return out;
}

struct DensityWitness {
  std::uint64_t n = 0;
  APCell cell;  // contained in the window
};

/// An n >= N and a cell with m = r (mod d) inside the window, so the window
/// meets the set of x with floor(x^n) = r (mod d) for some n >= N.
inline DensityWitness density_probe(const APSpec& spec, std::uint64_t N, const DyadicInterval& window,
                                    std::uint64_t max_exponent = std::uint64_t{1} << 20) {
  spec.validate();
  detail::require_window(window);
  for (std::uint64_t n = std::max<std::uint64_t>(N, 1); n <= max_exponent; ++n) {
    if (auto c = detail::cell_inside(window.lo(), window.hi(), n, spec)) return {n, std::move(*c)};
  }
  throw Error(ErrorCode::ExponentOverflow, "density_probe: exponent cap reached");
}

}  // namespace sidontail
