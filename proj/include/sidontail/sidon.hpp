#pragma once

// Collision search over floor-power sequences: pair-sum indexing, the
// collision patterns (m, m+2, m+3, m+4) for the plastic constant and
// (n, n+k, n+k, n+k+1) for k-Fibonacci roots, chain transfer to k-th roots,
// and a finite tail-Sidon probe.

#include <sidontail/floorpow.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace sidontail {

/// a_a + a_d = a_b + a_c with a < b <= c < d.
struct CollisionQuadruple {
  std::array<std::uint64_t, 4> indices{};
  std::array<mpz_class, 4> values;
  mpz_class shared_sum;

  friend bool operator<(const CollisionQuadruple& x, const CollisionQuadruple& y) { return x.indices < y.indices; }
  friend bool operator==(const CollisionQuadruple& x, const CollisionQuadruple& y) { return x.indices == y.indices; }
};

struct DuplicatePair {
  std::uint64_t i = 0, j = 0;
  mpz_class value;
};

struct SidonScanReport {
  std::string base;
  std::uint64_t n_lo = 0, n_hi = 0;
  std::vector<CollisionQuadruple> collisions;  // sorted by indices
  std::vector<DuplicatePair> duplicates;

  bool is_sidon_on_range() const noexcept { return collisions.empty() && duplicates.empty(); }
};

namespace detail {

struct MpzHash {
  std::size_t operator()(const mpz_class& z) const noexcept {
    const mpz_srcptr p = z.get_mpz_t();
    std::size_t h = static_cast<std::size_t>(p->_mp_size) * 0x9e3779b97f4a7c15ULL;
    const int n = p->_mp_size < 0 ? -p->_mp_size : p->_mp_size;
    for (int i = 0; i < n; ++i) h = (h ^ static_cast<std::size_t>(p->_mp_d[i])) * 0x100000001b3ULL;
    return h;
  }
};

using PairList = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

template <class Map>
void collect_collisions(const Map& sums, const std::vector<mpz_class>& v, std::uint64_t first,
                        std::vector<CollisionQuadruple>& out) {
  for (const auto& [sum, pairs] : sums) {
    (void)sum;
    if (pairs.size() < 2) continue;
    for (std::size_t x = 0; x < pairs.size(); ++x) {
      for (std::size_t y = x + 1; y < pairs.size(); ++y) {
        auto [p, q] = pairs[x];
        auto [r, s] = pairs[y];
        if (p == r || p == s || q == r || q == s) continue;  // duplicate-induced
        if (r < p) {
          std::swap(p, r);
          std::swap(q, s);
        }
        if (!(p < r && r <= s && s < q)) continue;  // only possible with repeated values
        CollisionQuadruple c;
        c.indices = {first + p, first + r, first + s, first + q};
        c.values = {v[p], v[r], v[s], v[q]};
        c.shared_sum = v[p] + v[q];
        out.push_back(std::move(c));
      }
    }
  }
}

}  // namespace detail

/// All canonical collisions among values (indices first, first + 1, ...).
/// Values must be nondecreasing, as floor powers of x > 1 are.  Sums v_i + v_j
/// with i <= j are indexed, so collisions with b = c are included.
inline SidonScanReport find_collisions(const std::vector<mpz_class>& values, std::uint64_t first = 1) {
  SidonScanReport rep;
  rep.base = "values";
  rep.n_lo = first;
  rep.n_hi = values.empty() ? first : first + values.size() - 1;
  const std::size_t r = values.size();
  if (r > std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument("find_collisions: range too long");
  bool small = true;
  for (std::size_t i = 0; i < r; ++i) {
    if (i > 0 && values[i] < values[i - 1]) throw std::invalid_argument("find_collisions: values must be nondecreasing");
    if (values[i] < 0 || !mpz_fits_slong_p(values[i].get_mpz_t()) || values[i] >= (mpz_class(1) << 61)) small = false;
  }
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = i + 1; j < r && values[j] == values[i]; ++j) rep.duplicates.push_back({first + i, first + j, values[i]});
  }

  const std::size_t pairs = r * (r + 1) / 2;
  if (small) {
    std::unordered_map<std::uint64_t, detail::PairList> sums;
    sums.reserve(pairs);
    std::vector<std::uint64_t> w(r);
    for (std::size_t i = 0; i < r; ++i) w[i] = values[i].get_ui();
    for (std::uint32_t i = 0; i < r; ++i) {
      for (std::uint32_t j = i; j < r; ++j) sums[w[i] + w[j]].emplace_back(i, j);
    }
    detail::collect_collisions(sums, values, first, rep.collisions);
  } else {
    std::unordered_map<mpz_class, detail::PairList, detail::MpzHash> sums;
    sums.reserve(pairs);
    mpz_class s;
    for (std::uint32_t i = 0; i < r; ++i) {
      for (std::uint32_t j = i; j < r; ++j) {
        s = values[i] + values[j];
        sums[s].emplace_back(i, j);
      }
    }
    detail::collect_collisions(sums, values, first, rep.collisions);
  }
  std::sort(rep.collisions.begin(), rep.collisions.end());
  return rep;
}

inline SidonScanReport find_collisions(const FloorPowerSequence& seq, std::uint64_t n_lo, std::uint64_t n_hi) {
  if (n_lo > n_hi || !seq.contains(n_lo) || !seq.contains(n_hi)) {
    throw std::invalid_argument("find_collisions: range not materialized");
  }
  const auto b = seq.values.begin() + static_cast<std::ptrdiff_t>(n_lo - seq.start);
  const auto e = seq.values.begin() + static_cast<std::ptrdiff_t>(n_hi - seq.start + 1);
  SidonScanReport rep = find_collisions(std::vector<mpz_class>(b, e), n_lo);
  rep.base = seq.base_label;
  return rep;
}

/// Union of reports over adjacent or overlapping ranges of one base, restricted
/// to collisions lying in a single input (merging never invents cross-range collisions).
inline SidonScanReport merge_reports(SidonScanReport a, const SidonScanReport& b) {
  a.n_lo = std::min(a.n_lo, b.n_lo);
  a.n_hi = std::max(a.n_hi, b.n_hi);
  a.collisions.insert(a.collisions.end(), b.collisions.begin(), b.collisions.end());
  std::sort(a.collisions.begin(), a.collisions.end());
  a.collisions.erase(std::unique(a.collisions.begin(), a.collisions.end()), a.collisions.end());
  a.duplicates.insert(a.duplicates.end(), b.duplicates.begin(), b.duplicates.end());
  std::sort(a.duplicates.begin(), a.duplicates.end(),
            [](const DuplicatePair& x, const DuplicatePair& y) { return std::tie(x.i, x.j) < std::tie(y.i, y.j); });
  a.duplicates.erase(std::unique(a.duplicates.begin(), a.duplicates.end(),
                                 [](const DuplicatePair& x, const DuplicatePair& y) { return x.i == y.i && x.j == y.j; }),
                     a.duplicates.end());
  return a;
}

/// One collision per line: "a b c d<TAB>v_a v_b v_c v_d<TAB>sum".
inline void write_collisions_text(std::ostream& os, const SidonScanReport& rep) {
  for (const auto& c : rep.collisions) {
    os << c.indices[0] << ' ' << c.indices[1] << ' ' << c.indices[2] << ' ' << c.indices[3] << '\t'
       << c.values[0].get_str() << ' ' << c.values[1].get_str() << ' ' << c.values[2].get_str() << ' '
       << c.values[3].get_str() << '\t' << c.shared_sum.get_str() << '\n';
  }
}

/// Floors and signs of an algebraic Pisot base on [n1, n_hi], with the floors
/// taken from the trace route floor(x^n) = T_n - u_n.
struct TraceFloors {
  std::uint64_t n1 = 0;
  TraceSequence traces;
  SignSequence signs;
  FloorPowerSequence floors;
};

inline TraceFloors trace_floors(const AlgebraicReal& x, std::uint64_t n_hi, const PrecisionPolicy& policy = {}) {
  TraceFloors out;
  out.n1 = residual_threshold(x, conjugate_spectrum(x, policy.initial_bits));
  if (n_hi < out.n1) n_hi = out.n1;
  out.traces = trace_sequence(x.min_poly(), n_hi);
  out.signs = sign_sequence(x, out.traces, out.n1, n_hi, policy);
  out.floors.base_label = x.label();
  out.floors.start = out.n1;
  for (std::uint64_t n = out.n1; n <= n_hi; ++n) {
    const int u = out.signs.u(n);
    out.floors.values.push_back(out.traces.at(n) - u);
    // x^n - a_n = u_n - E_n
    out.floors.frac_enclosures.push_back(sub(DyadicInterval::point(u), out.signs.residual[n - out.n1], 128));
    out.floors.precision_log.push_back(out.signs.precision_log[n - out.n1]);
  }
  return out;
}

struct PatternScan {
  std::uint64_t n1 = 0;
  std::uint64_t m_max = 0;
  std::vector<std::uint64_t> hits;
  bool equivalence_holds = true;    // u-criterion <=> floor identity at every index
  std::uint64_t direct_checked_to = 0;  // trace floors equal direct floors for indices up to here
  TraceFloors data;
};

/// Largest index whose direct floor fits under policy.max_bits with a
/// 64-bit margin for fractional parts close to an integer.
inline std::uint64_t direct_route_limit(const Base& x, const PrecisionPolicy& policy) {
  const double cap = static_cast<double>(policy.max_bits) - 64;
  const double per = x.log2_upper();
  std::uint64_t n = static_cast<std::uint64_t>(std::max(0.0, cap / per));
  while (n > 0 && detail::power_bits_estimate(x, n) > cap) --n;
  return n;
}

namespace detail {

/// Compares trace floors with direct floors chunk by chunk.  The direct route
/// may still run out of precision near the limit; the check then ends just
/// before the failing index and direct_checked_to records how far it got.
inline void cross_check_direct(const AlgebraicReal& x, PatternScan& scan, const PrecisionPolicy& policy) {
  const Base b = Base::algebraic(x);
  const std::uint64_t top = std::min(direct_route_limit(b, policy), scan.data.floors.end() - 1);
  for (std::uint64_t lo = scan.n1; lo <= top;) {
    std::uint64_t hi = std::min(top, lo + 255);
    std::optional<FloorPowerSequence> direct;
    try {
      direct = floor_power_sequence(b, lo, hi, policy);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PrecisionExhausted || !e.index()) throw;
      const auto bad = static_cast<std::uint64_t>(*e.index());
      if (bad <= lo) return;
      hi = bad - 1;
      direct = floor_power_sequence(b, lo, hi, policy);
      lo = top + 1;  // stop after this partial chunk
    }
    for (std::uint64_t n = direct->start; n < direct->end(); ++n) {
      if (direct->at(n) != scan.data.floors.at(n)) {
        throw Error(ErrorCode::NotCertified, "trace and direct floors disagree", static_cast<std::int64_t>(n));
      }
    }
    scan.direct_checked_to = direct->end() - 1;
    if (lo <= top) lo = hi + 1;
  }
}

}  // namespace detail

/// All m in [N1, M] with u_{m+4} + u_m = u_{m+3} + u_{m+2}, each verified to
/// give floor(rho^{m+4}) + floor(rho^m) = floor(rho^{m+3}) + floor(rho^{m+2}).
inline PatternScan plastic_pattern_scan(std::uint64_t m_max, const PrecisionPolicy& policy = {}) {
  const AlgebraicReal rho = plastic_constant();
  PatternScan scan;
  scan.data = trace_floors(rho, m_max + 4, policy);
  scan.n1 = scan.data.n1;
  scan.m_max = m_max;
  const auto& a = scan.data.floors;
  const auto& s = scan.data.signs;
  for (std::uint64_t m = scan.n1; m <= m_max; ++m) {
    const bool by_u = s.u(m + 4) + s.u(m) == s.u(m + 3) + s.u(m + 2);
    const bool by_floor = a.at(m + 4) + a.at(m) == a.at(m + 3) + a.at(m + 2);
    if (by_u != by_floor) scan.equivalence_holds = false;
    if (by_u) {
      if (!by_floor) throw Error(ErrorCode::NotCertified, "plastic pattern hit fails the floor identity", static_cast<std::int64_t>(m));
      scan.hits.push_back(m);
    }
  }
  detail::cross_check_direct(rho, scan, policy);
  return scan;
}

/// All n in [N1, M] with u_n = u_{n+k} = u_{n+k+1}, each verified to give
/// floor(a^{n+k+1}) + floor(a^n) = 2 floor(a^{n+k}).
inline PatternScan kfib_pattern_scan(int k, std::uint64_t m_max, const PrecisionPolicy& policy = {}) {
  if (k < 5 || k % 2 == 0) throw Error(ErrorCode::BadDegree, "kfib_pattern_scan: odd k >= 5 required");
  const AlgebraicReal alpha = k_fibonacci_root(k);
  const auto kk = static_cast<std::uint64_t>(k);
  PatternScan scan;
  scan.data = trace_floors(alpha, m_max + kk + 1, policy);
  scan.n1 = scan.data.n1;
  scan.m_max = m_max;
  const auto& a = scan.data.floors;
  const auto& s = scan.data.signs;
  for (std::uint64_t n = scan.n1; n <= m_max; ++n) {
    const bool by_u = s.u(n + kk + 1) + s.u(n) == 2 * s.u(n + kk);
    const bool by_floor = a.at(n + kk + 1) + a.at(n) == 2 * a.at(n + kk);
    if (by_u != by_floor) scan.equivalence_holds = false;
    if (by_u) {
      if (!by_floor) throw Error(ErrorCode::NotCertified, "k-Fibonacci pattern hit fails the floor identity", static_cast<std::int64_t>(n));
      scan.hits.push_back(n);
    }
  }
  detail::cross_check_direct(alpha, scan, policy);
  return scan;
}

struct ChainTransferResult {
  int k = 0;
  std::vector<CollisionQuadruple> collisions;  // at k-scaled indices, values from direct floors
  std::vector<bool> verified;

  bool all_verified() const { return std::all_of(verified.begin(), verified.end(), [](bool b) { return b; }); }
};

/// Maps each collision (a, b, c, d) of x0 to (ka, kb, kc, kd) for x0^(1/k) and
/// verifies it with direct floors of the k-th root.
inline ChainTransferResult chain_transfer(const SidonScanReport& report, const AlgebraicReal& x0, int k,
                                          const PrecisionPolicy& policy = {}) {
  if (k < 2) throw Error(ErrorCode::BadDegree, "chain_transfer: k >= 2 required");
  const Base xk = Base::algebraic(kth_root(x0, k));
  const auto kk = static_cast<std::uint64_t>(k);
  ChainTransferResult out;
  out.k = k;
  for (const auto& c : report.collisions) {
    CollisionQuadruple t;
    for (int i = 0; i < 4; ++i) {
      t.indices[i] = kk * c.indices[i];
      t.values[i] = floor_pow(xk, t.indices[i], policy).value;
    }
    t.shared_sum = t.values[0] + t.values[3];
    const bool ok = t.shared_sum == t.values[1] + t.values[2] && t.values == c.values;
    out.collisions.push_back(std::move(t));
    out.verified.push_back(ok);
  }
  return out;
}

/// Finite evidence only: the smallest N0 such that [N0, N_max] has no
/// collision and no repeated value, provided that tail has at least `window`
/// indices.  This never proves the tail-Sidon property.
inline std::optional<std::uint64_t> tail_sidon_probe(const Base& x, std::uint64_t n_max, std::uint64_t window = 1,
                                                     const PrecisionPolicy& policy = {}) {
  if (n_max < 1) return std::nullopt;
  const FloorPowerSequence seq = floor_power_sequence(x, 1, n_max, policy);
  const SidonScanReport rep = find_collisions(seq, 1, n_max);
  std::uint64_t n0 = 1;
  for (const auto& c : rep.collisions) n0 = std::max(n0, c.indices[0] + 1);
  for (const auto& d : rep.duplicates) n0 = std::max(n0, d.i + 1);
  if (n0 > n_max || n_max - n0 + 1 < std::max<std::uint64_t>(window, 1)) return std::nullopt;
  return n0;
}

}  // namespace sidontail
