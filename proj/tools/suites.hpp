#pragma once

#include "cli_support.hpp"

#include <random>
#include <set>

namespace sidontail::cli {

struct SuiteConfig {
  std::uint64_t to = 0;  // 0: suite default
  int k = 13;
  std::string delta = "0.5";
  std::uint64_t samples = 10000;
  std::uint64_t depth = 60;
  std::uint64_t count = 20;
  std::uint64_t max_d = 5;
  std::uint64_t probes = 100;
  unsigned threads = 0;
  std::uint64_t seed = 42;
  PrecisionPolicy policy;
};

/// Exact rational from "a/b" or a plain decimal such as "0.1".
inline mpq_class parse_rational(const std::string& s) {
  mpq_class q;
  const auto dot = s.find('.');
  if (s.find('/') != std::string::npos || dot == std::string::npos) {
    q = mpq_class(s);
  } else {
    const std::string frac = s.substr(dot + 1);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(frac.size()));
    q = mpq_class(mpz_class(s.substr(0, dot) + frac), den);
  }
  q.canonicalize();
  return q;
}

inline Json suite_plastic(const SuiteConfig& cfg, CheckList& checks) {
  const std::uint64_t M = cfg.to ? cfg.to : 500;
  const PatternScan scan = plastic_pattern_scan(M, cfg.policy);
  checks.add("hits_nonempty", !scan.hits.empty(), {{"count", scan.hits.size()}});
  bool floors_ok = true;
  const auto& a = scan.data.floors;
  for (auto m : scan.hits) floors_ok &= a.at(m + 4) + a.at(m) == a.at(m + 3) + a.at(m + 2);
  checks.add("hits_satisfy_floor_identity", floors_ok);
  checks.add("u_criterion_equivalence", scan.equivalence_holds);
  std::vector<std::uint64_t> brute;
  for (const auto& c : find_collisions(a, scan.n1, M + 4).collisions) {
    const auto m = c.indices[0];
    if (m <= M && c.indices[1] == m + 2 && c.indices[2] == m + 3 && c.indices[3] == m + 4) brute.push_back(m);
  }
  checks.add("equals_brute_force_shape", brute == scan.hits, {{"brute_force_count", brute.size()}});
  const ConjugateSpectrum s = conjugate_spectrum(plastic_constant(), 128);
  const DyadicInterval omega = abs(*s.dominant_pair_argument);
  const Arc I = plastic_window(omega);
  const OrbitStats st = orbit_visits(div(omega, two_pi(160), 160), to_turns(I, 160), M);
  const std::set<std::uint64_t> hits(scan.hits.begin(), scan.hits.end());
  std::uint64_t visits = 0;
  bool subset = st.undecided_indices.empty();
  for (auto n : st.visit_indices) {
    if (n < scan.n1) continue;
    ++visits;
    subset &= hits.count(n) > 0;
  }
  checks.add("window_visits_are_hits", subset, {{"visits", visits}, {"undecided", st.undecided_indices.size()}});
  Json hit_list = scan.hits;
  return Json{{"n1", scan.n1}, {"m_max", M}, {"direct_checked_to", scan.direct_checked_to}, {"omega", interval_json(omega)},
              {"window", {{"lo", interval_json(I.lo)}, {"hi", interval_json(I.hi)}}}, {"hits", hit_list}};
}

inline Json suite_kfib(const SuiteConfig& cfg, CheckList& checks) {
  const int k = cfg.k;
  const std::uint64_t M = cfg.to ? cfg.to : 5000;
  const PatternScan scan = kfib_pattern_scan(k, M, cfg.policy);
  const auto kk = static_cast<std::uint64_t>(k);
  checks.add("hits_nonempty", !scan.hits.empty(), {{"count", scan.hits.size()}});
  bool floors_ok = true;
  const auto& a = scan.data.floors;
  for (auto n : scan.hits) floors_ok &= a.at(n + kk + 1) + a.at(n) == 2 * a.at(n + kk);
  checks.add("hits_satisfy_floor_identity", floors_ok);
  checks.add("u_criterion_equivalence", scan.equivalence_holds);
  const ConjugateSpectrum s = conjugate_spectrum(k_fibonacci_root(k), 128);
  const DyadicInterval omega = abs(*s.dominant_pair_argument);
  const DyadicInterval p = pi(128);
  const DyadicInterval kn = DyadicInterval::point(k);
  const bool omega_ok = omega.certainly_greater(div(p, kn, 128)) && omega.certainly_less(div(mul(p, DyadicInterval::point(3), 128), kn, 128));
  checks.add("omega_in_(pi/k,3pi/k)", omega_ok, interval_json(omega));
  const DyadicInterval delta = shift_angle(k, s);
  checks.add("delta_in_(0,pi/2)", delta.positive() && delta.certainly_less(ldexp(p, -1)), interval_json(delta));
  Json out{{"k", k}, {"n1", scan.n1}, {"m_max", M}, {"direct_checked_to", scan.direct_checked_to},
           {"omega", interval_json(omega)}, {"delta", interval_json(delta)}, {"hit_count", scan.hits.size()}};
  if (k >= 12) {
    const KFibWindow win = kfib_window(k, omega, delta, default_eta(omega, delta));
    const std::uint64_t n_star = en_tail_threshold(k, s, win.c0);
    const OrbitStats st = orbit_visits(div(omega, two_pi(160), 160), to_turns(win.J, 160), M);
    const std::set<std::uint64_t> hits(scan.hits.begin(), scan.hits.end());
    bool ok = true;
    std::uint64_t used = 0;
    for (auto n : st.visit_indices) {
      if (n < std::max(n_star, scan.n1)) continue;
      ++used;
      ok &= hits.count(n) > 0;
    }
    checks.add("window_visits_beyond_n_star_are_hits", ok, {{"n_star", n_star}, {"visits", used}});
    out["n_star"] = n_star;
  }
  out["hits"] = scan.hits;
  return out;
}

inline Json suite_chain(const SuiteConfig& cfg, CheckList& checks) {
  const std::uint64_t N = cfg.to ? cfg.to : 300;
  const AlgebraicReal rho = plastic_constant();
  const FloorPowerSequence base = floor_power_sequence(Base::algebraic(rho), 1, N, cfg.policy);
  const PatternScan scan = plastic_pattern_scan(N >= 4 ? N - 4 : 0, cfg.policy);
  SidonScanReport rep;
  for (auto m : scan.hits) {
    CollisionQuadruple c;
    c.indices = {m, m + 2, m + 3, m + 4};
    for (int i = 0; i < 4; ++i) c.values[i] = base.at(c.indices[i]);
    c.shared_sum = c.values[0] + c.values[3];
    rep.collisions.push_back(std::move(c));
  }
  Json out{{"n_max", N}, {"collisions", rep.collisions.size()}};
  for (int k : {2, 3}) {
    const auto kk = static_cast<std::uint64_t>(k);
    const FloorPowerSequence root = floor_power_sequence(Base::algebraic(kth_root(rho, k)), kk, kk * N, cfg.policy);
    std::uint64_t mismatches = 0;
    for (std::uint64_t n = 1; n <= N; ++n) mismatches += root.at(kk * n) != base.at(n) ? 1 : 0;
    checks.add("termwise_k" + std::to_string(k), mismatches == 0, {{"mismatches", mismatches}});
    const ChainTransferResult t = chain_transfer(rep, rho, k, cfg.policy);
    checks.add("transfer_k" + std::to_string(k), t.all_verified() && !t.collisions.empty(), {{"transferred", t.collisions.size()}});
  }
  return out;
}

inline Json suite_thm1(const SuiteConfig& cfg, CheckList& checks) {
  const Thresholds one = thresholds([] { BadSetConfig c; c.delta = 1; return c; }());
  checks.add("thresholds_delta_1", one.D0 == 3 && one.V == 3, {{"D0", one.D0}, {"V", one.V}, {"U_star", one.U_star}});
  BadSetConfig bc;
  bc.delta = parse_rational(cfg.delta);
  bc.sample_count = cfg.samples;
  bc.scan_depth = cfg.depth;
  bc.d_lo = 1;
  bc.d_hi = cfg.depth;
  bc.rng_seed = cfg.seed;
  bc.threads = cfg.threads;
  const Thresholds th = thresholds(bc);
  std::uint64_t slope_ok = 0, slope_total = 0;
  for (std::uint64_t v = 1; v < th.V; ++v) {
    for (std::uint64_t du : {0, 1, 7}) {
      const std::uint64_t u = th.U_of(v) + du;
      for (std::uint64_t w : {v, (u + v) / 2, u}) {
        ++slope_total;
        try {
          slope_certificate(u, v, w, bc);
          ++slope_ok;
        } catch (const Error&) {
        }
      }
    }
  }
  checks.add("slope_certificates", slope_ok == slope_total, {{"certified", slope_ok}, {"total", slope_total}});
  std::uint64_t sub_ok = 0, sub_total = 0;
  for (std::uint64_t v = 1; v <= th.V + 1; ++v) {
    for (std::uint64_t w = v; w <= v + 3; ++w) {
      for (std::uint64_t u : {w, w + 2, std::max(w, th.U_star + 1)}) {
        for (std::uint64_t d = th.D0; d <= th.D0 + 10; d += 5) {
          ++sub_total;
          sub_ok += sublevel_vs_bound(u, v, w, d, bc).ok ? 1 : 0;
        }
      }
    }
  }
  checks.add("sublevel_bounds", sub_ok == sub_total && sub_total >= 200, {{"ok", sub_ok}, {"total", sub_total}});
  const DecayCurve c = scan_bad_measure(bc);
  checks.add("decay_slope_negative", c.fitted_log_slope < 0,
             {{"slope", c.fitted_log_slope}, {"stderr", c.slope_stderr}});
  const double f30 = c.fraction_largest_at_least(30), f10 = c.fraction_largest_at_least(10);
  checks.add("tail_fraction_decreases", f30 < f10, {{"at_least_10", f10}, {"at_least_30", f30}});
  return Json{{"D0", th.D0}, {"V", th.V}, {"U_star", th.U_star}, {"excluded_samples", c.excluded_samples}};
}

inline Json suite_aphit(const SuiteConfig& cfg, CheckList& checks) {
  const auto specs = diagonal_ap_specs(cfg.count, cfg.max_d);
  const DyadicInterval start(exact_add(Dyadic(2), pow2(-4)), exact_add(Dyadic(2), pow2(-3)));
  const NestedState st = nested_builder(specs, start);
  checks.add("final_interval_positive", compare(st.current.lo(), st.current.hi()) < 0);
  const Base mid = Base::dyadic(st.current.mid());
  bool all = true;
  for (const auto& w : st.satisfied) {
    const auto n = hits_ap(mid, w.spec, w.n, cfg.policy);
    all &= n && *n <= w.n && floor_pow(mid, w.n, cfg.policy).value == w.m;
  }
  checks.add("witnesses_verify_at_midpoint", all, {{"witnesses", st.satisfied.size()}});
  std::mt19937_64 rng(cfg.seed);
  std::uint64_t ok = 0;
  for (std::uint64_t t = 0; t < cfg.probes; ++t) {
    const std::uint64_t d = 1 + rng() % 10;
    const APSpec spec{d, rng() % d};
    const std::uint64_t N = 1 + rng() % 100;
    const mpq_class len(static_cast<long>(1024 + rng() % 8192), 1 << 20);
    const mpq_class a = 1 + (1 - len) * mpq_class(static_cast<long>(rng() % 4096), 4096);
    const DyadicInterval window(Dyadic::from_rational(a, 64, Round::Up), Dyadic::from_rational(a + len, 64, Round::Down), 64);
    try {
      const DensityWitness w = density_probe(spec, N, window);
      ok += (w.n >= N && spec.matches(w.cell.m)) ? 1 : 0;
    } catch (const Error&) {
    }
  }
  checks.add("density_probes", ok == cfg.probes, {{"succeeded", ok}, {"total", cfg.probes}});
  return Json{{"final_exponent", st.min_next_exponent}, {"final", interval_json(st.current)}};
}

}  // namespace sidontail::cli
