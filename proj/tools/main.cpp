#include "suites.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>

using namespace sidontail;
using namespace sidontail::cli;

namespace {

struct Global {
  Precision precision_init = 128;
  Precision precision_max = 4096;
  std::uint64_t seed = 42;
  std::string out;
  std::string format = "json";

  PrecisionPolicy policy() const {
    PrecisionPolicy p;
    p.initial_bits = precision_init;
    p.max_bits = precision_max;
    p.validate();
    return p;
  }
};

/// Command output: a JSON envelope, or a CSV body for table exports.
struct Output {
  Json result = Json::object();
  std::string csv;
  int exit_code = kOk;
};

Json envelope(const std::string& command, const Json& config, const Global& g) {
  return Json{{"schema_version", kSchemaVersion},
              {"artifact_version", SIDONTAIL_VERSION},
              {"command", command},
              {"config", config},
              {"seed", g.seed},
              {"precision_policy", {{"initial_bits", g.precision_init}, {"max_bits", g.precision_max}}}};
}

const char* status_name(int code) {
  switch (code) {
    case kOk: return "ok";
    case kCheckFailed: return "check_failed";
    case kPrecisionExhausted: return "precision_exhausted";
    case kCollisionsFound: return "collisions_found";
  }
  return "error";
}

void emit(const Global& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file " + g.out);
  f << text;
}

/// Runs one command; PrecisionExhausted becomes exit code 2 with the failing index.
int run(const std::string& command, const Json& config, const Global& g, const std::function<Output()>& body) {
  Json doc = envelope(command, config, g);
  Output out;
  try {
    out = body();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::PrecisionExhausted) throw;
    out.exit_code = kPrecisionExhausted;
    out.csv.clear();
    Json err{{"code", to_string(e.code())}, {"message", e.what()}};
    if (e.index()) err["index"] = *e.index();
    doc["error"] = err;
  }
  doc["status"] = status_name(out.exit_code);
  doc["exit_code"] = out.exit_code;
  doc["result"] = out.result;
  if (g.format == "csv" && !out.csv.empty()) emit(g, out.csv);
  else emit(g, doc.dump(2) + "\n");
  return out.exit_code;
}

std::vector<mpz_class> parse_values(const std::string& s) {
  std::vector<mpz_class> v;
  for (const auto& t : split(s, ',')) v.emplace_back(t);
  return v;
}

Output cmd_seq(const std::string& base_sel, std::uint64_t from, std::uint64_t to, const Global& g) {
  const PrecisionPolicy policy = g.policy();
  const Base x = parse_base(base_sel);
  const FloorPowerSequence seq = floor_power_sequence(x, from, to, policy);
  std::optional<SignSequence> signs;
  std::optional<TraceSequence> traces;
  std::optional<std::uint64_t> n1;
  if (x.is_algebraic() && x.algebraic_value().min_poly().coeff(x.algebraic_value().min_poly().degree()) == 1) {
    try {
      const AlgebraicReal& a = x.algebraic_value();
      n1 = residual_threshold(a, conjugate_spectrum(a, policy.initial_bits));
      if (to >= *n1) {
        traces = trace_sequence(a.min_poly(), to);
        signs = sign_sequence(a, *traces, std::max(from, *n1), to, policy);
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::PrecisionExhausted) throw;
    }
  }
  Output out;
  Json rows = Json::array();
  bool dual_ok = true;
  for (std::uint64_t n = from; n <= to; ++n) {
    Json row{{"n", n}, {"a_n", seq.at(n).get_str()}, {"bits", seq.precision_log[n - from]}};
    if (signs && signs->contains(n)) {
      const bool ok = traces->at(n) - signs->u(n) == seq.at(n);
      dual_ok &= ok;
      row["u_n"] = signs->u(n);
      row["dual_route_ok"] = ok;
    }
    rows.push_back(row);
  }
  out.result = Json{{"base", seq.base_label}, {"n1", n1 ? Json(*n1) : Json(nullptr)}, {"rows", rows}, {"dual_route_ok", dual_ok}};
  if (!dual_ok) out.exit_code = kCheckFailed;
  std::ostringstream csv;
  write_sequence_csv(csv, seq, signs ? &*signs : nullptr);
  out.csv = csv.str();
  return out;
}

Output cmd_collide(const std::string& base_sel, const std::string& values, std::uint64_t from, std::uint64_t to,
                   const Global& g) {
  SidonScanReport rep;
  if (!values.empty()) {
    rep = find_collisions(parse_values(values), 1);
  } else {
    const FloorPowerSequence seq = floor_power_sequence(parse_base(base_sel), from, to, g.policy());
    rep = find_collisions(seq, from, to);
    rep.base = seq.base_label;
  }
  Output out;
  out.result = report_json(rep);
  out.exit_code = rep.is_sidon_on_range() ? kOk : kCollisionsFound;
  std::ostringstream csv;
  csv << "a,b,c,d,sum\n";
  for (const auto& c : rep.collisions) {
    csv << c.indices[0] << ',' << c.indices[1] << ',' << c.indices[2] << ',' << c.indices[3] << ',' << c.shared_sum.get_str() << '\n';
  }
  out.csv = csv.str();
  return out;
}

Output cmd_verify(const std::string& suite, SuiteConfig sc, const Global& g) {
  sc.policy = g.policy();
  sc.seed = g.seed;
  CheckList checks;
  Json data;
  if (suite == "plastic") data = suite_plastic(sc, checks);
  else if (suite == "kfib") data = suite_kfib(sc, checks);
  else if (suite == "chain") data = suite_chain(sc, checks);
  else if (suite == "thm1") data = suite_thm1(sc, checks);
  else if (suite == "aphit") data = suite_aphit(sc, checks);
  else throw std::invalid_argument("unknown suite: " + suite);
  Output out;
  out.result = Json{{"suite", suite}, {"all_pass", checks.all_pass()}, {"checks", checks.to_json()}, {"data", data}};
  out.exit_code = checks.all_pass() ? kOk : kCheckFailed;
  return out;
}

Output cmd_orbit(const std::string& base_sel, const std::string& window, std::uint64_t N, int k) {
  const Precision bits = 160;
  const Base x = parse_base(base_sel);
  if (!x.is_algebraic()) throw std::invalid_argument("orbit: base must be algebraic");
  const ConjugateSpectrum s = conjugate_spectrum(x.algebraic_value(), 128);
  if (!s.dominant_pair_argument) throw Error(ErrorCode::WindowViolation, "orbit: base has no dominant non-real pair");
  const DyadicInterval omega = abs(*s.dominant_pair_argument);
  Arc arc;
  if (window == "plastic") {
    arc = to_turns(plastic_window(omega), bits);
  } else if (window == "kfib") {
    const DyadicInterval delta = shift_angle(k, s);
    arc = to_turns(kfib_window(k, omega, delta, default_eta(omega, delta)).J, bits);
  } else {
    const DyadicInterval w = parse_window(window);
    arc = {DyadicInterval::point(w.lo()), DyadicInterval::point(w.hi())};
  }
  const OrbitStats st = orbit_visits(div(omega, two_pi(bits), bits), arc, N);
  Output out;
  out.result = Json{{"omega", interval_json(omega)},
                    {"angle_turns", interval_json(st.angle)},
                    {"window_turns", {{"lo", interval_json(arc.lo)}, {"hi", interval_json(arc.hi)}}},
                    {"N", N},
                    {"visit_count", st.visit_indices.size()},
                    {"visit_fraction", st.visit_fraction()},
                    {"window_length", sub(arc.hi, arc.lo, 64).mid().to_double()},
                    {"star_discrepancy", st.star_discrepancy},
                    {"extreme_discrepancy", st.extreme_discrepancy},
                    {"undecided", st.undecided_indices},
                    {"visits", st.visit_indices}};
  std::ostringstream csv;
  write_orbit_csv(csv, st);
  out.csv = csv.str();
  return out;
}

Output cmd_decay(const std::string& delta, std::uint64_t samples, std::uint64_t depth, std::uint64_t d_lo,
                 std::uint64_t d_hi, unsigned threads, const Global& g) {
  BadSetConfig c;
  c.delta = parse_rational(delta);
  c.sample_count = samples;
  c.scan_depth = depth;
  c.d_lo = d_lo;
  c.d_hi = d_hi ? d_hi : depth;
  c.rng_seed = g.seed;
  c.threads = threads;
  const DecayCurve curve = scan_bad_measure(c);
  Json pts = Json::array();
  for (const auto& p : curve.points) {
    pts.push_back(Json{{"d", p.d}, {"hit_count", p.hit_count}, {"sample_count", p.sample_count}, {"estimated_measure", p.estimated_measure}});
  }
  Output out;
  out.result = Json{{"delta", c.delta.get_str()},
                    {"points", pts},
                    {"fitted_log_slope", curve.fitted_log_slope},
                    {"slope_stderr", curve.slope_stderr},
                    {"excluded_samples", curve.excluded_samples},
                    {"largest_index_histogram", curve.largest_index_histogram}};
  std::ostringstream csv;
  write_decay_csv(csv, curve);
  out.csv = csv.str();
  return out;
}

Json nested_json(const NestedState& st) {
  Json w = Json::array();
  for (const auto& x : st.satisfied) w.push_back(Json{{"d", x.spec.d}, {"r", x.spec.r}, {"n", x.n}, {"m", x.m.get_str()}});
  return Json{{"current", interval_json(st.current)}, {"min_next_exponent", st.min_next_exponent}, {"witnesses", w}};
}

Output cmd_aphit_build(std::uint64_t count, std::uint64_t max_d, const std::string& start, std::uint64_t max_exp,
                       const Global& g) {
  NestedBuilderOptions opt;
  opt.max_exponent = max_exp;
  const NestedState st = nested_builder(diagonal_ap_specs(count, max_d), parse_window(start), opt);
  const Base mid = Base::dyadic(st.current.mid());
  bool ok = true;
  for (const auto& w : st.satisfied) ok &= floor_pow(mid, w.n, g.policy()).value == w.m;
  Output out;
  out.result = nested_json(st);
  out.result["midpoint_verified"] = ok;
  if (!ok) out.exit_code = kCheckFailed;
  return out;
}

Output cmd_aphit_probe(std::uint64_t d, std::uint64_t r, std::uint64_t N, const std::string& window) {
  const DensityWitness w = density_probe({d, r}, N, parse_window(window));
  Output out;
  out.result = Json{{"n", w.n}, {"m", w.cell.m.get_str()}, {"cell_lo", interval_json(w.cell.lo)}, {"cell_hi", interval_json(w.cell.hi)}};
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified floor-power sequences, Sidon collisions and AP hitting"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", SIDONTAIL_VERSION);
  Global g;
  app.add_option("--precision-init", g.precision_init, "initial working precision in bits")->capture_default_str();
  app.add_option("--precision-max", g.precision_max, "maximum working precision in bits")->capture_default_str();
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--out", g.out, "output file (default stdout)");
  app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  std::string base = "plastic", values, suite, window, delta = "0.5", start = "2.0625,2.125";
  std::uint64_t from = 1, to = 0, N = 100000, samples = 10000, depth = 60, d_lo = 1, d_hi = 0;
  std::uint64_t count = 20, max_d = 5, max_exp = std::uint64_t{1} << 16, d = 1, r = 0, n_min = 1;
  unsigned threads = 0;
  int k = 13;
  std::function<int()> action;

  auto* seq = app.add_subcommand("seq", "floor-power sequence table");
  seq->add_option("--base", base, "plastic | kfib:k | dyadic:v | root:c_n,...,c_0")->capture_default_str();
  seq->add_option("--from", from)->capture_default_str();
  seq->add_option("--to", to)->required();
  seq->callback([&] {
    action = [&] { return run("seq", Json{{"base", base}, {"from", from}, {"to", to}}, g, [&] { return cmd_seq(base, from, to, g); }); };
  });

  auto* collide = app.add_subcommand("collide", "collision scan (exit 3 when collisions are found)");
  collide->add_option("--base", base)->capture_default_str();
  collide->add_option("--values", values, "comma-separated nondecreasing integers instead of a base");
  collide->add_option("--from", from)->capture_default_str();
  collide->add_option("--to", to);
  collide->callback([&] {
    action = [&] {
      if (values.empty() && to == 0) throw CLI::RequiredError("--to");
      return run("collide", Json{{"base", values.empty() ? base : "values"}, {"values", values}, {"from", from}, {"to", to}}, g,
                 [&] { return cmd_collide(base, values, from, to, g); });
    };
  });

  SuiteConfig sc;
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("--suite", suite)->required()->check(CLI::IsMember({"plastic", "kfib", "chain", "thm1", "aphit"}));
  verify->add_option("--to", sc.to, "index bound (suite default when 0)");
  verify->add_option("--k", sc.k)->capture_default_str();
  verify->add_option("--delta", sc.delta)->capture_default_str();
  verify->add_option("--samples", sc.samples)->capture_default_str();
  verify->add_option("--depth", sc.depth)->capture_default_str();
  verify->add_option("--count", sc.count)->capture_default_str();
  verify->add_option("--max-d", sc.max_d)->capture_default_str();
  verify->add_option("--probes", sc.probes)->capture_default_str();
  verify->add_option("--threads", sc.threads)->capture_default_str();
  verify->callback([&] {
    action = [&] {
      const Json cfg{{"suite", suite}, {"to", sc.to}, {"k", sc.k}, {"delta", sc.delta}, {"samples", sc.samples},
                     {"depth", sc.depth}, {"count", sc.count}, {"max_d", sc.max_d}, {"probes", sc.probes}};
      return run("verify", cfg, g, [&] { return cmd_verify(suite, sc, g); });
    };
  });

  auto* orbit = app.add_subcommand("orbit", "orbit of n*omega/(2 pi) mod 1 against a window");
  orbit->add_option("--base", base)->capture_default_str();
  orbit->add_option("--window", window, "plastic | kfib | lo,hi (in turns)")->required();
  orbit->add_option("--N", N)->capture_default_str();
  orbit->add_option("--k", k)->capture_default_str();
  orbit->callback([&] {
    action = [&] {
      return run("orbit", Json{{"base", base}, {"window", window}, {"N", N}, {"k", k}}, g, [&] { return cmd_orbit(base, window, N, k); });
    };
  });

  auto* decay = app.add_subcommand("decay", "Monte Carlo decay of the bad sets");
  decay->add_option("--delta", delta)->capture_default_str();
  decay->add_option("--samples", samples)->capture_default_str();
  decay->add_option("--depth", depth)->capture_default_str();
  decay->add_option("--d-lo", d_lo)->capture_default_str();
  decay->add_option("--d-hi", d_hi, "default: depth");
  decay->add_option("--threads", threads)->capture_default_str();
  decay->callback([&] {
    action = [&] {
      const Json cfg{{"delta", delta}, {"samples", samples}, {"depth", depth}, {"d_lo", d_lo}, {"d_hi", d_hi ? d_hi : depth}};
      return run("decay", cfg, g, [&] { return cmd_decay(delta, samples, depth, d_lo, d_hi, threads, g); });
    };
  });

  auto* build = app.add_subcommand("aphit-build", "nested intervals meeting diagonal AP specs");
  build->add_option("--count", count)->capture_default_str();
  build->add_option("--max-d", max_d)->capture_default_str();
  build->add_option("--start", start, "lo,hi")->capture_default_str();
  build->add_option("--max-exponent", max_exp)->capture_default_str();
  build->callback([&] {
    action = [&] {
      const Json cfg{{"count", count}, {"max_d", max_d}, {"start", start}, {"max_exponent", max_exp}};
      return run("aphit-build", cfg, g, [&] { return cmd_aphit_build(count, max_d, start, max_exp, g); });
    };
  });

  auto* probe = app.add_subcommand("aphit-probe", "density witness for one progression");
  probe->add_option("--d", d)->capture_default_str();
  probe->add_option("--r", r)->capture_default_str();
  probe->add_option("--N", n_min)->capture_default_str();
  probe->add_option("--window", window, "lo,hi")->required();
  probe->callback([&] {
    action = [&] {
      return run("aphit-probe", Json{{"d", d}, {"r", r}, {"N", n_min}, {"window", window}}, g,
                 [&] { return cmd_aphit_probe(d, r, n_min, window); });
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kCheckFailed;
  }
  try {
    return action();
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCheckFailed;
  }
}
