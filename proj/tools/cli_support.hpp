#pragma once

#include <sidontail/sidontail.hpp>

#include <json.hpp>

#include <sstream>
#include <string>
#include <vector>

namespace sidontail::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

enum Exit : int { kOk = 0, kCheckFailed = 1, kPrecisionExhausted = 2, kCollisionsFound = 3 };

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) out.push_back(item);
  return out;
}

/// Exact base-10 expansion of a dyadic (always finite).
inline std::string exact_decimal(const Dyadic& x) {
  auto [m, e] = x.mantissa_exponent();
  if (e >= 0) return mpz_class(m << static_cast<mp_bitcnt_t>(e)).get_str();
  const auto k = static_cast<unsigned long>(-e);
  mpz_class five;
  mpz_ui_pow_ui(five.get_mpz_t(), 5, k);
  const mpz_class scaled = abs(m) * five;  // |x| * 10^k
  std::string digits = scaled.get_str();
  if (digits.size() <= k) digits.insert(0, k - digits.size() + 1, '0');
  std::string out = digits.substr(0, digits.size() - k) + "." + digits.substr(digits.size() - k);
  while (out.back() == '0') out.pop_back();
  if (out.back() == '.') out.pop_back();
  return (m < 0 ? "-" : "") + out;
}

inline Json interval_json(const DyadicInterval& iv) {
  return Json{{"lo", exact_decimal(iv.lo())},
              {"hi", exact_decimal(iv.hi())},
              {"lo_bits", iv.lo().prec()},
              {"hi_bits", iv.hi().prec()},
              {"approx", iv.mid().to_string(17)}};
}

/// Decimal literal rounded to nearest at 64 bits.
inline Dyadic parse_decimal(const std::string& text) { return Dyadic::parse(text, 64, Round::Nearest); }

/// Open window "lo,hi" with endpoints rounded inward at 64 bits.
inline DyadicInterval parse_window(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw std::invalid_argument("window must be 'lo,hi'");
  return {Dyadic::parse(parts[0], 64, Round::Up), Dyadic::parse(parts[1], 64, Round::Down), 64};
}

/// plastic | kfib:k | dyadic:value | root:c_n,...,c_0 (largest real root, coefficients from the top degree down).
inline Base parse_base(const std::string& sel) {
  if (sel == "plastic") return Base::algebraic(plastic_constant());
  const auto colon = sel.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("unknown base selector: " + sel);
  const std::string kind = sel.substr(0, colon), arg = sel.substr(colon + 1);
  if (kind == "kfib") return Base::algebraic(k_fibonacci_root(std::stoi(arg)));
  if (kind == "dyadic") return Base::dyadic(parse_decimal(arg));
  if (kind == "root") {
    std::vector<mpz_class> c;
    for (const auto& s : split(arg, ',')) c.emplace_back(s);
    std::reverse(c.begin(), c.end());
    IntPolynomial p(std::move(c));
    if (p.degree() < 1) throw Error(ErrorCode::BadDegree, "root: polynomial must be nonconstant");
    const IntPolynomial sf = square_free_part(p);
    // Cauchy bound on the roots.
    mpz_class bound = 0;
    for (int i = 0; i < p.degree(); ++i) bound = std::max(bound, mpz_class(abs(p.coeff(i))));
    const mpz_class lead = abs(p.coeff(p.degree()));
    bound = bound / lead + 2;
    const auto roots = isolate_real_roots(sf, {Dyadic(1), Dyadic::from_integer(bound)});
    if (roots.empty()) throw std::invalid_argument("root: no real root above 1");
    const auto top = std::max_element(roots.begin(), roots.end(),
                                      [](const DyadicInterval& a, const DyadicInterval& b) { return compare(a.lo(), b.lo()) < 0; });
    const Irreducibility irr = detail::small_monic_irreducible(p) ? Irreducibility::Verified : Irreducibility::Unknown;
    return Base::algebraic(AlgebraicReal(p, *top, "root:" + arg, irr));
  }
  throw std::invalid_argument("unknown base selector: " + sel);
}

inline Json collision_json(const CollisionQuadruple& c) {
  Json idx = Json::array(), vals = Json::array();
  for (int i = 0; i < 4; ++i) {
    idx.push_back(c.indices[i]);
    vals.push_back(c.values[i].get_str());
  }
  return Json{{"indices", idx}, {"values", vals}, {"sum", c.shared_sum.get_str()}};
}

inline Json report_json(const SidonScanReport& r) {
  Json cs = Json::array(), ds = Json::array();
  for (const auto& c : r.collisions) cs.push_back(collision_json(c));
  for (const auto& d : r.duplicates) ds.push_back(Json{{"i", d.i}, {"j", d.j}, {"value", d.value.get_str()}});
  return Json{{"base", r.base}, {"n_lo", r.n_lo}, {"n_hi", r.n_hi}, {"is_sidon_on_range", r.is_sidon_on_range()},
              {"collision_count", r.collisions.size()}, {"collisions", cs}, {"duplicates", ds}};
}

/// Collects named pass/fail checks for the verify suites.
class CheckList {
 public:
  void add(std::string name, bool pass, Json detail = Json::object()) {
    all_ &= pass;
    items_.push_back(Json{{"name", std::move(name)}, {"pass", pass}, {"detail", std::move(detail)}});
  }
  bool all_pass() const { return all_; }
  Json to_json() const { return items_; }

 private:
  Json items_ = Json::array();
  bool all_ = true;
};

}  // namespace sidontail::cli
