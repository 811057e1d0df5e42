#ifndef FORGE_JSON_IO_HPP
#define FORGE_JSON_IO_HPP

// JSON encodings of the domain types. Rationals travel as "num/den" strings
// (integers and decimal literals are accepted on input), complex numbers as
// {"re": .., "im": ..}. Keys are emitted sorted, so output is deterministic.

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "forge/algebra.hpp"
#include "forge/arithmetic.hpp"
#include "forge/characters.hpp"
#include "forge/error.hpp"
#include "forge/rational.hpp"
#include "forge/scalar.hpp"
#include "forge/semigroup.hpp"
#include "forge/weights.hpp"

namespace forge::io {

using Json = nlohmann::json;

inline const Json& require(const Json& j, const std::string& key) {
  if (!j.is_object()) throw InputError("expected a JSON object holding '" + key + "'");
  auto it = j.find(key);
  if (it == j.end()) throw InputError("missing key '" + key + "'");
  return *it;
}

inline double number(const Json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return to_double(parse_rational(j.get<std::string>()));
  throw InputError(what + " must be a number");
}

inline std::uint64_t unsigned_integer(const Json& j, const std::string& what) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  throw InputError(what + " must be a nonnegative integer");
}

// ---------------------------------------------------------------------------
// rationals and vectors

inline Json to_json(const Rational& q) { return format_rational(q); }

inline Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.dump());
  if (j.is_number_float()) return parse_rational(j.dump());
  throw InputError("expected a rational (\"num/den\" string or number)");
}

inline Json to_json(const RationalVector& v) {
  Json a = Json::array();
  for (const auto& q : v) a.push_back(to_json(q));
  return a;
}

inline RationalVector vector_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("expected an array of rationals");
  RationalVector v;
  for (const auto& x : j) v.push_back(rational_from_json(x));
  return v;
}

inline Json to_json(const std::vector<RationalVector>& vs) {
  Json a = Json::array();
  for (const auto& v : vs) a.push_back(to_json(v));
  return a;
}

inline std::vector<RationalVector> vectors_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("expected an array of rational vectors");
  std::vector<RationalVector> out;
  for (const auto& v : j) out.push_back(vector_from_json(v));
  return out;
}

// ---------------------------------------------------------------------------
// complex numbers

/// Parses "a", "bi", "a+bi", "a-bi" (also with "j"); whitespace ignored.
inline Complex parse_complex(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw InputError("empty complex literal");
  auto to_d = [&](const std::string& part) -> double {
    if (part.empty() || part == "+") return 1.0;
    if (part == "-") return -1.0;
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      throw InputError("malformed complex literal '" + text + "'");
    }
    if (used != part.size()) throw InputError("malformed complex literal '" + text + "'");
    return v;
  };
  const char last = s.back();
  if (last != 'i' && last != 'j') return {to_d(s), 0.0};
  s.pop_back();
  // split at the last sign that is not an exponent sign
  std::size_t split = std::string::npos;
  for (std::size_t i = s.size(); i-- > 1;)
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split = i;
      break;
    }
  if (split == std::string::npos) return {0.0, to_d(s)};
  return {to_d(s.substr(0, split)), to_d(s.substr(split))};
}

/// Comma-separated list of complex literals.
inline std::vector<Complex> parse_complex_list(const std::string& text) {
  std::vector<Complex> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      out.push_back(parse_complex(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(parse_complex(cur));
  return out;
}

inline Json to_json(const Complex& z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }
inline Json to_json(const ExactComplex& z) { return Json{{"re", to_json(z.re)}, {"im", to_json(z.im)}}; }

inline Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_string()) return parse_complex(j.get<std::string>());
  if (!j.is_object()) throw InputError("expected a complex number {\"re\",\"im\"}");
  const double re = j.contains("re") ? number(j["re"], "re") : 0.0;
  const double im = j.contains("im") ? number(j["im"], "im") : 0.0;
  return {re, im};
}

inline ExactComplex exact_complex_from_json(const Json& j) {
  if (j.is_number() || j.is_string()) return ExactComplex{rational_from_json(j)};
  if (!j.is_object()) throw InputError("expected a complex number {\"re\",\"im\"}");
  ExactComplex z;
  if (j.contains("re")) z.re = rational_from_json(j["re"]);
  if (j.contains("im")) z.im = rational_from_json(j["im"]);
  return z;
}

template <typename S>
S scalar_from_json(const Json& j) {
  if constexpr (std::is_same_v<S, Complex>)
    return complex_from_json(j);
  else if constexpr (std::is_same_v<S, ExactComplex>)
    return exact_complex_from_json(j);
  else
    return rational_from_json(j);
}

// ---------------------------------------------------------------------------
// semigroups

inline std::optional<std::uint64_t> log_primes_bound(const SemigroupBasis& b) {
  if (b.mode() != BasisMode::Free || b.dim() != 1 || b.generators().empty()) return std::nullopt;
  const int last = b.generators().back().id;
  if (last < 2) return std::nullopt;
  const auto candidate = SemigroupBasis::log_primes(static_cast<std::uint64_t>(last));
  if (*candidate == b) return static_cast<std::uint64_t>(last);
  return std::nullopt;
}

inline Json to_json(const SemigroupBasis& b) {
  if (b == *SemigroupBasis::natural()) return Json{{"preset", "natural"}};
  if (auto n = log_primes_bound(b)) return Json{{"preset", "log_primes"}, {"bound", *n}};
  if (b == *SemigroupBasis::lattice(b.dim())) return Json{{"preset", "lattice"}, {"r", b.dim()}};
  Json gens = Json::array();
  for (const auto& g : b.generators()) {
    Json jg{{"id", g.id}, {"value", g.value}, {"label", g.label}};
    jg["exact"] = g.exact ? to_json(*g.exact) : Json(nullptr);
    gens.push_back(jg);
  }
  return Json{{"mode", b.mode() == BasisMode::Free ? "FREE" : "EMBEDDED"}, {"r", b.dim()}, {"generators", gens}};
}

inline BasisPtr basis_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("basis must be an object");
  if (j.contains("preset")) {
    const std::string p = j["preset"].get<std::string>();
    if (p == "natural") return SemigroupBasis::natural();
    if (p == "log_primes") return SemigroupBasis::log_primes(unsigned_integer(require(j, "bound"), "bound"));
    if (p == "lattice") return SemigroupBasis::lattice(unsigned_integer(require(j, "r"), "r"));
    throw InputError("unknown basis preset '" + p + "'");
  }
  const std::string mode = require(j, "mode").get<std::string>();
  if (mode != "FREE" && mode != "EMBEDDED") throw InputError("basis mode must be FREE or EMBEDDED");
  const std::size_t r = unsigned_integer(require(j, "r"), "r");
  std::vector<Generator> gens;
  for (const auto& jg : require(j, "generators")) {
    Generator g;
    g.id = require(jg, "id").get<int>();
    if (jg.contains("exact") && !jg["exact"].is_null()) g.exact = vector_from_json(jg["exact"]);
    if (jg.contains("value")) {
      for (const auto& x : jg["value"]) g.value.push_back(number(x, "generator value"));
    } else if (g.exact) {
      g.value = to_doubles(*g.exact);
    } else {
      throw InputError("generator needs 'value' or 'exact'");
    }
    if (jg.contains("label")) g.label = jg["label"].get<std::string>();
    gens.push_back(std::move(g));
  }
  return std::make_shared<const SemigroupBasis>(mode == "FREE" ? BasisMode::Free : BasisMode::Embedded, r,
                                                std::move(gens));
}

inline Json to_json(const SemigroupElement& e) {
  if (e.embedded()) return Json{{"coords", to_json(e.coords())}};
  Json ex = Json::object();
  for (const auto& [id, nu] : e.exponents()) ex[std::to_string(id)] = nu;
  return Json{{"exponents", ex}};
}

inline SemigroupElement element_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("element must be an object");
  if (j.contains("coords")) return SemigroupElement::from_coords(vector_from_json(j["coords"]));
  std::map<int, std::uint64_t> exps;
  for (const auto& [k, v] : require(j, "exponents").items()) {
    int id = 0;
    try {
      id = std::stoi(k);
    } catch (const std::exception&) {
      throw InputError("exponent key '" + k + "' is not a generator id");
    }
    exps[id] = unsigned_integer(v, "exponent");
  }
  return SemigroupElement::from_exponents(std::move(exps));
}

// ---------------------------------------------------------------------------
// weights

inline Json to_json(const WeightFn& w) {
  switch (w.kind()) {
    case WeightFn::Kind::One:
      return Json{{"kind", "one"}};
    case WeightFn::Kind::Poly:
      return Json{{"kind", "poly"}, {"c", w.param()}};
    case WeightFn::Kind::Exp:
      return Json{{"kind", "exp"}, {"rho", w.param()}};
    case WeightFn::Kind::Product: {
      Json parts = Json::array();
      for (const auto& p : w.parts()) parts.push_back(to_json(p));
      return Json{{"kind", "product"}, {"parts", parts}};
    }
    case WeightFn::Kind::Table: {
      Json pts = Json::array();
      for (const auto& [x, v] : w.table_points()) pts.push_back(Json::array({x, v}));
      return Json{{"kind", "table"}, {"points", pts}};
    }
  }
  return Json{{"kind", "one"}};
}

inline WeightFn weight_from_json(const Json& j) {
  const std::string kind = require(j, "kind").get<std::string>();
  if (kind == "one") return WeightFn::one();
  if (kind == "poly") return WeightFn::poly(number(require(j, "c"), "c"));
  if (kind == "exp") return WeightFn::exp(number(require(j, "rho"), "rho"));
  if (kind == "product") {
    std::vector<WeightFn> parts;
    for (const auto& p : require(j, "parts")) parts.push_back(weight_from_json(p));
    return WeightFn::product(std::move(parts));
  }
  if (kind == "table") {
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : require(j, "points")) {
      if (!p.is_array() || p.size() != 2) throw InputError("table points are [magnitude, value] pairs");
      pts.emplace_back(number(p[0], "magnitude"), number(p[1], "value"));
    }
    return WeightFn::table(std::move(pts));
  }
  throw InputError("unknown weight kind '" + kind + "'");
}

inline WeightFn weight_from_text(const std::string& text) {
  return weight_from_json(Json::parse(text));
}

// ---------------------------------------------------------------------------
// algebra elements

template <typename S>
Json to_json(const AlgebraElement<S>& a) {
  Json coeffs = Json::array();
  for (const auto& [k, c] : a.terms()) {
    Json t = to_json(c);
    t["element"] = to_json(k.element);
    coeffs.push_back(t);
  }
  Json j{{"basis", to_json(*a.basis())}, {"coeffs", coeffs}};
  j["truncation"] = a.truncation() ? Json(*a.truncation()) : Json(nullptr);
  if (a.dropped_mass() > 0) j["dropped_mass"] = a.dropped_mass();
  return j;
}

template <typename S>
AlgebraElement<S> algebra_from_json(const Json& j) {
  const BasisPtr basis = basis_from_json(require(j, "basis"));
  std::optional<double> trunc;
  if (j.contains("truncation") && !j["truncation"].is_null()) trunc = number(j["truncation"], "truncation");
  typename AlgebraElement<S>::Builder b(basis, trunc);
  for (const auto& t : require(j, "coeffs")) {
    const SemigroupElement e = element_from_json(require(t, "element"));
    b.add(e, scalar_from_json<S>(t));
  }
  if (j.contains("dropped_mass")) b.add_dropped_mass(number(j["dropped_mass"], "dropped_mass"));
  return std::move(b).build();
}

// ---------------------------------------------------------------------------
// characters

inline Json to_json(const Character& psi) {
  Json j{{"basis", to_json(*psi.basis())}, {"provenance", to_string(psi.provenance())}};
  if (psi.provenance() == Provenance::FromS) {
    Json s = Json::array();
    for (const auto& z : psi.s()) s.push_back(to_json(z));
    j["s"] = s;
  } else {
    Json v = Json::object();
    for (const auto& [id, z] : psi.generator_values()) v[std::to_string(id)] = to_json(z);
    j["values"] = v;
  }
  return j;
}

/// `fallback` is used when the JSON carries no basis of its own.
inline Character character_from_json(const Json& j, const BasisPtr& fallback = nullptr) {
  BasisPtr basis = j.contains("basis") ? basis_from_json(j["basis"]) : fallback;
  if (!basis) throw InputError("character needs a basis");
  const std::string prov = j.contains("provenance") ? j["provenance"].get<std::string>()
                                                    : (j.contains("s") ? "FROM_S" : "EXPLICIT");
  if (prov == "FROM_S") {
    std::vector<Complex> s;
    for (const auto& z : require(j, "s")) s.push_back(complex_from_json(z));
    return Character::from_s(basis, std::move(s));
  }
  Provenance p = Provenance::Explicit;
  if (prov == "EXTENDED")
    p = Provenance::Extended;
  else if (prov != "EXPLICIT")
    throw InputError("unknown provenance '" + prov + "'");
  std::map<int, Complex> values;
  for (const auto& [k, v] : require(j, "values").items()) values[std::stoi(k)] = complex_from_json(v);
  return Character::from_values(basis, std::move(values), p);
}

// ---------------------------------------------------------------------------
// multiplicative functions (rational primes, exact values)

/// {"x": N, "rule": {...}, "values": {"p": [f(p), f(p^2), ...]}}. The rule
/// fills every prime power not listed explicitly:
///   {"kind":"one"} | {"kind":"epsilon"} | {"kind":"mobius"}
///   {"kind":"prime_power","exponents":{"k": e_k}}  f(p^k) = p^{e_k}, 0 for unlisted k
///   {"kind":"completely_multiplicative","exponent": e}  f(p^k) = p^{k e}
inline MultiplicativeFunction<Rational> multiplicative_from_json(const Json& j,
                                                                 std::optional<std::uint64_t> x_override) {
  std::uint64_t x = 0;
  if (x_override)
    x = *x_override;
  else
    x = unsigned_integer(require(j, "x"), "x");
  const auto sys = PrimeSystem::rational(x);

  auto power = [](std::uint64_t p, long long e) {
    Rational r(1);
    for (long long i = 0; i < (e < 0 ? -e : e); ++i) r *= Rational(p);
    return e < 0 ? Rational(1) / r : r;
  };
  std::function<Rational(std::uint64_t, unsigned)> rule = [](std::uint64_t, unsigned) { return Rational(0); };
  if (j.contains("rule")) {
    const Json& r = j["rule"];
    const std::string kind = require(r, "kind").get<std::string>();
    if (kind == "one") {
      rule = [](std::uint64_t, unsigned) { return Rational(1); };
    } else if (kind == "epsilon") {
    } else if (kind == "mobius") {
      rule = [](std::uint64_t, unsigned k) { return Rational(k == 1 ? -1 : 0); };
    } else if (kind == "prime_power") {
      std::map<unsigned, long long> ex;
      for (const auto& [k, e] : require(r, "exponents").items())
        ex[static_cast<unsigned>(std::stoul(k))] = e.get<long long>();
      rule = [ex, power](std::uint64_t p, unsigned k) {
        auto it = ex.find(k);
        return it == ex.end() ? Rational(0) : power(p, it->second);
      };
    } else if (kind == "completely_multiplicative") {
      const long long e = require(r, "exponent").get<long long>();
      rule = [e, power](std::uint64_t p, unsigned k) { return power(p, e * static_cast<long long>(k)); };
    } else {
      throw InputError("unknown multiplicative rule '" + kind + "'");
    }
  }
  std::map<std::uint64_t, RationalVector> explicit_values;
  if (j.contains("values"))
    for (const auto& [k, v] : j["values"].items()) {
      const std::uint64_t p = std::stoull(k);
      if (!sys->index_of(static_cast<double>(p)))
        throw InputError("values given for " + k + ", which is not a prime <= x");
      explicit_values[p] = vector_from_json(v);
    }
  return MultiplicativeFunction<Rational>::from_rule(sys, [sys, rule, explicit_values](std::size_t i,
                                                                                       unsigned k) {
    const std::uint64_t p = sys->integer_prime(i);
    auto it = explicit_values.find(p);
    if (it != explicit_values.end()) return k <= it->second.size() ? it->second[k - 1] : Rational(0);
    return rule(p, k);
  });
}

/// Sparse encoding: primes whose local values all vanish are left to the
/// epsilon rule.
inline Json to_json(const MultiplicativeFunction<Rational>& f) {
  const auto& sys = *f.system();
  Json values = Json::object();
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const auto& loc = f.local()[i];
    bool nonzero = false;
    for (std::size_t k = 1; k < loc.size(); ++k) nonzero = nonzero || loc[k] != 0;
    if (!nonzero) continue;
    Json a = Json::array();
    for (std::size_t k = 1; k < loc.size(); ++k) a.push_back(to_json(loc[k]));
    values[std::to_string(sys.integer_prime(i))] = a;
  }
  return Json{{"x", sys.integer_x()}, {"rule", Json{{"kind", "epsilon"}}}, {"values", values}};
}

}  // namespace forge::io

#endif  // FORGE_JSON_IO_HPP
