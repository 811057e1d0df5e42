#include "forge/cli.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "forge/algebra.hpp"
#include "forge/arithmetic.hpp"
#include "forge/characters.hpp"
#include "forge/cones.hpp"
#include "forge/density.hpp"
#include "forge/error.hpp"
#include "forge/extension.hpp"
#include "forge/json_io.hpp"
#include "forge/weights.hpp"

namespace forge::cli {

namespace {

using io::Json;

struct Outcome {
  Json result;
  int code = kOk;
};

struct Common {
  bool schema = false;
  bool report = false;
  std::uint64_t seed = 0;
  std::string output;
};

Json read_json(const std::string& path) {
  if (path.empty()) throw InputError("missing input file");
  std::ifstream file;
  std::istream* in = &std::cin;
  if (path != "-") {
    file.open(path);
    if (!file) throw InputError("cannot open '" + path + "'");
    in = &file;
  }
  try {
    return Json::parse(*in);
  } catch (const Json::parse_error& e) {
    throw InputError("malformed JSON in '" + path + "': " + e.what());
  }
}

Json parse_inline_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError("malformed JSON for " + what + ": " + e.what());
  }
}

WeightFn weight_option(const std::string& text) {
  if (text.empty()) return WeightFn::one();
  return io::weight_from_json(parse_inline_json(text, "--weight"));
}

Json certificate_json(const NeumannCertificate& c) {
  return Json{{"q", c.q}, {"terms", c.terms}, {"tail_bound", c.tail_bound}};
}

// ---------------------------------------------------------------------------
// algebra subcommands

struct AlgebraOpts {
  std::vector<std::string> files;
  bool exact = false;
  std::string weight;
  std::string method = "graded";
  std::optional<double> T;
  double tol = 1e-12;
  int max_terms = 10'000;
  std::string s;
  std::optional<double> cutoff;
  std::string f = "exp";
  std::string center;
  WitnessGrid grid;
};

template <typename S>
Outcome convolve_as(const AlgebraOpts& o) {
  if (o.files.size() != 2) throw InputError("convolve needs two input files");
  const auto a = io::algebra_from_json<S>(read_json(o.files[0]));
  const auto b = io::algebra_from_json<S>(read_json(o.files[1]));
  return {io::to_json(convolve(a, b))};
}

Outcome do_convolve(const AlgebraOpts& o) {
  return o.exact ? convolve_as<ExactComplex>(o) : convolve_as<Complex>(o);
}

template <typename S>
Outcome invert_as(const AlgebraOpts& o) {
  if (o.files.size() != 1) throw InputError("invert needs one input file");
  const auto a = io::algebra_from_json<S>(read_json(o.files[0]));
  Json j{{"method", o.method}};
  if (o.method == "neumann") {
    auto r = neumann_invert(a, weight_option(o.weight), o.tol, o.max_terms, o.T);
    j["inverse"] = io::to_json(r.inverse);
    j["certificate"] = certificate_json(r.certificate);
  } else if (o.method == "graded") {
    const double T = o.T ? *o.T : (a.truncation() ? *a.truncation() : 20.0);
    j["inverse"] = io::to_json(graded_invert(a, T));
    j["T"] = T;
  } else {
    throw InputError("unknown --method '" + o.method + "' (graded|neumann)");
  }
  return {j};
}

Outcome do_invert(const AlgebraOpts& o) {
  return o.exact ? invert_as<ExactComplex>(o) : invert_as<Complex>(o);
}

Outcome do_eval(const AlgebraOpts& o) {
  if (o.files.size() != 1) throw InputError("eval needs one input file");
  if (o.s.empty()) throw InputError("eval needs --s");
  const auto a = io::algebra_from_json<Complex>(read_json(o.files[0]));
  const auto s = io::parse_complex_list(o.s);
  if (s.size() != a.basis()->dim()) throw DimensionMismatch("--s has the wrong number of coordinates");
  const WeightFn w = weight_option(o.weight);
  const auto v = evaluate_series(a, s, w, o.cutoff.value_or(std::numeric_limits<double>::infinity()));
  Json js = Json::array();
  for (const auto& z : s) js.push_back(io::to_json(z));
  Json j{{"s", js}, {"value", io::to_json(v.value)}};
  if (v.tail) {
    Json t{{"bound", v.tail->bound}, {"weight", io::to_json(v.tail->weight)}};
    t["cutoff"] = std::isfinite(v.tail->cutoff) ? Json(v.tail->cutoff) : Json(nullptr);
    j["tail"] = t;
  } else {
    j["tail"] = nullptr;
  }
  return {j};
}

Outcome do_witness(const AlgebraOpts& o) {
  if (o.files.size() != 1) throw InputError("witness needs one input file");
  const auto a = io::algebra_from_json<Complex>(read_json(o.files[0]));
  const auto rep = invertibility_witness(a, o.grid);
  Json arg = Json::array();
  for (const auto& z : rep.argmin_s) {
    if (std::isfinite(z.real()))
      arg.push_back(io::to_json(z));
    else
      arg.push_back(Json{{"re", "inf"}, {"im", 0.0}});
  }
  Json j{{"min_modulus", rep.min_modulus}, {"argmin_s", arg}};
  if (rep.disk) {
    const auto& d = *rep.disk;
    j["disk"] = Json{{"min_on_grid", d.min_on_grid}, {"argmin_z", io::to_json(d.argmin_z)},
                     {"lipschitz", d.lipschitz},     {"mesh", d.mesh},
                     {"lower_bound", d.lower_bound}, {"certified", d.certified}};
  } else {
    j["disk"] = nullptr;
  }
  return {j};
}

PowerSeries series_option(const std::string& f, std::optional<Complex> center, Complex a0) {
  if (f == "exp") return PowerSeries::exp(center.value_or(Complex(0.0, 0.0)));
  if (f == "identity") return PowerSeries::identity();
  if (f == "inverse") return PowerSeries::inverse(center.value_or(a0));
  if (f == "log") return PowerSeries::log(center.value_or(a0));
  throw InputError("unknown --f '" + f + "' (exp|inverse|log|identity)");
}

template <typename S>
Outcome compose_as(const AlgebraOpts& o) {
  if (o.files.size() != 1) throw InputError("compose needs one input file");
  const auto a = io::algebra_from_json<S>(read_json(o.files[0]));
  std::optional<Complex> center;
  if (!o.center.empty()) center = io::parse_complex(o.center);
  const PowerSeries f = series_option(o.f, center, ScalarTraits<S>::to_complex(a.constant_term()));
  const auto r = compose_series(f, a, weight_option(o.weight), o.tol, o.max_terms, o.T);
  const auto& c = r.certificate;
  Json j{{"f", o.f},
         {"center", io::to_json(f.center())},
         {"value", io::to_json(r.value)},
         {"certificate", Json{{"q", c.q}, {"radius", std::isfinite(c.radius) ? Json(c.radius) : Json("inf")},
                              {"terms", c.terms}, {"tail_bound", c.tail_bound}}}};
  return {j};
}

Outcome do_compose(const AlgebraOpts& o) {
  return o.exact ? compose_as<ExactComplex>(o) : compose_as<Complex>(o);
}

// ---------------------------------------------------------------------------
// cones

struct ConeOpts {
  std::string file;
  std::string method = "simplex";
  bool decide = false;
};

std::vector<RationalVector> vectors_input(const Json& j, std::optional<std::size_t>* dim = nullptr) {
  if (j.is_array()) return io::vectors_from_json(j);
  if (dim && j.contains("dim")) *dim = io::unsigned_integer(j["dim"], "dim");
  if (j.contains("vectors")) return io::vectors_from_json(j["vectors"]);
  return io::vectors_from_json(io::require(j, "generators"));
}

Outcome do_separate(const ConeOpts& o) {
  const auto E = vectors_input(read_json(o.file));
  if (o.decide) {
    const HullDecision d = conv_q_contains_zero(E);
    Json j{{"contains_zero", d.contains_zero}};
    if (d.contains_zero)
      j["coefficients"] = io::to_json(d.coefficients);
    else
      j["separator"] = io::to_json(d.separator);
    return {j};
  }
  if (o.method == "simplex") return {Json{{"separator", io::to_json(separate(E))}, {"method", o.method}}};
  if (o.method == "fourier-motzkin") {
    auto rho = separate_fourier_motzkin(E);
    if (!rho) {
      const HullDecision d = conv_q_contains_zero(E);
      throw ZeroInHull(d.coefficients);
    }
    return {Json{{"separator", io::to_json(*rho)}, {"method", o.method}}};
  }
  throw InputError("unknown --method '" + o.method + "' (simplex|fourier-motzkin)");
}

Outcome do_dual(const ConeOpts& o) {
  std::optional<std::size_t> dim;
  const auto E = vectors_input(read_json(o.file), &dim);
  if (!dim) {
    if (E.empty()) throw InputError("dual needs 'dim' when no generators are given");
    dim = E.front().size();
  }
  const RationalCone D = dual_cone(E, *dim);
  return {Json{{"dim", *dim},
               {"rays", io::to_json(D.generators())},
               {"lineality", io::to_json(D.lineality())},
               {"pointed", is_pointed(D)}}};
}

// ---------------------------------------------------------------------------
// extension and density

struct ExtendOpts {
  std::string file;
  unsigned precision = 512;
  int phase_search = 8;
};

Outcome do_extend(const ExtendOpts& o) {
  const Json in = read_json(o.file);
  CharacterExtensionProblem p;
  p.gamma = io::vectors_from_json(io::require(in, "gamma"));
  for (const auto& z : io::require(in, "psi")) p.psi.push_back(io::complex_from_json(z));
  ExtensionOptions opt;
  opt.precision_cap = o.precision;
  opt.phase_search = o.phase_search;
  const auto r = extend_character(p, opt);
  Json phi = Json::array();
  for (const auto& z : r.phi) phi.push_back(io::to_json(z));
  Json exps = Json::array();
  for (const auto& e : r.exponents) exps.push_back(e);
  Json j{{"basis", io::to_json(r.basis)},
         {"phi", phi},
         {"exponents", exps},
         {"zeta", r.zeta},
         {"theta", io::to_json(r.theta)},
         {"c", io::to_json(r.c)},
         {"coordinates", io::to_json(r.coordinates)},
         {"recoordinated", r.recoordinated},
         {"zero_set", r.zero_set},
         {"certificate",
          Json{{"independent", check_q_independence(r.basis)},
               {"phases_exact", r.phases_exact},
               {"ambiguous", r.ambiguous},
               {"face_dim", r.face_dim},
               {"max_modulus_log_error", r.max_modulus_log_error},
               {"max_error", r.max_error}}}};
  return {j, r.phases_exact ? kOk : kBudgetExhausted};
}

struct DensityOpts {
  std::vector<std::string> files;
  double theta = 1e-2;
  double budget = 1e6;
  std::optional<double> sigma_max;
  int newton_steps = 60;
  std::string betas;
  std::string targets;
};

Outcome do_density(const DensityOpts& o, std::uint64_t seed) {
  if (o.files.size() != 2) throw InputError("density-search needs a.json and psi.json");
  const auto a = io::algebra_from_json<Complex>(read_json(o.files[0]));
  const Character psi = io::character_from_json(read_json(o.files[1]), a.basis());
  DensitySearchOptions opt;
  opt.theta = o.theta;
  if (!(o.budget >= 0)) throw InputError("--budget must be >= 0");
  opt.budget = static_cast<std::uint64_t>(o.budget);
  opt.seed = seed;
  opt.sigma_max = o.sigma_max;
  opt.newton_steps = o.newton_steps;
  const auto r = approximate_functional(a, psi, opt);
  Json s = Json::array();
  for (const auto& z : r.s) s.push_back(io::to_json(z));
  Json used = Json::array();
  for (const auto& e : r.gamma_used) used.push_back(io::to_json(e));
  Json j{{"s", s},
         {"achieved_error", r.achieved_error},
         {"target_value", io::to_json(r.target_value)},
         {"value_at_s", io::to_json(r.value_at_s)},
         {"gamma_used", used},
         {"tail_error", r.tail_error},
         {"theta", o.theta},
         {"success", r.success},
         {"exhausted", r.exhausted},
         {"evaluations", r.evaluations},
         {"seed", seed}};
  return {j, r.success ? kOk : kBudgetExhausted};
}

double beta_from_json(const Json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    for (const std::string prefix : {"ln(", "log("})
      if (s.rfind(prefix, 0) == 0 && s.back() == ')') {
        const double x = to_double(parse_rational(s.substr(prefix.size(), s.size() - prefix.size() - 1)));
        return std::log(x);
      }
  }
  return io::number(j, "beta");
}

Outcome do_kronecker(const DensityOpts& o) {
  KroneckerInstance in;
  in.theta = o.theta;
  in.budget = static_cast<std::uint64_t>(o.budget);
  if (!o.files.empty()) {
    const Json j = read_json(o.files.front());
    for (const auto& b : io::require(j, "betas")) in.betas.push_back(beta_from_json(b));
    for (const auto& z : io::require(j, "targets")) in.targets.push_back(io::complex_from_json(z));
  } else {
    std::stringstream ss(o.betas);
    for (std::string tok; std::getline(ss, tok, ',');) in.betas.push_back(beta_from_json(Json(tok)));
    if (!o.targets.empty()) in.targets = io::parse_complex_list(o.targets);
  }
  const auto r = kronecker_t(in);
  return {Json{{"t", r.t},
               {"errors", r.errors},
               {"max_error", r.max_error},
               {"theta", in.theta},
               {"success", r.success},
               {"steps", r.steps}},
          r.success ? kOk : kBudgetExhausted};
}

// ---------------------------------------------------------------------------
// arithmetic

struct ArithOpts {
  std::string file;
  std::optional<std::uint64_t> x;
  bool certify = false;
  std::string omega;
};

Json local_invertibility_json(const InvertibilityCertificate& c) {
  Json bad = Json::array();
  for (double p : c.uncertified) bad.push_back(static_cast<std::uint64_t>(p));
  std::size_t dominant = 0;
  for (const auto& li : c.primes) dominant += li.method == "dominant-constant";
  return Json{{"all_certified", c.all_certified()},
              {"uncertified_primes", bad},
              {"primes_checked", c.primes.size()},
              {"certified_by_dominant_constant", dominant}};
}

Outcome do_euler_invert(const ArithOpts& o) {
  const auto f = io::multiplicative_from_json(read_json(o.file), o.x);
  const auto g = invert_multiplicative(f);
  const auto fg = dirichlet_convolve(f, g);
  bool exact = true;
  for (std::size_t i = 0; i < fg.local().size(); ++i)
    for (std::size_t k = 1; k < fg.local()[i].size(); ++k) exact = exact && fg.local()[i][k] == 0;
  Json j{{"inverse", io::to_json(g)}, {"roundtrip_exact", exact}};
  if (o.certify) j["local_invertibility"] = local_invertibility_json(certify_local_invertibility(f));
  return {j};
}

Json local_factor_json(const MultiplicativeFunction<Rational>& ap, double p) {
  const auto& sys = *ap.system();
  const std::size_t i = *sys.index_of(p);
  Json a = Json::array();
  for (std::size_t k = 1; k < ap.local()[i].size(); ++k) a.push_back(io::to_json(ap.local()[i][k]));
  return a;
}

Outcome do_p3(const ArithOpts& o) {
  const auto f = io::multiplicative_from_json(read_json(o.file), o.x);
  const WeightFn w = weight_option(o.omega);
  const auto d = decompose_P3(f, w);
  Json locals = Json::object();
  for (std::size_t i = 0; i < d.local_primes.size(); ++i)
    locals[std::to_string(static_cast<std::uint64_t>(d.local_primes[i]))] =
        local_factor_json(d.local_factors[i], d.local_primes[i]);
  const auto& c = d.certificate;
  Json j{{"p0", static_cast<std::uint64_t>(d.p0)},
         {"omega", io::to_json(w)},
         {"local_factors", locals},
         {"b", io::to_json(d.b)},
         {"h", io::to_json(d.h)},
         {"certificate",
          Json{{"max_prime_weight", c.max_prime_weight},
               {"hi_sum", c.hi_sum},
               {"h_vanishes_at_primes", c.h_vanishes_at_primes},
               {"b_agrees_at_primes", c.b_agrees_at_primes},
               {"reconstruction_exact", c.reconstruction_exact},
               {"b_inverse_is_mu_b", c.b_inverse_is_mu_b},
               {"sigma", c.sigma},
               {"sigma_at_most_one", c.sigma_at_most_one},
               {"checked_elements", c.checked_elements},
               {"truncation_limited", c.truncation_limited}}}};
  return {j};
}

// ---------------------------------------------------------------------------
// weights

struct WeightOpts {
  std::string weight;
  std::string samples;
  int K = 64;
  double lambda = 1.0;
  double tol = 1e-6;
  double theta = 0.1;
};

Outcome do_check_weight(const WeightOpts& o) {
  if (o.weight.empty()) throw InputError("check-weight needs --weight");
  const WeightFn w = weight_option(o.weight);
  std::vector<double> xs;
  if (o.samples.empty()) {
    for (int i = 0; i <= 40; ++i) xs.push_back(0.5 * i);
  } else {
    std::stringstream ss(o.samples);
    for (std::string tok; std::getline(ss, tok, ',');) xs.push_back(io::number(Json(tok), "sample"));
  }
  std::vector<std::pair<double, double>> pairs;
  for (double x : xs)
    for (double y : xs) pairs.emplace_back(x, y);
  const auto b = check_condition_b(w, o.lambda, o.K, o.tol);
  const auto g = check_growth_bound(w, o.theta, xs);
  const bool a = check_condition_a(w, xs);
  return {Json{{"weight", io::to_json(w)},
               {"condition_a", a},
               {"condition_b", Json{{"passed", b.passed}, {"overflow", b.overflow}, {"min_root", b.min_root},
                                    {"lambda", o.lambda}, {"K", o.K}}},
               {"submultiplicative", check_submultiplicative(w, pairs)},
               {"growth", Json{{"theta", o.theta}, {"sup", g.sup}, {"argsup", g.argsup},
                               {"unbounded_trend", g.unbounded_trend}}},
               {"admissible_on_samples", a && b.passed},
               {"sampled", true}}};
}

// ---------------------------------------------------------------------------
// schemas

Json ref(const std::string& name) { return Json{{"$ref", "#/definitions/" + name}}; }

Json definitions() {
  Json rational{{"type", {"string", "integer"}}, {"description", "\"num/den\", integer or decimal literal"}};
  Json complex{{"type", "object"}, {"properties", {{"re", {{"type", {"number", "string"}}}}, {"im", {{"type", {"number", "string"}}}}}}};
  Json vec{{"type", "array"}, {"items", ref("rational")}};
  Json basis{{"oneOf",
              Json::array({Json{{"type", "object"}, {"required", {"preset"}},
                                {"properties", {{"preset", {{"enum", {"natural", "log_primes", "lattice"}}}},
                                                {"bound", {{"type", "integer"}}}, {"r", {{"type", "integer"}}}}}},
                           Json{{"type", "object"},
                                {"required", {"mode", "r", "generators"}},
                                {"properties",
                                 {{"mode", {{"enum", {"FREE", "EMBEDDED"}}}},
                                  {"r", {{"type", "integer"}}},
                                  {"generators",
                                   {{"type", "array"},
                                    {"items", {{"type", "object"},
                                               {"required", {"id"}},
                                               {"properties", {{"id", {{"type", "integer"}}},
                                                               {"value", {{"type", "array"}}},
                                                               {"exact", {{"oneOf", {ref("vector"), {{"type", "null"}}}}}},
                                                               {"label", {{"type", "string"}}}}}}}}}}}}})}};
  Json element{{"type", "object"},
               {"properties", {{"exponents", {{"type", "object"}, {"additionalProperties", {{"type", "integer"}}}}},
                               {"coords", ref("vector")}}}};
  Json algebra{{"type", "object"},
               {"required", {"basis", "coeffs"}},
               {"properties",
                {{"basis", ref("basis")},
                 {"coeffs", {{"type", "array"},
                             {"items", {{"type", "object"},
                                        {"required", {"element"}},
                                        {"properties", {{"element", ref("element")},
                                                        {"re", {{"type", {"number", "string"}}}},
                                                        {"im", {{"type", {"number", "string"}}}}}}}}}},
                 {"truncation", {{"type", {"number", "null"}}}},
                 {"dropped_mass", {{"type", "number"}}}}}};
  Json weight{{"type", "object"},
              {"required", {"kind"}},
              {"properties", {{"kind", {{"enum", {"one", "poly", "exp", "product", "table"}}}},
                              {"c", {{"type", "number"}}},
                              {"rho", {{"type", "number"}}},
                              {"parts", {{"type", "array"}, {"items", ref("weight")}}},
                              {"points", {{"type", "array"}}}}}};
  Json character{{"type", "object"},
                 {"properties", {{"basis", ref("basis")},
                                 {"provenance", {{"enum", {"FROM_S", "EXPLICIT", "EXTENDED"}}}},
                                 {"values", {{"type", "object"}, {"additionalProperties", ref("complex")}}},
                                 {"s", {{"type", "array"}, {"items", ref("complex")}}}}}};
  Json multiplicative{
      {"type", "object"},
      {"properties",
       {{"x", {{"type", "integer"}}},
        {"rule", {{"type", "object"},
                  {"properties", {{"kind", {{"enum", {"one", "epsilon", "mobius", "prime_power",
                                                      "completely_multiplicative"}}}},
                                  {"exponents", {{"type", "object"}}},
                                  {"exponent", {{"type", "integer"}}}}}}},
        {"values", {{"type", "object"}, {"additionalProperties", ref("vector")}}}}}};
  Json error{{"type", "object"},
             {"properties", {{"error", {{"type", "object"},
                                        {"properties", {{"kind", {{"type", "string"}}},
                                                        {"type", {{"type", "string"}}},
                                                        {"message", {{"type", "string"}}}}}}}}}};
  return Json{{"rational", rational}, {"complex", complex},   {"vector", vec},
              {"basis", basis},       {"element", element},   {"algebra_element", algebra},
              {"weight", weight},     {"character", character}, {"multiplicative_function", multiplicative},
              {"error", error}};
}

Json obj(std::initializer_list<std::pair<const std::string, Json>> props) {
  Json p = Json::object();
  for (const auto& [k, v] : props) p[k] = v;
  return Json{{"type", "object"}, {"properties", p}};
}

Json schema_for(const std::string& cmd) {
  const Json num{{"type", "number"}};
  const Json boolean{{"type", "boolean"}};
  const Json integer{{"type", "integer"}};
  const Json vectors{{"type", "array"}, {"items", ref("vector")}};
  const Json complexes{{"type", "array"}, {"items", ref("complex")}};
  std::map<std::string, std::pair<Json, Json>> s{
      {"convolve", {Json::array({ref("algebra_element"), ref("algebra_element")}), ref("algebra_element")}},
      {"invert",
       {Json::array({ref("algebra_element")}),
        obj({{"method", {{"enum", {"graded", "neumann"}}}},
             {"inverse", ref("algebra_element")},
             {"T", num},
             {"certificate", obj({{"q", num}, {"terms", integer}, {"tail_bound", num}})}})}},
      {"eval",
       {Json::array({ref("algebra_element")}),
        obj({{"s", complexes}, {"value", ref("complex")}, {"tail", obj({{"cutoff", num}, {"bound", num}, {"weight", ref("weight")}})}})}},
      {"witness",
       {Json::array({ref("algebra_element")}),
        obj({{"min_modulus", num},
             {"argmin_s", complexes},
             {"disk", obj({{"min_on_grid", num}, {"argmin_z", ref("complex")}, {"lipschitz", num}, {"mesh", num},
                           {"lower_bound", num}, {"certified", boolean}})}})}},
      {"compose",
       {Json::array({ref("algebra_element")}),
        obj({{"f", {{"enum", {"exp", "inverse", "log", "identity"}}}},
             {"center", ref("complex")},
             {"value", ref("algebra_element")},
             {"certificate", obj({{"q", num}, {"radius", num}, {"terms", integer}, {"tail_bound", num}})}})}},
      {"separate",
       {Json::array({Json{{"oneOf", Json::array({vectors, obj({{"vectors", vectors}})})}}}),
        obj({{"separator", ref("vector")}, {"method", {{"type", "string"}}}, {"contains_zero", boolean},
             {"coefficients", ref("vector")}})}},
      {"dual",
       {Json::array({Json{{"oneOf", Json::array({vectors, obj({{"dim", integer}, {"generators", vectors}})})}}}),
        obj({{"dim", integer}, {"rays", vectors}, {"lineality", vectors}, {"pointed", boolean}})}},
      {"extend-character",
       {Json::array({obj({{"gamma", vectors}, {"psi", complexes}})}),
        obj({{"basis", vectors},
             {"phi", complexes},
             {"exponents", {{"type", "array"}}},
             {"zeta", {{"type", "array"}}},
             {"theta", ref("vector")},
             {"c", {{"type", "string"}}},
             {"coordinates", vectors},
             {"recoordinated", boolean},
             {"zero_set", {{"type", "array"}}},
             {"certificate", obj({{"independent", boolean}, {"phases_exact", boolean}, {"ambiguous", boolean},
                                  {"face_dim", integer}, {"max_modulus_log_error", num}, {"max_error", num}})}})}},
      {"density-search",
       {Json::array({ref("algebra_element"), ref("character")}),
        obj({{"s", complexes},
             {"achieved_error", num},
             {"target_value", ref("complex")},
             {"value_at_s", ref("complex")},
             {"gamma_used", {{"type", "array"}, {"items", ref("element")}}},
             {"tail_error", num},
             {"theta", num},
             {"success", boolean},
             {"exhausted", boolean},
             {"evaluations", integer},
             {"seed", integer}})}},
      {"kronecker",
       {Json::array({obj({{"betas", {{"type", "array"}, {"items", {{"type", {"number", "string"}}}}}},
                          {"targets", complexes}})}),
        obj({{"t", num}, {"errors", {{"type", "array"}}}, {"max_error", num}, {"theta", num}, {"success", boolean},
             {"steps", integer}})}},
      {"euler-invert",
       {Json::array({ref("multiplicative_function")}),
        obj({{"inverse", ref("multiplicative_function")},
             {"roundtrip_exact", boolean},
             {"local_invertibility", obj({{"all_certified", boolean}, {"uncertified_primes", {{"type", "array"}}},
                                          {"primes_checked", integer},
                                          {"certified_by_dominant_constant", integer}})}})}},
      {"p3-decompose",
       {Json::array({ref("multiplicative_function")}),
        obj({{"p0", integer},
             {"omega", ref("weight")},
             {"local_factors", {{"type", "object"}}},
             {"b", ref("multiplicative_function")},
             {"h", ref("multiplicative_function")},
             {"certificate", obj({{"max_prime_weight", num}, {"hi_sum", num}, {"h_vanishes_at_primes", boolean},
                                  {"b_agrees_at_primes", boolean}, {"reconstruction_exact", boolean},
                                  {"b_inverse_is_mu_b", boolean}, {"sigma", num}, {"sigma_at_most_one", boolean},
                                  {"checked_elements", integer}, {"truncation_limited", boolean}})}})}},
      {"check-weight",
       {Json::array(),
        obj({{"weight", ref("weight")},
             {"condition_a", boolean},
             {"condition_b", obj({{"passed", boolean}, {"overflow", boolean}, {"min_root", num}, {"lambda", num},
                                  {"K", integer}})},
             {"submultiplicative", boolean},
             {"growth", obj({{"theta", num}, {"sup", num}, {"argsup", num}, {"unbounded_trend", boolean}})},
             {"admissible_on_samples", boolean},
             {"sampled", boolean}})}},
  };
  const auto& [in, out] = s.at(cmd);
  return Json{{"command", cmd},
              {"inputs", in},
              {"output", out},
              {"error_output", ref("error")},
              {"exit_codes", {{"0", "ok"}, {"1", "malformed input or unknown flag"}, {"2", "precondition violated"},
                              {"3", "budget exhausted, best effort emitted"}}},
              {"definitions", definitions()}};
}

// ---------------------------------------------------------------------------
// plain-text reports

void render(std::ostream& os, const Json& j, const std::string& indent) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (v.is_structured() && !v.empty() && !(v.is_array() && !v.front().is_structured())) {
        os << indent << k << ":\n";
        render(os, v, indent + "  ");
      } else {
        os << indent << k << ": ";
        render(os, v, "");
        os << "\n";
      }
    }
  } else if (j.is_array()) {
    if (!j.empty() && j.front().is_structured()) {
      std::size_t n = 0;
      for (const auto& v : j) {
        if (n == 20) {
          os << indent << "... (" << j.size() << " entries)\n";
          break;
        }
        os << indent << "- [" << n++ << "]\n";
        render(os, v, indent + "    ");
      }
    } else {
      os << "[";
      std::size_t n = 0;
      for (const auto& v : j) {
        if (n == 20) {
          os << ", ... (" << j.size() << " entries)";
          break;
        }
        os << (n++ ? ", " : "") << (v.is_string() ? v.get<std::string>() : v.dump());
      }
      os << "]";
    }
  } else if (j.is_string()) {
    os << j.get<std::string>();
  } else {
    os << j.dump();
  }
}

std::string render_report(const std::string& cmd, const Json& j, int code) {
  std::ostringstream os;
  os << "forge " << cmd << " report\n";
  os << "status: "
     << (code == kOk ? "ok" : code == kBudgetExhausted ? "budget exhausted (best effort)" : "error") << "\n";
  render(os, j, "  ");
  return os.str();
}

Json error_json(const std::string& kind, const std::string& type, const std::string& message) {
  return Json{{"error", Json{{"kind", kind}, {"type", type}, {"message", message}}}};
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{
      "convolve", "invert",   "eval",         "witness",      "compose",      "separate",    "dual",
      "extend-character", "density-search", "kronecker", "euler-invert", "p3-decompose", "check-weight"};
  return names;
}

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"forge: weighted Dirichlet-series algebras, cones, character extension and arithmetic functions"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  Common common;
  AlgebraOpts alg;
  ConeOpts cone;
  ExtendOpts ext;
  DensityOpts dens;
  ArithOpts arith;
  WeightOpts wopt;
  std::string active;
  std::function<Outcome()> action;

  auto add_common = [&](CLI::App* sub) {
    sub->add_flag("--schema", common.schema, "Print the JSON schema of this subcommand and exit");
    sub->add_flag("--report", common.report, "Render a plain-text report instead of JSON");
    sub->add_option("--seed", common.seed, "Random seed (default 0)");
    sub->add_option("-o,--output", common.output, "Write the result to this file instead of stdout");
  };
  auto add_scalar_flags = [&](CLI::App* sub) {
    sub->add_flag("--exact", alg.exact, "Exact rational complex arithmetic");
  };
  auto add_weight = [&](CLI::App* sub, std::string& target, const std::string& name) {
    sub->add_option(name, target, "Weight as inline JSON, e.g. '{\"kind\":\"poly\",\"c\":2}' (default one)");
  };

  {
    auto* sub = app.add_subcommand("convolve", "Convolution of two algebra elements");
    sub->add_option("files", alg.files, "A.json B.json");
    add_scalar_flags(sub);
    add_common(sub);
    sub->callback([&] { action = [&] { return do_convolve(alg); }; });
  }
  {
    auto* sub = app.add_subcommand("invert", "Inverse by graded recursion or Neumann series");
    sub->add_option("files", alg.files, "A.json");
    sub->add_option("--method", alg.method, "graded|neumann (default graded)");
    sub->add_option("--T", alg.T, "Truncation magnitude");
    sub->add_option("--tol", alg.tol, "Neumann tail tolerance (default 1e-12)");
    sub->add_option("--max-terms", alg.max_terms, "Neumann term cap (default 10000)");
    add_weight(sub, alg.weight, "--weight");
    add_scalar_flags(sub);
    add_common(sub);
    sub->callback([&] { action = [&] { return do_invert(alg); }; });
  }
  {
    auto* sub = app.add_subcommand("eval", "Evaluate the Dirichlet series at s");
    sub->add_option("files", alg.files, "A.json");
    sub->add_option("--s", alg.s, "Comma-separated complex coordinates, e.g. \"2+0i\"");
    sub->add_option("--cutoff", alg.cutoff, "Magnitude from which the tail bound is reported");
    add_weight(sub, alg.weight, "--weight");
    add_common(sub);
    sub->callback([&] { action = [&] { return do_eval(alg); }; });
  }
  {
    auto* sub = app.add_subcommand("witness", "Sampled invertibility evidence on the closed half-space");
    sub->add_option("files", alg.files, "A.json");
    sub->add_option("--sigma-max", alg.grid.sigma_max, "Largest sampled Re s (default 4)");
    sub->add_option("--t-max", alg.grid.t_max, "Largest sampled |Im s| (default 20)");
    sub->add_option("--sigma-steps", alg.grid.sigma_steps, "Grid points in Re s (default 41)");
    sub->add_option("--t-steps", alg.grid.t_steps, "Grid points in Im s (default 401)");
    sub->add_option("--disk-radial", alg.grid.disk_radial, "Disk grid radii (default 200)");
    sub->add_option("--disk-angular", alg.grid.disk_angular, "Disk grid angles (default 2048)");
    add_common(sub);
    sub->callback([&] { action = [&] { return do_witness(alg); }; });
  }
  {
    auto* sub = app.add_subcommand("compose", "Compose a power series with an algebra element");
    sub->add_option("files", alg.files, "A.json");
    sub->add_option("--f", alg.f, "exp|inverse|log|identity (default exp)");
    sub->add_option("--center", alg.center, "Expansion center (default 0 for exp, a(0) for inverse/log)");
    sub->add_option("--tol", alg.tol, "Tail tolerance (default 1e-12)");
    sub->add_option("--max-terms", alg.max_terms, "Term cap (default 10000)");
    sub->add_option("--T", alg.T, "Truncation magnitude");
    add_weight(sub, alg.weight, "--weight");
    add_scalar_flags(sub);
    add_common(sub);
    sub->callback([&] { action = [&] { return do_compose(alg); }; });
  }
  {
    auto* sub = app.add_subcommand("separate", "Rational functional with rho >= 1 on E");
    sub->add_option("file", cone.file, "E.json");
    sub->add_option("--method", cone.method, "simplex|fourier-motzkin (default simplex)");
    sub->add_flag("--decide", cone.decide, "Decide 0 in conv(E) and return either certificate");
    add_common(sub);
    sub->callback([&] { action = [&] { return do_separate(cone); }; });
  }
  {
    auto* sub = app.add_subcommand("dual", "Dual cone of the cone generated by E");
    sub->add_option("file", cone.file, "E.json");
    add_common(sub);
    sub->callback([&] { action = [&] { return do_dual(cone); }; });
  }
  {
    auto* sub = app.add_subcommand("extend-character", "Extend a bounded character from Gamma to a free [B]");
    sub->add_option("file", ext.file, "problem.json");
    sub->add_option("--precision", ext.precision, "MPFR precision cap in bits (default 512)");
    sub->add_option("--phase-search", ext.phase_search, "Bound on 2 pi multiples in the phase lift (default 8)");
    add_common(sub);
    sub->callback([&] { action = [&] { return do_extend(ext); }; });
  }
  {
    auto* sub = app.add_subcommand("density-search", "Find s with h_s(a) close to h_psi(a)");
    sub->add_option("files", dens.files, "a.json psi.json");
    sub->add_option("--theta", dens.theta, "Tolerance theta (default 1e-2)");
    sub->add_option("--budget", dens.budget, "Series evaluations (default 1e6)");
    sub->add_option("--sigma-max", dens.sigma_max, "Largest Re s for restarts (default 40 / min beta)");
    sub->add_option("--newton-steps", dens.newton_steps, "Newton iterations per start (default 60)");
    add_common(sub);
    sub->callback([&] { action = [&] { return do_density(dens, common.seed); }; });
  }
  {
    auto* sub = app.add_subcommand("kronecker", "t with exp(-i beta_k t) close to z_k");
    sub->add_option("files", dens.files, "K.json with betas and targets");
    sub->add_option("--betas", dens.betas, "Comma-separated betas (numbers or ln(q))");
    sub->add_option("--targets", dens.targets, "Comma-separated unimodular complex targets");
    sub->add_option("--theta", dens.theta, "Tolerance theta (default 1e-2)");
    sub->add_option("--budget", dens.budget, "Orbit steps (default 1e6)");
    add_common(sub);
    sub->callback([&] { action = [&] { return do_kronecker(dens); }; });
  }
  {
    auto* sub = app.add_subcommand("euler-invert", "Prime-local inverse of a multiplicative function");
    sub->add_option("file", arith.file, "f.json");
    sub->add_option("--x", arith.x, "Truncation bound (overrides f.json)");
    sub->add_flag("--certify", arith.certify, "Certify the local factors on the closed disk");
    add_common(sub);
    sub->callback([&] { action = [&] { return do_euler_invert(arith); }; });
  }
  {
    auto* sub = app.add_subcommand("p3-decompose", "Split f into local factors, a completely multiplicative b and h");
    sub->add_option("file", arith.file, "f.json");
    sub->add_option("--x", arith.x, "Truncation bound (overrides f.json)");
    add_weight(sub, arith.omega, "--omega");
    add_common(sub);
    sub->callback([&] { action = [&] { return do_p3(arith); }; });
  }
  {
    auto* sub = app.add_subcommand("check-weight", "Sampled admissibility checks for a weight");
    add_weight(sub, wopt.weight, "--weight");
    sub->add_option("--samples", wopt.samples, "Comma-separated magnitudes (default 0, 0.5, ..., 20)");
    sub->add_option("--K", wopt.K, "Roots checked for condition (b) (default 64)");
    sub->add_option("--lambda", wopt.lambda, "Magnitude used for condition (b) (default 1)");
    sub->add_option("--tol", wopt.tol, "Tolerance for condition (b) (default 1e-6)");
    sub->add_option("--theta", wopt.theta, "Exponent of the growth bound (default 0.1)");
    add_common(sub);
    sub->callback([&] { action = [&] { return do_check_weight(wopt); }; });
  }

  std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "forge: " << e.what() << "\n";
    return kInputError;
  }
  for (auto* sub : app.get_subcommands()) active = sub->get_name();

  auto emit = [&](const std::string& text) {
    if (common.output.empty()) {
      out << text;
      return;
    }
    std::ofstream f(common.output);
    if (!f) throw InputError("cannot write '" + common.output + "'");
    f << text;
  };

  if (common.schema) {
    emit(schema_for(active).dump(2) + "\n");
    return kOk;
  }

  int code = kOk;
  Json result;
  try {
    Outcome o = action();
    code = o.code;
    result = std::move(o.result);
  } catch (const InputError& e) {
    code = kInputError;
    result = error_json("input", "InputError", e.what());
  } catch (const Json::exception& e) {
    code = kInputError;
    result = error_json("input", "JsonError", e.what());
  } catch (const ZeroInHull& e) {
    code = kPrecondition;
    result = error_json("precondition", "ZeroInHull", e.what());
    result["error"]["coefficients"] = io::to_json(e.coefficients());
  } catch (const DimensionMismatch& e) {
    code = kPrecondition;
    result = error_json("precondition", "DimensionMismatch", e.what());
  } catch (const BasisMismatch& e) {
    code = kPrecondition;
    result = error_json("precondition", "BasisMismatch", e.what());
  } catch (const PreconditionError& e) {
    code = kPrecondition;
    result = error_json("precondition", "PreconditionError", e.what());
  } catch (const CapExceeded& e) {
    code = kBudgetExhausted;
    result = error_json("budget", "CapExceeded", e.what());
  } catch (const std::exception& e) {
    code = kInputError;
    result = error_json("internal", "Exception", e.what());
  }
  if (result.contains("error")) err << "forge " << active << ": " << result["error"]["message"].get<std::string>() << "\n";
  try {
    emit(common.report ? render_report(active, result, code) : result.dump(2) + "\n");
  } catch (const InputError& e) {
    err << "forge: " << e.what() << "\n";
    return kInputError;
  }
  return code;
}

}  // namespace forge::cli
