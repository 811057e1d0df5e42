#ifndef FORGE_EXTENSION_HPP
#define FORGE_EXTENSION_HPP

// Extension of a bounded character from a finite set Gamma of rational
// vectors to the monoid [B] of a Q-independent set B with Gamma in [B].
//
// Pipeline: polar split, modulus functional rho on V' = span(Gamma'),
// separating functional theta for the zero set, zeta = rho' + c theta,
// a dual basis through zeta inside Gamma*, and finally
// phi(beta) = exp(-zeta(beta)) [theta(beta) = 0] exp(i tau(beta)).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "forge/cones.hpp"
#include "forge/error.hpp"
#include "forge/interval.hpp"
#include "forge/rational.hpp"
#include "forge/scalar.hpp"

namespace forge {

struct CharacterExtensionProblem {
  std::vector<RationalVector> gamma;
  std::vector<Complex> psi;  // psi(gamma_i), |psi| <= 1
};

struct PolarSplit {
  std::vector<double> modulus;                // |psi(gamma)|
  std::vector<std::optional<Complex>> phase;  // psi/|psi| on Gamma', empty on Gamma_0
  std::vector<std::size_t> nonzero;           // indices of Gamma'
  std::vector<std::size_t> zero;              // indices of Gamma_0
};

inline void validate(const CharacterExtensionProblem& p) {
  if (p.gamma.empty()) throw PreconditionError("Gamma is empty");
  if (p.gamma.size() != p.psi.size()) throw PreconditionError("psi needs one value per element of Gamma");
  const std::size_t d = p.gamma.front().size();
  if (d == 0) throw PreconditionError("Gamma vectors need a positive dimension");
  for (std::size_t i = 0; i < p.gamma.size(); ++i) {
    if (p.gamma[i].size() != d) throw DimensionMismatch("Gamma vectors have different dimensions");
    if (is_zero(p.gamma[i])) throw PreconditionError("0 must not be in Gamma");
    if (!(std::abs(p.psi[i]) <= 1.0 + 1e-12))
      throw PreconditionError("|psi(gamma_" + std::to_string(i) + ")| > 1");
  }
}

/// Moduli this close to 1 are taken as exactly 1, so the characters they
/// constrain stay unimodular instead of picking up rounding-sized decay.
inline constexpr double kUnitModulusTol = 1e-12;

inline PolarSplit polar_split(const CharacterExtensionProblem& p) {
  validate(p);
  PolarSplit s;
  for (std::size_t i = 0; i < p.psi.size(); ++i) {
    double m = std::min(1.0, std::abs(p.psi[i]));
    if (m > 1.0 - kUnitModulusTol) m = 1.0;
    s.modulus.push_back(m);
    if (p.psi[i] == Complex(0.0, 0.0)) {
      s.phase.emplace_back();
      s.zero.push_back(i);
    } else {
      s.phase.emplace_back(p.psi[i] / std::abs(p.psi[i]));
      s.nonzero.push_back(i);
    }
  }
  return s;
}

// ---------------------------------------------------------------------------

struct ModulusFunctional {
  AtomContextPtr context;                // atoms -ln |psi(s)| for s in the chosen basis of V'
  RealVector rho;                        // rho', zero on the orthogonal complement of V'
  std::vector<std::size_t> basis;        // indices (into the input list) of a basis of V'
  std::vector<RationalVector> dual_rows; // eps_s: rho' = sum_s r_s eps_s
  double max_log_residual = 0;           // consistency residual over the other elements
};

/// Tolerance on log-moduli for multiplicative consistency of the input.
inline constexpr double kLogConsistencyTol = 1e-9;

namespace detail {

/// Columns of M (M^T M)^{-1} for M with the given columns: the vectors
/// eps_s in span(cols) with eps_s . col_t = [s = t].
inline std::vector<RationalVector> dual_in_span(const std::vector<RationalVector>& cols, std::size_t dim) {
  const std::size_t m = cols.size();
  if (m == 0) return {};
  RationalMatrix G(m, RationalVector(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) G[i][j] = dot(cols[i], cols[j]);
  const RationalMatrix Gi = inverse(G);
  std::vector<RationalVector> eps(m, zero_vector(dim));
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t t = 0; t < m; ++t)
      if (Gi[t][s] != 0) eps[s] = eps[s] + Gi[t][s] * cols[t];
  return eps;
}

}  // namespace detail

/// rho' with rho'(gamma) = -ln m_gamma on Gamma' (up to the consistency
/// tolerance), built from a greedy basis S of V' and zero off V'.
inline ModulusFunctional modulus_functional(const std::vector<RationalVector>& gamma_prime,
                                            const std::vector<double>& moduli, std::size_t dim,
                                            unsigned precision_cap = 512) {
  if (gamma_prime.size() != moduli.size()) throw PreconditionError("one modulus per element needed");
  ModulusFunctional out;
  // unimodular elements first: their span then carries rho' = 0 structurally
  std::vector<std::size_t> order(gamma_prime.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_partition(order.begin(), order.end(), [&](std::size_t i) { return moduli[i] == 1.0; });
  std::vector<RationalVector> ordered;
  for (std::size_t i : order) ordered.push_back(gamma_prime[i]);
  for (std::size_t j : independent_subset(ordered)) out.basis.push_back(order[j]);
  std::vector<RationalVector> cols;
  std::vector<double> atom_moduli;
  std::vector<std::size_t> atom_of;
  std::vector<bool> unimodular;
  for (std::size_t idx : out.basis) {
    const double m = moduli[idx];
    if (!(m > 0 && m <= 1)) throw PreconditionError("modulus on Gamma' must lie in (0, 1]");
    cols.push_back(gamma_prime[idx]);
    unimodular.push_back(m == 1.0);
    if (m == 1.0) {
      atom_of.push_back(0);
      continue;
    }
    // equal moduli share one atom, so equal logs stay structurally equal
    auto it = std::find(atom_moduli.begin(), atom_moduli.end(), m);
    atom_of.push_back(static_cast<std::size_t>(it - atom_moduli.begin()));
    if (it == atom_moduli.end()) atom_moduli.push_back(m);
  }
  out.context = std::make_shared<const AtomContext>(atom_moduli, precision_cap);
  out.dual_rows = detail::dual_in_span(cols, dim);
  out.rho.assign(dim, LinearReal());
  for (std::size_t s = 0; s < out.basis.size(); ++s) {
    if (unimodular[s]) continue;  // -ln 1 = 0
    const LinearReal r = LinearReal::atom(atom_of[s], atom_moduli.size());
    for (std::size_t i = 0; i < dim; ++i)
      if (out.dual_rows[s][i] != 0) out.rho[i] = out.rho[i] + out.dual_rows[s][i] * r;
  }
  for (std::size_t j = 0; j < gamma_prime.size(); ++j) {
    const double want = -std::log(moduli[j]);
    const double got = apply_functional(gamma_prime[j], out.rho).to_double(*out.context);
    const double res = std::abs(got - want);
    out.max_log_residual = std::max(out.max_log_residual, res);
    if (res > kLogConsistencyTol * std::max(1.0, std::abs(want)))
      throw PreconditionError("inconsistent moduli: element " + std::to_string(j) +
                              " violates a multiplicative relation (log residual " + std::to_string(res) + ")");
  }
  return out;
}

/// theta in Q^d vanishing on V' and positive on Gamma_0: separate the
/// projection of Gamma_0 to V / V' and pull the functional back.
inline RationalVector zero_set_separation(const std::vector<RationalVector>& gamma0,
                                          const std::vector<RationalVector>& vprime, std::size_t dim) {
  if (gamma0.empty()) return zero_vector(dim);
  const std::vector<RationalVector> Q = vprime.empty()
                                            ? [&] {
                                                std::vector<RationalVector> e;
                                                for (std::size_t i = 0; i < dim; ++i) e.push_back(unit_vector(dim, i));
                                                return e;
                                              }()
                                            : nullspace(vprime, dim);
  if (Q.empty()) throw PreconditionError("inconsistent input: V' is the whole space but Gamma_0 is nonempty");
  std::vector<RationalVector> projected;
  for (const auto& a : gamma0) {
    RationalVector p(Q.size());
    for (std::size_t j = 0; j < Q.size(); ++j) p[j] = dot(Q[j], a);
    projected.push_back(std::move(p));
  }
  RationalVector chi;
  try {
    chi = separate(projected);
  } catch (const ZeroInHull&) {
    throw PreconditionError("inconsistent input: 0 lies in conv_Q of the projected zero set");
  }
  RationalVector theta = zero_vector(dim);
  for (std::size_t j = 0; j < Q.size(); ++j) theta = theta + chi[j] * Q[j];
  return theta;
}

struct ZetaResult {
  RealVector zeta;
  Integer c = 0;
};

/// zeta = rho' + c theta with the least integer c >= 0 making zeta >= 0 on
/// Gamma_0. Undecided ceilings at the precision cap round up.
inline ZetaResult combine_zeta(const RealVector& rho, const RationalVector& theta,
                               const std::vector<RationalVector>& gamma0, const AtomContext& ctx) {
  ZetaResult out;
  for (const auto& a : gamma0) {
    const Rational t = dot(theta, a);
    if (t <= 0) throw std::logic_error("combine_zeta: theta is not positive on Gamma_0");
    const LinearReal need = (Rational(0) - apply_functional(a, rho)) / t;  // -rho'(a)/theta(a)
    Integer ci;
    if (need.is_rational()) {
      ci = ceil_rational(need.constant());
    } else {
      for (unsigned prec = AtomContext::kStartPrecision;; prec *= 2) {
        const Interval iv = need.enclose(ctx, std::min(prec, ctx.precision_cap()));
        const Integer lo = ceil_rational(iv.lo), hi = ceil_rational(iv.hi);
        ci = hi;
        if (lo == hi || prec >= ctx.precision_cap()) break;
      }
    }
    out.c = std::max(out.c, ci);
  }
  if (out.c < 0) out.c = 0;
  out.zeta = rho;
  for (std::size_t i = 0; i < theta.size(); ++i)
    if (theta[i] != 0) out.zeta[i] = out.zeta[i] + Rational(out.c) * LinearReal(theta[i]);
  return out;
}

// ---------------------------------------------------------------------------

struct DualBasis {
  std::vector<RationalVector> dual;   // beta*_1..beta*_k in Gamma*
  std::vector<RationalVector> basis;  // beta_1..beta_k, dual to the above
  std::vector<std::vector<std::uint64_t>> exponents;  // per gamma: nu with gamma = sum nu_k beta_k
  std::size_t face_dim = 0;           // l = dim of the minimal face of zeta
  RationalVector theta_coefficients;  // theta = sum c_k beta*_k, c >= 0
  std::vector<LinearReal> zeta_coefficients;  // zeta(beta_k) >= 0
  bool ambiguous = false;             // some interval query hit the precision cap
};

/// Gamma must span Q^k. Builds beta* in Gamma* such that theta and zeta are
/// nonnegative combinations, then the rescaled dual basis B with Gamma in [B].
inline DualBasis build_dual_basis(const std::vector<RationalVector>& gamma, const RealVector& zeta,
                                  const RationalVector& theta, const AtomContext& ctx) {
  const std::size_t k = detail::common_dim(gamma);
  if (rank_of(gamma) != k) throw PreconditionError("build_dual_basis: Gamma must span the space");
  const RationalCone D = dual_cone(gamma, k);
  if (D.has_lineality()) throw PreconditionError("Gamma* is not pointed");
  DualBasis out;

  const bool zeta_zero = std::all_of(zeta.begin(), zeta.end(), [](const LinearReal& z) { return z.structurally_zero(); });
  const bool theta_zero = is_zero(theta);
  std::vector<RationalVector> dual;
  std::vector<LinearReal> zc;
  if (zeta_zero) {
    if (!theta_zero) {
      dual.push_back(theta);
      zc.emplace_back(Rational(0));
    }
  } else {
    const Face F = minimal_face_containing(D, zeta, ctx);
    out.ambiguous = out.ambiguous || F.ambiguous;
    std::optional<RationalVector> b1;
    const bool theta_in_face = !theta_zero && cone_contains(F.generators, {}, theta);
    if (theta_in_face) b1 = theta;
    BasisThroughPoint w = basis_through_point(F.generators, zeta, ctx, b1);
    out.ambiguous = out.ambiguous || w.ambiguous;
    out.face_dim = w.basis.size();
    dual = w.basis;
    zc = w.coefficients;
    if (!theta_zero && !theta_in_face) {
      dual.push_back(theta);
      zc.emplace_back(Rational(0));
    }
  }
  for (const auto& g : D.generators()) {
    if (dual.size() == k) break;
    auto trial = dual;
    trial.push_back(g);
    if (rank_of(trial) == trial.size()) {
      dual.push_back(g);
      zc.emplace_back(Rational(0));
    }
  }
  if (dual.size() != k) throw std::logic_error("build_dual_basis: could not complete the basis");

  // beta_j = column j of the inverse of the matrix with rows beta*_i
  const RationalMatrix inv = inverse(dual);
  std::vector<RationalVector> basis(k, RationalVector(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) basis[j][i] = inv[i][j];

  std::vector<RationalVector> nu(gamma.size(), RationalVector(k));
  for (std::size_t g = 0; g < gamma.size(); ++g)
    for (std::size_t j = 0; j < k; ++j) {
      nu[g][j] = dot(dual[j], gamma[g]);
      if (nu[g][j] < 0) throw std::logic_error("build_dual_basis: dual vector outside Gamma*");
    }
  for (std::size_t j = 0; j < k; ++j) {
    Integer l = 1;
    for (const auto& row : nu) l = lcm_int(l, den(row[j]));
    const Rational L(l);
    basis[j] = (1 / L) * basis[j];
    dual[j] = L * dual[j];
    zc[j] = zc[j] / L;
    for (auto& row : nu) row[j] *= L;
  }
  for (const auto& row : nu) {
    std::vector<std::uint64_t> e;
    for (const auto& q : row) {
      if (den(q) != 1 || q < 0) throw std::logic_error("build_dual_basis: exponent not in N_0");
      e.push_back(num(q).convert_to<std::uint64_t>());
    }
    out.exponents.push_back(std::move(e));
  }
  auto coeffs = solve_combination(dual, theta);
  if (!coeffs) throw std::logic_error("build_dual_basis: theta outside span");
  for (const auto& c : *coeffs)
    if (c < 0) throw std::logic_error("build_dual_basis: theta not a nonnegative combination");
  out.theta_coefficients = *coeffs;
  out.dual = std::move(dual);
  out.basis = std::move(basis);
  out.zeta_coefficients = std::move(zc);
  return out;
}

// ---------------------------------------------------------------------------

struct ExtensionOptions {
  unsigned precision_cap = 512;  // MPFR bits
  int phase_search = 8;          // |2 pi multiple| bound per basis element of V'
};

struct CharacterExtensionResult {
  std::vector<RationalVector> basis;  // B in the input coordinates
  std::vector<std::vector<std::uint64_t>> exponents;
  std::vector<Complex> phi;           // phi(beta_k)
  std::vector<double> zeta;           // in the working coordinates
  RationalVector theta;               // in the working coordinates
  Integer c = 0;
  std::vector<RationalVector> coordinates;  // basis of span(Gamma) used as working coordinates
  bool recoordinated = false;
  bool phases_exact = true;           // false: per-generator heuristic phases
  bool ambiguous = false;             // interval cap reached somewhere
  std::size_t face_dim = 0;
  double max_modulus_log_error = 0;
  double max_error = 0;               // max |phi(gamma) - psi(gamma)|
  std::vector<std::size_t> zero_set;  // indices of Gamma_0
};

namespace detail {

/// Lifts 2 pi multiples m_s so that tau(gamma) = sum_s c_s (a_s + 2 pi m_s)
/// matches arg psi(gamma) mod 2 pi on every element of Gamma'. Only m mod L
/// matters (L = lcm of the denominators of the c_s), so the residues
/// 0..L-1 are searched exhaustively, lowest first, when that box has at most
/// `cap` points; otherwise m_s runs over 0, 1, -1, ..., +-bound up to the cap.
/// Returns the values tau(s) on the basis S, or nullopt if none is found.
inline std::optional<std::vector<double>> lift_phases(const std::vector<double>& base_args,
                                                      const std::vector<RationalVector>& coords,
                                                      const std::vector<double>& targets, int bound,
                                                      std::uint64_t cap = 5'000'000) {
  const std::size_t ns = base_args.size();
  const double two_pi = 2 * std::numbers::pi;
  Integer L = 1;
  for (const auto& c : coords)
    for (const auto& q : c) L = lcm_int(L, den(q));
  // defect delta_j = (t_j - sum_s c_js a_s) / 2 pi must equal sum_s c_js m_s mod 1
  std::vector<std::vector<double>> cd;
  std::vector<double> delta;
  double scale = 1;
  for (std::size_t j = 0; j < coords.size(); ++j) {
    cd.push_back(to_doubles(coords[j]));
    double v = targets[j];
    for (std::size_t s = 0; s < ns; ++s) {
      v -= cd[j][s] * base_args[s];
      scale = std::max(scale, std::abs(cd[j][s]));
    }
    delta.push_back(v / two_pi);
  }
  const double tol = 1e-8 * scale * static_cast<double>(ns + 1);
  auto fits = [&](const std::vector<long long>& m) {
    for (std::size_t j = 0; j < cd.size(); ++j) {
      double v = -delta[j];
      for (std::size_t s = 0; s < ns; ++s) v += cd[j][s] * static_cast<double>(m[s]);
      if (std::abs(v - std::round(v)) > tol) return false;
    }
    return true;
  };

  std::vector<long long> values;  // candidate multiples per coordinate
  double box = 1;
  for (std::size_t s = 0; s < ns; ++s) box *= L.convert_to<double>();
  if (box <= static_cast<double>(cap)) {
    for (long long i = 0; i < L.convert_to<long long>(); ++i) values.push_back(i);
  } else {
    values.push_back(0);
    for (long long i = 1; i <= bound; ++i) values.push_back(i), values.push_back(-i);
  }
  std::vector<std::size_t> idx(ns, 0);
  std::vector<long long> m(ns, 0);
  for (std::uint64_t tried = 0; tried < cap; ++tried) {
    for (std::size_t s = 0; s < ns; ++s) m[s] = values[idx[s]];
    if (fits(m)) {
      std::vector<double> tau(ns);
      for (std::size_t s = 0; s < ns; ++s) tau[s] = base_args[s] + two_pi * static_cast<double>(m[s]);
      return tau;
    }
    std::size_t s = 0;
    while (s < ns && ++idx[s] == values.size()) idx[s++] = 0;
    if (s == ns) break;
  }
  return std::nullopt;
}

}  // namespace detail

inline CharacterExtensionResult extend_character(const CharacterExtensionProblem& problem,
                                                 const ExtensionOptions& opt = {}) {
  const PolarSplit split = polar_split(problem);
  CharacterExtensionResult res;
  res.zero_set = split.zero;
  const std::size_t d = problem.gamma.front().size();

  if (conv_q_contains_zero(problem.gamma).contains_zero)
    throw PreconditionError("0 lies in conv_Q(Gamma); Gamma cannot come from a bounded character");

  // working coordinates: a basis of span(Gamma)
  std::vector<RationalVector> gamma = problem.gamma;
  std::size_t k = d;
  const RowEchelon span = rref(problem.gamma, d);
  if (span.rank() < d) {
    res.recoordinated = true;
    res.coordinates = span.rows;
    k = span.rank();
    for (auto& g : gamma) {
      auto c = solve_combination(span.rows, g);
      g = *c;
    }
  } else {
    for (std::size_t i = 0; i < d; ++i) res.coordinates.push_back(unit_vector(d, i));
  }

  std::vector<RationalVector> gprime, gzero;
  std::vector<double> mprime;
  for (auto i : split.nonzero) {
    gprime.push_back(gamma[i]);
    mprime.push_back(split.modulus[i]);
  }
  for (auto i : split.zero) gzero.push_back(gamma[i]);

  const ModulusFunctional mf = modulus_functional(gprime, mprime, k, opt.precision_cap);
  res.max_modulus_log_error = mf.max_log_residual;
  const AtomContext& ctx = *mf.context;
  std::vector<RationalVector> vbasis;
  for (auto s : mf.basis) vbasis.push_back(gprime[s]);
  const RationalVector theta = zero_set_separation(gzero, vbasis, k);
  const ZetaResult z = combine_zeta(mf.rho, theta, gzero, ctx);
  const DualBasis db = build_dual_basis(gamma, z.zeta, theta, ctx);
  res.ambiguous = db.ambiguous;
  res.face_dim = db.face_dim;
  res.c = z.c;
  res.theta = theta;
  res.zeta = to_doubles(z.zeta, ctx);
  res.exponents = db.exponents;

  // phases: tau' = sum_s tau(s) eps_s, zero off V'
  std::vector<double> tau_on_basis;
  if (!gprime.empty()) {
    std::vector<double> base, targets;
    for (auto s : mf.basis) base.push_back(std::arg(*split.phase[split.nonzero[s]]));
    std::vector<RationalVector> coords;
    for (std::size_t j = 0; j < gprime.size(); ++j) {
      coords.push_back(*solve_combination(vbasis, gprime[j]));
      targets.push_back(std::arg(*split.phase[split.nonzero[j]]));
    }
    auto lifted = detail::lift_phases(base, coords, targets, opt.phase_search);
    res.phases_exact = lifted.has_value();
    tau_on_basis = lifted ? *lifted : base;
  }
  std::vector<double> tau(k, 0.0);
  for (std::size_t s = 0; s < tau_on_basis.size(); ++s) {
    const auto e = to_doubles(mf.dual_rows[s]);
    for (std::size_t i = 0; i < k; ++i) tau[i] += tau_on_basis[s] * e[i];
  }

  for (std::size_t j = 0; j < k; ++j) {
    const RationalVector& b = db.basis[j];
    const double zb = apply_functional(b, z.zeta).to_double(ctx);
    const bool theta_zero = dot(theta, b) == 0;
    double phase = 0;
    const auto bd = to_doubles(b);
    for (std::size_t i = 0; i < k; ++i) phase += tau[i] * bd[i];
    res.phi.push_back(theta_zero ? std::polar(std::exp(-std::max(0.0, zb)), phase) : Complex(0.0, 0.0));
    // back to input coordinates
    RationalVector orig = zero_vector(d);
    for (std::size_t i = 0; i < k; ++i)
      if (b[i] != 0) orig = orig + b[i] * res.coordinates[i];
    res.basis.push_back(std::move(orig));
  }

  for (std::size_t g = 0; g < gamma.size(); ++g) {
    Complex v(1.0, 0.0);
    for (std::size_t j = 0; j < k; ++j)
      for (std::uint64_t n = 0; n < res.exponents[g][j]; ++n) v *= res.phi[j];
    res.max_error = std::max(res.max_error, std::abs(v - problem.psi[g]));
  }
  return res;
}

}  // namespace forge

#endif  // FORGE_EXTENSION_HPP
