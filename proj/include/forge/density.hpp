#ifndef FORGE_DENSITY_HPP
#define FORGE_DENSITY_HPP

// Kronecker approximation on the torus and the value-level search for
// s in the closed right half-space with h_s(a) close to h_psi(a).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "forge/algebra.hpp"
#include "forge/characters.hpp"
#include "forge/error.hpp"

namespace forge {

struct KroneckerInstance {
  std::vector<double> betas;     // positive, declared Q-independent
  std::vector<Complex> targets;  // unimodular
  double theta = 1e-2;
  std::uint64_t budget = 1'000'000;  // orbit steps
};

struct KroneckerResult {
  double t = 0;
  std::vector<double> errors;  // |exp(-i beta_k t) - z_k|, re-evaluated
  double max_error = 0;
  bool success = false;        // max_error < theta
  std::uint64_t steps = 0;
};

namespace detail {

inline std::vector<double> kronecker_errors(const std::vector<double>& betas,
                                            const std::vector<Complex>& targets, double t) {
  std::vector<double> e;
  for (std::size_t k = 0; k < betas.size(); ++k)
    e.push_back(std::abs(std::exp(Complex(0.0, -betas[k] * t)) - targets[k]));
  return e;
}

}  // namespace detail

/// t with |exp(-i beta_k t) - z_k| < theta for all k. For one frequency the
/// closed form t = -arg(z)/beta (reduced to [0, 2 pi / beta)) is exact. For
/// more, the first coordinate is pinned by the closed form and the orbit
/// t_n = t_0 + 2 pi n / beta_1 is scanned in the order n = 0, 1, -1, 2, ...
/// keeping the best candidate.
inline KroneckerResult kronecker_t(const KroneckerInstance& in) {
  if (in.betas.empty() || in.betas.size() != in.targets.size())
    throw PreconditionError("kronecker_t needs one target per beta");
  if (!(in.theta > 0)) throw PreconditionError("kronecker_t needs theta > 0");
  for (double b : in.betas)
    if (!(b > 0)) throw PreconditionError("kronecker_t needs positive betas");
  for (const auto& z : in.targets)
    if (std::abs(std::abs(z) - 1.0) > 1e-9) throw PreconditionError("kronecker_t targets must be unimodular");

  const double two_pi = 2 * std::numbers::pi;
  const double period = two_pi / in.betas[0];
  double t0 = -std::arg(in.targets[0]) / in.betas[0];
  if (t0 < 0) t0 += period;

  KroneckerResult best;
  best.max_error = std::numeric_limits<double>::infinity();
  auto consider = [&](double t) {
    auto e = detail::kronecker_errors(in.betas, in.targets, t);
    const double m = *std::max_element(e.begin(), e.end());
    if (m < best.max_error || (m == best.max_error && std::abs(t) < std::abs(best.t))) {
      best.t = t;
      best.errors = std::move(e);
      best.max_error = m;
    }
  };
  consider(t0);
  best.steps = 1;
  for (std::uint64_t n = 1; n < in.budget && best.max_error >= in.theta; ++n) {
    const double shift = static_cast<double>((n + 1) / 2) * period;
    consider(n % 2 == 1 ? t0 + shift : t0 - shift);
    best.steps = n + 1;
  }
  best.success = best.max_error < in.theta;
  return best;
}

// ---------------------------------------------------------------------------

struct DensitySearchOptions {
  double theta = 1e-2;
  std::uint64_t budget = 1'000'000;  // series evaluations
  std::uint64_t seed = 0;
  std::optional<double> sigma_max;   // default 40 / min |beta|
  int newton_steps = 60;
};

struct DensitySearchReport {
  std::vector<Complex> s;
  double achieved_error = std::numeric_limits<double>::infinity();
  Complex target_value;   // h_psi(a)
  Complex value_at_s;     // h_s(a)
  std::vector<SemigroupElement> gamma_used;
  double tail_error = 0;  // sum of |a| outside gamma_used
  bool success = false;   // achieved_error < 3 theta
  bool exhausted = false; // budget ran out without success
  std::uint64_t evaluations = 0;
};

namespace detail {

struct SeriesTerm {
  Complex coeff;
  std::vector<double> lambda;  // embedded value
};

class SearchState {
 public:
  SearchState(std::vector<SeriesTerm> terms, Complex target, std::uint64_t budget)
      : terms_(std::move(terms)), target_(target), budget_(budget) {}

  bool out_of_budget() const { return used_ >= budget_; }
  std::uint64_t used() const { return used_; }

  /// f(s) = sum a e^{-lambda.s} - target and its gradient; counts one evaluation.
  std::optional<std::pair<Complex, std::vector<Complex>>> eval(const std::vector<Complex>& s) {
    if (out_of_budget()) return std::nullopt;
    ++used_;
    Complex f = -target_;
    std::vector<Complex> g(s.size(), Complex(0.0, 0.0));
    for (const auto& t : terms_) {
      Complex e(0.0, 0.0);
      for (std::size_t i = 0; i < s.size(); ++i) e += t.lambda[i] * s[i];
      const Complex v = t.coeff * std::exp(-e);
      f += v;
      for (std::size_t i = 0; i < s.size(); ++i) g[i] -= t.lambda[i] * v;
    }
    const double err = std::abs(f);
    if (err < best_err_ || (err == best_err_ && better_tie(s))) {
      best_err_ = err;
      best_s_ = s;
    }
    return std::make_pair(f, std::move(g));
  }

  double best_error() const { return best_err_; }
  const std::vector<Complex>& best_s() const { return best_s_; }

 private:
  bool better_tie(const std::vector<Complex>& s) const {
    // lowest sigma, then lowest |t|
    double sa = 0, sb = 0, ta = 0, tb = 0;
    for (const auto& z : s) sa += z.real(), ta += std::abs(z.imag());
    for (const auto& z : best_s_) sb += z.real(), tb += std::abs(z.imag());
    return sa < sb || (sa == sb && ta < tb);
  }

  std::vector<SeriesTerm> terms_;
  Complex target_;
  std::uint64_t budget_;
  std::uint64_t used_ = 0;
  double best_err_ = std::numeric_limits<double>::infinity();
  std::vector<Complex> best_s_;
};

/// Damped minimal-norm Newton on f(s) = 0 with Re s kept >= 0.
inline void newton_from(SearchState& st, std::vector<Complex> s, int steps, double stop) {
  auto r = st.eval(s);
  if (!r) return;
  for (int it = 0; it < steps && std::abs(r->first) >= stop; ++it) {
    double g2 = 0;
    for (const auto& gi : r->second) g2 += std::norm(gi);
    if (!(g2 > 0) || !std::isfinite(g2)) return;
    std::vector<Complex> step(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) step[i] = -r->first * std::conj(r->second[i]) / g2;
    double damp = 1.0;
    bool moved = false;
    for (int h = 0; h < 12; ++h, damp /= 2) {
      std::vector<Complex> cand(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) {
        cand[i] = s[i] + damp * step[i];
        if (cand[i].real() < 0) cand[i] = Complex(0.0, cand[i].imag());
      }
      auto rc = st.eval(cand);
      if (!rc) return;
      if (std::abs(rc->first) < std::abs(r->first)) {
        s = std::move(cand);
        r = std::move(rc);
        moved = true;
        break;
      }
    }
    if (!moved) return;
  }
}

}  // namespace detail

/// Searches s in the closed half-space with |h_s(a) - h_psi(a)| small. The
/// finite set gamma_used is the shortest magnitude-ordered prefix of the
/// support whose complement has l1 mass < theta; the search works on that
/// prefix. Seeds: s from the generator moduli and Kronecker-aligned phases
/// (one-dimensional embeddings), then seeded random restarts, each refined
/// by damped Newton. The evaluation order does not depend on the budget, so
/// a larger budget never gives a worse incumbent. The reported error is
/// recomputed on the full support.
template <Scalar S>
DensitySearchReport approximate_functional(const AlgebraElement<S>& a, const Character& psi,
                                           const DensitySearchOptions& opt = {}) {
  if (!same_basis(a.basis(), psi.basis())) throw BasisMismatch();
  if (!(opt.theta > 0)) throw PreconditionError("approximate_functional needs theta > 0");
  const auto& basis = *a.basis();
  const std::size_t r = basis.dim();

  DensitySearchReport rep;
  rep.target_value = functional(psi, a);

  // gamma_used: drop the largest-magnitude terms while their mass stays < theta
  std::vector<std::pair<GradedKey, Complex>> terms;
  for (const auto& [k, c] : a.terms()) terms.emplace_back(k, ScalarTraits<S>::to_complex(c));
  std::size_t keep = terms.size();
  double tail = 0;
  while (keep > 0 && tail + std::abs(terms[keep - 1].second) < opt.theta) {
    tail += std::abs(terms[keep - 1].second);
    --keep;
  }
  rep.tail_error = tail;
  std::vector<detail::SeriesTerm> st_terms;
  Complex target_gamma(0.0, 0.0);
  for (std::size_t i = 0; i < keep; ++i) {
    rep.gamma_used.push_back(terms[i].first.element);
    auto lam = embedded_value(basis, terms[i].first.element);
    st_terms.push_back({terms[i].second, std::vector<double>(lam.begin(), lam.end())});
    target_gamma += terms[i].second * apply(psi, terms[i].first.element);
  }
  detail::SearchState st(std::move(st_terms), target_gamma, opt.budget);
  const double stop = opt.theta / 4;

  // generators occurring in gamma_used
  std::vector<int> gens;
  for (const auto& e : rep.gamma_used)
    if (!e.embedded())
      for (const auto& [id, nu] : e.exponents())
        if (std::find(gens.begin(), gens.end(), id) == gens.end()) gens.push_back(id);
  std::sort(gens.begin(), gens.end());
  double min_beta = std::numeric_limits<double>::infinity();
  for (const auto& g : basis.generators()) min_beta = std::min(min_beta, static_cast<double>(basis.generator_magnitude(g.id)));
  const double sigma_max = opt.sigma_max ? *opt.sigma_max : 40.0 / min_beta;

  std::vector<std::vector<Complex>> seeds;
  if (r == 1 && !gens.empty()) {
    std::vector<double> betas, sigmas;
    std::vector<Complex> phases;
    for (int id : gens) {
      const double beta = static_cast<double>(basis.generator(id).value[0]);
      const Complex z = psi.value(id);
      betas.push_back(beta);
      sigmas.push_back(std::abs(z) > 0 ? std::min(sigma_max, -std::log(std::abs(z)) / beta) : sigma_max);
      phases.push_back(std::abs(z) > 0 ? z / std::abs(z) : Complex(1.0, 0.0));
    }
    KroneckerInstance kin{betas, phases, opt.theta, 200'000};
    const double t = kronecker_t(kin).t;
    std::vector<double> sorted = sigmas;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> cands{sorted[sorted.size() / 2], sorted.front(), sorted.back()};
    for (double sg : cands) seeds.push_back({Complex(std::max(0.0, sg), t)});
  } else if (psi.provenance() == Provenance::FromS) {
    seeds.push_back(psi.s());
  }

  for (const auto& s0 : seeds) {
    if (st.best_error() < stop || st.out_of_budget()) break;
    detail::newton_from(st, s0, opt.newton_steps, stop);
  }
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double t_range = 1000.0;
  while (st.best_error() >= stop && !st.out_of_budget()) {
    std::vector<Complex> s0(r);
    for (auto& z : s0) {
      // favour small sigma, where the values spread the most
      const double u = unit(rng);
      z = Complex(std::min(sigma_max, u * u * 4.0 / min_beta), (2 * unit(rng) - 1) * t_range);
    }
    detail::newton_from(st, s0, opt.newton_steps, stop);
  }

  rep.evaluations = st.used();
  rep.s = st.best_s().empty() ? std::vector<Complex>(r, Complex(0.0, 0.0)) : st.best_s();
  rep.value_at_s = evaluate_series(a, rep.s).value;
  rep.achieved_error = std::abs(rep.value_at_s - rep.target_value);
  rep.success = rep.achieved_error < 3 * opt.theta;
  rep.exhausted = !rep.success && st.out_of_budget();
  return rep;
}

}  // namespace forge

#endif  // FORGE_DENSITY_HPP
