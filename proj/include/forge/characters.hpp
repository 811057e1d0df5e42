#ifndef FORGE_CHARACTERS_HPP
#define FORGE_CHARACTERS_HPP

// Bounded characters psi: Lambda -> C and the functional
// h_psi(a) = sum a(lambda) psi(lambda).

#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "forge/algebra.hpp"
#include "forge/error.hpp"
#include "forge/scalar.hpp"
#include "forge/semigroup.hpp"
#include "forge/weights.hpp"

namespace forge {

enum class Provenance { FromS, Explicit, Extended };

inline std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::FromS:
      return "FROM_S";
    case Provenance::Explicit:
      return "EXPLICIT";
    case Provenance::Extended:
      return "EXTENDED";
  }
  return "?";
}

class Character {
 public:
  /// Rounding slack allowed on |z| <= 1 for values computed in floating point.
  static constexpr double kModulusSlack = 1e-12;

  /// psi_s(lambda) = exp(-lambda . s); needs Re s >= 0.
  static Character from_s(BasisPtr basis, std::vector<Complex> s) {
    if (s.size() != basis->dim()) throw DimensionMismatch("s has the wrong number of coordinates");
    for (const auto& z : s)
      if (z.real() < 0) throw PreconditionError("from_s needs Re s >= 0");
    Character c(std::move(basis), Provenance::FromS);
    for (const auto& g : c.basis_->generators())
      c.values_[g.id] = exp_pairing(*c.basis_, SemigroupElement::generator(g.id), s);
    c.s_ = std::move(s);
    return c;
  }

  /// Generator values on a FREE basis; every generator must be given.
  static Character from_values(BasisPtr basis, std::map<int, Complex> values,
                               Provenance provenance = Provenance::Explicit) {
    if (basis->mode() != BasisMode::Free)
      throw PreconditionError("explicit characters need a FREE basis");
    for (const auto& g : basis->generators())
      if (!values.count(g.id)) throw PreconditionError("missing value for generator " + std::to_string(g.id));
    for (const auto& [id, z] : values) {
      if (!basis->has_id(id)) throw PreconditionError("unknown generator id " + std::to_string(id));
      if (!(std::abs(z) <= 1.0 + kModulusSlack))
        throw PreconditionError("unbounded character: |z_" + std::to_string(id) + "| = " +
                                std::to_string(std::abs(z)) + " > 1");
    }
    Character c(std::move(basis), provenance);
    c.values_ = std::move(values);
    return c;
  }

  const BasisPtr& basis() const { return basis_; }
  Provenance provenance() const { return provenance_; }
  const std::map<int, Complex>& generator_values() const { return values_; }
  /// s for FROM_S characters, empty otherwise.
  const std::vector<Complex>& s() const { return s_; }

  Complex value(int id) const {
    if (provenance_ == Provenance::FromS)
      return exp_pairing(*basis_, SemigroupElement::generator(id), s_);
    auto it = values_.find(id);
    if (it == values_.end()) throw PreconditionError("unknown generator id " + std::to_string(id));
    return it->second;
  }

 private:
  Character(BasisPtr basis, Provenance p) : basis_(std::move(basis)), provenance_(p) {}

  BasisPtr basis_;
  Provenance provenance_;
  std::map<int, Complex> values_;
  std::vector<Complex> s_;
};

/// psi(lambda) = prod z_beta^{nu_beta}; FROM_S characters use exp(-lambda . s).
inline Complex apply(const Character& psi, const SemigroupElement& e) {
  require_member(*psi.basis(), e);
  if (psi.provenance() == Provenance::FromS) return exp_pairing(*psi.basis(), e, psi.s());
  if (e.embedded()) throw PreconditionError("EMBEDDED element has no factorization for an explicit character");
  Complex r(1.0, 0.0);
  for (const auto& [id, k] : e.exponents()) {
    const Complex z = psi.value(id);
    Complex p(1.0, 0.0), b = z;
    for (std::uint64_t n = k; n > 0; n >>= 1) {
      if (n & 1) p *= b;
      b *= b;
    }
    r *= p;
  }
  return r;
}

/// h_psi(a) = sum a(lambda) psi(lambda). For FROM_S characters this is the
/// same sum as evaluate_series(a, s).
template <Scalar S>
Complex functional(const Character& psi, const AlgebraElement<S>& a) {
  if (!same_basis(psi.basis(), a.basis())) throw BasisMismatch();
  if (psi.provenance() == Provenance::FromS) return evaluate_series(a, psi.s()).value;
  Complex acc(0.0, 0.0);
  for (const auto& [k, c] : a.terms()) acc += ScalarTraits<S>::to_complex(c) * apply(psi, k.element);
  return acc;
}

/// Generator check |z_beta| <= 1 plus sampled |psi(lambda)| <= w(lambda).
inline bool is_w_bounded(const Character& psi, const WeightFn& w,
                         const std::vector<SemigroupElement>& samples = {}) {
  for (const auto& g : psi.basis()->generators())
    if (!(std::abs(psi.value(g.id)) <= 1.0 + Character::kModulusSlack)) return false;
  for (const auto& e : samples) {
    const double bound = eval(w, *psi.basis(), e);
    if (!(std::abs(apply(psi, e)) <= bound * (1.0 + Character::kModulusSlack))) return false;
  }
  return true;
}

}  // namespace forge

#endif  // FORGE_CHARACTERS_HPP
