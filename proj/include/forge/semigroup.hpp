#ifndef FORGE_SEMIGROUP_HPP
#define FORGE_SEMIGROUP_HPP

// Finitely generated additive subsemigroups of [0, inf)^r.
//
// FREE bases identify an element with its exponent vector over the
// generators; the real embedding is only used for ordering, cutoffs and
// evaluation. EMBEDDED bases carry exact rational coordinates and identify an
// element with its coordinate vector.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "forge/error.hpp"
#include "forge/rational.hpp"

namespace forge {

#ifdef FORGE_EXTENDED_PRECISION
using Real = long double;
#else
using Real = double;
#endif

enum class BasisMode { Free, Embedded };

struct Generator {
  int id = 0;
  std::vector<Real> value;                    // embedding, one entry per coordinate
  std::optional<RationalVector> exact;        // exact coordinates when known
  std::string label;

  friend bool operator==(const Generator&, const Generator&) = default;
};

class SemigroupBasis {
 public:
  SemigroupBasis(BasisMode mode, std::size_t dim, std::vector<Generator> generators)
      : mode_(mode), dim_(dim), generators_(std::move(generators)) {
    validate();
  }

  /// N_0 with the single generator 1.
  static std::shared_ptr<const SemigroupBasis> natural() {
    return std::make_shared<const SemigroupBasis>(
        BasisMode::Free, 1, std::vector<Generator>{{1, {1.0}, RationalVector{Rational(1)}, "1"}});
  }

  /// log N: generators log p for all primes p <= bound, generator id = p.
  static std::shared_ptr<const SemigroupBasis> log_primes(std::uint64_t bound);

  /// Free basis over N_0^r product semigroup: generator i is the i-th unit vector.
  static std::shared_ptr<const SemigroupBasis> lattice(std::size_t r) {
    std::vector<Generator> gens;
    for (std::size_t i = 0; i < r; ++i) {
      std::vector<Real> v(r, 0);
      v[i] = 1;
      gens.push_back({static_cast<int>(i + 1), v, unit_vector(r, i), "e" + std::to_string(i + 1)});
    }
    return std::make_shared<const SemigroupBasis>(BasisMode::Free, r, std::move(gens));
  }

  BasisMode mode() const { return mode_; }
  std::size_t dim() const { return dim_; }
  const std::vector<Generator>& generators() const { return generators_; }

  bool has_id(int id) const { return index_.count(id) != 0; }
  std::size_t index_of(int id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw PreconditionError("unknown generator id " + std::to_string(id));
    return it->second;
  }
  const Generator& generator(int id) const { return generators_[index_of(id)]; }
  /// |beta|_1 of a generator.
  Real generator_magnitude(int id) const { return magnitudes_[index_of(id)]; }

  bool all_exact() const {
    return std::all_of(generators_.begin(), generators_.end(),
                       [](const Generator& g) { return g.exact.has_value(); });
  }

  friend bool operator==(const SemigroupBasis& a, const SemigroupBasis& b) {
    return a.mode_ == b.mode_ && a.dim_ == b.dim_ && a.generators_ == b.generators_;
  }

 private:
  void validate() {
    if (dim_ == 0) throw PreconditionError("semigroup dimension must be positive");
    for (std::size_t i = 0; i < generators_.size(); ++i) {
      const Generator& g = generators_[i];
      if (!index_.emplace(g.id, i).second)
        throw PreconditionError("duplicate generator id " + std::to_string(g.id));
      if (g.value.size() != dim_) throw DimensionMismatch("generator embedding has wrong dimension");
      if (g.exact && g.exact->size() != dim_)
        throw DimensionMismatch("generator exact coordinates have wrong dimension");
      bool positive = false;
      Real mag = 0;
      for (Real c : g.value) {
        if (!(c >= 0)) throw PreconditionError("generator coordinates must be >= 0");
        if (c > 0) positive = true;
        mag += c;
      }
      if (!positive) throw PreconditionError("generator must have a positive coordinate");
      if (g.exact) {
        for (const auto& q : *g.exact)
          if (q < 0) throw PreconditionError("generator exact coordinates must be >= 0");
      }
      magnitudes_.push_back(mag);
    }
    if (mode_ == BasisMode::Free && all_exact() && !generators_.empty()) {
      std::vector<RationalVector> vs;
      for (const auto& g : generators_) vs.push_back(*g.exact);
      if (!linearly_independent(vs))
        throw PreconditionError("FREE basis generators are not Q-linearly independent");
    }
  }

  BasisMode mode_;
  std::size_t dim_;
  std::vector<Generator> generators_;
  std::unordered_map<int, std::size_t> index_;
  std::vector<Real> magnitudes_;
};

using BasisPtr = std::shared_ptr<const SemigroupBasis>;

inline bool same_basis(const BasisPtr& a, const BasisPtr& b) {
  return a == b || (a && b && *a == *b);
}

/// An element of a semigroup, relative to some basis. FREE elements store a
/// sorted sparse exponent list; EMBEDDED elements store exact coordinates.
class SemigroupElement {
 public:
  using Exponents = std::vector<std::pair<int, std::uint64_t>>;

  SemigroupElement() = default;

  static SemigroupElement from_exponents(std::map<int, std::uint64_t> exps) {
    SemigroupElement e;
    e.embedded_ = false;
    for (const auto& [id, nu] : exps)
      if (nu != 0) e.exps_.emplace_back(id, nu);
    return e;
  }
  static SemigroupElement generator(int id, std::uint64_t power = 1) {
    return from_exponents({{id, power}});
  }
  static SemigroupElement from_coords(RationalVector coords) {
    for (const auto& q : coords)
      if (q < 0) throw PreconditionError("embedded coordinates must be >= 0");
    SemigroupElement e;
    e.embedded_ = true;
    e.coords_ = std::move(coords);
    return e;
  }
  /// The identity of a basis.
  static SemigroupElement zero(const SemigroupBasis& basis) {
    if (basis.mode() == BasisMode::Embedded) return from_coords(zero_vector(basis.dim()));
    return SemigroupElement{};
  }

  bool embedded() const { return embedded_; }
  const Exponents& exponents() const { return exps_; }
  const RationalVector& coords() const { return coords_; }

  bool is_zero() const { return embedded_ ? forge::is_zero(coords_) : exps_.empty(); }

  std::uint64_t exponent(int id) const {
    auto it = std::lower_bound(exps_.begin(), exps_.end(), std::make_pair(id, std::uint64_t{0}));
    return (it != exps_.end() && it->first == id) ? it->second : 0;
  }

  std::map<int, std::uint64_t> exponent_map() const { return {exps_.begin(), exps_.end()}; }

  friend bool operator==(const SemigroupElement& a, const SemigroupElement& b) {
    return a.embedded_ == b.embedded_ && a.exps_ == b.exps_ && a.coords_ == b.coords_;
  }
  /// Structural lexicographic order (not the grading).
  friend bool operator<(const SemigroupElement& a, const SemigroupElement& b) {
    if (a.embedded_ != b.embedded_) return a.embedded_ < b.embedded_;
    if (a.embedded_) return a.coords_ < b.coords_;
    return a.exps_ < b.exps_;
  }

  /// Unchecked sum; use element_add for basis validation.
  friend SemigroupElement unchecked_add(const SemigroupElement& a, const SemigroupElement& b) {
    SemigroupElement out;
    out.embedded_ = a.embedded_;
    if (a.embedded_) {
      out.coords_ = a.coords_ + b.coords_;
      return out;
    }
    out.exps_.reserve(a.exps_.size() + b.exps_.size());
    auto i = a.exps_.begin(), j = b.exps_.begin();
    while (i != a.exps_.end() || j != b.exps_.end()) {
      if (j == b.exps_.end() || (i != a.exps_.end() && i->first < j->first)) {
        out.exps_.push_back(*i++);
      } else if (i == a.exps_.end() || j->first < i->first) {
        out.exps_.push_back(*j++);
      } else {
        out.exps_.emplace_back(i->first, i->second + j->second);
        ++i;
        ++j;
      }
    }
    return out;
  }

 private:
  bool embedded_ = false;
  Exponents exps_;
  RationalVector coords_;
};

/// Throws BasisMismatch unless `e` is an element expressed over `basis`.
inline void require_member(const SemigroupBasis& basis, const SemigroupElement& e) {
  if (basis.mode() == BasisMode::Embedded) {
    if (!e.embedded() || e.coords().size() != basis.dim()) throw BasisMismatch();
    return;
  }
  if (e.embedded()) throw BasisMismatch();
  for (const auto& [id, nu] : e.exponents())
    if (!basis.has_id(id)) throw BasisMismatch("exponent refers to unknown generator id");
}

inline SemigroupElement element_add(const SemigroupBasis& basis, const SemigroupElement& a,
                                    const SemigroupElement& b) {
  require_member(basis, a);
  require_member(basis, b);
  return unchecked_add(a, b);
}

/// k * lambda
inline SemigroupElement element_scale(const SemigroupElement& e, std::uint64_t k) {
  if (e.embedded()) return SemigroupElement::from_coords(Rational(k) * e.coords());
  std::map<int, std::uint64_t> m;
  if (k != 0)
    for (const auto& [id, nu] : e.exponents()) m[id] = nu * k;
  return SemigroupElement::from_exponents(std::move(m));
}

/// Real r-vector embedding of an element.
inline std::vector<Real> embedded_value(const SemigroupBasis& basis, const SemigroupElement& e) {
  std::vector<Real> v(basis.dim(), 0);
  if (e.embedded()) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = e.coords()[i].convert_to<Real>();
    return v;
  }
  for (const auto& [id, nu] : e.exponents()) {
    const auto& g = basis.generator(id);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += static_cast<Real>(nu) * g.value[i];
  }
  return v;
}

/// |lambda|_1, the sum of the embedded coordinates. Deterministic in the
/// element, so equal elements always get bit-identical magnitudes.
inline Real magnitude(const SemigroupBasis& basis, const SemigroupElement& e) {
  if (e.embedded()) {
    Rational s = 0;
    for (const auto& q : e.coords()) s += q;
    return s.convert_to<Real>();
  }
  Real m = 0;
  for (const auto& [id, nu] : e.exponents()) m += static_cast<Real>(nu) * basis.generator_magnitude(id);
  return m;
}

/// Exact coordinates; requires exact generator data in FREE mode.
inline RationalVector exact_value(const SemigroupBasis& basis, const SemigroupElement& e) {
  if (e.embedded()) return e.coords();
  RationalVector v = zero_vector(basis.dim());
  for (const auto& [id, nu] : e.exponents()) {
    const auto& g = basis.generator(id);
    if (!g.exact) throw PreconditionError("generator " + std::to_string(id) + " has no exact coordinates");
    v = v + Rational(nu) * *g.exact;
  }
  return v;
}

/// Exact Q-linear independence of a list of rational vectors.
inline bool check_q_independence(const std::vector<RationalVector>& vectors) {
  if (vectors.empty()) throw PreconditionError("check_q_independence needs a nonempty list");
  return linearly_independent(vectors);
}

namespace detail {

inline bool membership_search(const std::vector<RationalVector>& gens, std::size_t next,
                              RationalVector& residual, std::uint64_t bound,
                              std::vector<std::uint64_t>& nu) {
  if (is_zero(residual)) return true;
  if (next == gens.size()) return false;
  const RationalVector& g = gens[next];
  std::uint64_t k = 0;
  RationalVector r = residual;
  while (true) {
    nu[next] = k;
    if (membership_search(gens, next + 1, r, bound, nu)) {
      residual = r;
      return true;
    }
    if (k == bound) break;
    r = r - g;
    if (std::any_of(r.begin(), r.end(), [](const Rational& q) { return q < 0; })) break;
    ++k;
  }
  nu[next] = 0;
  return false;
}

}  // namespace detail

/// Finds nu in N_0^k with target = sum nu_i beta_i. For Q-independent bases
/// the representation is unique and obtained by an exact solve; otherwise a
/// bounded exhaustive search is run (each exponent <= bound).
inline std::optional<std::map<int, std::uint64_t>> membership(const RationalVector& target,
                                                              const SemigroupBasis& basis,
                                                              std::uint64_t bound = 32) {
  if (!basis.all_exact()) throw PreconditionError("membership requires exact generator coordinates");
  if (target.size() != basis.dim()) throw DimensionMismatch("membership target has wrong dimension");
  std::vector<RationalVector> gens;
  for (const auto& g : basis.generators()) gens.push_back(*g.exact);
  std::map<int, std::uint64_t> out;
  if (gens.empty()) {
    if (is_zero(target)) return out;
    return std::nullopt;
  }
  if (linearly_independent(gens)) {
    auto sol = solve_combination(gens, target);
    if (!sol) return std::nullopt;
    for (std::size_t i = 0; i < gens.size(); ++i) {
      const Rational& c = (*sol)[i];
      if (c < 0 || den(c) != 1) return std::nullopt;
      if (c > Rational(bound)) return std::nullopt;
      if (c != 0) out[basis.generators()[i].id] = num(c).convert_to<std::uint64_t>();
    }
    return out;
  }
  RationalVector residual = target;
  std::vector<std::uint64_t> nu(gens.size(), 0);
  if (!detail::membership_search(gens, 0, residual, bound, nu)) return std::nullopt;
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (nu[i] != 0) out[basis.generators()[i].id] = nu[i];
  return out;
}

inline std::optional<std::map<int, std::uint64_t>> membership(const SemigroupElement& e,
                                                              const SemigroupBasis& basis,
                                                              std::uint64_t bound = 32) {
  if (!e.embedded()) throw PreconditionError("membership of a FREE element: pass its exact coordinates");
  return membership(e.coords(), basis, bound);
}

// ---------------------------------------------------------------------------
// log N

inline std::vector<std::uint64_t> primes_up_to(std::uint64_t bound) {
  std::vector<std::uint64_t> primes;
  if (bound < 2) return primes;
  std::vector<bool> composite(bound + 1, false);
  for (std::uint64_t i = 2; i <= bound; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (std::uint64_t j = i * i; j <= bound; j += i) composite[j] = true;
  }
  return primes;
}

inline std::shared_ptr<const SemigroupBasis> SemigroupBasis::log_primes(std::uint64_t bound) {
  std::vector<Generator> gens;
  for (auto p : primes_up_to(bound))
    gens.push_back({static_cast<int>(p), {std::log(static_cast<Real>(p))}, std::nullopt,
                    "log " + std::to_string(p)});
  return std::make_shared<const SemigroupBasis>(BasisMode::Free, 1, std::move(gens));
}

/// log n as an element of the log-primes basis (exponents = prime factorization).
inline SemigroupElement log_of(std::uint64_t n) {
  if (n == 0) throw PreconditionError("log_of(0)");
  std::map<int, std::uint64_t> exps;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      ++exps[static_cast<int>(p)];
      n /= p;
    }
  }
  if (n > 1) ++exps[static_cast<int>(n)];
  return SemigroupElement::from_exponents(std::move(exps));
}

/// Inverse of log_of: the integer n with lambda = log n.
inline std::uint64_t exp_of(const SemigroupElement& e) {
  std::uint64_t n = 1;
  for (const auto& [p, nu] : e.exponents())
    for (std::uint64_t i = 0; i < nu; ++i) n *= static_cast<std::uint64_t>(p);
  return n;
}

}  // namespace forge

#endif  // FORGE_SEMIGROUP_HPP
