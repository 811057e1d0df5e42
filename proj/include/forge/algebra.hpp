#ifndef FORGE_ALGEBRA_HPP
#define FORGE_ALGEBRA_HPP

// The weighted convolution algebra A_w(Lambda) of finitely supported
// coefficient functions on a finitely generated semigroup.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "forge/error.hpp"
#include "forge/scalar.hpp"
#include "forge/semigroup.hpp"
#include "forge/weights.hpp"

namespace forge {

namespace detail {

/// Slack used when comparing float magnitudes against a truncation bound,
/// so that e.g. log(10^4) computed two different ways is still "<= T".
inline bool within_cutoff(Real magnitude, double cutoff) {
  return static_cast<double>(magnitude) <= cutoff + 1e-12 * std::max(1.0, std::abs(cutoff));
}

}  // namespace detail

/// Element key ordered by the grading |lambda|_1, ties broken
/// lexicographically on the structural representation.
struct GradedKey {
  Real magnitude = 0;
  SemigroupElement element;

  friend bool operator<(const GradedKey& a, const GradedKey& b) {
    if (a.magnitude != b.magnitude) return a.magnitude < b.magnitude;
    return a.element < b.element;
  }
};

template <Scalar S>
class AlgebraElement {
 public:
  using Terms = std::map<GradedKey, S>;

  explicit AlgebraElement(BasisPtr basis, std::optional<double> truncation = std::nullopt)
      : basis_(std::move(basis)), truncation_(truncation) {
    if (!basis_) throw PreconditionError("algebra element needs a basis");
    if (truncation_ && !(*truncation_ > 0)) throw PreconditionError("truncation must be positive");
  }

  /// Accumulates terms; zero results are dropped when the element is built.
  class Builder {
   public:
    explicit Builder(BasisPtr basis, std::optional<double> truncation = std::nullopt)
        : out_(std::move(basis), truncation) {}

    Builder& add(const SemigroupElement& e, const S& c) {
      require_member(*out_.basis_, e);
      const Real m = magnitude(*out_.basis_, e);
      return add_keyed(GradedKey{m, e}, c);
    }
    Builder& add_keyed(const GradedKey& key, const S& c) {
      if (out_.truncation_ && !detail::within_cutoff(key.magnitude, *out_.truncation_)) {
        out_.dropped_mass_ += ScalarTraits<S>::abs(c);
        return *this;
      }
      auto [it, inserted] = out_.terms_.try_emplace(key, c);
      if (!inserted) it->second += c;
      return *this;
    }
    Builder& add_dropped_mass(double m) {
      out_.dropped_mass_ += m;
      return *this;
    }
    AlgebraElement build() && {
      for (auto it = out_.terms_.begin(); it != out_.terms_.end();) {
        if (ScalarTraits<S>::is_zero(it->second))
          it = out_.terms_.erase(it);
        else
          ++it;
      }
      return std::move(out_);
    }

   private:
    AlgebraElement out_;
  };

  static AlgebraElement unit(BasisPtr basis) {
    Builder b(basis);
    b.add(SemigroupElement::zero(*basis), ScalarTraits<S>::one());
    return std::move(b).build();
  }
  static AlgebraElement delta(BasisPtr basis, const SemigroupElement& e,
                              S c = ScalarTraits<S>::one()) {
    Builder b(std::move(basis));
    b.add(e, c);
    return std::move(b).build();
  }
  /// Power-series style constructor on N_0: coefficients of z^0, z^1, ...
  static AlgebraElement from_sequence(BasisPtr basis, const std::vector<S>& coeffs,
                                      std::optional<double> truncation = std::nullopt) {
    if (basis->mode() != BasisMode::Free || basis->generators().size() != 1)
      throw PreconditionError("from_sequence needs a single-generator FREE basis");
    const int id = basis->generators().front().id;
    Builder b(basis, truncation);
    for (std::size_t n = 0; n < coeffs.size(); ++n)
      b.add(SemigroupElement::generator(id, n), coeffs[n]);
    return std::move(b).build();
  }

  const BasisPtr& basis() const { return basis_; }
  std::optional<double> truncation() const { return truncation_; }
  double dropped_mass() const { return dropped_mass_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  S coeff(const SemigroupElement& e) const {
    auto it = terms_.find(GradedKey{magnitude(*basis_, e), e});
    return it == terms_.end() ? ScalarTraits<S>::zero() : it->second;
  }
  /// a(0)
  S constant_term() const { return coeff(SemigroupElement::zero(*basis_)); }

  /// Same support and coefficients (truncation metadata ignored).
  friend bool operator==(const AlgebraElement& a, const AlgebraElement& b) {
    if (!same_basis(a.basis_, b.basis_) || a.terms_.size() != b.terms_.size()) return false;
    auto i = a.terms_.begin();
    for (auto j = b.terms_.begin(); j != b.terms_.end(); ++i, ++j)
      if (!(i->first.element == j->first.element) || !(i->second == j->second)) return false;
    return true;
  }

 private:
  BasisPtr basis_;
  std::optional<double> truncation_;
  double dropped_mass_ = 0;
  Terms terms_;
};

namespace detail {

inline std::optional<double> min_truncation(std::optional<double> a, std::optional<double> b) {
  if (!a) return b;
  if (!b) return a;
  return std::min(*a, *b);
}

template <Scalar S>
void require_same_basis(const AlgebraElement<S>& a, const AlgebraElement<S>& b) {
  if (!same_basis(a.basis(), b.basis())) throw BasisMismatch();
}

}  // namespace detail

template <Scalar S>
AlgebraElement<S> add(const AlgebraElement<S>& a, const AlgebraElement<S>& b) {
  detail::require_same_basis(a, b);
  typename AlgebraElement<S>::Builder out(a.basis(), detail::min_truncation(a.truncation(), b.truncation()));
  for (const auto& [k, c] : a.terms()) out.add_keyed(k, c);
  for (const auto& [k, c] : b.terms()) out.add_keyed(k, c);
  out.add_dropped_mass(a.dropped_mass() + b.dropped_mass());
  return std::move(out).build();
}

template <Scalar S>
AlgebraElement<S> scale(const AlgebraElement<S>& a, const S& alpha) {
  typename AlgebraElement<S>::Builder out(a.basis(), a.truncation());
  for (const auto& [k, c] : a.terms()) out.add_keyed(k, alpha * c);
  out.add_dropped_mass(a.dropped_mass() * ScalarTraits<S>::abs(alpha));
  return std::move(out).build();
}

template <Scalar S>
AlgebraElement<S> subtract(const AlgebraElement<S>& a, const AlgebraElement<S>& b) {
  return add(a, scale(b, ScalarTraits<S>::zero() - ScalarTraits<S>::one()));
}

/// (a * b)(lambda) = sum over lambda' + lambda'' = lambda of a(lambda') b(lambda'').
/// Terms past the smaller of the two truncations are dropped, and their mass
/// is recorded in dropped_mass().
template <Scalar S>
AlgebraElement<S> convolve(const AlgebraElement<S>& a, const AlgebraElement<S>& b) {
  detail::require_same_basis(a, b);
  const auto trunc = detail::min_truncation(a.truncation(), b.truncation());
  typename AlgebraElement<S>::Builder out(a.basis(), trunc);
  for (const auto& [ka, ca] : a.terms()) {
    for (const auto& [kb, cb] : b.terms()) {
      const Real m = ka.magnitude + kb.magnitude;
      if (trunc && !detail::within_cutoff(m, *trunc)) {
        // b is sorted by magnitude: everything further is dropped too
        double rest = 0;
        for (auto it = b.terms().find(kb); it != b.terms().end(); ++it)
          rest += ScalarTraits<S>::abs(ca) * ScalarTraits<S>::abs(it->second);
        out.add_dropped_mass(rest);
        break;
      }
      SemigroupElement e = unchecked_add(ka.element, kb.element);
      out.add_keyed(GradedKey{magnitude(*a.basis(), e), std::move(e)}, ca * cb);
    }
  }
  return std::move(out).build();
}

/// ||a||_w = sum |a(lambda)| w(lambda).
template <Scalar S>
double weighted_norm(const AlgebraElement<S>& a, const WeightFn& w) {
  double s = 0;
  for (const auto& [k, c] : a.terms()) s += ScalarTraits<S>::abs(c) * w(static_cast<double>(k.magnitude));
  return s;
}

// ---------------------------------------------------------------------------
// Inversion

struct NeumannCertificate {
  double q = 0;            // ||a - a(0) eps||_w / |a(0)|
  int terms = 0;           // J: powers 0..J were summed
  double tail_bound = 0;   // q^(J+1) / ((1 - q) |a(0)|)
};

template <Scalar S>
struct NeumannResult {
  AlgebraElement<S> inverse;
  NeumannCertificate certificate;
};

/// a^{-1} = a(0)^{-1} sum_{j <= J} (eps - a / a(0))^{*j}, with J the first
/// index whose geometric tail bound drops below tol.
template <Scalar S>
NeumannResult<S> neumann_invert(const AlgebraElement<S>& a, const WeightFn& w, double tol,
                                int max_terms, std::optional<double> truncation = std::nullopt) {
  const S a0 = a.constant_term();
  if (ScalarTraits<S>::is_zero(a0)) throw PreconditionError("a(0) = 0: element is singular");
  const double abs_a0 = ScalarTraits<S>::abs(a0);
  const auto unit = AlgebraElement<S>::unit(a.basis());
  const auto rest = subtract(a, scale(unit, a0));
  const double q = weighted_norm(rest, w) / abs_a0;
  if (!(q < 1.0)) throw PreconditionError("neumann inapplicable: q = " + std::to_string(q) + " >= 1");

  NeumannCertificate cert;
  cert.q = q;
  int J = 0;
  auto tail = [&](int j) { return std::pow(q, j + 1) / ((1.0 - q) * abs_a0); };
  if (q > 0) {
    while (!(tail(J) < tol)) {
      if (++J > max_terms) throw CapExceeded("neumann_invert: max_terms exceeded");
    }
  }
  cert.terms = J;
  cert.tail_bound = q > 0 ? tail(J) : 0.0;

  const S inv_a0 = ScalarTraits<S>::one() / a0;
  const auto trunc = truncation ? truncation : a.truncation();
  // r = eps - a / a(0)
  typename AlgebraElement<S>::Builder rb(a.basis(), trunc);
  for (const auto& [k, c] : rest.terms()) rb.add_keyed(k, ScalarTraits<S>::zero() - c * inv_a0);
  const auto r = std::move(rb).build();

  typename AlgebraElement<S>::Builder sum(a.basis(), trunc);
  auto power = AlgebraElement<S>::unit(a.basis());
  for (int j = 0; j <= J; ++j) {
    for (const auto& [k, c] : power.terms()) sum.add_keyed(k, c * inv_a0);
    if (j < J) power = convolve(power, r);
  }
  sum.add_dropped_mass(power.dropped_mass());
  return {std::move(sum).build(), cert};
}

/// The unique b supported on |lambda|_1 <= T with (a * b)(lambda) = eps(lambda)
/// there, computed in increasing grading order:
///   b(0) = 1 / a(0),  b(lambda) = -(1/a(0)) sum_{lambda'+lambda''=lambda, lambda'' != lambda} a(lambda') b(lambda'').
/// Only elements of the monoid generated by supp(a) are ever visited.
template <Scalar S>
AlgebraElement<S> graded_invert(const AlgebraElement<S>& a, double T,
                                std::size_t enumeration_cap = 2'000'000) {
  const S a0 = a.constant_term();
  if (ScalarTraits<S>::is_zero(a0)) throw PreconditionError("a(0) = 0: element is singular");
  if (!(T >= 0)) throw PreconditionError("graded_invert needs T >= 0");
  const S inv_a0 = ScalarTraits<S>::one() / a0;
  const auto& basis = *a.basis();

  // nonzero part of the support, already sorted by magnitude
  std::vector<std::pair<GradedKey, S>> tail_terms;
  for (const auto& [k, c] : a.terms())
    if (!k.element.is_zero()) tail_terms.emplace_back(k, c);

  std::map<GradedKey, S> pending;  // accumulated sums for not-yet-finalized elements
  pending.emplace(GradedKey{0, SemigroupElement::zero(basis)}, ScalarTraits<S>::zero());
  typename AlgebraElement<S>::Builder out(a.basis(), T);
  std::size_t visited = 0;

  while (!pending.empty()) {
    auto node = pending.extract(pending.begin());
    const GradedKey& key = node.key();
    if (++visited > enumeration_cap) throw CapExceeded("graded_invert: enumeration cap exceeded");
    S value = key.element.is_zero() ? inv_a0 : (ScalarTraits<S>::zero() - node.mapped() * inv_a0);
    if (ScalarTraits<S>::is_zero(value)) continue;
    for (const auto& [k, c] : tail_terms) {
      const Real m = key.magnitude + k.magnitude;
      if (!detail::within_cutoff(m, T)) break;
      SemigroupElement e = unchecked_add(key.element, k.element);
      GradedKey target{magnitude(basis, e), std::move(e)};
      auto [it, inserted] = pending.try_emplace(std::move(target), c * value);
      if (!inserted) it->second += c * value;
    }
    out.add_keyed(key, value);
  }
  return std::move(out).build();
}

// ---------------------------------------------------------------------------
// Evaluation

/// exp(-lambda . s), the value of the character psi_s at lambda.
inline Complex exp_pairing(const SemigroupBasis& basis, const SemigroupElement& e,
                           const std::vector<Complex>& s) {
  if (s.size() != basis.dim()) throw DimensionMismatch("s has the wrong number of coordinates");
  const auto v = embedded_value(basis, e);
  Complex acc(0.0, 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) acc += static_cast<double>(v[i]) * s[i];
  return std::exp(-acc);
}

struct TailBound {
  double cutoff = 0;
  double bound = 0;
  WeightFn weight = WeightFn::one();
};

struct SeriesValue {
  Complex value;
  std::optional<TailBound> tail;  // omitted when some Re s < 0
};

/// sum a(lambda) exp(-lambda . s) over the support, together with the
/// domination bound (1/w(l)) sum_{|lambda|_1 >= l} |a(lambda)| w(lambda) for
/// the terms at or beyond the cutoff l.
template <Scalar S>
SeriesValue evaluate_series(const AlgebraElement<S>& a, const std::vector<Complex>& s,
                            const WeightFn& w = WeightFn::one(),
                            double cutoff = std::numeric_limits<double>::infinity()) {
  SeriesValue out{Complex(0.0, 0.0), std::nullopt};
  for (const auto& [k, c] : a.terms())
    out.value += ScalarTraits<S>::to_complex(c) * exp_pairing(*a.basis(), k.element, s);
  const bool closed_half_space =
      std::all_of(s.begin(), s.end(), [](const Complex& z) { return z.real() >= 0; });
  if (closed_half_space) {
    TailBound t;
    t.cutoff = cutoff;
    t.weight = w;
    if (std::isfinite(cutoff)) {
      double mass = 0;
      for (const auto& [k, c] : a.terms())
        if (static_cast<double>(k.magnitude) >= cutoff)
          mass += ScalarTraits<S>::abs(c) * w(static_cast<double>(k.magnitude));
      t.bound = mass / w(cutoff);
    }
    out.tail = t;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Invertibility evidence

struct WitnessGrid {
  double sigma_max = 4.0;
  double t_max = 20.0;
  int sigma_steps = 41;
  int t_steps = 401;
  int disk_radial = 200;    // radii i / disk_radial, i = 0..disk_radial
  int disk_angular = 2048;  // angles 2 pi j / disk_angular
};

struct DiskCertificate {
  double min_on_grid = 0;
  Complex argmin_z;
  double lipschitz = 0;  // sum n |a(n)|
  double mesh = 0;       // covering radius of the polar grid (path length)
  double lower_bound = 0;
  bool certified = false;  // lower_bound > 0: invertible on the closed disk
};

struct WitnessReport {
  double min_modulus = 0;
  std::vector<Complex> argmin_s;
  std::optional<DiskCertificate> disk;  // only for N_0
};

namespace detail {

inline bool is_natural_numbers(const SemigroupBasis& b) {
  return b.mode() == BasisMode::Free && b.dim() == 1 && b.generators().size() == 1 &&
         b.generators().front().value.front() == 1;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  if (n <= 1) return {lo};
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
  return v;
}

}  // namespace detail

/// Lower bound for |p(z)| on the closed unit disk for p(z) = sum c_n z^n
/// (sparse, sorted by n): the minimum on a polar grid minus L * mesh with
/// L = sum n |c_n|.
inline DiskCertificate disk_certificate(const std::vector<std::pair<std::uint64_t, Complex>>& coeffs,
                                        int radial, int angular) {
  DiskCertificate d;
  for (const auto& [n, c] : coeffs) d.lipschitz += static_cast<double>(n) * std::abs(c);
  auto poly = [&](Complex z) {
    // Horner over the sparse support, highest power first
    Complex acc(0.0, 0.0);
    std::uint64_t prev = coeffs.empty() ? 0 : coeffs.back().first;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
      for (std::uint64_t i = it->first; i < prev; ++i) acc *= z;
      acc += it->second;
      prev = it->first;
    }
    for (std::uint64_t i = 0; i < prev; ++i) acc *= z;
    return acc;
  };
  d.min_on_grid = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= radial; ++i) {
    const double rad = static_cast<double>(i) / radial;
    const int nang = i == 0 ? 1 : angular;
    for (int j = 0; j < nang; ++j) {
      const Complex z = std::polar(rad, 2.0 * std::numbers::pi * j / angular);
      const double m = std::abs(poly(z));
      if (m < d.min_on_grid) {
        d.min_on_grid = m;
        d.argmin_z = z;
      }
    }
  }
  d.mesh = 0.5 / radial + std::numbers::pi / angular;
  d.lower_bound = d.min_on_grid - d.lipschitz * d.mesh;
  d.certified = d.lower_bound > 0;
  return d;
}

/// Samples |a~(s)| on a rectangle of the closed half-space. On N_0 it also
/// certifies a lower bound for |a~(z)| on the closed unit disk,
/// |a~(z)| >= min_grid |a~| - L * mesh with L = sum n |a(n)|.
template <Scalar S>
WitnessReport invertibility_witness(const AlgebraElement<S>& a, const WitnessGrid& grid = {}) {
  const auto& basis = *a.basis();
  WitnessReport rep;
  rep.min_modulus = std::numeric_limits<double>::infinity();
  const auto sigmas = detail::linspace(0.0, grid.sigma_max, grid.sigma_steps);
  const auto ts = detail::linspace(-grid.t_max, grid.t_max, grid.t_steps);
  std::vector<Complex> points;
  for (double sg : sigmas)
    for (double t : ts) points.emplace_back(sg, t);

  const std::size_t r = basis.dim();
  auto consider = [&](const std::vector<Complex>& s) {
    const double m = std::abs(evaluate_series(a, s).value);
    if (m < rep.min_modulus) {
      rep.min_modulus = m;
      rep.argmin_s = s;
    }
  };
  if (r == 1) {
    for (const auto& p : points) consider({p});
  } else {
    // the diagonal plus coordinate-wise perturbations of it
    for (const auto& p : points) consider(std::vector<Complex>(r, p));
    for (std::size_t i = 0; i < r; ++i)
      for (const auto& p : points) {
        std::vector<Complex> s(r, Complex(grid.sigma_max, 0.0));
        s[i] = p;
        consider(s);
      }
  }

  if (detail::is_natural_numbers(basis)) {
    const int id = basis.generators().front().id;
    std::vector<std::pair<std::uint64_t, Complex>> coeffs;
    for (const auto& [k, c] : a.terms())
      coeffs.emplace_back(k.element.exponent(id), ScalarTraits<S>::to_complex(c));
    const DiskCertificate d = disk_certificate(coeffs, grid.disk_radial, grid.disk_angular);
    if (d.min_on_grid < rep.min_modulus) {
      rep.min_modulus = d.min_on_grid;
      if (std::abs(d.argmin_z) > 0) rep.argmin_s = {-std::log(d.argmin_z)};
      else rep.argmin_s = {Complex(std::numeric_limits<double>::infinity(), 0.0)};
    }
    rep.disk = d;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Composition with power series

/// f(z) = sum_k f_k (z - center)^k with a known radius and a tail bound
/// sum_{k > K} |f_k| q^k valid for q < radius.
class PowerSeries {
 public:
  enum class Kind { Identity, Polynomial, Exp, Inverse, Log };

  static PowerSeries identity() { return PowerSeries(Kind::Identity, {}); }
  static PowerSeries polynomial(Complex center, std::vector<Complex> coeffs) {
    PowerSeries p(Kind::Polynomial, center);
    p.coeffs_ = std::move(coeffs);
    return p;
  }
  static PowerSeries exp(Complex center = {}) { return PowerSeries(Kind::Exp, center); }
  /// 1/z expanded about center != 0.
  static PowerSeries inverse(Complex center) {
    if (center == Complex(0.0, 0.0)) throw PreconditionError("1/z cannot be expanded about 0");
    return PowerSeries(Kind::Inverse, center);
  }
  /// Principal log expanded about center != 0.
  static PowerSeries log(Complex center) {
    if (center == Complex(0.0, 0.0)) throw PreconditionError("log cannot be expanded about 0");
    return PowerSeries(Kind::Log, center);
  }

  Kind kind() const { return kind_; }
  Complex center() const { return center_; }
  const std::vector<Complex>& polynomial_coefficients() const { return coeffs_; }

  double radius() const {
    switch (kind_) {
      case Kind::Identity:
      case Kind::Polynomial:
      case Kind::Exp:
        return std::numeric_limits<double>::infinity();
      case Kind::Inverse:
      case Kind::Log:
        return std::abs(center_);
    }
    return 0;
  }

  Complex coefficient(int k) const {
    switch (kind_) {
      case Kind::Identity:
        return k == 0 ? center_ : (k == 1 ? Complex(1.0) : Complex(0.0));
      case Kind::Polynomial:
        return k < static_cast<int>(coeffs_.size()) ? coeffs_[k] : Complex(0.0);
      case Kind::Exp:
        return std::exp(center_) / std::tgamma(k + 1.0);
      case Kind::Inverse:
        return (k % 2 == 0 ? 1.0 : -1.0) / std::pow(center_, k + 1);
      case Kind::Log:
        if (k == 0) return std::log(center_);
        return (k % 2 == 1 ? 1.0 : -1.0) / (static_cast<double>(k) * std::pow(center_, k));
    }
    return 0;
  }

  /// Exact coefficient when it is rational (needed by the exact backend).
  std::optional<ExactComplex> exact_coefficient(int k) const {
    auto rational_center = [&]() -> std::optional<ExactComplex> {
      return ExactComplex{Rational(center_.real()), Rational(center_.imag())};
    };
    switch (kind_) {
      case Kind::Identity:
        if (k == 0) return rational_center();
        return ExactComplex{Rational(k == 1 ? 1 : 0)};
      case Kind::Polynomial: {
        const Complex c = coefficient(k);
        return ExactComplex{Rational(c.real()), Rational(c.imag())};
      }
      case Kind::Exp: {
        if (center_ != Complex(0.0, 0.0)) return std::nullopt;
        Integer f = 1;
        for (int i = 2; i <= k; ++i) f *= i;
        return ExactComplex{Rational(Integer(1), f)};
      }
      case Kind::Inverse: {
        const ExactComplex c = *rational_center();
        ExactComplex p = c;
        for (int i = 0; i < k; ++i) p = p * c;
        return ExactComplex{Rational(k % 2 == 0 ? 1 : -1)} / p;
      }
      case Kind::Log: {
        if (k == 0) {
          if (center_ == Complex(1.0, 0.0)) return ExactComplex{};
          return std::nullopt;
        }
        const ExactComplex c = *rational_center();
        ExactComplex p = c;
        for (int i = 1; i < k; ++i) p = p * c;
        return ExactComplex{Rational(k % 2 == 1 ? 1 : -1, k)} / p;
      }
    }
    return std::nullopt;
  }

  /// Upper bound for sum_{k > K} |f_k| q^k.
  double tail_bound(double q, int K) const {
    switch (kind_) {
      case Kind::Identity:
        return K >= 1 ? 0.0 : q;
      case Kind::Polynomial: {
        double s = 0;
        for (int k = K + 1; k < static_cast<int>(coeffs_.size()); ++k) s += std::abs(coeffs_[k]) * std::pow(q, k);
        return s;
      }
      case Kind::Exp: {
        if (q == 0) return 0;
        const double first = std::abs(std::exp(center_)) * std::pow(q, K + 1) / std::tgamma(K + 2.0);
        const double ratio = q / (K + 2.0);
        return ratio < 1 ? first / (1.0 - ratio) : std::numeric_limits<double>::infinity();
      }
      case Kind::Inverse: {
        const double r = std::abs(center_);
        const double x = q / r;
        return x < 1 ? std::pow(x, K + 1) / (r * (1.0 - x)) : std::numeric_limits<double>::infinity();
      }
      case Kind::Log: {
        const double x = q / std::abs(center_);
        return x < 1 ? std::pow(x, K + 1) / ((K + 1.0) * (1.0 - x)) : std::numeric_limits<double>::infinity();
      }
    }
    return std::numeric_limits<double>::infinity();
  }

  Complex operator()(Complex z) const {
    switch (kind_) {
      case Kind::Identity:
        return z;
      case Kind::Polynomial: {
        Complex acc(0.0);
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * (z - center_) + *it;
        return acc;
      }
      case Kind::Exp:
        return std::exp(z);
      case Kind::Inverse:
        return 1.0 / z;
      case Kind::Log:
        return std::log(z);
    }
    return 0;
  }

 private:
  PowerSeries(Kind k, Complex center) : kind_(k), center_(center) {}

  Kind kind_;
  Complex center_;
  std::vector<Complex> coeffs_;
};

struct CompositionCertificate {
  double q = 0;           // ||a - c0 eps||_w
  double radius = 0;
  int terms = 0;          // K
  double tail_bound = 0;
};

template <Scalar S>
struct CompositionResult {
  AlgebraElement<S> value;
  CompositionCertificate certificate;
};

/// c = sum_{k <= K} f_k (a - c0 eps)^{*k}, requiring the norm-ball condition
/// ||a - c0 eps||_w < R. K is the first index whose tail bound is < tol.
template <Scalar S>
CompositionResult<S> compose_series(const PowerSeries& f, const AlgebraElement<S>& a,
                                    const WeightFn& w, double tol, int max_terms = 10'000,
                                    std::optional<double> truncation = std::nullopt) {
  const auto unit = AlgebraElement<S>::unit(a.basis());
  S c0;
  if constexpr (ScalarTraits<S>::exact) {
    c0 = ExactComplex{Rational(f.center().real()), Rational(f.center().imag())};
  } else {
    c0 = f.center();
  }
  const auto trunc = truncation ? truncation : a.truncation();
  const auto shifted = subtract(a, scale(unit, c0));
  CompositionCertificate cert;
  cert.q = weighted_norm(shifted, w);
  cert.radius = f.radius();
  if (!(cert.q < cert.radius))
    throw PreconditionError("compose_series: norm condition fails, ||a - c0 eps||_w = " +
                            std::to_string(cert.q) + " >= radius " + std::to_string(cert.radius) +
                            " (gap " + std::to_string(cert.q - cert.radius) + ")");
  int K = 0;
  while (!(f.tail_bound(cert.q, K) < tol)) {
    if (++K > max_terms) throw CapExceeded("compose_series: max_terms exceeded");
  }
  cert.terms = K;
  cert.tail_bound = f.tail_bound(cert.q, K);

  auto coefficient = [&](int k) -> S {
    if constexpr (ScalarTraits<S>::exact) {
      auto c = f.exact_coefficient(k);
      if (!c) throw PreconditionError("power series coefficient is not rational; use the float backend");
      return *c;
    } else {
      return f.coefficient(k);
    }
  };

  AlgebraElement<S> d(a.basis(), trunc);
  {
    typename AlgebraElement<S>::Builder b(a.basis(), trunc);
    for (const auto& [k, c] : shifted.terms()) b.add_keyed(k, c);
    d = std::move(b).build();
  }
  typename AlgebraElement<S>::Builder sum(a.basis(), trunc);
  auto power = unit;
  for (int k = 0; k <= K; ++k) {
    const S fk = coefficient(k);
    if (!ScalarTraits<S>::is_zero(fk))
      for (const auto& [key, c] : power.terms()) sum.add_keyed(key, fk * c);
    if (k < K) power = convolve(power, d);
  }
  return {std::move(sum).build(), cert};
}

}  // namespace forge

#endif  // FORGE_ALGEBRA_HPP
