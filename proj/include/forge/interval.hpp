#ifndef FORGE_INTERVAL_HPP
#define FORGE_INTERVAL_HPP

// Reals of the form c_0 + sum_s c_s r_s with rational c and a fixed list of
// transcendental atoms r_s = -ln m_s (m_s a given double in (0, 1]).
// Atoms are enclosed by MPFR with directed rounding; sign questions are
// settled by refining the enclosures until they are decided or a precision
// cap is hit.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <mpfr.h>

#include "forge/error.hpp"
#include "forge/rational.hpp"

namespace forge {

struct Interval {
  Rational lo = 0;
  Rational hi = 0;
};

namespace detail {

/// Exact rational value of an MPFR number.
inline Rational mpfr_to_rational(const mpfr_t x) {
  if (mpfr_zero_p(x)) return Rational(0);
  mpz_t m;
  mpz_init(m);
  const mpfr_exp_t e = mpfr_get_z_2exp(m, x);
  Integer mant;
  mpz_set(mant.backend().data(), m);
  mpz_clear(m);
  if (e >= 0) return Rational(mant * boost::multiprecision::pow(Integer(2), static_cast<unsigned>(e)));
  return Rational(mant, boost::multiprecision::pow(Integer(2), static_cast<unsigned>(-e)));
}

}  // namespace detail

enum class Sign { Negative, Zero, Positive, Ambiguous };

class AtomContext {
 public:
  static constexpr unsigned kStartPrecision = 64;

  /// `moduli` are the m_s; `precision_cap` is the largest MPFR precision
  /// (in bits) tried before a sign question is declared ambiguous.
  explicit AtomContext(std::vector<double> moduli, unsigned precision_cap = 512)
      : moduli_(std::move(moduli)), cap_(std::max(precision_cap, kStartPrecision)) {
    for (double m : moduli_)
      if (!(m > 0 && m <= 1)) throw PreconditionError("atom modulus must lie in (0, 1]");
  }

  std::size_t size() const { return moduli_.size(); }
  unsigned precision_cap() const { return cap_; }
  double modulus(std::size_t s) const { return moduli_.at(s); }

  /// Rigorous enclosure of -ln m_s at the given MPFR precision.
  Interval enclose(std::size_t s, unsigned prec) const {
    const double m = moduli_.at(s);
    if (m == 1.0) return {Rational(0), Rational(0)};
    mpfr_t x, lo, hi;
    mpfr_inits2(static_cast<mpfr_prec_t>(std::max(prec, 64u)), x, lo, hi, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_d(x, m, MPFR_RNDN);  // exact: prec >= 53
    mpfr_log(lo, x, MPFR_RNDD);
    mpfr_log(hi, x, MPFR_RNDU);
    Interval out{-detail::mpfr_to_rational(hi), -detail::mpfr_to_rational(lo)};
    mpfr_clears(x, lo, hi, static_cast<mpfr_ptr>(nullptr));
    return out;
  }

 private:
  std::vector<double> moduli_;
  unsigned cap_;
};

using AtomContextPtr = std::shared_ptr<const AtomContext>;

class LinearReal {
 public:
  LinearReal() = default;
  LinearReal(Rational c) : constant_(std::move(c)) {}  // NOLINT(google-explicit-constructor)

  static LinearReal atom(std::size_t s, std::size_t natoms) {
    LinearReal r;
    r.coeffs_ = zero_vector(natoms);
    r.coeffs_.at(s) = 1;
    return r;
  }

  const Rational& constant() const { return constant_; }
  /// Coefficient vector; may be shorter than the context (missing = 0).
  const RationalVector& coefficients() const { return coeffs_; }

  bool is_rational() const { return forge::is_zero(coeffs_); }
  /// Structurally zero: all coefficients and the constant vanish.
  bool structurally_zero() const { return is_rational() && constant_ == 0; }

  friend LinearReal operator+(const LinearReal& a, const LinearReal& b) {
    LinearReal r;
    r.constant_ = a.constant_ + b.constant_;
    r.coeffs_ = zero_vector(std::max(a.coeffs_.size(), b.coeffs_.size()));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) r.coeffs_[i] += a.coeffs_[i];
    for (std::size_t i = 0; i < b.coeffs_.size(); ++i) r.coeffs_[i] += b.coeffs_[i];
    return r;
  }
  friend LinearReal operator*(const Rational& k, const LinearReal& a) {
    LinearReal r;
    r.constant_ = k * a.constant_;
    r.coeffs_ = k * a.coeffs_;
    return r;
  }
  friend LinearReal operator-(const LinearReal& a, const LinearReal& b) {
    return a + Rational(-1) * b;
  }
  friend LinearReal operator/(const LinearReal& a, const Rational& k) {
    if (k == 0) throw PreconditionError("division of a real by zero");
    return Rational(1 / k) * a;
  }
  friend bool operator==(const LinearReal& a, const LinearReal& b) {
    return (a - b).structurally_zero();
  }

  Interval enclose(const AtomContext& ctx, unsigned prec) const {
    Interval out{constant_, constant_};
    for (std::size_t s = 0; s < coeffs_.size(); ++s) {
      if (coeffs_[s] == 0) continue;
      const Interval a = ctx.enclose(s, prec);
      if (coeffs_[s] > 0) {
        out.lo += coeffs_[s] * a.lo;
        out.hi += coeffs_[s] * a.hi;
      } else {
        out.lo += coeffs_[s] * a.hi;
        out.hi += coeffs_[s] * a.lo;
      }
    }
    return out;
  }

  double to_double(const AtomContext& ctx) const {
    if (is_rational()) return forge::to_double(constant_);
    const Interval i = enclose(ctx, 128);
    return forge::to_double((i.lo + i.hi) / 2);
  }

 private:
  RationalVector coeffs_;
  Rational constant_ = 0;
};

/// Sign of x, refined from 64 bits by doubling up to the cap.
inline Sign sign_of(const LinearReal& x, const AtomContext& ctx) {
  if (x.is_rational()) {
    const int s = x.constant().sign();
    return s < 0 ? Sign::Negative : (s == 0 ? Sign::Zero : Sign::Positive);
  }
  for (unsigned prec = AtomContext::kStartPrecision;; prec *= 2) {
    const Interval i = x.enclose(ctx, std::min(prec, ctx.precision_cap()));
    if (i.lo > 0) return Sign::Positive;
    if (i.hi < 0) return Sign::Negative;
    if (prec >= ctx.precision_cap()) return Sign::Ambiguous;
  }
}

using RealVector = std::vector<LinearReal>;

inline RealVector to_real_vector(const RationalVector& v) {
  return RealVector(v.begin(), v.end());
}

/// rho(x) = sum rho_i x_i for a rational functional rho.
inline LinearReal apply_functional(const RationalVector& rho, const RealVector& x) {
  if (rho.size() != x.size()) throw DimensionMismatch("functional and point dimensions differ");
  LinearReal acc;
  for (std::size_t i = 0; i < rho.size(); ++i)
    if (rho[i] != 0) acc = acc + rho[i] * x[i];
  return acc;
}

inline std::vector<double> to_doubles(const RealVector& v, const AtomContext& ctx) {
  std::vector<double> out;
  for (const auto& x : v) out.push_back(x.to_double(ctx));
  return out;
}

}  // namespace forge

#endif  // FORGE_INTERVAL_HPP
