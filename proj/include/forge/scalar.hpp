#ifndef FORGE_SCALAR_HPP
#define FORGE_SCALAR_HPP

// Coefficient backends: exact rational complex numbers and double complex.

#include <cmath>
#include <complex>
#include <concepts>
#include <type_traits>
#include <utility>
#include <string>

#include "forge/rational.hpp"

namespace forge {

using Complex = std::complex<double>;

/// Gaussian rational re + i*im.
struct ExactComplex {
  Rational re = 0;
  Rational im = 0;

  ExactComplex() = default;
  ExactComplex(Rational r) : re(std::move(r)) {}  // NOLINT(google-explicit-constructor)
  ExactComplex(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  ExactComplex(long long r) : re(r) {}  // NOLINT(google-explicit-constructor)

  friend ExactComplex operator+(const ExactComplex& a, const ExactComplex& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend ExactComplex operator-(const ExactComplex& a, const ExactComplex& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend ExactComplex operator-(const ExactComplex& a) { return {-a.re, -a.im}; }
  friend ExactComplex operator*(const ExactComplex& a, const ExactComplex& b) {
    if (a.im == 0 && b.im == 0) return {a.re * b.re, Rational(0)};
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend ExactComplex operator/(const ExactComplex& a, const ExactComplex& b) {
    if (b.im == 0) return {a.re / b.re, a.im / b.re};
    const Rational n = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
  }
  ExactComplex& operator+=(const ExactComplex& b) {
    re += b.re;
    im += b.im;
    return *this;
  }
  ExactComplex& operator-=(const ExactComplex& b) {
    re -= b.re;
    im -= b.im;
    return *this;
  }
  friend bool operator==(const ExactComplex& a, const ExactComplex& b) {
    return a.re == b.re && a.im == b.im;
  }
};

template <typename S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static bool is_zero(const Rational& q) { return q == 0; }
  static double abs(const Rational& q) { return std::abs(to_double(q)); }
  static Complex to_complex(const Rational& q) { return {to_double(q), 0.0}; }
  static Rational from_rational(const Rational& q) { return q; }
};

template <>
struct ScalarTraits<Complex> {
  static constexpr bool exact = false;
  static Complex zero() { return {0.0, 0.0}; }
  static Complex one() { return {1.0, 0.0}; }
  static bool is_zero(const Complex& z) { return z == Complex(0.0, 0.0); }
  static double abs(const Complex& z) { return std::abs(z); }
  static Complex to_complex(const Complex& z) { return z; }
  static Complex from_rational(const Rational& q) { return {to_double(q), 0.0}; }
};

template <>
struct ScalarTraits<ExactComplex> {
  static constexpr bool exact = true;
  static ExactComplex zero() { return {}; }
  static ExactComplex one() { return {Rational(1)}; }
  static bool is_zero(const ExactComplex& z) { return z.re == 0 && z.im == 0; }
  static double abs(const ExactComplex& z) { return std::hypot(to_double(z.re), to_double(z.im)); }
  static Complex to_complex(const ExactComplex& z) { return {to_double(z.re), to_double(z.im)}; }
  static ExactComplex from_rational(const Rational& q) { return {q}; }
};

template <typename S>
concept Scalar = requires(const S& a, const S& b) {
  { a + b } -> std::convertible_to<S>;
  { a * b } -> std::convertible_to<S>;
  { a / b } -> std::convertible_to<S>;
  ScalarTraits<S>::zero();
};

/// Converts between backends (exact -> float is lossy; float -> exact is the
/// exact binary value of the doubles).
template <typename To, typename From>
To scalar_cast(const From& x) {
  if constexpr (std::is_same_v<To, From>) {
    return x;
  } else if constexpr (std::is_same_v<To, Complex>) {
    return ScalarTraits<From>::to_complex(x);
  } else if constexpr (std::is_same_v<To, ExactComplex> && std::is_same_v<From, Rational>) {
    return ExactComplex{x};
  } else {
    const Complex z = ScalarTraits<From>::to_complex(x);
    return ExactComplex{Rational(z.real()), Rational(z.imag())};
  }
}

}  // namespace forge

#endif  // FORGE_SCALAR_HPP
