#ifndef FORGE_RATIONAL_HPP
#define FORGE_RATIONAL_HPP

// Exact rational scalars, vectors and small dense matrices.
//
// Everything in here is exact; nothing ever rounds. Matrices are tiny in
// practice (dimension <= ~12), so plain row-major storage and Gaussian
// elimination are all we need.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

#include "forge/error.hpp"

namespace forge {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

/// Parses "num/den", "num" or a decimal literal such as "0.25".
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  if (s.empty()) throw InputError("empty rational literal");
  try {
    const auto dot = s.find('.');
    if (dot != std::string::npos && s.find('/') == std::string::npos) {
      // exact decimal
      std::string digits = s.substr(0, dot) + s.substr(dot + 1);
      const std::size_t frac = s.size() - dot - 1;
      Integer num(digits);
      Integer den = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(frac));
      return Rational(num, den);
    }
    if (s.front() == '+') s.erase(s.begin());
    Rational r(s);
    return r;
  } catch (const std::exception&) {
    throw InputError("malformed rational literal '" + std::string(text) + "'");
  }
}

/// Always "num/den", also for integers ("3/1").
inline std::string format_rational(const Rational& q) {
  return boost::multiprecision::numerator(q).str() + "/" +
         boost::multiprecision::denominator(q).str();
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline Integer num(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Integer den(const Rational& q) { return boost::multiprecision::denominator(q); }

inline int sign(const Rational& q) { return q.sign(); }

inline Integer ceil_rational(const Rational& q) {
  Integer n = num(q), d = den(q);
  Integer quot = n / d;  // truncates toward zero
  if (quot * d != n && q.sign() > 0) quot += 1;
  return quot;
}

inline Integer floor_rational(const Rational& q) {
  Integer n = num(q), d = den(q);
  Integer quot = n / d;
  if (quot * d != n && q.sign() < 0) quot -= 1;
  return quot;
}

inline Integer lcm_int(const Integer& a, const Integer& b) {
  if (a == 0 || b == 0) return Integer(0);
  return boost::multiprecision::lcm(a, b);
}

// ---------------------------------------------------------------------------
// Vectors

using RationalVector = std::vector<Rational>;

inline RationalVector zero_vector(std::size_t dim) { return RationalVector(dim, Rational(0)); }

inline RationalVector unit_vector(std::size_t dim, std::size_t i) {
  RationalVector v = zero_vector(dim);
  v.at(i) = 1;
  return v;
}

inline void require_same_dim(const RationalVector& a, const RationalVector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("vector dimensions differ");
}

inline Rational dot(const RationalVector& a, const RationalVector& b) {
  require_same_dim(a, b);
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline RationalVector operator+(const RationalVector& a, const RationalVector& b) {
  require_same_dim(a, b);
  RationalVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline RationalVector operator-(const RationalVector& a, const RationalVector& b) {
  require_same_dim(a, b);
  RationalVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline RationalVector operator*(const Rational& s, const RationalVector& a) {
  RationalVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

inline bool is_zero(const RationalVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& q) { return q == 0; });
}

/// Positive rescaling to a primitive integer vector (gcd of entries 1).
/// Two vectors span the same ray iff their primitive forms are equal.
inline RationalVector primitive(const RationalVector& v) {
  if (is_zero(v)) return v;
  Integer l = 1;
  for (const auto& q : v) l = lcm_int(l, den(q));
  Integer g = 0;
  for (const auto& q : v) {
    Integer n = num(q) * (l / den(q));
    g = boost::multiprecision::gcd(g, boost::multiprecision::abs(n));
  }
  RationalVector r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = Rational(num(v[i]) * (l / den(v[i])), g);
  return r;
}

inline std::vector<std::string> format_vector(const RationalVector& v) {
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& q : v) out.push_back(format_rational(q));
  return out;
}

inline std::vector<double> to_doubles(const RationalVector& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& q : v) out.push_back(to_double(q));
  return out;
}

// ---------------------------------------------------------------------------
// Matrices (row-major list of rows)

using RationalMatrix = std::vector<RationalVector>;

struct RowEchelon {
  RationalMatrix rows;               // reduced row echelon form
  std::vector<std::size_t> pivots;   // pivot column of each nonzero row
  std::size_t rank() const { return pivots.size(); }
};

/// Reduced row echelon form over Q. `cols` is needed when `m` is empty.
inline RowEchelon rref(RationalMatrix m, std::size_t cols) {
  RowEchelon out;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
    std::size_t p = r;
    while (p < m.size() && m[p][c] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[r]);
    const Rational inv = 1 / m[r][c];
    for (auto& x : m[r]) x *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || m[i][c] == 0) continue;
      const Rational f = m[i][c];
      for (std::size_t j = 0; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    out.pivots.push_back(c);
    ++r;
  }
  m.resize(r);
  out.rows = std::move(m);
  return out;
}

inline std::size_t rank_of(const std::vector<RationalVector>& vectors) {
  if (vectors.empty()) return 0;
  return rref(vectors, vectors.front().size()).rank();
}

/// Exact Q-linear independence test.
inline bool linearly_independent(const std::vector<RationalVector>& vectors) {
  return rank_of(vectors) == vectors.size();
}

/// Basis of {x : m x = 0}.
inline std::vector<RationalVector> nullspace(const RationalMatrix& m, std::size_t cols) {
  const RowEchelon e = rref(m, cols);
  std::vector<bool> is_pivot(cols, false);
  for (auto c : e.pivots) is_pivot[c] = true;
  std::vector<RationalVector> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    RationalVector v = zero_vector(cols);
    v[free] = 1;
    for (std::size_t i = 0; i < e.pivots.size(); ++i) v[e.pivots[i]] = -e.rows[i][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

inline RationalMatrix transpose(const RationalMatrix& m, std::size_t cols) {
  RationalMatrix t(cols, RationalVector(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) t[j][i] = m[i][j];
  return t;
}

/// Solves sum_i coeff_i * columns[i] = target. Returns nullopt when the
/// target is outside the span; when the columns are dependent the solution
/// with zero free coefficients is returned.
inline std::optional<RationalVector> solve_combination(const std::vector<RationalVector>& columns,
                                                       const RationalVector& target) {
  const std::size_t dim = target.size();
  const std::size_t k = columns.size();
  RationalMatrix aug(dim, RationalVector(k + 1));
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (columns[j].size() != dim) throw DimensionMismatch("column dimension mismatch");
      aug[i][j] = columns[j][i];
    }
    aug[i][k] = target[i];
  }
  const RowEchelon e = rref(aug, k + 1);
  RationalVector x = zero_vector(k);
  for (std::size_t i = 0; i < e.pivots.size(); ++i) {
    if (e.pivots[i] == k) return std::nullopt;  // inconsistent
    x[e.pivots[i]] = e.rows[i][k];
  }
  return x;
}

/// Inverse of a square matrix; throws on singular input.
inline RationalMatrix inverse(const RationalMatrix& m) {
  const std::size_t n = m.size();
  RationalMatrix aug(n, RationalVector(2 * n));
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i].size() != n) throw DimensionMismatch("inverse of non-square matrix");
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = m[i][j];
    aug[i][n + i] = 1;
  }
  const RowEchelon e = rref(aug, 2 * n);
  if (e.rank() < n || e.pivots[n - 1] != n - 1) throw PreconditionError("singular matrix");
  RationalMatrix inv(n, RationalVector(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv[i][j] = e.rows[i][n + j];
  return inv;
}

inline RationalVector mat_vec(const RationalMatrix& m, const RationalVector& v) {
  RationalVector r(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) r[i] = dot(m[i], v);
  return r;
}

/// Indices of a maximal linearly independent subset, chosen greedily in
/// input order.
inline std::vector<std::size_t> independent_subset(const std::vector<RationalVector>& vectors) {
  std::vector<std::size_t> chosen;
  std::vector<RationalVector> acc;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    acc.push_back(vectors[i]);
    if (rank_of(acc) == acc.size()) {
      chosen.push_back(i);
    } else {
      acc.pop_back();
    }
  }
  return chosen;
}

}  // namespace forge

#endif  // FORGE_RATIONAL_HPP
