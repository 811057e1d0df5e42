#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library: every oracle is a direct, brute-force evaluation of the
// defining formula.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

namespace oracle {

using Q = boost::multiprecision::number<boost::multiprecision::gmp_rational, boost::multiprecision::et_off>;
using QVec = std::vector<Q>;

// ---------------------------------------------------------------------------
// number theory

/// mu(0..n) by a linear sieve.
inline std::vector<int> mobius(std::uint64_t n) {
  std::vector<int> mu(n + 1, 1), primes;
  std::vector<bool> composite(n + 1, false);
  mu[0] = 0;
  for (std::uint64_t i = 2; i <= n; ++i) {
    if (!composite[i]) {
      primes.push_back(static_cast<int>(i));
      mu[i] = -1;
    }
    for (int p : primes) {
      const std::uint64_t m = i * static_cast<std::uint64_t>(p);
      if (m > n) break;
      composite[m] = true;
      if (i % p == 0) {
        mu[m] = 0;
        break;
      }
      mu[m] = -mu[i];
    }
  }
  return mu;
}

/// Trial-division factorization n = prod p^k.
inline std::vector<std::pair<std::uint64_t, unsigned>> factor(std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, unsigned>> out;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    unsigned k = 0;
    while (n % p == 0) n /= p, ++k;
    if (k) out.emplace_back(p, k);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

/// (f * g)(n) = sum_{d | n} f(d) g(n / d), directly over divisors, 1..N.
template <typename T>
std::vector<T> dirichlet(const std::vector<T>& f, const std::vector<T>& g) {
  const std::size_t N = std::min(f.size(), g.size()) - 1;
  std::vector<T> h(N + 1, T(0));
  for (std::size_t n = 1; n <= N; ++n)
    for (std::size_t d = 1; d <= n; ++d)
      if (n % d == 0) h[n] += f[d] * g[n / d];
  return h;
}

/// Cauchy product of two sequences, truncated to the shorter one.
template <typename T>
std::vector<T> cauchy(const std::vector<T>& a, const std::vector<T>& b, std::size_t len) {
  std::vector<T> c(len, T(0));
  for (std::size_t i = 0; i < a.size() && i < len; ++i)
    for (std::size_t j = 0; j < b.size() && i + j < len; ++j) c[i + j] += a[i] * b[j];
  return c;
}

inline double factorial(int n) {
  double r = 1;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

// ---------------------------------------------------------------------------
// exact linear algebra (plain Gaussian elimination)

/// Rank of a list of vectors.
inline std::size_t rank(std::vector<QVec> m) {
  if (m.empty()) return 0;
  const std::size_t cols = m.front().size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
    std::size_t piv = r;
    while (piv < m.size() && m[piv][c] == 0) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[piv], m[r]);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || m[i][c] == 0) continue;
      const Q f = m[i][c] / m[r][c];
      for (std::size_t k = c; k < cols; ++k) m[i][k] -= f * m[r][k];
    }
    ++r;
  }
  return r;
}

/// Solves sum_j x_j cols[j] = target for linearly independent columns;
/// nullopt if the target is outside their span.
inline std::optional<QVec> solve(const std::vector<QVec>& cols, const QVec& target) {
  const std::size_t n = cols.size(), d = target.size();
  std::vector<QVec> aug(d, QVec(n + 1));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = cols[j][i];
    aug[i][n] = target[i];
  }
  std::vector<std::size_t> pivcol;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < d; ++c) {
    std::size_t piv = r;
    while (piv < d && aug[piv][c] == 0) ++piv;
    if (piv == d) continue;
    std::swap(aug[piv], aug[r]);
    for (std::size_t i = 0; i < d; ++i) {
      if (i == r || aug[i][c] == 0) continue;
      const Q f = aug[i][c] / aug[r][c];
      for (std::size_t k = c; k <= n; ++k) aug[i][k] -= f * aug[r][k];
    }
    pivcol.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < d; ++i)
    if (aug[i][n] != 0) return std::nullopt;
  QVec x(n, Q(0));
  for (std::size_t i = 0; i < r; ++i) x[pivcol[i]] = aug[i][n] / aug[i][pivcol[i]];
  return x;
}

/// x in cone(gens), by Caratheodory: some linearly independent subset of
/// the generators expresses x with nonnegative coefficients.
inline bool in_cone(const std::vector<QVec>& gens, const QVec& x) {
  bool zero = std::all_of(x.begin(), x.end(), [](const Q& q) { return q == 0; });
  if (zero) return true;
  const std::size_t n = gens.size();
  const std::size_t d = x.size();
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) > d) continue;
    std::vector<QVec> sub;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) sub.push_back(gens[i]);
    if (rank(sub) != sub.size()) continue;
    auto c = solve(sub, x);
    if (c && std::all_of(c->begin(), c->end(), [](const Q& q) { return q >= 0; })) return true;
  }
  return false;
}

/// Positive-scaling normal form: divide by the first nonzero |entry|.
inline QVec normalize(const QVec& v) {
  for (const auto& q : v)
    if (q != 0) {
      const Q s = q < 0 ? Q(-q) : q;
      QVec out;
      for (const auto& c : v) out.push_back(c / s);
      return out;
    }
  return v;
}

/// Extreme rays of a pointed cone(gens): generators not in the cone of the
/// generators that are not positive multiples of them.
inline std::vector<QVec> extreme_rays(const std::vector<QVec>& gens) {
  std::vector<QVec> out;
  for (const auto& g : gens) {
    const QVec ng = normalize(g);
    if (std::all_of(g.begin(), g.end(), [](const Q& q) { return q == 0; })) continue;
    std::vector<QVec> others;
    for (const auto& h : gens)
      if (normalize(h) != ng) others.push_back(h);
    if (!in_cone(others, g) && std::find(out.begin(), out.end(), ng) == out.end()) out.push_back(ng);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// 0 in conv(E) by Caratheodory for convex hulls: an affinely independent
/// subset of at most d + 1 points with nonnegative barycentric weights.
inline bool zero_in_hull(const std::vector<QVec>& E) {
  if (E.empty()) return false;
  const std::size_t d = E.front().size();
  std::vector<QVec> lifted;
  for (const auto& e : E) {
    QVec v = e;
    v.push_back(Q(1));
    lifted.push_back(v);
  }
  QVec target(d, Q(0));
  target.push_back(Q(1));
  return in_cone(lifted, target);
}

// ---------------------------------------------------------------------------
// random helpers

inline Q random_q(std::mt19937_64& rng, int lo, int hi, int maxden) {
  std::uniform_int_distribution<int> num(lo, hi), den(1, maxden);
  return Q(num(rng), den(rng));
}

inline std::complex<double> random_disk(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1), a(-M_PI, M_PI);
  return std::polar(std::sqrt(u(rng)), a(rng));
}

}  // namespace oracle
