#ifndef FORGE_LP_HPP
#define FORGE_LP_HPP

// Exact rational linear programming: a dense two-phase simplex with Bland's
// rule, and Fourier-Motzkin elimination for small feasibility checks.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "forge/error.hpp"
#include "forge/rational.hpp"

namespace forge::lp {

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
  Status status = Status::Infeasible;
  RationalVector x;      // primal solution (Optimal only)
  Rational objective = 0;
};

namespace detail {

class Tableau {
 public:
  // rows: B^-1 [A | b]; cost: reduced costs with the negated objective in the last slot
  RationalMatrix rows;
  RationalVector cost;
  std::vector<std::size_t> basis;
  std::size_t ncols = 0;

  void pivot(std::size_t r, std::size_t c) {
    const Rational inv = 1 / rows[r][c];
    for (auto& v : rows[r]) v *= inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c] == 0) continue;
      const Rational f = rows[i][c];
      for (std::size_t j = 0; j <= ncols; ++j) rows[i][j] -= f * rows[r][j];
    }
    if (cost[c] != 0) {
      const Rational f = cost[c];
      for (std::size_t j = 0; j <= ncols; ++j) cost[j] -= f * rows[r][j];
    }
    basis[r] = c;
  }

  void set_objective(const RationalVector& c) {
    cost.assign(ncols + 1, Rational(0));
    for (std::size_t j = 0; j < c.size(); ++j) cost[j] = c[j];
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Rational cb = basis[i] < c.size() ? c[basis[i]] : Rational(0);
      if (cb == 0) continue;
      for (std::size_t j = 0; j <= ncols; ++j) cost[j] -= cb * rows[i][j];
    }
  }

  /// Minimizes over the columns [0, allowed). Bland's rule: lowest-index
  /// entering column, lowest-index leaving basic variable on ratio ties.
  Status run(std::size_t allowed) {
    for (;;) {
      std::size_t enter = allowed;
      for (std::size_t j = 0; j < allowed; ++j)
        if (cost[j] < 0) {
          enter = j;
          break;
        }
      if (enter == allowed) return Status::Optimal;
      std::optional<std::size_t> leave;
      Rational best;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i][enter] <= 0) continue;
        const Rational ratio = rows[i][ncols] / rows[i][enter];
        if (!leave || ratio < best || (ratio == best && basis[i] < basis[*leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (!leave) return Status::Unbounded;
      pivot(*leave, enter);
    }
  }
};

}  // namespace detail

/// minimize c.x subject to A x = b, x >= 0.
inline Result minimize(const RationalVector& c, const RationalMatrix& A, const RationalVector& b) {
  const std::size_t m = A.size();
  const std::size_t n = c.size();
  if (b.size() != m) throw DimensionMismatch("lp: rhs size differs from row count");
  for (const auto& row : A)
    if (row.size() != n) throw DimensionMismatch("lp: row size differs from objective size");

  detail::Tableau t;
  t.ncols = n + m;
  t.rows.assign(m, RationalVector(n + m + 1, Rational(0)));
  t.basis.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const bool flip = b[i] < 0;
    for (std::size_t j = 0; j < n; ++j) t.rows[i][j] = flip ? -A[i][j] : A[i][j];
    t.rows[i][n + i] = 1;
    t.rows[i][n + m] = flip ? -b[i] : b[i];
    t.basis[i] = n + i;
  }
  // phase 1: minimize the sum of artificials
  RationalVector phase1(n + m, Rational(0));
  for (std::size_t i = 0; i < m; ++i) phase1[n + i] = 1;
  t.set_objective(phase1);
  t.run(n + m);
  if (t.cost[n + m] != 0) return {Status::Infeasible, {}, 0};

  // drive remaining artificials out of the basis; drop redundant rows
  for (std::size_t i = 0; i < t.rows.size();) {
    if (t.basis[i] < n) {
      ++i;
      continue;
    }
    std::size_t j = 0;
    while (j < n && t.rows[i][j] == 0) ++j;
    if (j < n) {
      t.pivot(i, j);
      ++i;
    } else {
      t.rows.erase(t.rows.begin() + static_cast<std::ptrdiff_t>(i));
      t.basis.erase(t.basis.begin() + static_cast<std::ptrdiff_t>(i));
    }
  }
  t.set_objective(c);
  const Status st = t.run(n);
  if (st == Status::Unbounded) return {Status::Unbounded, {}, 0};
  Result r;
  r.status = Status::Optimal;
  r.x = zero_vector(n);
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    if (t.basis[i] < n) r.x[t.basis[i]] = t.rows[i][t.ncols];
  r.objective = -t.cost[t.ncols];
  return r;
}

inline Result maximize(const RationalVector& c, const RationalMatrix& A, const RationalVector& b) {
  RationalVector neg(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) neg[j] = -c[j];
  Result r = minimize(neg, A, b);
  r.objective = -r.objective;
  return r;
}

/// Some x >= 0 with A x = b, if one exists.
inline std::optional<RationalVector> feasible_point(const RationalMatrix& A, const RationalVector& b,
                                                    std::size_t nvars) {
  Result r = minimize(zero_vector(nvars), A, b);
  if (r.status != Status::Optimal) return std::nullopt;
  return r.x;
}

/// Free x in Q^dim with G x >= h (row-wise), minimizing the l1 norm of x.
/// Returns nullopt when the system is infeasible.
inline std::optional<RationalVector> solve_inequalities_min_l1(const RationalMatrix& G,
                                                              const RationalVector& h,
                                                              std::size_t dim) {
  // x = xp - xm, G xp - G xm - s = h, all of xp, xm, s >= 0
  const std::size_t m = G.size();
  const std::size_t n = 2 * dim + m;
  RationalMatrix A(m, RationalVector(n, Rational(0)));
  for (std::size_t i = 0; i < m; ++i) {
    if (G[i].size() != dim) throw DimensionMismatch("inequality row has the wrong dimension");
    for (std::size_t j = 0; j < dim; ++j) {
      A[i][j] = G[i][j];
      A[i][dim + j] = -G[i][j];
    }
    A[i][2 * dim + i] = -1;
  }
  RationalVector c(n, Rational(0));
  for (std::size_t j = 0; j < 2 * dim; ++j) c[j] = 1;
  Result r = minimize(c, A, h);
  if (r.status != Status::Optimal) return std::nullopt;
  RationalVector x(dim);
  for (std::size_t j = 0; j < dim; ++j) x[j] = r.x[j] - r.x[dim + j];
  return x;
}

// ---------------------------------------------------------------------------
// Fourier-Motzkin

/// Decides G x >= h over Q^dim by eliminating variables one at a time and
/// returns a witness by back substitution. Exponential; meant for dim <= 3.
inline std::optional<RationalVector> fourier_motzkin(const RationalMatrix& G, const RationalVector& h,
                                                     std::size_t dim) {
  struct Row {
    RationalVector a;
    Rational b;
  };
  std::vector<std::vector<Row>> stages;
  std::vector<Row> cur;
  for (std::size_t i = 0; i < G.size(); ++i) cur.push_back({G[i], h[i]});
  // eliminate the last variable first
  for (std::size_t k = dim; k-- > 0;) {
    stages.push_back(cur);
    std::vector<Row> pos, neg, next;
    for (auto& r : cur) {
      if (r.a[k] > 0)
        pos.push_back(r);
      else if (r.a[k] < 0)
        neg.push_back(r);
      else
        next.push_back(r);
    }
    for (const auto& p : pos)
      for (const auto& q : neg) {
        // (-q_k) p + p_k q has zero k-th coefficient
        const Rational fp = -q.a[k], fq = p.a[k];
        Row r{fp * p.a + fq * q.a, fp * p.b + fq * q.b};
        r.a[k] = 0;
        next.push_back(std::move(r));
      }
    cur = std::move(next);
  }
  for (const auto& r : cur)
    if (r.b > 0) return std::nullopt;  // 0 >= b fails

  RationalVector x = zero_vector(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    // stages[dim - 1 - k] holds the system over variables 0..k
    const auto& sys = stages[dim - 1 - k];
    std::optional<Rational> lo, hi;
    for (const auto& r : sys) {
      if (r.a[k] == 0) continue;
      Rational rest = r.b;
      for (std::size_t j = 0; j < k; ++j) rest -= r.a[j] * x[j];
      const Rational bound = rest / r.a[k];
      if (r.a[k] > 0) {
        if (!lo || bound > *lo) lo = bound;
      } else {
        if (!hi || bound < *hi) hi = bound;
      }
    }
    if (lo)
      x[k] = *lo;
    else if (hi)
      x[k] = std::min(*hi, Rational(0));
    else
      x[k] = 0;
  }
  return x;
}

}  // namespace forge::lp

#endif  // FORGE_LP_HPP
