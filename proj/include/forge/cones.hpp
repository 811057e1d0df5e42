#ifndef FORGE_CONES_HPP
#define FORGE_CONES_HPP

// Exact rational polyhedral cones: convex hulls of finite sets, separation,
// dual cones by double description, extreme rays, faces, and the walk that
// builds a rational basis of a face whose real cone contains a given point.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "forge/error.hpp"
#include "forge/interval.hpp"
#include "forge/lp.hpp"
#include "forge/rational.hpp"

namespace forge {

/// Thrown by separate() when 0 lies in the rational convex hull.
class ZeroInHull : public PreconditionError {
 public:
  explicit ZeroInHull(RationalVector coefficients)
      : PreconditionError("0 lies in conv_Q(E); no separating functional exists"),
        coefficients_(std::move(coefficients)) {}
  const RationalVector& coefficients() const { return coefficients_; }

 private:
  RationalVector coefficients_;
};

namespace detail {

inline std::size_t common_dim(const std::vector<RationalVector>& E) {
  if (E.empty()) throw PreconditionError("empty vector list");
  for (const auto& v : E)
    if (v.size() != E.front().size()) throw DimensionMismatch("vectors have different dimensions");
  return E.front().size();
}

/// Lexicographically greater first, so (1,0) sorts before (0,1).
inline bool lex_greater(const RationalVector& a, const RationalVector& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] > b[i];
  return false;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Convex hulls and separation

struct HullDecision {
  bool contains_zero = false;
  RationalVector coefficients;  // convex coefficients q with sum q_i x_i = 0
  RationalVector separator;     // rho with rho(x_i) >= 1 when 0 is outside
};

namespace detail {

inline std::optional<RationalVector> zero_combination(const std::vector<RationalVector>& E,
                                                      std::size_t dim) {
  // sum q_i x_i = 0, sum q_i = 1, q >= 0
  RationalMatrix A(dim + 1, RationalVector(E.size(), Rational(0)));
  for (std::size_t j = 0; j < E.size(); ++j) {
    for (std::size_t i = 0; i < dim; ++i) A[i][j] = E[j][i];
    A[dim][j] = 1;
  }
  RationalVector b = zero_vector(dim + 1);
  b[dim] = 1;
  return lp::feasible_point(A, b, E.size());
}

inline std::optional<RationalVector> separating_functional(const std::vector<RationalVector>& E,
                                                           std::size_t dim) {
  return lp::solve_inequalities_min_l1(E, RationalVector(E.size(), Rational(1)), dim);
}

}  // namespace detail

/// Decides 0 in conv_Q(E) by exact LP; returns the convex coefficients or a
/// separating functional as certificate.
inline HullDecision conv_q_contains_zero(const std::vector<RationalVector>& E) {
  const std::size_t dim = detail::common_dim(E);
  HullDecision d;
  if (auto q = detail::zero_combination(E, dim)) {
    d.contains_zero = true;
    d.coefficients = std::move(*q);
    return d;
  }
  auto rho = detail::separating_functional(E, dim);
  if (!rho) throw std::logic_error("LP alternatives both failed");
  d.separator = std::move(*rho);
  return d;
}

/// Rational rho with rho(x) >= 1 on E, of least l1 norm.
inline RationalVector separate(const std::vector<RationalVector>& E) {
  const std::size_t dim = detail::common_dim(E);
  if (auto rho = detail::separating_functional(E, dim)) return *rho;
  auto q = detail::zero_combination(E, dim);
  throw ZeroInHull(q ? *q : RationalVector{});
}

/// Same contract as separate(), by Fourier-Motzkin elimination.
inline std::optional<RationalVector> separate_fourier_motzkin(const std::vector<RationalVector>& E) {
  const std::size_t dim = detail::common_dim(E);
  return lp::fourier_motzkin(E, RationalVector(E.size(), Rational(1)), dim);
}

/// Convex coefficients over U summing to 1 with sum q_u u = 0, built by
/// pairing points that differ only in the sign of the last coordinate and
/// recursing on the remaining coordinates.
inline RationalVector sign_lemma_witness(const std::vector<RationalVector>& U) {
  const std::size_t n = detail::common_dim(U);
  struct Point {
    RationalVector x;
    std::map<std::size_t, Rational> q;  // coefficients over U
  };
  auto pattern_of = [](const RationalVector& x, std::size_t len) -> std::optional<std::vector<int>> {
    std::vector<int> p(len);
    for (std::size_t j = 0; j < len; ++j) {
      if (x[j] == 0) return std::nullopt;
      p[j] = x[j] > 0 ? 1 : -1;
    }
    return p;
  };
  std::vector<Point> pts;
  for (std::size_t i = 0; i < U.size(); ++i) pts.push_back({U[i], {{i, Rational(1)}}});

  for (std::size_t len = n; len > 0; --len) {
    // first point for each full sign pattern on coordinates 0..len-1
    std::map<std::vector<int>, std::size_t> first;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (auto p = pattern_of(pts[i].x, len)) first.emplace(*p, i);
    std::vector<Point> next;
    const std::size_t combos = std::size_t(1) << (len - 1);
    for (std::size_t mask = 0; mask < combos; ++mask) {
      std::vector<int> sigma(len);
      for (std::size_t j = 0; j + 1 < len; ++j) sigma[j] = (mask >> (len - 2 - j)) & 1 ? -1 : 1;
      sigma[len - 1] = 1;
      auto up = first.find(sigma);
      sigma[len - 1] = -1;
      auto down = first.find(sigma);
      if (up == first.end() || down == first.end()) {
        std::string s;
        for (int v : sigma) s += v > 0 ? '+' : '-';
        throw PreconditionError("sign pattern missing from U (needed " + s.substr(0, len - 1) +
                                (up == first.end() ? "+" : "-") + " on the first " +
                                std::to_string(len) + " coordinates)");
      }
      const Point& u = pts[up->second];
      const Point& v = pts[down->second];
      // t u + (1 - t) v has zero last coordinate
      const Rational t = -v.x[len - 1] / (u.x[len - 1] - v.x[len - 1]);
      Point w;
      w.x = t * u.x + (Rational(1) - t) * v.x;
      for (const auto& [k, c] : u.q) w.q[k] += t * c;
      for (const auto& [k, c] : v.q) w.q[k] += (Rational(1) - t) * c;
      next.push_back(std::move(w));
    }
    pts = std::move(next);
  }
  RationalVector q = zero_vector(U.size());
  for (const auto& [k, c] : pts.front().q) q[k] = c;
  return q;
}

// ---------------------------------------------------------------------------
// Cones

/// cone(generators) + span(lineality). Generators are nonzero and pairwise
/// not positive multiples of each other (first occurrence kept).
class RationalCone {
 public:
  RationalCone() = default;
  RationalCone(std::size_t dim, std::vector<RationalVector> generators,
               std::vector<RationalVector> lineality = {})
      : dim_(dim), lineality_(std::move(lineality)) {
    std::vector<RationalVector> seen;
    for (auto& g : generators) {
      if (g.size() != dim_) throw DimensionMismatch("cone generator has the wrong dimension");
      if (is_zero(g)) continue;
      RationalVector p = primitive(g);
      if (std::find(seen.begin(), seen.end(), p) != seen.end()) continue;
      seen.push_back(std::move(p));
      generators_.push_back(std::move(g));
    }
    for (const auto& l : lineality_)
      if (l.size() != dim_) throw DimensionMismatch("lineality vector has the wrong dimension");
  }

  std::size_t dim() const { return dim_; }
  const std::vector<RationalVector>& generators() const { return generators_; }
  const std::vector<RationalVector>& lineality() const { return lineality_; }
  bool has_lineality() const { return !lineality_.empty(); }

 private:
  std::size_t dim_ = 0;
  std::vector<RationalVector> generators_;
  std::vector<RationalVector> lineality_;
};

/// x in cone(gens) + span(lineality), by exact LP.
inline bool cone_contains(const std::vector<RationalVector>& gens,
                          const std::vector<RationalVector>& lineality, const RationalVector& x) {
  const std::size_t dim = x.size();
  const std::size_t n = gens.size() + 2 * lineality.size();
  if (n == 0) return is_zero(x);
  RationalMatrix A(dim, RationalVector(n, Rational(0)));
  for (std::size_t i = 0; i < dim; ++i) {
    std::size_t j = 0;
    for (const auto& g : gens) A[i][j++] = g.at(i);
    for (const auto& l : lineality) {
      A[i][j++] = l.at(i);
      A[i][j++] = -l.at(i);
    }
  }
  return lp::feasible_point(A, x, n).has_value();
}

inline bool cone_contains(const RationalCone& C, const RationalVector& x) {
  return cone_contains(C.generators(), C.lineality(), x);
}

namespace detail {

/// Canonical representative of v modulo span(L), L given in reduced row echelon form.
inline RationalVector reduce_mod(const RowEchelon& L, RationalVector v) {
  for (std::size_t i = 0; i < L.rows.size(); ++i) {
    const Rational f = v[L.pivots[i]];
    if (f == 0) continue;
    for (std::size_t j = 0; j < v.size(); ++j) v[j] -= f * L.rows[i][j];
  }
  return v;
}

inline std::size_t tight_rank(const std::vector<RationalVector>& constraints, const RationalVector& r,
                              const RationalVector* other, std::size_t dim) {
  std::vector<RationalVector> tight;
  for (const auto& a : constraints)
    if (dot(a, r) == 0 && (!other || dot(a, *other) == 0)) tight.push_back(a);
  return tight.empty() ? 0 : rref(tight, dim).rank();
}

}  // namespace detail

/// {rho : rho(x) >= 0 for all x in E} by double description, starting from
/// the whole space and adding one inequality at a time. Rays are primitive
/// integer vectors reduced modulo the lineality space, sorted.
inline RationalCone dual_cone(const std::vector<RationalVector>& E, std::size_t dim) {
  for (const auto& v : E)
    if (v.size() != dim) throw DimensionMismatch("dual_cone input has the wrong dimension");
  std::vector<RationalVector> L;
  for (std::size_t i = 0; i < dim; ++i) L.push_back(unit_vector(dim, i));
  std::vector<RationalVector> R;
  std::vector<RationalVector> processed;

  auto normalize = [&]() {
    const RowEchelon Lr = rref(L, dim);
    std::vector<RationalVector> out;
    for (auto& r : R) {
      RationalVector p = primitive(detail::reduce_mod(Lr, r));
      if (is_zero(p)) continue;
      if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(std::move(p));
    }
    R = std::move(out);
  };

  for (const auto& a : E) {
    if (is_zero(a)) continue;
    std::optional<std::size_t> pivot;
    for (std::size_t i = 0; i < L.size(); ++i)
      if (dot(a, L[i]) != 0) {
        pivot = i;
        break;
      }
    if (pivot) {
      RationalVector l0 = L[*pivot];
      Rational al0 = dot(a, l0);
      if (al0 < 0) {
        l0 = Rational(-1) * l0;
        al0 = -al0;
      }
      std::vector<RationalVector> nextL;
      for (std::size_t i = 0; i < L.size(); ++i) {
        if (i == *pivot) continue;
        nextL.push_back(L[i] - (dot(a, L[i]) / al0) * l0);
      }
      for (auto& r : R) r = r - (dot(a, r) / al0) * l0;
      R.push_back(l0);
      L = std::move(nextL);
      processed.push_back(a);
      normalize();
      continue;
    }
    std::vector<RationalVector> pos, zero, neg;
    for (const auto& r : R) {
      const Rational v = dot(a, r);
      (v > 0 ? pos : (v < 0 ? neg : zero)).push_back(r);
    }
    std::vector<RationalVector> next = pos;
    next.insert(next.end(), zero.begin(), zero.end());
    const std::size_t conedim = dim - L.size();
    for (const auto& p : pos)
      for (const auto& q : neg) {
        if (conedim >= 2 && detail::tight_rank(processed, p, &q, dim) != conedim - 2) continue;
        next.push_back(dot(a, p) * q - dot(a, q) * p);
      }
    processed.push_back(a);
    // keep extreme rays only
    R.clear();
    for (auto& r : next)
      if (detail::tight_rank(processed, r, nullptr, dim) == conedim - 1) R.push_back(std::move(r));
    normalize();
  }

  // final redundancy pass by exact LP
  std::vector<RationalVector> kept;
  for (std::size_t i = 0; i < R.size(); ++i) {
    std::vector<RationalVector> others;
    for (std::size_t j = 0; j < R.size(); ++j)
      if (j != i) others.push_back(R[j]);
    if (!cone_contains(others, L, R[i])) kept.push_back(R[i]);
  }
  std::sort(kept.begin(), kept.end(), detail::lex_greater);
  std::vector<RationalVector> lin;
  if (!L.empty()) lin = rref(L, dim).rows;
  return RationalCone(dim, std::move(kept), std::move(lin));
}

inline RationalCone dual_cone(const RationalCone& C) {
  std::vector<RationalVector> E = C.generators();
  for (const auto& l : C.lineality()) {
    E.push_back(l);
    E.push_back(Rational(-1) * l);
  }
  return dual_cone(E, C.dim());
}

/// True when the cones have the same ray sets up to positive scaling and the
/// same lineality span.
inline bool same_cone(const RationalCone& a, const RationalCone& b) {
  if (a.dim() != b.dim()) return false;
  for (const auto& g : a.generators())
    if (!cone_contains(b, g)) return false;
  for (const auto& g : b.generators())
    if (!cone_contains(a, g)) return false;
  for (const auto& l : a.lineality())
    if (!cone_contains(b, l) || !cone_contains(b, Rational(-1) * l)) return false;
  for (const auto& l : b.lineality())
    if (!cone_contains(a, l) || !cone_contains(a, Rational(-1) * l)) return false;
  return true;
}

/// Pointed means C contains no line.
inline bool is_pointed(const RationalCone& C) {
  if (C.has_lineality()) return false;
  if (C.generators().empty()) return true;
  return !conv_q_contains_zero(C.generators()).contains_zero;
}

/// Generators spanning extreme rays, in input order.
inline std::vector<RationalVector> extreme_rays(const RationalCone& C) {
  if (!is_pointed(C)) throw PreconditionError("extreme_rays: cone is not pointed");
  const auto& G = C.generators();
  std::vector<RationalVector> out;
  for (std::size_t i = 0; i < G.size(); ++i) {
    std::vector<RationalVector> others;
    for (std::size_t j = 0; j < G.size(); ++j)
      if (j != i) others.push_back(G[j]);
    if (!cone_contains(others, {}, G[i])) out.push_back(G[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Faces

struct Face {
  std::vector<std::size_t> indices;        // into the cone's generator list
  std::vector<RationalVector> generators;  // F intersected with the generators
  bool ambiguous = false;  // some tightness query hit the precision cap
};

/// Smallest face of C containing x. Facets come from the rays of the dual
/// cone; a facet is tight when its normal vanishes at x. Queries left
/// undecided at the precision cap count as not tight, giving a larger face
/// that still contains x.
inline Face minimal_face_containing(const RationalCone& C, const RealVector& x, const AtomContext& ctx) {
  if (x.size() != C.dim()) throw DimensionMismatch("point has the wrong dimension");
  const RationalCone D = dual_cone(C);
  Face f;
  for (const auto& l : D.lineality()) {
    const Sign s = sign_of(apply_functional(l, x), ctx);
    if (s == Sign::Positive || s == Sign::Negative) throw PreconditionError("point is not in the cone");
    if (s == Sign::Ambiguous) f.ambiguous = true;
  }
  std::vector<RationalVector> tight;
  for (const auto& n : D.generators()) {
    const Sign s = sign_of(apply_functional(n, x), ctx);
    if (s == Sign::Negative) throw PreconditionError("point is not in the cone");
    if (s == Sign::Zero) tight.push_back(n);
    if (s == Sign::Ambiguous) f.ambiguous = true;
  }
  const auto& G = C.generators();
  for (std::size_t i = 0; i < G.size(); ++i) {
    const bool on = std::all_of(tight.begin(), tight.end(),
                                [&](const RationalVector& n) { return dot(n, G[i]) == 0; });
    if (on) {
      f.indices.push_back(i);
      f.generators.push_back(G[i]);
    }
  }
  return f;
}

inline Face minimal_face_containing(const RationalCone& C, const RationalVector& x) {
  const AtomContext none({});
  return minimal_face_containing(C, to_real_vector(x), none);
}

struct BasisThroughPoint {
  std::vector<RationalVector> basis;
  std::vector<LinearReal> coefficients;  // eta = sum coefficients[i] * basis[i], all >= 0
  bool ambiguous = false;
};

namespace detail {

inline void walk_face(const std::vector<RationalVector>& F, const RealVector& eta,
                      std::optional<RationalVector> b1, const AtomContext& ctx,
                      BasisThroughPoint& out) {
  if (F.empty()) return;
  const std::size_t dim = F.front().size();
  const RationalVector b = b1 ? *b1 : F.front();
  const std::size_t ell = rank_of(F);

  if (ell == 1) {
    std::size_t i = 0;
    while (b[i] == 0) ++i;
    out.basis.push_back(b);
    out.coefficients.push_back(eta[i] / b[i]);
    return;
  }

  // d = eta - s* b leaves F through the facet where eta(n)/n(b) is smallest
  const RationalCone D = dual_cone(F, dim);
  std::optional<LinearReal> best;
  RationalVector best_normal;
  for (const auto& n : D.generators()) {
    const Rational nb = dot(n, b);
    if (nb <= 0) continue;
    const LinearReal ratio = apply_functional(n, eta) / nb;
    if (!best) {
      best = ratio;
      best_normal = n;
      continue;
    }
    const Sign s = sign_of(ratio - *best, ctx);
    if (s == Sign::Ambiguous) out.ambiguous = true;
    if (s == Sign::Negative) {
      best = ratio;
      best_normal = n;
    }
  }
  if (!best) throw PreconditionError("basis walk: b1 spans a line of the face");
  RealVector d(dim);
  for (std::size_t i = 0; i < dim; ++i) d[i] = eta[i] - b[i] * *best;
  std::vector<RationalVector> sub;
  for (const auto& g : F)
    if (dot(best_normal, g) == 0) sub.push_back(g);

  out.basis.push_back(b);
  out.coefficients.push_back(*best);
  walk_face(sub, d, std::nullopt, ctx, out);
}

}  // namespace detail

/// A rational basis b_1..b_l of span(F) made of vectors of cone(F) such that
/// eta lies in their real cone. b1, if given, comes first; otherwise the
/// first generator of F is used. The walk moves
/// from eta against b1 until it hits a proper face, recurses there, and
/// finally extends by generators of F.
inline BasisThroughPoint basis_through_point(const std::vector<RationalVector>& F, const RealVector& eta,
                                             const AtomContext& ctx,
                                             std::optional<RationalVector> b1 = std::nullopt) {
  BasisThroughPoint out;
  if (F.empty()) {
    if (b1) throw PreconditionError("b1 given for the zero face");
    return out;
  }
  const std::size_t dim = F.front().size();
  if (eta.size() != dim) throw DimensionMismatch("point has the wrong dimension");
  if (b1) {
    if (is_zero(*b1)) throw PreconditionError("b1 must be nonzero");
    if (!cone_contains(F, {}, *b1)) throw PreconditionError("b1 is not in the face");
  }
  detail::walk_face(F, eta, b1, ctx, out);
  const std::size_t ell = rank_of(F);
  for (const auto& g : F) {
    if (out.basis.size() == ell) break;
    auto trial = out.basis;
    trial.push_back(g);
    if (rank_of(trial) == trial.size()) {
      out.basis.push_back(g);
      out.coefficients.push_back(LinearReal(Rational(0)));
    }
  }
  for (const auto& c : out.coefficients) {
    const Sign s = sign_of(c, ctx);
    if (s == Sign::Negative) throw PreconditionError("basis walk: point is not in the face");
    if (s == Sign::Ambiguous) out.ambiguous = true;
  }
  return out;
}

inline BasisThroughPoint basis_through_point(const std::vector<RationalVector>& F, const RationalVector& eta,
                                             std::optional<RationalVector> b1 = std::nullopt) {
  const AtomContext none({});
  return basis_through_point(F, to_real_vector(eta), none, std::move(b1));
}

}  // namespace forge

#endif  // FORGE_CONES_HPP
