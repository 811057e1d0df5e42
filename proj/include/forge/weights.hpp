#ifndef FORGE_WEIGHTS_HPP
#define FORGE_WEIGHTS_HPP

// Weight functions w on a semigroup, as functions of the l1 magnitude
// |lambda|_1, plus sampled admissibility diagnostics.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "forge/error.hpp"
#include "forge/semigroup.hpp"

namespace forge {

class WeightFn {
 public:
  enum class Kind { One, Poly, Exp, Product, Table };

  struct Evaluation {
    double value;
    bool clamped;  // TABLE queried outside its data range
  };

  static WeightFn one() { return WeightFn(Kind::One); }
  /// (1 + |lambda|_1)^c
  static WeightFn poly(double c) {
    if (!(c >= 0)) throw PreconditionError("POLY weight needs c >= 0");
    WeightFn w(Kind::Poly);
    w.param_ = c;
    return w;
  }
  /// exp(-rho |lambda|_1); not admissible for rho > 0, still a weight.
  static WeightFn exp(double rho) {
    WeightFn w(Kind::Exp);
    w.param_ = rho;
    return w;
  }
  static WeightFn product(std::vector<WeightFn> parts) {
    WeightFn w(Kind::Product);
    w.parts_ = std::move(parts);
    return w;
  }
  /// Piecewise linear through (magnitude, value) pairs, normalized so w(0) = 1.
  /// Queries beyond the data are clamped to the nearest end value.
  static WeightFn table(std::vector<std::pair<double, double>> points) {
    if (points.empty()) throw PreconditionError("TABLE weight needs data");
    std::sort(points.begin(), points.end());
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!(points[i].second > 0)) throw PreconditionError("TABLE weight values must be positive");
      if (points[i].first < 0) throw PreconditionError("TABLE magnitudes must be >= 0");
      if (i > 0 && points[i].first == points[i - 1].first)
        throw PreconditionError("TABLE magnitudes must be distinct");
    }
    if (points.front().first != 0) throw PreconditionError("TABLE weight must contain magnitude 0");
    const double w0 = points.front().second;
    for (auto& p : points) p.second /= w0;
    WeightFn w(Kind::Table);
    w.table_ = std::move(points);
    return w;
  }

  Kind kind() const { return kind_; }
  double param() const { return param_; }
  const std::vector<WeightFn>& parts() const { return parts_; }
  const std::vector<std::pair<double, double>>& table_points() const { return table_; }

  Evaluation evaluate_checked(double x) const {
    switch (kind_) {
      case Kind::One:
        return {1.0, false};
      case Kind::Poly:
        return {std::pow(1.0 + x, param_), false};
      case Kind::Exp:
        return {std::exp(-param_ * x), false};
      case Kind::Product: {
        Evaluation e{1.0, false};
        for (const auto& p : parts_) {
          auto pe = p.evaluate_checked(x);
          e.value *= pe.value;
          e.clamped = e.clamped || pe.clamped;
        }
        return e;
      }
      case Kind::Table: {
        if (x <= table_.front().first) return {table_.front().second, x < table_.front().first};
        if (x >= table_.back().first) return {table_.back().second, x > table_.back().first};
        auto hi = std::upper_bound(table_.begin(), table_.end(), std::make_pair(x, 0.0),
                                   [](const auto& a, const auto& b) { return a.first < b.first; });
        auto lo = hi - 1;
        const double t = (x - lo->first) / (hi->first - lo->first);
        return {lo->second + t * (hi->second - lo->second), false};
      }
    }
    return {1.0, false};
  }

  /// w at magnitude x.
  double operator()(double x) const { return evaluate_checked(x).value; }

  /// log w(x), computed without forming w(x) where possible.
  double log_value(double x) const {
    switch (kind_) {
      case Kind::One:
        return 0.0;
      case Kind::Poly:
        return param_ * std::log1p(x);
      case Kind::Exp:
        return -param_ * x;
      case Kind::Product: {
        double s = 0;
        for (const auto& p : parts_) s += p.log_value(x);
        return s;
      }
      case Kind::Table:
        return std::log(evaluate_checked(x).value);
    }
    return 0.0;
  }

  friend bool operator==(const WeightFn& a, const WeightFn& b) {
    return a.kind_ == b.kind_ && a.param_ == b.param_ && a.parts_ == b.parts_ && a.table_ == b.table_;
  }

 private:
  explicit WeightFn(Kind k) : kind_(k) {}

  Kind kind_;
  double param_ = 0;
  std::vector<WeightFn> parts_;
  std::vector<std::pair<double, double>> table_;
};

inline double eval(const WeightFn& w, const SemigroupBasis& basis, const SemigroupElement& e) {
  return w(static_cast<double>(magnitude(basis, e)));
}

/// Sampled condition (a): w >= 1.
inline bool check_condition_a(const WeightFn& w, const std::vector<double>& magnitudes) {
  if (magnitudes.empty()) throw PreconditionError("check_condition_a needs samples");
  return std::all_of(magnitudes.begin(), magnitudes.end(), [&](double x) { return w(x) >= 1.0; });
}

struct ConditionBReport {
  bool passed = false;
  bool overflow = false;          // w(k lambda) itself is not representable
  double min_root = 0;
  std::vector<double> roots;      // w(k lambda)^(1/k), k = 1..K
};

/// Condition (b) through the infimum criterion inf_k w(k lambda)^(1/k) = 1,
/// sampled for k = 1..K: passes iff the smallest root is <= 1 + tol.
inline ConditionBReport check_condition_b(const WeightFn& w, double lambda_magnitude, int K,
                                          double tol) {
  if (K < 2) throw PreconditionError("check_condition_b needs K >= 2");
  ConditionBReport r;
  r.min_root = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= K; ++k) {
    const double x = k * lambda_magnitude;
    const double lw = w.log_value(x);
    if (!std::isfinite(std::exp(lw))) r.overflow = true;
    const double root = std::exp(lw / k);
    r.roots.push_back(root);
    r.min_root = std::min(r.min_root, root);
  }
  r.passed = std::isfinite(r.min_root) && r.min_root <= 1.0 + tol;
  return r;
}

/// w(x + y) <= w(x) w(y) on every pair, relative slack 1e-12.
inline bool check_submultiplicative(const WeightFn& w,
                                    const std::vector<std::pair<double, double>>& pairs) {
  constexpr double slack = 1e-12;
  return std::all_of(pairs.begin(), pairs.end(), [&](const auto& p) {
    const double lhs = w(p.first + p.second);
    const double rhs = w(p.first) * w(p.second);
    return lhs <= rhs * (1.0 + slack);
  });
}

struct GrowthReport {
  double sup = 0;           // sup over samples of w(x) exp(-theta x)
  double argsup = 0;
  bool unbounded_trend = false;  // the sup sits at the largest sample
};

inline GrowthReport check_growth_bound(const WeightFn& w, double theta,
                                       const std::vector<double>& magnitudes) {
  if (!(theta > 0)) throw PreconditionError("check_growth_bound needs theta > 0");
  if (magnitudes.empty()) throw PreconditionError("check_growth_bound needs samples");
  GrowthReport r;
  r.sup = -1;
  double largest = -std::numeric_limits<double>::infinity();
  for (double x : magnitudes) {
    const double v = std::exp(w.log_value(x) - theta * x);
    if (v > r.sup) {
      r.sup = v;
      r.argsup = x;
    }
    largest = std::max(largest, x);
  }
  r.unbounded_trend = magnitudes.size() > 1 && r.argsup == largest && r.sup > 1.0;
  return r;
}

}  // namespace forge

#endif  // FORGE_WEIGHTS_HPP
