#ifndef FORGE_ARITHMETIC_HPP
#define FORGE_ARITHMETIC_HPP

// Multiplicative functions on a free multiplicative semigroup generated by a
// prime system: prime-local Dirichlet convolution and inversion, Euler
// factors, partial-sum membership heuristics, and the decomposition
// a = (conv of local factors) * b * h with b completely multiplicative.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "forge/algebra.hpp"
#include "forge/error.hpp"
#include "forge/rational.hpp"
#include "forge/scalar.hpp"
#include "forge/semigroup.hpp"
#include "forge/weights.hpp"

namespace forge {

class PrimeSystem;
using PrimeSystemPtr = std::shared_ptr<const PrimeSystem>;

/// Ordered prime values > 1 together with a truncation x: only elements
/// n <= x are ever materialized.
class PrimeSystem {
 public:
  /// Rational primes 2, 3, 5, ... up to x.
  static PrimeSystemPtr rational(std::uint64_t x) {
    if (x < 1) throw PreconditionError("prime system needs x >= 1");
    auto s = std::shared_ptr<PrimeSystem>(new PrimeSystem());
    s->rational_ = true;
    s->x_ = static_cast<double>(x);
    s->ix_ = x;
    for (auto p : primes_up_to(x)) {
      s->int_primes_.push_back(p);
      s->primes_.push_back(static_cast<double>(p));
      unsigned k = 0;
      for (std::uint64_t v = p; v <= x; v *= p) {
        ++k;
        if (v > x / p) break;
      }
      s->max_exp_.push_back(k);
    }
    return s;
  }

  /// Generalized (Beurling) primes; values above x are dropped.
  static PrimeSystemPtr beurling(std::vector<double> primes, double x) {
    if (!(x >= 1)) throw PreconditionError("prime system needs x >= 1");
    for (std::size_t i = 0; i < primes.size(); ++i) {
      if (!(primes[i] > 1)) throw PreconditionError("generalized primes must exceed 1");
      if (i > 0 && !(primes[i] > primes[i - 1]))
        throw PreconditionError("generalized primes must be strictly increasing");
    }
    auto s = std::shared_ptr<PrimeSystem>(new PrimeSystem());
    s->x_ = x;
    for (double p : primes) {
      if (p > x) break;
      s->primes_.push_back(p);
      unsigned k = 0;
      for (double v = p; v <= x; v *= p) ++k;
      s->max_exp_.push_back(k);
    }
    return s;
  }

  bool is_rational() const { return rational_; }
  double x() const { return x_; }
  /// Integer truncation (rational systems only).
  std::uint64_t integer_x() const {
    require_rational();
    return ix_;
  }
  std::size_t size() const { return primes_.size(); }
  double prime(std::size_t i) const { return primes_.at(i); }
  std::uint64_t integer_prime(std::size_t i) const {
    require_rational();
    return int_primes_.at(i);
  }
  const std::vector<double>& primes() const { return primes_; }
  /// Largest k with p_i^k <= x.
  unsigned max_exponent(std::size_t i) const { return max_exp_.at(i); }

  std::optional<std::size_t> index_of(double p) const {
    auto it = std::lower_bound(primes_.begin(), primes_.end(), p);
    if (it == primes_.end() || *it != p) return std::nullopt;
    return static_cast<std::size_t>(it - primes_.begin());
  }

  friend bool operator==(const PrimeSystem& a, const PrimeSystem& b) {
    return a.rational_ == b.rational_ && a.x_ == b.x_ && a.primes_ == b.primes_;
  }

  void require_rational() const {
    if (!rational_) throw PreconditionError("operation needs the rational prime system");
  }

 private:
  PrimeSystem() = default;
  bool rational_ = false;
  double x_ = 1;
  std::uint64_t ix_ = 1;
  std::vector<double> primes_;
  std::vector<std::uint64_t> int_primes_;
  std::vector<unsigned> max_exp_;
};

inline void require_same_system(const PrimeSystemPtr& a, const PrimeSystemPtr& b) {
  if (a != b && !(*a == *b)) throw BasisMismatch("prime systems differ");
}

/// An element n <= x of the generated semigroup, as (prime index, exponent) pairs.
struct ArithmeticElement {
  double value = 1;
  std::vector<std::pair<std::size_t, unsigned>> factors;
};

/// All elements n <= x, ordered by value then factorization. Exponential in
/// nothing but the output size.
inline std::vector<ArithmeticElement> elements_up_to(const PrimeSystem& sys) {
  std::vector<ArithmeticElement> out;
  ArithmeticElement cur;
  std::function<void(std::size_t)> dfs = [&](std::size_t start) {
    out.push_back(cur);
    for (std::size_t i = start; i < sys.size(); ++i) {
      const double p = sys.prime(i);
      if (cur.value * p > sys.x()) break;
      const double saved = cur.value;
      for (unsigned k = 1; k <= sys.max_exponent(i) && cur.value * p <= sys.x(); ++k) {
        cur.value *= p;
        cur.factors.emplace_back(i, k);
        dfs(i + 1);
        cur.factors.pop_back();
      }
      cur.value = saved;
    }
  };
  dfs(0);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.value < b.value || (a.value == b.value && a.factors < b.factors);
  });
  return out;
}

namespace detail {

template <typename S>
bool scalar_close(const S& a, const S& b) {
  if constexpr (ScalarTraits<S>::exact) {
    return a == b;
  } else {
    return std::abs(a - b) <= 1e-12 * (1 + std::abs(a));
  }
}

inline double omega_at(const WeightFn& w, double log_n) { return w(log_n); }

inline std::string format_prime(const PrimeSystem& sys, std::size_t i) {
  if (sys.is_rational()) return std::to_string(sys.integer_prime(i));
  std::ostringstream os;
  os.precision(17);
  os << sys.prime(i);
  return os.str();
}

}  // namespace detail

/// Multiplicative f with f(1) = 1, stored by its prime-power values
/// f(p_i^k) for p_i^k <= x. An optional rule supplies values beyond x
/// (used by Euler factors with large kmax).
template <typename S = Rational>
class MultiplicativeFunction {
 public:
  using Rule = std::function<S(std::size_t index, unsigned k)>;

  MultiplicativeFunction(PrimeSystemPtr sys, std::vector<std::vector<S>> local, Rule rule = {})
      : sys_(std::move(sys)), local_(std::move(local)), rule_(std::move(rule)) {
    if (!sys_) throw PreconditionError("multiplicative function needs a prime system");
    if (local_.size() != sys_->size()) throw DimensionMismatch("one local sequence per prime required");
    for (std::size_t i = 0; i < local_.size(); ++i) {
      if (local_[i].size() != sys_->max_exponent(i) + 1)
        throw DimensionMismatch("local sequence length must be max exponent + 1");
      local_[i][0] = ScalarTraits<S>::one();
    }
  }

  static MultiplicativeFunction from_rule(PrimeSystemPtr sys, Rule rule) {
    std::vector<std::vector<S>> local(sys->size());
    for (std::size_t i = 0; i < sys->size(); ++i) {
      local[i].resize(sys->max_exponent(i) + 1);
      for (unsigned k = 1; k < local[i].size(); ++k) local[i][k] = rule(i, k);
    }
    return MultiplicativeFunction(std::move(sys), std::move(local), std::move(rule));
  }

  static MultiplicativeFunction one(PrimeSystemPtr sys) {
    return from_rule(std::move(sys), [](std::size_t, unsigned) { return ScalarTraits<S>::one(); });
  }
  static MultiplicativeFunction epsilon(PrimeSystemPtr sys) {
    return from_rule(std::move(sys), [](std::size_t, unsigned) { return ScalarTraits<S>::zero(); });
  }
  static MultiplicativeFunction mobius(PrimeSystemPtr sys) {
    return from_rule(std::move(sys), [](std::size_t, unsigned k) {
      return k == 1 ? S(ScalarTraits<S>::zero() - ScalarTraits<S>::one()) : ScalarTraits<S>::zero();
    });
  }
  /// f(p^k) = f(p)^k.
  static MultiplicativeFunction completely_multiplicative(PrimeSystemPtr sys,
                                                          std::function<S(std::size_t)> at_prime) {
    return from_rule(std::move(sys), [at_prime](std::size_t i, unsigned k) {
      const S v = at_prime(i);
      S r = ScalarTraits<S>::one();
      for (unsigned j = 0; j < k; ++j) r = r * v;
      return r;
    });
  }

  const PrimeSystemPtr& system() const { return sys_; }
  const std::vector<std::vector<S>>& local() const { return local_; }
  bool has_rule() const { return static_cast<bool>(rule_); }

  /// f(p_i^k) for p_i^k <= x.
  const S& local(std::size_t i, unsigned k) const {
    const auto& v = local_.at(i);
    if (k >= v.size()) throw PreconditionError("prime power beyond truncation");
    return v[k];
  }

  /// f(p_i^k) for any k, using the rule beyond x.
  S local_extended(std::size_t i, unsigned k) const {
    if (k < local_.at(i).size()) return local_[i][k];
    if (!rule_) throw PreconditionError("prime power beyond truncation and no rule available");
    return rule_(i, k);
  }

  /// f at a factored element.
  S at(const ArithmeticElement& e) const {
    S r = ScalarTraits<S>::one();
    for (const auto& [i, k] : e.factors) r = r * local(i, k);
    return r;
  }

  /// f(n) for an integer n <= x (rational systems).
  S at(std::uint64_t n) const {
    sys_->require_rational();
    if (n < 1 || n > sys_->integer_x()) throw PreconditionError("argument outside 1..x");
    S r = ScalarTraits<S>::one();
    for (std::size_t i = 0; i < sys_->size() && n > 1; ++i) {
      const std::uint64_t p = sys_->integer_prime(i);
      if (p * p > n) {
        r = r * local(*sys_->index_of(static_cast<double>(n)), 1);
        n = 1;
        break;
      }
      unsigned k = 0;
      while (n % p == 0) n /= p, ++k;
      if (k > 0) r = r * local(i, k);
    }
    return r;
  }

  /// Values f(0..x) with f(0) = 0 (rational systems), via a smallest prime
  /// factor sieve in increasing n.
  std::vector<S> materialize() const {
    sys_->require_rational();
    const std::uint64_t x = sys_->integer_x();
    constexpr auto unset = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> spf(x + 1, unset);
    for (std::size_t i = 0; i < sys_->size(); ++i) {
      const std::uint64_t p = sys_->integer_prime(i);
      for (std::uint64_t m = p; m <= x; m += p)
        if (spf[m] == unset) spf[m] = static_cast<std::uint32_t>(i);
    }
    std::vector<S> out(x + 1, ScalarTraits<S>::zero());
    if (x >= 1) out[1] = ScalarTraits<S>::one();
    for (std::uint64_t n = 2; n <= x; ++n) {
      const std::size_t i = spf[n];
      const std::uint64_t p = sys_->integer_prime(i);
      std::uint64_t m = n;
      unsigned k = 0;
      while (m % p == 0) m /= p, ++k;
      out[n] = local(i, k) * out[m];
    }
    return out;
  }

 private:
  PrimeSystemPtr sys_;
  std::vector<std::vector<S>> local_;
  Rule rule_;
};

/// (f * g)(p^k) = sum_{j <= k} f(p^j) g(p^{k-j}), prime by prime.
template <typename S>
MultiplicativeFunction<S> dirichlet_convolve(const MultiplicativeFunction<S>& f,
                                             const MultiplicativeFunction<S>& g) {
  require_same_system(f.system(), g.system());
  std::vector<std::vector<S>> local(f.local().size());
  for (std::size_t i = 0; i < local.size(); ++i) {
    const auto& a = f.local()[i];
    const auto& b = g.local()[i];
    local[i].assign(a.size(), ScalarTraits<S>::zero());
    for (std::size_t k = 0; k < a.size(); ++k)
      for (std::size_t j = 0; j <= k; ++j) local[i][k] = local[i][k] + a[j] * b[k - j];
  }
  return MultiplicativeFunction<S>(f.system(), std::move(local));
}

/// Pointwise product (f g)(n) = f(n) g(n); multiplicative again.
template <typename S>
MultiplicativeFunction<S> pointwise_product(const MultiplicativeFunction<S>& f,
                                            const MultiplicativeFunction<S>& g) {
  require_same_system(f.system(), g.system());
  std::vector<std::vector<S>> local(f.local().size());
  for (std::size_t i = 0; i < local.size(); ++i) {
    local[i].resize(f.local()[i].size());
    for (std::size_t k = 0; k < local[i].size(); ++k) local[i][k] = f.local()[i][k] * g.local()[i][k];
  }
  return MultiplicativeFunction<S>(f.system(), std::move(local));
}

/// Formal inverse: g(p^k) = -sum_{j=1..k} f(p^j) g(p^{k-j}) per prime.
template <typename S>
MultiplicativeFunction<S> invert_multiplicative(const MultiplicativeFunction<S>& f) {
  std::vector<std::vector<S>> local(f.local().size());
  for (std::size_t i = 0; i < local.size(); ++i) {
    const auto& a = f.local()[i];
    auto& g = local[i];
    g.assign(a.size(), ScalarTraits<S>::zero());
    g[0] = ScalarTraits<S>::one();
    for (std::size_t k = 1; k < a.size(); ++k) {
      S acc = ScalarTraits<S>::zero();
      for (std::size_t j = 1; j <= k; ++j) acc = acc + a[j] * g[k - j];
      g[k] = ScalarTraits<S>::zero() - acc;
    }
  }
  return MultiplicativeFunction<S>(f.system(), std::move(local));
}

struct LocalInvertibility {
  double prime = 0;
  double lower_bound = 0;   // rigorous lower bound of |local factor| on the closed disk
  std::string method;       // "dominant-constant" or "disk-grid"
  bool certified = false;
};

struct InvertibilityCertificate {
  std::vector<LocalInvertibility> primes;
  std::vector<double> uncertified;  // primes where no positive lower bound was found
  bool all_certified() const { return uncertified.empty(); }
};

/// Certifies that each truncated local factor sum_k f(p^k) z^k (z = p^{-s},
/// |z| <= 1 on the closed half-plane) has no zero on the closed unit disk.
/// Uses 1 - sum_{k>=1} |f(p^k)| when positive, else a polar-grid disk bound.
template <typename S>
InvertibilityCertificate certify_local_invertibility(const MultiplicativeFunction<S>& f, int radial = 64,
                                                     int angular = 512) {
  InvertibilityCertificate cert;
  for (std::size_t i = 0; i < f.local().size(); ++i) {
    const auto& a = f.local()[i];
    LocalInvertibility li;
    li.prime = f.system()->prime(i);
    double rest = 0;
    for (std::size_t k = 1; k < a.size(); ++k) rest += ScalarTraits<S>::abs(a[k]);
    if (rest < 1) {
      li.lower_bound = 1 - rest;
      li.method = "dominant-constant";
      li.certified = true;
    } else {
      std::vector<std::pair<std::uint64_t, Complex>> coeffs;
      for (std::size_t k = 0; k < a.size(); ++k)
        if (!ScalarTraits<S>::is_zero(a[k])) coeffs.emplace_back(k, ScalarTraits<S>::to_complex(a[k]));
      const auto d = disk_certificate(coeffs, radial, angular);
      li.method = "disk-grid";
      li.lower_bound = d.lower_bound;
      li.certified = d.certified;
    }
    if (!li.certified) cert.uncertified.push_back(li.prime);
    cert.primes.push_back(li);
  }
  return cert;
}

/// 1 + sum_{k <= kmax} f(p^k) p^{-ks}.
template <typename S>
Complex euler_factor(const MultiplicativeFunction<S>& f, double p, Complex s, unsigned kmax) {
  const auto idx = f.system()->index_of(p);
  if (!idx) throw PreconditionError("euler_factor: not a prime of the system");
  const Complex z = std::exp(-s * std::log(p));
  Complex acc(1.0, 0.0), zk(1.0, 0.0);
  for (unsigned k = 1; k <= kmax; ++k) {
    zk *= z;
    const S v = f.local_extended(*idx, k);
    if (ScalarTraits<S>::is_zero(v)) continue;
    acc += ScalarTraits<S>::to_complex(v) * zk;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Partial-sum heuristics

enum class Trend { Convergent, Inconclusive };

inline std::string to_string(Trend t) {
  return t == Trend::Convergent ? "convergent-trend" : "inconclusive/divergent-trend";
}

/// Doubling-window heuristic: the increment over (x/2, x] against the one over
/// (x/4, x/2]. A ratio below 3/4 suggests convergence. Never a proof.
inline Trend doubling_trend(double previous_window, double last_window) {
  if (last_window == 0) return Trend::Convergent;
  if (previous_window == 0) return Trend::Inconclusive;
  return last_window / previous_window < 0.75 ? Trend::Convergent : Trend::Inconclusive;
}

struct WindowedSum {
  double total = 0;
  double previous_window = 0;  // (x/4, x/2]
  double last_window = 0;      // (x/2, x]
  void add(double n, double x, double v) {
    total += v;
    if (n > x / 2)
      last_window += v;
    else if (n > x / 4)
      previous_window += v;
  }
  Trend trend() const { return doubling_trend(previous_window, last_window); }
};

struct GOmegaReport {
  double x = 0;
  double sum_sq = 0;  // sum_{p <= x} |f(p)|^2 w(p)^2
  double sum_hi = 0;  // sum_{p^k <= x, k >= 2} |f(p^k)| w(p^k)
  Trend trend_sq = Trend::Inconclusive;
  Trend trend_hi = Trend::Inconclusive;
};

/// Partial sums of the two series defining the class G_w, with heuristic
/// trend flags. Weights are evaluated at log n.
template <typename S>
GOmegaReport g_omega_membership(const MultiplicativeFunction<S>& f, const WeightFn& w,
                                std::optional<double> x = std::nullopt) {
  const auto& sys = *f.system();
  const double X = x.value_or(sys.x());
  if (X > sys.x()) throw PreconditionError("x exceeds the truncation of the prime system");
  WindowedSum sq, hi;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const double p = sys.prime(i);
    if (p > X) break;
    const double lp = std::log(p);
    const double ap = ScalarTraits<S>::abs(f.local(i, 1)) * detail::omega_at(w, lp);
    sq.add(p, X, ap * ap);
    double pk = p;
    for (unsigned k = 2; k <= sys.max_exponent(i); ++k) {
      pk *= p;
      if (pk > X) break;
      hi.add(pk, X, ScalarTraits<S>::abs(f.local(i, k)) * detail::omega_at(w, k * lp));
    }
  }
  return {X, sq.total, hi.total, sq.trend(), hi.trend()};
}

// ---------------------------------------------------------------------------
// Decomposition a = (conv_{p <= p0} a_p) * b * h

struct P3Certificate {
  double max_prime_weight = 0;   // sup_{p > p0} |a(p)| w(p)
  double hi_sum = 0;             // sum_{p > p0, k >= 2} |h(p^k)| w(p^k)
  bool h_vanishes_at_primes = false;
  bool b_agrees_at_primes = false;  // b(p) = a(p) for p > p0
  bool reconstruction_exact = false;
  bool b_inverse_is_mu_b = false;
  double sigma = 0;              // sum_{p^k <= x, k >= 2} |h^{-1}(p^k)| w(p^k)
  bool sigma_at_most_one = false;
  std::uint64_t checked_elements = 0;
  bool truncation_limited = true;  // tails beyond x are never certified
};

template <typename S>
struct P3Decomposition {
  double p0 = 1;
  std::vector<double> local_primes;                     // primes p <= p0
  std::vector<MultiplicativeFunction<S>> local_factors;  // a_p, one per local prime
  MultiplicativeFunction<S> b;
  MultiplicativeFunction<S> h;
  MultiplicativeFunction<S> h_inverse;
  P3Certificate certificate;
};

/// Chooses the smallest p0 (1 or a prime) such that |a(p)| w(p) <= 1/2 for all
/// primes p0 < p <= x and the tail sum of |h(p^k)| w(p^k) over p > p0 is at
/// most 1/2, requiring p0 <= x/2 so that the estimates rest on data. Then
/// builds the components and verifies every identity on n <= x.
template <typename S>
P3Decomposition<S> decompose_P3(const MultiplicativeFunction<S>& a, const WeightFn& w) {
  const auto& sysp = a.system();
  const auto& sys = *sysp;
  const std::size_t m = sys.size();
  const S zero = ScalarTraits<S>::zero();
  const S one = ScalarTraits<S>::one();

  auto h_local = [&](std::size_t i, unsigned k) -> S {
    return a.local(i, k) - a.local(i, k - 1) * a.local(i, 1);
  };

  // prime weights and per-prime h masses
  std::vector<double> prime_weight(m), h_mass(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double lp = std::log(sys.prime(i));
    prime_weight[i] = ScalarTraits<S>::abs(a.local(i, 1)) * detail::omega_at(w, lp);
    for (unsigned k = 2; k <= sys.max_exponent(i); ++k)
      h_mass[i] += ScalarTraits<S>::abs(h_local(i, k)) * detail::omega_at(w, k * lp);
  }
  // cut = number of local primes; p0 = 1 if cut == 0 else prime(cut - 1)
  std::size_t cut_a = 0;
  for (std::size_t i = m; i-- > 0;)
    if (prime_weight[i] > 0.5) {
      cut_a = i + 1;
      break;
    }
  std::vector<double> suffix(m + 1, 0.0);
  for (std::size_t i = m; i-- > 0;) suffix[i] = suffix[i + 1] + h_mass[i];
  std::size_t cut_h = 0;
  while (cut_h < m && suffix[cut_h] > 0.5) ++cut_h;
  const std::size_t cut = std::max(cut_a, cut_h);
  const double p0 = cut == 0 ? 1.0 : sys.prime(cut - 1);
  if (p0 > sys.x() / 2) {
    const std::size_t blocking = cut == cut_a ? cut_a - 1 : cut_h - 1;
    const std::string which = cut == cut_a ? "|a(p)| w(p) > 1/2" : "tail sum of |h(p^k)| w(p^k) > 1/2";
    throw PreconditionError("estimates unachievable within x: " + which + " at p = " +
                            detail::format_prime(sys, blocking));
  }

  P3Decomposition<S> out{p0, {}, {}, MultiplicativeFunction<S>::epsilon(sysp),
                         MultiplicativeFunction<S>::epsilon(sysp), MultiplicativeFunction<S>::epsilon(sysp),
                         {}};
  std::vector<std::vector<S>> bl(m), hl(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t len = sys.max_exponent(i) + 1;
    bl[i].assign(len, zero);
    hl[i].assign(len, zero);
    bl[i][0] = hl[i][0] = one;
    if (i < cut) {
      std::vector<std::vector<S>> loc(m);
      for (std::size_t j = 0; j < m; ++j) loc[j].assign(sys.max_exponent(j) + 1, zero);
      loc[i] = a.local()[i];
      out.local_primes.push_back(sys.prime(i));
      out.local_factors.emplace_back(sysp, std::move(loc));
      continue;
    }
    for (std::size_t k = 1; k < len; ++k) {
      bl[i][k] = bl[i][k - 1] * a.local(i, 1);
      hl[i][k] = h_local(i, static_cast<unsigned>(k));
    }
  }
  out.b = MultiplicativeFunction<S>(sysp, std::move(bl));
  out.h = MultiplicativeFunction<S>(sysp, std::move(hl));
  out.h_inverse = invert_multiplicative(out.h);

  auto& c = out.certificate;
  for (std::size_t i = cut; i < m; ++i) {
    c.max_prime_weight = std::max(c.max_prime_weight, prime_weight[i]);
    c.hi_sum += h_mass[i];
  }
  c.h_vanishes_at_primes = true;
  c.b_agrees_at_primes = true;
  for (std::size_t i = 0; i < m; ++i) {
    if (sys.max_exponent(i) < 1) continue;
    if (!ScalarTraits<S>::is_zero(out.h.local(i, 1))) c.h_vanishes_at_primes = false;
    if (i >= cut && !detail::scalar_close(out.b.local(i, 1), a.local(i, 1))) c.b_agrees_at_primes = false;
  }

  // reconstruction, checked on every element n <= x
  MultiplicativeFunction<S> rec = dirichlet_convolve(out.b, out.h);
  for (const auto& ap : out.local_factors) rec = dirichlet_convolve(rec, ap);
  c.reconstruction_exact = true;
  if (sys.is_rational()) {
    const auto lhs = rec.materialize();
    const auto rhs = a.materialize();
    for (std::size_t n = 1; n < lhs.size(); ++n)
      if (!detail::scalar_close(lhs[n], rhs[n])) c.reconstruction_exact = false;
    c.checked_elements = lhs.size() - 1;
  } else {
    const auto els = elements_up_to(sys);
    for (const auto& e : els)
      if (!detail::scalar_close(rec.at(e), a.at(e))) c.reconstruction_exact = false;
    c.checked_elements = els.size();
  }

  // b^{-1} = mu b
  const auto binv = invert_multiplicative(out.b);
  const auto mub = pointwise_product(MultiplicativeFunction<S>::mobius(sysp), out.b);
  c.b_inverse_is_mu_b = true;
  for (std::size_t i = 0; i < m; ++i)
    for (unsigned k = 0; k <= sys.max_exponent(i); ++k)
      if (!detail::scalar_close(binv.local(i, k), mub.local(i, k))) c.b_inverse_is_mu_b = false;

  for (std::size_t i = 0; i < m; ++i) {
    const double lp = std::log(sys.prime(i));
    for (unsigned k = 2; k <= sys.max_exponent(i); ++k)
      c.sigma += ScalarTraits<S>::abs(out.h_inverse.local(i, k)) * detail::omega_at(w, k * lp);
  }
  c.sigma_at_most_one = c.sigma <= 1;
  return out;
}

// ---------------------------------------------------------------------------

template <typename S>
struct OmegaRelatedReport {
  MultiplicativeFunction<S> h;  // a * b^{-1}
  double partial_norm = 0;      // sum_{n <= x} |h(n)| w(n)
  Trend trend = Trend::Inconclusive;
};

/// h = a * b^{-1} on n <= x with its partial weighted norm and trend flag.
template <typename S>
OmegaRelatedReport<S> omega_related(const MultiplicativeFunction<S>& a, const MultiplicativeFunction<S>& b,
                                    const WeightFn& w) {
  require_same_system(a.system(), b.system());
  OmegaRelatedReport<S> rep{dirichlet_convolve(a, invert_multiplicative(b)), 0, Trend::Inconclusive};
  const auto& sys = *a.system();
  WindowedSum sum;
  if (sys.is_rational()) {
    const auto vals = rep.h.materialize();
    for (std::size_t n = 1; n < vals.size(); ++n) {
      if (ScalarTraits<S>::is_zero(vals[n])) continue;
      const double nd = static_cast<double>(n);
      sum.add(nd, sys.x(), ScalarTraits<S>::abs(vals[n]) * detail::omega_at(w, std::log(nd)));
    }
  } else {
    for (const auto& e : elements_up_to(sys)) {
      const S v = rep.h.at(e);
      if (ScalarTraits<S>::is_zero(v)) continue;
      sum.add(e.value, sys.x(), ScalarTraits<S>::abs(v) * detail::omega_at(w, std::log(e.value)));
    }
  }
  rep.partial_norm = sum.total;
  rep.trend = sum.trend();
  return rep;
}

}  // namespace forge

#endif  // FORGE_ARITHMETIC_HPP
