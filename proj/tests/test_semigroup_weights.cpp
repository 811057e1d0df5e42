#include <gtest/gtest.h>

#include <random>

#include "forge/semigroup.hpp"
#include "forge/weights.hpp"
#include "oracles.hpp"

using namespace forge;

namespace {

BasisPtr embedded_basis(const std::vector<RationalVector>& gens) {
  std::vector<Generator> gs;
  int id = 1;
  for (const auto& g : gens) {
    std::vector<Real> v;
    for (const auto& q : g) v.push_back(static_cast<Real>(to_double(q)));
    gs.push_back({id, v, g, "b" + std::to_string(id)});
    ++id;
  }
  return std::make_shared<const SemigroupBasis>(BasisMode::Embedded, gens.front().size(), gs);
}

/// Brute force: is there a nonzero integer vector c in [-10, 10]^n with sum c_i v_i = 0?
bool small_relation(const std::vector<RationalVector>& vs) {
  const int n = static_cast<int>(vs.size());
  std::vector<int> c(n, -10);
  while (true) {
    bool nonzero = false;
    RationalVector s(vs.front().size(), Rational(0));
    for (int i = 0; i < n; ++i) {
      if (c[i]) nonzero = true;
      for (std::size_t k = 0; k < s.size(); ++k) s[k] += Rational(c[i]) * vs[i][k];
    }
    if (nonzero && std::all_of(s.begin(), s.end(), [](const Rational& q) { return q == 0; })) return true;
    int i = 0;
    while (i < n && c[i] == 10) c[i++] = -10;
    if (i == n) return false;
    ++c[i];
  }
}

}  // namespace

TEST(Semigroup, LogOfFactorsIntegers) {
  for (std::uint64_t n = 1; n <= 2000; ++n) {
    const SemigroupElement e = log_of(n);
    std::uint64_t back = 1;
    for (const auto& [p, k] : e.exponents())
      for (std::uint64_t j = 0; j < k; ++j) back *= static_cast<std::uint64_t>(p);
    ASSERT_EQ(back, n);
    ASSERT_EQ(exp_of(e), n);
    const auto f = oracle::factor(n);
    ASSERT_EQ(e.exponents().size(), f.size());
  }
}

TEST(Semigroup, LogPrimesBasisMatchesPrimeList) {
  auto L = SemigroupBasis::log_primes(200);
  std::vector<int> expected;
  for (int n = 2; n <= 200; ++n)
    if (oracle::is_prime(n)) expected.push_back(n);
  ASSERT_EQ(L->generators().size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(L->generators()[i].id, expected[i]);
    EXPECT_NEAR(static_cast<double>(L->generator_magnitude(expected[i])), std::log(double(expected[i])), 1e-15);
  }
}

TEST(Semigroup, ElementAddIsAssociativeAndCommutative) {
  auto L = SemigroupBasis::log_primes(50);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(L->generators().size()) - 1), pw(0, 4);
  auto rnd = [&] {
    std::map<int, std::uint64_t> m;
    for (int k = 0; k < 4; ++k) m[L->generators()[pick(rng)].id] += pw(rng);
    return SemigroupElement::from_exponents(m);
  };
  for (int t = 0; t < 300; ++t) {
    auto a = rnd(), b = rnd(), c = rnd();
    EXPECT_EQ(element_add(*L, a, b), element_add(*L, b, a));
    EXPECT_EQ(element_add(*L, element_add(*L, a, b), c), element_add(*L, a, element_add(*L, b, c)));
    EXPECT_EQ(element_add(*L, a, SemigroupElement::zero(*L)), a);
  }
}

TEST(Semigroup, MembershipUniqueInFreeMode) {
  std::mt19937_64 rng(11);
  int checked = 0;
  while (checked < 100) {
    const std::size_t d = 1 + rng() % 3;
    std::vector<RationalVector> gens;
    for (std::size_t i = 0; i < d; ++i) {
      RationalVector g;
      for (std::size_t k = 0; k < d; ++k) g.push_back(oracle::random_q(rng, 0, 5, 3));
      gens.push_back(g);
    }
    if (oracle::rank(gens) != d) continue;
    bool positive = true;
    for (const auto& g : gens) positive = positive && !is_zero(g);
    if (!positive) continue;
    auto B = embedded_basis(gens);
    std::map<int, std::uint64_t> nu;
    RationalVector target(d, Rational(0));
    for (std::size_t i = 0; i < d; ++i) {
      const std::uint64_t k = rng() % 6;
      if (k) nu[static_cast<int>(i + 1)] = k;
      target = target + Rational(k) * gens[i];
    }
    auto got = membership(target, *B);
    ASSERT_TRUE(got.has_value());
    EXPECT_EQ(*got, nu);
    ++checked;
  }
}

TEST(Semigroup, MembershipRejectsNonMembers) {
  auto B = embedded_basis({{Rational(1), Rational(0)}, {Rational(0), Rational(1)}});
  EXPECT_FALSE(membership(RationalVector{Rational(1, 2), Rational(1)}, *B).has_value());
  EXPECT_TRUE(membership(RationalVector{Rational(3), Rational(1)}, *B).has_value());
}

TEST(Semigroup, IndependenceAgreesWithBruteForce) {
  std::mt19937_64 rng(3);
  int dependent = 0;
  for (int t = 0; t < 150; ++t) {
    std::vector<RationalVector> vs;
    for (int i = 0; i < 3; ++i) {
      RationalVector v;
      for (int k = 0; k < 3; ++k) v.push_back(Rational(static_cast<int>(rng() % 5) - 2));
      vs.push_back(v);
    }
    if (t % 3 == 0) vs[2] = Rational(static_cast<int>(rng() % 3) - 1) * vs[0] + Rational(static_cast<int>(rng() % 3) - 1) * vs[1];
    const bool indep = check_q_independence(vs);
    dependent += !indep;
    // small-entry 3x3 integer matrices: any relation has a small one by Cramer
    EXPECT_EQ(indep, !small_relation(vs)) << "trial " << t;
  }
  EXPECT_GT(dependent, 0);
}

TEST(Semigroup, FreeBasisRejectsDependentGenerators) {
  std::vector<Generator> gs{{1, {1.0}, RationalVector{Rational(1)}, "a"}, {2, {2.0}, RationalVector{Rational(2)}, "b"}};
  EXPECT_THROW(SemigroupBasis(BasisMode::Free, 1, gs), PreconditionError);
  EXPECT_NO_THROW(SemigroupBasis(BasisMode::Embedded, 1, gs));
}

TEST(Semigroup, RejectsNegativeGenerators) {
  std::vector<Generator> gs{{1, {-1.0}, RationalVector{Rational(-1)}, "a"}};
  EXPECT_THROW(SemigroupBasis(BasisMode::Embedded, 1, gs), PreconditionError);
}

TEST(Weights, PolyZeroEqualsOne) {
  const WeightFn p0 = WeightFn::poly(0), one = WeightFn::one();
  for (double x = 0; x < 50; x += 0.37) EXPECT_EQ(p0(x), one(x));
}

TEST(Weights, ClosedForms) {
  EXPECT_DOUBLE_EQ(WeightFn::poly(2)(3.0), 16.0);
  EXPECT_DOUBLE_EQ(WeightFn::exp(0.5)(2.0), std::exp(-1.0));
  EXPECT_DOUBLE_EQ(WeightFn::product({WeightFn::poly(1), WeightFn::exp(1)})(1.0), 2.0 * std::exp(-1.0));
  EXPECT_EQ(WeightFn::one()(0.0), 1.0);
}

TEST(Weights, EvaluationIsPure) {
  const WeightFn w = WeightFn::product({WeightFn::poly(1.5), WeightFn::exp(0.2)});
  for (double x = 0; x < 10; x += 0.5) EXPECT_EQ(w(x), w(x));
}

TEST(Weights, ConditionsOnAdmissibleKinds) {
  std::vector<double> samples;
  for (int i = 0; i <= 40; ++i) samples.push_back(0.5 * i);
  const WeightFn poly = WeightFn::poly(2), one = WeightFn::one();
  for (const WeightFn& w : {poly, one}) {
    EXPECT_TRUE(check_condition_a(w, samples));
    EXPECT_TRUE(check_condition_b(w, 1.0, 4000, 1e-2).passed);
  }
  // exp(-rho x) with rho < 0 grows exponentially and violates the root condition
  const auto b = check_condition_b(WeightFn::exp(-0.5), 1.0, 200, 1e-2);
  EXPECT_FALSE(b.passed);
  EXPECT_NEAR(b.min_root, std::exp(0.5), 1e-9);
}

TEST(Weights, ProductOfAdmissibleStaysAdmissible) {
  std::vector<double> samples;
  for (int i = 0; i <= 40; ++i) samples.push_back(0.5 * i);
  for (double c1 : {0.5, 1.0, 3.0})
    for (double c2 : {0.0, 2.0}) {
      const WeightFn a = WeightFn::poly(c1), b = WeightFn::poly(c2);
      const WeightFn ab = WeightFn::product({a, b});
      const bool both_a = check_condition_a(a, samples) && check_condition_a(b, samples);
      const bool both_b = check_condition_b(a, 1.0, 4000, 1e-2).passed && check_condition_b(b, 1.0, 4000, 1e-2).passed;
      if (both_a) EXPECT_TRUE(check_condition_a(ab, samples));
      // roots multiply at each k, so the product is held to (1 + tol)^2
      if (both_b) EXPECT_TRUE(check_condition_b(ab, 1.0, 4000, (1 + 1e-2) * (1 + 1e-2) - 1).passed);
    }
}

TEST(Weights, SubmultiplicativeSampler) {
  std::vector<std::pair<double, double>> pairs;
  for (double x = 0; x < 10; x += 0.5)
    for (double y = 0; y < 10; y += 0.5) pairs.emplace_back(x, y);
  EXPECT_TRUE(check_submultiplicative(WeightFn::poly(2), pairs));
  EXPECT_TRUE(check_submultiplicative(WeightFn::exp(1), pairs));
  // a table that grows too fast in the middle is not submultiplicative
  const WeightFn bad = WeightFn::table({{0, 1}, {1, 1}, {2, 10}, {4, 10}});
  EXPECT_FALSE(check_submultiplicative(bad, pairs));
}

TEST(Weights, GrowthBound) {
  std::vector<double> mags;
  for (int i = 0; i <= 200; ++i) mags.push_back(0.5 * i);
  const auto g = check_growth_bound(WeightFn::poly(2), 0.5, mags);
  EXPECT_FALSE(g.unbounded_trend);
  const auto h = check_growth_bound(WeightFn::exp(-1), 0.5, mags);
  EXPECT_TRUE(h.unbounded_trend);
}
