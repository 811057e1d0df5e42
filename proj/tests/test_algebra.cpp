#include <gtest/gtest.h>

#include <random>

#include "forge/algebra.hpp"
#include "forge/characters.hpp"
#include "oracles.hpp"

using namespace forge;

namespace {

using ExactElem = AlgebraElement<ExactComplex>;
using FloatElem = AlgebraElement<Complex>;

/// Random sparse element over log N with support in 1..N, stored alongside
/// its dense integer-indexed coefficient table.
template <typename S>
std::pair<AlgebraElement<S>, std::vector<S>> random_dirichlet(std::mt19937_64& rng, const BasisPtr& L, int N,
                                                              int support) {
  std::vector<S> dense(N + 1, ScalarTraits<S>::zero());
  typename AlgebraElement<S>::Builder b(L);
  for (int j = 0; j < support; ++j) {
    const int n = 1 + static_cast<int>(rng() % N);
    S c;
    if constexpr (ScalarTraits<S>::exact)
      c = S{oracle::random_q(rng, -9, 9, 4), oracle::random_q(rng, -9, 9, 4)};
    else
      c = S(std::uniform_real_distribution<double>(-1, 1)(rng), std::uniform_real_distribution<double>(-1, 1)(rng));
    dense[n] = dense[n] + c;
    b.add(log_of(n), c);
  }
  return {std::move(b).build(), dense};
}

ExactComplex q(int n, int d = 1) { return ExactComplex{Rational(n, d)}; }

}  // namespace

TEST(Algebra, ConvolutionMatchesCauchyProduct) {
  auto N0 = SemigroupBasis::natural();
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    std::vector<ExactComplex> a(1 + rng() % 12), b(1 + rng() % 12);
    for (auto& c : a) c = ExactComplex{oracle::random_q(rng, -5, 5, 3), oracle::random_q(rng, -5, 5, 3)};
    for (auto& c : b) c = ExactComplex{oracle::random_q(rng, -5, 5, 3), oracle::random_q(rng, -5, 5, 3)};
    const auto c = convolve(ExactElem::from_sequence(N0, a), ExactElem::from_sequence(N0, b));
    const auto expected = oracle::cauchy(a, b, a.size() + b.size() - 1);
    for (std::size_t n = 0; n < expected.size(); ++n)
      ASSERT_EQ(c.coeff(SemigroupElement::generator(1, n)), expected[n]) << n;
  }
}

TEST(Algebra, ConvolutionMatchesDirichletProduct) {
  auto L = SemigroupBasis::log_primes(400);
  std::mt19937_64 rng(2);
  for (int t = 0; t < 40; ++t) {
    auto [a, da] = random_dirichlet<ExactComplex>(rng, L, 20, 8);
    auto [b, db] = random_dirichlet<ExactComplex>(rng, L, 20, 8);
    std::vector<ExactComplex> fa(401), fb(401);
    for (int n = 1; n <= 20; ++n) fa[n] = da[n], fb[n] = db[n];
    const auto expected = oracle::dirichlet(fa, fb);
    const auto c = convolve(a, b);
    for (int n = 1; n <= 400; ++n) ASSERT_EQ(c.coeff(log_of(n)), expected[n]) << n;
  }
}

TEST(Algebra, AssociativeCommutativeExact) {
  auto L = SemigroupBasis::log_primes(1000);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 60; ++t) {
    auto a = random_dirichlet<ExactComplex>(rng, L, 30, 10).first;
    auto b = random_dirichlet<ExactComplex>(rng, L, 30, 10).first;
    auto c = random_dirichlet<ExactComplex>(rng, L, 30, 10).first;
    EXPECT_EQ(convolve(a, b), convolve(b, a));
    EXPECT_EQ(convolve(convolve(a, b), c), convolve(a, convolve(b, c)));
    EXPECT_EQ(convolve(a, ExactElem::unit(L)), a);
  }
}

TEST(Algebra, AssociativeCommutativeFloat) {
  auto L = SemigroupBasis::log_primes(1000);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 40; ++t) {
    auto a = random_dirichlet<Complex>(rng, L, 30, 10).first;
    auto b = random_dirichlet<Complex>(rng, L, 30, 10).first;
    auto c = random_dirichlet<Complex>(rng, L, 30, 10).first;
    const auto lhs = convolve(convolve(a, b), c), rhs = convolve(a, convolve(b, c));
    EXPECT_LE(weighted_norm(subtract(lhs, rhs), WeightFn::one()), 1e-12 * (1 + weighted_norm(lhs, WeightFn::one())));
    EXPECT_LE(weighted_norm(subtract(convolve(a, b), convolve(b, a)), WeightFn::one()), 1e-12);
  }
}

TEST(Algebra, NormIsSubmultiplicative) {
  auto L = SemigroupBasis::log_primes(1000);
  std::mt19937_64 rng(5);
  for (const WeightFn& w : {WeightFn::one(), WeightFn::poly(2), WeightFn::poly(0.5)}) {
    for (int t = 0; t < 50; ++t) {
      auto a = random_dirichlet<Complex>(rng, L, 60, 10).first;
      auto b = random_dirichlet<Complex>(rng, L, 60, 10).first;
      const double lhs = weighted_norm(convolve(a, b), w);
      const double rhs = weighted_norm(a, w) * weighted_norm(b, w);
      EXPECT_LE(lhs, rhs * (1 + 1e-9));
    }
  }
}

TEST(Algebra, WeightedNormByHand) {
  auto N0 = SemigroupBasis::natural();
  const auto a = FloatElem::from_sequence(N0, {Complex(3, 4), 0.0, -2.0});
  EXPECT_DOUBLE_EQ(weighted_norm(a, WeightFn::one()), 7.0);
  EXPECT_DOUBLE_EQ(weighted_norm(a, WeightFn::poly(1)), 5.0 + 2.0 * 3.0);
}

TEST(Algebra, GeometricInverseExact) {
  auto N0 = SemigroupBasis::natural();
  const auto a = ExactElem::from_sequence(N0, {q(2), q(-1)});
  const auto inv = graded_invert(a, 64);
  for (int n = 0; n <= 64; ++n) {
    const Rational expected = Rational(1) / Rational(Integer(1) << (n + 1));
    ASSERT_EQ(inv.coeff(SemigroupElement::generator(1, n)), ExactComplex{expected}) << n;
  }
  EXPECT_EQ(inv.size(), 65u);
}

TEST(Algebra, GradedInverseRoundTripExact) {
  auto L = SemigroupBasis::log_primes(200);
  std::mt19937_64 rng(6);
  const double T = std::log(200.0);
  for (int t = 0; t < 20; ++t) {
    auto a = random_dirichlet<ExactComplex>(rng, L, 40, 6).first;
    a = add(a, ExactElem::unit(L));
    if (ScalarTraits<ExactComplex>::is_zero(a.constant_term())) continue;
    const auto b = graded_invert(a, T);
    const auto ab = convolve(a, b);
    for (int n = 1; n <= 200; ++n) ASSERT_EQ(ab.coeff(log_of(n)), n == 1 ? q(1) : q(0)) << n;
  }
}

TEST(Algebra, GradedInverseRoundTripFloat) {
  auto L = SemigroupBasis::log_primes(300);
  std::mt19937_64 rng(7);
  const double T = std::log(300.0);
  for (int t = 0; t < 20; ++t) {
    auto a = add(random_dirichlet<Complex>(rng, L, 50, 6).first, FloatElem::unit(L));
    const auto b = graded_invert(a, T);
    const auto ab = convolve(a, b);
    for (int n = 1; n <= 300; ++n)
      ASSERT_LT(std::abs(ab.coeff(log_of(n)) - Complex(n == 1 ? 1.0 : 0.0)), 1e-9) << n;
  }
}

TEST(Algebra, NeumannAgreesWithGraded) {
  auto L = SemigroupBasis::log_primes(500);
  std::mt19937_64 rng(8);
  const double T = std::log(500.0);
  for (int t = 0; t < 15; ++t) {
    auto rest = random_dirichlet<Complex>(rng, L, 40, 5).first;
    rest = subtract(rest, scale(FloatElem::unit(L), rest.constant_term()));
    const double n = weighted_norm(rest, WeightFn::one());
    if (n == 0) continue;
    // scale so that q = 0.6
    auto a = add(FloatElem::unit(L), scale(rest, Complex(0.6 / n, 0)));
    const auto nr = neumann_invert(a, WeightFn::one(), 1e-12, 10'000, T);
    EXPECT_NEAR(nr.certificate.q, 0.6, 1e-12);
    const auto g = graded_invert(a, T);
    EXPECT_LE(weighted_norm(subtract(nr.inverse, g), WeightFn::one()), 1e-12 + nr.certificate.tail_bound);
  }
}

TEST(Algebra, NeumannRefusesLargeQ) {
  auto N0 = SemigroupBasis::natural();
  const auto a = FloatElem::from_sequence(N0, {1.0, -1.0});
  try {
    neumann_invert(a, WeightFn::one(), 1e-12, 100);
    FAIL() << "expected a precondition error";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("neumann inapplicable"), std::string::npos);
  }
  EXPECT_THROW(graded_invert(FloatElem::from_sequence(N0, {0.0, 1.0}), 5), PreconditionError);
}

TEST(Algebra, InverseStaysInSubsemigroup) {
  // L = log of the odd integers; an element supported there inverts there
  auto L = SemigroupBasis::log_primes(2000);
  FloatElem::Builder b(L);
  b.add(log_of(1), 1.0).add(log_of(3), 0.3).add(log_of(15), -0.2).add(log_of(7), 0.1);
  const auto inv = graded_invert(std::move(b).build(), std::log(2000.0));
  for (const auto& [k, c] : inv.terms()) EXPECT_EQ(exp_of(k.element) % 2, 1u);
  EXPECT_GT(inv.size(), 10u);
}

TEST(Algebra, SeriesEvaluationMatchesDirectSum) {
  auto L = SemigroupBasis::log_primes(100);
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    auto [a, dense] = random_dirichlet<Complex>(rng, L, 100, 12);
    const Complex s(0.3 + 0.1 * t, -2.0 + 0.5 * t);
    Complex direct = 0;
    for (int n = 1; n <= 100; ++n) direct += dense[n] * std::exp(-s * std::log(double(n)));
    EXPECT_LT(std::abs(evaluate_series(a, {s}).value - direct), 1e-12);
  }
}

TEST(Algebra, SeriesTailBound) {
  auto N0 = SemigroupBasis::natural();
  const auto a = FloatElem::from_sequence(N0, {1.0, 0.5, 0.25, 0.125});
  const auto v = evaluate_series(a, {Complex(1, 0)}, WeightFn::one(), 2.0);
  ASSERT_TRUE(v.tail.has_value());
  EXPECT_NEAR(v.tail->bound, 0.375, 1e-15);
}

TEST(Algebra, WitnessOnPowerSeries) {
  auto N0 = SemigroupBasis::natural();
  const auto good = invertibility_witness(FloatElem::from_sequence(N0, {2.0, -1.0}));
  EXPECT_NEAR(good.min_modulus, 1.0, 1e-6);
  ASSERT_TRUE(good.disk.has_value());
  EXPECT_TRUE(good.disk->certified);
  EXPECT_GT(good.disk->lower_bound, 0.9);
  EXPECT_LE(good.disk->lower_bound, 1.0);
  const auto bad = invertibility_witness(FloatElem::from_sequence(N0, {1.0, -1.0}));
  EXPECT_LT(bad.min_modulus, 1e-6);
  EXPECT_FALSE(bad.disk->certified);
}

TEST(Algebra, ComposeExpOfDelta) {
  auto N0 = SemigroupBasis::natural();
  const auto d1 = FloatElem::delta(N0, SemigroupElement::generator(1));
  const auto c = compose_series(PowerSeries::exp(), d1, WeightFn::one(), 1e-12, 10'000, 20.0);
  for (int n = 0; n <= 20; ++n)
    EXPECT_NEAR(c.value.coeff(SemigroupElement::generator(1, n)).real(), 1.0 / oracle::factorial(n), 1e-12);
}

TEST(Algebra, ComposeInverseMatchesGraded) {
  auto N0 = SemigroupBasis::natural();
  const auto a = FloatElem::from_sequence(N0, {2.0, -1.0});
  const auto c = compose_series(PowerSeries::inverse(2.0), a, WeightFn::one(), 1e-13, 10'000, 64.0);
  const auto g = graded_invert(a, 64);
  EXPECT_LE(weighted_norm(subtract(c.value, g), WeightFn::one()), 1e-12);
  EXPECT_THROW(compose_series(PowerSeries::inverse(0.5), a, WeightFn::one(), 1e-12), PreconditionError);
}

TEST(Algebra, ComposeLogInvertsExp) {
  auto N0 = SemigroupBasis::natural();
  const auto a = FloatElem::from_sequence(N0, {0.0, 0.3, -0.1});
  const auto e = compose_series(PowerSeries::exp(), a, WeightFn::one(), 1e-14, 10'000, 30.0).value;
  const auto l = compose_series(PowerSeries::log(1.0), e, WeightFn::one(), 1e-14, 10'000, 30.0).value;
  for (int n = 0; n <= 20; ++n)
    EXPECT_LT(std::abs(l.coeff(SemigroupElement::generator(1, n)) - a.coeff(SemigroupElement::generator(1, n))), 1e-12);
}

TEST(Algebra, BasisMismatchIsRejected) {
  auto a = FloatElem::unit(SemigroupBasis::natural());
  auto b = FloatElem::unit(SemigroupBasis::log_primes(10));
  EXPECT_THROW(convolve(a, b), BasisMismatch);
}

// ---------------------------------------------------------------------------
// characters

TEST(Characters, ApplyIsMultiplicative) {
  auto L = SemigroupBasis::log_primes(300);
  std::mt19937_64 rng(10);
  std::map<int, Complex> vals;
  for (const auto& g : L->generators()) vals[g.id] = oracle::random_disk(rng);
  const Character psi = Character::from_values(L, vals);
  for (int t = 0; t < 200; ++t) {
    const std::uint64_t m = 1 + rng() % 300, n = 1 + rng() % 300;
    const Complex lhs = apply(psi, log_of(m * n));
    const Complex rhs = apply(psi, log_of(m)) * apply(psi, log_of(n));
    EXPECT_LT(std::abs(lhs - rhs), 1e-12);
  }
}

TEST(Characters, FunctionalMatchesOracleAndIsMultiplicative) {
  auto L = SemigroupBasis::log_primes(2000);
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    std::map<int, Complex> vals;
    for (const auto& g : L->generators()) vals[g.id] = oracle::random_disk(rng);
    const Character psi = Character::from_values(L, vals);
    auto [a, da] = random_dirichlet<Complex>(rng, L, 40, 8);
    auto b = random_dirichlet<Complex>(rng, L, 40, 8).first;
    Complex direct = 0;
    for (int n = 1; n <= 40; ++n) {
      Complex v = 1;
      for (auto [p, k] : oracle::factor(n)) v *= std::pow(vals.at(static_cast<int>(p)), static_cast<int>(k));
      direct += da[n] * v;
    }
    EXPECT_LT(std::abs(functional(psi, a) - direct), 1e-12);
    EXPECT_LE(std::abs(functional(psi, a)), weighted_norm(a, WeightFn::one()) * (1 + 1e-12));
    EXPECT_LT(std::abs(functional(psi, convolve(a, b)) - functional(psi, a) * functional(psi, b)), 1e-9);
  }
}

TEST(Characters, DeltaRecoversGeneratorValue) {
  auto L = SemigroupBasis::log_primes(30);
  std::map<int, Complex> vals;
  for (const auto& g : L->generators()) vals[g.id] = std::polar(0.5, double(g.id));
  const Character psi = Character::from_values(L, vals);
  for (const auto& g : L->generators())
    EXPECT_EQ(functional(psi, FloatElem::delta(L, SemigroupElement::generator(g.id))), vals[g.id]);
}

TEST(Characters, FromSEqualsSeriesExactly) {
  auto L = SemigroupBasis::log_primes(100);
  std::mt19937_64 rng(12);
  for (int t = 0; t < 20; ++t) {
    auto a = random_dirichlet<Complex>(rng, L, 100, 10).first;
    const Complex s(0.1 * t, 3.0 - 0.4 * t);
    const Character psi = Character::from_s(L, {s});
    EXPECT_EQ(functional(psi, a), evaluate_series(a, {s}).value);
  }
}

TEST(Characters, BoundednessChecks) {
  auto L = SemigroupBasis::log_primes(10);
  EXPECT_THROW(Character::from_values(L, {{2, 1.5}, {3, 0.1}, {5, 0.1}, {7, 0.1}}), PreconditionError);
  EXPECT_THROW(Character::from_values(L, {{2, 0.5}}), PreconditionError);
  EXPECT_THROW(Character::from_s(L, {Complex(-1, 0)}), PreconditionError);
  const Character psi = Character::from_values(L, {{2, 1.0}, {3, Complex(0, 1)}, {5, 0.0}, {7, 0.3}});
  std::vector<SemigroupElement> samples;
  for (int n = 1; n <= 200; ++n) {
    bool smooth = true;
    for (auto [p, k] : oracle::factor(n)) smooth = smooth && p <= 7;
    if (smooth) samples.push_back(log_of(n));
  }
  EXPECT_TRUE(is_w_bounded(psi, WeightFn::one(), samples));
}
