#include <gtest/gtest.h>

#include <cfloat>
#include <random>

#include "forge/density.hpp"
#include "instances.hpp"

using namespace forge;

TEST(Kronecker, SingleFrequencyIsExact) {
  const auto r = kronecker_t({{1.0}, {Complex(-1, 0)}, 1e-2, 10});
  EXPECT_TRUE(r.success);
  EXPECT_LT(r.max_error, 1e-15);
  const auto r2 = kronecker_t({{2.0}, {Complex(0, 1)}, 1e-2, 10});
  EXPECT_LT(std::abs(std::exp(Complex(0, -2.0 * r2.t)) - Complex(0, 1)), 1e-15);
}

TEST(Kronecker, ErrorsAreReevaluated) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> a(-M_PI, M_PI);
  for (int t = 0; t < 20; ++t) {
    const std::vector<Complex> z{std::polar(1.0, a(rng)), std::polar(1.0, a(rng))};
    const std::vector<double> b{std::log(2.0), std::log(3.0)};
    const auto r = kronecker_t({b, z, 1e-2, 1'000'000});
    double worst = 0;
    for (int k = 0; k < 2; ++k) {
      const double e = std::abs(std::exp(Complex(0, -b[k] * r.t)) - z[k]);
      EXPECT_NEAR(e, r.errors[k], 1e-9);
      worst = std::max(worst, e);
    }
    EXPECT_EQ(r.success, worst < 1e-2);
    EXPECT_TRUE(r.success);
  }
}

TEST(Kronecker, MoreBudgetNeverHurts) {
  const std::vector<double> b{std::log(2.0), std::log(3.0), std::log(5.0)};
  const std::vector<Complex> z{std::polar(1.0, 1.0), std::polar(1.0, -2.0), std::polar(1.0, 0.5)};
  double prev = std::numeric_limits<double>::infinity();
  for (std::uint64_t budget : {10u, 100u, 1000u, 10000u, 100000u}) {
    const auto r = kronecker_t({b, z, 1e-6, budget});
    EXPECT_LE(r.max_error, prev + 1e-15);
    prev = r.max_error;
  }
}

TEST(Density, DeltaOneIsSolvedInClosedForm) {
  auto N0 = SemigroupBasis::natural();
  const auto d1 = AlgebraElement<Complex>::delta(N0, SemigroupElement::generator(1));
  const Character psi = Character::from_values(N0, {{1, Complex(0.3, -0.4)}});
  const auto rep = approximate_functional(d1, psi);
  EXPECT_TRUE(rep.success);
  EXPECT_LT(rep.achieved_error, 1e-12);
  EXPECT_LT(std::abs(std::exp(-rep.s[0]) - Complex(0.3, -0.4)), 1e-12);
}

TEST(Density, ReportedErrorIsHonest) {
  auto L = SemigroupBasis::log_primes(30);
  std::mt19937_64 rng(2);
  for (int t = 0; t < 10; ++t) {
    const auto in = instances::random_density(rng, L);
    DensitySearchOptions opt;
    opt.seed = static_cast<std::uint64_t>(t);
    const auto rep = approximate_functional(in.a, in.psi, opt);
    // both sides round the phase t log n, an absolute error of about |t| log n eps per term
    double mass = 0;
    for (const auto& c : in.dense) mass += std::abs(c);
    const double tol = 1e-12 + 8 * DBL_EPSILON * (1 + std::abs(rep.s[0].imag()) * std::log(30.0)) * mass;
    EXPECT_NEAR(rep.achieved_error, instances::density_error(in, rep.s), tol);
    EXPECT_NEAR(std::abs(rep.value_at_s - evaluate_series(in.a, rep.s).value), 0.0, 1e-12);
    EXPECT_EQ(rep.success, rep.achieved_error < 3e-2);
  }
}

TEST(Density, MonotoneInBudgetAndDeterministic) {
  auto L = SemigroupBasis::log_primes(30);
  std::mt19937_64 rng(3);
  const auto in = instances::random_density(rng, L);
  double prev = std::numeric_limits<double>::infinity();
  for (std::uint64_t budget : {10u, 100u, 1000u, 100000u}) {
    DensitySearchOptions opt;
    opt.theta = 1e-4;
    opt.budget = budget;
    const auto a = approximate_functional(in.a, in.psi, opt);
    const auto b = approximate_functional(in.a, in.psi, opt);
    EXPECT_EQ(a.s, b.s);
    EXPECT_LE(a.achieved_error, prev + 1e-15);
    prev = a.achieved_error;
  }
}

TEST(Density, TinyBudgetIsFlaggedExhausted) {
  auto L = SemigroupBasis::log_primes(30);
  std::mt19937_64 rng(4);
  const auto in = instances::random_density(rng, L);
  DensitySearchOptions opt;
  opt.theta = 1e-9;
  opt.budget = 3;
  const auto rep = approximate_functional(in.a, in.psi, opt);
  EXPECT_FALSE(rep.success);
  EXPECT_TRUE(rep.exhausted);
  EXPECT_LE(rep.evaluations, 3u);
  // with room to converge the same instance succeeds and is not flagged
  opt.budget = 1000;
  const auto full = approximate_functional(in.a, in.psi, opt);
  EXPECT_EQ(full.exhausted, !full.success && full.evaluations >= 1000);
}
