#include <gtest/gtest.h>

#include <random>

#include "forge/extension.hpp"
#include "instances.hpp"
#include "oracles.hpp"

using namespace forge;

namespace {

RationalVector V(std::initializer_list<int> l) {
  RationalVector v;
  for (int x : l) v.push_back(Rational(x));
  return v;
}

}  // namespace

TEST(Extension, OneDimensionalExample) {
  // Gamma = {1, 2}, psi = (1/2, 1/4): phi(1) = 1/2 on B = {1}
  const auto r = extend_character({{V({1}), V({2})}, {0.5, 0.25}});
  ASSERT_EQ(r.basis.size(), 1u);
  EXPECT_LT(r.max_error, 1e-12);
  std::mt19937_64 rng(0);
  const auto c = instances::check_extension({{V({1}), V({2})}, {0.5, 0.25}}, r, rng);
  EXPECT_TRUE(c.independent && c.gamma_in_span && c.bounded) << c.failure;
  EXPECT_LT(c.max_error, 1e-12);
}

TEST(Extension, FractionalBasisNeeded) {
  // Gamma = {1, 1/2}: the output basis must reach 1/2
  const CharacterExtensionProblem p{{V({1}), {Rational(1, 2)}}, {0.25, 0.5}};
  const auto r = extend_character(p);
  std::mt19937_64 rng(0);
  const auto c = instances::check_extension(p, r, rng);
  EXPECT_TRUE(c.independent && c.gamma_in_span && c.bounded) << c.failure;
  EXPECT_LT(c.max_error, 1e-12);
}

TEST(Extension, ZeroSetGetsSeparated) {
  // psi vanishes on Gamma: every generator hit by the zero set is mapped to 0
  const CharacterExtensionProblem p{{V({1, 0}), V({0, 1})}, {0.5, 0.0}};
  const auto r = extend_character(p);
  EXPECT_EQ(r.zero_set, (std::vector<std::size_t>{1}));
  std::mt19937_64 rng(0);
  const auto c = instances::check_extension(p, r, rng);
  EXPECT_TRUE(c.independent && c.gamma_in_span && c.bounded) << c.failure;
  EXPECT_LT(c.max_error, 1e-12);
}

TEST(Extension, PhasesOnNonSpanningLattice) {
  const CharacterExtensionProblem p{{V({2, 0}), V({0, 3}), V({1, 1})},
                                    {std::polar(1.0, 5.0), std::polar(1.0, 2.0), std::polar(1.0, 2.5 + 2.0 / 3)}};
  const auto r = extend_character(p);
  EXPECT_TRUE(r.phases_exact);
  std::mt19937_64 rng(0);
  const auto c = instances::check_extension(p, r, rng);
  EXPECT_TRUE(c.independent && c.gamma_in_span && c.bounded) << c.failure;
  EXPECT_LT(c.max_error, 1e-9);
}

TEST(Extension, UnimodularValuesWithRoundedModuli) {
  // psi(1, 0) and psi(0, 1) have modulus 1 only up to rounding; the implied
  // value on (2, 3) must still be unimodular, not certified as decaying
  const double a = 0.7, b = -2.1;
  const Complex u = std::polar(1.0, a), v = std::polar(1.0, b);
  const CharacterExtensionProblem p{{V({1, 0}), V({0, 1}), V({2, 3}), V({1, 1})}, {u, v, u * u * v * v * v, u * v}};
  const auto r = extend_character(p);
  std::mt19937_64 rng(0);
  const auto c = instances::check_extension(p, r, rng);
  EXPECT_TRUE(c.independent && c.gamma_in_span && c.bounded) << c.failure;
  EXPECT_LT(c.max_error, 1e-12);
}

TEST(Extension, RejectsInconsistentInputs) {
  // psi(2) must be psi(1)^2 in modulus
  EXPECT_THROW(extend_character({{V({1}), V({2})}, {0.5, 0.5}}), PreconditionError);
  // unbounded
  EXPECT_THROW(extend_character({{V({1})}, {1.5}}), PreconditionError);
  // 0 in conv(Gamma)
  EXPECT_THROW(extend_character({{V({1}), V({-1})}, {0.5, 0.5}}), PreconditionError);
  // psi(1) = 0 but psi(2) != 0
  EXPECT_THROW(extend_character({{V({1}), V({2})}, {0.0, 0.5}}), PreconditionError);
}

TEST(Extension, RandomRoundTrips) {
  std::mt19937_64 rng(2024);
  int with_zeros = 0;
  for (int t = 0; t < 300; ++t) {
    const auto in = instances::random_extension(rng);
    with_zeros += in.has_zeros;
    const auto r = extend_character(in.problem);
    const auto c = instances::check_extension(in.problem, r, rng);
    EXPECT_TRUE(c.independent) << "instance " << t;
    EXPECT_TRUE(c.gamma_in_span) << "instance " << t;
    EXPECT_TRUE(c.bounded) << "instance " << t;
    EXPECT_LT(c.max_error, 1e-9) << "instance " << t;
    EXPECT_LT(c.homomorphism_error, 1e-9) << "instance " << t;
    EXPECT_TRUE(check_q_independence(r.basis));
    // theta is a nonnegative functional that is positive on the zero set
    for (std::size_t z : r.zero_set) EXPECT_EQ(in.problem.psi[z], Complex(0.0, 0.0));
  }
  EXPECT_GT(with_zeros, 0);
}
