#pragma once

// Random instance generators and independent result checkers shared by the
// unit tests and the acceptance binary.

#include <random>
#include <string>

#include "forge/density.hpp"
#include "forge/extension.hpp"
#include "oracles.hpp"

namespace instances {

using namespace forge;

/// A character extension problem built from a known character phi0 on a
/// known Q-independent B0: Gamma are random N_0-combinations of B0 and
/// psi(gamma) = prod phi0(b)^k. Some phi0 values are 0, so Gamma_0 is often
/// nonempty, and B0 has fractional coordinates.
struct ExtensionInstance {
  std::vector<RationalVector> B0;
  std::vector<Complex> phi0;
  CharacterExtensionProblem problem;
  bool has_zeros = false;
};

inline ExtensionInstance random_extension(std::mt19937_64& rng, std::size_t max_dim = 4,
                                          std::size_t max_gamma = 8) {
  ExtensionInstance in;
  const std::size_t dim = 1 + rng() % max_dim;
  while (true) {
    in.B0.clear();
    for (std::size_t i = 0; i < dim; ++i) {
      RationalVector b;
      for (std::size_t j = 0; j < dim; ++j) b.push_back(oracle::random_q(rng, -3, 3, 3));
      in.B0.push_back(b);
    }
    if (oracle::rank(in.B0) == dim) break;
  }
  std::uniform_real_distribution<double> mod(0.1, 1.0), arg(-3.0, 3.0);
  for (std::size_t i = 0; i < dim; ++i) {
    const int kind = static_cast<int>(rng() % 4);
    const double m = kind == 0 ? 0.0 : (kind == 1 ? 1.0 : mod(rng));
    in.phi0.push_back(std::polar(m, arg(rng)));
  }
  const std::size_t ng = 1 + rng() % max_gamma;
  for (std::size_t g = 0; g < ng; ++g) {
    RationalVector v = zero_vector(dim);
    Complex val = 1;
    bool nonzero = false;
    for (std::size_t i = 0; i < dim; ++i) {
      const int e = static_cast<int>(rng() % 3);
      if (!e) continue;
      nonzero = true;
      v = v + Rational(e) * in.B0[i];
      for (int k = 0; k < e; ++k) val *= in.phi0[i];
    }
    if (!nonzero) {
      v = in.B0[0];
      val = in.phi0[0];
    }
    in.has_zeros = in.has_zeros || val == Complex(0.0, 0.0);
    in.problem.gamma.push_back(v);
    in.problem.psi.push_back(val);
  }
  return in;
}

/// Re-checks an extension result without trusting its own certificate.
struct ExtensionCheck {
  bool independent = false;
  bool gamma_in_span = false;   // exact N_0 exponent maps reproduce Gamma
  bool bounded = false;         // |phi(beta)| <= 1
  double max_error = 0;         // max |phi(gamma) - psi(gamma)|
  double homomorphism_error = 0;
  std::string failure;
};

inline ExtensionCheck check_extension(const CharacterExtensionProblem& p, const CharacterExtensionResult& r,
                                      std::mt19937_64& rng) {
  ExtensionCheck c;
  std::vector<oracle::QVec> B(r.basis.begin(), r.basis.end());
  c.independent = !B.empty() && oracle::rank(B) == B.size();
  c.gamma_in_span = r.exponents.size() == p.gamma.size();
  c.bounded = r.phi.size() == r.basis.size();
  for (const auto& z : r.phi) c.bounded = c.bounded && std::abs(z) <= 1.0 + 1e-12;
  for (std::size_t g = 0; g < p.gamma.size() && c.gamma_in_span; ++g) {
    const auto& e = r.exponents[g];
    if (e.size() != r.basis.size()) {
      c.gamma_in_span = false;
      break;
    }
    RationalVector sum = zero_vector(p.gamma[g].size());
    Complex val = 1;
    for (std::size_t k = 0; k < e.size(); ++k) {
      sum = sum + Rational(e[k]) * r.basis[k];
      for (std::uint64_t j = 0; j < e[k]; ++j) val *= r.phi[k];
    }
    if (sum != p.gamma[g]) c.gamma_in_span = false;
    c.max_error = std::max(c.max_error, std::abs(val - p.psi[g]));
  }
  // phi extended to [B] is a homomorphism: random combinations
  for (int t = 0; t < 20 && !r.phi.empty(); ++t) {
    std::vector<int> m(r.phi.size()), n(r.phi.size());
    Complex a = 1, b = 1, ab = 1;
    for (std::size_t k = 0; k < r.phi.size(); ++k) {
      m[k] = static_cast<int>(rng() % 3);
      n[k] = static_cast<int>(rng() % 3);
      a *= std::pow(r.phi[k], m[k]);
      b *= std::pow(r.phi[k], n[k]);
      ab *= std::pow(r.phi[k], m[k] + n[k]);
    }
    c.homomorphism_error = std::max(c.homomorphism_error, std::abs(ab - a * b));
  }
  if (!c.independent) c.failure = "basis not independent";
  else if (!c.gamma_in_span) c.failure = "Gamma not reproduced by exponent maps";
  else if (!c.bounded) c.failure = "unbounded generator value";
  return c;
}

/// Random sparse element over log N (support <= 10 within 1..30) and a
/// random bounded explicit character, for the density search.
struct DensityInstance {
  AlgebraElement<Complex> a;
  Character psi;
  std::vector<Complex> dense;  // a(n), n = 0..30
};

inline DensityInstance random_density(std::mt19937_64& rng, const BasisPtr& L) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Complex> dense(31, Complex(0.0, 0.0));
  AlgebraElement<Complex>::Builder b(L);
  const int sz = 1 + static_cast<int>(rng() % 10);
  for (int j = 0; j < sz; ++j) {
    const int n = 1 + static_cast<int>(rng() % 30);
    const Complex c(u(rng), u(rng));
    dense[n] += c;
    b.add(log_of(n), c);
  }
  std::map<int, Complex> vals;
  for (const auto& g : L->generators()) vals[g.id] = oracle::random_disk(rng);
  return {std::move(b).build(), Character::from_values(L, vals), dense};
}

/// |sum a(n) n^{-s} - sum a(n) psi(n)| recomputed from the dense table
/// (log N is one-dimensional, so s has a single coordinate).
inline double density_error(const DensityInstance& in, const std::vector<Complex>& s) {
  Complex hs = 0, hpsi = 0;
  for (int n = 1; n < static_cast<int>(in.dense.size()); ++n) {
    if (in.dense[n] == Complex(0.0, 0.0)) continue;
    Complex v = 1;
    for (auto [p, k] : oracle::factor(n)) v *= std::pow(in.psi.value(static_cast<int>(p)), static_cast<int>(k));
    hs += in.dense[n] * std::exp(-s[0] * std::log(static_cast<double>(n)));
    hpsi += in.dense[n] * v;
  }
  return std::abs(hs - hpsi);
}

}  // namespace instances
