#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "nuedge/cumulants.hpp"
#include "nuedge/models/lattice.hpp"
#include "nuedge/models/piecewise.hpp"

using namespace nuedge;

namespace {

LatticeDistribution iid_sum(const LatticeDistribution& step, int n) {
  LatticeDistribution acc = step;
  for (int i = 1; i < n; ++i) acc = acc.convolve(step);
  return acc;
}

LatticeDistribution rademacher(int n) { return iid_sum(LatticeDistribution(-1.0, 2.0, {0.5, 0.5}), n); }

// Exact gamma_j(W) as the j-th Taylor coefficient of the cumulant generating
// function: Lambda^{(j)}(0) = i^j gamma_j(W) for j >= 3.
std::complex<double> ipow(int j) {
  static const std::complex<double> I(0.0, 1.0);
  return std::pow(I, j);
}

}  // namespace

TEST(Moments, GaussianAndRademacher) {
  const double normal[] = {0.0, 1.0, 0.0, 3.0};
  const auto k = moments_to_cumulants(normal);
  EXPECT_NEAR(k[0], 0.0, 1e-15);
  EXPECT_NEAR(k[1], 1.0, 1e-15);
  EXPECT_NEAR(k[2], 0.0, 1e-15);
  EXPECT_NEAR(k[3], 0.0, 1e-15);
  const double rad[] = {0.0, 1.0, 0.0, 1.0};
  const auto kr = moments_to_cumulants(rad);
  EXPECT_NEAR(kr[3], -2.0, 1e-15);
  const double shifted[] = {2.0, 5.0};
  EXPECT_NEAR(moments_to_cumulants(shifted)[1], 1.0, 1e-15);
}

TEST(Moments, RoundTrip) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> kappa(9);
    for (auto& v : kappa) v = u(rng);
    const auto back = moments_to_cumulants(cumulants_to_moments(kappa));
    for (std::size_t i = 0; i < kappa.size(); ++i) EXPECT_NEAR(back[i], kappa[i], 1e-12 * (1 + std::abs(kappa[i])));
  }
  EXPECT_THROW(moments_to_cumulants(std::vector<double>{}), InputError);
}

TEST(CumulantSequence, Invariants) {
  EXPECT_THROW(CumulantSequence(4, 0.0, {0, 0, 0, 0}), DegeneracyError);
  EXPECT_THROW(CumulantSequence(4, 1.0, {0, 0, 1}), InputError);
  EXPECT_THROW(CumulantSequence(4, 1.0, {0, 0, 2, 0}), InputError);
  const auto cs = cumulants_of(rademacher(16), 16, 6);
  EXPECT_NEAR(cs.sigma(), 4.0, 1e-12);
  EXPECT_NEAR(cs.gamma(4), -32.0, 1e-9);
  EXPECT_NEAR(cs.gamma_normalized(4), -2.0 / 16.0, 1e-12);
  EXPECT_NEAR(cs.gamma(3), 0.0, 1e-9);
  EXPECT_THROW(cs.gamma(7), InputError);
}

TEST(Cumulants, AdditivityUnderConvolution) {
  const LatticeDistribution a(-1.0, 0.5, {0.2, 0.1, 0.3, 0.0, 0.4});
  const LatticeDistribution b(2.0, 0.5, {0.6, 0.25, 0.15});
  const auto ca = cumulants_of(a, 1, 8), cb = cumulants_of(b, 1, 8), cab = cumulants_of(a.convolve(b), 2, 8);
  for (int j = 2; j <= 8; ++j) {
    const double want = ca.gamma(j) + cb.gamma(j);
    EXPECT_NEAR(cab.gamma(j), want, 1e-9 * std::max(1.0, std::abs(want))) << j;
  }
}

TEST(Cumulants, PiecewiseUniform) {
  const auto u = PiecewisePolyCDF::uniform(-1.0, 1.0);
  const auto cs = cumulants_of(u, 1, 6);
  EXPECT_NEAR(cs.gamma(2), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(cs.gamma(4), -2.0 / 15.0, 1e-14);  // B_4 2^4 / 4 with B_4 = -1/30
  EXPECT_NEAR(cs.gamma(3), 0.0, 1e-14);
}

TEST(CharFn, LatticeBasics) {
  const auto d0 = LatticeDistribution::point_mass(0.0);
  EXPECT_NEAR(std::abs(charfn_lattice(d0, 1.7, 0) - 1.0), 0.0, 1e-15);
  const auto r = rademacher(1);
  for (double t : {0.0, 0.3, 2.0, 10.0}) {
    EXPECT_NEAR(charfn_lattice(r, t, 0).real(), std::cos(t), 1e-14);
    EXPECT_NEAR(charfn_lattice(r, t, 0).imag(), 0.0, 1e-14);
    // psi' = E[iX e^{itX}] = -sin t
    EXPECT_NEAR(charfn_lattice(r, t, 1).real(), -std::sin(t), 1e-14);
  }
  EXPECT_THROW(charfn_lattice(r, 0.0, 17), CapabilityError);
}

TEST(CharFn, LongLatticeMatchesDirectSum) {
  const auto d = rademacher(900);  // exercises the rotation resync
  const double t = 0.0123;
  std::complex<double> direct = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) direct += d.mass(k) * std::polar(1.0, t * d.value(k));
  EXPECT_NEAR(std::abs(charfn_lattice(d, t, 0) - direct), 0.0, 1e-12);
  EXPECT_NEAR(charfn_lattice(d, t, 0).real(), std::pow(std::cos(t), 900), 1e-12);
}

TEST(CharFn, PowerAndLogDerivatives) {
  // g = e^{a t}: g^n has derivatives (na)^k, log derivative a n then zeros.
  const std::complex<double> a(0.3, -0.2);
  ComplexVec g(6);
  for (int k = 0; k < 6; ++k) g[static_cast<std::size_t>(k)] = std::pow(a, k);
  const auto gn = power_derivatives(g, 5);
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(std::abs(gn[static_cast<std::size_t>(k)] - std::pow(5.0 * a, k)), 0.0, 1e-13);
  const auto L = log_derivatives(gn);
  EXPECT_NEAR(std::abs(L[1] - 5.0 * a), 0.0, 1e-13);
  for (int k = 2; k < 6; ++k) EXPECT_NEAR(std::abs(L[static_cast<std::size_t>(k)]), 0.0, 1e-12);
}

TEST(CharFn, PiecewiseUniformIsSinc) {
  const auto src = charfn_source_iid(PiecewisePolyCDF::uniform(-1.0, 1.0), 3);
  for (double u : {0.5, 1.0, 4.0, 9.5}) {
    const auto d = src.derivs(u, 2);
    EXPECT_NEAR(d[0].real(), std::pow(std::sin(u) / u, 3), 1e-13);
    EXPECT_NEAR(d[0].imag(), 0.0, 1e-13);
  }
}

TEST(Lambda, RademacherClosedForm) {
  const auto src = charfn_source(rademacher(4), 4);
  ASSERT_NEAR(src.sigma, 2.0, 1e-14);
  const auto prof = lambda_profile(src, 6, 0.5, 50);
  for (std::size_t i = 0; i < prof.t.size(); ++i) {
    const double t = prof.t[i];
    const double want = 4.0 * std::log(std::cos(t / 2.0)) + 0.5 * t * t;
    EXPECT_NEAR(prof.value[i].real(), want, 1e-13);
    EXPECT_NEAR(prof.value[i].imag(), 0.0, 1e-13);
  }
  EXPECT_NEAR(std::abs(prof.at_zero(0)), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(prof.at_zero(1)), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(prof.at_zero(2)), 0.0, 1e-10);
  EXPECT_NEAR(prof.at_zero(4).real(), -0.5, 1e-12);
}

TEST(Lambda, DerivativesAtZeroAreCumulants) {
  const LatticeDistribution step(-1.0, 1.0, {0.5, 0.3, 0.2});  // skewed
  const auto d = iid_sum(step, 7);
  const auto cs = cumulants_of(d, 7, 8);
  const auto prof = lambda_profile(charfn_source(d, 7), 8, 0.3, 20);
  EXPECT_NEAR(std::abs(prof.at_zero(1)), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(prof.at_zero(2)), 0.0, 1e-10);
  for (int j = 3; j <= 8; ++j) {
    const auto want = ipow(j) * cs.gamma_normalized(j);
    EXPECT_NEAR(std::abs(prof.at_zero(j) - want), 0.0, 1e-8 * std::max(1.0, std::abs(want))) << j;
  }
}

TEST(Lambda, BranchErrorAtZeroOfCharFn) {
  // cos(u)^n vanishes at u = pi/2 = t / sigma.
  const auto src = charfn_source(rademacher(4), 4);
  try {
    lambda_profile(src, 4, std::numbers::pi / 2.0, 10);
    FAIL() << "expected BranchError";
  } catch (const BranchError& e) {
    EXPECT_NEAR(std::abs(e.t()), std::numbers::pi, 1e-9);
  }
}

TEST(Lambda, DegenerateIsZero) {
  const auto prof = lambda_profile(charfn_source(LatticeDistribution::point_mass(3.0), 5), 5, 0.5);
  EXPECT_TRUE(prof.degenerate);
  for (int j = 0; j <= 5; ++j) EXPECT_EQ(prof.sup_abs(j), 0.0);
  const auto rep = check_assumption3({prof}, 4);
  EXPECT_TRUE(rep.bounded);
  for (int j = 3; j <= 5; ++j) EXPECT_EQ(rep.C[static_cast<std::size_t>(j)], 0.0);
}

TEST(LambdaDerivativeBound, RademacherBounded) {
  std::vector<LambdaProfile> profs;
  for (int n = 8; n <= 256; n *= 2) profs.push_back(lambda_profile(charfn_source(rademacher(n), n), 4));
  const auto rep = check_assumption3(profs, 3);
  EXPECT_TRUE(rep.bounded);
  EXPECT_EQ(rep.epsilon, kDefaultLambdaEpsilon);
  EXPECT_GT(rep.C[4], 0.0);
  EXPECT_THROW(check_assumption3(profs, 4), InputError);
}

TEST(LambdaDerivativeBound, IidBoundedModelsUpToM6) {
  const LatticeDistribution step(-1.0, 1.0, {0.25, 0.35, 0.4});
  std::vector<LambdaProfile> profs;
  LatticeDistribution acc = step;
  for (int n = 1; n <= 512; ++n) {
    if (n > 1) acc = acc.convolve(step);
    if ((n & (n - 1)) == 0 && n >= 8) profs.push_back(lambda_profile(charfn_source(acc, n), 7));
  }
  for (int m = 3; m <= 6; ++m) EXPECT_TRUE(check_assumption3(profs, m).bounded) << m;
}

TEST(CharFnTailIntegral, LatticeDoesNotVanish) {
  std::vector<CharFnSource> fam;
  for (int n = 8; n <= 64; n *= 2) fam.push_back(charfn_source(rademacher(n), n));
  const auto rep = check_assumption6(fam, 3);
  EXPECT_FALSE(rep.vanishing);
  for (double v : rep.I) EXPECT_GT(v, 1.0);
}

TEST(CharFnTailIntegral, UniformSumsVanish) {
  const auto base = PiecewisePolyCDF::uniform(-1.0, 1.0);
  std::vector<CharFnSource> fam;
  for (int n = 8; n <= 64; n *= 2) fam.push_back(charfn_source_iid(base, n));
  const auto rep = check_assumption6(fam, 3);
  EXPECT_TRUE(rep.vanishing);
  for (std::size_t i = 1; i < rep.I.size(); ++i) EXPECT_LT(rep.I[i], rep.I[i - 1]);
}

TEST(CharFnTailIntegral, DegenerateIsZero) {
  const auto rep = check_assumption6({charfn_source(LatticeDistribution::point_mass(0.0), 4)}, 3);
  EXPECT_EQ(rep.I[0], 0.0);
  EXPECT_THROW(check_assumption6({}, 3), InputError);
  EXPECT_THROW(check_assumption6({charfn_source(rademacher(2), 2)}, 2), PreconditionError);
}

TEST(CumulantGrowth, Examples) {
  EXPECT_TRUE(check_cumulant_growth(CumulantSequence::from_normalized(9, 3.0, std::vector<double>{0, 0, 0, 0}), 1.0));
  EXPECT_TRUE(check_cumulant_growth(cumulants_of(rademacher(16), 16, 4), 1.0));
  EXPECT_FALSE(check_cumulant_growth(CumulantSequence::from_normalized(100, 10.0, std::vector<double>{10.0}), 1.0));
}

TEST(FitStationary, IidRademacherIsExact) {
  std::vector<CumulantSequence> cs;
  for (int n : {8, 16, 32, 63, 64}) cs.push_back(cumulants_of(rademacher(n), n, 6));
  const auto fit = fit_stationary(cs, 6);
  EXPECT_NEAR(fit.p[2], 1.0, 1e-9);
  EXPECT_NEAR(fit.q[2], 0.0, 1e-7);
  EXPECT_NEAR(fit.p[4], -2.0, 1e-7);
  EXPECT_NEAR(fit.q[4], 0.0, 1e-5);
  EXPECT_TRUE(fit.accepted);
  for (int k = 2; k <= 6; ++k)
    for (double r : fit.residuals[static_cast<std::size_t>(k)]) EXPECT_NEAR(r, 0.0, 1e-5);
}

TEST(FitStationary, GeometricResidualsAndRejection) {
  // gamma_2(S_n) = 2n + 1 + 0.5^n decays; gamma_2 = 2n + 1 + 0.1 n^2/64 does not.
  auto make = [](auto g) {
    std::vector<CumulantSequence> cs;
    for (int n : {4, 8, 16, 32, 63, 64}) {
      const double v = g(n);
      cs.emplace_back(n, std::sqrt(v), std::vector<double>{0, 0, v, 0.0});
    }
    return cs;
  };
  const auto good = fit_stationary(make([](int n) { return 2.0 * n + 1.0 + std::pow(0.5, n); }), 3);
  EXPECT_TRUE(good.accepted);
  ASSERT_TRUE(good.delta_estimate.has_value());
  EXPECT_NEAR(*good.delta_estimate, 0.5, 0.02);
  const auto bad = fit_stationary(make([](int n) { return 2.0 * n + 1.0 + 0.1 * n * n / 64.0; }), 3);
  EXPECT_FALSE(bad.accepted);
  EXPECT_FALSE(bad.reason.empty());
}

TEST(FitStationary, Preconditions) {
  std::vector<CumulantSequence> cs;
  for (int n : {8, 16, 32, 64}) cs.push_back(cumulants_of(rademacher(n), n, 4));
  EXPECT_THROW(fit_stationary(cs, 4), InputError);  // 63 missing
  cs.resize(3);
  EXPECT_THROW(fit_stationary(cs, 4), InputError);
  // Shrinking variance: p_2 < 0.
  std::vector<CumulantSequence> dec;
  for (int n : {8, 16, 32, 63, 64}) dec.emplace_back(n, std::sqrt(200.0 - n), std::vector<double>{0, 0, 200.0 - n, 0});
  EXPECT_THROW(fit_stationary(dec, 3), DegeneracyError);
}
