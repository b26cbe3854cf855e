// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nudoa/array_model.hpp"
#include "nudoa/errors.hpp"
#include "test_support.hpp"

using namespace nudoa;

TEST(SteeringVector, BroadsideIsAllOnes) {
  for (const auto& z : steering_vector(0.0, ArrayGeometry(6))) EXPECT_EQ(z, cplx(1.0, 0.0));
}

TEST(SteeringVector, ThirtyDegreesQuarterTurns) {
  const auto a = steering_vector(30.0, ArrayGeometry(4, 0.5));
  const cplx expected[] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
  for (std::size_t m = 0; m < 4; ++m) EXPECT_LT(std::abs(a[m] - expected[m]), 1e-14);
}

TEST(SteeringVector, UnitModulusAndNorm) {
  const ArrayGeometry g(9, 0.37);
  for (double theta : {-89.9, -45.0, -3.0, 0.1, 6.0, 71.3, 89.9}) {
    const auto a = steering_vector(theta, g);
    EXPECT_EQ(a[0], cplx(1.0, 0.0));
    for (const auto& z : a) EXPECT_NEAR(std::abs(z), 1.0, 1e-14);
    EXPECT_NEAR(inner(a, a).real(), 9.0, 1e-12);
  }
}

TEST(SteeringVector, RejectsEndfireAndBeyond) {
  const ArrayGeometry g(4);
  EXPECT_THROW(steering_vector(90.0, g), DomainError);
  EXPECT_THROW(steering_vector(-90.0, g), DomainError);
  EXPECT_THROW(steering_vector(120.0, g), DomainError);
  EXPECT_THROW(steering_vector(std::nan(""), g), DomainError);
}

TEST(ArrayGeometry, Invariants) {
  EXPECT_THROW(ArrayGeometry(1), DomainError);
  EXPECT_THROW(ArrayGeometry(4, 0.0), DomainError);
  EXPECT_THROW(ArrayGeometry(4, -0.5), DomainError);
}

TEST(SourceSet, Invariants) {
  EXPECT_THROW(SourceSet({10.0, 10.0}, {1.0, 1.0}), DomainError);
  EXPECT_THROW(SourceSet({10.0}, {1.0, 1.0}), DomainError);
  EXPECT_THROW(SourceSet({95.0}, {1.0}), DomainError);
  EXPECT_THROW(SourceSet({}, {}), DomainError);
  EXPECT_NO_THROW(SourceSet({-3.0, 6.0}, {0.0, 0.0}));
}

TEST(NoiseProfile, RejectsNonPositive) {
  EXPECT_THROW(NoiseProfile({1.0, 0.0}), DomainError);
  EXPECT_THROW(NoiseProfile({1.0, -2.0}), DomainError);
  EXPECT_THROW(NoiseProfile({}), DomainError);
}

TEST(PopulationCovariance, ZeroPowerSourcesGiveNoiseCovariance) {
  const NoiseProfile q({1.0, 2.0, 3.0, 4.0});
  const HermitianMatrix r = population_covariance(ArrayGeometry(4), SourceSet({10.0, -20.0}, {0.0, 0.0}), q);
  EXPECT_EQ(r.matrix(), q.covariance().to_dense());
}

TEST(PopulationCovariance, S0Diagonal) {
  const nudoa::testing::ScenarioS0 s0;
  const auto d = s0.covariance().diagonal();
  const double expected[] = {2, 3, 4, 5};
  for (std::size_t m = 0; m < 4; ++m) EXPECT_NEAR(d[m], expected[m], 1e-14);
}

TEST(PopulationCovariance, Example1DiagonalSpread) {
  const nudoa::testing::ScenarioExample1 ex{.source_power = 3.7};
  const auto d = ex.covariance().diagonal();
  EXPECT_NEAR(d[7] - d[0], 49.0, 1e-12);
  for (std::size_t m = 0; m < 8; ++m) EXPECT_NEAR(d[m], 2 * 3.7 + ex.noise.variances()[m], 1e-12);
}

TEST(PopulationCovariance, RejectsMismatchedNoise) {
  EXPECT_THROW(population_covariance(ArrayGeometry(4), SourceSet({0.0}, {1.0}), NoiseProfile({1.0, 1.0})),
               DomainError);
  EXPECT_THROW(population_covariance(ArrayGeometry(2), SourceSet({0.0, 10.0}, {1.0, 1.0}), NoiseProfile({1.0, 1.0})),
               DomainError);
}

TEST(PopulationCovariance, StructuralProperties) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> angle(-80.0, 80.0);
  std::uniform_real_distribution<double> power(0.2, 5.0);
  std::uniform_real_distribution<double> var(0.5, 30.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 4 + trial % 6;
    const std::size_t l = 1 + trial % (m - 2);
    std::vector<double> doas;
    while (doas.size() < l) {
      const double d = angle(rng);
      if (std::all_of(doas.begin(), doas.end(), [&](double x) { return std::abs(x - d) > 5.0; })) doas.push_back(d);
    }
    std::vector<double> powers(l), variances(m);
    for (double& p : powers) p = power(rng);
    for (double& v : variances) v = var(rng);
    const ArrayGeometry g(m);
    const NoiseProfile noise(variances);
    const HermitianMatrix r = population_covariance(g, SourceSet(doas, powers), noise);

    // Positive definite, bounded below by the smallest noise variance.
    const EigenPairs ed = eigh(r);
    EXPECT_GE(ed.values.front(), *std::min_element(variances.begin(), variances.end()) - 1e-12);

    // Exactly L positive eigenvalues in the signal part.
    const EigenPairs sig = eigh(HermitianMatrix(r.matrix() - noise.covariance().to_dense()));
    const auto above = std::count_if(sig.values.begin(), sig.values.end(), [](double v) { return v > 1e-9; });
    EXPECT_EQ(static_cast<std::size_t>(above), l);

    // Vectors orthogonal to the steering columns see only the noise.
    const ComplexMatrix a = steering_matrix(doas, g);
    const ComplexMatrix null_basis = sig.vectors.columns(0, m - l);
    for (std::size_t j = 0; j < m - l; ++j) {
      const auto u = null_basis.column(j);
      const auto ru = r.matrix() * std::span<const cplx>(u);
      const auto qu = noise.covariance().to_dense() * std::span<const cplx>(u);
      EXPECT_NEAR(inner(u, ru).real(), inner(u, qu).real(), 1e-9 * r.frobenius_norm());
    }
    EXPECT_LT(nudoa::testing::max_steering_leak(a, null_basis), 1e-7);
  }
}

TEST(Wnpr, Definitions) {
  EXPECT_DOUBLE_EQ(wnpr(NoiseProfile::uniform(5, 1.0)), 1.0);
  EXPECT_DOUBLE_EQ(wnpr(NoiseProfile({1, 1, 1, 1, 1, 20, 30, 50})), 50.0);
  EXPECT_DOUBLE_EQ(wnpr(NoiseProfile({2, 4})), 2.0);
}

TEST(SignalPower, ForSnr) {
  for (std::size_t m : {2u, 5u, 8u}) EXPECT_NEAR(signal_power_for_snr(0.0, NoiseProfile::uniform(m, 1.0)), 1.0, 1e-15);
  EXPECT_NEAR(signal_power_for_snr(10.0, NoiseProfile::uniform(8, 1.0)), 10.0, 1e-13);
  EXPECT_NEAR(signal_power_for_snr(0.0, NoiseProfile({1, 2, 3, 4})), 48.0 / 25.0, 1e-15);
}

TEST(SignalPower, RoundTrip) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> var(0.1, 100.0);
  std::uniform_real_distribution<double> snr(-20.0, 40.0);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> v(6);
    for (double& x : v) x = var(rng);
    const NoiseProfile noise(v);
    const double s = snr(rng);
    EXPECT_NEAR(snr_db_for_signal_power(signal_power_for_snr(s, noise), noise), s, 1e-12);
  }
}
