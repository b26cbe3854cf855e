// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "nudoa/errors.hpp"
#include "nudoa/snapshots.hpp"
#include "test_support.hpp"

using namespace nudoa;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("nudoa_" + name + "_" + std::to_string(::getpid()));
}

nudoa::testing::ScenarioExample1 example1_at_10db() {
  nudoa::testing::ScenarioExample1 ex;
  ex.source_power = signal_power_for_snr(10.0, ex.noise);
  return ex;
}

}  // namespace

TEST(GenerateSnapshots, ZeroPowerAndNoiseGiveZeros) {
  const ComplexMatrix a = steering_matrix({10.0, -40.0}, ArrayGeometry(5));
  const std::vector<double> powers{0.0, 0.0};
  const std::vector<double> noise(5, 0.0);
  const SnapshotMatrix x = generate_snapshots(a, powers, noise, 20, RngSeed{3, 4});
  for (const auto& z : x.samples().data()) EXPECT_EQ(z, cplx{});
}

TEST(GenerateSnapshots, SameSeedSameStreamIsIdentical) {
  const auto ex = example1_at_10db();
  const auto a = generate_snapshots(ex.geometry, ex.sources(), ex.noise, 64, RngSeed{7, 11});
  const auto b = generate_snapshots(ex.geometry, ex.sources(), ex.noise, 64, RngSeed{7, 11});
  EXPECT_EQ(a, b);
  const auto c = generate_snapshots(ex.geometry, ex.sources(), ex.noise, 64, RngSeed{7, 12});
  const auto d = generate_snapshots(ex.geometry, ex.sources(), ex.noise, 64, RngSeed{8, 11});
  EXPECT_NE(a, c);
  EXPECT_NE(a, d);
}

TEST(GenerateSnapshots, DiagonalNearPopulationAtN500) {
  const auto ex = example1_at_10db();
  const HermitianMatrix r = ex.covariance();
  const HermitianMatrix r_hat =
      sample_covariance(generate_snapshots(ex.geometry, ex.sources(), ex.noise, 500, RngSeed{1, 0}));
  for (std::size_t m = 0; m < 8; ++m) EXPECT_NEAR(r_hat(m, m).real() / r(m, m).real(), 1.0, 0.15) << "sensor " << m;
  EXPECT_LT((r_hat.matrix() - r.matrix()).frobenius_norm() / r.frobenius_norm(), 0.2);
}

TEST(GenerateSnapshots, RejectsBadShapes) {
  const ComplexMatrix a = steering_matrix({10.0}, ArrayGeometry(3));
  const std::vector<double> powers{1.0};
  const std::vector<double> noise(3, 1.0);
  EXPECT_THROW(generate_snapshots(a, powers, std::vector<double>(2, 1.0), 5, RngSeed{}), DomainError);
  EXPECT_THROW(generate_snapshots(a, powers, noise, 0, RngSeed{}), DomainError);
}

TEST(SampleCovariance, SingleSnapshotOuterProduct) {
  const SnapshotMatrix x(ComplexMatrix(2, 1, {1.0, cplx(0, 1)}));
  const HermitianMatrix r = sample_covariance(x);
  EXPECT_EQ(r(0, 0), cplx(1, 0));
  EXPECT_EQ(r(0, 1), cplx(0, -1));
  EXPECT_EQ(r(1, 0), cplx(0, 1));
  EXPECT_EQ(r(1, 1), cplx(1, 0));
}

TEST(SampleCovariance, ScaledOrthogonalColumnsGiveIdentity) {
  const double s = std::sqrt(2.0);
  const SnapshotMatrix x(ComplexMatrix(2, 2, {s, 0.0, 0.0, s}));
  const HermitianMatrix r = sample_covariance(x);
  EXPECT_LT((r.matrix() - ComplexMatrix::identity(2)).frobenius_norm(), 1e-15);
}

TEST(SampleCovariance, PositiveSemidefinite) {
  const auto ex = example1_at_10db();
  for (std::uint64_t stream = 0; stream < 20; ++stream) {
    // N < M gives a rank-deficient estimate, the hardest case.
    const HermitianMatrix r = sample_covariance(generate_snapshots(ex.geometry, ex.sources(), ex.noise, 3, {5, stream}));
    EXPECT_GE(eigh(r).values.front(), -1e-12 * r.frobenius_norm());
    double trace = 0.0;
    for (double d : r.diagonal()) trace += d;
    EXPECT_GE(trace, 0.0);
  }
}

TEST(SampleCovariance, UnbiasedOverSeeds) {
  // E||R_hat - R||_F^2 = (tr R)^2 / N for circular Gaussian snapshots, so the
  // mean of 200 estimates has standard error tr(R) / sqrt(200 N).
  const auto ex = example1_at_10db();
  const HermitianMatrix r = ex.covariance();
  const std::size_t seeds = 200;
  const std::size_t n = 500;
  ComplexMatrix mean(8, 8);
  for (std::size_t s = 0; s < seeds; ++s)
    mean += sample_covariance(generate_snapshots(ex.geometry, ex.sources(), ex.noise, n, RngSeed{99, s})).matrix();
  mean *= 1.0 / static_cast<double>(seeds);
  double trace = 0.0;
  for (double d : r.diagonal()) trace += d;
  const double standard_error = trace / std::sqrt(static_cast<double>(seeds * n));
  EXPECT_LT((mean - r.matrix()).frobenius_norm(), 3.0 * standard_error);
}

TEST(SnapshotFile, HeaderLayoutAndRoundTrip) {
  const auto ex = example1_at_10db();
  const SnapshotMatrix x = generate_snapshots(ex.geometry, ex.sources(), ex.noise, 5, RngSeed{1, 2});
  const auto path = temp_file("snap");
  write_snapshots(path, x);
  EXPECT_EQ(std::filesystem::file_size(path), 16u + 8u * 5u * 16u);

  std::ifstream in(path, std::ios::binary);
  char header[16];
  in.read(header, 16);
  EXPECT_EQ(std::string(header, 4), "DOAS");
  std::uint32_t m = 0, n = 0, reserved = 1;
  std::memcpy(&m, header + 4, 4);
  std::memcpy(&n, header + 8, 4);
  std::memcpy(&reserved, header + 12, 4);
  EXPECT_EQ(m, 8u);
  EXPECT_EQ(n, 5u);
  EXPECT_EQ(reserved, 0u);
  double first[2];
  in.read(reinterpret_cast<char*>(first), sizeof first);
  EXPECT_EQ(first[0], x.samples()(0, 0).real());
  EXPECT_EQ(first[1], x.samples()(0, 0).imag());
  in.close();

  EXPECT_EQ(read_snapshots(path), x);
  std::filesystem::remove(path);
}

TEST(SnapshotFile, RejectsBadMagicAndTruncation) {
  const auto path = temp_file("bad");
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOPE0000000000000000";
  }
  EXPECT_THROW(read_snapshots(path), DomainError);
  {
    std::ofstream out(path, std::ios::binary);
    const char header[16] = {'D', 'O', 'A', 'S', 2, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0};
    out.write(header, 16);
  }
  EXPECT_THROW(read_snapshots(path), DomainError);
  std::filesystem::remove(path);
}
