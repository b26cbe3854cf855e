// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>

#include "nudoa/array_model.hpp"
#include "nudoa/linalg.hpp"

namespace nudoa {

/// Seed plus substream. Equal pairs reproduce equal draws.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  bool operator==(const RngSeed&) const = default;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Engine for one substream. Streams are decorrelated by hashing
/// (seed, stream_id) into the engine's seed sequence.
std::mt19937_64 make_engine(const RngSeed& rng);

/// Sensor x time samples.
class SnapshotMatrix {
 public:
  explicit SnapshotMatrix(ComplexMatrix samples);

  std::size_t sensors() const noexcept { return samples_.rows(); }
  std::size_t snapshots() const noexcept { return samples_.cols(); }
  const ComplexMatrix& samples() const noexcept { return samples_; }

  bool operator==(const SnapshotMatrix&) const = default;

 private:
  ComplexMatrix samples_;
};

/// x(t) = A s(t) + n(t) with circular complex Gaussian sources and noise.
SnapshotMatrix generate_snapshots(const ArrayGeometry& geometry, const SourceSet& sources, const NoiseProfile& noise,
                                  std::size_t snapshot_count, const RngSeed& rng);

/// Same model with raw variances; zero powers or variances are accepted.
SnapshotMatrix generate_snapshots(const ComplexMatrix& steering, std::span<const double> source_powers,
                                  std::span<const double> noise_variances, std::size_t snapshot_count,
                                  const RngSeed& rng);

/// (1/N) sum_t x(t) x(t)^H.
HermitianMatrix sample_covariance(const SnapshotMatrix& x);

/// Binary dump: "DOAS", u32 M, u32 N, u32 reserved (0), then M*N
/// little-endian float64 (re, im) pairs in row-major order.
void write_snapshots(const std::filesystem::path& path, const SnapshotMatrix& x);
SnapshotMatrix read_snapshots(const std::filesystem::path& path);

}  // namespace nudoa
