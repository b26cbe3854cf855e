// SPDX-License-Identifier: Apache-2.0
#include "nudoa/snapshots.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "nudoa/errors.hpp"

namespace nudoa {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_engine(const RngSeed& rng) {
  const std::uint64_t a = mix64(rng.seed);
  const std::uint64_t b = mix64(a ^ mix64(rng.stream_id + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

SnapshotMatrix::SnapshotMatrix(ComplexMatrix samples) : samples_(std::move(samples)) {
  if (samples_.cols() < 1 || samples_.rows() < 1) throw DomainError("snapshot matrix needs N >= 1 and M >= 1");
  for (const auto& z : samples_.data()) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("snapshot matrix has non-finite entries");
  }
}

SnapshotMatrix generate_snapshots(const ArrayGeometry& geometry, const SourceSet& sources, const NoiseProfile& noise,
                                  std::size_t snapshot_count, const RngSeed& rng) {
  if (noise.size() != geometry.sensor_count()) throw DomainError("noise profile length differs from sensor count");
  return generate_snapshots(steering_matrix(sources.doas_deg(), geometry), sources.powers(), noise.variances(),
                            snapshot_count, rng);
}

SnapshotMatrix generate_snapshots(const ComplexMatrix& steering, std::span<const double> source_powers,
                                  std::span<const double> noise_variances, std::size_t snapshot_count,
                                  const RngSeed& rng) {
  const std::size_t m = steering.rows();
  const std::size_t l = steering.cols();
  if (source_powers.size() != l || noise_variances.size() != m) throw DomainError("generate_snapshots: dimension mismatch");
  if (snapshot_count < 1) throw DomainError("generate_snapshots: need at least one snapshot");

  // Each real and imaginary part carries half of the complex variance.
  std::vector<double> source_scale(l);
  std::vector<double> noise_scale(m);
  for (std::size_t k = 0; k < l; ++k) source_scale[k] = std::sqrt(source_powers[k] / 2.0);
  for (std::size_t k = 0; k < m; ++k) noise_scale[k] = std::sqrt(noise_variances[k] / 2.0);

  auto engine = make_engine(rng);
  std::normal_distribution<double> normal(0.0, 1.0);

  ComplexMatrix x(m, snapshot_count);
  std::vector<cplx> s(l);
  for (std::size_t t = 0; t < snapshot_count; ++t) {
    for (std::size_t k = 0; k < l; ++k) {
      const double re = normal(engine);
      const double im = normal(engine);
      s[k] = source_scale[k] * cplx(re, im);
    }
    for (std::size_t i = 0; i < m; ++i) {
      const double re = normal(engine);
      const double im = normal(engine);
      cplx acc = noise_scale[i] * cplx(re, im);
      for (std::size_t k = 0; k < l; ++k) acc += steering(i, k) * s[k];
      x(i, t) = acc;
    }
  }
  return SnapshotMatrix(std::move(x));
}

HermitianMatrix sample_covariance(const SnapshotMatrix& snapshots) {
  const ComplexMatrix& x = snapshots.samples();
  const std::size_t m = x.rows();
  const std::size_t n = x.cols();
  ComplexMatrix r(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      cplx acc{};
      for (std::size_t t = 0; t < n; ++t) acc += x(i, t) * std::conj(x(j, t));
      acc /= static_cast<double>(n);
      r(i, j) = acc;
      r(j, i) = std::conj(acc);
    }
  }
  return HermitianMatrix(std::move(r));
}

namespace {

constexpr std::array<char, 4> kMagic{'D', 'O', 'A', 'S'};

template <typename T>
void put_le(std::ostream& os, T value) {
  static_assert(std::endian::native == std::endian::little, "snapshot dump assumes a little-endian host");
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  os.write(bytes, sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  char bytes[sizeof(T)];
  if (!is.read(bytes, sizeof(T))) throw DomainError("snapshot file truncated");
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_snapshots(const std::filesystem::path& path, const SnapshotMatrix& snapshots) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DomainError("cannot open " + path.string() + " for writing");
  os.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(snapshots.sensors()));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(snapshots.snapshots()));
  put_le<std::uint32_t>(os, 0);
  for (const auto& z : snapshots.samples().data()) {
    put_le<double>(os, z.real());
    put_le<double>(os, z.imag());
  }
  if (!os) throw DomainError("failed writing " + path.string());
}

SnapshotMatrix read_snapshots(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DomainError("cannot open " + path.string());
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic) throw DomainError(path.string() + ": bad magic");
  const auto m = get_le<std::uint32_t>(is);
  const auto n = get_le<std::uint32_t>(is);
  get_le<std::uint32_t>(is);
  std::vector<cplx> entries(static_cast<std::size_t>(m) * n);
  for (auto& z : entries) {
    const double re = get_le<double>(is);
    const double im = get_le<double>(is);
    z = cplx(re, im);
  }
  return SnapshotMatrix(ComplexMatrix(m, n, std::move(entries)));
}

}  // namespace nudoa
