// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "nudoa/linalg.hpp"

namespace nudoa {

/// Uniform linear array. Spacing is in wavelengths.
class ArrayGeometry {
 public:
  explicit ArrayGeometry(std::size_t sensor_count, double spacing_wavelengths = 0.5);

  std::size_t sensor_count() const noexcept { return sensor_count_; }
  double spacing() const noexcept { return spacing_; }

  bool operator==(const ArrayGeometry&) const = default;

 private:
  std::size_t sensor_count_;
  double spacing_;
};

/// Uncorrelated far-field sources: DOAs in degrees and per-source powers
/// (the diagonal of the source covariance).
class SourceSet {
 public:
  SourceSet(std::vector<double> doas_deg, std::vector<double> powers);

  /// All sources share one power.
  static SourceSet equal_power(std::vector<double> doas_deg, double power);

  std::size_t count() const noexcept { return doas_deg_.size(); }
  const std::vector<double>& doas_deg() const noexcept { return doas_deg_; }
  const std::vector<double>& powers() const noexcept { return powers_; }
  double total_power() const;

 private:
  std::vector<double> doas_deg_;
  std::vector<double> powers_;
};

/// Per-sensor noise variances; all strictly positive.
class NoiseProfile {
 public:
  explicit NoiseProfile(std::vector<double> variances);

  static NoiseProfile uniform(std::size_t sensors, double variance);

  std::size_t size() const noexcept { return variances_.size(); }
  const std::vector<double>& variances() const noexcept { return variances_; }
  DiagonalMatrix covariance() const { return DiagonalMatrix(variances_); }

  bool operator==(const NoiseProfile&) const = default;

 private:
  std::vector<double> variances_;
};

double deg_to_rad(double deg);

/// a_m(theta) = exp(+j 2 pi d (m-1) sin theta), m = 1..M. Throws DomainError
/// unless -90 < theta < 90.
std::vector<cplx> steering_vector(double theta_deg, const ArrayGeometry& geometry);

/// M x L matrix whose columns are the steering vectors of doas_deg.
ComplexMatrix steering_matrix(const std::vector<double>& doas_deg, const ArrayGeometry& geometry);

/// A P A^H + Q.
HermitianMatrix population_covariance(const ArrayGeometry& geometry, const SourceSet& sources,
                                      const NoiseProfile& noise);

/// Worst noise power ratio, max variance over min variance.
double wnpr(const NoiseProfile& noise);

/// Per-source power sigma_s^2 giving the requested SNR under the
/// definition SNR = (sigma_s^2 / M) * sum_m 1 / sigma_m^2.
double signal_power_for_snr(double snr_db, const NoiseProfile& noise);

/// Inverse of signal_power_for_snr, in dB.
double snr_db_for_signal_power(double signal_power, const NoiseProfile& noise);

}  // namespace nudoa
