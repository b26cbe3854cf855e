// SPDX-License-Identifier: Apache-2.0
#include "nudoa/array_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "nudoa/errors.hpp"

namespace nudoa {

ArrayGeometry::ArrayGeometry(std::size_t sensor_count, double spacing_wavelengths)
    : sensor_count_(sensor_count), spacing_(spacing_wavelengths) {
  if (sensor_count_ < 2) throw DomainError("array needs at least 2 sensors");
  if (!(spacing_ > 0.0) || !std::isfinite(spacing_)) throw DomainError("sensor spacing must be positive");
}

SourceSet::SourceSet(std::vector<double> doas_deg, std::vector<double> powers)
    : doas_deg_(std::move(doas_deg)), powers_(std::move(powers)) {
  if (doas_deg_.empty()) throw DomainError("at least one source is required");
  if (doas_deg_.size() != powers_.size()) throw DomainError("one power per source is required");
  for (double d : doas_deg_) {
    if (!(d > -90.0 && d < 90.0)) throw DomainError("DOA " + std::to_string(d) + " outside (-90, 90)");
  }
  for (std::size_t i = 0; i < doas_deg_.size(); ++i)
    for (std::size_t j = i + 1; j < doas_deg_.size(); ++j)
      if (doas_deg_[i] == doas_deg_[j]) throw DomainError("DOAs must be distinct");
  for (double p : powers_) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("source powers must be non-negative");
  }
}

SourceSet SourceSet::equal_power(std::vector<double> doas_deg, double power) {
  std::vector<double> powers(doas_deg.size(), power);
  return SourceSet(std::move(doas_deg), std::move(powers));
}

double SourceSet::total_power() const { return std::accumulate(powers_.begin(), powers_.end(), 0.0); }

NoiseProfile::NoiseProfile(std::vector<double> variances) : variances_(std::move(variances)) {
  if (variances_.empty()) throw DomainError("noise profile is empty");
  for (double v : variances_) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("noise variances must be positive");
  }
}

NoiseProfile NoiseProfile::uniform(std::size_t sensors, double variance) {
  return NoiseProfile(std::vector<double>(sensors, variance));
}

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

std::vector<cplx> steering_vector(double theta_deg, const ArrayGeometry& geometry) {
  if (!(theta_deg > -90.0 && theta_deg < 90.0)) {
    throw DomainError("steering angle " + std::to_string(theta_deg) + " outside (-90, 90)");
  }
  const double step = 2.0 * std::numbers::pi * geometry.spacing() * std::sin(deg_to_rad(theta_deg));
  std::vector<cplx> a(geometry.sensor_count());
  for (std::size_t m = 0; m < a.size(); ++m) a[m] = std::polar(1.0, step * static_cast<double>(m));
  return a;
}

ComplexMatrix steering_matrix(const std::vector<double>& doas_deg, const ArrayGeometry& geometry) {
  ComplexMatrix a(geometry.sensor_count(), doas_deg.size());
  for (std::size_t l = 0; l < doas_deg.size(); ++l) a.set_column(l, steering_vector(doas_deg[l], geometry));
  return a;
}

HermitianMatrix population_covariance(const ArrayGeometry& geometry, const SourceSet& sources,
                                      const NoiseProfile& noise) {
  const std::size_t m = geometry.sensor_count();
  if (noise.size() != m) {
    throw DomainError("noise profile has " + std::to_string(noise.size()) + " entries for " + std::to_string(m) +
                      " sensors");
  }
  if (sources.count() >= m) throw DomainError("need fewer sources than sensors");

  const ComplexMatrix a = steering_matrix(sources.doas_deg(), geometry);
  ComplexMatrix r(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      cplx acc{};
      for (std::size_t l = 0; l < sources.count(); ++l) acc += a(i, l) * sources.powers()[l] * std::conj(a(j, l));
      r(i, j) = acc;
    }
    r(i, i) += noise.variances()[i];
  }
  return HermitianMatrix(std::move(r));
}

double wnpr(const NoiseProfile& noise) {
  const auto [lo, hi] = std::minmax_element(noise.variances().begin(), noise.variances().end());
  return *hi / *lo;
}

namespace {
double inverse_variance_sum(const NoiseProfile& noise) {
  double sum = 0.0;
  for (double v : noise.variances()) sum += 1.0 / v;
  return sum;
}
}  // namespace

double signal_power_for_snr(double snr_db, const NoiseProfile& noise) {
  const double linear = std::pow(10.0, snr_db / 10.0);
  return linear * static_cast<double>(noise.size()) / inverse_variance_sum(noise);
}

double snr_db_for_signal_power(double signal_power, const NoiseProfile& noise) {
  const double linear = signal_power / static_cast<double>(noise.size()) * inverse_variance_sum(noise);
  return 10.0 * std::log10(linear);
}

}  // namespace nudoa
