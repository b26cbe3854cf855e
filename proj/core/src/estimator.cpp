// SPDX-License-Identifier: Apache-2.0
#include "nudoa/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "nudoa/errors.hpp"

namespace nudoa {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::Phase1:
      return "phase1";
    case Method::Phase2:
      return "phase2";
    case Method::Classical:
      return "classical";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : all_methods())
    if (method_name(m) == name) return m;
  throw DomainError("unknown method '" + std::string(name) + "'");
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::Phase1, Method::Phase2, Method::Classical};
  return methods;
}

std::vector<double> AngleGrid::points() const {
  if (!(step_deg > 0.0) || !(max_deg > min_deg)) throw DomainError("angle grid needs step > 0 and max > min");
  std::vector<double> pts;
  for (std::size_t i = 1;; ++i) {
    const double p = min_deg + static_cast<double>(i) * step_deg;
    if (p >= max_deg - 1e-9 * step_deg) break;
    pts.push_back(p);
  }
  return pts;
}

HermitianMatrix strip_diagonal(const HermitianMatrix& r) {
  ComplexMatrix m = r.matrix();
  for (std::size_t i = 0; i < r.dim(); ++i) m(i, i) = 0.0;
  return HermitianMatrix(std::move(m));
}

namespace {

void check_source_count(std::size_t dim, std::size_t sources) {
  if (sources < 1 || sources >= dim) {
    throw DomainError("source count " + std::to_string(sources) + " must satisfy 1 <= L < M = " + std::to_string(dim));
  }
}

NoiseSubspace smallest_subspace(const EigenPairs& pairs, std::size_t sources, Method phase) {
  const std::size_t keep = pairs.values.size() - sources;
  NoiseSubspace u;
  u.basis = pairs.vectors.columns(0, keep);
  u.phase = phase;
  u.eigenvalues.assign(pairs.values.begin(), pairs.values.begin() + static_cast<std::ptrdiff_t>(keep));
  return u;
}

}  // namespace

NoiseSubspace phase1_noise_subspace(const HermitianMatrix& r1, std::size_t sources) {
  check_source_count(r1.dim(), sources);
  return smallest_subspace(eigh(r1), sources, Method::Phase1);
}

NoiseSubspace classical_noise_subspace(const HermitianMatrix& r, std::size_t sources) {
  check_source_count(r.dim(), sources);
  return smallest_subspace(eigh(r), sources, Method::Classical);
}

std::size_t smallest_diag_index(const HermitianMatrix& r) {
  std::size_t k = 0;
  for (std::size_t i = 1; i < r.dim(); ++i)
    if (r(i, i).real() < r(k, k).real()) k = i;
  return k;
}

cplx common_power_ratio(const HermitianMatrix& r, const NoiseSubspace& u, std::size_t k) {
  const ComplexMatrix& basis = u.basis;
  if (k >= r.dim() || basis.rows() != r.dim()) throw DomainError("common_power_ratio: index or shape mismatch");
  // w = U U^H e_k; the ratio is (R w)_k / w_k.
  std::vector<cplx> w(r.dim());
  for (std::size_t i = 0; i < r.dim(); ++i) {
    cplx acc{};
    for (std::size_t j = 0; j < basis.cols(); ++j) acc += basis(i, j) * std::conj(basis(k, j));
    w[i] = acc;
  }
  cplx numerator{};
  for (std::size_t i = 0; i < r.dim(); ++i) numerator += r(k, i) * w[i];
  const cplx denominator = w[k];
  if (std::abs(denominator) < 1e-10) throw EstimationError("degenerate noise subspace: e_k^T U U^H e_k vanishes");
  return numerator / denominator;
}

double estimate_common_power(const HermitianMatrix& r, const NoiseSubspace& u, std::size_t k) {
  const double sigma2 = common_power_ratio(r, u, k).real();
  if (!(sigma2 > 0.0)) throw EstimationError("non-positive common noise power estimate");
  return sigma2;
}

DiagonalMatrix build_qnun(const HermitianMatrix& r) {
  std::vector<double> d = r.diagonal();
  const double c = d[smallest_diag_index(r)];
  for (double& x : d) x -= c;
  return DiagonalMatrix(std::move(d));
}

NoiseCovEstimate estimate_noise_cov(double sigma2, const DiagonalMatrix& qnun, std::size_t k, double c) {
  NoiseCovEstimate est;
  est.sigma2 = sigma2;
  est.k = k;
  est.c = c;
  std::vector<double> q(qnun.dim());
  double largest = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    q[i] = sigma2 + qnun[i];
    largest = std::max(largest, q[i]);
  }
  const double floor = 1e-8 * largest;
  for (double& x : q) {
    if (!(x >= floor) || x <= 0.0) {
      x = floor > 0.0 ? floor : 1e-300;
      est.fallback_used = true;
    }
  }
  est.q_hat = DiagonalMatrix(std::move(q));
  return est;
}

NoiseSubspace phase2_noise_subspace(const HermitianMatrix& r, const NoiseCovEstimate& q_hat, std::size_t sources) {
  check_source_count(r.dim(), sources);
  const EigenPairs pairs = generalized_eigh(r, q_hat.q_hat);
  NoiseSubspace u = smallest_subspace(pairs, sources, Method::Phase2);
  u.basis = orthonormalize(u.basis);
  return u;
}

Pseudospectrum music_pseudospectrum(const NoiseSubspace& u, const ArrayGeometry& geometry, const AngleGrid& grid) {
  return music_pseudospectrum(u, geometry, grid.points());
}

Pseudospectrum music_pseudospectrum(const NoiseSubspace& u, const ArrayGeometry& geometry,
                                    const std::vector<double>& grid_deg) {
  const std::size_t m = geometry.sensor_count();
  if (u.basis.rows() != m || u.basis.cols() == 0) throw DomainError("noise subspace shape does not match the array");
  const double floor = 1e-12 * static_cast<double>(m);
  const ComplexMatrix uh = u.basis.adjoint();

  Pseudospectrum s;
  s.grid_deg = grid_deg;
  s.values.resize(grid_deg.size());
  for (std::size_t g = 0; g < grid_deg.size(); ++g) {
    const std::vector<cplx> a = steering_vector(grid_deg[g], geometry);
    double energy = 0.0;
    for (std::size_t j = 0; j < uh.rows(); ++j) {
      cplx acc{};
      for (std::size_t i = 0; i < m; ++i) acc += uh(j, i) * a[i];
      energy += std::norm(acc);
    }
    s.values[g] = 1.0 / std::max(energy, floor);
  }
  return s;
}

DoaEstimate find_peaks(const Pseudospectrum& s, std::size_t sources) {
  const auto& v = s.values;
  const auto& g = s.grid_deg;
  const std::size_t n = v.size();
  if (n < 3 || g.size() != n) throw DomainError("find_peaks needs at least 3 grid points");
  if (sources < 1) throw DomainError("find_peaks needs L >= 1");

  struct Peak {
    std::size_t index;
    double angle;
    double value;
  };
  std::vector<Peak> peaks;
  for (std::size_t i = 1; i + 1 < n;) {
    if (!(v[i] > v[i - 1])) {
      ++i;
      continue;
    }
    // Walk over a flat top (capped exact nulls produce these).
    std::size_t j = i;
    while (j + 1 < n && v[j + 1] == v[i]) ++j;
    if (j + 1 < n && v[j + 1] < v[i]) {
      if (j == i) {
        const double ym = std::log(v[i - 1]);
        const double y0 = std::log(v[i]);
        const double yp = std::log(v[i + 1]);
        const double curvature = ym - 2.0 * y0 + yp;
        double delta = curvature < 0.0 ? 0.5 * (ym - yp) / curvature : 0.0;
        delta = std::clamp(delta, -0.5, 0.5);
        const double half_span = 0.5 * (g[i + 1] - g[i - 1]);
        peaks.push_back({i, g[i] + delta * half_span, v[i]});
      } else {
        peaks.push_back({(i + j) / 2, 0.5 * (g[i] + g[j]), v[i]});
      }
    }
    i = j + 1;
  }

  std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.value > b.value; });

  DoaEstimate est;
  for (std::size_t p = 0; p < peaks.size() && est.doas_deg.size() < sources; ++p) est.doas_deg.push_back(peaks[p].angle);

  if (est.doas_deg.size() < sources) {
    est.padded = true;
    std::vector<bool> taken(n, false);
    for (std::size_t p = 0; p < std::min(peaks.size(), sources); ++p) taken[peaks[p].index] = true;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
    for (std::size_t idx : order) {
      if (est.doas_deg.size() >= sources) break;
      if (taken[idx]) continue;
      taken[idx] = true;
      est.doas_deg.push_back(g[idx]);
    }
  }
  std::sort(est.doas_deg.begin(), est.doas_deg.end());
  return est;
}

EstimateResult estimate_doa(const HermitianMatrix& r_hat, std::size_t sources, const ArrayGeometry& geometry,
                            const AngleGrid& grid, Method method) {
  return estimate_doa(r_hat, sources, geometry, grid.points(), method);
}

EstimateResult estimate_doa(const HermitianMatrix& r_hat, std::size_t sources, const ArrayGeometry& geometry,
                            const std::vector<double>& grid_deg, Method method) {
  if (r_hat.dim() != geometry.sensor_count()) throw DomainError("covariance dimension does not match the array");
  EstimateResult result;

  switch (method) {
    case Method::Classical:
      result.subspace = classical_noise_subspace(r_hat, sources);
      break;
    case Method::Phase1:
      result.subspace = phase1_noise_subspace(strip_diagonal(r_hat), sources);
      break;
    case Method::Phase2: {
      NoiseSubspace initial = phase1_noise_subspace(strip_diagonal(r_hat), sources);
      try {
        const std::size_t k = smallest_diag_index(r_hat);
        const cplx ratio = common_power_ratio(r_hat, initial, k);
        if (std::abs(ratio.imag()) > 1e-8 * std::abs(ratio)) {
          char buf[96];
          std::snprintf(buf, sizeof buf, "common power ratio has imaginary residue %.3e", ratio.imag());
          result.diagnostics.emplace_back(buf);
        }
        const double sigma2 = estimate_common_power(r_hat, initial, k);
        NoiseCovEstimate q_hat = estimate_noise_cov(sigma2, build_qnun(r_hat), k, r_hat(k, k).real());
        if (q_hat.fallback_used) result.diagnostics.emplace_back("noise covariance estimate floored");
        result.subspace = phase2_noise_subspace(r_hat, q_hat, sources);
        result.fallback_used = q_hat.fallback_used;
        result.noise_cov = std::move(q_hat);
      } catch (const EstimationError& e) {
        result.diagnostics.emplace_back(std::string("phase 2 fell back to phase 1: ") + e.what());
        result.subspace = std::move(initial);
        result.fallback_used = true;
      } catch (const NumericalError& e) {
        result.diagnostics.emplace_back(std::string("phase 2 fell back to phase 1: ") + e.what());
        result.subspace = std::move(initial);
        result.fallback_used = true;
      }
      break;
    }
  }

  result.doa = find_peaks(music_pseudospectrum(result.subspace, geometry, grid_deg), sources);
  result.doa.method = method;
  return result;
}

}  // namespace nudoa
