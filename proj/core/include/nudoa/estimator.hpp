// SPDX-License-Identifier: Apache-2.0
//
// Two-phase noise-subspace DOA estimation under nonuniform white noise.
//
// Phase 1 takes the noise subspace straight from the eigenvectors of the
// covariance with its diagonal removed: the noise variances only ever touch
// the diagonal, so the off-diagonal part alone determines the subspace.
// Phase 2 uses that subspace to rebuild a diagonal noise covariance and then
// re-solves the generalized problem R u = lambda Q u. Both feed a MUSIC
// pseudospectrum. The classical MUSIC baseline is kept for comparison.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nudoa/array_model.hpp"
#include "nudoa/linalg.hpp"

namespace nudoa {

enum class Method { Phase1, Phase2, Classical };

std::string_view method_name(Method m);
/// Accepts "phase1", "phase2", "classical"; throws DomainError otherwise.
Method parse_method(std::string_view name);
const std::vector<Method>& all_methods();

struct NoiseSubspace {
  ComplexMatrix basis;  // M x (M - L), orthonormal columns
  Method phase = Method::Phase1;
  std::vector<double> eigenvalues;

  ComplexMatrix projector() const { return nudoa::projector(basis); }
};

struct NoiseCovEstimate {
  DiagonalMatrix q_hat;
  double sigma2 = 0.0;
  std::size_t k = 0;  // zero-based index of the smallest diagonal of R
  double c = 0.0;     // that smallest diagonal value
  bool fallback_used = false;
};

/// Search grid over (min_deg, max_deg), both ends excluded.
struct AngleGrid {
  double min_deg = -90.0;
  double max_deg = 90.0;
  double step_deg = 0.05;

  std::vector<double> points() const;
  bool operator==(const AngleGrid&) const = default;
};

struct Pseudospectrum {
  std::vector<double> grid_deg;
  std::vector<double> values;
};

struct DoaEstimate {
  std::vector<double> doas_deg;  // ascending
  Method method = Method::Phase1;
  bool padded = false;  // fewer than L local maxima were found
};

/// Raised for the finite-sample degeneracies that trigger the phase-1 fallback.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// R with its diagonal zeroed.
HermitianMatrix strip_diagonal(const HermitianMatrix& r);

/// Eigenvectors of the M - L smallest eigenvalues of the stripped covariance.
NoiseSubspace phase1_noise_subspace(const HermitianMatrix& r1, std::size_t sources);

/// M - L smallest eigenvectors of R itself (spectral MUSIC).
NoiseSubspace classical_noise_subspace(const HermitianMatrix& r, std::size_t sources);

/// argmin of the real diagonal; ties go to the lowest index.
std::size_t smallest_diag_index(const HermitianMatrix& r);

/// e_k^T R U U^H e_k / e_k^T U U^H e_k, complex.
cplx common_power_ratio(const HermitianMatrix& r, const NoiseSubspace& u, std::size_t k);

/// Real part of common_power_ratio. Throws EstimationError for a vanishing
/// denominator (|e_k^T U U^H e_k| < 1e-10) or a non-positive result.
double estimate_common_power(const HermitianMatrix& r, const NoiseSubspace& u, std::size_t k);

/// diag(R) - c with c = min diag(R).
DiagonalMatrix build_qnun(const HermitianMatrix& r);

/// sigma2 * I + qnun, floored at 1e-8 * max entry.
NoiseCovEstimate estimate_noise_cov(double sigma2, const DiagonalMatrix& qnun, std::size_t k = 0, double c = 0.0);

/// M - L generalized eigenvectors of (R, Q_hat) with the smallest eigenvalues,
/// orthonormalized.
NoiseSubspace phase2_noise_subspace(const HermitianMatrix& r, const NoiseCovEstimate& q_hat, std::size_t sources);

/// S(theta) = 1 / max(a^H U U^H a, 1e-12 M).
Pseudospectrum music_pseudospectrum(const NoiseSubspace& u, const ArrayGeometry& geometry, const AngleGrid& grid);
Pseudospectrum music_pseudospectrum(const NoiseSubspace& u, const ArrayGeometry& geometry,
                                    const std::vector<double>& grid_deg);

/// The L largest interior local maxima, refined by a three-point parabola on
/// log S, sorted ascending.
DoaEstimate find_peaks(const Pseudospectrum& s, std::size_t sources);

struct EstimateResult {
  DoaEstimate doa;
  NoiseSubspace subspace;
  std::optional<NoiseCovEstimate> noise_cov;  // phase 2 only
  bool fallback_used = false;
  std::vector<std::string> diagnostics;
};

/// Full pipeline on a (sample) covariance. Phase-2 failures fall back to the
/// phase-1 subspace and set fallback_used; they never throw.
EstimateResult estimate_doa(const HermitianMatrix& r_hat, std::size_t sources, const ArrayGeometry& geometry,
                            const AngleGrid& grid, Method method);
EstimateResult estimate_doa(const HermitianMatrix& r_hat, std::size_t sources, const ArrayGeometry& geometry,
                            const std::vector<double>& grid_deg, Method method);

}  // namespace nudoa
