// Copyright 2026 The twinbeam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Linearized fluctuation algebra for two bright beams.
 *
 * Quadratures are X = (k + k^dag)/sqrt(2), P = i(k^dag - k)/sqrt(2), so the
 * vacuum has variance 1/2 per quadrature and the mean field of a coherent
 * amplitude alpha is x = sqrt(2) Re(alpha), p = sqrt(2) Im(alpha). The
 * covariance is ordered (dX_a, dP_a, dX_b, dP_b).
 *
 * Number-difference noise behind a half-wave plate at angle theta and a
 * polarizer is the linearization of
 *
 *   N_-(theta) = cos(4 theta) (N_a - N_b) + sin(4 theta) i(a^dag b - b^dag a),
 *
 * whose gradient at the mean field gives the standard deviation. With equal
 * real means x this is |x| dX_- at theta = 0 and |x| dP_- at theta = pi/8,
 * i.e. the prefactor constant is 1 when x is the quadrature mean (sqrt(2)
 * when expressed through |alpha|). The exact Fock engine pins this scale.
 */

#pragma once

#include <complex>
#include <random>

#include <Eigen/Dense>

namespace twinbeam::quadrature {

using Complex = std::complex<double>;
using Covariance = Eigen::Matrix4d;

struct QuadratureState {
  Complex mean_a{};
  Complex mean_b{};
  Covariance cov = Covariance::Identity() * 0.5;
};

Covariance vacuum_covariance();

/// Covariance of a two-mode squeezed vacuum with Var(X_a - X_b) = exp(-2r)
/// and Var(P_a - P_b) = exp(2r).
Covariance twin_beam_covariance(double squeeze_r);

/// Block-diagonal symplectic form for (X_a, P_a, X_b, P_b).
Eigen::Matrix4d symplectic_form();

/// Symmetric, PSD and cov + (i/2) Omega >= 0, each within `tol`.
bool is_physical(const Covariance& cov, double tol = 1e-10);

/// Throws ValidationError when !is_physical(cov, tol).
void validate(const QuadratureState& state, double tol = 1e-10);

/// Exchanges X and P within each mode.
Covariance exchange_quadratures(const Covariance& cov);

struct DifferenceStats {
  double dX_minus = 0.0;
  double dP_minus = 0.0;
  /// Cov(dX_a - dX_b, dP_a - dP_b).
  double xp_covariance = 0.0;
  /// Mean quadrature amplitude |x| of each beam (balanced means).
  double mean_field = 0.0;

  /// Linearized std of N_-(theta) in the frame of equal real means.
  double dN_minus_at(double theta) const;
};

DifferenceStats quadrature_difference_stds(const QuadratureState& state);

enum class MeanBalance { require_balanced, generalized };

/// Linearized standard deviation of N_-(theta). Requires |mean_a| ==
/// |mean_b| unless `balance` is generalized.
double number_difference_std(const QuadratureState& state, double theta,
                             MeanBalance balance = MeanBalance::require_balanced);

/// Random symplectic matrix built from phase rotations, single-mode
/// squeezers, beam splitters and two-mode squeezers.
Eigen::Matrix4d random_symplectic(std::mt19937_64& rng, double max_squeeze = 1.5);

/// S diag(nu_a, nu_a, nu_b, nu_b) S^T / 2 with random S and thermal
/// factors nu >= 1; valid by construction.
Covariance random_covariance(std::mt19937_64& rng, double max_squeeze = 1.5);

struct CrossCheckReport {
  double linearized = 0.0;
  double exact = 0.0;
  double relative_error = 0.0;
  double leakage = 0.0;
};

/// Compares number_difference_std against the exact Fock engine for the
/// input with both means equal to `alpha` and covariance `cov_model`, which
/// must be a twin_beam_covariance (vacuum included). The Fock side applies
/// the symmetric_i splitter at mixing angle 2 theta, which realizes the same
/// N_-(theta). Throws TruncationError when leakage exceeds 1e-8.
CrossCheckReport cross_check_against_fock(Complex alpha,
                                          const Covariance& cov_model,
                                          int cutoff, double theta);

}  // namespace twinbeam::quadrature
