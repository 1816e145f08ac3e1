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

#include "twinbeam/quadrature_model.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "twinbeam/errors.hpp"
#include "twinbeam/fock_engine.hpp"

namespace twinbeam::quadrature {
namespace {

using Vector4 = Eigen::Vector4d;

double quadratic_form(const Covariance& cov, const Vector4& g) {
  return g.dot(cov * g);
}

// Gradient of N_-(theta) over (dX_a, dP_a, dX_b, dP_b) at the mean field.
Vector4 number_difference_gradient(const QuadratureState& s, double theta) {
  const double xa = std::sqrt(2.0) * s.mean_a.real();
  const double pa = std::sqrt(2.0) * s.mean_a.imag();
  const double xb = std::sqrt(2.0) * s.mean_b.real();
  const double pb = std::sqrt(2.0) * s.mean_b.imag();
  const Vector4 intensity(xa, pa, -xb, -pb);
  const Vector4 interference(-pb, xb, pa, -xa);
  return std::cos(4.0 * theta) * intensity + std::sin(4.0 * theta) * interference;
}

Eigen::Matrix2d rotation(double phi) {
  Eigen::Matrix2d r;
  r << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  return r;
}

Eigen::Matrix4d local(const Eigen::Matrix2d& on_a, const Eigen::Matrix2d& on_b) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m.topLeftCorner<2, 2>() = on_a;
  m.bottomRightCorner<2, 2>() = on_b;
  return m;
}

// Passive mixing of a and b with real transmission cos(angle).
Eigen::Matrix4d beam_splitter(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 0) = m(1, 1) = m(2, 2) = m(3, 3) = c;
  m(0, 2) = m(1, 3) = s;
  m(2, 0) = m(3, 1) = -s;
  return m;
}

Eigen::Matrix4d two_mode_squeezer(double r) {
  const double ch = std::cosh(r), sh = std::sinh(r);
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 0) = m(1, 1) = m(2, 2) = m(3, 3) = ch;
  m(0, 2) = m(2, 0) = sh;
  m(1, 3) = m(3, 1) = -sh;
  return m;
}

}  // namespace

Covariance vacuum_covariance() { return Covariance::Identity() * 0.5; }

Covariance twin_beam_covariance(double squeeze_r) {
  const double c = std::cosh(2.0 * squeeze_r), s = std::sinh(2.0 * squeeze_r);
  Covariance cov;
  cov << c, 0, s, 0,
         0, c, 0, -s,
         s, 0, c, 0,
         0, -s, 0, c;
  return cov * 0.5;
}

Eigen::Matrix4d symplectic_form() {
  Eigen::Matrix2d j;
  j << 0, 1, -1, 0;
  return local(j, j);
}

bool is_physical(const Covariance& cov, double tol) {
  if (!cov.allFinite()) return false;
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > tol) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> real_eig(cov);
  if (real_eig.eigenvalues().minCoeff() < -tol) return false;
  const Eigen::Matrix4cd bona_fide =
      cov.cast<Complex>() + Complex(0.0, 0.5) * symplectic_form().cast<Complex>();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> eig(bona_fide);
  return eig.eigenvalues().minCoeff() >= -tol;
}

void validate(const QuadratureState& state, double tol) {
  if (!is_physical(state.cov, tol)) {
    throw ValidationError(
        "covariance is not a valid quantum covariance (symmetric, PSD, "
        "cov + i/2 Omega >= 0)");
  }
}

Covariance exchange_quadratures(const Covariance& cov) {
  Eigen::Matrix4d perm = Eigen::Matrix4d::Zero();
  perm(0, 1) = perm(1, 0) = perm(2, 3) = perm(3, 2) = 1.0;
  return perm * cov * perm.transpose();
}

double DifferenceStats::dN_minus_at(double theta) const {
  const double c = std::cos(4.0 * theta), s = std::sin(4.0 * theta);
  const double var = c * c * dX_minus * dX_minus + s * s * dP_minus * dP_minus +
                     2.0 * c * s * xp_covariance;
  return mean_field * std::sqrt(std::max(0.0, var));
}

DifferenceStats quadrature_difference_stds(const QuadratureState& state) {
  validate(state);
  const Vector4 x_minus(1, 0, -1, 0);
  const Vector4 p_minus(0, 1, 0, -1);
  DifferenceStats out;
  out.dX_minus = std::sqrt(std::max(0.0, quadratic_form(state.cov, x_minus)));
  out.dP_minus = std::sqrt(std::max(0.0, quadratic_form(state.cov, p_minus)));
  out.xp_covariance = x_minus.dot(state.cov * p_minus);
  out.mean_field =
      std::sqrt(2.0) * 0.5 * (std::abs(state.mean_a) + std::abs(state.mean_b));
  return out;
}

double number_difference_std(const QuadratureState& state, double theta,
                             MeanBalance balance) {
  validate(state);
  if (balance == MeanBalance::require_balanced) {
    const double ma = std::abs(state.mean_a), mb = std::abs(state.mean_b);
    if (std::abs(ma - mb) > 1e-12 * std::max({1.0, ma, mb})) {
      throw PreconditionError(
          "mean fields differ in magnitude; request the generalized formula");
    }
  }
  const Vector4 g = number_difference_gradient(state, theta);
  return std::sqrt(std::max(0.0, quadratic_form(state.cov, g)));
}

Eigen::Matrix4d random_symplectic(std::mt19937_64& rng, double max_squeeze) {
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> squeeze(-max_squeeze, max_squeeze);
  auto squeezer = [](double r) {
    Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
    m(0, 0) = std::exp(-r);
    m(1, 1) = std::exp(r);
    return m;
  };
  Eigen::Matrix4d s = Eigen::Matrix4d::Identity();
  for (int layer = 0; layer < 3; ++layer) {
    s = local(rotation(phase(rng)), rotation(phase(rng))) * s;
    s = local(squeezer(squeeze(rng)), squeezer(squeeze(rng))) * s;
    s = beam_splitter(phase(rng)) * s;
    s = two_mode_squeezer(0.5 * squeeze(rng)) * s;
  }
  return s;
}

Covariance random_covariance(std::mt19937_64& rng, double max_squeeze) {
  std::exponential_distribution<double> excess(2.0);
  const Eigen::Matrix4d s = random_symplectic(rng, max_squeeze);
  const double nu_a = 1.0 + excess(rng), nu_b = 1.0 + excess(rng);
  const Eigen::Vector4d thermal(nu_a, nu_a, nu_b, nu_b);
  const Covariance cov = 0.5 * s * thermal.asDiagonal() * s.transpose();
  return 0.5 * (cov + cov.transpose());
}

CrossCheckReport cross_check_against_fock(Complex alpha,
                                          const Covariance& cov_model,
                                          int cutoff, double theta) {
  const double r = 0.5 * std::asinh(2.0 * cov_model(0, 2));
  const Covariance expected = twin_beam_covariance(r);
  if (r < 0.0 ||
      (cov_model - expected).cwiseAbs().maxCoeff() >
          1e-9 * std::max(1.0, expected.cwiseAbs().maxCoeff())) {
    throw ValidationError(
        "cross-check supports twin-beam covariances (vacuum included) only");
  }
  const QuadratureState linear{alpha, alpha, cov_model};
  CrossCheckReport report;
  report.linearized = number_difference_std(linear, theta);

  const fock::TruncatedState input =
      fock::make_displaced_twin_beam(alpha, alpha, r, cutoff);
  report.leakage = input.leakage;
  if (input.truncation_warning) {
    std::ostringstream msg;
    msg << "truncation leakage " << std::scientific << std::setprecision(3)
        << input.leakage << " invalidates the comparison; raise the cutoff";
    throw TruncationError(msg.str());
  }
  const fock::MultimodeState out = fock::apply_beam_splitter(
      input.state, 2.0 * theta, fock::SplitterConvention::symmetric_i);
  report.exact = fock::number_difference_stats(out).stddev();
  if (report.exact > 0.0) {
    report.relative_error =
        std::abs(report.linearized - report.exact) / report.exact;
  } else {
    report.relative_error = report.linearized == 0.0
                                ? 0.0
                                : std::numeric_limits<double>::infinity();
  }
  return report;
}

}  // namespace twinbeam::quadrature
