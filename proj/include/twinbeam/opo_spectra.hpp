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

#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "twinbeam/quadrature_model.hpp"

namespace twinbeam::opo {

/// Fitted or nominal spectrum parameters: shot-noise level, correlation
/// coefficient and cold-cavity FWHM.
struct ModelParams {
  double s0_dbm = 0.0;
  double xi = 0.0;
  double delta_hz = 1.0;
};

/// Cavity description. T: output-coupler transmissivity, A: single-pass
/// intensity loss, D: free spectral range.
struct OpoParams {
  double transmission = 0.0;
  double loss = 0.0;
  double fsr_hz = 0.0;
  double s0_dbm = 0.0;

  /// T / (T + A)
  double xi() const;
  /// (T + A) D / (2 pi)
  double delta_hz() const;
  ModelParams model() const;
  void validate() const;
};

void validate(const ModelParams& params);

/// 1 - xi / (1 + u^2): intensity difference before the splitter, relative
/// to shot noise.
double intensity_diff_spectrum(double u, double xi);

/// 1 + xi / u^2: phase difference (intensity difference after a balanced
/// splitter). Throws DomainError at the u = 0 pole.
double phase_diff_spectrum(double u, double xi);

/// Distinguishable beams: each interferes with vacuum, so the spectrum is
/// flat at shot noise.
double distinguishable_phase_spectrum(double u);

/// Product of the two spectra, 1 + xi (1 - xi) / (u^2 (1 + u^2)).
double uncertainty_product(double u, double xi);

enum class PowerUnit { relative, dbm };

enum class SpectrumKind { intensity, phase, flat };

const char* unit_tag(PowerUnit unit);
const char* kind_name(SpectrumKind kind);
SpectrumKind parse_kind(const std::string& name);

struct SpectrumCurve {
  std::vector<double> frequency_hz;
  std::vector<double> values;
  PowerUnit unit = PowerUnit::relative;

  std::size_t size() const noexcept { return values.size(); }
};

SpectrumCurve to_dbm(const SpectrumCurve& relative, double s0_dbm);
SpectrumCurve from_dbm(const SpectrumCurve& dbm, double s0_dbm);

/// Pointwise a - b in dB; both curves must share unit and frequency grid.
std::vector<double> difference_db(const SpectrumCurve& a, const SpectrumCurve& b);

/// Relative spectrum of `kind` at u = nu / delta.
SpectrumCurve physical_frequency_curve(const ModelParams& params,
                                       SpectrumKind kind,
                                       std::span<const double> nu_hz);

/// Columns frequency_hz,value,unit_tag.
void write_curve_csv(std::ostream& out, const SpectrumCurve& curve);

/// Twin-beam covariance whose difference variances equal the model spectra
/// at u, mirrored onto the sum mode: Var(dX_a - dX_b) = 1 - xi/(1+u^2),
/// Var(dP_a - dP_b) = 1 + xi/u^2.
quadrature::Covariance opo_covariance(double u, double xi);

}  // namespace twinbeam::opo
