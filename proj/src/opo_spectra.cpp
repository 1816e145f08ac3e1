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

#include "twinbeam/opo_spectra.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "twinbeam/errors.hpp"

namespace twinbeam::opo {
namespace {

void require_xi(double xi) {
  if (!(xi >= 0.0 && xi <= 1.0)) {
    throw ValidationError("correlation coefficient xi must lie in [0, 1], got " +
                          std::to_string(xi));
  }
}

void require_nonzero_u(double u) {
  if (u == 0.0) {
    throw DomainError("phase-difference spectrum has a pole at u = 0");
  }
}

}  // namespace

double OpoParams::xi() const { return transmission / (transmission + loss); }

double OpoParams::delta_hz() const {
  return (transmission + loss) * fsr_hz / (2.0 * std::numbers::pi);
}

ModelParams OpoParams::model() const {
  validate();
  return {s0_dbm, xi(), delta_hz()};
}

void OpoParams::validate() const {
  if (!(transmission > 0.0 && transmission < 1.0)) {
    throw ValidationError("transmissivity T must lie in (0, 1)");
  }
  if (!(loss >= 0.0 && loss < 1.0)) {
    throw ValidationError("single-pass loss A must lie in [0, 1)");
  }
  if (!(fsr_hz > 0.0) || !std::isfinite(fsr_hz)) {
    throw ValidationError("free spectral range must be positive");
  }
  if (!std::isfinite(s0_dbm)) throw ValidationError("S0 must be finite");
}

void validate(const ModelParams& params) {
  require_xi(params.xi);
  if (!(params.delta_hz > 0.0) || !std::isfinite(params.delta_hz)) {
    throw ValidationError("cavity linewidth delta must be positive");
  }
  if (!std::isfinite(params.s0_dbm)) throw ValidationError("S0 must be finite");
}

double intensity_diff_spectrum(double u, double xi) {
  require_xi(xi);
  const double u2 = u * u;
  return (1.0 - xi + u2) / (1.0 + u2);
}

double phase_diff_spectrum(double u, double xi) {
  require_xi(xi);
  require_nonzero_u(u);
  const double u2 = u * u;
  return (u2 + xi) / u2;
}

double distinguishable_phase_spectrum(double /*u*/) { return 1.0; }

double uncertainty_product(double u, double xi) {
  return intensity_diff_spectrum(u, xi) * phase_diff_spectrum(u, xi);
}

const char* unit_tag(PowerUnit unit) {
  return unit == PowerUnit::dbm ? "dBm" : "relative";
}

const char* kind_name(SpectrumKind kind) {
  switch (kind) {
    case SpectrumKind::intensity: return "intensity";
    case SpectrumKind::phase: return "phase";
    case SpectrumKind::flat: return "flat";
  }
  return "?";
}

SpectrumKind parse_kind(const std::string& name) {
  if (name == "intensity") return SpectrumKind::intensity;
  if (name == "phase") return SpectrumKind::phase;
  if (name == "flat") return SpectrumKind::flat;
  throw ValidationError("unknown spectrum kind '" + name + "'");
}

SpectrumCurve to_dbm(const SpectrumCurve& relative, double s0_dbm) {
  if (relative.unit != PowerUnit::relative) {
    throw ValidationError("to_dbm expects a relative curve");
  }
  SpectrumCurve out{relative.frequency_hz, {}, PowerUnit::dbm};
  out.values.reserve(relative.size());
  for (double v : relative.values) {
    if (!(v > 0.0)) {
      throw DomainError("relative power must be positive for dB conversion");
    }
    out.values.push_back(s0_dbm + 10.0 * std::log10(v));
  }
  return out;
}

SpectrumCurve from_dbm(const SpectrumCurve& dbm, double s0_dbm) {
  if (dbm.unit != PowerUnit::dbm) {
    throw ValidationError("from_dbm expects a dBm curve");
  }
  SpectrumCurve out{dbm.frequency_hz, {}, PowerUnit::relative};
  out.values.reserve(dbm.size());
  for (double v : dbm.values) out.values.push_back(std::pow(10.0, (v - s0_dbm) / 10.0));
  return out;
}

std::vector<double> difference_db(const SpectrumCurve& a, const SpectrumCurve& b) {
  if (a.unit != b.unit) {
    throw ValidationError(std::string("cannot combine a ") + unit_tag(a.unit) +
                          " curve with a " + unit_tag(b.unit) + " curve");
  }
  if (a.frequency_hz != b.frequency_hz) {
    throw ValidationError("curves are sampled on different frequency grids");
  }
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = a.unit == PowerUnit::dbm
                 ? a.values[i] - b.values[i]
                 : 10.0 * std::log10(a.values[i] / b.values[i]);
  }
  return out;
}

SpectrumCurve physical_frequency_curve(const ModelParams& params,
                                       SpectrumKind kind,
                                       std::span<const double> nu_hz) {
  validate(params);
  SpectrumCurve out{{nu_hz.begin(), nu_hz.end()}, {}, PowerUnit::relative};
  out.values.reserve(nu_hz.size());
  for (double nu : nu_hz) {
    const double u = nu / params.delta_hz;
    switch (kind) {
      case SpectrumKind::intensity:
        out.values.push_back(intensity_diff_spectrum(u, params.xi));
        break;
      case SpectrumKind::phase:
        out.values.push_back(phase_diff_spectrum(u, params.xi));
        break;
      case SpectrumKind::flat:
        out.values.push_back(distinguishable_phase_spectrum(u));
        break;
    }
  }
  return out;
}

void write_curve_csv(std::ostream& out, const SpectrumCurve& curve) {
  out << "frequency_hz,value,unit_tag\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out << curve.frequency_hz[i] << ',' << curve.values[i] << ','
        << unit_tag(curve.unit) << '\n';
  }
}

quadrature::Covariance opo_covariance(double u, double xi) {
  const double sx = intensity_diff_spectrum(u, xi);
  const double sp = phase_diff_spectrum(u, xi);
  const double diag = 0.25 * (sx + sp);
  const double cxx = 0.25 * (sp - sx);
  quadrature::Covariance cov;
  cov << diag, 0, cxx, 0,
         0, diag, 0, -cxx,
         cxx, 0, diag, 0,
         0, -cxx, 0, diag;
  return cov;
}

}  // namespace twinbeam::opo
