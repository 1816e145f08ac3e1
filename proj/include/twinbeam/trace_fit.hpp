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
 * Spectrum-analyzer traces: CSV ingestion, detection-noise-floor removal,
 * damped least-squares fitting of the intensity-difference model, and the
 * parameter-free phase-difference prediction that follows from the fit.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "twinbeam/errors.hpp"
#include "twinbeam/opo_spectra.hpp"

namespace twinbeam::fit {

struct SpectrumTrace {
  std::vector<double> frequency_hz;
  std::vector<double> power_dbm;
  double rbw_hz = 0.0;
  std::string label;

  std::size_t size() const noexcept { return frequency_hz.size(); }
  /// Frequencies strictly increasing and finite, equal column lengths.
  void validate() const;
};

/// Reads the trace CSV: optional `# rbw_hz=...` / `# label=...` comment
/// lines, the header `frequency_hz,power_dbm`, then one sample per line.
SpectrumTrace load_trace(std::istream& in);
SpectrumTrace load_trace_file(const std::filesystem::path& path);
void write_trace_csv(std::ostream& out, const SpectrumTrace& trace);

/// Inclusive sample grid lo, lo + step, ... up to hi (within step * 1e-9).
std::vector<double> linear_grid(double lo_hz, double hi_hz, double step_hz);

struct FloorSubtraction {
  SpectrumTrace trace;
  std::vector<double> dropped_hz;
};

/// Removes a detection floor in linear power. The floor is interpolated
/// linearly in mW and must cover the trace span; points where the floor
/// reaches the signal are dropped and listed.
FloorSubtraction subtract_noise_floor(const SpectrumTrace& trace,
                                      const SpectrumTrace& floor);

/// Inverse of subtract_noise_floor on the retained points.
SpectrumTrace add_noise_floor(const SpectrumTrace& trace,
                              const SpectrumTrace& floor);

struct Band {
  double lo_hz = 0.0;
  double hi_hz = std::numeric_limits<double>::infinity();

  bool contains(double f) const { return f >= lo_hz && f <= hi_hz; }
  friend bool operator==(const Band&, const Band&) = default;
};

enum class Weighting { db, linear_power };

struct FitConfig {
  Band fit_window;
  std::vector<Band> exclusions;
  std::optional<opo::ModelParams> initial_guess;
  Weighting weighting = Weighting::db;
  int max_iterations = 200;
  double convergence_tol = 1e-10;
  double initial_damping = 1e-3;
  double damping_factor = 10.0;

  /// Technical noise below 2 MHz left out of the window and a 200 kHz band
  /// around the 3.9 MHz modulation spur excluded.
  static FitConfig analyzer_defaults();
};

struct FitResult {
  opo::ModelParams params;
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();  // (S0, xi, delta)
  double rms_residual_db = 0.0;
  std::size_t points_used = 0;
  int iterations = 0;
  FitConfig config;
  std::vector<std::string> warnings;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, FitResult last_iterate)
      : Error(message), last_iterate_(std::move(last_iterate)) {}
  const FitResult& last_iterate() const noexcept { return last_iterate_; }

 private:
  FitResult last_iterate_;
};

/// Indices of trace samples inside the window and outside every exclusion.
std::vector<std::size_t> usable_points(const SpectrumTrace& trace,
                                       const FitConfig& config);

/// S0 from the high-frequency median, delta from the half-depth point of the
/// dip and xi from the extrapolated dc depth.
opo::ModelParams estimate_initial_guess(const SpectrumTrace& trace,
                                        std::span<const std::size_t> used);

/// Levenberg-Marquardt fit of S0 + 10 log10(1 - xi / (1 + (nu/delta)^2)).
FitResult fit_intensity_spectrum(const SpectrumTrace& trace,
                                 const FitConfig& config);

/// Phase-difference model in dBm from the fitted parameters alone.
opo::SpectrumCurve predict_phase_spectrum(const FitResult& fit,
                                          std::span<const double> nu_hz);

struct SqueezingReport {
  /// 10 log10(1 - xi); empty when xi == 1.
  std::optional<double> raw_db;
  /// Same quantity after refitting the floor-corrected trace.
  std::optional<double> corrected_db;
  bool complete_correlation = false;
  bool corrected_complete_correlation = false;
  double bandwidth_hz = 0.0;
  std::size_t dropped_points = 0;
};

SqueezingReport report_squeezing(const SpectrumTrace& trace,
                                 const FitResult& fit,
                                 const std::optional<SpectrumTrace>& floor);

/// Model samples in dBm with optional Gaussian noise of `noise_db` rms.
/// Deterministic for a given seed.
SpectrumTrace synth_trace(const opo::ModelParams& params, opo::SpectrumKind kind,
                          std::span<const double> grid_hz, double noise_db,
                          std::uint64_t seed, double rbw_hz = 30e3);

/// Flat `key = value` lines; keys s0_dbm, xi, delta_hz, rms_residual_db,
/// points_used, then standard errors and warnings.
std::string fit_result_text(const FitResult& fit);
/// JSON object with the same field names.
std::string fit_result_json(const FitResult& fit);

std::string squeezing_report_text(const SqueezingReport& report);

}  // namespace twinbeam::fit
