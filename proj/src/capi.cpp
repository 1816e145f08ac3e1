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

#include "twinbeam/twinbeam.h"

#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "twinbeam/errors.hpp"
#include "twinbeam/fock_engine.hpp"
#include "twinbeam/opo_spectra.hpp"
#include "twinbeam/quadrature_model.hpp"
#include "twinbeam/trace_fit.hpp"

struct tb_state {
  twinbeam::fock::MultimodeState value;
};

struct tb_trace {
  twinbeam::fit::SpectrumTrace value;
};

struct tb_fit {
  twinbeam::fit::FitResult value;
};

namespace {

using namespace twinbeam;

thread_local std::string last_error;

struct InvalidArgument : Error {
  using Error::Error;
};

struct BufferTooSmall : Error {
  using Error::Error;
};

template <class F>
tb_status try_(F&& body) {
  try {
    body();
    last_error.clear();
    return TB_OK;
  } catch (const InvalidArgument& e) {
    last_error = e.what();
    return TB_ERR_INVALID_ARGUMENT;
  } catch (const BufferTooSmall& e) {
    last_error = e.what();
    return TB_ERR_BUFFER_TOO_SMALL;
  } catch (const CapacityError& e) {
    last_error = e.what();
    return TB_ERR_CAPACITY;
  } catch (const ValidationError& e) {
    last_error = e.what();
    return TB_ERR_VALIDATION;
  } catch (const PreconditionError& e) {
    last_error = e.what();
    return TB_ERR_PRECONDITION;
  } catch (const DomainError& e) {
    last_error = e.what();
    return TB_ERR_DOMAIN;
  } catch (const TruncationError& e) {
    last_error = e.what();
    return TB_ERR_TRUNCATION;
  } catch (const ParseError& e) {
    last_error = e.what();
    return TB_ERR_PARSE;
  } catch (const fit::ConvergenceError& e) {
    last_error = e.what();
    return TB_ERR_CONVERGENCE;
  } catch (const IoError& e) {
    last_error = e.what();
    return TB_ERR_IO;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return TB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return TB_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return TB_ERR_INTERNAL;
  }
}

template <class T>
T& deref(T* p, const char* name) {
  if (p == nullptr) throw InvalidArgument(std::string(name) + " is NULL");
  return *p;
}

const char* path_arg(const char* path) {
  if (path == nullptr) throw InvalidArgument("path is NULL");
  return path;
}

fock::SpatialPort to_port(tb_port p) {
  switch (p) {
    case TB_PORT_A: return fock::SpatialPort::a;
    case TB_PORT_B: return fock::SpatialPort::b;
    case TB_PORT_C: return fock::SpatialPort::c;
    case TB_PORT_D: return fock::SpatialPort::d;
  }
  throw InvalidArgument("unknown port");
}

opo::SpectrumKind to_kind(tb_spectrum_kind k) {
  switch (k) {
    case TB_SPECTRUM_INTENSITY: return opo::SpectrumKind::intensity;
    case TB_SPECTRUM_PHASE: return opo::SpectrumKind::phase;
    case TB_SPECTRUM_FLAT: return opo::SpectrumKind::flat;
  }
  throw InvalidArgument("unknown spectrum kind");
}

opo::ModelParams to_model(const tb_model_params& p) {
  return {p.s0_dbm, p.xi, p.delta_hz};
}

tb_model_params from_model(const opo::ModelParams& p) {
  return {p.s0_dbm, p.xi, p.delta_hz};
}

quadrature::Covariance to_cov(const double* cov) {
  deref(cov, "cov");
  quadrature::Covariance m;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) m(r, c) = cov[4 * r + c];
  }
  return m;
}

void from_cov(const quadrature::Covariance& m, double* cov) {
  deref(cov, "cov");
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) cov[4 * r + c] = m(r, c);
  }
}

quadrature::QuadratureState to_quadrature(const tb_quadrature_state& s) {
  return {{s.mean_a_re, s.mean_a_im}, {s.mean_b_re, s.mean_b_im}, to_cov(s.cov)};
}

std::span<const double> view(const double* data, std::size_t count) {
  if (count > 0 && data == nullptr) throw InvalidArgument("array is NULL");
  return {data, count};
}

opo::SpectrumCurve eval_curve(const tb_model_params* params, tb_spectrum_kind kind,
                              const double* nu, std::size_t count, int as_dbm) {
  const opo::ModelParams model = to_model(deref(params, "params"));
  opo::SpectrumCurve curve =
      opo::physical_frequency_curve(model, to_kind(kind), view(nu, count));
  return as_dbm ? opo::to_dbm(curve, model.s0_dbm) : curve;
}

fit::FitConfig to_config(const tb_fit_config& c) {
  fit::FitConfig config;
  config.fit_window = {c.fit_window.lo_hz, c.fit_window.hi_hz};
  if (c.exclusion_count > 0 && c.exclusions == nullptr) {
    throw InvalidArgument("exclusions is NULL");
  }
  for (std::size_t k = 0; k < c.exclusion_count; ++k) {
    config.exclusions.push_back({c.exclusions[k].lo_hz, c.exclusions[k].hi_hz});
  }
  if (c.has_initial_guess) config.initial_guess = to_model(c.initial_guess);
  config.weighting =
      c.weighting == TB_WEIGHT_LINEAR ? fit::Weighting::linear_power : fit::Weighting::db;
  config.max_iterations = c.max_iterations;
  config.convergence_tol = c.convergence_tol;
  config.initial_damping = c.initial_damping;
  config.damping_factor = c.damping_factor;
  return config;
}

void write_string(const std::string& s, char* buffer, std::size_t capacity,
                  std::size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (buffer == nullptr || capacity < s.size() + 1) {
    throw BufferTooSmall("string buffer too small");
  }
  std::memcpy(buffer, s.c_str(), s.size() + 1);
}

}  // namespace

extern "C" {

const char* tb_status_string(tb_status status) {
  switch (status) {
    case TB_OK: return "ok";
    case TB_ERR_INVALID_ARGUMENT: return "invalid argument";
    case TB_ERR_CAPACITY: return "capacity exceeded";
    case TB_ERR_VALIDATION: return "validation failed";
    case TB_ERR_PRECONDITION: return "precondition violated";
    case TB_ERR_DOMAIN: return "domain error";
    case TB_ERR_TRUNCATION: return "truncation leakage too large";
    case TB_ERR_PARSE: return "parse error";
    case TB_ERR_CONVERGENCE: return "fit did not converge";
    case TB_ERR_IO: return "i/o error";
    case TB_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case TB_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* tb_last_error(void) { return last_error.c_str(); }

const char* tb_version(void) { return "0.1.0"; }

tb_status tb_state_make_fock(const int* occupations, const tb_mode_label* labels,
                             size_t count, int cutoff, tb_state** out) {
  return try_([&] {
    deref(out, "out") = nullptr;
    if (count > 0 && occupations == nullptr) throw InvalidArgument("occupations is NULL");
    std::vector<fock::ModeLabel> modes;
    if (labels != nullptr) {
      for (size_t k = 0; k < count; ++k) {
        modes.push_back({labels[k].polarization == TB_POL_V ? fock::Polarization::V
                                                           : fock::Polarization::H,
                         labels[k].frequency_tag, to_port(labels[k].port)});
      }
    }
    *out = new tb_state{
        fock::make_fock(std::span<const int>(occupations, count), cutoff, std::move(modes))};
  });
}

tb_status tb_state_make_twin_mixture(const double* rho_re, const double* rho_im,
                                     size_t dim, int cutoff, tb_state** out) {
  return try_([&] {
    deref(out, "out") = nullptr;
    deref(rho_re, "rho_re");
    Eigen::MatrixXcd rho(dim, dim);
    for (size_t r = 0; r < dim; ++r) {
      for (size_t c = 0; c < dim; ++c) {
        rho(r, c) = {rho_re[r * dim + c], rho_im ? rho_im[r * dim + c] : 0.0};
      }
    }
    *out = new tb_state{fock::make_twin_mode_mixture(rho, cutoff)};
  });
}

tb_status tb_state_make_coherent_pair(double alpha_a_re, double alpha_a_im,
                                      double alpha_b_re, double alpha_b_im,
                                      int cutoff, tb_state** out, double* leakage,
                                      int* truncation_warning) {
  return try_([&] {
    deref(out, "out") = nullptr;
    fock::TruncatedState t = fock::make_coherent_pair(
        {alpha_a_re, alpha_a_im}, {alpha_b_re, alpha_b_im}, cutoff);
    if (leakage) *leakage = t.leakage;
    if (truncation_warning) *truncation_warning = t.truncation_warning ? 1 : 0;
    *out = new tb_state{std::move(t.state)};
  });
}

tb_status tb_state_apply_beam_splitter(const tb_state* state, double mixing_angle,
                                       tb_splitter_convention convention,
                                       tb_state** out) {
  return try_([&] {
    deref(out, "out") = nullptr;
    const auto conv = convention == TB_SPLITTER_ROTATION
                          ? fock::SplitterConvention::rotation
                          : fock::SplitterConvention::symmetric_i;
    *out = new tb_state{
        fock::apply_beam_splitter(deref(state, "state").value, mixing_angle, conv)};
  });
}

tb_status tb_state_apply_waveplate(const tb_state* state, double theta,
                                   tb_state** out) {
  return try_([&] {
    deref(out, "out") = nullptr;
    *out = new tb_state{
        fock::apply_waveplate_polarizer(deref(state, "state").value, theta)};
  });
}

tb_status tb_state_norm(const tb_state* state, double* out) {
  return try_([&] { deref(out, "out") = deref(state, "state").value.norm(); });
}

tb_status tb_state_mode_count(const tb_state* state, size_t* out) {
  return try_([&] { deref(out, "out") = deref(state, "state").value.mode_count(); });
}

tb_status tb_state_number_difference(const tb_state* state, tb_port c, tb_port d,
                                     int* values, double* probabilities,
                                     size_t capacity, size_t* count, double* mean,
                                     double* variance) {
  return try_([&] {
    const fock::ScatterOutcome outcome = fock::number_difference_stats(
        deref(state, "state").value, to_port(c), to_port(d));
    if (mean) *mean = outcome.mean;
    if (variance) *variance = outcome.variance;
    if (count) *count = outcome.distribution.size();
    if (capacity < outcome.distribution.size()) {
      if (values == nullptr && probabilities == nullptr) return;
      throw BufferTooSmall("distribution buffer too small");
    }
    size_t k = 0;
    for (const auto& [value, p] : outcome.distribution) {
      if (values) values[k] = value;
      if (probabilities) probabilities[k] = p;
      ++k;
    }
  });
}

tb_status tb_state_coincidence(const tb_state* state, tb_port c, tb_port d,
                               double* out) {
  return try_([&] {
    deref(out, "out") =
        fock::coincidence_probability(deref(state, "state").value, to_port(c), to_port(d));
  });
}

void tb_state_free(tb_state* state) { delete state; }

tb_status tb_vacuum_covariance(double cov[16]) {
  return try_([&] { from_cov(quadrature::vacuum_covariance(), cov); });
}

tb_status tb_twin_beam_covariance(double squeeze_r, double cov[16]) {
  return try_([&] { from_cov(quadrature::twin_beam_covariance(squeeze_r), cov); });
}

tb_status tb_quadrature_is_physical(const double cov[16], int* out) {
  return try_([&] { deref(out, "out") = quadrature::is_physical(to_cov(cov)) ? 1 : 0; });
}

tb_status tb_quadrature_difference_stds(const tb_quadrature_state* s,
                                        double* dx_minus, double* dp_minus) {
  return try_([&] {
    const auto stats =
        quadrature::quadrature_difference_stds(to_quadrature(deref(s, "state")));
    if (dx_minus) *dx_minus = stats.dX_minus;
    if (dp_minus) *dp_minus = stats.dP_minus;
  });
}

tb_status tb_quadrature_number_difference_std(const tb_quadrature_state* s,
                                              double theta, int generalized,
                                              double* out) {
  return try_([&] {
    deref(out, "out") = quadrature::number_difference_std(
        to_quadrature(deref(s, "state")), theta,
        generalized ? quadrature::MeanBalance::generalized
                    : quadrature::MeanBalance::require_balanced);
  });
}

tb_status tb_quadrature_cross_check(double alpha_re, double alpha_im,
                                    const double cov[16], int cutoff, double theta,
                                    double* linearized, double* exact,
                                    double* relative_error, double* leakage) {
  return try_([&] {
    const auto report = quadrature::cross_check_against_fock(
        {alpha_re, alpha_im}, to_cov(cov), cutoff, theta);
    if (linearized) *linearized = report.linearized;
    if (exact) *exact = report.exact;
    if (relative_error) *relative_error = report.relative_error;
    if (leakage) *leakage = report.leakage;
  });
}

tb_status tb_opo_derive(const tb_opo_params* params, tb_model_params* out) {
  return try_([&] {
    const tb_opo_params& p = deref(params, "params");
    deref(out, "out") = from_model(
        opo::OpoParams{p.transmission, p.loss, p.fsr_hz, p.s0_dbm}.model());
  });
}

tb_status tb_intensity_diff_spectrum(double u, double xi, double* out) {
  return try_([&] { deref(out, "out") = opo::intensity_diff_spectrum(u, xi); });
}

tb_status tb_phase_diff_spectrum(double u, double xi, double* out) {
  return try_([&] { deref(out, "out") = opo::phase_diff_spectrum(u, xi); });
}

tb_status tb_distinguishable_phase_spectrum(double u, double* out) {
  return try_([&] { deref(out, "out") = opo::distinguishable_phase_spectrum(u); });
}

tb_status tb_uncertainty_product(double u, double xi, double* out) {
  return try_([&] { deref(out, "out") = opo::uncertainty_product(u, xi); });
}

tb_status tb_opo_covariance(double u, double xi, double cov[16]) {
  return try_([&] { from_cov(opo::opo_covariance(u, xi), cov); });
}

tb_status tb_spectrum_eval(const tb_model_params* params, tb_spectrum_kind kind,
                           const double* nu_hz, size_t count, int as_dbm,
                           double* values) {
  return try_([&] {
    if (count > 0) deref(values, "values");
    const opo::SpectrumCurve curve = eval_curve(params, kind, nu_hz, count, as_dbm);
    std::copy(curve.values.begin(), curve.values.end(), values);
  });
}

tb_status tb_spectrum_write_csv(const tb_model_params* params, tb_spectrum_kind kind,
                                const double* nu_hz, size_t count, int as_dbm,
                                const char* path) {
  return try_([&] {
    const opo::SpectrumCurve curve = eval_curve(params, kind, nu_hz, count, as_dbm);
    std::ofstream file(path_arg(path));
    if (!file) throw IoError(std::string("cannot write ") + path);
    opo::write_curve_csv(file, curve);
    if (!file) throw IoError(std::string("write failed for ") + path);
  });
}

tb_status tb_linear_grid(double lo_hz, double hi_hz, double step_hz, double* out,
                         size_t capacity, size_t* count) {
  return try_([&] {
    const std::vector<double> grid = fit::linear_grid(lo_hz, hi_hz, step_hz);
    if (count) *count = grid.size();
    if (capacity < grid.size()) {
      if (out == nullptr) return;
      throw BufferTooSmall("grid buffer too small");
    }
    if (!grid.empty()) std::copy(grid.begin(), grid.end(), &deref(out, "out"));
  });
}

tb_status tb_trace_load_file(const char* path, tb_trace** out) {
  return try_([&] {
    deref(out, "out") = nullptr;
    *out = new tb_trace{fit::load_trace_file(path_arg(path))};
  });
}

tb_status tb_trace_load_buffer(const char* data, size_t length, tb_trace** out) {
  return try_([&] {
    deref(out, "out") = nullptr;
    std::istringstream in(std::string(&deref(data, "data"), length));
    *out = new tb_trace{fit::load_trace(in)};
  });
}

tb_status tb_trace_from_arrays(const double* frequency_hz, const double* power_dbm,
                               size_t count, double rbw_hz, tb_trace** out) {
  return try_([&] {
    deref(out, "out") = nullptr;
    const auto f = view(frequency_hz, count);
    const auto p = view(power_dbm, count);
    fit::SpectrumTrace trace{{f.begin(), f.end()}, {p.begin(), p.end()}, rbw_hz, {}};
    trace.validate();
    *out = new tb_trace{std::move(trace)};
  });
}

tb_status tb_trace_synth(const tb_model_params* params, tb_spectrum_kind kind,
                         const double* grid_hz, size_t count, double noise_db,
                         uint64_t seed, double rbw_hz, tb_trace** out) {
  return try_([&] {
    deref(out, "out") = nullptr;
    *out = new tb_trace{fit::synth_trace(to_model(deref(params, "params")),
                                         to_kind(kind), view(grid_hz, count),
                                         noise_db, seed, rbw_hz)};
  });
}

tb_status tb_trace_size(const tb_trace* trace, size_t* out) {
  return try_([&] { deref(out, "out") = deref(trace, "trace").value.size(); });
}

tb_status tb_trace_samples(const tb_trace* trace, double* frequency_hz,
                           double* power_dbm, size_t capacity) {
  return try_([&] {
    const fit::SpectrumTrace& t = deref(trace, "trace").value;
    const size_t n = std::min(capacity, t.size());
    if (frequency_hz) std::copy_n(t.frequency_hz.begin(), n, frequency_hz);
    if (power_dbm) std::copy_n(t.power_dbm.begin(), n, power_dbm);
  });
}

tb_status tb_trace_write_file(const tb_trace* trace, const char* path) {
  return try_([&] {
    const fit::SpectrumTrace& t = deref(trace, "trace").value;
    std::ofstream file(path_arg(path));
    if (!file) throw IoError(std::string("cannot write ") + path);
    fit::write_trace_csv(file, t);
    if (!file) throw IoError(std::string("write failed for ") + path);
  });
}

tb_status tb_trace_subtract_floor(const tb_trace* trace, const tb_trace* floor,
                                  tb_trace** out, size_t* dropped) {
  return try_([&] {
    deref(out, "out") = nullptr;
    fit::FloorSubtraction result = fit::subtract_noise_floor(
        deref(trace, "trace").value, deref(floor, "floor").value);
    if (dropped) *dropped = result.dropped_hz.size();
    *out = new tb_trace{std::move(result.trace)};
  });
}

void tb_trace_free(tb_trace* trace) { delete trace; }

void tb_fit_config_analyzer_defaults(tb_fit_config* config) {
  static const fit::FitConfig defaults = fit::FitConfig::analyzer_defaults();
  static const tb_band exclusion{defaults.exclusions.front().lo_hz,
                                 defaults.exclusions.front().hi_hz};
  if (config == nullptr) return;
  config->fit_window = {defaults.fit_window.lo_hz, defaults.fit_window.hi_hz};
  config->exclusions = &exclusion;
  config->exclusion_count = 1;
  config->has_initial_guess = 0;
  config->initial_guess = {0.0, 0.0, 0.0};
  config->weighting = TB_WEIGHT_DB;
  config->max_iterations = defaults.max_iterations;
  config->convergence_tol = defaults.convergence_tol;
  config->initial_damping = defaults.initial_damping;
  config->damping_factor = defaults.damping_factor;
}

tb_status tb_fit_intensity(const tb_trace* trace, const tb_fit_config* config,
                           tb_fit** out) {
  return try_([&] {
    deref(out, "out") = nullptr;
    const fit::FitConfig cfg = to_config(deref(config, "config"));
    try {
      *out = new tb_fit{fit::fit_intensity_spectrum(deref(trace, "trace").value, cfg)};
    } catch (const fit::ConvergenceError& e) {
      *out = new tb_fit{e.last_iterate()};
      throw;
    }
  });
}

tb_status tb_fit_params(const tb_fit* fit, tb_model_params* params,
                        double* rms_residual_db, size_t* points_used) {
  return try_([&] {
    const fit::FitResult& r = deref(fit, "fit").value;
    if (params) *params = from_model(r.params);
    if (rms_residual_db) *rms_residual_db = r.rms_residual_db;
    if (points_used) *points_used = r.points_used;
  });
}

tb_status tb_fit_stderr(const tb_fit* fit, double* s0_dbm, double* xi,
                        double* delta_hz) {
  return try_([&] {
    const fit::FitResult& r = deref(fit, "fit").value;
    if (s0_dbm) *s0_dbm = std::sqrt(r.covariance(0, 0));
    if (xi) *xi = std::sqrt(r.covariance(1, 1));
    if (delta_hz) *delta_hz = std::sqrt(r.covariance(2, 2));
  });
}

tb_status tb_fit_warning_count(const tb_fit* fit, size_t* out) {
  return try_([&] { deref(out, "out") = deref(fit, "fit").value.warnings.size(); });
}

tb_status tb_fit_export(const tb_fit* fit, tb_export_format format, char* buffer,
                        size_t capacity, size_t* needed) {
  return try_([&] {
    const fit::FitResult& r = deref(fit, "fit").value;
    write_string(format == TB_EXPORT_JSON ? fit::fit_result_json(r)
                                          : fit::fit_result_text(r),
                 buffer, capacity, needed);
  });
}

tb_status tb_fit_predict_phase(const tb_fit* fit, const double* nu_hz, size_t count,
                               double* values_dbm) {
  return try_([&] {
    if (count > 0) deref(values_dbm, "values_dbm");
    const opo::SpectrumCurve curve =
        fit::predict_phase_spectrum(deref(fit, "fit").value, view(nu_hz, count));
    std::copy(curve.values.begin(), curve.values.end(), values_dbm);
  });
}

tb_status tb_fit_report_squeezing(const tb_trace* trace, const tb_fit* fit,
                                  const tb_trace* floor, tb_squeezing_report* out) {
  return try_([&] {
    std::optional<fit::SpectrumTrace> floor_trace;
    if (floor) floor_trace = floor->value;
    const fit::SqueezingReport r = fit::report_squeezing(
        deref(trace, "trace").value, deref(fit, "fit").value, floor_trace);
    tb_squeezing_report& o = deref(out, "out");
    o.has_raw = r.raw_db.has_value();
    o.raw_db = r.raw_db.value_or(0.0);
    o.has_corrected = r.corrected_db.has_value();
    o.corrected_db = r.corrected_db.value_or(0.0);
    o.complete_correlation = r.complete_correlation;
    o.corrected_complete_correlation = r.corrected_complete_correlation;
    o.bandwidth_hz = r.bandwidth_hz;
    o.dropped_points = r.dropped_points;
  });
}

void tb_fit_free(tb_fit* fit) { delete fit; }

}  // extern "C"
