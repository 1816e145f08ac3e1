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

// twinbeam: command-line front end over libtwinbeam's C interface.

#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "run_config.hpp"
#include "twinbeam/twinbeam.h"

namespace {

using twinbeam::cli::BandSpec;
using twinbeam::cli::RunConfig;

enum ExitCode {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitParse = 3,
  kExitValidation = 4,
  kExitConvergence = 5,
  kExitIo = 6,
};

class Failure : public std::runtime_error {
 public:
  Failure(int code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  int code() const noexcept { return code_; }

 private:
  int code_;
};

int exit_code_for(tb_status status) {
  switch (status) {
    case TB_OK: return kExitOk;
    case TB_ERR_PARSE: return kExitParse;
    case TB_ERR_CONVERGENCE: return kExitConvergence;
    case TB_ERR_IO: return kExitIo;
    case TB_ERR_INVALID_ARGUMENT:
    case TB_ERR_CAPACITY:
    case TB_ERR_VALIDATION:
    case TB_ERR_PRECONDITION:
    case TB_ERR_DOMAIN:
    case TB_ERR_TRUNCATION: return kExitValidation;
    default: return kExitInternal;
  }
}

void check(tb_status status, const std::string& context = "") {
  if (status == TB_OK) return;
  std::string message = tb_last_error();
  if (!context.empty()) message = context + ": " + message;
  throw Failure(exit_code_for(status), message);
}

struct StateDeleter {
  void operator()(tb_state* s) const { tb_state_free(s); }
};
struct TraceDeleter {
  void operator()(tb_trace* t) const { tb_trace_free(t); }
};
struct FitDeleter {
  void operator()(tb_fit* f) const { tb_fit_free(f); }
};
using StatePtr = std::unique_ptr<tb_state, StateDeleter>;
using TracePtr = std::unique_ptr<tb_trace, TraceDeleter>;
using FitPtr = std::unique_ptr<tb_fit, FitDeleter>;

// Flags that override config keys after the file has been merged.
class Overrides {
 public:
  CLI::Option* add(CLI::App* app, const std::string& flag, const std::string& key,
                   const std::string& help) {
    entries_.push_back({key, {}, nullptr, false, {}});
    Entry& e = entries_.back();
    e.option = app->add_option(flag, e.text, help + " [" + key + "]");
    return e.option;
  }

  CLI::Option* add_list(CLI::App* app, const std::string& flag,
                        const std::string& key, const std::string& help,
                        int count) {
    entries_.push_back({key, {}, nullptr, true, {}});
    Entry& e = entries_.back();
    e.option = app->add_option(flag, e.list, help + " [" + key + "]")
                   ->expected(count)
                   ->allow_extra_args(false);
    return e.option;
  }

  void apply(RunConfig& config) const {
    for (const Entry& e : entries_) {
      if (e.option->count() == 0) continue;
      if (!e.is_list) {
        config.set(e.key, e.text);
        continue;
      }
      std::string joined;
      for (const std::string& item : e.list) {
        joined += (joined.empty() ? "" : " ") + item;
      }
      config.set(e.key, joined);
    }
  }

 private:
  struct Entry {
    std::string key;
    std::string text;
    CLI::Option* option;
    bool is_list;
    std::vector<std::string> list;
  };
  std::deque<Entry> entries_;
};

struct Common {
  std::string config_path;
  std::string out_path;
  Overrides overrides;

  RunConfig resolve() const {
    RunConfig config = RunConfig::defaults();
    if (!config_path.empty()) config.merge_file(config_path);
    overrides.apply(config);
    return config;
  }
};

void add_common(CLI::App* app, Common& common, bool out_required = false) {
  app->add_option("-c,--config", common.config_path, "Run configuration file");
  auto* out = app->add_option("-o,--out", common.out_path, "Output file");
  if (out_required) out->required();
}

// Writes to a file when a path is given, else to stdout. Content is built in
// memory first so a failure never leaves partial output behind.
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw Failure(kExitIo, "cannot write " + path);
  out << text;
  if (!out) throw Failure(kExitIo, "write failed for " + path);
}

std::ostringstream number_stream() {
  std::ostringstream out;
  out << std::setprecision(12);
  return out;
}

std::vector<double> grid_from(const RunConfig& config, const std::string& key) {
  const std::vector<double> spec = config.get_doubles(key);
  if (spec.size() != 3) {
    throw Failure(kExitValidation, key + " needs three numbers: lo hi step");
  }
  size_t count = 0;
  check(tb_linear_grid(spec[0], spec[1], spec[2], nullptr, 0, &count), key);
  std::vector<double> grid(count);
  check(tb_linear_grid(spec[0], spec[1], spec[2], grid.data(), grid.size(), &count),
        key);
  return grid;
}

tb_spectrum_kind parse_kind(const std::string& name) {
  if (name == "intensity") return TB_SPECTRUM_INTENSITY;
  if (name == "phase") return TB_SPECTRUM_PHASE;
  if (name == "flat") return TB_SPECTRUM_FLAT;
  throw Failure(kExitValidation, "unknown spectrum kind '" + name + "'");
}

int parse_units(const std::string& name) {
  if (name == "dbm") return 1;
  if (name == "relative") return 0;
  throw Failure(kExitValidation, "units must be dbm or relative, got '" + name + "'");
}

struct ModelFlags {
  double transmission = 0.0;
  double loss = 0.0;
  double fsr_hz = 0.0;
  CLI::Option* transmission_opt = nullptr;
};

void add_model_flags(CLI::App* app, Common& common, ModelFlags& flags) {
  common.overrides.add(app, "--s0-dbm", "opo_spectra.s0_dbm", "Shot-noise level");
  common.overrides.add(app, "--xi", "opo_spectra.xi", "Correlation coefficient");
  common.overrides.add(app, "--delta-hz", "opo_spectra.delta_hz",
                       "Cavity linewidth (FWHM)");
  flags.transmission_opt =
      app->add_option("--transmission", flags.transmission,
                      "Output-coupler transmission T; derives xi and delta");
  auto* loss = app->add_option("--loss", flags.loss, "Single-pass loss A");
  auto* fsr = app->add_option("--fsr-hz", flags.fsr_hz, "Free spectral range");
  flags.transmission_opt->needs(loss)->needs(fsr);
  loss->needs(flags.transmission_opt);
  fsr->needs(flags.transmission_opt);
}

tb_model_params model_from(const RunConfig& config, const ModelFlags& flags) {
  tb_model_params params{config.get_double("opo_spectra.s0_dbm"),
                         config.get_double("opo_spectra.xi"),
                         config.get_double("opo_spectra.delta_hz")};
  if (flags.transmission_opt != nullptr && flags.transmission_opt->count() > 0) {
    const tb_opo_params opo{flags.transmission, flags.loss, flags.fsr_hz,
                            params.s0_dbm};
    check(tb_opo_derive(&opo, &params), "cavity parameters");
  }
  return params;
}

std::string shot_noise_path(const std::string& path) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return path + ".shot_noise.csv";
  }
  return path.substr(0, dot) + ".shot_noise" + path.substr(dot);
}

// ---- hom -------------------------------------------------------------------

struct HomArgs {
  Common common;
  int n_a = 1;
  int n_b = 1;
  bool distinguishable = false;
  std::string format = "structured";
};

void run_hom(const HomArgs& args) {
  const RunConfig config = args.common.resolve();
  const int cutoff = static_cast<int>(config.get_int("fock_engine.cutoff"));
  const double theta = config.get_double("hom.theta_rad");
  if (args.n_a < 0 || args.n_b < 0) {
    throw Failure(kExitValidation, "occupations must be non-negative");
  }
  const int occupations[2] = {args.n_a, args.n_b};
  const tb_mode_label labels[2] = {
      {TB_POL_H, 0, TB_PORT_A},
      {TB_POL_V, args.distinguishable ? 1 : 0, TB_PORT_A}};
  tb_state* raw = nullptr;
  check(tb_state_make_fock(occupations, labels, 2, cutoff, &raw), "input state");
  const StatePtr input(raw);
  check(tb_state_apply_waveplate(input.get(), theta, &raw), "waveplate");
  const StatePtr output(raw);

  size_t count = 0;
  double mean = 0.0, variance = 0.0;
  check(tb_state_number_difference(output.get(), TB_PORT_C, TB_PORT_D, nullptr,
                                   nullptr, 0, &count, nullptr, nullptr));
  std::vector<int> values(count);
  std::vector<double> probs(count);
  check(tb_state_number_difference(output.get(), TB_PORT_C, TB_PORT_D,
                                   values.data(), probs.data(), count, &count,
                                   &mean, &variance));
  double coincidence = 0.0;
  check(tb_state_coincidence(output.get(), TB_PORT_C, TB_PORT_D, &coincidence));

  std::ostringstream out = number_stream();
  if (args.format == "csv") {
    out << "n_minus,probability\n";
    for (size_t i = 0; i < count; ++i) out << values[i] << ',' << probs[i] << '\n';
  } else {
    out << "n_a = " << args.n_a << '\n'
        << "n_b = " << args.n_b << '\n'
        << "distinguishable = " << (args.distinguishable ? "true" : "false") << '\n'
        << "theta_rad = " << theta << '\n'
        << "mean_n_minus = " << mean << '\n'
        << "delta_n_minus = " << std::sqrt(std::max(0.0, variance)) << '\n'
        << "coincidence_probability = " << coincidence << '\n';
    for (size_t i = 0; i < count; ++i) {
      out << "p(n_minus=" << values[i] << ") = " << probs[i] << '\n';
    }
  }
  emit(args.common.out_path, out.str());
}

// ---- limits ----------------------------------------------------------------

struct LimitsArgs {
  Common common;
  int n_max = 8;
};

double balanced_splitter_std(int n_a, int n_b, int cutoff) {
  const int occupations[2] = {n_a, n_b};
  tb_state* raw = nullptr;
  check(tb_state_make_fock(occupations, nullptr, 2, cutoff, &raw), "input state");
  const StatePtr input(raw);
  check(tb_state_apply_beam_splitter(input.get(), std::acos(-1.0) / 4.0,
                                     TB_SPLITTER_SYMMETRIC_I, &raw),
        "beam splitter");
  const StatePtr output(raw);
  size_t count = 0;
  double variance = 0.0;
  check(tb_state_number_difference(output.get(), TB_PORT_C, TB_PORT_D, nullptr,
                                   nullptr, 0, &count, nullptr, &variance));
  return std::sqrt(std::max(0.0, variance));
}

void run_limits(const LimitsArgs& args) {
  const RunConfig config = args.common.resolve();
  const int cutoff = static_cast<int>(config.get_int("fock_engine.cutoff"));
  if (args.n_max < 0) throw Failure(kExitValidation, "n_max must be non-negative");
  if (2 * args.n_max > cutoff) {
    throw Failure(kExitValidation,
                  "n_max = " + std::to_string(args.n_max) +
                      " needs fock_engine.cutoff >= " +
                      std::to_string(2 * args.n_max));
  }
  std::ostringstream out = number_stream();
  out << "n,delta_n_minus_n0,delta_n_minus_nn,sqrt_n,n_ref\n";
  for (int n = 0; n <= args.n_max; ++n) {
    out << n << ',' << balanced_splitter_std(n, 0, cutoff) << ','
        << balanced_splitter_std(n, n, cutoff) << ',' << std::sqrt(double(n)) << ','
        << n << '\n';
  }
  emit(args.common.out_path, out.str());
}

// ---- spectra ---------------------------------------------------------------

struct SpectraArgs {
  Common common;
  ModelFlags model;
  std::string kind = "intensity";
};

void run_spectra(const SpectraArgs& args) {
  const RunConfig config = args.common.resolve();
  const tb_model_params params = model_from(config, args.model);
  const std::vector<double> grid = grid_from(config, "opo_spectra.grid_hz");
  const int as_dbm = parse_units(config.get_string("opo_spectra.units"));
  const tb_spectrum_kind kind = parse_kind(args.kind);

  check(tb_spectrum_write_csv(&params, kind, grid.data(), grid.size(), as_dbm,
                              args.common.out_path.c_str()),
        "model spectrum");
  check(tb_spectrum_write_csv(&params, TB_SPECTRUM_FLAT, grid.data(), grid.size(),
                              as_dbm, shot_noise_path(args.common.out_path).c_str()));
}

// ---- fit -------------------------------------------------------------------

struct FitArgs {
  Common common;
  std::string trace_path;
  std::string floor_path;
  std::string out_prefix;
};

std::string export_fit(const tb_fit* fit, tb_export_format format) {
  size_t needed = 0;
  const tb_status probe = tb_fit_export(fit, format, nullptr, 0, &needed);
  if (probe != TB_ERR_BUFFER_TOO_SMALL) check(probe, "export");
  std::string buffer(needed, '\0');
  check(tb_fit_export(fit, format, buffer.data(), buffer.size(), &needed), "export");
  buffer.resize(needed - 1);
  return buffer;
}

std::string squeezing_lines(const tb_squeezing_report& r) {
  std::ostringstream out = number_stream();
  if (r.has_raw) {
    out << "squeezing_raw_db = " << r.raw_db << '\n';
  } else {
    out << "squeezing_raw_db = complete correlation at dc\n";
  }
  if (r.has_corrected || r.corrected_complete_correlation) {
    if (r.has_corrected) {
      out << "squeezing_corrected_db = " << r.corrected_db << '\n';
    } else {
      out << "squeezing_corrected_db = complete correlation at dc\n";
    }
    out << "floor_dropped_points = " << r.dropped_points << '\n';
  }
  out << "squeezing_bandwidth_hz = " << r.bandwidth_hz << '\n';
  return out.str();
}

tb_fit_config fit_config_from(const RunConfig& config, std::vector<tb_band>& storage) {
  tb_fit_config cfg;
  tb_fit_config_analyzer_defaults(&cfg);
  const std::vector<double> window = config.get_doubles("trace_fit.fit_window_hz");
  if (window.size() != 2) {
    throw Failure(kExitValidation, "trace_fit.fit_window_hz needs two numbers: lo hi");
  }
  cfg.fit_window = {window[0], window[1]};
  storage.clear();
  for (const BandSpec& b : config.get_bands("trace_fit.exclusions_hz")) {
    storage.push_back({b.lo_hz, b.hi_hz});
  }
  cfg.exclusions = storage.empty() ? nullptr : storage.data();
  cfg.exclusion_count = storage.size();
  const std::string weighting = config.get_string("trace_fit.weighting");
  if (weighting == "db") {
    cfg.weighting = TB_WEIGHT_DB;
  } else if (weighting == "linear") {
    cfg.weighting = TB_WEIGHT_LINEAR;
  } else {
    throw Failure(kExitValidation, "trace_fit.weighting must be db or linear");
  }
  cfg.max_iterations = static_cast<int>(config.get_int("trace_fit.max_iterations"));
  cfg.convergence_tol = config.get_double("trace_fit.convergence_tol");
  cfg.initial_damping = config.get_double("trace_fit.initial_damping");
  cfg.damping_factor = config.get_double("trace_fit.damping_factor");
  return cfg;
}

TracePtr load_trace(const std::string& path) {
  tb_trace* raw = nullptr;
  check(tb_trace_load_file(path.c_str(), &raw), path);
  return TracePtr(raw);
}

std::string default_prefix(const std::string& trace_path) {
  const auto slash = trace_path.find_last_of('/');
  const auto dot = trace_path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return trace_path;
  }
  return trace_path.substr(0, dot);
}

void run_fit(const FitArgs& args) {
  const RunConfig config = args.common.resolve();
  std::vector<tb_band> exclusions;
  const tb_fit_config cfg = fit_config_from(config, exclusions);

  const TracePtr trace = load_trace(args.trace_path);
  TracePtr floor;
  if (!args.floor_path.empty()) floor = load_trace(args.floor_path);

  tb_fit* raw = nullptr;
  const tb_status status = tb_fit_intensity(trace.get(), &cfg, &raw);
  const FitPtr fit(raw);
  check(status, "fit of " + args.trace_path);

  tb_squeezing_report report{};
  check(tb_fit_report_squeezing(trace.get(), fit.get(), floor.get(), &report),
        "squeezing report");

  size_t n = 0;
  check(tb_trace_size(trace.get(), &n));
  std::vector<double> nu(n);
  check(tb_trace_samples(trace.get(), nu.data(), nullptr, n));
  std::vector<double> positive;
  for (double f : nu) {
    if (f > 0.0) positive.push_back(f);
  }
  std::vector<double> phase(positive.size());
  check(tb_fit_predict_phase(fit.get(), positive.data(), positive.size(),
                             phase.data()),
        "phase prediction");
  std::ostringstream curve;
  curve << std::setprecision(17) << "frequency_hz,value,unit_tag\n";
  for (size_t i = 0; i < positive.size(); ++i) {
    curve << positive[i] << ',' << phase[i] << ",dBm\n";
  }

  const std::string text = export_fit(fit.get(), TB_EXPORT_TEXT) + squeezing_lines(report);
  const std::string json = export_fit(fit.get(), TB_EXPORT_JSON);
  const std::string prefix =
      args.out_prefix.empty() ? default_prefix(args.trace_path) : args.out_prefix;
  emit(prefix + ".fit.txt", text);
  emit(prefix + ".fit.json", json + "\n");
  emit(prefix + ".phase.csv", curve.str());
  std::cout << text;
}

// ---- uncertainty -----------------------------------------------------------

struct UncertaintyArgs {
  Common common;
};

void run_uncertainty(const UncertaintyArgs& args) {
  const RunConfig config = args.common.resolve();
  const double xi = config.get_double("opo_spectra.xi");
  const std::vector<double> grid = grid_from(config, "uncertainty.u_grid");
  std::ostringstream out = number_stream();
  out << "u,s_x,s_p,product,excess\n";
  for (double u : grid) {
    if (!(u > 0.0)) throw Failure(kExitValidation, "u grid must be positive");
    double sx = 0.0, sp = 0.0, product = 0.0;
    check(tb_intensity_diff_spectrum(u, xi, &sx));
    check(tb_phase_diff_spectrum(u, xi, &sp));
    check(tb_uncertainty_product(u, xi, &product));
    out << u << ',' << sx << ',' << sp << ',' << product << ',' << product - 1.0
        << '\n';
  }
  emit(args.common.out_path, out.str());
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
  Common common;
  ModelFlags model;
  std::string kind = "intensity";
};

void run_synth(const SynthArgs& args) {
  const RunConfig config = args.common.resolve();
  const tb_model_params params = model_from(config, args.model);
  const std::vector<double> grid = grid_from(config, "opo_spectra.grid_hz");
  const long long seed = config.get_int("synth.seed");
  if (seed < 0) throw Failure(kExitValidation, "synth.seed must be non-negative");
  tb_trace* raw = nullptr;
  check(tb_trace_synth(&params, parse_kind(args.kind), grid.data(), grid.size(),
                       config.get_double("synth.noise_db"),
                       static_cast<uint64_t>(seed), config.get_double("synth.rbw_hz"),
                       &raw),
        "synthetic trace");
  const TracePtr trace(raw);
  check(tb_trace_write_file(trace.get(), args.common.out_path.c_str()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Twin-beam interferometry and OPO noise-spectrum toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tb_version()));

  HomArgs hom;
  auto* hom_cmd = app.add_subcommand("hom", "Polarization HOM demonstration");
  add_common(hom_cmd, hom.common);
  hom_cmd->add_option("n_a", hom.n_a, "Photons in the H mode")->required();
  hom_cmd->add_option("n_b", hom.n_b, "Photons in the V mode")->required();
  hom_cmd->add_flag("--distinguishable", hom.distinguishable,
                    "Put the V photons on a different frequency tag");
  hom.common.overrides.add(hom_cmd, "--theta", "hom.theta_rad",
                           "Half-wave-plate angle in radians");
  hom.common.overrides.add(hom_cmd, "--cutoff", "fock_engine.cutoff",
                           "Fock-space cutoff");
  hom_cmd->add_option("--format", hom.format, "structured or csv")
      ->check(CLI::IsMember({"structured", "csv"}));

  LimitsArgs limits;
  auto* limits_cmd =
      app.add_subcommand("limits", "Classical versus Heisenberg scaling table");
  add_common(limits_cmd, limits.common);
  limits_cmd->add_option("n_max", limits.n_max, "Largest photon number")->required();
  limits.common.overrides.add(limits_cmd, "--cutoff", "fock_engine.cutoff",
                              "Fock-space cutoff");

  SpectraArgs spectra;
  auto* spectra_cmd = app.add_subcommand("spectra", "Model noise spectra as CSV");
  add_common(spectra_cmd, spectra.common, true);
  spectra_cmd->add_option("--kind", spectra.kind, "intensity, phase or flat")
      ->check(CLI::IsMember({"intensity", "phase", "flat"}));
  add_model_flags(spectra_cmd, spectra.common, spectra.model);
  spectra.common.overrides.add_list(spectra_cmd, "--grid", "opo_spectra.grid_hz",
                                    "Frequency grid: lo hi step", 3);
  spectra.common.overrides.add(spectra_cmd, "--units", "opo_spectra.units",
                               "dbm or relative");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit an intensity-difference trace");
  fit_cmd->add_option("-c,--config", fit.common.config_path, "Run configuration file");
  fit_cmd->add_option("trace", fit.trace_path, "Trace CSV")->required();
  fit_cmd->add_option("--floor", fit.floor_path, "Detection noise-floor trace CSV");
  fit_cmd->add_option("-o,--out-prefix", fit.out_prefix,
                      "Prefix for .fit.txt, .fit.json and .phase.csv outputs");
  fit.common.overrides.add_list(fit_cmd, "--window", "trace_fit.fit_window_hz",
                                "Fit window: lo hi", 2);
  fit.common.overrides.add(fit_cmd, "--exclusions", "trace_fit.exclusions_hz",
                           "Excluded bands lo:hi[,lo:hi...] or none");
  fit.common.overrides.add(fit_cmd, "--weighting", "trace_fit.weighting",
                           "db or linear");
  fit.common.overrides.add(fit_cmd, "--max-iterations", "trace_fit.max_iterations",
                           "Iteration limit");

  UncertaintyArgs uncertainty;
  auto* uncertainty_cmd =
      app.add_subcommand("uncertainty", "Spectral uncertainty-product table");
  add_common(uncertainty_cmd, uncertainty.common);
  uncertainty.common.overrides.add(uncertainty_cmd, "--xi", "opo_spectra.xi",
                                   "Correlation coefficient");
  uncertainty.common.overrides.add_list(uncertainty_cmd, "--u-grid",
                                        "uncertainty.u_grid",
                                        "Normalized frequency grid: lo hi step", 3);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Synthesize a noisy trace CSV");
  add_common(synth_cmd, synth.common, true);
  synth_cmd->add_option("--kind", synth.kind, "intensity, phase or flat")
      ->check(CLI::IsMember({"intensity", "phase", "flat"}));
  add_model_flags(synth_cmd, synth.common, synth.model);
  synth.common.overrides.add_list(synth_cmd, "--grid", "opo_spectra.grid_hz",
                                  "Frequency grid: lo hi step", 3);
  synth.common.overrides.add(synth_cmd, "--noise-db", "synth.noise_db",
                             "Gaussian noise rms in dB");
  synth.common.overrides.add(synth_cmd, "--seed", "synth.seed", "Noise seed");
  synth.common.overrides.add(synth_cmd, "--rbw-hz", "synth.rbw_hz",
                             "Resolution bandwidth metadata");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*hom_cmd) run_hom(hom);
    if (*limits_cmd) run_limits(limits);
    if (*spectra_cmd) run_spectra(spectra);
    if (*fit_cmd) run_fit(fit);
    if (*uncertainty_cmd) run_uncertainty(uncertainty);
    if (*synth_cmd) run_synth(synth);
  } catch (const Failure& e) {
    std::cerr << "twinbeam: " << e.what() << '\n';
    return e.code();
  } catch (const twinbeam::cli::ConfigFileError& e) {
    std::cerr << "twinbeam: " << e.what() << '\n';
    return kExitIo;
  } catch (const twinbeam::cli::ConfigError& e) {
    std::cerr << "twinbeam: " << e.what() << '\n';
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "twinbeam: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}
