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

#include "twinbeam/trace_fit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

namespace twinbeam::fit {
namespace {

constexpr double kDbPerNeper = 10.0 / std::numbers::ln10;
constexpr double kXiFloor = 1e-9;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_number(std::string_view field, std::size_t line, const char* what) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError(std::string("non-numeric ") + what + " '" +
                         std::string(field) + "'",
                     line);
  }
  return value;
}

double to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
double to_dbm(double mw) { return 10.0 * std::log10(mw); }

// Floor power in mW at f, interpolated linearly in mW.
double floor_mw_at(const SpectrumTrace& floor, double f) {
  const auto& x = floor.frequency_hz;
  if (f < x.front() || f > x.back()) {
    throw ValidationError("noise floor does not cover " + std::to_string(f) + " Hz");
  }
  auto hi = std::lower_bound(x.begin(), x.end(), f);
  const std::size_t j = std::distance(x.begin(), hi);
  if (x[j] == f) return to_mw(floor.power_dbm[j]);
  const double t = (f - x[j - 1]) / (x[j] - x[j - 1]);
  return (1.0 - t) * to_mw(floor.power_dbm[j - 1]) + t * to_mw(floor.power_dbm[j]);
}

void validate_config(const SpectrumTrace& trace, const FitConfig& config) {
  if (!(config.fit_window.lo_hz < config.fit_window.hi_hz)) {
    throw ValidationError("fit window must satisfy lo < hi");
  }
  const double first = trace.frequency_hz.front(), last = trace.frequency_hz.back();
  for (const Band& band : config.exclusions) {
    if (!(band.lo_hz < band.hi_hz)) {
      throw ValidationError("exclusion band must satisfy lo < hi");
    }
    if (band.lo_hz < first || band.hi_hz > last) {
      throw ValidationError("exclusion band [" + std::to_string(band.lo_hz) +
                            ", " + std::to_string(band.hi_hz) +
                            "] Hz lies outside the trace span");
    }
  }
  if (config.initial_guess) {
    const opo::ModelParams& g = *config.initial_guess;
    if (!(g.xi > 0.0 && g.xi <= 1.0)) {
      throw ValidationError("initial xi guess must lie in (0, 1]");
    }
    opo::validate(g);
  }
  if (config.max_iterations <= 0) {
    throw ValidationError("max_iterations must be positive");
  }
  if (!(config.convergence_tol > 0.0) || !(config.initial_damping > 0.0) ||
      !(config.damping_factor > 1.0)) {
    throw ValidationError("invalid optimizer tolerances or damping schedule");
  }
}

double model_db(const Eigen::Vector3d& p, double nu) {
  const double u2 = (nu / p[2]) * (nu / p[2]);
  return p[0] + 10.0 * std::log10((1.0 - p[1] + u2) / (1.0 + u2));
}

struct Problem {
  std::vector<double> nu;
  std::vector<double> y_db;
  Weighting weighting = Weighting::db;
  double reference_mw = 1.0;

  Eigen::VectorXd residuals(const Eigen::Vector3d& p) const {
    Eigen::VectorXd r(nu.size());
    for (std::size_t i = 0; i < nu.size(); ++i) {
      const double m = model_db(p, nu[i]);
      r[i] = weighting == Weighting::db
                 ? m - y_db[i]
                 : (to_mw(m) - to_mw(y_db[i])) / reference_mw;
    }
    return r;
  }

  Eigen::MatrixXd jacobian(const Eigen::Vector3d& p) const {
    Eigen::MatrixXd j(nu.size(), 3);
    for (std::size_t i = 0; i < nu.size(); ++i) {
      const double u = nu[i] / p[2];
      const double w = 1.0 / (1.0 + u * u);
      const double level = (1.0 - p[1] + u * u) * w;
      Eigen::RowVector3d row(1.0, -kDbPerNeper * w / level,
                             -kDbPerNeper * p[1] * 2.0 * u * u * w * w /
                                 (p[2] * level));
      if (weighting == Weighting::linear_power) {
        row *= to_mw(model_db(p, nu[i])) / (kDbPerNeper * reference_mw);
      }
      j.row(i) = row;
    }
    return j;
  }

  double rms_db(const Eigen::Vector3d& p) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nu.size(); ++i) {
      const double d = model_db(p, nu[i]) - y_db[i];
      sum += d * d;
    }
    return std::sqrt(sum / nu.size());
  }
};

Eigen::Vector3d clamp_params(Eigen::Vector3d p, const Eigen::Vector3d& previous) {
  p[1] = std::clamp(p[1], kXiFloor, 1.0);
  if (!(p[2] > 0.0)) p[2] = previous[2] * 0.1;
  return p;
}

FitResult make_result(const Problem& problem, const Eigen::Vector3d& p,
                      const FitConfig& config, int iterations) {
  FitResult result;
  result.params = {p[0], p[1], p[2]};
  result.points_used = problem.nu.size();
  result.iterations = iterations;
  result.config = config;
  result.rms_residual_db = problem.rms_db(p);
  const Eigen::MatrixXd j = problem.jacobian(p);
  const double ssr = problem.residuals(p).squaredNorm();
  const double dof = static_cast<double>(problem.nu.size()) - 3.0;
  const Eigen::Matrix3d normal = j.transpose() * j;
  const Eigen::Vector3d diag = normal.diagonal();
  Eigen::FullPivLU<Eigen::Matrix3d> lu;
  Eigen::Vector3d scale = Eigen::Vector3d::Zero();
  if ((diag.array() > 0.0).all()) {
    scale = diag.array().rsqrt();
    lu.compute(scale.asDiagonal() * normal * scale.asDiagonal());
  }
  if (scale.minCoeff() > 0.0 && lu.isInvertible()) {
    result.covariance =
        scale.asDiagonal() * lu.inverse() * scale.asDiagonal() * (ssr / dof);
  } else {
    result.covariance.setConstant(std::numeric_limits<double>::quiet_NaN());
    result.warnings.emplace_back("normal matrix is singular; covariance undefined");
  }
  if (p[1] >= 1.0 - 1e-9) {
    result.warnings.emplace_back("xi pinned at upper boundary 1");
  } else if (p[1] <= kXiFloor) {
    result.warnings.emplace_back("xi pinned at lower boundary 0");
  }
  return result;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

void SpectrumTrace::validate() const {
  if (frequency_hz.size() != power_dbm.size()) {
    throw ValidationError("trace columns have different lengths");
  }
  for (std::size_t i = 0; i < frequency_hz.size(); ++i) {
    if (!std::isfinite(frequency_hz[i])) {
      throw ValidationError("trace frequency is not finite");
    }
    if (std::isnan(power_dbm[i]) || power_dbm[i] == std::numeric_limits<double>::infinity()) {
      throw ValidationError("trace power is not a finite level");
    }
    if (i > 0 && !(frequency_hz[i] > frequency_hz[i - 1])) {
      throw ValidationError("trace frequencies must be strictly increasing");
    }
  }
}

SpectrumTrace load_trace(std::istream& in) {
  SpectrumTrace trace;
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string_view meta = trim(line.substr(1));
      const auto eq = meta.find('=');
      if (eq == std::string_view::npos) continue;
      const std::string_view key = trim(meta.substr(0, eq));
      const std::string_view value = trim(meta.substr(eq + 1));
      if (key == "rbw_hz") {
        trace.rbw_hz = parse_number(value, line_no, "rbw_hz");
      } else if (key == "label") {
        trace.label = std::string(value);
      }
      continue;
    }
    if (!header_seen) {
      if (line != "frequency_hz,power_dbm") {
        throw ParseError("expected header 'frequency_hz,power_dbm'", line_no);
      }
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      throw ParseError("expected two comma-separated fields", line_no);
    }
    const double f = parse_number(line.substr(0, comma), line_no, "frequency");
    const double p = parse_number(line.substr(comma + 1), line_no, "power");
    if (!std::isfinite(f)) throw ParseError("frequency is not finite", line_no);
    if (std::isnan(p) || p == std::numeric_limits<double>::infinity()) {
      throw ParseError("power is not a finite level", line_no);
    }
    if (!trace.frequency_hz.empty() && !(f > trace.frequency_hz.back())) {
      throw ParseError(f == trace.frequency_hz.back()
                           ? "duplicate frequency " + format_double(f)
                           : "frequency " + format_double(f) +
                                 " is below the previous sample",
                       line_no);
    }
    trace.frequency_hz.push_back(f);
    trace.power_dbm.push_back(p);
  }
  if (!header_seen) throw ParseError("missing header line", line_no + 1);
  return trace;
}

SpectrumTrace load_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file " + path.string());
  try {
    return load_trace(in);
  } catch (const ParseError& e) {
    throw e.with_source(path.string());
  }
}

void write_trace_csv(std::ostream& out, const SpectrumTrace& trace) {
  if (trace.rbw_hz > 0.0) out << "# rbw_hz=" << format_double(trace.rbw_hz) << '\n';
  if (!trace.label.empty()) out << "# label=" << trace.label << '\n';
  out << "frequency_hz,power_dbm\n" << std::setprecision(17);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << trace.frequency_hz[i] << ',' << trace.power_dbm[i] << '\n';
  }
}

std::vector<double> linear_grid(double lo_hz, double hi_hz, double step_hz) {
  if (!(step_hz > 0.0) || !(hi_hz >= lo_hz)) {
    throw ValidationError("grid requires step > 0 and hi >= lo");
  }
  const auto count =
      static_cast<std::size_t>(std::floor((hi_hz - lo_hz) / step_hz + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k) grid[k] = lo_hz + step_hz * k;
  return grid;
}

FloorSubtraction subtract_noise_floor(const SpectrumTrace& trace,
                                      const SpectrumTrace& floor) {
  trace.validate();
  floor.validate();
  if (floor.size() == 0 || trace.size() == 0 ||
      floor.frequency_hz.front() > trace.frequency_hz.front() ||
      floor.frequency_hz.back() < trace.frequency_hz.back()) {
    throw ValidationError("noise floor must cover the trace frequency span");
  }
  FloorSubtraction out;
  out.trace.rbw_hz = trace.rbw_hz;
  out.trace.label = trace.label;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double f = trace.frequency_hz[i];
    const double floor_mw = floor_mw_at(floor, f);
    const double remaining = to_mw(trace.power_dbm[i]) - floor_mw;
    if (remaining > 0.0) {
      out.trace.frequency_hz.push_back(f);
      out.trace.power_dbm.push_back(floor_mw == 0.0 ? trace.power_dbm[i]
                                                    : to_dbm(remaining));
    } else {
      out.dropped_hz.push_back(f);
    }
  }
  if (out.trace.size() == 0) {
    throw ValidationError("noise floor lies above the signal at every point");
  }
  return out;
}

SpectrumTrace add_noise_floor(const SpectrumTrace& trace,
                              const SpectrumTrace& floor) {
  trace.validate();
  floor.validate();
  SpectrumTrace out = trace;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out.power_dbm[i] =
        to_dbm(to_mw(trace.power_dbm[i]) + floor_mw_at(floor, trace.frequency_hz[i]));
  }
  return out;
}

FitConfig FitConfig::analyzer_defaults() {
  FitConfig config;
  config.fit_window = {2e6, std::numeric_limits<double>::infinity()};
  config.exclusions = {{3.8e6, 4.0e6}};
  return config;
}

std::vector<std::size_t> usable_points(const SpectrumTrace& trace,
                                       const FitConfig& config) {
  std::vector<std::size_t> used;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double f = trace.frequency_hz[i];
    if (!config.fit_window.contains(f)) continue;
    const bool excluded = std::any_of(config.exclusions.begin(), config.exclusions.end(),
                                      [f](const Band& b) { return b.contains(f); });
    if (!excluded) used.push_back(i);
  }
  return used;
}

opo::ModelParams estimate_initial_guess(const SpectrumTrace& trace,
                                        std::span<const std::size_t> used) {
  if (used.size() < 4) throw PreconditionError("too few points for an initial guess");
  const std::size_t quarter = std::max<std::size_t>(1, used.size() / 4);
  std::vector<double> tail;
  for (std::size_t k = used.size() - quarter; k < used.size(); ++k) {
    tail.push_back(trace.power_dbm[used[k]]);
  }
  std::nth_element(tail.begin(), tail.begin() + tail.size() / 2, tail.end());
  const double s0 = tail[tail.size() / 2];

  // Dip depth relative to S0, smoothed over five neighbours.
  std::vector<double> depth(used.size());
  for (std::size_t k = 0; k < used.size(); ++k) {
    depth[k] = 1.0 - to_mw(trace.power_dbm[used[k]] - s0);
  }
  std::vector<double> smooth(used.size());
  for (std::size_t k = 0; k < used.size(); ++k) {
    const std::size_t lo = k >= 2 ? k - 2 : 0;
    const std::size_t hi = std::min(used.size() - 1, k + 2);
    double sum = 0.0;
    for (std::size_t m = lo; m <= hi; ++m) sum += depth[m];
    smooth[k] = sum / static_cast<double>(hi - lo + 1);
  }
  const double nu_low = trace.frequency_hz[used.front()];
  const double nu_high = trace.frequency_hz[used.back()];
  const double d_low = smooth.front();
  if (d_low <= 0.01) return {s0, 0.05, 0.5 * (nu_low + nu_high)};

  double nu_half = nu_high;
  for (std::size_t k = 0; k < used.size(); ++k) {
    if (smooth[k] <= 0.5 * d_low) {
      nu_half = trace.frequency_hz[used[k]];
      break;
    }
  }
  // depth = xi / (1 + u^2): halving from nu_low gives delta^2 = nu_h^2 - 2 nu_l^2.
  const double delta = std::sqrt(
      std::max(nu_half * nu_half - 2.0 * nu_low * nu_low, 0.25 * nu_half * nu_half));
  const double xi =
      std::clamp(d_low * (1.0 + (nu_low / delta) * (nu_low / delta)), 0.02, 0.99);
  return {s0, xi, delta};
}

FitResult fit_intensity_spectrum(const SpectrumTrace& trace,
                                 const FitConfig& config) {
  trace.validate();
  if (trace.size() < 8) {
    throw ValidationError("fitting requires at least 8 trace points");
  }
  validate_config(trace, config);
  const std::vector<std::size_t> used = usable_points(trace, config);
  if (used.size() < 9) {
    throw PreconditionError("only " + std::to_string(used.size()) +
                            " usable points; at least 9 are required");
  }

  Problem problem;
  problem.weighting = config.weighting;
  for (std::size_t i : used) {
    problem.nu.push_back(trace.frequency_hz[i]);
    problem.y_db.push_back(trace.power_dbm[i]);
  }
  if (config.weighting == Weighting::linear_power) {
    std::vector<double> mw;
    for (double y : problem.y_db) mw.push_back(to_mw(y));
    std::nth_element(mw.begin(), mw.begin() + mw.size() / 2, mw.end());
    problem.reference_mw = mw[mw.size() / 2];
  }

  const opo::ModelParams guess =
      config.initial_guess ? *config.initial_guess : estimate_initial_guess(trace, used);
  Eigen::Vector3d p(guess.s0_dbm, guess.xi, guess.delta_hz);
  Eigen::VectorXd r = problem.residuals(p);
  double ssr = r.squaredNorm();
  if (!std::isfinite(ssr)) {
    throw ValidationError("model is not finite at the initial guess");
  }
  Eigen::MatrixXd j = problem.jacobian(p);
  double lambda = config.initial_damping;
  int iteration = 0;
  bool converged = ssr == 0.0;
  while (!converged && iteration < config.max_iterations) {
    ++iteration;
    const Eigen::Matrix3d normal = j.transpose() * j;
    const Eigen::Vector3d gradient = j.transpose() * r;
    Eigen::Matrix3d damped = normal;
    for (int k = 0; k < 3; ++k) damped(k, k) += lambda * std::max(normal(k, k), 1e-300);
    const Eigen::Vector3d step = damped.ldlt().solve(-gradient);
    const Eigen::Vector3d trial = clamp_params(p + step, p);
    const Eigen::VectorXd r_trial = problem.residuals(trial);
    const double ssr_trial = r_trial.squaredNorm();
    if (std::isfinite(ssr_trial) && ssr_trial <= ssr) {
      const Eigen::Vector3d taken = trial - p;
      p = trial;
      r = r_trial;
      ssr = ssr_trial;
      j = problem.jacobian(p);
      lambda = std::max(lambda / config.damping_factor, 1e-15);
      bool small = true;
      for (int k = 0; k < 3; ++k) {
        small = small && std::abs(taken[k]) <=
                             config.convergence_tol * (std::abs(p[k]) + config.convergence_tol);
      }
      converged = small || ssr == 0.0;
    } else {
      lambda *= config.damping_factor;
      // No downhill step exists at any damping: p is a minimum to precision.
      converged = lambda > 1e12;
    }
  }
  FitResult result = make_result(problem, p, config, iteration);
  if (!converged) {
    throw ConvergenceError("fit did not converge within " +
                               std::to_string(config.max_iterations) +
                               " iterations",
                           std::move(result));
  }
  return result;
}

opo::SpectrumCurve predict_phase_spectrum(const FitResult& fit,
                                          std::span<const double> nu_hz) {
  return opo::to_dbm(
      opo::physical_frequency_curve(fit.params, opo::SpectrumKind::phase, nu_hz),
      fit.params.s0_dbm);
}

SqueezingReport report_squeezing(const SpectrumTrace& trace,
                                 const FitResult& fit,
                                 const std::optional<SpectrumTrace>& floor) {
  opo::validate(fit.params);
  SqueezingReport report;
  report.bandwidth_hz = fit.params.delta_hz;
  if (fit.params.xi >= 1.0) {
    report.complete_correlation = true;
  } else {
    report.raw_db = 10.0 * std::log10(1.0 - fit.params.xi);
  }
  if (floor) {
    const FloorSubtraction corrected = subtract_noise_floor(trace, *floor);
    report.dropped_points = corrected.dropped_hz.size();
    FitConfig config = fit.config;
    config.initial_guess = fit.params;
    const FitResult refit = fit_intensity_spectrum(corrected.trace, config);
    if (refit.params.xi >= 1.0) {
      report.corrected_complete_correlation = true;
    } else {
      report.corrected_db = 10.0 * std::log10(1.0 - refit.params.xi);
    }
  }
  return report;
}

SpectrumTrace synth_trace(const opo::ModelParams& params, opo::SpectrumKind kind,
                          std::span<const double> grid_hz, double noise_db,
                          std::uint64_t seed, double rbw_hz) {
  if (!(noise_db >= 0.0)) throw ValidationError("noise level must be >= 0 dB");
  const opo::SpectrumCurve curve = opo::to_dbm(
      opo::physical_frequency_curve(params, kind, grid_hz), params.s0_dbm);
  SpectrumTrace trace;
  trace.frequency_hz = curve.frequency_hz;
  trace.power_dbm = curve.values;
  trace.rbw_hz = rbw_hz;
  trace.label = std::string("synthetic ") + opo::kind_name(kind);
  if (noise_db > 0.0) {
    // Box-Muller over raw 64-bit draws keeps traces identical across
    // standard-library implementations.
    std::mt19937_64 rng(seed);
    auto uniform = [&rng] { return ((rng() >> 11) + 1) * 0x1.0p-53; };
    for (double& y : trace.power_dbm) {
      const double u1 = uniform(), u2 = uniform();
      y += noise_db * std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
    }
  }
  trace.validate();
  return trace;
}

std::string fit_result_text(const FitResult& fit) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "s0_dbm = " << fit.params.s0_dbm << '\n'
     << "xi = " << fit.params.xi << '\n'
     << "delta_hz = " << fit.params.delta_hz << '\n'
     << "rms_residual_db = " << fit.rms_residual_db << '\n'
     << "points_used = " << fit.points_used << '\n'
     << "s0_dbm_stderr = " << std::sqrt(fit.covariance(0, 0)) << '\n'
     << "xi_stderr = " << std::sqrt(fit.covariance(1, 1)) << '\n'
     << "delta_hz_stderr = " << std::sqrt(fit.covariance(2, 2)) << '\n'
     << "iterations = " << fit.iterations << '\n';
  for (const std::string& w : fit.warnings) os << "warning = " << w << '\n';
  return os.str();
}

std::string fit_result_json(const FitResult& fit) {
  nlohmann::ordered_json j;
  j["s0_dbm"] = fit.params.s0_dbm;
  j["xi"] = fit.params.xi;
  j["delta_hz"] = fit.params.delta_hz;
  j["rms_residual_db"] = fit.rms_residual_db;
  j["points_used"] = fit.points_used;
  j["stderr"] = {{"s0_dbm", std::sqrt(fit.covariance(0, 0))},
                 {"xi", std::sqrt(fit.covariance(1, 1))},
                 {"delta_hz", std::sqrt(fit.covariance(2, 2))}};
  j["iterations"] = fit.iterations;
  nlohmann::ordered_json bands = nlohmann::ordered_json::array();
  for (const Band& b : fit.config.exclusions) bands.push_back({b.lo_hz, b.hi_hz});
  j["exclusions_hz"] = bands;
  j["warnings"] = fit.warnings;
  return j.dump(2);
}

std::string squeezing_report_text(const SqueezingReport& report) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "squeezing_raw_db = ";
  if (report.raw_db) {
    os << *report.raw_db << '\n';
  } else {
    os << "complete correlation at dc\n";
  }
  if (report.corrected_db || report.corrected_complete_correlation) {
    os << "squeezing_corrected_db = ";
    if (report.corrected_db) {
      os << *report.corrected_db << '\n';
    } else {
      os << "complete correlation at dc\n";
    }
    os << "floor_dropped_points = " << report.dropped_points << '\n';
  }
  os << "squeezing_bandwidth_hz = " << report.bandwidth_hz << '\n';
  return os.str();
}

}  // namespace twinbeam::fit
