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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "twinbeam/fock_engine.hpp"
#include "twinbeam/opo_spectra.hpp"
#include "twinbeam/quadrature_model.hpp"
#include "twinbeam/trace_fit.hpp"

namespace {

using namespace twinbeam;
using Clock = std::chrono::steady_clock;

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

double slope_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Brute-force reference: dense exp(-i phi (a^dag b + b^dag a)) on the
// truncated two-mode space, then Var(n_a - n_b) of the output.
double oracle_variance(int n_a, int n_b, int cutoff, double phi) {
  const int d = cutoff + 1;
  const int dim = d * d;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i + 1 < d) a(i * d + j, (i + 1) * d + j) = std::sqrt(double(i + 1));
      if (j + 1 < d) b(i * d + j, i * d + j + 1) = std::sqrt(double(j + 1));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a.transpose() * b +
                                                     b.transpose() * a);
  Eigen::VectorXcd phases(dim);
  for (int k = 0; k < dim; ++k) {
    phases[k] = std::exp(std::complex<double>(0.0, -phi * eig.eigenvalues()[k]));
  }
  const Eigen::MatrixXcd v = eig.eigenvectors().cast<std::complex<double>>();
  Eigen::VectorXcd in = Eigen::VectorXcd::Zero(dim);
  in[n_a * d + n_b] = 1.0;
  const Eigen::VectorXcd out = v * phases.asDiagonal() * v.adjoint() * in;
  double mean = 0.0, second = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const double p = std::norm(out[i * d + j]);
      mean += p * (i - j);
      second += p * (i - j) * (i - j);
    }
  }
  return second - mean * mean;
}

std::vector<double> analyzer_grid() { return fit::linear_grid(0.5e6, 10e6, 30e3); }

const opo::ModelParams kTraceA{-79.0, 0.72, 2.98e6};
const opo::ModelParams kTraceB{-79.5, 0.5, 4.3e6};

Outcome hom_dichotomy() {
  Outcome o;
  const auto start = Clock::now();
  const std::vector<int> occ{1, 1};
  for (bool distinguishable : {false, true}) {
    const fock::MultimodeState in = fock::make_fock(
        occ, 2,
        {{fock::Polarization::H, 0, fock::SpatialPort::a},
         {fock::Polarization::V, distinguishable ? 1 : 0, fock::SpatialPort::a}});
    const fock::MultimodeState out = fock::apply_waveplate_polarizer(in, kPi / 8);
    const double coincidence = fock::coincidence_probability(out);
    const double dn = fock::number_difference_stats(out).stddev();
    const double want_c = distinguishable ? 0.5 : 0.0;
    const double want_dn = distinguishable ? std::sqrt(2.0) : 2.0;
    o.detail << (distinguishable ? " distinguishable" : " degenerate") << ": P_cd="
             << coincidence << " dN-=" << dn;
    o.require(std::abs(coincidence - want_c) <= 1e-12 && std::abs(dn - want_dn) <= 1e-12,
              distinguishable ? "distinguishable pair" : "degenerate pair");
  }
  const double t = seconds_since(start);
  o.detail << " t=" << t << "s";
  o.require(t < 1.0, "runtime");
  return o;
}

Outcome scaling() {
  Outcome o;
  const auto start = Clock::now();
  std::vector<double> n_axis, classical, heisenberg;
  double worst = 0.0;
  for (int n = 1; n <= 8; ++n) {
    const std::vector<int> single{n, 0};
    const std::vector<int> twin{n, n};
    const double var_single = fock::number_difference_stats(
        fock::apply_beam_splitter(fock::make_fock(single, n), kPi / 4)).variance;
    const double var_twin = fock::number_difference_stats(
        fock::apply_beam_splitter(fock::make_fock(twin, 2 * n), kPi / 4)).variance;
    const double oracle_twin = oracle_variance(n, n, 2 * n, kPi / 4);
    worst = std::max({worst, std::abs(var_single - n),
                      std::abs(var_twin - 2.0 * n * (n + 1)),
                      std::abs(var_twin - oracle_twin)});
    n_axis.push_back(n);
    classical.push_back(std::sqrt(var_single));
    heisenberg.push_back(std::sqrt(var_twin));
  }
  const double s_classical = slope_loglog(n_axis, classical);
  const double s_heisenberg = slope_loglog(n_axis, heisenberg);
  const double local = std::log(heisenberg[7] / heisenberg[6]) / std::log(8.0 / 7.0);
  const double t = seconds_since(start);
  o.detail << " max|dVar|=" << worst << " slope(N,0)=" << s_classical
           << " slope(N,N)=" << s_heisenberg << " local slope(N,N) at N=8=" << local
           << " t=" << t << "s";
  o.require(worst <= 1e-9, "variances");
  o.require(std::abs(s_classical - 0.5) <= 0.1, "classical slope");
  o.require(std::abs(s_heisenberg - 1.0) <= 0.1, "Heisenberg slope");
  o.require(t < 10.0, "runtime");
  return o;
}

Outcome squeezing_numbers() {
  Outcome o;
  const double a = 10.0 * std::log10(opo::intensity_diff_spectrum(0.0, 0.72));
  const double b = 10.0 * std::log10(opo::intensity_diff_spectrum(0.0, 0.5));
  o.detail << " xi=0.72: " << a << " dB, xi=0.5: " << b << " dB";
  o.require(std::abs(a + 5.5) <= 0.1, "xi=0.72 vs -5.5 dB");
  o.require(std::abs(b + 3.0) <= 0.1, "xi=0.5 vs -3 dB");
  return o;
}

Outcome uncertainty_identity() {
  Outcome o;
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> xi_dist(0.0, 1.0);
  std::uniform_real_distribution<double> log_u(-3.0, 3.0);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const double xi = xi_dist(rng);
    const double u = std::pow(10.0, log_u(rng));
    const double product =
        opo::intensity_diff_spectrum(u, xi) * opo::phase_diff_spectrum(u, xi);
    const double expected = 1.0 + xi * (1.0 - xi) / (u * u * (1.0 + u * u));
    worst = std::max(worst, rel_err(product, expected));
  }
  double worst_unit = 0.0;
  for (double lu = -3.0; lu <= 3.0; lu += 0.01) {
    worst_unit = std::max(
        worst_unit, std::abs(opo::uncertainty_product(std::pow(10.0, lu), 1.0) - 1.0));
  }
  o.detail << " max rel err=" << worst << " max|product-1| at xi=1: " << worst_unit;
  o.require(worst <= 1e-12, "identity");
  o.require(worst_unit <= 1e-12, "minimum uncertainty");
  return o;
}

fit::FitResult fit_synth(const opo::ModelParams& truth, std::uint64_t seed) {
  const fit::SpectrumTrace trace =
      fit::synth_trace(truth, opo::SpectrumKind::intensity, analyzer_grid(), 0.2, seed);
  return fit::fit_intensity_spectrum(trace, fit::FitConfig::analyzer_defaults());
}

Outcome fit_roundtrip() {
  Outcome o;
  const auto start = Clock::now();
  const std::pair<opo::ModelParams, std::uint64_t> cases[] = {{kTraceA, 1}, {kTraceB, 2}};
  for (const auto& [truth, seed] : cases) {
    const fit::FitResult r = fit_synth(truth, seed);
    const fit::FitResult again = fit_synth(truth, seed);
    const double e_xi = rel_err(r.params.xi, truth.xi);
    const double e_delta = rel_err(r.params.delta_hz, truth.delta_hz);
    const double e_s0 = std::abs(r.params.s0_dbm - truth.s0_dbm);
    o.detail << " seed " << seed << ": xi=" << r.params.xi << " (" << 100 * e_xi
             << "%) delta=" << r.params.delta_hz << " (" << 100 * e_delta
             << "%) S0=" << r.params.s0_dbm << " (" << e_s0 << " dB);";
    o.require(e_xi <= 0.02, "xi seed " + std::to_string(seed));
    o.require(e_delta <= 0.02, "delta seed " + std::to_string(seed));
    o.require(e_s0 <= 0.1, "S0 seed " + std::to_string(seed));
    o.require(r.params.xi == again.params.xi && r.params.delta_hz == again.params.delta_hz &&
                  r.params.s0_dbm == again.params.s0_dbm,
              "determinism");
  }
  const double t = seconds_since(start);
  o.detail << " t=" << t << "s";
  o.require(t < 5.0, "runtime");
  return o;
}

Outcome phase_prediction() {
  Outcome o;
  std::vector<double> nu;
  for (double f : analyzer_grid()) {
    if (f > 0.0) nu.push_back(f);
  }
  const std::pair<opo::ModelParams, std::uint64_t> cases[] = {{kTraceA, 1}, {kTraceB, 2}};
  for (const auto& [truth, seed] : cases) {
    const fit::FitResult r = fit_synth(truth, seed);
    const opo::SpectrumCurve predicted = fit::predict_phase_spectrum(r, nu);
    const fit::SpectrumTrace phase =
        fit::synth_trace(truth, opo::SpectrumKind::phase, nu, 0.0, seed);
    double ss = 0.0;
    for (std::size_t i = 0; i < nu.size(); ++i) {
      const double d = predicted.values[i] - phase.power_dbm[i];
      ss += d * d;
    }
    const double rms = std::sqrt(ss / static_cast<double>(nu.size()));
    o.detail << " seed " << seed << ": rms=" << rms << " dB;";
    o.require(rms <= 0.2, "phase rms seed " + std::to_string(seed));
  }
  return o;
}

Outcome cross_engine() {
  Outcome o;
  const quadrature::Covariance vac = quadrature::vacuum_covariance();
  double worst = 0.0;
  for (double a : {1.0, 2.0, 3.0}) {
    const auto r = quadrature::cross_check_against_fock(a, vac, 80, kPi / 8);
    worst = std::max(worst, r.relative_error);
  }
  o.detail << " coherent max rel err=" << worst << ";";
  o.require(worst <= 1e-9, "coherent agreement");

  const double r = std::log(std::pow(10.0, 5.5 / 20.0));
  const quadrature::Covariance twin = quadrature::twin_beam_covariance(r);
  double previous = 1e300;
  bool monotone = true;
  o.detail << " displaced twin beam:";
  for (double a : {1.0, 2.0, 3.0}) {
    const auto rep = quadrature::cross_check_against_fock(a, twin, 90, kPi / 8);
    o.detail << " |alpha|=" << a << " err=" << rep.relative_error;
    monotone = monotone && rep.relative_error < previous;
    previous = rep.relative_error;
  }
  o.require(monotone, "monotone decrease");
  o.require(previous < 0.05, "error at |alpha|=3");
  return o;
}

Outcome heisenberg_property() {
  Outcome o;
  std::mt19937_64 rng(8);
  double smallest = 1e300;
  int invalid = 0;
  for (int k = 0; k < 1000; ++k) {
    const quadrature::Covariance cov = quadrature::random_covariance(rng);
    if (!quadrature::is_physical(cov, 1e-9)) ++invalid;
    const auto s = quadrature::quadrature_difference_stds({0.0, 0.0, cov});
    smallest = std::min(smallest, s.dX_minus * s.dP_minus);
  }
  o.detail << " min dX-*dP-=" << smallest << " invalid states=" << invalid;
  o.require(invalid == 0, "state validity");
  o.require(smallest >= 1.0 - 1e-9, "inequality");
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"HOM dichotomy", hom_dichotomy},
      {"classical vs Heisenberg scaling", scaling},
      {"squeezing numbers", squeezing_numbers},
      {"uncertainty-product identity", uncertainty_identity},
      {"fit roundtrip", fit_roundtrip},
      {"phase prediction from intensity fit", phase_prediction},
      {"cross-engine agreement", cross_engine},
      {"Heisenberg inequality property", heisenberg_property},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    if (!o.pass) ++failures;
    std::printf("criterion %d %s: %s%s\n", index, o.pass ? "PASS" : "FAIL", name,
                o.detail.str().c_str());
  }
  std::printf("%d of 8 criteria passed\n", 8 - failures);
  return failures == 0 ? 0 : 1;
}
