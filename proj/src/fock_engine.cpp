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

#include "twinbeam/fock_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "twinbeam/errors.hpp"

namespace twinbeam::fock {
namespace {

constexpr std::size_t kMaxPureDimension = std::size_t{1} << 24;
constexpr std::size_t kMaxDensityDimension = 4096;
constexpr double kNormTolerance = 1e-10;

std::size_t checked_dimension(std::size_t modes, int cutoff) {
  if (cutoff < 1) throw ValidationError("cutoff must be >= 1");
  std::size_t dim = 1;
  for (std::size_t k = 0; k < modes; ++k) {
    dim *= static_cast<std::size_t>(cutoff) + 1;
    if (dim > kMaxPureDimension) {
      throw CapacityError("Fock space of " + std::to_string(modes) +
                          " modes at cutoff " + std::to_string(cutoff) +
                          " exceeds the supported dimension");
    }
  }
  return dim;
}

const char* port_name(SpatialPort p) {
  switch (p) {
    case SpatialPort::a: return "a";
    case SpatialPort::b: return "b";
    case SpatialPort::c: return "c";
    case SpatialPort::d: return "d";
  }
  return "?";
}

// Columns of a two-mode passive unitary restricted to fixed pair totals.
// cols[n][k] is the image of |k, n-k> expanded over |p, n-p>, p = 0..n.
class PairUnitary {
 public:
  PairUnitary(const Eigen::Matrix2cd& mixing, int cutoff) : cols_(cutoff + 1) {
    // Input creation operators expressed through output ones:
    // first^dag = B00 c^dag + B10 d^dag, second^dag = B01 c^dag + B11 d^dag.
    const Complex f_c = mixing(0, 0), f_d = mixing(1, 0);
    const Complex s_c = mixing(0, 1), s_d = mixing(1, 1);
    for (int n = 0; n <= cutoff; ++n) cols_[n].resize(n + 1);
    cols_[0][0] = Eigen::VectorXcd::Ones(1);
    for (int m = 1; m <= cutoff; ++m) {
      cols_[m][0] = create(s_c, s_d, cols_[m - 1][0]) / std::sqrt(double(m));
    }
    for (int k = 1; k <= cutoff; ++k) {
      for (int m = 0; k + m <= cutoff; ++m) {
        cols_[k + m][k] =
            create(f_c, f_d, cols_[k + m - 1][k - 1]) / std::sqrt(double(k));
      }
    }
  }

  const Eigen::VectorXcd& column(int total, int k) const {
    return cols_[total][k];
  }

 private:
  static Eigen::VectorXcd create(Complex on_c, Complex on_d,
                                 const Eigen::VectorXcd& v) {
    const Eigen::Index n = v.size() - 1;
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n + 2);
    for (Eigen::Index p = 0; p <= n; ++p) {
      out[p + 1] += on_c * std::sqrt(double(p + 1)) * v[p];
      out[p] += on_d * std::sqrt(double(n - p + 1)) * v[p];
    }
    return out;
  }

  std::vector<std::vector<Eigen::VectorXcd>> cols_;
};

Eigen::VectorXcd apply_pair(const Eigen::VectorXcd& in,
                            const MultimodeState& layout, std::size_t i,
                            std::size_t j, const PairUnitary& u) {
  const int cutoff = layout.cutoff();
  const std::size_t base_n = static_cast<std::size_t>(cutoff) + 1;
  const std::size_t si = layout.stride(i), sj = layout.stride(j);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(in.size());
  std::vector<Complex> gathered(base_n);
  for (std::size_t base = 0; base < layout.dimension(); ++base) {
    if ((base / si) % base_n != 0 || (base / sj) % base_n != 0) continue;
    for (int n = 0; n <= 2 * cutoff; ++n) {
      const int k_lo = std::max(0, n - cutoff), k_hi = std::min(n, cutoff);
      bool any = false;
      for (int k = k_lo; k <= k_hi; ++k) {
        gathered[k] = in[base + k * si + (n - k) * sj];
        any = any || gathered[k] != Complex{};
      }
      if (!any) continue;
      if (n > cutoff) {
        throw CapacityError("pair photon number " + std::to_string(n) +
                            " exceeds cutoff " + std::to_string(cutoff) +
                            "; outputs could not be represented");
      }
      for (int k = 0; k <= n; ++k) {
        const Complex amp = gathered[k];
        if (amp == Complex{}) continue;
        const Eigen::VectorXcd& col = u.column(n, k);
        for (int p = 0; p <= n; ++p) {
          out[base + p * si + (n - p) * sj] += col[p] * amp;
        }
      }
    }
  }
  return out;
}

MultimodeState apply_pair_unitary(const MultimodeState& state, std::size_t i,
                                  std::size_t j,
                                  const Eigen::Matrix2cd& mixing) {
  const PairUnitary u(mixing, state.cutoff());
  if (state.is_pure()) {
    return MultimodeState::pure(state.modes(), state.cutoff(),
                                apply_pair(state.amplitudes(), state, i, j, u));
  }
  const Eigen::MatrixXcd& rho = state.density();
  Eigen::MatrixXcd left(rho.rows(), rho.cols());
  for (Eigen::Index c = 0; c < rho.cols(); ++c) {
    left.col(c) = apply_pair(rho.col(c), state, i, j, u);
  }
  Eigen::MatrixXcd left_adj = left.adjoint();
  Eigen::MatrixXcd both(rho.rows(), rho.cols());
  for (Eigen::Index c = 0; c < rho.cols(); ++c) {
    both.col(c) = apply_pair(left_adj.col(c), state, i, j, u);
  }
  return MultimodeState::mixed(state.modes(), state.cutoff(), both.adjoint());
}

// Appends `label` as a vacuum mode (least significant position).
MultimodeState with_vacuum_mode(const MultimodeState& state, ModeLabel label) {
  std::vector<ModeLabel> modes = state.modes();
  modes.push_back(label);
  const std::size_t grow = static_cast<std::size_t>(state.cutoff()) + 1;
  checked_dimension(modes.size(), state.cutoff());
  if (state.is_pure()) {
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(state.dimension() * grow);
    for (std::size_t k = 0; k < state.dimension(); ++k) {
      amps[k * grow] = state.amplitudes()[k];
    }
    return MultimodeState::pure(std::move(modes), state.cutoff(),
                                std::move(amps));
  }
  const std::size_t dim = state.dimension() * grow;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t r = 0; r < state.dimension(); ++r) {
    for (std::size_t c = 0; c < state.dimension(); ++c) {
      rho(r * grow, c * grow) = state.density()(r, c);
    }
  }
  return MultimodeState::mixed(std::move(modes), state.cutoff(), std::move(rho));
}

std::ptrdiff_t find_mode(const std::vector<ModeLabel>& modes, ModeLabel label) {
  auto it = std::find(modes.begin(), modes.end(), label);
  return it == modes.end() ? -1 : std::distance(modes.begin(), it);
}

void require_unique_labels(const std::vector<ModeLabel>& modes) {
  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (std::size_t j = i + 1; j < modes.size(); ++j) {
      if (modes[i] == modes[j]) {
        throw ValidationError(std::string("duplicate mode label on port ") +
                              port_name(modes[i].port));
      }
    }
  }
}

Eigen::Matrix2cd splitter_matrix(double angle, SplitterConvention convention) {
  const double c = std::cos(angle), s = std::sin(angle);
  Eigen::Matrix2cd m;
  if (convention == SplitterConvention::symmetric_i) {
    const Complex t{0.0, -c};
    m << t, s, s, t;
  } else {
    m << c, s, -s, c;
  }
  return m;
}

// Displaced Fock columns D(alpha)|n>, n = 0..n_max, over `rows` levels.
Eigen::MatrixXcd displaced_columns(Complex alpha, int rows, int n_max) {
  const int work = rows + n_max + 8;
  Eigen::MatrixXcd cols(work, n_max + 1);
  Eigen::VectorXcd v(work);
  v[0] = std::exp(-0.5 * std::norm(alpha));
  for (int m = 1; m < work; ++m) v[m] = v[m - 1] * alpha / std::sqrt(double(m));
  cols.col(0) = v;
  const Complex shift = std::conj(alpha);
  for (int n = 1; n <= n_max; ++n) {
    Eigen::VectorXcd next = -shift * v;
    for (int m = 0; m + 1 < work; ++m) next[m + 1] += std::sqrt(double(m + 1)) * v[m];
    v = next / std::sqrt(double(n));
    cols.col(n) = v;
  }
  return cols.topRows(rows);
}

}  // namespace

MultimodeState::MultimodeState(std::vector<ModeLabel> modes, int cutoff)
    : modes_(std::move(modes)), cutoff_(cutoff) {
  dimension_ = checked_dimension(modes_.size(), cutoff_);
  strides_.assign(modes_.size(), 1);
  for (std::size_t k = modes_.size(); k-- > 1;) {
    strides_[k - 1] = strides_[k] * (static_cast<std::size_t>(cutoff_) + 1);
  }
}

MultimodeState MultimodeState::pure(std::vector<ModeLabel> modes, int cutoff,
                                    Eigen::VectorXcd amplitudes) {
  MultimodeState s(std::move(modes), cutoff);
  if (static_cast<std::size_t>(amplitudes.size()) != s.dimension_) {
    throw ValidationError("amplitude vector has size " +
                          std::to_string(amplitudes.size()) + ", expected " +
                          std::to_string(s.dimension_));
  }
  s.representation_ = Representation::pure_vector;
  s.amplitudes_ = std::move(amplitudes);
  if (std::abs(s.norm() - 1.0) > kNormTolerance) {
    throw ValidationError("state is not normalized");
  }
  return s;
}

MultimodeState MultimodeState::mixed(std::vector<ModeLabel> modes, int cutoff,
                                     Eigen::MatrixXcd density) {
  MultimodeState s(std::move(modes), cutoff);
  if (s.dimension_ > kMaxDensityDimension) {
    throw CapacityError("density matrix dimension " +
                        std::to_string(s.dimension_) +
                        " exceeds the dense storage bound");
  }
  if (static_cast<std::size_t>(density.rows()) != s.dimension_ ||
      density.rows() != density.cols()) {
    throw ValidationError("density matrix has the wrong shape");
  }
  s.representation_ = Representation::density_matrix;
  s.density_ = std::move(density);
  if (std::abs(s.norm() - 1.0) > kNormTolerance) {
    throw ValidationError("density matrix does not have unit trace");
  }
  return s;
}

const Eigen::VectorXcd& MultimodeState::amplitudes() const {
  if (!is_pure()) throw PreconditionError("state is a density matrix");
  return amplitudes_;
}

const Eigen::MatrixXcd& MultimodeState::density() const {
  if (is_pure()) throw PreconditionError("state is a pure vector");
  return density_;
}

double MultimodeState::norm() const {
  return is_pure() ? amplitudes_.squaredNorm() : density_.trace().real();
}

Eigen::VectorXd MultimodeState::probabilities() const {
  if (is_pure()) return amplitudes_.cwiseAbs2();
  return density_.diagonal().real();
}

double MultimodeState::probability(std::span<const int> occupations) const {
  const std::size_t k = index_of(occupations);
  return is_pure() ? std::norm(amplitudes_[k]) : density_(k, k).real();
}

std::vector<int> MultimodeState::occupations(std::size_t index) const {
  std::vector<int> occ(modes_.size());
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    occ[k] = static_cast<int>((index / strides_[k]) % (cutoff_ + 1));
  }
  return occ;
}

std::size_t MultimodeState::index_of(std::span<const int> occupations) const {
  if (occupations.size() != modes_.size()) {
    throw ValidationError("occupation tuple has " +
                          std::to_string(occupations.size()) +
                          " entries for " + std::to_string(modes_.size()) +
                          " modes");
  }
  std::size_t index = 0;
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    if (occupations[k] < 0 || occupations[k] > cutoff_) {
      throw CapacityError("occupation " + std::to_string(occupations[k]) +
                          " of mode " + std::to_string(k) +
                          " is outside [0, " + std::to_string(cutoff_) + "]");
    }
    index += static_cast<std::size_t>(occupations[k]) * strides_[k];
  }
  return index;
}

MultimodeState MultimodeState::to_density() const {
  if (!is_pure()) return *this;
  return mixed(modes_, cutoff_, amplitudes_ * amplitudes_.adjoint());
}

std::vector<ModeLabel> default_two_mode_labels() {
  return {{Polarization::H, 0, SpatialPort::a},
          {Polarization::H, 0, SpatialPort::b}};
}

MultimodeState make_fock(std::span<const int> occupations, int cutoff,
                         std::vector<ModeLabel> labels) {
  if (labels.empty()) {
    if (occupations.size() != 2) {
      throw ValidationError("mode labels are required unless exactly two "
                            "occupations are given");
    }
    labels = default_two_mode_labels();
  }
  if (labels.size() != occupations.size()) {
    throw ValidationError("one label per occupation is required");
  }
  require_unique_labels(labels);
  for (int n : occupations) {
    if (n < 0) throw ValidationError("occupations must be nonnegative");
    if (n > cutoff) {
      throw CapacityError("occupation " + std::to_string(n) +
                          " exceeds cutoff " + std::to_string(cutoff));
    }
  }
  const std::size_t dim = checked_dimension(labels.size(), cutoff);
  std::size_t index = 0;
  for (int n : occupations) index = index * (cutoff + 1) + n;
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(dim);
  amps[index] = 1.0;
  return MultimodeState::pure(std::move(labels), cutoff, std::move(amps));
}

MultimodeState make_twin_mode_mixture(const Eigen::MatrixXcd& rho, int cutoff) {
  constexpr double tol = 1e-12;
  if (rho.rows() != rho.cols() || rho.rows() == 0) {
    throw ValidationError("twin-mode weights must be a nonempty square matrix");
  }
  if (rho.rows() > cutoff + 1) {
    throw CapacityError("twin-mode weights of dimension " +
                        std::to_string(rho.rows()) + " exceed cutoff " +
                        std::to_string(cutoff));
  }
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) {
    throw ValidationError("twin-mode weights are not Hermitian");
  }
  if (std::abs(rho.trace() - Complex{1.0}) > tol) {
    throw ValidationError("twin-mode weights do not have unit trace");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho);
  if (eig.eigenvalues().minCoeff() < -tol) {
    throw ValidationError("twin-mode weights are not positive semidefinite");
  }
  const std::size_t dim = checked_dimension(2, cutoff);
  if (dim > kMaxDensityDimension) {
    throw CapacityError("density matrix dimension exceeds the dense bound");
  }
  const std::size_t side = static_cast<std::size_t>(cutoff) + 1;
  Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index n = 0; n < rho.rows(); ++n) {
    for (Eigen::Index p = 0; p < rho.cols(); ++p) {
      big(n * side + n, p * side + p) = rho(n, p);
    }
  }
  return MultimodeState::mixed(default_two_mode_labels(), cutoff, std::move(big));
}

TruncatedState make_coherent_pair(Complex alpha_a, Complex alpha_b, int cutoff) {
  for (Complex alpha : {alpha_a, alpha_b}) {
    if (4.0 * std::norm(alpha) > cutoff) {
      throw PreconditionError("|alpha|^2 = " + std::to_string(std::norm(alpha)) +
                              " is above cutoff / 4");
    }
  }
  return make_displaced_twin_beam(alpha_a, alpha_b, 0.0, cutoff);
}

TruncatedState make_displaced_twin_beam(Complex alpha_a, Complex alpha_b,
                                        double squeeze_r, int cutoff) {
  if (!(squeeze_r >= 0.0) || !std::isfinite(squeeze_r)) {
    throw ValidationError("squeezing parameter must be finite and >= 0");
  }
  const std::size_t dim = checked_dimension(2, cutoff);
  const std::size_t side = static_cast<std::size_t>(cutoff) + 1;

  // Twin-pair weights tanh(r)^n / cosh(r); the tail beyond n_max is
  // negligible and ends up in the reported leakage.
  const double t = std::tanh(squeeze_r);
  std::vector<double> weights{1.0 / std::cosh(squeeze_r)};
  while (t > 0.0 && static_cast<int>(weights.size()) <= cutoff &&
         weights.back() * weights.back() > 1e-24) {
    weights.push_back(weights.back() * t);
  }
  const int n_max = static_cast<int>(weights.size()) - 1;

  const Eigen::MatrixXcd da = displaced_columns(alpha_a, cutoff + 1, n_max);
  const Eigen::MatrixXcd db = displaced_columns(alpha_b, cutoff + 1, n_max);

  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(dim);
  double kept = 0.0;
  for (int m1 = 0; m1 <= cutoff; ++m1) {
    for (int m2 = 0; m1 + m2 <= cutoff; ++m2) {
      Complex v{};
      for (int n = 0; n <= n_max; ++n) v += weights[n] * da(m1, n) * db(m2, n);
      amps[m1 * side + m2] = v;
      kept += std::norm(v);
    }
  }
  if (kept <= 0.0) throw TruncationError("state has no weight below cutoff");
  amps /= std::sqrt(kept);
  const double leakage = std::max(0.0, 1.0 - kept);
  return TruncatedState{
      MultimodeState::pure(default_two_mode_labels(), cutoff, std::move(amps)),
      leakage, leakage > kLeakageWarningThreshold};
}

MultimodeState apply_beam_splitter(const MultimodeState& state,
                                   double mixing_angle,
                                   SplitterConvention convention,
                                   PortPair inputs, PortPair outputs) {
  if (inputs.first == inputs.second || outputs.first == outputs.second) {
    throw ValidationError("beam splitter ports must be distinct");
  }
  MultimodeState work = state;
  // Partners with matching polarization and frequency; absent ones in vacuum.
  for (std::size_t k = 0; k < state.mode_count(); ++k) {
    ModeLabel label = state.modes()[k];
    if (label.port != inputs.first && label.port != inputs.second) continue;
    label.port = label.port == inputs.first ? inputs.second : inputs.first;
    if (find_mode(work.modes(), label) < 0) work = with_vacuum_mode(work, label);
  }
  const Eigen::Matrix2cd mixing = splitter_matrix(mixing_angle, convention);
  for (std::size_t i = 0; i < work.mode_count(); ++i) {
    ModeLabel partner = work.modes()[i];
    if (partner.port != inputs.first) continue;
    partner.port = inputs.second;
    const auto j = static_cast<std::size_t>(find_mode(work.modes(), partner));
    work = apply_pair_unitary(work, i, j, mixing);
  }
  std::vector<ModeLabel> relabeled = work.modes();
  for (ModeLabel& m : relabeled) {
    if (m.port == inputs.first) {
      m.port = outputs.first;
    } else if (m.port == inputs.second) {
      m.port = outputs.second;
    }
  }
  require_unique_labels(relabeled);
  if (work.is_pure()) {
    return MultimodeState::pure(std::move(relabeled), work.cutoff(),
                                work.amplitudes());
  }
  return MultimodeState::mixed(std::move(relabeled), work.cutoff(),
                               work.density());
}

MultimodeState apply_waveplate_polarizer(const MultimodeState& state,
                                         double theta) {
  if (state.mode_count() == 0) return state;
  const SpatialPort path = state.modes().front().port;
  for (const ModeLabel& m : state.modes()) {
    if (m.port != path) {
      throw ValidationError(
          "waveplate/polarizer requires every mode on one spatial path");
    }
  }
  MultimodeState work = state;
  for (std::size_t k = 0; k < state.mode_count(); ++k) {
    ModeLabel label = state.modes()[k];
    label.polarization = label.polarization == Polarization::H
                             ? Polarization::V
                             : Polarization::H;
    if (find_mode(work.modes(), label) < 0) work = with_vacuum_mode(work, label);
  }
  const double c = std::cos(2.0 * theta), s = std::sin(2.0 * theta);
  Eigen::Matrix2cd rotation;
  rotation << c, s, -s, c;
  for (std::size_t i = 0; i < work.mode_count(); ++i) {
    ModeLabel partner = work.modes()[i];
    if (partner.polarization != Polarization::H) continue;
    partner.polarization = Polarization::V;
    const auto j = static_cast<std::size_t>(find_mode(work.modes(), partner));
    work = apply_pair_unitary(work, i, j, rotation);
  }
  std::vector<ModeLabel> relabeled = work.modes();
  for (ModeLabel& m : relabeled) {
    m.port = m.polarization == Polarization::H ? SpatialPort::c : SpatialPort::d;
  }
  if (work.is_pure()) {
    return MultimodeState::pure(std::move(relabeled), work.cutoff(),
                                work.amplitudes());
  }
  return MultimodeState::mixed(std::move(relabeled), work.cutoff(),
                               work.density());
}

double ScatterOutcome::stddev() const { return std::sqrt(variance); }

ScatterOutcome number_difference_stats(const MultimodeState& state,
                                       SpatialPort port_c, SpatialPort port_d) {
  std::vector<int> sign(state.mode_count(), 0);
  for (std::size_t k = 0; k < state.mode_count(); ++k) {
    if (state.modes()[k].port == port_c) sign[k] = 1;
    if (state.modes()[k].port == port_d) sign[k] = -1;
  }
  const Eigen::VectorXd probs = state.probabilities();
  ScatterOutcome out;
  for (std::size_t idx = 0; idx < state.dimension(); ++idx) {
    if (probs[idx] == 0.0) continue;
    const std::vector<int> occ = state.occupations(idx);
    int diff = 0;
    for (std::size_t k = 0; k < occ.size(); ++k) diff += sign[k] * occ[k];
    out.distribution[diff] += probs[idx];
  }
  for (const auto& [value, p] : out.distribution) out.mean += p * value;
  for (const auto& [value, p] : out.distribution) {
    out.variance += p * (value - out.mean) * (value - out.mean);
  }
  return out;
}

double coincidence_probability(const MultimodeState& state, SpatialPort port_c,
                               SpatialPort port_d) {
  const Eigen::VectorXd probs = state.probabilities();
  double total = 0.0;
  for (std::size_t idx = 0; idx < state.dimension(); ++idx) {
    if (probs[idx] == 0.0) continue;
    const std::vector<int> occ = state.occupations(idx);
    int in_c = 0, in_d = 0;
    for (std::size_t k = 0; k < occ.size(); ++k) {
      if (state.modes()[k].port == port_c) in_c += occ[k];
      if (state.modes()[k].port == port_d) in_d += occ[k];
    }
    if (in_c > 0 && in_d > 0) total += probs[idx];
  }
  return total;
}

}  // namespace twinbeam::fock
