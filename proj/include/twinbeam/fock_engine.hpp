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
 * Exact beam-splitter scattering on truncated multimode Fock spaces.
 *
 * A state lives on an ordered list of modes, each identified by polarization,
 * frequency tag and spatial port. Basis states are occupation tuples
 * (n_0, ..., n_{M-1}) with 0 <= n_k <= cutoff, flattened row-major with the
 * first mode most significant. Passive optics conserve the photon number of
 * every mixed pair, so the cutoff must bound the pair total, not only the
 * single-mode occupation; violations raise CapacityError.
 */

#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace twinbeam::fock {

using Complex = std::complex<double>;

enum class Polarization { H, V };

enum class SpatialPort { a, b, c, d };

/// Mode identity. Two modes interfere only when polarization and frequency
/// tag agree; tag 0 is the degenerate reference frequency.
struct ModeLabel {
  Polarization polarization = Polarization::H;
  int frequency_tag = 0;
  SpatialPort port = SpatialPort::a;

  friend bool operator==(const ModeLabel&, const ModeLabel&) = default;
};

enum class Representation { pure_vector, density_matrix };

/// r = i t (balanced at pi/4) or the real orthogonal rotation.
enum class SplitterConvention { symmetric_i, rotation };

class MultimodeState {
 public:
  static MultimodeState pure(std::vector<ModeLabel> modes, int cutoff,
                             Eigen::VectorXcd amplitudes);
  static MultimodeState mixed(std::vector<ModeLabel> modes, int cutoff,
                              Eigen::MatrixXcd density);

  const std::vector<ModeLabel>& modes() const noexcept { return modes_; }
  std::size_t mode_count() const noexcept { return modes_.size(); }
  int cutoff() const noexcept { return cutoff_; }
  Representation representation() const noexcept { return representation_; }
  bool is_pure() const noexcept {
    return representation_ == Representation::pure_vector;
  }

  /// (cutoff + 1)^mode_count
  std::size_t dimension() const noexcept { return dimension_; }

  /// Valid only for pure states.
  const Eigen::VectorXcd& amplitudes() const;
  /// Valid only for density matrices.
  const Eigen::MatrixXcd& density() const;

  /// Squared norm (pure) or trace (mixed).
  double norm() const;

  /// Diagonal of the state in the occupation basis.
  Eigen::VectorXd probabilities() const;
  double probability(std::span<const int> occupations) const;

  std::vector<int> occupations(std::size_t index) const;
  std::size_t index_of(std::span<const int> occupations) const;
  std::size_t stride(std::size_t mode) const noexcept { return strides_[mode]; }

  MultimodeState to_density() const;

 private:
  MultimodeState(std::vector<ModeLabel> modes, int cutoff);

  std::vector<ModeLabel> modes_;
  int cutoff_ = 1;
  std::size_t dimension_ = 1;
  std::vector<std::size_t> strides_;
  Representation representation_ = Representation::pure_vector;
  Eigen::VectorXcd amplitudes_;
  Eigen::MatrixXcd density_;
};

/// Default two-mode layout: degenerate H-polarized modes on ports a and b.
std::vector<ModeLabel> default_two_mode_labels();

/// Fock basis state. Empty `labels` selects the default two-mode layout and
/// then requires exactly two occupations.
MultimodeState make_fock(std::span<const int> occupations, int cutoff,
                         std::vector<ModeLabel> labels = {});

/// Twin-mode density matrix sum_{n,p} rho_np |n,n><p,p| on ports a, b.
MultimodeState make_twin_mode_mixture(const Eigen::MatrixXcd& rho, int cutoff);

/// A truncated state together with the weight lost to truncation.
struct TruncatedState {
  MultimodeState state;
  double leakage = 0.0;
  bool truncation_warning = false;
};

inline constexpr double kLeakageWarningThreshold = 1e-8;

/// |alpha_a> |alpha_b>, truncated to total photon number <= cutoff and
/// renormalized. Requires |alpha|^2 <= cutoff / 4 for each mode.
TruncatedState make_coherent_pair(Complex alpha_a, Complex alpha_b, int cutoff);

/// D_a(alpha_a) D_b(alpha_b) sum_n tanh(r)^n / cosh(r) |n,n>: a displaced
/// two-mode squeezed state whose difference quadrature X_a - X_b is squeezed
/// by exp(-2r). r = 0 gives the coherent pair. Truncated like
/// make_coherent_pair, without the |alpha|^2 precondition.
TruncatedState make_displaced_twin_beam(Complex alpha_a, Complex alpha_b,
                                        double squeeze_r, int cutoff);

struct PortPair {
  SpatialPort first = SpatialPort::a;
  SpatialPort second = SpatialPort::b;
};

/// Mixes every mode on `inputs.first` with the mode on `inputs.second` that
/// carries the same polarization and frequency tag; a missing partner is
/// added in vacuum. Outputs are relabeled onto `outputs`. With transmission
/// amplitude cos(angle): symmetric_i uses out = [[t, r], [r, t]] in with
/// t = -i cos(angle), r = sin(angle); rotation uses [[c, s], [-s, c]].
MultimodeState apply_beam_splitter(
    const MultimodeState& state, double mixing_angle,
    SplitterConvention convention = SplitterConvention::symmetric_i,
    PortPair inputs = {SpatialPort::a, SpatialPort::b},
    PortPair outputs = {SpatialPort::c, SpatialPort::d});

/// Half-wave plate at angle theta followed by a polarizing splitter. All
/// modes must share one spatial port. The H and V modes of each frequency
/// tag are rotated by 2 theta; H exits on port c, V on port d.
MultimodeState apply_waveplate_polarizer(const MultimodeState& state,
                                         double theta);

struct ScatterOutcome {
  std::map<int, double> distribution;  // n_c - n_d -> probability
  double mean = 0.0;
  double variance = 0.0;

  double stddev() const;
};

/// Exact distribution of n_c - n_d with photon numbers summed over every
/// mode (any polarization or frequency tag) on each port.
ScatterOutcome number_difference_stats(const MultimodeState& state,
                                       SpatialPort port_c = SpatialPort::c,
                                       SpatialPort port_d = SpatialPort::d);

/// Probability that both ports hold at least one photon.
double coincidence_probability(const MultimodeState& state,
                               SpatialPort port_c = SpatialPort::c,
                               SpatialPort port_d = SpatialPort::d);

}  // namespace twinbeam::fock
