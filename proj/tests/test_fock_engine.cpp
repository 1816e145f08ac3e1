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

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "twinbeam/errors.hpp"
#include "twinbeam/fock_engine.hpp"

namespace twinbeam::fock {
namespace {

constexpr double kPi = std::numbers::pi;

// Independent oracle: exp(-i phi (a^dag b + b^dag a)) built by dense
// diagonalization on the two-mode space, then Var(n_a - n_b).
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
  const Eigen::MatrixXd h = a.transpose() * b + b.transpose() * a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
  Eigen::VectorXcd phases(dim);
  for (int k = 0; k < dim; ++k) {
    phases[k] = std::exp(Complex(0.0, -phi * eig.eigenvalues()[k]));
  }
  const Eigen::MatrixXcd v = eig.eigenvectors().cast<Complex>();
  const Eigen::MatrixXcd u = v * phases.asDiagonal() * v.adjoint();
  Eigen::VectorXcd in = Eigen::VectorXcd::Zero(dim);
  in[n_a * d + n_b] = 1.0;
  const Eigen::VectorXcd out = u * in;
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

MultimodeState polarization_pair(int n_h, int n_v, bool distinguishable,
                                 int cutoff) {
  const std::vector<int> occ{n_h, n_v};
  return make_fock(occ, cutoff,
                   {{Polarization::H, 0, SpatialPort::a},
                    {Polarization::V, distinguishable ? 1 : 0, SpatialPort::a}});
}

TEST(FockBasis, IndexRoundTrip) {
  const std::vector<int> occ{2, 0, 3};
  const MultimodeState s = make_fock(
      occ, 3,
      {{Polarization::H, 0, SpatialPort::a},
       {Polarization::V, 0, SpatialPort::a},
       {Polarization::H, 1, SpatialPort::a}});
  EXPECT_EQ(s.dimension(), 64u);
  const std::size_t idx = s.index_of(occ);
  EXPECT_EQ(idx, 2u * 16 + 0u * 4 + 3u);
  EXPECT_EQ(s.occupations(idx), occ);
  EXPECT_DOUBLE_EQ(s.probability(occ), 1.0);
}

TEST(FockBasis, OccupationAboveCutoffIsCapacityError) {
  const std::vector<int> occ{5, 0};
  EXPECT_THROW(make_fock(occ, 4), CapacityError);
}

TEST(FockBasis, NegativeOccupationRejected) {
  const std::vector<int> occ{-1, 0};
  EXPECT_THROW(make_fock(occ, 4), Error);
}

TEST(BeamSplitter, HongOuMandelDip) {
  const std::vector<int> occ{1, 1};
  const MultimodeState out = apply_beam_splitter(make_fock(occ, 2), kPi / 4);
  EXPECT_NEAR(coincidence_probability(out), 0.0, 1e-15);
  const ScatterOutcome stats = number_difference_stats(out);
  EXPECT_NEAR(stats.distribution.at(2), 0.5, 1e-15);
  EXPECT_NEAR(stats.distribution.at(-2), 0.5, 1e-15);
  EXPECT_NEAR(stats.stddev(), 2.0, 1e-12);
}

TEST(BeamSplitter, BinomialVarianceForSinglePortInput) {
  for (int n = 0; n <= 10; ++n) {
    const std::vector<int> occ{n, 0};
    const MultimodeState out = apply_beam_splitter(make_fock(occ, 10), kPi / 4);
    const ScatterOutcome stats = number_difference_stats(out);
    EXPECT_NEAR(stats.variance, n, 1e-10) << "N = " << n;
    EXPECT_NEAR(stats.mean, 0.0, 1e-12);
  }
}

TEST(BeamSplitter, TwinFockVarianceMatchesOracle) {
  for (int n = 1; n <= 8; ++n) {
    const int cutoff = 2 * n;
    const std::vector<int> occ{n, n};
    const MultimodeState out = apply_beam_splitter(make_fock(occ, cutoff), kPi / 4);
    const double variance = number_difference_stats(out).variance;
    EXPECT_NEAR(variance, oracle_variance(n, n, cutoff, kPi / 4), 1e-9) << n;
    EXPECT_NEAR(variance, 2.0 * n * (n + 1), 1e-9) << n;
  }
}

TEST(BeamSplitter, UnbalancedAnglesMatchOracle) {
  for (double phi : {0.1, 0.4, 1.0}) {
    const std::vector<int> occ{3, 2};
    const MultimodeState out = apply_beam_splitter(make_fock(occ, 5), phi);
    EXPECT_NEAR(number_difference_stats(out).variance,
                oracle_variance(3, 2, 5, phi), 1e-10)
        << phi;
  }
}

TEST(BeamSplitter, PreservesNorm) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  const int cutoff = 6;
  const std::vector<ModeLabel> labels = default_two_mode_labels();
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(49);
  for (int i = 0; i <= cutoff; ++i) {
    for (int j = 0; i + j <= cutoff; ++j) amps[i * 7 + j] = Complex(g(rng), g(rng));
  }
  amps.normalize();
  const MultimodeState in = MultimodeState::pure(labels, cutoff, amps);
  for (auto conv : {SplitterConvention::symmetric_i, SplitterConvention::rotation}) {
    const MultimodeState out = apply_beam_splitter(in, 0.37, conv);
    EXPECT_NEAR(out.norm(), 1.0, 1e-12);
  }
}

TEST(BeamSplitter, PairTotalAboveCutoffIsCapacityError) {
  const std::vector<int> occ{3, 3};
  EXPECT_THROW(apply_beam_splitter(make_fock(occ, 4), kPi / 4), CapacityError);
}

TEST(BeamSplitter, ConventionInvarianceForPhaseInsensitiveInputs) {
  for (const auto& occ : std::vector<std::vector<int>>{{1, 1}, {3, 0}, {2, 3}}) {
    const MultimodeState in = make_fock(occ, 5);
    const ScatterOutcome s1 = number_difference_stats(
        apply_beam_splitter(in, kPi / 4, SplitterConvention::symmetric_i));
    const ScatterOutcome s2 = number_difference_stats(
        apply_beam_splitter(in, kPi / 4, SplitterConvention::rotation));
    ASSERT_EQ(s1.distribution.size(), s2.distribution.size());
    for (const auto& [k, p] : s1.distribution) {
      EXPECT_NEAR(p, s2.distribution.at(k), 1e-12);
    }
  }
}

TEST(BeamSplitter, DiagonalMixtureIsWeightedSumOfFockResults) {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(4, 4);
  rho(0, 0) = 0.2;
  rho(1, 1) = 0.3;
  rho(3, 3) = 0.5;
  const MultimodeState mixed = make_twin_mode_mixture(rho, 6);
  const ScatterOutcome stats =
      number_difference_stats(apply_beam_splitter(mixed, kPi / 4));
  // Var over the mixture: sum p_n 2n(n+1), all means zero.
  EXPECT_NEAR(stats.variance, 0.3 * 4.0 + 0.5 * 24.0, 1e-10);
  const ScatterOutcome rotated = number_difference_stats(
      apply_beam_splitter(mixed, kPi / 4, SplitterConvention::rotation));
  EXPECT_NEAR(rotated.variance, stats.variance, 1e-10);
}

TEST(TwinMixture, RejectsInvalidDensityMatrices) {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(2, 2);
  rho(0, 0) = 0.7;
  rho(1, 1) = 0.7;
  EXPECT_THROW(make_twin_mode_mixture(rho, 4), ValidationError);
  rho(1, 1) = 0.3;
  rho(0, 1) = Complex(0.1, 0.0);
  EXPECT_THROW(make_twin_mode_mixture(rho, 4), ValidationError);
  rho(1, 0) = Complex(0.1, 0.0);
  EXPECT_NO_THROW(make_twin_mode_mixture(rho, 4));
  Eigen::MatrixXcd big = Eigen::MatrixXcd::Identity(6, 6) / 6.0;
  EXPECT_THROW(make_twin_mode_mixture(big, 4), CapacityError);
}

TEST(Waveplate, ZeroAngleRoutesModesUnchanged) {
  const MultimodeState out =
      apply_waveplate_polarizer(polarization_pair(2, 1, false, 3), 0.0);
  const ScatterOutcome stats = number_difference_stats(out);
  EXPECT_NEAR(stats.distribution.at(1), 1.0, 1e-14);
  EXPECT_NEAR(stats.variance, 0.0, 1e-14);
}

TEST(Waveplate, QuarterTurnSwapsPolarizations) {
  const MultimodeState out =
      apply_waveplate_polarizer(polarization_pair(2, 1, false, 3), kPi / 4);
  EXPECT_NEAR(number_difference_stats(out).distribution.at(-1), 1.0, 1e-14);
}

TEST(Waveplate, EighthTurnGivesPolarizationHom) {
  const MultimodeState out =
      apply_waveplate_polarizer(polarization_pair(1, 1, false, 2), kPi / 8);
  EXPECT_NEAR(coincidence_probability(out), 0.0, 1e-15);
  EXPECT_NEAR(number_difference_stats(out).stddev(), 2.0, 1e-12);
}

TEST(Waveplate, DistinguishablePhotonsScatterIndependently) {
  const MultimodeState out =
      apply_waveplate_polarizer(polarization_pair(1, 1, true, 2), kPi / 8);
  EXPECT_EQ(out.mode_count(), 4u);
  EXPECT_NEAR(coincidence_probability(out), 0.5, 1e-12);
  const ScatterOutcome stats = number_difference_stats(out);
  EXPECT_NEAR(stats.distribution.at(2), 0.25, 1e-12);
  EXPECT_NEAR(stats.distribution.at(0), 0.5, 1e-12);
  EXPECT_NEAR(stats.distribution.at(-2), 0.25, 1e-12);
  EXPECT_NEAR(stats.stddev(), std::sqrt(2.0), 1e-12);
}

TEST(Waveplate, RequiresSingleSpatialPath) {
  const std::vector<int> occ{1, 1};
  EXPECT_THROW(apply_waveplate_polarizer(make_fock(occ, 2), kPi / 8),
               ValidationError);
}

TEST(CoherentPair, LeakageEqualsPoissonTail) {
  const int cutoff = 16;
  const TruncatedState s = make_coherent_pair(1.0, Complex(0.0, 1.0), cutoff);
  // Total photon number is Poisson with mean |alpha_a|^2 + |alpha_b|^2 = 2.
  double kept = 0.0, term = std::exp(-2.0);
  for (int k = 0; k <= cutoff; ++k) {
    kept += term;
    term *= 2.0 / (k + 1);
  }
  EXPECT_NEAR(s.leakage, 1.0 - kept, 1e-13);
  EXPECT_FALSE(s.truncation_warning);
  EXPECT_NEAR(s.state.norm(), 1.0, 1e-12);
}

TEST(CoherentPair, LowCutoffRaisesTruncationWarning) {
  const TruncatedState s = make_coherent_pair(1.0, 1.0, 8);
  EXPECT_GT(s.leakage, kLeakageWarningThreshold);
  EXPECT_TRUE(s.truncation_warning);
}

TEST(CoherentPair, BrightFieldsNeedLargerCutoff) {
  EXPECT_THROW(make_coherent_pair(3.0, 3.0, 20), PreconditionError);
}

TEST(CoherentPair, OppositePhasesExitOnePortUnderRotationConvention) {
  const TruncatedState in = make_coherent_pair(1.0, -1.0, 16);
  const MultimodeState out =
      apply_beam_splitter(in.state, kPi / 4, SplitterConvention::rotation);
  const ScatterOutcome stats = number_difference_stats(out);
  // Port c carries no light: n_- = -n_d, Poisson with mean 2.
  for (const auto& [k, p] : stats.distribution) {
    if (k > 0) {
      EXPECT_NEAR(p, 0.0, 1e-12) << k;
    }
  }
  EXPECT_NEAR(stats.mean, -2.0, 1e-8);
  EXPECT_NEAR(stats.variance, 2.0, 1e-7);
}

TEST(CoherentPair, ShotNoiseVarianceAtBalance) {
  const TruncatedState in = make_coherent_pair(1.0, 1.0, 20);
  const ScatterOutcome stats =
      number_difference_stats(apply_beam_splitter(in.state, kPi / 4));
  EXPECT_NEAR(stats.variance, 2.0, 1e-8);
}

TEST(DisplacedTwinBeam, ReducesToCoherentPairWithoutSqueezing) {
  const TruncatedState a = make_coherent_pair(Complex(0.8, 0.1), 0.5, 14);
  const TruncatedState b = make_displaced_twin_beam(Complex(0.8, 0.1), 0.5, 0.0, 14);
  EXPECT_NEAR((a.state.amplitudes() - b.state.amplitudes()).norm(), 0.0, 1e-12);
}

TEST(DisplacedTwinBeam, VacuumTwinBeamHasSqueezedDifference) {
  const double r = 0.5;
  const TruncatedState s = make_displaced_twin_beam(0.0, 0.0, r, 24);
  // Two-mode squeezed vacuum: n_a == n_b in every component.
  const ScatterOutcome stats = number_difference_stats(
      s.state, SpatialPort::a, SpatialPort::b);
  EXPECT_NEAR(stats.distribution.at(0), 1.0, 1e-12);
}

}  // namespace
}  // namespace twinbeam::fock
