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
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "twinbeam/errors.hpp"
#include "twinbeam/opo_spectra.hpp"

namespace twinbeam::opo {
namespace {

double db(double x) { return 10.0 * std::log10(x); }

TEST(Spectra, DcSqueezingLevels) {
  EXPECT_NEAR(db(intensity_diff_spectrum(0.0, 0.72)), -5.528419686577808, 1e-12);
  EXPECT_NEAR(db(intensity_diff_spectrum(0.0, 0.5)), -3.010299956639812, 1e-12);
  EXPECT_NEAR(db(intensity_diff_spectrum(0.0, 0.72)), -5.5, 0.1);
  EXPECT_NEAR(db(intensity_diff_spectrum(0.0, 0.5)), -3.0, 0.1);
  EXPECT_DOUBLE_EQ(intensity_diff_spectrum(0.0, 0.0), 1.0);
}

TEST(Spectra, PhaseSpectrumValues) {
  EXPECT_DOUBLE_EQ(phase_diff_spectrum(1.0, 0.5), 1.5);
  EXPECT_DOUBLE_EQ(phase_diff_spectrum(2.0, 0.5), 1.125);
  EXPECT_NEAR(db(phase_diff_spectrum(1.0, 0.5)), 1.760912590556812, 1e-12);
  EXPECT_THROW(phase_diff_spectrum(0.0, 0.5), DomainError);
  EXPECT_DOUBLE_EQ(distinguishable_phase_spectrum(0.3), 1.0);
}

TEST(Spectra, UncertaintyProductValue) {
  EXPECT_NEAR(uncertainty_product(1.0, 0.72), 1.0 + 0.72 * 0.28 / 2.0, 1e-15);
  EXPECT_NEAR(uncertainty_product(1.0, 0.72), 1.1008, 1e-12);
}

TEST(Spectra, UncertaintyProductIdentity) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> xi_dist(0.0, 1.0);
  std::uniform_real_distribution<double> log_u(-3.0, 3.0);
  for (int k = 0; k < 10000; ++k) {
    const double xi = xi_dist(rng);
    const double u = std::pow(10.0, log_u(rng));
    const double expected = 1.0 + xi * (1.0 - xi) / (u * u * (1.0 + u * u));
    ASSERT_NEAR(uncertainty_product(u, xi), expected, 1e-12 * expected);
    ASSERT_GE(uncertainty_product(u, xi), 1.0 - 1e-12);
  }
}

TEST(Spectra, MinimumUncertaintyAtFullCorrelation) {
  for (double u : {1e-3, 0.1, 0.5, 1.0, 3.0, 100.0}) {
    EXPECT_NEAR(uncertainty_product(u, 1.0), 1.0, 1e-12) << u;
    EXPECT_NEAR(uncertainty_product(u, 0.0), 1.0, 1e-15) << u;
  }
}

TEST(Spectra, MonotoneAndBounded) {
  for (double xi : {0.1, 0.5, 0.72, 1.0}) {
    double previous_x = -1.0, previous_p = 1e300;
    for (double u = 0.05; u < 20.0; u *= 1.3) {
      const double sx = intensity_diff_spectrum(u, xi);
      const double sp = phase_diff_spectrum(u, xi);
      EXPECT_GT(sx, previous_x);
      EXPECT_LT(sp, previous_p);
      EXPECT_GE(sx, 1.0 - xi);
      EXPECT_LE(sx, 1.0);
      EXPECT_GE(sp, 1.0);
      previous_x = sx;
      previous_p = sp;
    }
  }
}

TEST(Spectra, RejectsOutOfRangeXi) {
  EXPECT_THROW(intensity_diff_spectrum(1.0, 1.2), ValidationError);
  EXPECT_THROW(intensity_diff_spectrum(1.0, -0.1), ValidationError);
  EXPECT_THROW(phase_diff_spectrum(1.0, std::nan("")), ValidationError);
}

TEST(CavityParams, DerivedQuantities) {
  const OpoParams p{0.036, 0.014, 1.2e9, -79.0};
  EXPECT_NEAR(p.xi(), 0.72, 1e-15);
  EXPECT_NEAR(p.delta_hz(), 0.05 * 1.2e9 / (2.0 * std::numbers::pi), 1e-6);
  const ModelParams m = p.model();
  EXPECT_DOUBLE_EQ(m.s0_dbm, -79.0);
  EXPECT_THROW((OpoParams{0.0, 0.01, 1e9, -79.0}.model()), ValidationError);
  EXPECT_THROW((OpoParams{0.02, -0.01, 1e9, -79.0}.model()), ValidationError);
  EXPECT_THROW((OpoParams{0.02, 0.01, 0.0, -79.0}.model()), ValidationError);
}

TEST(Curves, PhysicalFrequencyAndDbm) {
  const ModelParams params{-79.0, 0.72, 2.98e6};
  const std::vector<double> nu{0.0, 2.98e6, 1e9};
  const SpectrumCurve rel = physical_frequency_curve(params, SpectrumKind::intensity, nu);
  EXPECT_EQ(rel.unit, PowerUnit::relative);
  EXPECT_DOUBLE_EQ(rel.values[1], 1.0 - 0.72 / 2.0);
  const SpectrumCurve dbm = to_dbm(rel, params.s0_dbm);
  EXPECT_EQ(dbm.unit, PowerUnit::dbm);
  EXPECT_NEAR(dbm.values[0], -84.528419686577808, 1e-12);
  EXPECT_NEAR(dbm.values[0], -84.53, 0.005);
  EXPECT_NEAR(dbm.values[2], -79.0, 1e-4);
  const SpectrumCurve back = from_dbm(dbm, params.s0_dbm);
  for (std::size_t i = 0; i < nu.size(); ++i) {
    EXPECT_NEAR(back.values[i], rel.values[i], 1e-14);
  }
}

TEST(Curves, FlatWhenUncorrelated) {
  const ModelParams params{-79.0, 0.0, 2.98e6};
  const std::vector<double> nu{1e5, 1e6, 5e6};
  for (SpectrumKind kind : {SpectrumKind::intensity, SpectrumKind::phase}) {
    const SpectrumCurve c = to_dbm(physical_frequency_curve(params, kind, nu), -79.0);
    for (double v : c.values) EXPECT_DOUBLE_EQ(v, -79.0);
  }
}

TEST(Curves, PhaseCurveRisesTowardLowFrequency) {
  const ModelParams params{-79.5, 0.5, 4.3e6};
  const std::vector<double> nu{0.5e6, 2e6, 8e6};
  const SpectrumCurve c =
      to_dbm(physical_frequency_curve(params, SpectrumKind::phase, nu), -79.5);
  EXPECT_GT(c.values[0], c.values[1]);
  EXPECT_GT(c.values[1], c.values[2]);
  EXPECT_GT(c.values[2], -79.5);
  const std::vector<double> with_dc{0.0, 1e6};
  EXPECT_THROW(physical_frequency_curve(params, SpectrumKind::phase, with_dc),
               DomainError);
}

TEST(Curves, UnitTagsMustAgree) {
  const ModelParams params{-79.0, 0.5, 4.3e6};
  const std::vector<double> nu{1e6, 2e6};
  const SpectrumCurve rel = physical_frequency_curve(params, SpectrumKind::phase, nu);
  const SpectrumCurve dbm = to_dbm(rel, -79.0);
  EXPECT_THROW(difference_db(rel, dbm), ValidationError);
  EXPECT_THROW(to_dbm(dbm, -79.0), ValidationError);
  EXPECT_THROW(from_dbm(rel, -79.0), ValidationError);
  const std::vector<double> d = difference_db(rel, rel);
  EXPECT_DOUBLE_EQ(d[0], 0.0);
  SpectrumCurve zero = rel;
  zero.values[0] = 0.0;
  EXPECT_THROW(to_dbm(zero, -79.0), DomainError);
}

TEST(Curves, CsvLayout) {
  const ModelParams params{-79.0, 0.72, 2.98e6};
  const std::vector<double> nu{1e6, 2e6};
  std::ostringstream out;
  write_curve_csv(out, to_dbm(physical_frequency_curve(params, SpectrumKind::intensity, nu),
                              -79.0));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "frequency_hz,value,unit_tag");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 8), "1000000,");
  EXPECT_EQ(line.substr(line.size() - 4), ",dBm");
}

TEST(KindNames, RoundTrip) {
  for (SpectrumKind k : {SpectrumKind::intensity, SpectrumKind::phase, SpectrumKind::flat}) {
    EXPECT_EQ(parse_kind(kind_name(k)), k);
  }
  EXPECT_THROW(parse_kind("amplitude"), ValidationError);
}

}  // namespace
}  // namespace twinbeam::opo
