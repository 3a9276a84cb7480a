// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "trustforge/error.hpp"
#include "trustforge/numeric.hpp"
#include "trustforge/synth.hpp"

using namespace trustforge;

namespace {

Instance make_instance(const Eigen::VectorXd& v, SensorId id = 1, int day = 0) {
  Instance inst;
  inst.sensor_id = id;
  inst.day_index = day;
  inst.values = v;
  return inst;
}

Eigen::VectorXd diurnal(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 0.05);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v(i) = 20.0 + 2.0 * std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n)) + z(rng);
  return v;
}

RwiConfig fixed(double variance, int mid_points = 10) {
  RwiConfig c;
  c.num_mid_points = mid_points;
  c.step_variance = variance;
  return c;
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / static_cast<double>(a.size()) -
                             static_cast<double>(j) / static_cast<double>(b.size())));
  }
  return d;
}

}  // namespace

TEST(SegmentIndexes, Examples) {
  EXPECT_EQ(segment_indexes(11, 1), (std::vector<Eigen::Index>{0, 5, 10}));
  const auto p = segment_indexes(1440, 10);
  EXPECT_EQ(p.size(), 12u);
  EXPECT_EQ(p.front(), 0);
  EXPECT_EQ(p.back(), 1439);
  EXPECT_THROW(segment_indexes(3, 2), ConfigError);
}

TEST(AnchoredSlope, Examples) {
  EXPECT_DOUBLE_EQ(anchored_slope(Eigen::VectorXd{{2, 4, 6, 8, 10}}), 2.0);
  EXPECT_DOUBLE_EQ(anchored_slope(Eigen::VectorXd::Constant(7, 3.5)), 0.0);
  EXPECT_DOUBLE_EQ(anchored_slope(Eigen::VectorXd{{0, 1, 0, 1, 0}}), 2.0 / 15.0);
}

TEST(AnchoredSlope, MatchesOracleOnSegments) {
  const auto v = diurnal(200, 5);
  const auto ld = oracle::to_ld(v);
  EXPECT_NEAR(anchored_slope(v.segment(17, 40)), static_cast<double>(oracle::anchored_slope(ld, 17, 56)), 1e-12);
}

TEST(Rwi, ZeroStepOnLinearSegmentIsIdentity) {
  const Eigen::VectorXd x{{2, 4, 6, 8, 10}};
  const auto out = rwi(make_instance(x), fixed(0.0, 0), 1);
  for (Eigen::Index i = 0; i < x.size(); ++i) EXPECT_NEAR(out.values(i), x(i), 1e-12);
  EXPECT_EQ(out.label.source(), TrustSource::RWI);
  EXPECT_FALSE(out.label.trustworthy());
}

TEST(Rwi, ZeroStepPivotsToAnchoredLine) {
  const auto out = rwi(make_instance(Eigen::VectorXd{{0, 1, 0, 1, 0}}), fixed(0.0, 0), 1);
  const double expect[] = {0.0, 2.0 / 15, 4.0 / 15, 6.0 / 15, 8.0 / 15};
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(out.values(i), expect[i], 1e-15);
}

TEST(Rwi, StructuralContract) {
  const auto x = diurnal(1440, 8);
  const auto out = rwi(make_instance(x), RwiConfig{}, 42);
  EXPECT_EQ(out.values.size(), 1440);
  EXPECT_EQ(out.values(0), x(0));
}

TEST(Rwi, SlopeRestoredPerSegment) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 25; ++trial) {
    const auto x = diurnal(1440, 100 + static_cast<std::uint64_t>(trial));
    const Eigen::VectorXd y = rwi(make_instance(x), RwiConfig{}, rng()).values;
    // The pre-replacement slope of segment i is measured on the series as it
    // stood when segment i was processed: synthesized anchor, original tail.
    const auto p = segment_indexes(1440, 10);
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      Eigen::VectorXd before = x.segment(p[i], p[i + 1] - p[i] + 1);
      before(0) = y(p[i]);
      const double b0 = anchored_slope(before);
      const double b1 = anchored_slope(y.segment(p[i], p[i + 1] - p[i] + 1));
      EXPECT_LE(std::abs(b1 - b0), 1e-9 * std::max(1.0, std::abs(b0)));
    }
  }
}

TEST(Rwi, FirstDifferencesChangeDistribution) {
  const auto x = diurnal(1440, 21);
  const Eigen::VectorXd y = rwi(make_instance(x), RwiConfig{}, 5).values;
  std::vector<double> dx;
  std::vector<double> dy;
  for (Eigen::Index i = 1; i < x.size(); ++i) {
    dx.push_back(x(i) - x(i - 1));
    dy.push_back(y(i) - y(i - 1));
  }
  const double n = static_cast<double>(dx.size());
  const double critical = 1.628 * std::sqrt(2.0 / n);  // alpha = 0.01
  EXPECT_GT(ks_statistic(dx, dy), critical);
}

TEST(Rwi, AdaptiveStepIsThreeTimesRmsDifference) {
  const Eigen::VectorXd x{{0, 1, 3, 2}};
  const double rms = std::sqrt((1.0 + 4.0 + 1.0) / 3.0);
  EXPECT_DOUBLE_EQ(rwi_step_std(x, RwiConfig{}), 3.0 * rms);
  EXPECT_DOUBLE_EQ(rwi_step_std(x, fixed(0.25)), 0.5);
}

TEST(Drift, Examples) {
  const auto inf = std::numeric_limits<double>::infinity();
  const auto a = drift(make_instance(Eigen::VectorXd::Constant(3, 10.0)), {0.5, 0.0, inf}, 1);
  EXPECT_EQ(a.values, (Eigen::VectorXd{{10.5, 11.0, 11.5}}));
  const auto b = drift(make_instance(Eigen::VectorXd::Constant(3, 10.0)), {0.5, 0.0, 1.0}, 1);
  EXPECT_EQ(b.values, (Eigen::VectorXd{{10.5, 11.0, 11.0}}));
  const auto x = diurnal(100, 3);
  EXPECT_EQ(drift(make_instance(x), {0.0, 0.0, 10.0}, 1).values, x);
  EXPECT_EQ(b.label.source(), TrustSource::Drift);
}

TEST(Drift, MonotoneBoundedDeviation) {
  const auto x = diurnal(1440, 4);
  const auto y = drift(make_instance(x), {0.05, 0.0, 10.0}, 2).values;
  double prev = -1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double dev = y(i) - x(i);
    EXPECT_GE(dev, prev - 1e-12);
    EXPECT_LE(dev, 10.0 + 1e-12);
    prev = dev;
  }
  EXPECT_NEAR(y(1439) - x(1439), 10.0, 1e-12);
}

TEST(Drift, HoldsAtCapOnceReached) {
  const auto y = drift(make_instance(Eigen::VectorXd::Zero(500)), {0.05, 0.01, 1.0}, 7).values;
  Eigen::Index first = -1;
  for (Eigen::Index i = 0; i < y.size() && first < 0; ++i)
    if (y(i) == 1.0) first = i;
  ASSERT_GE(first, 0);
  for (Eigen::Index i = first; i < y.size(); ++i) EXPECT_EQ(y(i), 1.0);
}

TEST(Augment, Counting) {
  std::vector<Instance> data;
  for (int i = 0; i < 100; ++i) data.push_back(make_instance(diurnal(1440, static_cast<std::uint64_t>(i)), i % 10, i / 10));
  for (int i = 0; i < 5; ++i) {
    auto o = make_instance(diurnal(1440, 500 + static_cast<std::uint64_t>(i)), 20 + i, 0);
    o.label = TrustLabel(TrustSource::Outlier);
    data.push_back(o);
  }
  const auto aug = augment(data, SynthMethod::RWI, RwiConfig{}, 3);
  ASSERT_EQ(aug.instances.size(), 205u);
  int t = 0, r = 0, o = 0;
  for (const auto& inst : aug.instances) {
    t += inst.label.source() == TrustSource::Original;
    r += inst.label.source() == TrustSource::RWI;
    o += inst.label.source() == TrustSource::Outlier;
  }
  EXPECT_EQ(t, 100);
  EXPECT_EQ(r, 100);
  EXPECT_EQ(o, 5);
}

TEST(Augment, SeedDeterminism) {
  std::vector<Instance> data{make_instance(diurnal(1440, 1), 1, 0), make_instance(diurnal(1440, 2), 2, 0)};
  for (auto method : {SynthMethod::RWI, SynthMethod::Drift}) {
    const SynthConfig cfg = method == SynthMethod::RWI ? SynthConfig{RwiConfig{}} : SynthConfig{DriftConfig{}};
    const auto a = augment(data, method, cfg, 77);
    const auto b = augment(data, method, cfg, 77);
    const auto c = augment(data, method, cfg, 78);
    for (std::size_t i = 2; i < 4; ++i) {
      EXPECT_EQ(a.instances[i].values, b.instances[i].values);
      EXPECT_NE(a.instances[i].values, c.instances[i].values);
    }
  }
}

TEST(Augment, PerInstanceSeedIndependentOfOrder) {
  std::vector<Instance> data{make_instance(diurnal(1440, 1), 1, 0), make_instance(diurnal(1440, 2), 2, 0)};
  const auto a = augment(data, SynthMethod::RWI, RwiConfig{}, 5);
  std::reverse(data.begin(), data.end());
  const auto b = augment(data, SynthMethod::RWI, RwiConfig{}, 5);
  EXPECT_EQ(a.instances[2].values, b.instances[3].values);
}

TEST(Augment, Errors) {
  auto o = make_instance(diurnal(100, 1));
  o.label = TrustLabel(TrustSource::Outlier);
  EXPECT_THROW(augment({o}, SynthMethod::Drift, DriftConfig{}, 1), ConfigError);
  EXPECT_THROW(augment({make_instance(diurnal(100, 1))}, SynthMethod::RWI, DriftConfig{}, 1), ConfigError);
}

TEST(Synth, LengthPreservedForBothMethods) {
  for (Eigen::Index n : {12, 100, 1440}) {
    const auto x = make_instance(diurnal(n, 2));
    EXPECT_EQ(rwi(x, RwiConfig{}, 1).size(), n);
    EXPECT_EQ(drift(x, DriftConfig{}, 1).size(), n);
  }
}

TEST(SynthMetadata, EchoesDriftConfig) {
  const auto aug = augment({make_instance(diurnal(100, 1))}, SynthMethod::Drift, DriftConfig{0.05, 0.01, 10.0}, 9);
  std::ostringstream out;
  write_synth_metadata(out, aug);
  const auto s = out.str();
  EXPECT_NE(s.find("method = drift"), std::string::npos);
  EXPECT_NE(s.find("drift_constant = 0.05"), std::string::npos);
  EXPECT_NE(s.find("noise_std = 0.01"), std::string::npos);
  EXPECT_NE(s.find("drift_cap = 10"), std::string::npos);
  EXPECT_NE(s.find("seed = 9"), std::string::npos);
}
