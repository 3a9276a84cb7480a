// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "trustforge/error.hpp"
#include "trustforge/eval.hpp"
#include "trustforge/pipeline.hpp"
#include "trustforge/simulate.hpp"

using namespace trustforge;

namespace {

Eigen::VectorXi labels_with(int zeros, int ones) {
  Eigen::VectorXi y(zeros + ones);
  y.head(zeros).setZero();
  y.tail(ones).setOnes();
  return y;
}

// Rows 0..n-1 trustworthy, n..2n-1 synthesized; class 1 shifted along f0.
FeatureTable table(Eigen::Index n, Eigen::Index dims, double gap, SynthMethod method, int realization,
                   std::uint64_t seed, FeatureKind kind = FeatureKind::Correlation) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  FeatureTable t;
  t.kind = kind;
  t.features.resize(2 * n, dims);
  t.labels.resize(2 * n);
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    const int c = i < n ? 0 : 1;
    t.labels(i) = c;
    for (Eigen::Index d = 0; d < dims; ++d) t.features(i, d) = z(rng) + (d == 0 ? gap * c : 0.0);
    t.keys.push_back(RowKey{static_cast<SensorId>(1 + i % 5), static_cast<int>(i % 4), static_cast<int>(i % 12)});
    t.sources.push_back(c == 0 ? TrustSource::Original
                               : (method == SynthMethod::RWI ? TrustSource::RWI : TrustSource::Drift));
    t.realizations.push_back(realization);
    t.flags.push_back(0);
  }
  return t;
}

ModelSpec svm_spec(std::uint64_t seed = 1) {
  ModelSpec s;
  s.kind = ModelKind::LinearSVM;
  s.seed = seed;
  return s;
}

}  // namespace

// Folds ---------------------------------------------------------------------

TEST(StratifiedKFold, PartitionAndProportions) {
  const auto y = labels_with(60, 40);
  const auto plan = stratified_kfold(y, 10, 3);
  std::vector<int> seen(100, 0);
  for (int f = 0; f < 10; ++f) {
    const auto test = plan.test_rows(f);
    const auto train = plan.train_rows(f);
    EXPECT_EQ(test.size() + train.size(), 100u);
    int ones = 0;
    for (auto r : test) {
      ++seen[static_cast<std::size_t>(r)];
      ones += y(r);
    }
    EXPECT_EQ(test.size(), 10u);
    EXPECT_EQ(ones, 4);
  }
  for (int s : seen) EXPECT_EQ(s, 1);
}

TEST(StratifiedKFold, UnevenCountsDifferByAtMostOne) {
  const auto y = labels_with(23, 17);
  const auto plan = stratified_kfold(y, 10, 5);
  std::size_t lo = 100;
  std::size_t hi = 0;
  for (int f = 0; f < 10; ++f) {
    const auto n = plan.test_rows(f).size();
    lo = std::min(lo, n);
    hi = std::max(hi, n);
    int ones = 0;
    for (auto r : plan.test_rows(f)) ones += y(r);
    EXPECT_GE(ones, 1);
    EXPECT_LE(ones, 2);
  }
  EXPECT_LE(hi - lo, 1u);
}

TEST(StratifiedKFold, DeterministicPerSeed) {
  const auto y = labels_with(50, 50);
  EXPECT_EQ(stratified_kfold(y, 5, 9).fold_of, stratified_kfold(y, 5, 9).fold_of);
  EXPECT_NE(stratified_kfold(y, 5, 9).fold_of, stratified_kfold(y, 5, 10).fold_of);
}

TEST(StratifiedKFold, Errors) {
  EXPECT_THROW(stratified_kfold(labels_with(50, 5), 10, 1), InsufficientDataError);
  EXPECT_THROW(stratified_kfold(labels_with(50, 50), 1, 1), ConfigError);
}

TEST(GroupedKFold, DaysNeverSplit) {
  const auto y = labels_with(100, 100);
  std::vector<int> days;
  for (int i = 0; i < 200; ++i) days.push_back(i % 10);
  const auto plan = grouped_kfold(y, days, 5, 2);
  EXPECT_TRUE(plan.grouped_by_day);
  std::map<int, std::set<int>> folds_of_day;
  for (std::size_t i = 0; i < days.size(); ++i) folds_of_day[days[i]].insert(plan.fold_of[i]);
  for (const auto& [d, f] : folds_of_day) EXPECT_EQ(f.size(), 1u) << "day " << d;
  for (int f = 0; f < 5; ++f) EXPECT_FALSE(plan.test_rows(f).empty());
}

// Metrics -------------------------------------------------------------------

TEST(Accuracy, Examples) {
  EXPECT_EQ(accuracy(Eigen::VectorXi{{0, 1, 1, 0}}, Eigen::VectorXi{{0, 1, 1, 0}}), 1.0);
  EXPECT_EQ(accuracy(Eigen::VectorXi{{1, 1, 1, 1}}, Eigen::VectorXi{{0, 1, 1, 0}}), 0.5);
  EXPECT_EQ(accuracy(Eigen::VectorXi{{1, 0}}, Eigen::VectorXi{{0, 1}}), 0.0);
  EXPECT_THROW(accuracy(Eigen::VectorXi{{1}}, Eigen::VectorXi{{0, 1}}), ConfigError);
  EXPECT_THROW(accuracy(Eigen::VectorXi(0), Eigen::VectorXi(0)), ConfigError);
}

TEST(LabelMask, StratifiedFraction) {
  const auto y = labels_with(100, 50);
  const auto mask = stratified_label_mask(y, 0.1, 4);
  int l0 = 0;
  int l1 = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (mask[static_cast<std::size_t>(i)]) (y(i) == 0 ? l0 : l1)++;
  EXPECT_EQ(l0, 10);
  EXPECT_EQ(l1, 5);
  const auto tiny = stratified_label_mask(labels_with(3, 3), 0.01, 4);
  EXPECT_EQ(std::count(tiny.begin(), tiny.end(), true), 2);
}

// Cross-validation ----------------------------------------------------------

TEST(RunCv, SeparableDataIsPerfect) {
  const auto t = table(100, 4, 20.0, SynthMethod::RWI, 0, 1);
  const auto plan = stratified_kfold(t.labels, 10, 1);
  const auto cv = run_cv(t.features, t.labels, svm_spec(), plan);
  EXPECT_EQ(cv.fold_accuracies.size(), 10u);
  EXPECT_EQ(cv.mean, 1.0);
}

TEST(RunCv, RandomLabelsNearChance) {
  auto t = table(200, 4, 0.0, SynthMethod::RWI, 0, 2);
  std::mt19937_64 rng(3);
  std::shuffle(t.labels.begin(), t.labels.end(), rng);
  const auto plan = stratified_kfold(t.labels, 10, 1);
  for (auto kind : {ModelKind::LinearSVM, ModelKind::MLP}) {
    ModelSpec s;
    s.kind = kind;
    s.seed = 4;
    s.mlp.hidden = 8;
    const double m = run_cv(t.features, t.labels, s, plan).mean;
    EXPECT_GT(m, 0.38) << to_string(kind);
    EXPECT_LT(m, 0.62) << to_string(kind);
  }
}

TEST(RunCv, TestLabelsNeverReachTraining) {
  // Flipping the labels of one fold's test rows must turn that fold's
  // accuracy a into exactly 1 - a and leave the model untouched.
  const auto t = table(60, 3, 1.0, SynthMethod::RWI, 0, 5);
  const auto plan = stratified_kfold(t.labels, 5, 2);
  for (auto kind : {ModelKind::LinearSVM, ModelKind::MLP, ModelKind::KMeans, ModelKind::LabelProp}) {
    ModelSpec s;
    s.kind = kind;
    s.seed = 6;
    s.mlp.hidden = 4;
    const auto base = run_cv(t.features, t.labels, s, plan);
    Eigen::VectorXi flipped = t.labels;
    for (auto r : plan.test_rows(0)) flipped(r) = 1 - flipped(r);
    const auto after = run_cv(t.features, flipped, s, plan);
    EXPECT_NEAR(after.fold_accuracies[0], 1.0 - base.fold_accuracies[0], 1e-12) << to_string(kind);
  }
}

TEST(RunCv, TestFeaturesNeverReachTraining) {
  // A wild test row may flip its own prediction but, with scaling fitted on
  // training rows only, no other prediction in its fold.
  const auto t = table(60, 3, 2.0, SynthMethod::RWI, 0, 7);
  const auto plan = stratified_kfold(t.labels, 5, 2);
  const auto test = plan.test_rows(1);
  auto moved = t.features;
  moved.row(test.front()).array() += 1.0e6;
  for (auto kind : {ModelKind::LinearSVM, ModelKind::MLP, ModelKind::LabelProp}) {
    ModelSpec s;
    s.kind = kind;
    s.seed = 6;
    s.mlp.hidden = 4;
    const auto a = run_cv(t.features, t.labels, s, plan);
    const auto b = run_cv(moved, t.labels, s, plan);
    EXPECT_LE(std::abs(a.fold_accuracies[1] - b.fold_accuracies[1]), 1.0 / static_cast<double>(test.size()) + 1e-12)
        << to_string(kind);
  }
}

TEST(CrossDataset, SeparableTransfers) {
  const auto train = table(80, 4, 15.0, SynthMethod::RWI, 0, 8);
  const auto test = table(80, 4, 15.0, SynthMethod::Drift, 0, 9);
  EXPECT_EQ(cross_dataset_eval(train, test, svm_spec()), 1.0);
}

TEST(CrossDataset, Mismatch) {
  const auto a = table(20, 4, 1.0, SynthMethod::RWI, 0, 1);
  const auto b = table(20, 3, 1.0, SynthMethod::Drift, 0, 1);
  const auto c = table(20, 4, 1.0, SynthMethod::Drift, 0, 1, FeatureKind::DST);
  EXPECT_THROW(cross_dataset_eval(a, b, svm_spec()), ConfigError);
  EXPECT_THROW(cross_dataset_eval(a, c, svm_spec()), ConfigError);
}

// Realizations --------------------------------------------------------------

TEST(Summarize, PopulationStd) {
  const auto s = summarize({0.8, 0.9});
  EXPECT_NEAR(s.mean, 0.85, 1e-15);
  EXPECT_NEAR(s.std, 0.05, 1e-15);
  EXPECT_EQ(summarize({0.7, 0.7, 0.7}).std, 0.0);
}

class SimulatedPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    SimulationConfig sim;
    sim.sensors = 6;
    sim.days = 2;
    sim.artifact_sensors = 0;
    sim.seed = 11;
    const auto dep = simulate(sim);
    ParsedReadings parsed;
    parsed.readings = dep.readings;
    ingested_ = new IngestResult(ingest(parsed));
    neighbors_ = new NeighborMap(build_neighbor_map(dep.layout, ingested_->instances, {5, 3}));
  }
  static void TearDownTestSuite() {
    delete ingested_;
    delete neighbors_;
  }
  static IngestResult* ingested_;
  static NeighborMap* neighbors_;
};
IngestResult* SimulatedPipeline::ingested_ = nullptr;
NeighborMap* SimulatedPipeline::neighbors_ = nullptr;

TEST_F(SimulatedPipeline, DegenerateSynthesisHasZeroSpread) {
  PipelineSpec spec;
  spec.method = SynthMethod::Drift;
  spec.synth = DriftConfig{0.0, 0.0, 10.0};
  spec.model = svm_spec();
  spec.folds = 3;
  spec.base_seed = 5;
  const auto s = repeat_realizations(ingested_->instances, *neighbors_, ingested_->stats, spec, 3);
  ASSERT_EQ(s.per_realization.size(), 3u);
  EXPECT_EQ(s.std, 0.0);
  EXPECT_EQ(s.per_realization[0], s.per_realization[2]);
}

TEST_F(SimulatedPipeline, RwiRealizationsAreValidAccuracies) {
  PipelineSpec spec;
  spec.model = svm_spec();
  spec.folds = 3;
  spec.base_seed = 5;
  const auto s = repeat_realizations(ingested_->instances, *neighbors_, ingested_->stats, spec, 2);
  for (double a : s.per_realization) {
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
  }
  EXPECT_THROW(repeat_realizations(ingested_->instances, *neighbors_, ingested_->stats, spec, 1), ConfigError);
}

// PCA -----------------------------------------------------------------------

TEST(Pca2d, TwoDimensionalInputKeepsStandardizedDistances) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd x(50, 2);
  for (Eigen::Index i = 0; i < 50; ++i) {
    x(i, 0) = z(rng);
    x(i, 1) = 0.5 * x(i, 0) + z(rng);
  }
  const auto p = pca2d(x);
  const Eigen::MatrixXd s = Standardizer::fit(x).transform(x);
  for (Eigen::Index i = 0; i < 50; ++i)
    for (Eigen::Index j = i + 1; j < 50; ++j)
      EXPECT_NEAR((p.projection.row(i) - p.projection.row(j)).norm(), (s.row(i) - s.row(j)).norm(), 1e-10);
  EXPECT_NEAR(p.explained.sum(), 1.0, 1e-12);
  EXPECT_GE(p.explained(0), p.explained(1));
  EXPECT_NEAR(p.axes.col(0).norm(), 1.0, 1e-12);
  EXPECT_NEAR(p.axes.col(0).dot(p.axes.col(1)), 0.0, 1e-12);
}

TEST(Pca2d, RankOneHasNoSecondComponent) {
  Eigen::MatrixXd x(20, 3);
  for (Eigen::Index i = 0; i < 20; ++i) x.row(i) << i, 2.0 * i, -3.0 * i + 1.0;
  const auto p = pca2d(x);
  EXPECT_NEAR(p.explained(0), 1.0, 1e-12);
  EXPECT_EQ(p.explained(1), 0.0);
  EXPECT_THROW(pca2d(Eigen::MatrixXd::Ones(1, 3)), InsufficientDataError);
}

// Harness -------------------------------------------------------------------

TEST(Evaluate, DeterministicAcrossJobCounts) {
  std::vector<FeatureTable> tables;
  for (int r = 0; r < 2; ++r) {
    tables.push_back(table(40, 4, 3.0, SynthMethod::RWI, r, 100 + static_cast<std::uint64_t>(r)));
    tables.push_back(table(40, 4, 1.0, SynthMethod::Drift, r, 200 + static_cast<std::uint64_t>(r)));
  }
  EvalConfig cfg;
  for (auto k : {ModelKind::LinearSVM, ModelKind::KMeans}) {
    ModelSpec s;
    s.kind = k;
    cfg.models.push_back(s);
  }
  cfg.folds = 4;
  cfg.cross = {{SynthMethod::RWI, SynthMethod::Drift}};
  cfg.cross_models = {ModelKind::LinearSVM};
  cfg.seed = 3;
  cfg.jobs = 1;
  const auto one = evaluate(tables, cfg);
  cfg.jobs = 4;
  const auto four = evaluate(tables, cfg);
  EXPECT_EQ(one, four);
  ASSERT_EQ(one.cells.size(), 5u);
  const auto* cell = one.find({"svm", "corr", "rwi", "rwi"});
  ASSERT_NE(cell, nullptr);
  EXPECT_EQ(cell->accuracies.size(), 2u);
  EXPECT_TRUE(cell->std.has_value());
  EXPECT_NE(one.find({"svm", "corr", "rwi", "drift"}), nullptr);
}

TEST(Evaluate, SingleRealizationHasNoStd) {
  EvalConfig cfg;
  cfg.models = {svm_spec()};
  cfg.folds = 4;
  const auto rep = evaluate({table(40, 4, 3.0, SynthMethod::RWI, 0, 1)}, cfg);
  ASSERT_EQ(rep.cells.size(), 1u);
  EXPECT_FALSE(rep.cells[0].std.has_value());
  std::ostringstream out;
  write_report(out, rep);
  EXPECT_EQ(out.str().find("\"std\""), std::string::npos);
}

TEST(Evaluate, Errors) {
  EvalConfig cfg;
  cfg.folds = 4;
  EXPECT_THROW(evaluate({table(40, 4, 3.0, SynthMethod::RWI, 0, 1)}, cfg), ConfigError);
  cfg.models = {svm_spec()};
  cfg.folds = 1;
  EXPECT_THROW(evaluate({table(40, 4, 3.0, SynthMethod::RWI, 0, 1)}, cfg), ConfigError);
}

TEST(Report, RoundTrip) {
  EvalReport rep;
  rep.config = {{"eval.folds", "10"}, {"eval.seed", "7"}};
  rep.cells.push_back(Cell{{"svm", "corr", "rwi", "rwi"}, {0, 1}, {0.9, 0.8}, 0.85, 0.05, {"target-5"}});
  rep.cells.push_back(Cell{{"mlp", "dst", "rwi", "drift"}, {0}, {0.123456789012345678}, 0.123456789012345678,
                           std::nullopt, {}});
  rep.targets.push_back(TargetCheck{5, "svm on corr/rwi", true, false, "0.85 < 0.9"});
  rep.targets.push_back(TargetCheck{6, "unused", false, false, ""});
  std::stringstream io;
  write_report(io, rep);
  const auto back = read_report(io);
  EXPECT_EQ(back, rep);
  std::ostringstream a;
  std::ostringstream b;
  write_report(a, rep);
  write_report(b, back);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Report, PlotAndSummaryFiles) {
  EvalReport rep;
  rep.cells.push_back(Cell{{"svm", "corr", "rwi", "rwi"}, {0, 1}, {0.9, 0.8}, 0.85, 0.05, {}});
  std::ostringstream plot;
  write_plot_data(plot, rep);
  const auto s = plot.str();
  EXPECT_EQ(s.rfind("model,features,train_synth,test_synth,realization,accuracy\n", 0), 0u);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 3);
  std::ostringstream summary;
  write_summary(summary, rep);
  EXPECT_NE(summary.str().find("svm"), std::string::npos);
}

TEST(ParallelFor, CoversEveryIndexAndRethrowsLowest) {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 4, [&](std::size_t i) { ++hits[i]; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  try {
    parallel_for(50, 4, [](std::size_t i) {
      if (i == 7 || i == 31) throw ConfigError("fail " + std::to_string(i));
    });
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_STREQ(e.what(), "fail 7");
  }
}
