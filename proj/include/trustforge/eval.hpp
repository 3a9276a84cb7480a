// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

// Cross-validation harness, realization repeats, cross-dataset runs and
// report emission.

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "trustforge/features.hpp"
#include "trustforge/models.hpp"
#include "trustforge/synth.hpp"
#include "trustforge/topology.hpp"

namespace trustforge {

/// Fold assignment for every row.
struct FoldPlan {
  int folds = 10;
  std::uint64_t seed = 0;
  bool grouped_by_day = false;
  std::vector<int> fold_of;  // row -> fold id

  std::vector<Eigen::Index> test_rows(int fold) const;
  std::vector<Eigen::Index> train_rows(int fold) const;
};

/// Shuffles each class with `seed` and deals its rows round-robin over the
/// folds, continuing the deal offset from one class to the next. Throws
/// InsufficientDataError when a class has fewer rows than folds.
FoldPlan stratified_kfold(const Eigen::VectorXi& labels, int folds = 10, std::uint64_t seed = 0);

/// Whole groups (days) go to one fold. Throws InsufficientDataError when
/// there are fewer groups than folds or a training split would lose a class.
FoldPlan grouped_kfold(const Eigen::VectorXi& labels, const std::vector<int>& groups, int folds = 10,
                       std::uint64_t seed = 0);

/// Fraction of positions where prediction equals truth.
double accuracy(const Eigen::VectorXi& predicted, const Eigen::VectorXi& truth);

/// Marks round(fraction * class size) rows of each class as labeled, at
/// least one per class.
std::vector<bool> stratified_label_mask(const Eigen::VectorXi& labels, double fraction, std::uint64_t seed);

struct CvResult {
  std::vector<double> fold_accuracies;
  double mean = 0.0;
};

/// Standardizes on the training folds, fits, scores each test fold. The
/// model seed for fold f is derive_seed({spec.seed, f}).
CvResult run_cv(const Eigen::MatrixXd& x, const Eigen::VectorXi& labels, const ModelSpec& spec,
                const FoldPlan& plan);

/// Train on one table, test on another; standardization is fitted on the
/// training table. Throws ConfigError on a feature-kind or width mismatch.
double cross_dataset_eval(const FeatureTable& train, const FeatureTable& test, const ModelSpec& spec);

struct RealizationStats {
  std::vector<double> per_realization;
  double mean = 0.0;
  double std = 0.0;  // population std over realizations
};

RealizationStats summarize(const std::vector<double>& values);

struct PipelineSpec {
  SynthMethod method = SynthMethod::RWI;
  SynthConfig synth = RwiConfig{};
  FeatureKind kind = FeatureKind::Correlation;
  FeatureConfig features;
  ModelSpec model;
  int folds = 10;
  bool group_by_day = false;
  std::uint64_t base_seed = 0;
};

/// Realization r augments `base` with seed base_seed + r, extracts features
/// and runs cross-validation. Throws ConfigError when n < 2.
RealizationStats repeat_realizations(const std::vector<Instance>& base, const NeighborMap& neighbors,
                                     const StatsMap& stats, const PipelineSpec& spec, int n = 10);

struct Pca2d {
  Eigen::MatrixXd projection;  // rows x 2
  Eigen::MatrixXd axes;        // D x 2, unit columns
  Eigen::Vector2d explained;   // variance fractions, non-increasing
};

/// Top-2 principal axes of the z-scored matrix. Each axis is signed so that
/// its largest-magnitude loading is positive.
Pca2d pca2d(const Eigen::MatrixXd& x);

// Experiment matrix -----------------------------------------------------------

/// Synthesis method that produced the untrustworthy rows of `table`.
SynthMethod table_synth_method(const FeatureTable& table);

struct CellKey {
  std::string model;
  std::string features;
  std::string train_synth;
  std::string test_synth;

  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct Cell {
  CellKey key;
  std::vector<int> realizations;
  std::vector<double> accuracies;  // one per realization
  double mean = 0.0;
  std::optional<double> std;  // present with two or more realizations
  std::vector<std::string> flags;

  friend bool operator==(const Cell&, const Cell&) = default;
};

struct TargetCheck {
  int id = 0;
  std::string description;
  bool evaluated = false;
  bool passed = false;
  std::string detail;

  friend bool operator==(const TargetCheck&, const TargetCheck&) = default;
};

struct EvalReport {
  int schema_version = 1;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<Cell> cells;
  std::vector<TargetCheck> targets;

  const Cell* find(const CellKey& key) const;
  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

struct EvalConfig {
  std::vector<ModelSpec> models;
  int folds = 10;
  bool group_by_day = false;
  std::vector<std::pair<SynthMethod, SynthMethod>> cross;  // (train, test)
  std::vector<ModelKind> cross_models{ModelKind::LinearSVM, ModelKind::MLP, ModelKind::LabelProp};
  std::uint64_t seed = 0;
  int jobs = 1;
};

/// Runs every (model, kind, synth) cross-validation cell over the
/// realizations present in `tables`, plus the requested cross-dataset
/// cells, then evaluates the quantitative targets and flags failing cells.
/// Results do not depend on `jobs`.
EvalReport evaluate(const std::vector<FeatureTable>& tables, const EvalConfig& config,
                    std::vector<std::pair<std::string, std::string>> config_echo = {});

/// Fills `report.targets` and appends a flag to every cell involved in a
/// failed target.
void check_targets(EvalReport& report);

void write_report(std::ostream& out, const EvalReport& report);
EvalReport read_report(std::istream& in);

/// Header `model,features,train_synth,test_synth,realization,accuracy`.
void write_plot_data(std::ostream& out, const EvalReport& report);

/// Header `model,features,train_synth,test_synth,realizations,mean,std`.
void write_summary(std::ostream& out, const EvalReport& report);

/// Runs `fn(i)` for i in [0, n) on up to `jobs` threads.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace trustforge
