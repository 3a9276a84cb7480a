// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

// Subcommand implementations behind the `trustforge` executable. Each stage
// reads and writes plain files so stages can be rerun independently.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace trustforge::cli {

using Meta = std::vector<std::pair<std::string, std::string>>;

struct SimulateArgs {
  std::string out;
  int sensors = 10;
  int days = 10;
  std::uint64_t seed = 1;
};

struct IngestArgs {
  std::string readings;
  std::string layout;
  std::string out;
  double step = 60.0;
  double max_gap = 900.0;
  double coverage = 0.9;
  double min_temp = -10.0;
  double max_temp = 60.0;
  double outlier_std = 3.0;
};

struct SynthArgs {
  std::string input;
  std::string out;
  std::string method = "rwi";
  int realizations = 10;
  std::uint64_t seed = 0;
  int mid_points = 10;
  std::optional<double> step_variance;
  double adaptive_factor = 3.0;
  double drift_const = 0.05;
  double noise_std = 0.01;
  double cap = 10.0;
};

struct FeaturesArgs {
  std::vector<std::string> inputs;
  std::string out;
  std::string kind = "corr";
  std::string stats;
  std::string layout;
  std::string neighbors;
  int k_phys = 15;
  int k = 7;
  int window = 120;
  int dct_coeffs = 100;
  int dct_bands = 10;
  int dst_bins = 10;
  double dst_span = 4.0;
};

struct EvalArgs {
  std::vector<std::string> inputs;
  std::string out;
  std::string models = "svm,mlp,kmeans,gmm,svm-via-kmeans,labelprop";
  int folds = 10;
  std::string cross;
  bool group_by_day = false;
  std::uint64_t seed = 0;
  int jobs = 1;
  double svm_c = 1.0;
  int svm_epochs = 50;
  int mlp_hidden = 64;
  int mlp_epochs = 200;
  double mlp_lr = 0.01;
  int lp_k = 10;
  double lp_alpha = 0.99;
  double lp_labeled = 0.10;
  double gmm_ridge = 1e-6;
};

struct SweepArgs {
  EvalArgs eval;
  std::vector<double> svm_c{0.1, 1.0, 10.0};
  std::vector<int> mlp_hidden{16, 64};
  std::vector<double> lp_alpha{0.9, 0.99};
};

struct DemoArgs {
  std::string out;
  std::uint64_t seed = 1;
  int realizations = 3;
  int folds = 5;
  int jobs = 1;
};

struct PcaArgs {
  std::string input;
  std::string out;
};

int cmd_simulate(const SimulateArgs& args);
int cmd_ingest(const IngestArgs& args);
int cmd_synth(const SynthArgs& args);
int cmd_features(const FeaturesArgs& args);
int cmd_eval(const EvalArgs& args);
int cmd_sweep(const SweepArgs& args);
int cmd_demo(const DemoArgs& args);
int cmd_pca(const PcaArgs& args);

/// `key = value` lines; missing file -> empty.
Meta read_meta(const std::string& path);
void write_meta(const std::string& path, const Meta& meta);

}  // namespace trustforge::cli
