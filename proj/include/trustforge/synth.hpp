// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

// Untrustworthy-data synthesis: random walk infilling and cumulative drift.

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "trustforge/rng.hpp"
#include "trustforge/types.hpp"

namespace trustforge {

struct RwiConfig {
  int num_mid_points = 10;
  /// Fixed random-walk step variance in degC^2. When unset the step
  /// standard deviation is adaptive_factor * RMS(first differences).
  std::optional<double> step_variance;
  double adaptive_factor = 3.0;
};

struct DriftConfig {
  double drift_constant = 0.05;  // degC per step
  double noise_std = 0.01;       // degC
  double drift_cap = 10.0;       // degC, may be +infinity
};

enum class SynthMethod { RWI, Drift };

std::string_view to_string(SynthMethod m);
SynthMethod parse_synth_method(std::string_view text);  // "rwi" | "drift"
TrustSource source_of(SynthMethod m);

using SynthConfig = std::variant<RwiConfig, DriftConfig>;

/// Segment boundaries {p_0 = 0, ..., p_{M+1} = n-1}, interior points at
/// round(j (n-1) / (M+1)). Throws ConfigError unless strictly increasing.
std::vector<Eigen::Index> segment_indexes(Eigen::Index n, int num_mid_points);

/// Step standard deviation RWI would use for `values` under `config`.
double rwi_step_std(const Eigen::VectorXd& values, const RwiConfig& config);

/// Random walk infilling over `values`; segments are processed in order so
/// each segment starts from the previously synthesized boundary value.
Eigen::VectorXd rwi_values(const Eigen::VectorXd& values, const RwiConfig& config, Rng& rng);

/// output_i = x_i + min(C_i, L), C_i = sum_{j<=i} (d + n_j); held at L once reached.
Eigen::VectorXd drift_values(const Eigen::VectorXd& values, const DriftConfig& config, Rng& rng);

Instance rwi(const Instance& instance, const RwiConfig& config, std::uint64_t seed);
Instance drift(const Instance& instance, const DriftConfig& config, std::uint64_t seed);

/// Per-instance stream seed; independent of processing order.
std::uint64_t instance_seed(std::uint64_t realization_seed, const Instance& instance);

struct AugmentedDataset {
  std::vector<Instance> instances;  // originals (incl. outliers) first, then synthesized
  SynthMethod method = SynthMethod::RWI;
  SynthConfig config;
  std::uint64_t seed = 0;
};

/// Adds one synthesized untrustworthy counterpart per trustworthy instance.
/// Throws ConfigError when the trustworthy pool is empty.
AugmentedDataset augment(const std::vector<Instance>& dataset, SynthMethod method,
                         const SynthConfig& config, std::uint64_t realization_seed);

/// `key = value` metadata sidecar describing a synthesis run.
void write_synth_metadata(std::ostream& out, const AugmentedDataset& data);

}  // namespace trustforge
