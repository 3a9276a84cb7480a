// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end stage helpers shared by the command-line tool and the tests.

#pragma once

#include <string>
#include <vector>

#include "trustforge/ingest.hpp"
#include "trustforge/topology.hpp"
#include "trustforge/types.hpp"

namespace trustforge {

struct IngestConfig {
  ReadingsFormat format;
  CleanConfig clean;
  ResampleConfig resample;
  double coverage_min = 0.9;
  OutlierConfig outliers;
};

struct IngestSummary {
  std::size_t readings = 0;
  std::size_t skipped_lines = 0;
  std::size_t removed_by_clean = 0;
  std::size_t sensors = 0;
  std::size_t days = 0;
  std::size_t instances = 0;
  std::size_t outliers = 0;
  std::vector<std::string> warnings;
};

struct IngestResult {
  std::vector<Instance> instances;  // sorted by (sensor, day)
  StatsMap stats;
  IngestSummary summary;
};

/// clean -> per-sensor resample -> daily instances -> statistics -> outlier
/// flags. Day indexes count from the earliest calendar day in the corpus.
IngestResult ingest(const ParsedReadings& parsed, const IngestConfig& config = {});

/// Neighbor map from the trustworthy original instances only.
NeighborMap build_neighbor_map(const Layout& layout, const std::vector<Instance>& instances,
                               const NeighborConfig& config = {});

}  // namespace trustforge
