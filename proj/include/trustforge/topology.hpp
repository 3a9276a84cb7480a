// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <vector>

#include "trustforge/ingest.hpp"
#include "trustforge/types.hpp"

namespace trustforge {

/// Sensor -> peers ordered by descending historical correlation.
using NeighborMap = std::map<SensorId, std::vector<SensorId>>;

/// The k_phys nearest sensors to `sensor` (excluding itself), ascending
/// distance, ties by ascending id.
std::vector<SensorId> euclidean_candidates(const Layout& layout, SensorId sensor, std::size_t k_phys);

/// Pearson correlation over grid points where both series have data.
/// std::nullopt when fewer than two points overlap or either side is
/// constant on the overlap.
std::optional<double> historical_correlation(const RegularSeries& a, const RegularSeries& b);

struct NeighborConfig {
  std::size_t k_phys = 15;
  std::size_t k = 7;
};

/// Physical shortlist, then the k best-correlated peers. Only sensors present
/// in both `layout` and `series` take part.
NeighborMap select_neighbors(const Layout& layout, const std::map<SensorId, RegularSeries>& series,
                             const NeighborConfig& config = {});

/// Rebuilds a per-sensor grid series from trustworthy instances (other days are gaps).
std::map<SensorId, RegularSeries> series_from_instances(const std::vector<Instance>& instances,
                                                        bool trustworthy_only = true);

// `sensor_id: n1 n2 ...` per line.
void write_neighbors(std::ostream& out, const NeighborMap& map);
NeighborMap read_neighbors(std::istream& in);

}  // namespace trustforge
