// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "trustforge/pipeline.hpp"

#include <algorithm>
#include <set>

#include "trustforge/error.hpp"

namespace trustforge {

IngestResult ingest(const ParsedReadings& parsed, const IngestConfig& config) {
  IngestResult out;
  out.summary.readings = parsed.readings.size();
  out.summary.skipped_lines = parsed.skipped_lines;
  const auto cleaned = clean(parsed.readings, config.clean);
  out.summary.removed_by_clean = parsed.readings.size() - cleaned.size();
  if (cleaned.empty()) throw EmptyDatasetError("no readings left after cleaning");

  long origin = day_number(cleaned.front().timestamp);
  for (const auto& r : cleaned) origin = std::min(origin, day_number(r.timestamp));

  std::vector<Instance> instances;
  for (const auto& [id, readings] : split_by_sensor(cleaned)) {
    if (readings.size() < 2) {
      out.summary.warnings.push_back("sensor " + std::to_string(id) + ": fewer than 2 readings, skipped");
      continue;
    }
    auto made = make_instances(resample(readings, config.resample), config.coverage_min, origin);
    instances.insert(instances.end(), std::make_move_iterator(made.begin()), std::make_move_iterator(made.end()));
  }
  if (instances.empty()) throw InsufficientDataError("no sensor-day meets the coverage threshold");

  out.stats = compute_stats(cleaned);
  auto flagged = flag_outliers(std::move(instances), out.stats, config.outliers);
  out.instances = std::move(flagged.instances);
  std::stable_sort(out.instances.begin(), out.instances.end(), [](const Instance& a, const Instance& b) {
    return a.sensor_id != b.sensor_id ? a.sensor_id < b.sensor_id : a.day_index < b.day_index;
  });
  out.summary.warnings.insert(out.summary.warnings.end(), flagged.warnings.begin(), flagged.warnings.end());
  out.summary.outliers = flagged.flagged;
  out.summary.instances = out.instances.size();
  std::set<SensorId> sensors;
  std::set<int> days;
  for (const auto& inst : out.instances) {
    sensors.insert(inst.sensor_id);
    days.insert(inst.day_index);
  }
  out.summary.sensors = sensors.size();
  out.summary.days = days.size();
  return out;
}

NeighborMap build_neighbor_map(const Layout& layout, const std::vector<Instance>& instances,
                               const NeighborConfig& config) {
  return select_neighbors(layout, series_from_instances(instances, true), config);
}

}  // namespace trustforge
