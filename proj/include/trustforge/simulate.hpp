// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

// Synthetic indoor temperature deployment for demos and tests. Output uses
// the Intel Lab readings/layout text formats so it exercises the real
// ingest path: irregular ~31 s sampling, dropped packets, outages, battery
// artifacts above 100 degC and occasional spiky sensor-days.

#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "trustforge/ingest.hpp"
#include "trustforge/types.hpp"

namespace trustforge {

struct SimulationConfig {
  int sensors = 10;
  int days = 10;
  std::string start_date = "2004-02-28";
  double interval = 31.0;          // mean seconds between readings
  double interval_jitter = 1.5;    // uniform +- seconds
  double drop_rate = 0.03;         // independent packet loss
  double outages_per_day = 0.25;   // per sensor; 5 to 90 minute silences
  double spike_day_rate = 0.03;    // per sensor-day
  int artifact_sensors = 1;        // sensors whose last hours read > 100 degC
  double width = 40.0;             // floor size in metres
  double height = 30.0;
  std::uint64_t seed = 1;
};

struct SimulatedDeployment {
  Layout layout;
  std::vector<SensorReading> readings;  // time-ordered
};

SimulatedDeployment simulate(const SimulationConfig& config);

/// `date time epoch moteid temperature humidity light voltage` lines.
void write_readings(std::ostream& out, const std::vector<SensorReading>& readings, std::uint64_t seed = 1);

}  // namespace trustforge
