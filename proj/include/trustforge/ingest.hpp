// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

// Raw log and layout parsing, cleaning, resampling onto a regular grid,
// day-instance cutting and outlier labeling.

#pragma once

#include <Eigen/Core>

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "trustforge/types.hpp"

namespace trustforge {

struct ParsedReadings {
  std::vector<SensorReading> readings;  // sorted by (sensor_id, timestamp)
  std::size_t skipped_lines = 0;
};

struct ReadingsFormat {
  SensorId min_sensor_id = 1;
  SensorId max_sensor_id = 54;
};

/// Parses `date time epoch moteid temperature [humidity light voltage]` lines.
/// Lines that cannot be parsed are counted and skipped.
/// Throws InputError on a failed stream and EmptyDatasetError when nothing parses.
ParsedReadings parse_readings(std::istream& in, const ReadingsFormat& format = {});

using Layout = std::map<SensorId, Eigen::Vector2d>;

struct ParsedLayout {
  Layout positions;
  std::vector<SensorId> missing;  // ids in the expected range that never appeared
};

/// Parses `moteid x y` lines. Throws FormatError on duplicates or malformed lines.
ParsedLayout parse_layout(std::istream& in, const ReadingsFormat& format = {});

struct CleanConfig {
  double min_value = -10.0;
  double max_value = 60.0;
};

/// Drops repeated (sensor, timestamp) pairs, keeping the first, and values
/// outside the physical range. Input must be sorted.
std::vector<SensorReading> clean(const std::vector<SensorReading>& readings,
                                 const CleanConfig& config = {});

struct ResampleConfig {
  double step = 60.0;
  double max_gap = 900.0;
};

/// Linear interpolation onto the grid k * step (absolute time). A grid point
/// is a gap unless it falls on a reading or between two consecutive readings
/// at most `max_gap` apart.
RegularSeries resample(const std::vector<SensorReading>& readings, const ResampleConfig& config = {});

/// Absolute calendar day of a timestamp.
inline long day_number(double timestamp) {
  return static_cast<long>(std::floor(timestamp / 86400.0));
}

/// Cuts one instance per calendar day with coverage >= coverage_min.
/// day_index is counted from `origin_day` (an absolute day number); gaps
/// inside retained days are filled by linear interpolation.
std::vector<Instance> make_instances(const RegularSeries& series, double coverage_min,
                                     long origin_day);

/// Per-sensor mean and sample standard deviation over cleaned readings.
StatsMap compute_stats(const std::vector<SensorReading>& readings);

struct OutlierConfig {
  double num_std = 3.0;
};

struct OutlierResult {
  std::vector<Instance> instances;
  std::vector<std::string> warnings;
  std::size_t flagged = 0;
};

/// Relabels Original instances holding any value at least num_std standard
/// deviations from the sensor mean as Outlier.
OutlierResult flag_outliers(std::vector<Instance> instances, const StatsMap& stats,
                            const OutlierConfig& config = {});

/// Groups sorted readings by sensor.
std::map<SensorId, std::vector<SensorReading>> split_by_sensor(
    const std::vector<SensorReading>& readings);

// Instance file: header `sensor_id,day_index,label_class,label_source,v0..v{N-1}`.
void write_instances(std::ostream& out, const std::vector<Instance>& instances);
std::vector<Instance> read_instances(std::istream& in);

// Stats file: header `sensor_id,mean,std,count`.
void write_stats(std::ostream& out, const StatsMap& stats);
StatsMap read_stats(std::istream& in);

void write_layout(std::ostream& out, const Layout& layout);

}  // namespace trustforge
