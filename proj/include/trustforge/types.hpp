// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace trustforge {

using SensorId = int;

enum class TrustClass : std::uint8_t { Trustworthy = 0, Untrustworthy = 1 };

enum class TrustSource : std::uint8_t { Original, Outlier, RWI, Drift };

/// Ground-truth trust label. The class is derived from the source, so the
/// two can never disagree: Original is the only trustworthy source.
class TrustLabel {
 public:
  constexpr TrustLabel() = default;
  constexpr explicit TrustLabel(TrustSource source) : source_(source) {}

  static constexpr TrustLabel original() { return TrustLabel(TrustSource::Original); }

  constexpr TrustSource source() const { return source_; }
  constexpr TrustClass trust_class() const {
    return source_ == TrustSource::Original ? TrustClass::Trustworthy
                                            : TrustClass::Untrustworthy;
  }
  constexpr bool trustworthy() const { return trust_class() == TrustClass::Trustworthy; }
  /// 0 = trustworthy, 1 = untrustworthy.
  constexpr int binary() const { return trustworthy() ? 0 : 1; }

  friend constexpr bool operator==(TrustLabel, TrustLabel) = default;

 private:
  TrustSource source_ = TrustSource::Original;
};

std::string_view to_string(TrustClass c);
std::string_view to_string(TrustSource s);
TrustClass parse_trust_class(std::string_view text);
TrustSource parse_trust_source(std::string_view text);

struct SensorReading {
  SensorId sensor_id = 0;
  double timestamp = 0.0;  // seconds since the Unix epoch, civil time
  double value = 0.0;      // degrees Celsius

  friend bool operator==(const SensorReading&, const SensorReading&) = default;
};

/// Equally spaced samples for one sensor. Slots flagged in `gap` carry NaN.
struct RegularSeries {
  SensorId sensor_id = 0;
  double start_time = 0.0;
  double step = 60.0;
  Eigen::VectorXd values;
  std::vector<bool> gap;

  Eigen::Index size() const { return values.size(); }
  double time_at(Eigen::Index i) const { return start_time + step * static_cast<double>(i); }
  Eigen::Index non_gap_count() const;
};

/// One sensor-day on the regular grid.
struct Instance {
  SensorId sensor_id = 0;
  int day_index = 0;
  Eigen::VectorXd values;
  TrustLabel label;
  double coverage = 1.0;  // non-gap fraction before filling

  Eigen::Index size() const { return values.size(); }
};

struct SensorStats {
  SensorId sensor_id = 0;
  double mean = 0.0;
  double std = 0.0;
  std::size_t count = 0;
};

using StatsMap = std::map<SensorId, SensorStats>;

}  // namespace trustforge
