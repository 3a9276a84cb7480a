// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "trustforge/ingest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "trustforge/error.hpp"
#include "trustforge/text.hpp"

namespace trustforge {
namespace {

constexpr double kSecondsPerDay = 86400.0;

// "YYYY-MM-DD" + "HH:MM:SS[.frac]" -> civil seconds since 1970-01-01.
std::optional<double> parse_timestamp(std::string_view date, std::string_view time) {
  const auto dparts = text::split(date, '-');
  const auto tparts = text::split(time, ':');
  if (dparts.size() != 3 || tparts.size() != 3) return std::nullopt;
  const auto y = text::parse_int(dparts[0]);
  const auto mo = text::parse_int(dparts[1]);
  const auto d = text::parse_int(dparts[2]);
  const auto h = text::parse_int(tparts[0]);
  const auto mi = text::parse_int(tparts[1]);
  const auto s = text::parse_double(tparts[2]);
  if (!y || !mo || !d || !h || !mi || !s) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year(static_cast<int>(*y)),
                                        std::chrono::month(static_cast<unsigned>(*mo)),
                                        std::chrono::day(static_cast<unsigned>(*d))};
  if (!ymd.ok() || *h < 0 || *h > 23 || *mi < 0 || *mi > 59 || !(*s >= 0.0 && *s < 61.0))
    return std::nullopt;
  const auto days = std::chrono::sys_days(ymd).time_since_epoch().count();
  return static_cast<double>(days) * kSecondsPerDay + static_cast<double>(*h * 3600 + *mi * 60) + *s;
}

bool reading_less(const SensorReading& a, const SensorReading& b) {
  if (a.sensor_id != b.sensor_id) return a.sensor_id < b.sensor_id;
  return a.timestamp < b.timestamp;
}

}  // namespace

ParsedReadings parse_readings(std::istream& in, const ReadingsFormat& format) {
  if (!in.good()) throw InputError("readings stream is not readable");
  ParsedReadings out;
  std::string line;
  while (std::getline(in, line)) {
    const auto fields = text::split_whitespace(line);
    if (fields.empty()) continue;
    if (fields.size() < 5) {
      ++out.skipped_lines;
      continue;
    }
    const auto ts = parse_timestamp(fields[0], fields[1]);
    const auto epoch = text::parse_int(fields[2]);
    const auto mote = text::parse_int(fields[3]);
    const auto temp = text::parse_double(fields[4]);
    if (!ts || !epoch || !mote || !temp || !std::isfinite(*temp) || *mote < format.min_sensor_id ||
        *mote > format.max_sensor_id) {
      ++out.skipped_lines;
      continue;
    }
    out.readings.push_back({static_cast<SensorId>(*mote), *ts, *temp});
  }
  if (in.bad()) throw InputError("error while reading readings stream");
  if (out.readings.empty()) throw EmptyDatasetError("no parseable readings");
  std::stable_sort(out.readings.begin(), out.readings.end(), reading_less);
  return out;
}

ParsedLayout parse_layout(std::istream& in, const ReadingsFormat& format) {
  if (!in.good()) throw InputError("layout stream is not readable");
  ParsedLayout out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = text::split_whitespace(line);
    if (fields.empty()) continue;
    const auto id = fields.size() >= 3 ? text::parse_int(fields[0]) : std::nullopt;
    const auto x = fields.size() >= 3 ? text::parse_double(fields[1]) : std::nullopt;
    const auto y = fields.size() >= 3 ? text::parse_double(fields[2]) : std::nullopt;
    if (!id || !x || !y || !std::isfinite(*x) || !std::isfinite(*y))
      throw FormatError("layout line " + std::to_string(line_no) + ": expected 'moteid x y'");
    const auto sid = static_cast<SensorId>(*id);
    if (!out.positions.emplace(sid, Eigen::Vector2d(*x, *y)).second)
      throw FormatError("layout: duplicate sensor id " + std::to_string(sid));
  }
  if (in.bad()) throw InputError("error while reading layout stream");
  for (SensorId id = format.min_sensor_id; id <= format.max_sensor_id; ++id)
    if (!out.positions.contains(id)) out.missing.push_back(id);
  return out;
}

std::vector<SensorReading> clean(const std::vector<SensorReading>& readings, const CleanConfig& config) {
  std::vector<SensorReading> out;
  out.reserve(readings.size());
  for (const auto& r : readings) {
    if (!out.empty() && out.back().sensor_id == r.sensor_id && out.back().timestamp == r.timestamp)
      continue;
    // Range filtering happens after the duplicate check so a dropped first
    // copy does not let a second copy of the same timestamp through.
    out.push_back(r);
  }
  std::erase_if(out, [&](const SensorReading& r) {
    return !(r.value >= config.min_value && r.value <= config.max_value);
  });
  return out;
}

RegularSeries resample(const std::vector<SensorReading>& readings, const ResampleConfig& config) {
  if (!(config.step > 0.0)) throw ConfigError("resample: step must be positive");
  std::vector<SensorReading> pts;
  pts.reserve(readings.size());
  for (const auto& r : readings)
    if (pts.empty() || r.timestamp > pts.back().timestamp) pts.push_back(r);
  if (pts.size() < 2) throw InsufficientDataError("resample: need at least 2 readings");

  RegularSeries series;
  series.sensor_id = pts.front().sensor_id;
  series.step = config.step;
  const auto first = static_cast<long long>(std::ceil(pts.front().timestamp / config.step));
  const auto last = static_cast<long long>(std::floor(pts.back().timestamp / config.step));
  series.start_time = static_cast<double>(first) * config.step;
  const Eigen::Index n = last >= first ? static_cast<Eigen::Index>(last - first + 1) : 0;
  series.values = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
  series.gap.assign(static_cast<std::size_t>(n), true);

  std::size_t j = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(first + i) * config.step;
    while (j + 1 < pts.size() && pts[j + 1].timestamp <= t) ++j;
    const auto& a = pts[j];
    if (t == a.timestamp) {
      series.values(i) = a.value;
      series.gap[static_cast<std::size_t>(i)] = false;
      continue;
    }
    if (j + 1 >= pts.size()) continue;
    const auto& b = pts[j + 1];
    if (b.timestamp - a.timestamp > config.max_gap) continue;
    const double frac = (t - a.timestamp) / (b.timestamp - a.timestamp);
    series.values(i) = a.value + (b.value - a.value) * frac;
    series.gap[static_cast<std::size_t>(i)] = false;
  }
  return series;
}

std::vector<Instance> make_instances(const RegularSeries& series, double coverage_min, long origin_day) {
  if (!(series.step > 0.0) || std::fmod(kSecondsPerDay, series.step) != 0.0)
    throw ConfigError("make_instances: step must divide 86400");
  const auto per_day = static_cast<long long>(kSecondsPerDay / series.step);
  std::vector<Instance> out;
  if (series.size() == 0) return out;

  const auto first_slot = static_cast<long long>(std::llround(series.start_time / series.step));
  const long long last_slot = first_slot + series.size() - 1;
  const auto floor_div = [](long long a, long long b) { return a / b - ((a % b != 0) && ((a < 0) != (b < 0))); };

  for (long long day = floor_div(first_slot, per_day); day <= floor_div(last_slot, per_day); ++day) {
    Eigen::VectorXd values(per_day);
    std::vector<bool> gap(static_cast<std::size_t>(per_day), true);
    long long present = 0;
    for (long long k = 0; k < per_day; ++k) {
      const long long slot = day * per_day + k;
      values(k) = std::numeric_limits<double>::quiet_NaN();
      if (slot < first_slot || slot > last_slot) continue;
      const auto idx = static_cast<std::size_t>(slot - first_slot);
      if (series.gap[idx]) continue;
      values(k) = series.values(static_cast<Eigen::Index>(idx));
      gap[static_cast<std::size_t>(k)] = false;
      ++present;
    }
    const double coverage = static_cast<double>(present) / static_cast<double>(per_day);
    if (present == 0 || coverage < coverage_min) continue;

    // Fill gaps: constant before the first / after the last sample, linear between.
    long long prev = -1;
    for (long long k = 0; k <= per_day; ++k) {
      if (k < per_day && gap[static_cast<std::size_t>(k)]) continue;
      const long long lo = prev + 1;
      const long long hi = k - 1;
      for (long long g = lo; g <= hi; ++g) {
        if (prev < 0) {
          values(g) = values(k);
        } else if (k == per_day) {
          values(g) = values(prev);
        } else {
          const double frac = static_cast<double>(g - prev) / static_cast<double>(k - prev);
          values(g) = values(prev) + (values(k) - values(prev)) * frac;
        }
      }
      prev = k;
    }

    Instance inst;
    inst.sensor_id = series.sensor_id;
    inst.day_index = static_cast<int>(day - origin_day);
    inst.values = std::move(values);
    inst.label = TrustLabel::original();
    inst.coverage = coverage;
    out.push_back(std::move(inst));
  }
  return out;
}

StatsMap compute_stats(const std::vector<SensorReading>& readings) {
  StatsMap stats;
  for (const auto& [id, rs] : split_by_sensor(readings)) {
    SensorStats s;
    s.sensor_id = id;
    s.count = rs.size();
    double sum = 0.0;
    for (const auto& r : rs) sum += r.value;
    s.mean = sum / static_cast<double>(rs.size());
    double ss = 0.0;
    for (const auto& r : rs) ss += (r.value - s.mean) * (r.value - s.mean);
    s.std = rs.size() > 1 ? std::sqrt(ss / static_cast<double>(rs.size() - 1)) : 0.0;
    stats.emplace(id, s);
  }
  return stats;
}

OutlierResult flag_outliers(std::vector<Instance> instances, const StatsMap& stats,
                            const OutlierConfig& config) {
  OutlierResult result;
  std::set<SensorId> warned;
  for (auto& inst : instances) {
    if (inst.label.source() != TrustSource::Original) continue;
    const auto it = stats.find(inst.sensor_id);
    if (it == stats.end() || !(it->second.std > 0.0)) {
      if (warned.insert(inst.sensor_id).second)
        result.warnings.push_back("sensor " + std::to_string(inst.sensor_id) +
                                  (it == stats.end() ? ": no statistics" : ": zero standard deviation") +
                                  ", outlier rule not applied");
      continue;
    }
    const double limit = config.num_std * it->second.std;
    const bool outlier = ((inst.values.array() - it->second.mean).abs() >= limit).any();
    if (outlier) {
      inst.label = TrustLabel(TrustSource::Outlier);
      ++result.flagged;
    }
  }
  result.instances = std::move(instances);
  return result;
}

std::map<SensorId, std::vector<SensorReading>> split_by_sensor(const std::vector<SensorReading>& readings) {
  std::map<SensorId, std::vector<SensorReading>> out;
  for (const auto& r : readings) out[r.sensor_id].push_back(r);
  return out;
}

void write_instances(std::ostream& out, const std::vector<Instance>& instances) {
  const Eigen::Index n = instances.empty() ? 0 : instances.front().size();
  out << "sensor_id,day_index,label_class,label_source";
  for (Eigen::Index i = 0; i < n; ++i) out << ",v" << i;
  out << '\n';
  for (const auto& inst : instances) {
    if (inst.size() != n) throw ConfigError("write_instances: instances differ in length");
    out << inst.sensor_id << ',' << inst.day_index << ',' << to_string(inst.label.trust_class()) << ','
        << to_string(inst.label.source());
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << text::format_double(inst.values(i));
    out << '\n';
  }
  if (!out) throw InputError("failed to write instances");
}

std::vector<Instance> read_instances(std::istream& in) {
  if (!in.good()) throw InputError("instance stream is not readable");
  std::string line;
  if (!std::getline(in, line)) throw FormatError("instance file: missing header");
  const auto header = text::split(text::trim(line), ',');
  if (header.size() < 4 || header[0] != "sensor_id" || header[1] != "day_index" ||
      header[2] != "label_class" || header[3] != "label_source")
    throw FormatError("instance file: unexpected header");
  const auto n = static_cast<Eigen::Index>(header.size() - 4);
  std::vector<Instance> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto fields = text::split(text::trim(line), ',');
    if (static_cast<Eigen::Index>(fields.size()) != n + 4)
      throw FormatError("instance file line " + std::to_string(line_no) + ": wrong field count");
    const auto sid = text::parse_int(fields[0]);
    const auto day = text::parse_int(fields[1]);
    if (!sid || !day) throw FormatError("instance file line " + std::to_string(line_no) + ": bad key");
    const TrustLabel label(parse_trust_source(fields[3]));
    if (label.trust_class() != parse_trust_class(fields[2]))
      throw FormatError("instance file line " + std::to_string(line_no) + ": inconsistent label");
    Instance inst;
    inst.sensor_id = static_cast<SensorId>(*sid);
    inst.day_index = static_cast<int>(*day);
    inst.label = label;
    inst.values.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto v = text::parse_double(fields[static_cast<std::size_t>(i + 4)]);
      if (!v || !std::isfinite(*v))
        throw FormatError("instance file line " + std::to_string(line_no) + ": bad value");
      inst.values(i) = *v;
    }
    out.push_back(std::move(inst));
  }
  return out;
}

void write_stats(std::ostream& out, const StatsMap& stats) {
  out << "sensor_id,mean,std,count\n";
  for (const auto& [id, s] : stats)
    out << id << ',' << text::format_double(s.mean) << ',' << text::format_double(s.std) << ',' << s.count
        << '\n';
  if (!out) throw InputError("failed to write stats");
}

StatsMap read_stats(std::istream& in) {
  if (!in.good()) throw InputError("stats stream is not readable");
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != "sensor_id,mean,std,count")
    throw FormatError("stats file: unexpected header");
  StatsMap stats;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    const auto f = text::split(text::trim(line), ',');
    if (f.size() != 4) throw FormatError("stats file: wrong field count");
    const auto id = text::parse_int(f[0]);
    const auto mean = text::parse_double(f[1]);
    const auto sd = text::parse_double(f[2]);
    const auto count = text::parse_int(f[3]);
    if (!id || !mean || !sd || !count) throw FormatError("stats file: bad value");
    stats[static_cast<SensorId>(*id)] = {static_cast<SensorId>(*id), *mean, *sd,
                                         static_cast<std::size_t>(*count)};
  }
  return stats;
}

void write_layout(std::ostream& out, const Layout& layout) {
  for (const auto& [id, p] : layout)
    out << id << ' ' << text::format_double(p.x()) << ' ' << text::format_double(p.y()) << '\n';
}

}  // namespace trustforge
