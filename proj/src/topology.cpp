// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "trustforge/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "trustforge/error.hpp"
#include "trustforge/numeric.hpp"
#include "trustforge/text.hpp"

namespace trustforge {

std::vector<SensorId> euclidean_candidates(const Layout& layout, SensorId sensor, std::size_t k_phys) {
  const auto self = layout.find(sensor);
  if (self == layout.end()) throw LookupError("unknown sensor " + std::to_string(sensor));
  if (k_phys >= layout.size())
    throw ConfigError("euclidean_candidates: k_phys must be smaller than the number of sensors");
  std::vector<std::pair<double, SensorId>> dist;
  dist.reserve(layout.size());
  for (const auto& [id, pos] : layout)
    if (id != sensor) dist.emplace_back((pos - self->second).squaredNorm(), id);
  std::sort(dist.begin(), dist.end());
  std::vector<SensorId> out;
  out.reserve(k_phys);
  for (std::size_t i = 0; i < k_phys; ++i) out.push_back(dist[i].second);
  return out;
}

std::optional<double> historical_correlation(const RegularSeries& a, const RegularSeries& b) {
  if (a.step != b.step) throw ConfigError("historical_correlation: series use different grid steps");
  const auto offset_b = static_cast<long long>(std::llround((a.start_time - b.start_time) / a.step));
  std::vector<double> xs;
  std::vector<double> ys;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const long long j = i + offset_b;
    if (j < 0 || j >= b.size()) continue;
    if (a.gap[static_cast<std::size_t>(i)] || b.gap[static_cast<std::size_t>(j)]) continue;
    xs.push_back(a.values(i));
    ys.push_back(b.values(static_cast<Eigen::Index>(j)));
  }
  const Eigen::Map<const Eigen::VectorXd> x(xs.data(), static_cast<Eigen::Index>(xs.size()));
  const Eigen::Map<const Eigen::VectorXd> y(ys.data(), static_cast<Eigen::Index>(ys.size()));
  return pearson(x, y);
}

NeighborMap select_neighbors(const Layout& layout, const std::map<SensorId, RegularSeries>& series,
                             const NeighborConfig& config) {
  Layout usable;
  for (const auto& [id, pos] : layout)
    if (series.contains(id)) usable.emplace(id, pos);
  if (usable.size() < config.k + 1)
    throw SelectionError("select_neighbors: need at least " + std::to_string(config.k + 1) +
                         " sensors with data, have " + std::to_string(usable.size()));
  const std::size_t k_phys = std::min(config.k_phys, usable.size() - 1);

  NeighborMap out;
  for (const auto& [id, pos] : usable) {
    const auto candidates = euclidean_candidates(usable, id, k_phys);
    std::vector<std::pair<double, SensorId>> ranked;
    std::size_t defined = 0;
    for (SensorId c : candidates) {
      const auto r = historical_correlation(series.at(id), series.at(c));
      if (r) ++defined;
      ranked.emplace_back(r ? *r : -std::numeric_limits<double>::infinity(), c);
    }
    if (defined < config.k)
      throw SelectionError("select_neighbors: sensor " + std::to_string(id) + " has only " +
                           std::to_string(defined) + " candidates with a defined correlation");
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& l, const auto& r) {
      if (l.first != r.first) return l.first > r.first;
      return l.second < r.second;
    });
    auto& peers = out[id];
    for (std::size_t i = 0; i < config.k; ++i) peers.push_back(ranked[i].second);
  }
  return out;
}

std::map<SensorId, RegularSeries> series_from_instances(const std::vector<Instance>& instances,
                                                        bool trustworthy_only) {
  std::map<SensorId, std::vector<const Instance*>> by_sensor;
  for (const auto& inst : instances) {
    if (trustworthy_only && !inst.label.trustworthy()) continue;
    if (inst.label.source() == TrustSource::RWI || inst.label.source() == TrustSource::Drift) continue;
    by_sensor[inst.sensor_id].push_back(&inst);
  }
  std::map<SensorId, RegularSeries> out;
  for (auto& [id, list] : by_sensor) {
    std::sort(list.begin(), list.end(),
              [](const Instance* a, const Instance* b) { return a->day_index < b->day_index; });
    const Eigen::Index per_day = list.front()->size();
    const int first_day = list.front()->day_index;
    const int last_day = list.back()->day_index;
    RegularSeries s;
    s.sensor_id = id;
    s.step = 86400.0 / static_cast<double>(per_day);
    s.start_time = static_cast<double>(first_day) * 86400.0;
    const Eigen::Index n = static_cast<Eigen::Index>(last_day - first_day + 1) * per_day;
    s.values = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
    s.gap.assign(static_cast<std::size_t>(n), true);
    for (const Instance* inst : list) {
      if (inst->size() != per_day) throw ConfigError("series_from_instances: instances differ in length");
      const Eigen::Index base = static_cast<Eigen::Index>(inst->day_index - first_day) * per_day;
      s.values.segment(base, per_day) = inst->values;
      std::fill(s.gap.begin() + base, s.gap.begin() + base + per_day, false);
    }
    out.emplace(id, std::move(s));
  }
  return out;
}

void write_neighbors(std::ostream& out, const NeighborMap& map) {
  for (const auto& [id, peers] : map) {
    out << id << ':';
    for (SensorId p : peers) out << ' ' << p;
    out << '\n';
  }
  if (!out) throw InputError("failed to write neighbor map");
}

NeighborMap read_neighbors(std::istream& in) {
  if (!in.good()) throw InputError("neighbor stream is not readable");
  NeighborMap map;
  std::string line;
  while (std::getline(in, line)) {
    const auto trimmed = text::trim(line);
    if (trimmed.empty()) continue;
    const auto colon = trimmed.find(':');
    if (colon == std::string_view::npos) throw FormatError("neighbor map: missing ':'");
    const auto id = text::parse_int(trimmed.substr(0, colon));
    if (!id) throw FormatError("neighbor map: bad sensor id");
    std::vector<SensorId> peers;
    for (auto tok : text::split_whitespace(trimmed.substr(colon + 1))) {
      const auto p = text::parse_int(tok);
      if (!p) throw FormatError("neighbor map: bad neighbor id");
      peers.push_back(static_cast<SensorId>(*p));
    }
    if (!map.emplace(static_cast<SensorId>(*id), std::move(peers)).second)
      throw FormatError("neighbor map: duplicate sensor id");
  }
  return map;
}

}  // namespace trustforge
