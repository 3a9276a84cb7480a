// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "trustforge/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "trustforge/error.hpp"
#include "trustforge/rng.hpp"
#include "trustforge/text.hpp"

namespace trustforge {
namespace {

constexpr double kDay = 86400.0;
constexpr double kLatentStep = 30.0;
constexpr int kZones = 4;

double parse_start(const std::string& date) {
  const auto parts = text::split(date, '-');
  if (parts.size() != 3) throw ConfigError("simulate: start date must be YYYY-MM-DD");
  const auto y = text::parse_int(parts[0]);
  const auto m = text::parse_int(parts[1]);
  const auto d = text::parse_int(parts[2]);
  if (!y || !m || !d) throw ConfigError("simulate: start date must be YYYY-MM-DD");
  const std::chrono::year_month_day ymd{std::chrono::year(static_cast<int>(*y)),
                                        std::chrono::month(static_cast<unsigned>(*m)),
                                        std::chrono::day(static_cast<unsigned>(*d))};
  if (!ymd.ok()) throw ConfigError("simulate: invalid start date " + date);
  return static_cast<double>(std::chrono::sys_days(ymd).time_since_epoch().count()) * kDay;
}

// AR(1) path sampled every kLatentStep seconds with stationary std `sd`.
std::vector<double> ar1(std::size_t n, double corr_time, double sd, Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  const double phi = std::exp(-kLatentStep / corr_time);
  const double innov = sd * std::sqrt(1.0 - phi * phi);
  std::vector<double> out(n);
  double v = sd * z(rng);
  for (auto& o : out) {
    v = phi * v + innov * z(rng);
    o = v;
  }
  return out;
}

double lerp_at(const std::vector<double>& path, double offset) {
  const double pos = std::clamp(offset / kLatentStep, 0.0, static_cast<double>(path.size() - 1));
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= path.size()) return path.back();
  const double f = pos - static_cast<double>(i);
  return path[i] * (1.0 - f) + path[i + 1] * f;
}

}  // namespace

SimulatedDeployment simulate(const SimulationConfig& c) {
  if (c.sensors < 2 || c.days < 1) throw ConfigError("simulate: need at least 2 sensors and 1 day");
  if (!(c.interval > 2.0 * c.interval_jitter) || c.interval_jitter < 0.0)
    throw ConfigError("simulate: interval must exceed twice the jitter");
  const double t0 = parse_start(c.start_date);
  const double span = static_cast<double>(c.days) * kDay;
  const auto steps = static_cast<std::size_t>(span / kLatentStep) + 2;

  Rng rng(derive_seed({c.seed, 0x6c61796f}));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SimulatedDeployment out;
  for (int s = 1; s <= c.sensors; ++s)
    out.layout[s] = Eigen::Vector2d(c.width * unit(rng), c.height * unit(rng));

  // Shared building state: per-day heating amplitude and a slow weather term.
  std::vector<double> amplitude(static_cast<std::size_t>(c.days) + 1);
  for (auto& a : amplitude) a = 1.5 + 2.0 * unit(rng);
  const auto weather = ar1(steps, 6.0 * 3600.0, 0.8, rng);

  // Spatially smooth zone processes.
  std::vector<Eigen::Vector2d> zone_center(kZones);
  std::vector<std::vector<double>> zone(kZones);
  for (int k = 0; k < kZones; ++k) {
    zone_center[static_cast<std::size_t>(k)] = Eigen::Vector2d(c.width * unit(rng), c.height * unit(rng));
    zone[static_cast<std::size_t>(k)] = ar1(steps, 40.0 * 60.0, 0.6, rng);
  }

  for (const auto& [id, pos] : out.layout) {
    Rng srng(derive_seed({c.seed, static_cast<std::uint64_t>(id)}));
    const double offset = 0.03 * pos.x() + 0.5 * gauss(srng);
    const double gain = 0.8 + 0.4 * unit(srng);
    const double phase = 1800.0 * gauss(srng);
    std::vector<double> w(kZones);
    double wsum = 0.0;
    for (int k = 0; k < kZones; ++k) {
      const double d = (pos - zone_center[static_cast<std::size_t>(k)]).norm();
      w[static_cast<std::size_t>(k)] = std::exp(-d * d / (2.0 * 12.0 * 12.0));
      wsum += w[static_cast<std::size_t>(k)];
    }
    for (auto& v : w) v /= std::max(wsum, 1e-9);
    const auto own = ar1(steps, 15.0 * 60.0, 0.25, srng);

    // Outages: [begin, end) offsets in seconds.
    std::vector<std::pair<double, double>> outages;
    std::poisson_distribution<int> n_out(c.outages_per_day * c.days);
    for (int k = n_out(srng); k > 0; --k) {
      const double b = span * unit(srng);
      outages.emplace_back(b, b + 60.0 * (5.0 + 85.0 * unit(srng)));
    }
    std::vector<std::pair<double, double>> spikes;
    for (int d = 0; d < c.days; ++d)
      if (unit(srng) < c.spike_day_rate) {
        const double b = static_cast<double>(d) * kDay + (kDay - 7200.0) * unit(srng);
        spikes.emplace_back(b, b + 1800.0);
      }
    const bool artifact = id > c.sensors - c.artifact_sensors;
    const double artifact_from = span - 6.0 * 3600.0;

    for (double t = c.interval * unit(srng); t < span;
         t += c.interval + c.interval_jitter * (2.0 * unit(srng) - 1.0)) {
      if (unit(srng) < c.drop_rate) continue;
      if (std::any_of(outages.begin(), outages.end(), [&](const auto& o) { return t >= o.first && t < o.second; }))
        continue;
      const double hour = std::fmod(t + phase, kDay) / 3600.0;
      const auto day = static_cast<std::size_t>(t / kDay);
      const double heating = amplitude[day] * (0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (hour - 4.0) / 24.0));
      double v = 18.0 + offset + gain * heating + lerp_at(weather, t) + lerp_at(own, t);
      for (int k = 0; k < kZones; ++k) v += w[static_cast<std::size_t>(k)] * lerp_at(zone[static_cast<std::size_t>(k)], t);
      for (const auto& sp : spikes)
        if (t >= sp.first && t < sp.second) v += 9.0 * std::sin(std::numbers::pi * (t - sp.first) / 1800.0);
      v += 0.02 * gauss(srng);
      if (artifact && t >= artifact_from) v = 100.0 + 22.0 * unit(srng);
      out.readings.push_back({id, t0 + t, v});
    }
  }
  std::stable_sort(out.readings.begin(), out.readings.end(),
                   [](const SensorReading& a, const SensorReading& b) { return a.timestamp < b.timestamp; });
  return out;
}

void write_readings(std::ostream& out, const std::vector<SensorReading>& readings, std::uint64_t seed) {
  if (readings.empty()) return;
  Rng rng(derive_seed({seed, 0x68756d}));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double first = readings.front().timestamp;
  char buf[160];
  for (const auto& r : readings) {
    const double day_start = std::floor(r.timestamp / kDay) * kDay;
    const std::chrono::year_month_day ymd{
        std::chrono::sys_days(std::chrono::days(static_cast<long>(day_start / kDay)))};
    double sec = r.timestamp - day_start;
    const int h = static_cast<int>(sec / 3600.0);
    sec -= h * 3600.0;
    const int m = static_cast<int>(sec / 60.0);
    sec -= m * 60.0;
    const long epoch = std::lround((r.timestamp - first) / 31.0);
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02d:%02d:%09.6f %ld %d %.4f %.4f %.2f %.5f\n",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), h, m, std::min(sec, 59.999999), epoch, r.sensor_id, r.value,
                  35.0 + 10.0 * unit(rng), 100.0 + 400.0 * unit(rng), 2.6 + 0.1 * unit(rng));
    out << buf;
  }
}

}  // namespace trustforge
