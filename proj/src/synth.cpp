// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "trustforge/synth.hpp"

#include <cmath>
#include <string>

#include "trustforge/error.hpp"
#include "trustforge/numeric.hpp"
#include "trustforge/text.hpp"

namespace trustforge {

std::string_view to_string(SynthMethod m) { return m == SynthMethod::RWI ? "rwi" : "drift"; }

SynthMethod parse_synth_method(std::string_view text) {
  if (text == "rwi" || text == "RWI") return SynthMethod::RWI;
  if (text == "drift" || text == "Drift") return SynthMethod::Drift;
  throw ConfigError("unknown synthesis method '" + std::string(text) + "'");
}

TrustSource source_of(SynthMethod m) { return m == SynthMethod::RWI ? TrustSource::RWI : TrustSource::Drift; }

std::vector<Eigen::Index> segment_indexes(Eigen::Index n, int num_mid_points) {
  if (num_mid_points < 0) throw ConfigError("segment_indexes: negative mid-point count");
  if (static_cast<Eigen::Index>(num_mid_points) + 2 > n)
    throw ConfigError("segment_indexes: " + std::to_string(num_mid_points) + " mid points do not fit " +
                      std::to_string(n) + " samples");
  const int segments = num_mid_points + 1;
  std::vector<Eigen::Index> p;
  p.reserve(static_cast<std::size_t>(segments) + 1);
  for (int j = 0; j <= segments; ++j)
    p.push_back(static_cast<Eigen::Index>(
        std::llround(static_cast<double>(j) * static_cast<double>(n - 1) / static_cast<double>(segments))));
  for (std::size_t j = 1; j < p.size(); ++j)
    if (p[j] <= p[j - 1]) throw ConfigError("segment_indexes: boundaries are not strictly increasing");
  return p;
}

double rwi_step_std(const Eigen::VectorXd& values, const RwiConfig& config) {
  if (config.step_variance) {
    if (!(*config.step_variance >= 0.0)) throw ConfigError("rwi: step variance must be non-negative");
    return std::sqrt(*config.step_variance);
  }
  if (values.size() < 2) return 0.0;
  const Eigen::VectorXd diff = values.tail(values.size() - 1) - values.head(values.size() - 1);
  return config.adaptive_factor * std::sqrt(diff.squaredNorm() / static_cast<double>(diff.size()));
}

Eigen::VectorXd rwi_values(const Eigen::VectorXd& values, const RwiConfig& config, Rng& rng) {
  const auto p = segment_indexes(values.size(), config.num_mid_points);
  const double sigma = rwi_step_std(values, config);
  std::normal_distribution<double> step(0.0, 1.0);

  Eigen::VectorXd s = values;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const Eigen::Index start = p[i];
    const Eigen::Index len = p[i + 1] - start + 1;
    auto seg = s.segment(start, len);
    const double slope_before = anchored_slope(seg);
    for (Eigen::Index j = 1; j < len; ++j) seg(j) = seg(j - 1) + sigma * step(rng);
    const double correction = slope_before - anchored_slope(seg);
    for (Eigen::Index j = 1; j < len; ++j) seg(j) += correction * static_cast<double>(j);
  }
  return s;
}

Eigen::VectorXd drift_values(const Eigen::VectorXd& values, const DriftConfig& config, Rng& rng) {
  if (!(config.drift_cap > 0.0)) throw ConfigError("drift: cap must be positive");
  if (!(config.noise_std >= 0.0)) throw ConfigError("drift: noise std must be non-negative");
  std::normal_distribution<double> noise(0.0, 1.0);
  Eigen::VectorXd out(values.size());
  double cumulative = 0.0;
  bool capped = false;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!capped) {
      cumulative += config.drift_constant + config.noise_std * noise(rng);
      if (cumulative >= config.drift_cap) {
        cumulative = config.drift_cap;
        capped = true;
      }
    }
    out(i) = values(i) + cumulative;
  }
  return out;
}

std::uint64_t instance_seed(std::uint64_t realization_seed, const Instance& instance) {
  return derive_seed({realization_seed, static_cast<std::uint64_t>(instance.sensor_id),
                      static_cast<std::uint64_t>(static_cast<std::int64_t>(instance.day_index))});
}

Instance rwi(const Instance& instance, const RwiConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  Instance out = instance;
  out.values = rwi_values(instance.values, config, rng);
  out.label = TrustLabel(TrustSource::RWI);
  return out;
}

Instance drift(const Instance& instance, const DriftConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  Instance out = instance;
  out.values = drift_values(instance.values, config, rng);
  out.label = TrustLabel(TrustSource::Drift);
  return out;
}

AugmentedDataset augment(const std::vector<Instance>& dataset, SynthMethod method, const SynthConfig& config,
                         std::uint64_t realization_seed) {
  if ((method == SynthMethod::RWI) != std::holds_alternative<RwiConfig>(config))
    throw ConfigError("augment: configuration does not match the synthesis method");
  AugmentedDataset out;
  out.method = method;
  out.config = config;
  out.seed = realization_seed;
  std::vector<Instance> synthesized;
  for (const auto& inst : dataset) {
    if (inst.label.source() == TrustSource::RWI || inst.label.source() == TrustSource::Drift)
      throw ConfigError("augment: input already contains synthesized instances");
    out.instances.push_back(inst);
    if (!inst.label.trustworthy()) continue;
    const auto seed = instance_seed(realization_seed, inst);
    synthesized.push_back(method == SynthMethod::RWI ? rwi(inst, std::get<RwiConfig>(config), seed)
                                                     : drift(inst, std::get<DriftConfig>(config), seed));
  }
  if (synthesized.empty()) throw ConfigError("augment: no trustworthy instances to synthesize from");
  out.instances.insert(out.instances.end(), std::make_move_iterator(synthesized.begin()),
                       std::make_move_iterator(synthesized.end()));
  return out;
}

void write_synth_metadata(std::ostream& out, const AugmentedDataset& data) {
  out << "method = " << to_string(data.method) << '\n';
  out << "seed = " << data.seed << '\n';
  if (const auto* rc = std::get_if<RwiConfig>(&data.config)) {
    out << "num_mid_points = " << rc->num_mid_points << '\n';
    if (rc->step_variance)
      out << "step_rule = fixed\nstep_variance = " << text::format_double(*rc->step_variance) << '\n';
    else
      out << "step_rule = adaptive\nadaptive_factor = " << text::format_double(rc->adaptive_factor) << '\n';
  } else {
    const auto& dc = std::get<DriftConfig>(data.config);
    out << "drift_constant = " << text::format_double(dc.drift_constant) << '\n';
    out << "noise_std = " << text::format_double(dc.noise_std) << '\n';
    out << "drift_cap = " << text::format_double(dc.drift_cap) << '\n';
  }
  std::size_t synthesized = 0;
  for (const auto& inst : data.instances) synthesized += inst.label.source() == source_of(data.method) ? 1 : 0;
  out << "instances = " << data.instances.size() << '\n';
  out << "synthesized = " << synthesized << '\n';
}

}  // namespace trustforge
