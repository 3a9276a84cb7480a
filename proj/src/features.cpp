// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "trustforge/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "trustforge/error.hpp"
#include "trustforge/numeric.hpp"
#include "trustforge/text.hpp"

namespace trustforge {

std::vector<Window> window(const Instance& instance, Eigen::Index length) {
  if (length <= 0 || instance.size() % length != 0)
    throw ConfigError("window: instance length " + std::to_string(instance.size()) +
                      " is not a multiple of the window length " + std::to_string(length));
  std::vector<Window> out;
  const Eigen::Index count = instance.size() / length;
  out.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index w = 0; w < count; ++w)
    out.push_back({instance.sensor_id, instance.day_index, static_cast<int>(w),
                   instance.values.segment(w * length, length), instance.label});
  return out;
}

Eigen::VectorXd band_features(const Eigen::VectorXd& coeffs, Eigen::Index num_bands) {
  return band_means(coeffs, num_bands);
}

std::string_view to_string(FeatureKind k) { return k == FeatureKind::Correlation ? "corr" : "dst"; }

FeatureKind parse_feature_kind(std::string_view text) {
  if (text == "corr") return FeatureKind::Correlation;
  if (text == "dst") return FeatureKind::DST;
  throw ConfigError("unknown feature kind '" + std::string(text) + "'");
}

Eigen::Index feature_dimension(FeatureKind k, std::size_t num_neighbors) {
  const auto n = static_cast<Eigen::Index>(num_neighbors);
  return k == FeatureKind::Correlation ? 10 + n : 2 * n;
}

namespace {

void check_neighbors(const Window& w, const std::vector<const Window*>& neighbors) {
  for (std::size_t n = 0; n < neighbors.size(); ++n) {
    const Window* nb = neighbors[n];
    const std::string where = "sensor " + std::to_string(w.sensor_id) + " day " + std::to_string(w.day_index) +
                              " window " + std::to_string(w.window_index);
    if (nb == nullptr) throw FeatureError("missing neighbor window " + std::to_string(n) + " for " + where);
    if (nb->day_index != w.day_index || nb->window_index != w.window_index || nb->values.size() != w.values.size())
      throw FeatureError("neighbor window " + std::to_string(n) + " is not aligned with " + where);
  }
}

}  // namespace

CorrelationExtractor::CorrelationExtractor(Eigen::Index window_length, const DctSpec& spec) : spec_(spec) {
  if (spec.num_bands <= 0 || spec.num_coeffs % spec.num_bands != 0)
    throw ConfigError("DctSpec: band count must divide the coefficient count");
  if (spec.num_coeffs > window_length) throw ConfigError("DctSpec: more coefficients than window samples");
  basis_t_ = dct_basis<double>(window_length, spec.num_coeffs).transpose();
}

CorrFeatures CorrelationExtractor::operator()(const Window& w, const std::vector<const Window*>& neighbors) const {
  if (w.values.size() != basis_t_.cols()) throw ConfigError("CorrelationExtractor: window length mismatch");
  check_neighbors(w, neighbors);
  CorrFeatures out;
  out.vector.resize(spec_.num_bands + static_cast<Eigen::Index>(neighbors.size()));
  const Eigen::VectorXd coeffs = basis_t_ * w.values;
  out.vector.head(spec_.num_bands) = band_means(coeffs, spec_.num_bands);
  for (std::size_t n = 0; n < neighbors.size(); ++n) {
    const auto r = pearson(w.values, neighbors[n]->values);
    out.vector(spec_.num_bands + static_cast<Eigen::Index>(n)) = r.value_or(0.0);
    if (!r) out.undefined_mask |= 1u << n;
  }
  return out;
}

CorrFeatures corr_features(const Window& w, const std::vector<const Window*>& neighbors, const DctSpec& spec) {
  return CorrelationExtractor(w.values.size(), spec)(w, neighbors);
}

Eigen::VectorXd pmf_edges(const SensorStats& stats, int num_bins, double span_std) {
  if (num_bins < 2) throw ConfigError("pmf: need at least 2 bins");
  const double half = stats.std > 0.0 ? span_std * stats.std : 0.5;
  return Eigen::VectorXd::LinSpaced(num_bins + 1, stats.mean - half, stats.mean + half);
}

Pmf pmf(const Eigen::VectorXd& values, const Eigen::VectorXd& edges) {
  const Eigen::Index bins = edges.size() - 1;
  if (bins < 2) throw ConfigError("pmf: need at least 2 bins");
  Pmf out{edges, Eigen::VectorXd::Zero(bins)};
  if (values.size() == 0) return out;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double v = values(i);
    // Bins are [e_b, e_{b+1}); the last bin also takes its upper edge.
    const auto it = std::upper_bound(edges.data(), edges.data() + edges.size(), v);
    Eigen::Index b = static_cast<Eigen::Index>(it - edges.data()) - 1;
    b = std::clamp<Eigen::Index>(b, 0, bins - 1);
    out.masses(b) += 1.0;
  }
  out.masses /= static_cast<double>(values.size());
  return out;
}

MassAssignment MassAssignment::singletons(const Pmf& p) {
  MassAssignment m;
  m.masses = p.masses;
  for (Eigen::Index b = 0; b < p.masses.size(); ++b) m.sets.push_back({static_cast<int>(b)});
  return m;
}

BeliefPlausibility belief_plausibility(const MassAssignment& mass, const std::vector<FocalSet>& queries) {
  if (static_cast<Eigen::Index>(mass.sets.size()) != mass.masses.size())
    throw ConfigError("belief_plausibility: mass/set count mismatch");
  BeliefPlausibility out{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(queries.size())),
                         Eigen::VectorXd::Zero(static_cast<Eigen::Index>(queries.size()))};
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const auto& a = queries[q];
    if (a.empty()) throw ConfigError("belief_plausibility: empty focal set");
    for (std::size_t f = 0; f < mass.sets.size(); ++f) {
      const auto& fs = mass.sets[f];
      const auto in_a = [&](int b) { return std::find(a.begin(), a.end(), b) != a.end(); };
      const bool subset = std::all_of(fs.begin(), fs.end(), in_a);
      const bool meets = std::any_of(fs.begin(), fs.end(), in_a);
      const double m = mass.masses(static_cast<Eigen::Index>(f));
      if (subset) out.belief(static_cast<Eigen::Index>(q)) += m;
      if (meets) out.plausibility(static_cast<Eigen::Index>(q)) += m;
    }
  }
  return out;
}

BeliefPlausibility belief_plausibility(const Pmf& p, const std::vector<FocalSet>& queries) {
  return belief_plausibility(MassAssignment::singletons(p), queries);
}

std::vector<FocalSet> default_focal_sets(int num_bins) {
  std::vector<FocalSet> sets;
  for (int b = 0; b < num_bins; ++b) sets.push_back({b});
  for (int b = 0; b + 1 < num_bins; ++b) sets.push_back({b, b + 1});
  return sets;
}

DstExtractor::DstExtractor(int num_bins, double span_std)
    : num_bins_(num_bins), span_std_(span_std), focal_(default_focal_sets(num_bins)) {
  if (num_bins < 2) throw ConfigError("DstExtractor: need at least 2 bins");
}

Eigen::VectorXd DstExtractor::operator()(const Window& w, const std::vector<const Window*>& neighbors,
                                         const SensorStats& stats) const {
  check_neighbors(w, neighbors);
  const Eigen::VectorXd edges = pmf_edges(stats, num_bins_, span_std_);
  const auto self = belief_plausibility(pmf(w.values, edges), focal_);
  const auto n = static_cast<Eigen::Index>(neighbors.size());
  Eigen::VectorXd out(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto other = belief_plausibility(pmf(neighbors[static_cast<std::size_t>(i)]->values, edges), focal_);
    out(i) = canberra(self.belief, other.belief);
    out(n + i) = canberra(self.plausibility, other.plausibility);
  }
  return out;
}

Eigen::VectorXd dst_features(const Window& w, const std::vector<const Window*>& neighbors,
                             const SensorStats& stats, int num_bins) {
  return DstExtractor(num_bins)(w, neighbors, stats);
}

FeatureTable FeatureTable::subset(const std::vector<Eigen::Index>& rows) const {
  FeatureTable out;
  out.kind = kind;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Eigen::Index r = rows[i];
    const auto ri = static_cast<std::size_t>(r);
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(r);
    out.labels(static_cast<Eigen::Index>(i)) = labels(r);
    out.keys.push_back(keys[ri]);
    out.sources.push_back(sources[ri]);
    out.realizations.push_back(realizations[ri]);
    out.flags.push_back(flags[ri]);
  }
  return out;
}

void FeatureTable::append(const FeatureTable& other) {
  if (rows() == 0) {
    *this = other;
    return;
  }
  if (other.kind != kind || other.dims() != dims()) throw ConfigError("FeatureTable::append: kind mismatch");
  const Eigen::Index old = rows();
  features.conservativeResize(old + other.rows(), Eigen::NoChange);
  features.bottomRows(other.rows()) = other.features;
  labels.conservativeResize(old + other.rows());
  labels.tail(other.rows()) = other.labels;
  keys.insert(keys.end(), other.keys.begin(), other.keys.end());
  sources.insert(sources.end(), other.sources.begin(), other.sources.end());
  realizations.insert(realizations.end(), other.realizations.begin(), other.realizations.end());
  flags.insert(flags.end(), other.flags.begin(), other.flags.end());
}

FeatureTable build_features(const std::vector<Instance>& dataset, const NeighborMap& neighbors,
                            const StatsMap& stats, FeatureKind kind, int realization, const FeatureConfig& config,
                            FeatureBuildStats* build_stats) {
  FeatureBuildStats local;
  FeatureBuildStats& bs = build_stats ? *build_stats : local;

  // Peer windows come from real (non-synthesized) data only.
  std::map<std::pair<SensorId, int>, std::vector<Window>> originals;
  for (const auto& inst : dataset)
    if (inst.label.source() == TrustSource::Original || inst.label.source() == TrustSource::Outlier)
      originals.emplace(std::make_pair(inst.sensor_id, inst.day_index), window(inst, config.window_length));

  std::optional<CorrelationExtractor> corr;
  std::optional<DstExtractor> dst;
  if (kind == FeatureKind::Correlation)
    corr.emplace(config.window_length, config.dct);
  else
    dst.emplace(config.dst_bins, config.dst_span_std);

  FeatureTable table;
  table.kind = kind;
  std::vector<Eigen::VectorXd> rows;
  for (const auto& inst : dataset) {
    const auto windows = window(inst, config.window_length);
    bs.windows += windows.size();
    const auto peers_it = neighbors.find(inst.sensor_id);
    std::vector<const std::vector<Window>*> peer_windows;
    bool complete = peers_it != neighbors.end();
    if (complete) {
      for (SensorId p : peers_it->second) {
        const auto it = originals.find({p, inst.day_index});
        if (it == originals.end()) {
          complete = false;
          break;
        }
        peer_windows.push_back(&it->second);
      }
    }
    if (!complete) {
      bs.skipped_missing_neighbor += windows.size();
      continue;
    }
    for (const auto& w : windows) {
      std::vector<const Window*> nb;
      nb.reserve(peer_windows.size());
      for (const auto* pw : peer_windows) nb.push_back(&(*pw)[static_cast<std::size_t>(w.window_index)]);
      std::uint32_t flag = 0;
      if (corr) {
        auto f = (*corr)(w, nb);
        flag = f.undefined_mask;
        if (flag != 0) ++bs.undefined_pearson;
        rows.push_back(std::move(f.vector));
      } else {
        const auto st = stats.find(inst.sensor_id);
        if (st == stats.end()) throw FeatureError("no statistics for sensor " + std::to_string(inst.sensor_id));
        rows.push_back((*dst)(w, nb, st->second));
      }
      table.keys.push_back({w.sensor_id, w.day_index, w.window_index});
      table.sources.push_back(w.label.source());
      table.realizations.push_back(realization);
      table.flags.push_back(flag);
    }
  }
  const Eigen::Index dims = rows.empty() ? feature_dimension(kind) : rows.front().size();
  table.features.resize(static_cast<Eigen::Index>(rows.size()), dims);
  table.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    table.features.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    table.labels(static_cast<Eigen::Index>(i)) = TrustLabel(table.sources[i]).binary();
  }
  return table;
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& x, const std::vector<Eigen::Index>& fit_rows) {
  if (fit_rows.empty()) throw ConfigError("standardize: no rows to fit");
  Standardizer s;
  s.means = Eigen::RowVectorXd::Zero(x.cols());
  s.stds = Eigen::RowVectorXd::Zero(x.cols());
  for (Eigen::Index r : fit_rows) s.means += x.row(r);
  s.means /= static_cast<double>(fit_rows.size());
  for (Eigen::Index r : fit_rows) s.stds += (x.row(r) - s.means).array().square().matrix();
  s.stds = (s.stds / static_cast<double>(fit_rows.size())).array().sqrt();
  for (Eigen::Index c = 0; c < x.cols(); ++c)
    if (!(s.stds(c) > 0.0)) s.stds(c) = 1.0;
  return s;
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& x) {
  std::vector<Eigen::Index> all(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) all[static_cast<std::size_t>(i)] = i;
  return fit(x, all);
}

Eigen::MatrixXd Standardizer::transform(const Eigen::MatrixXd& x) const {
  if (x.cols() != means.size()) throw ConfigError("standardize: dimension mismatch");
  return (x.rowwise() - means).array().rowwise() / stds.array();
}

Standardized standardize(const Eigen::MatrixXd& x, const std::vector<Eigen::Index>& fit_rows) {
  Standardized out;
  out.stats = Standardizer::fit(x, fit_rows);
  out.transformed = out.stats.transform(x);
  return out;
}

void write_features(std::ostream& out, const FeatureTable& table) {
  out << "sensor,day,window,label,source,realization";
  for (Eigen::Index c = 0; c < table.dims(); ++c) out << ",f" << c;
  out << '\n';
  for (Eigen::Index r = 0; r < table.rows(); ++r) {
    const auto i = static_cast<std::size_t>(r);
    out << table.keys[i].sensor_id << ',' << table.keys[i].day_index << ',' << table.keys[i].window_index << ','
        << table.labels(r) << ',' << to_string(table.sources[i]) << ',' << table.realizations[i];
    for (Eigen::Index c = 0; c < table.dims(); ++c) out << ',' << text::format_double(table.features(r, c));
    out << '\n';
  }
  if (!out) throw InputError("failed to write feature matrix");
}

FeatureTable read_features(std::istream& in, std::optional<FeatureKind> kind) {
  if (!in.good()) throw InputError("feature stream is not readable");
  std::string line;
  if (!std::getline(in, line)) throw FormatError("feature file: missing header");
  const auto header = text::split(text::trim(line), ',');
  static constexpr std::string_view kCols[] = {"sensor", "day", "window", "label", "source", "realization"};
  if (header.size() < 6 || !std::equal(std::begin(kCols), std::end(kCols), header.begin()))
    throw FormatError("feature file: unexpected header");
  const auto dims = static_cast<Eigen::Index>(header.size() - 6);
  FeatureTable table;
  if (kind) {
    table.kind = *kind;
  } else if (dims == feature_dimension(FeatureKind::Correlation)) {
    table.kind = FeatureKind::Correlation;
  } else if (dims == feature_dimension(FeatureKind::DST)) {
    table.kind = FeatureKind::DST;
  } else {
    throw FormatError("feature file: cannot infer feature kind from " + std::to_string(dims) + " columns");
  }
  std::vector<double> values;
  std::vector<int> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = text::trim(line);
    if (trimmed.empty()) continue;
    const auto f = text::split(trimmed, ',');
    const auto where = "feature file line " + std::to_string(line_no);
    if (static_cast<Eigen::Index>(f.size()) != dims + 6) throw FormatError(where + ": wrong field count");
    const auto s = text::parse_int(f[0]);
    const auto d = text::parse_int(f[1]);
    const auto w = text::parse_int(f[2]);
    const auto l = text::parse_int(f[3]);
    const auto r = text::parse_int(f[5]);
    if (!s || !d || !w || !l || !r) throw FormatError(where + ": bad key");
    const auto source = parse_trust_source(f[4]);
    if (TrustLabel(source).binary() != *l) throw FormatError(where + ": label disagrees with source");
    table.keys.push_back({static_cast<SensorId>(*s), static_cast<int>(*d), static_cast<int>(*w)});
    table.sources.push_back(source);
    table.realizations.push_back(static_cast<int>(*r));
    table.flags.push_back(0);
    labels.push_back(static_cast<int>(*l));
    for (Eigen::Index c = 0; c < dims; ++c) {
      const auto v = text::parse_double(f[static_cast<std::size_t>(c + 6)]);
      if (!v || !std::isfinite(*v)) throw FormatError(where + ": bad feature value");
      values.push_back(*v);
    }
  }
  const auto rows = static_cast<Eigen::Index>(labels.size());
  table.features = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), rows, dims);
  table.labels = Eigen::Map<const Eigen::VectorXi>(labels.data(), rows);
  return table;
}

}  // namespace trustforge
