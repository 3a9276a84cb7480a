// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

// Window-level feature extraction: DCT band energies plus neighbor Pearson
// coefficients ("correlation" features) and Dempster-Shafer belief /
// plausibility distances ("DST" features).

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "trustforge/synth.hpp"
#include "trustforge/topology.hpp"
#include "trustforge/types.hpp"

namespace trustforge {

struct Window {
  SensorId sensor_id = 0;
  int day_index = 0;
  int window_index = 0;
  Eigen::VectorXd values;
  TrustLabel label;
};

/// Splits an instance into contiguous windows of `length` samples.
std::vector<Window> window(const Instance& instance, Eigen::Index length = 120);

struct DctSpec {
  Eigen::Index num_coeffs = 100;
  Eigen::Index num_bands = 10;
};

/// Band-averaged DCT coefficients (num_bands values).
Eigen::VectorXd band_features(const Eigen::VectorXd& coeffs, Eigen::Index num_bands = 10);

enum class FeatureKind { Correlation, DST };

std::string_view to_string(FeatureKind k);      // "corr" | "dst"
FeatureKind parse_feature_kind(std::string_view text);
Eigen::Index feature_dimension(FeatureKind k, std::size_t num_neighbors = 7);

struct CorrFeatures {
  Eigen::VectorXd vector;           // [bands | neighbor Pearson]
  std::uint32_t undefined_mask = 0;  // bit n set: Pearson with neighbor n undefined, 0 substituted
};

/// Precomputed cosine basis so that feature extraction over many windows
/// costs one matrix-vector product each.
class CorrelationExtractor {
 public:
  CorrelationExtractor(Eigen::Index window_length, const DctSpec& spec);

  /// Throws FeatureError when a neighbor window is missing or misaligned.
  CorrFeatures operator()(const Window& w, const std::vector<const Window*>& neighbors) const;

  const DctSpec& spec() const { return spec_; }

 private:
  DctSpec spec_;
  Eigen::MatrixXd basis_t_;  // num_coeffs x window_length
};

/// One-shot form of CorrelationExtractor.
CorrFeatures corr_features(const Window& w, const std::vector<const Window*>& neighbors,
                           const DctSpec& spec = {});

/// Probability mass over fixed bins.
struct Pmf {
  Eigen::VectorXd edges;   // B+1 ascending
  Eigen::VectorXd masses;  // B, sums to 1
};

/// B equal bins over [mean - span*std, mean + span*std]; a zero std falls
/// back to a half-width of 0.5 degC.
Eigen::VectorXd pmf_edges(const SensorStats& stats, int num_bins = 10, double span_std = 4.0);

/// Normalized histogram; values outside the edges count toward the edge bins.
Pmf pmf(const Eigen::VectorXd& values, const Eigen::VectorXd& edges);

using FocalSet = std::vector<int>;  // bin indexes

/// Mass on arbitrary focal sets of the bin frame.
struct MassAssignment {
  std::vector<FocalSet> sets;
  Eigen::VectorXd masses;

  static MassAssignment singletons(const Pmf& p);
};

struct BeliefPlausibility {
  Eigen::VectorXd belief;
  Eigen::VectorXd plausibility;
};

/// bel(A) = sum of m(F) over F subset of A; pl(A) = sum of m(F) over F meeting A.
BeliefPlausibility belief_plausibility(const MassAssignment& mass, const std::vector<FocalSet>& queries);
BeliefPlausibility belief_plausibility(const Pmf& p, const std::vector<FocalSet>& queries);

/// Singletons followed by adjacent-bin pairs {b_i, b_i+1}.
std::vector<FocalSet> default_focal_sets(int num_bins);

class DstExtractor {
 public:
  explicit DstExtractor(int num_bins = 10, double span_std = 4.0);

  /// [canberra(bel_self, bel_n) for n | canberra(pl_self, pl_n) for n]. All
  /// PMFs use the bin edges of the window's own sensor.
  Eigen::VectorXd operator()(const Window& w, const std::vector<const Window*>& neighbors,
                             const SensorStats& stats) const;

  int num_bins() const { return num_bins_; }

 private:
  int num_bins_;
  double span_std_;
  std::vector<FocalSet> focal_;
};

/// One-shot form of DstExtractor.
Eigen::VectorXd dst_features(const Window& w, const std::vector<const Window*>& neighbors,
                             const SensorStats& stats, int num_bins = 10);

struct RowKey {
  SensorId sensor_id = 0;
  int day_index = 0;
  int window_index = 0;

  friend auto operator<=>(const RowKey&, const RowKey&) = default;
};

/// Feature matrix plus per-row provenance.
struct FeatureTable {
  FeatureKind kind = FeatureKind::Correlation;
  std::vector<RowKey> keys;
  std::vector<TrustSource> sources;
  std::vector<int> realizations;
  std::vector<std::uint32_t> flags;
  Eigen::MatrixXd features;
  Eigen::VectorXi labels;  // 0 trustworthy, 1 untrustworthy

  Eigen::Index rows() const { return features.rows(); }
  Eigen::Index dims() const { return features.cols(); }
  FeatureTable subset(const std::vector<Eigen::Index>& rows) const;
  void append(const FeatureTable& other);
};

struct FeatureConfig {
  Eigen::Index window_length = 120;
  DctSpec dct;
  int dst_bins = 10;
  double dst_span_std = 4.0;
};

struct FeatureBuildStats {
  std::size_t windows = 0;
  std::size_t skipped_missing_neighbor = 0;
  std::size_t undefined_pearson = 0;
};

/// Extracts one row per window of every instance in `dataset`. Neighbor
/// windows come from the Original/Outlier instance of each peer on the same
/// day. Windows whose peers lack that day are skipped and counted.
FeatureTable build_features(const std::vector<Instance>& dataset, const NeighborMap& neighbors,
                            const StatsMap& stats, FeatureKind kind, int realization,
                            const FeatureConfig& config = {}, FeatureBuildStats* build_stats = nullptr);

/// Per-column z-scoring fitted on a subset of rows.
struct Standardizer {
  Eigen::RowVectorXd means;
  Eigen::RowVectorXd stds;  // 1 where the fitted column is constant

  static Standardizer fit(const Eigen::MatrixXd& x, const std::vector<Eigen::Index>& fit_rows);
  static Standardizer fit(const Eigen::MatrixXd& x);
  Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const;
};

struct Standardized {
  Standardizer stats;
  Eigen::MatrixXd transformed;
};

/// Fits on `fit_rows` and transforms every row.
Standardized standardize(const Eigen::MatrixXd& x, const std::vector<Eigen::Index>& fit_rows);

// Header `sensor,day,window,label,source,realization,f0..f{D-1}`.
void write_features(std::ostream& out, const FeatureTable& table);
FeatureTable read_features(std::istream& in, std::optional<FeatureKind> kind = std::nullopt);

}  // namespace trustforge
