// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

#include <string>

#include "trustforge/error.hpp"
#include "trustforge/models.hpp"
#include "trustforge/rng.hpp"

namespace trustforge {

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::KMeans: return "kmeans";
    case ModelKind::GMM: return "gmm";
    case ModelKind::LinearSVM: return "svm";
    case ModelKind::MLP: return "mlp";
    case ModelKind::LabelProp: return "labelprop";
    case ModelKind::SvmViaKMeans: return "svm-via-kmeans";
  }
  return "svm";
}

ModelKind parse_model_kind(std::string_view text) {
  for (ModelKind k : {ModelKind::KMeans, ModelKind::GMM, ModelKind::LinearSVM, ModelKind::MLP, ModelKind::LabelProp,
                      ModelKind::SvmViaKMeans})
    if (text == to_string(k)) return k;
  throw ConfigError("unknown model '" + std::string(text) + "'");
}

bool is_clustering(ModelKind k) { return k == ModelKind::KMeans || k == ModelKind::GMM; }

ClusterMapping cluster_label_map(const Eigen::VectorXi& clusters, const Eigen::VectorXi& labels) {
  if (clusters.size() != labels.size() || clusters.size() == 0)
    throw ConfigError("cluster_label_map: sizes differ or are empty");
  Eigen::Index same = 0;
  for (Eigen::Index i = 0; i < clusters.size(); ++i) same += clusters(i) == labels(i) ? 1 : 0;
  const auto n = static_cast<double>(clusters.size());
  const double identity = static_cast<double>(same) / n;
  const double swapped = static_cast<double>(clusters.size() - same) / n;
  if (swapped > identity) return {{1, 0}, swapped};
  return {{0, 1}, identity};
}

namespace {

Eigen::VectorXi apply_map(const Eigen::VectorXi& clusters, const ClusterMap& map) {
  return clusters.unaryExpr([&](int c) {
    if (c < 0 || c > 1) throw ConfigError("cluster id outside the two-cluster map");
    return map[static_cast<std::size_t>(c)];
  });
}

}  // namespace

SvmViaKMeansModel svm_via_kmeans(const Eigen::MatrixXd& x, const Eigen::VectorXi& reference_labels,
                                 const KMeansParams& kmeans, const SvmParams& svm, std::uint64_t seed) {
  if (kmeans.k != 2) throw ConfigError("svm_via_kmeans: needs exactly two clusters");
  SvmViaKMeansModel out;
  out.kmeans = kmeans_fit(x, kmeans, seed);
  const Eigen::VectorXi clusters = kmeans_predict(out.kmeans, x);
  out.kmeans.cluster_to_class = cluster_label_map(clusters, reference_labels).map;
  const Eigen::VectorXi induced = apply_map(clusters, out.kmeans.cluster_to_class);
  out.svm = svm_fit(x, induced, svm, derive_seed({seed, 0x73766d}));
  return out;
}

TrainedModel fit_model(const ModelSpec& spec, const Eigen::MatrixXd& x, const Eigen::VectorXi& labels,
                       const std::vector<bool>& labeled) {
  if (x.rows() != labels.size()) throw ConfigError("fit_model: row/label count mismatch");
  TrainedModel model{spec, KMeansModel{}};
  switch (spec.kind) {
    case ModelKind::KMeans: {
      KMeansModel m = kmeans_fit(x, spec.kmeans, spec.seed);
      if (spec.kmeans.k == 2) m.cluster_to_class = cluster_label_map(kmeans_predict(m, x), labels).map;
      model.params = std::move(m);
      break;
    }
    case ModelKind::GMM: {
      GmmModel m = gmm_fit(x, spec.gmm, spec.seed);
      if (spec.gmm.k == 2) m.cluster_to_class = cluster_label_map(gmm_predict(m, x), labels).map;
      model.params = std::move(m);
      break;
    }
    case ModelKind::LinearSVM:
      model.params = svm_fit(x, labels, spec.svm, spec.seed);
      break;
    case ModelKind::MLP:
      model.params = mlp_fit(x, labels, spec.mlp, spec.seed);
      break;
    case ModelKind::LabelProp:
      model.params = labelprop_fit(x, labels, labeled.empty() ? std::vector<bool>(static_cast<std::size_t>(x.rows()), true)
                                                             : labeled,
                                   spec.labelprop);
      break;
    case ModelKind::SvmViaKMeans:
      model.params = svm_via_kmeans(x, labels, spec.kmeans, spec.svm, spec.seed);
      break;
  }
  return model;
}

Eigen::VectorXi classify(const TrainedModel& model, const Eigen::MatrixXd& x) {
  return std::visit(
      [&](const auto& m) -> Eigen::VectorXi {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, KMeansModel>) {
          return apply_map(kmeans_predict(m, x), m.cluster_to_class);
        } else if constexpr (std::is_same_v<T, GmmModel>) {
          return apply_map(gmm_predict(m, x), m.cluster_to_class);
        } else if constexpr (std::is_same_v<T, SvmModel>) {
          return (svm_decision(m, x).array() >= 0.0).template cast<int>();
        } else if constexpr (std::is_same_v<T, MlpModel>) {
          return (mlp_predict_proba(m, x).array() >= 0.5).template cast<int>();
        } else if constexpr (std::is_same_v<T, LabelPropModel>) {
          return labelprop_predict(m, x);
        } else {
          return (svm_decision(m.svm, x).array() >= 0.0).template cast<int>();
        }
      },
      model.params);
}

}  // namespace trustforge
