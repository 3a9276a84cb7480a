// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

// Learners used by the evaluation harness. Every fit is a deterministic
// function of (data, hyperparameters, seed).

#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace trustforge {

enum class ModelKind { KMeans, GMM, LinearSVM, MLP, LabelProp, SvmViaKMeans };

std::string_view to_string(ModelKind k);  // kmeans, gmm, svm, mlp, labelprop, svm-via-kmeans
ModelKind parse_model_kind(std::string_view text);
bool is_clustering(ModelKind k);

struct KMeansParams {
  int k = 2;
  int max_iter = 300;
  double tol = 1e-6;
};

struct GmmParams {
  int k = 2;
  int max_iter = 200;
  double tol = 1e-4;
  double ridge = 1e-6;
};

struct SvmParams {
  double C = 1.0;
  int epochs = 50;
};

struct MlpParams {
  int hidden = 64;
  int max_epochs = 200;
  double learning_rate = 0.01;
  double momentum = 0.9;
  int batch_size = 32;
  double validation_fraction = 0.1;
  int patience = 10;
};

struct LabelPropParams {
  int k_graph = 10;
  double alpha = 0.99;
  int max_iter = 1000;
  double tol = 1e-6;
  double labeled_fraction = 0.10;
};

struct ModelSpec {
  ModelKind kind = ModelKind::LinearSVM;
  KMeansParams kmeans;
  GmmParams gmm;
  SvmParams svm;
  MlpParams mlp;
  LabelPropParams labelprop;
  std::uint64_t seed = 0;
};

/// Training metadata common to every learner.
struct FitInfo {
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;
  std::vector<double> history;  // per-iteration objective (inertia, log-likelihood, loss, ...)
};

/// Cluster id -> class. Identity unless cluster_label_map says otherwise.
using ClusterMap = std::array<int, 2>;

struct KMeansModel {
  Eigen::MatrixXd centroids;  // k x D
  ClusterMap cluster_to_class{0, 1};
  FitInfo info;
};

struct GmmModel {
  Eigen::VectorXd weights;                   // k
  Eigen::MatrixXd means;                     // k x D
  std::vector<Eigen::MatrixXd> covariances;  // k of D x D
  double ridge = 1e-6;
  ClusterMap cluster_to_class{0, 1};
  FitInfo info;
};

struct SvmModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  FitInfo info;
};

struct MlpModel {
  Eigen::MatrixXd w1;  // hidden x D
  Eigen::VectorXd b1;  // hidden
  Eigen::VectorXd w2;  // hidden
  double b2 = 0.0;
  FitInfo info;
};

struct LabelPropModel {
  Eigen::MatrixXd train_x;      // graph nodes
  Eigen::MatrixXd scores;       // n x 2 propagated label scores
  Eigen::VectorXi transductive;  // argmax of scores
  double bandwidth = 1.0;
  int k_graph = 10;
  FitInfo info;
};

struct SvmViaKMeansModel {
  KMeansModel kmeans;
  SvmModel svm;
};

using ModelParams = std::variant<KMeansModel, GmmModel, SvmModel, MlpModel, LabelPropModel, SvmViaKMeansModel>;

struct TrainedModel {
  ModelSpec spec;
  ModelParams params;

  ModelKind kind() const { return spec.kind; }
};

// k-means ------------------------------------------------------------------

/// k-means++ seeding followed by Lloyd iterations. `info.history` holds the
/// inertia after every assignment step.
KMeansModel kmeans_fit(const Eigen::MatrixXd& x, const KMeansParams& params, std::uint64_t seed);

/// Nearest centroid, ties to the lower id.
Eigen::VectorXi kmeans_predict(const KMeansModel& model, const Eigen::MatrixXd& x);

double kmeans_inertia(const KMeansModel& model, const Eigen::MatrixXd& x);

// Gaussian mixture ----------------------------------------------------------

/// EM with full covariances, seeded from kmeans_fit. The ridge enters as a
/// penalty -ridge/2 tr(Sigma^-1) per component density so that the M-step
/// Sigma = S/N + ridge I is exact; `info.history` holds that penalized
/// log-likelihood, which never decreases.
GmmModel gmm_fit(const Eigen::MatrixXd& x, const GmmParams& params, std::uint64_t seed);

/// Responsibilities, n x k.
Eigen::MatrixXd gmm_responsibilities(const GmmModel& model, const Eigen::MatrixXd& x);
Eigen::VectorXi gmm_predict(const GmmModel& model, const Eigen::MatrixXd& x);
double gmm_objective(const GmmModel& model, const Eigen::MatrixXd& x);

// Linear SVM ----------------------------------------------------------------

/// Pegasos stochastic subgradient descent on
///   lambda/2 |[w,b]|^2 + mean_i hinge(y_i (w.x_i + b)),  lambda = 1/(C n).
/// The bias is folded in as a constant feature. Labels are 0/1.
SvmModel svm_fit(const Eigen::MatrixXd& x, const Eigen::VectorXi& labels, const SvmParams& params,
                 std::uint64_t seed);

Eigen::VectorXd svm_decision(const SvmModel& model, const Eigen::MatrixXd& x);
double svm_objective(const Eigen::VectorXd& weights, double bias, const Eigen::MatrixXd& x,
                     const Eigen::VectorXi& labels, double C);

// MLP -----------------------------------------------------------------------

/// One ReLU hidden layer, logistic output, mean binary cross-entropy;
/// mini-batch SGD with momentum and validation early stopping.
MlpModel mlp_fit(const Eigen::MatrixXd& x, const Eigen::VectorXi& labels, const MlpParams& params,
                 std::uint64_t seed);

MlpModel mlp_init(Eigen::Index inputs, int hidden, std::uint64_t seed);
Eigen::VectorXd mlp_predict_proba(const MlpModel& model, const Eigen::MatrixXd& x);

/// Parameters flattened as [w1 (row-major), b1, w2, b2].
Eigen::VectorXd mlp_flatten(const MlpModel& model);
void mlp_unflatten(MlpModel& model, const Eigen::VectorXd& flat);

/// Mean cross-entropy and its gradient with respect to mlp_flatten(model).
std::pair<double, Eigen::VectorXd> mlp_loss_gradient(const MlpModel& model, const Eigen::MatrixXd& x,
                                                     const Eigen::VectorXi& labels);

// Label propagation -----------------------------------------------------------

/// Symmetric kNN graph with heat-kernel weights; labeled rows (`labeled[i]`)
/// are clamped each iteration. Requires at least one labeled row per class.
LabelPropModel labelprop_fit(const Eigen::MatrixXd& x, const Eigen::VectorXi& labels,
                             const std::vector<bool>& labeled, const LabelPropParams& params);

/// Inductive extension: kernel-weighted vote of the k_graph nearest graph nodes.
Eigen::VectorXi labelprop_predict(const LabelPropModel& model, const Eigen::MatrixXd& x);

// Cluster naming ------------------------------------------------------------

struct ClusterMapping {
  ClusterMap map{0, 1};
  double accuracy = 0.0;
};

/// Picks the cluster->class bijection with the higher reference accuracy;
/// ties keep the identity.
ClusterMapping cluster_label_map(const Eigen::VectorXi& clusters, const Eigen::VectorXi& labels);

/// k-means on the features, clusters named with `reference_labels`, then an
/// SVM trained on the cluster-induced labels only.
SvmViaKMeansModel svm_via_kmeans(const Eigen::MatrixXd& x, const Eigen::VectorXi& reference_labels,
                                 const KMeansParams& kmeans, const SvmParams& svm, std::uint64_t seed);

// Generic entry points ------------------------------------------------------

/// Fits any model kind. Clustering kinds use `labels` only to name clusters;
/// LabelProp uses labels where `labeled` is true (all rows when empty).
TrainedModel fit_model(const ModelSpec& spec, const Eigen::MatrixXd& x, const Eigen::VectorXi& labels,
                       const std::vector<bool>& labeled = {});

/// 0/1 class labels. SVM: decision >= 0 -> 1. MLP: probability >= 0.5 -> 1.
Eigen::VectorXi classify(const TrainedModel& model, const Eigen::MatrixXd& x);

/// Throws ConfigError unless both classes occur in `labels`.
void require_two_classes(const Eigen::VectorXi& labels, std::string_view who);

}  // namespace trustforge
