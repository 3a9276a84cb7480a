// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

#include <limits>
#include <random>

#include "trustforge/error.hpp"
#include "trustforge/models.hpp"
#include "trustforge/rng.hpp"

namespace trustforge {
namespace {

// Index of the nearest centroid (ties to the lower id) and its squared distance.
std::pair<int, double> nearest(const Eigen::MatrixXd& centroids, const Eigen::RowVectorXd& row) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const double d = (centroids.row(c) - row).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return {best, best_d};
}

Eigen::MatrixXd plus_plus_init(const Eigen::MatrixXd& x, int k, Rng& rng) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd centroids(k, x.cols());
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centroids.row(0) = x.row(pick(rng));
  Eigen::VectorXd d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2(i) = (x.row(i) - centroids.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      const double target = u(rng);
      double acc = 0.0;
      chosen = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2(i);
        if (acc > target && d2(i) > 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = pick(rng);
    }
    centroids.row(c) = x.row(chosen);
    for (Eigen::Index i = 0; i < n; ++i) d2(i) = std::min(d2(i), (x.row(i) - centroids.row(c)).squaredNorm());
  }
  return centroids;
}

}  // namespace

KMeansModel kmeans_fit(const Eigen::MatrixXd& x, const KMeansParams& params, std::uint64_t seed) {
  if (params.k < 1) throw ConfigError("kmeans: k must be positive");
  if (x.rows() < params.k) throw ConfigError("kmeans: fewer rows than clusters");
  Rng rng(seed);
  KMeansModel model;
  model.centroids = plus_plus_init(x, params.k, rng);

  const Eigen::Index n = x.rows();
  Eigen::VectorXi assign(n);
  for (int iter = 1; iter <= params.max_iter; ++iter) {
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto [c, d] = nearest(model.centroids, x.row(i));
      assign(i) = c;
      inertia += d;
    }
    model.info.history.push_back(inertia);

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(params.k, x.cols());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(params.k);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(assign(i)) += x.row(i);
      counts(assign(i)) += 1.0;
    }
    double shift = 0.0;
    for (int c = 0; c < params.k; ++c) {
      if (counts(c) == 0.0) continue;  // empty cluster keeps its centroid
      const Eigen::RowVectorXd updated = sums.row(c) / counts(c);
      shift = std::max(shift, (updated - model.centroids.row(c)).norm());
      model.centroids.row(c) = updated;
    }
    model.info.iterations = iter;
    if (shift < params.tol) {
      model.info.converged = true;
      break;
    }
  }
  model.info.objective = kmeans_inertia(model, x);
  model.info.history.push_back(model.info.objective);
  return model;
}

Eigen::VectorXi kmeans_predict(const KMeansModel& model, const Eigen::MatrixXd& x) {
  if (x.cols() != model.centroids.cols()) throw ConfigError("kmeans_predict: dimension mismatch");
  Eigen::VectorXi out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out(i) = nearest(model.centroids, x.row(i)).first;
  return out;
}

double kmeans_inertia(const KMeansModel& model, const Eigen::MatrixXd& x) {
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) inertia += nearest(model.centroids, x.row(i)).second;
  return inertia;
}

}  // namespace trustforge
