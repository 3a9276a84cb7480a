// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "trustforge/error.hpp"
#include "trustforge/models.hpp"
#include "trustforge/rng.hpp"

namespace trustforge {
namespace {

double objective_augmented(const Eigen::VectorXd& w_aug, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           double lambda) {
  const Eigen::Index d = x.cols();
  const Eigen::VectorXd margins =
      y.array() * ((x * w_aug.head(d)).array() + w_aug(d));
  const double hinge = (1.0 - margins.array()).max(0.0).mean();
  return 0.5 * lambda * w_aug.squaredNorm() + hinge;
}

}  // namespace

void require_two_classes(const Eigen::VectorXi& labels, std::string_view who) {
  const bool has0 = (labels.array() == 0).any();
  const bool has1 = (labels.array() == 1).any();
  if (!has0 || !has1) throw ConfigError(std::string(who) + ": both classes must be present");
  if (((labels.array() != 0) && (labels.array() != 1)).any())
    throw ConfigError(std::string(who) + ": labels must be 0 or 1");
}

double svm_objective(const Eigen::VectorXd& weights, double bias, const Eigen::MatrixXd& x,
                     const Eigen::VectorXi& labels, double C) {
  Eigen::VectorXd w_aug(weights.size() + 1);
  w_aug << weights, bias;
  const Eigen::VectorXd y = (2 * labels.array() - 1).cast<double>();
  return objective_augmented(w_aug, x, y, 1.0 / (C * static_cast<double>(x.rows())));
}

SvmModel svm_fit(const Eigen::MatrixXd& x, const Eigen::VectorXi& labels, const SvmParams& params,
                 std::uint64_t seed) {
  if (x.rows() != labels.size()) throw ConfigError("svm: row/label count mismatch");
  require_two_classes(labels, "svm");
  if (!(params.C > 0.0) || params.epochs < 1) throw ConfigError("svm: C and epochs must be positive");

  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const double lambda = 1.0 / (params.C * static_cast<double>(n));
  const double radius = 1.0 / std::sqrt(lambda);
  const Eigen::VectorXd y = (2 * labels.array() - 1).cast<double>();

  Rng rng(seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  Eigen::VectorXd w = Eigen::VectorXd::Zero(d + 1);
  Eigen::VectorXd best = w;
  double best_obj = objective_augmented(w, x, y, lambda);

  SvmModel model;
  model.info.history.push_back(best_obj);
  long long t = 0;
  for (int epoch = 1; epoch <= params.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    Eigen::VectorXd avg = Eigen::VectorXd::Zero(d + 1);
    for (Eigen::Index i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double margin = y(i) * (x.row(i).dot(w.head(d)) + w(d));
      w *= 1.0 - eta * lambda;
      if (margin < 1.0) {
        w.head(d) += (eta * y(i)) * x.row(i).transpose();
        w(d) += eta * y(i);
      }
      const double norm = w.norm();
      if (norm > radius) w *= radius / norm;
      avg += w;
    }
    avg /= static_cast<double>(n);
    // Keep whichever of the last iterate and the epoch average scores best.
    for (const Eigen::VectorXd* candidate : {&w, &avg}) {
      const double obj = objective_augmented(*candidate, x, y, lambda);
      if (obj < best_obj) {
        best_obj = obj;
        best = *candidate;
      }
    }
    model.info.history.push_back(best_obj);
    model.info.iterations = epoch;
  }
  model.weights = best.head(d);
  model.bias = best(d);
  model.info.objective = best_obj;
  // Converged: the last epoch improved the objective by less than 0.01%.
  const auto& h = model.info.history;
  model.info.converged = h[h.size() - 2] - h.back() <= 1e-4 * std::abs(h.back());
  return model;
}

Eigen::VectorXd svm_decision(const SvmModel& model, const Eigen::MatrixXd& x) {
  if (x.cols() != model.weights.size()) throw ConfigError("svm: dimension mismatch");
  return (x * model.weights).array() + model.bias;
}

}  // namespace trustforge
