// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "trustforge/error.hpp"
#include "trustforge/models.hpp"

namespace trustforge {
namespace {

// Per-component log of pi_k N(x | mu_k, Sigma_k) exp(-ridge/2 tr(Sigma_k^-1)).
Eigen::MatrixXd log_components(const GmmModel& m, const Eigen::MatrixXd& x) {
  const Eigen::Index k = m.weights.size();
  const auto d = static_cast<double>(x.cols());
  Eigen::MatrixXd out(x.rows(), k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const Eigen::LLT<Eigen::MatrixXd> llt(m.covariances[static_cast<std::size_t>(c)]);
    if (llt.info() != Eigen::Success)
      throw NumericalError("gmm: covariance of component " + std::to_string(c) + " is not positive definite");
    const Eigen::MatrixXd lower = llt.matrixL();
    const double log_det = 2.0 * lower.diagonal().array().log().sum();
    const double trace_inv =
        llt.solve(Eigen::MatrixXd::Identity(x.cols(), x.cols())).trace();
    const double constant = std::log(m.weights(c)) - 0.5 * (d * std::log(2.0 * std::numbers::pi) + log_det) -
                            0.5 * m.ridge * trace_inv;
    const Eigen::MatrixXd centered = (x.rowwise() - m.means.row(c)).transpose();
    const Eigen::MatrixXd z = llt.matrixL().solve(centered);
    out.col(c) = (constant - 0.5 * z.colwise().squaredNorm().array()).matrix().transpose();
  }
  return out;
}

// Row-wise log-sum-exp.
Eigen::VectorXd log_sum_exp(const Eigen::MatrixXd& a) {
  const Eigen::VectorXd mx = a.rowwise().maxCoeff();
  return mx.array() + (a.colwise() - mx).array().exp().rowwise().sum().log();
}

}  // namespace

Eigen::MatrixXd gmm_responsibilities(const GmmModel& model, const Eigen::MatrixXd& x) {
  if (x.cols() != model.means.cols()) throw ConfigError("gmm: dimension mismatch");
  const Eigen::MatrixXd lc = log_components(model, x);
  const Eigen::VectorXd norm = log_sum_exp(lc);
  return (lc.colwise() - norm).array().exp();
}

Eigen::VectorXi gmm_predict(const GmmModel& model, const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd r = gmm_responsibilities(model, x);
  Eigen::VectorXi out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Eigen::Index best = 0;
    r.row(i).maxCoeff(&best);
    out(i) = static_cast<int>(best);
  }
  return out;
}

double gmm_objective(const GmmModel& model, const Eigen::MatrixXd& x) {
  return log_sum_exp(log_components(model, x)).sum();
}

GmmModel gmm_fit(const Eigen::MatrixXd& x, const GmmParams& params, std::uint64_t seed) {
  const Eigen::Index n = x.rows();
  const Eigen::Index dim = x.cols();
  const int k = params.k;
  if (n < k) throw ConfigError("gmm: fewer rows than components");
  if (!(params.ridge > 0.0)) throw ConfigError("gmm: ridge must be positive");

  const KMeansModel init = kmeans_fit(x, {k, 300, 1e-6}, seed);
  const Eigen::VectorXi assign = kmeans_predict(init, x);

  // Hard responsibilities from k-means give the first M-step.
  Eigen::MatrixXd resp = Eigen::MatrixXd::Zero(n, k);
  for (Eigen::Index i = 0; i < n; ++i) resp(i, assign(i)) = 1.0;

  GmmModel model;
  model.ridge = params.ridge;
  model.weights = Eigen::VectorXd::Constant(k, 1.0 / k);
  model.means = init.centroids;
  model.covariances.assign(static_cast<std::size_t>(k), Eigen::MatrixXd::Identity(dim, dim));

  const auto m_step = [&](const Eigen::MatrixXd& r) {
    for (int c = 0; c < k; ++c) {
      const double nk = r.col(c).sum();
      if (!(nk > 0.0)) continue;  // dead component keeps its parameters
      model.weights(c) = nk / static_cast<double>(n);
      model.means.row(c) = (r.col(c).transpose() * x) / nk;
      const Eigen::MatrixXd centered = x.rowwise() - model.means.row(c);
      Eigen::MatrixXd cov = (centered.array().colwise() * r.col(c).array()).matrix().transpose() * centered / nk;
      cov.diagonal().array() += params.ridge;
      model.covariances[static_cast<std::size_t>(c)] = cov;
    }
    model.weights /= model.weights.sum();
  };

  m_step(resp);
  double previous = -std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= params.max_iter; ++iter) {
    const Eigen::MatrixXd lc = log_components(model, x);
    const Eigen::VectorXd norm = log_sum_exp(lc);
    const double objective = norm.sum();
    if (!std::isfinite(objective)) throw NumericalError("gmm: log-likelihood is not finite");
    model.info.history.push_back(objective);
    model.info.iterations = iter;
    model.info.objective = objective;
    if (objective - previous < params.tol) {
      model.info.converged = true;
      break;
    }
    previous = objective;
    resp = (lc.colwise() - norm).array().exp();
    m_step(resp);
  }
  if (!model.info.converged) {
    model.info.objective = gmm_objective(model, x);
    model.info.history.push_back(model.info.objective);
  }
  return model;
}

}  // namespace trustforge
