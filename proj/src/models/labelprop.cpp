// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "trustforge/error.hpp"
#include "trustforge/models.hpp"

namespace trustforge {
namespace {

struct Neighbors {
  Eigen::MatrixXi index;  // rows x k
  Eigen::MatrixXd dist;   // rows x k, ascending
};

// Brute-force kNN in row blocks; ties broken by lower reference index.
Neighbors knn(const Eigen::MatrixXd& query, const Eigen::MatrixXd& ref, int k, bool exclude_self) {
  const Eigen::Index nq = query.rows();
  const Eigen::Index nr = ref.rows();
  Neighbors out{Eigen::MatrixXi(nq, k), Eigen::MatrixXd(nq, k)};
  const Eigen::VectorXd ref_sq = ref.rowwise().squaredNorm();
  constexpr Eigen::Index kBlock = 256;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(nr));
  for (Eigen::Index start = 0; start < nq; start += kBlock) {
    const Eigen::Index len = std::min(kBlock, nq - start);
    const auto q = query.middleRows(start, len);
    // |q - r|^2 = |q|^2 + |r|^2 - 2 q.r
    Eigen::MatrixXd d2 = (-2.0 * q * ref.transpose()).rowwise() + ref_sq.transpose();
    d2.colwise() += q.rowwise().squaredNorm();
    for (Eigen::Index i = 0; i < len; ++i) {
      const Eigen::Index qi = start + i;
      std::iota(order.begin(), order.end(), Eigen::Index{0});
      const auto less = [&](Eigen::Index a, Eigen::Index b) {
        const bool sa = exclude_self && a == qi;
        const bool sb = exclude_self && b == qi;
        if (sa != sb) return sb;
        if (d2(i, a) != d2(i, b)) return d2(i, a) < d2(i, b);
        return a < b;
      };
      std::partial_sort(order.begin(), order.begin() + k, order.end(), less);
      for (int j = 0; j < k; ++j) {
        const Eigen::Index r = order[static_cast<std::size_t>(j)];
        out.index(qi, j) = static_cast<int>(r);
        out.dist(qi, j) = std::sqrt(std::max(0.0, d2(i, r)));
      }
    }
  }
  return out;
}

int argmax_tie_one(double s0, double s1) { return s1 >= s0 ? 1 : 0; }

}  // namespace

LabelPropModel labelprop_fit(const Eigen::MatrixXd& x, const Eigen::VectorXi& labels,
                             const std::vector<bool>& labeled, const LabelPropParams& params) {
  const Eigen::Index n = x.rows();
  if (labels.size() != n || static_cast<Eigen::Index>(labeled.size()) != n)
    throw ConfigError("labelprop: row/label count mismatch");
  if (!(params.alpha > 0.0 && params.alpha < 1.0)) throw ConfigError("labelprop: alpha must lie in (0, 1)");
  bool seen[2] = {false, false};
  for (Eigen::Index i = 0; i < n; ++i)
    if (labeled[static_cast<std::size_t>(i)]) {
      if (labels(i) != 0 && labels(i) != 1) throw ConfigError("labelprop: labels must be 0 or 1");
      seen[labels(i)] = true;
    }
  if (!seen[0] || !seen[1]) throw ConfigError("labelprop: each class needs at least one labeled row");
  if (n < 2) throw ConfigError("labelprop: need at least 2 rows");

  LabelPropModel model;
  model.k_graph = static_cast<int>(std::min<Eigen::Index>(params.k_graph, n - 1));
  model.train_x = x;
  const Neighbors nb = knn(x, x, model.k_graph, true);

  std::vector<double> all_d(nb.dist.data(), nb.dist.data() + nb.dist.size());
  std::nth_element(all_d.begin(), all_d.begin() + static_cast<std::ptrdiff_t>(all_d.size() / 2), all_d.end());
  double bandwidth = all_d[all_d.size() / 2];
  if (!(bandwidth > 0.0)) {
    const double mx = *std::max_element(all_d.begin(), all_d.end());
    bandwidth = mx > 0.0 ? mx : 1.0;
  }
  model.bandwidth = bandwidth;

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(2 * n * model.k_graph));
  for (Eigen::Index i = 0; i < n; ++i)
    for (int j = 0; j < model.k_graph; ++j) {
      const double d = nb.dist(i, j);
      const double w = std::exp(-(d * d) / (bandwidth * bandwidth));
      triplets.emplace_back(static_cast<int>(i), nb.index(i, j), w);
      triplets.emplace_back(nb.index(i, j), static_cast<int>(i), w);
    }
  Eigen::SparseMatrix<double> w(n, n);
  w.setFromTriplets(triplets.begin(), triplets.end(), [](double a, double b) { return std::max(a, b); });
  const Eigen::VectorXd degree = w * Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd inv_sqrt =
      degree.unaryExpr([](double v) { return v > 0.0 ? 1.0 / std::sqrt(v) : 0.0; });
  const Eigen::SparseMatrix<double> s = inv_sqrt.asDiagonal() * w * inv_sqrt.asDiagonal();

  Eigen::MatrixXd y0 = Eigen::MatrixXd::Zero(n, 2);
  for (Eigen::Index i = 0; i < n; ++i)
    if (labeled[static_cast<std::size_t>(i)]) y0(i, labels(i)) = 1.0;

  Eigen::MatrixXd f = y0;
  for (int iter = 1; iter <= params.max_iter; ++iter) {
    Eigen::MatrixXd next = params.alpha * (s * f) + (1.0 - params.alpha) * y0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (labeled[static_cast<std::size_t>(i)]) next.row(i) = y0.row(i);
    const double change = (next - f).cwiseAbs().maxCoeff();
    f = std::move(next);
    model.info.history.push_back(change);
    model.info.iterations = iter;
    if (change < params.tol) {
      model.info.converged = true;
      break;
    }
  }
  model.info.objective = model.info.history.empty() ? 0.0 : model.info.history.back();
  model.scores = f;
  model.transductive.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) model.transductive(i) = argmax_tie_one(f(i, 0), f(i, 1));
  return model;
}

Eigen::VectorXi labelprop_predict(const LabelPropModel& model, const Eigen::MatrixXd& x) {
  if (x.cols() != model.train_x.cols()) throw ConfigError("labelprop: dimension mismatch");
  const int k = static_cast<int>(std::min<Eigen::Index>(model.k_graph, model.train_x.rows()));
  const Neighbors nb = knn(x, model.train_x, k, false);
  Eigen::VectorXi out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double s0 = 0.0;
    double s1 = 0.0;
    for (int j = 0; j < k; ++j) {
      const double d = nb.dist(i, j);
      const double w = std::exp(-(d * d) / (model.bandwidth * model.bandwidth));
      s0 += w * model.scores(nb.index(i, j), 0);
      s1 += w * model.scores(nb.index(i, j), 1);
    }
    if (s0 == 0.0 && s1 == 0.0) {
      // All kernel weights underflowed: fall back to the nearest node.
      s0 = model.scores(nb.index(i, 0), 0);
      s1 = model.scores(nb.index(i, 0), 1);
    }
    out(i) = argmax_tie_one(s0, s1);
  }
  return out;
}

}  // namespace trustforge
