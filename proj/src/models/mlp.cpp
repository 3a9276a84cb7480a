// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "trustforge/error.hpp"
#include "trustforge/models.hpp"
#include "trustforge/rng.hpp"

namespace trustforge {
namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct Forward {
  Eigen::MatrixXd pre;     // n x hidden
  Eigen::MatrixXd hidden;  // n x hidden
  Eigen::VectorXd logit;   // n
};

Forward forward(const MlpModel& m, const Eigen::MatrixXd& x) {
  Forward f;
  f.pre = (x * m.w1.transpose()).rowwise() + m.b1.transpose();
  f.hidden = f.pre.cwiseMax(0.0);
  f.logit = (f.hidden * m.w2).array() + m.b2;
  return f;
}

double mean_loss(const Eigen::VectorXd& logit, const Eigen::VectorXd& y) {
  double loss = 0.0;
  for (Eigen::Index i = 0; i < logit.size(); ++i) loss += softplus(logit(i)) - y(i) * logit(i);
  return loss / static_cast<double>(logit.size());
}

struct Gradient {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::VectorXd w2;
  double b2 = 0.0;
};

double loss_and_grad(const MlpModel& m, const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Gradient& g) {
  const Forward f = forward(m, x);
  const auto n = static_cast<double>(x.rows());
  Eigen::VectorXd dlogit(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) dlogit(i) = (sigmoid(f.logit(i)) - y(i)) / n;
  g.w2 = f.hidden.transpose() * dlogit;
  g.b2 = dlogit.sum();
  Eigen::MatrixXd dpre = dlogit * m.w2.transpose();
  dpre.array() *= (f.pre.array() > 0.0).cast<double>();
  g.w1 = dpre.transpose() * x;
  g.b1 = dpre.colwise().sum().transpose();
  return mean_loss(f.logit, y);
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& x, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
  return out;
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(rows[i]);
  return out;
}

}  // namespace

MlpModel mlp_init(Eigen::Index inputs, int hidden, std::uint64_t seed) {
  if (hidden < 1 || inputs < 1) throw ConfigError("mlp: layer sizes must be positive");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MlpModel m;
  const double s1 = std::sqrt(2.0 / static_cast<double>(inputs));
  const double s2 = std::sqrt(1.0 / static_cast<double>(hidden));
  m.w1 = Eigen::MatrixXd::NullaryExpr(hidden, inputs, [&] { return s1 * normal(rng); });
  m.b1 = Eigen::VectorXd::Zero(hidden);
  m.w2 = Eigen::VectorXd::NullaryExpr(hidden, [&] { return s2 * normal(rng); });
  m.b2 = 0.0;
  return m;
}

Eigen::VectorXd mlp_predict_proba(const MlpModel& model, const Eigen::MatrixXd& x) {
  if (x.cols() != model.w1.cols()) throw ConfigError("mlp: dimension mismatch");
  const Forward f = forward(model, x);
  return f.logit.unaryExpr([](double z) { return sigmoid(z); });
}

Eigen::VectorXd mlp_flatten(const MlpModel& m) {
  const Eigen::Index h = m.w1.rows();
  const Eigen::Index d = m.w1.cols();
  Eigen::VectorXd flat(h * d + 2 * h + 1);
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < h; ++r)
    for (Eigen::Index c = 0; c < d; ++c) flat(k++) = m.w1(r, c);
  flat.segment(k, h) = m.b1;
  k += h;
  flat.segment(k, h) = m.w2;
  k += h;
  flat(k) = m.b2;
  return flat;
}

void mlp_unflatten(MlpModel& m, const Eigen::VectorXd& flat) {
  const Eigen::Index h = m.w1.rows();
  const Eigen::Index d = m.w1.cols();
  if (flat.size() != h * d + 2 * h + 1) throw ConfigError("mlp_unflatten: size mismatch");
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < h; ++r)
    for (Eigen::Index c = 0; c < d; ++c) m.w1(r, c) = flat(k++);
  m.b1 = flat.segment(k, h);
  k += h;
  m.w2 = flat.segment(k, h);
  k += h;
  m.b2 = flat(k);
}

std::pair<double, Eigen::VectorXd> mlp_loss_gradient(const MlpModel& model, const Eigen::MatrixXd& x,
                                                     const Eigen::VectorXi& labels) {
  Gradient g;
  const double loss = loss_and_grad(model, x, labels.cast<double>(), g);
  MlpModel as_model = model;
  as_model.w1 = g.w1;
  as_model.b1 = g.b1;
  as_model.w2 = g.w2;
  as_model.b2 = g.b2;
  return {loss, mlp_flatten(as_model)};
}

MlpModel mlp_fit(const Eigen::MatrixXd& x, const Eigen::VectorXi& labels, const MlpParams& params,
                 std::uint64_t seed) {
  if (x.rows() != labels.size()) throw ConfigError("mlp: row/label count mismatch");
  require_two_classes(labels, "mlp");
  if (params.batch_size < 1 || params.max_epochs < 1 || !(params.learning_rate > 0.0))
    throw ConfigError("mlp: invalid training parameters");

  Rng rng(derive_seed({seed, 0x6d6c70}));
  MlpModel model = mlp_init(x.cols(), params.hidden, seed);
  const Eigen::VectorXd y = labels.cast<double>();

  std::vector<Eigen::Index> all(static_cast<std::size_t>(x.rows()));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  std::shuffle(all.begin(), all.end(), rng);
  const auto n_val = static_cast<std::size_t>(
      params.validation_fraction > 0.0 && x.rows() >= 10
          ? std::floor(params.validation_fraction * static_cast<double>(x.rows()))
          : 0.0);
  std::vector<Eigen::Index> val(all.end() - static_cast<std::ptrdiff_t>(n_val), all.end());
  std::vector<Eigen::Index> train(all.begin(), all.end() - static_cast<std::ptrdiff_t>(n_val));
  std::sort(val.begin(), val.end());
  const Eigen::MatrixXd x_val = gather_rows(x, val);
  const Eigen::VectorXd y_val = gather(y, val);

  Gradient g;
  Gradient vel{Eigen::MatrixXd::Zero(model.w1.rows(), model.w1.cols()), Eigen::VectorXd::Zero(params.hidden),
               Eigen::VectorXd::Zero(params.hidden), 0.0};
  MlpModel best = model;
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;
  const auto batch = static_cast<std::size_t>(params.batch_size);

  for (int epoch = 1; epoch <= params.max_epochs; ++epoch) {
    std::shuffle(train.begin(), train.end(), rng);
    for (std::size_t start = 0; start < train.size(); start += batch) {
      const std::vector<Eigen::Index> rows(train.begin() + static_cast<std::ptrdiff_t>(start),
                                           train.begin() + static_cast<std::ptrdiff_t>(std::min(start + batch, train.size())));
      loss_and_grad(model, gather_rows(x, rows), gather(y, rows), g);
      vel.w1 = params.momentum * vel.w1 - params.learning_rate * g.w1;
      vel.b1 = params.momentum * vel.b1 - params.learning_rate * g.b1;
      vel.w2 = params.momentum * vel.w2 - params.learning_rate * g.w2;
      vel.b2 = params.momentum * vel.b2 - params.learning_rate * g.b2;
      model.w1 += vel.w1;
      model.b1 += vel.b1;
      model.w2 += vel.w2;
      model.b2 += vel.b2;
    }
    const double train_loss = mean_loss(forward(model, x).logit, y);
    model.info.history.push_back(train_loss);
    model.info.iterations = epoch;
    if (val.empty()) continue;
    const double val_loss = mean_loss(forward(model, x_val).logit, y_val);
    if (val_loss < best_val) {
      best_val = val_loss;
      best.w1 = model.w1;
      best.b1 = model.b1;
      best.w2 = model.w2;
      best.b2 = model.b2;
      since_best = 0;
    } else if (++since_best >= params.patience) {
      model.info.converged = true;
      break;
    }
  }
  if (!val.empty()) {
    model.w1 = best.w1;
    model.b1 = best.b1;
    model.w2 = best.w2;
    model.b2 = best.b2;
  }
  model.info.objective = mean_loss(forward(model, x).logit, y);
  return model;
}

}  // namespace trustforge
