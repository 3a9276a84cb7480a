// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "trustforge/eval.hpp"

#include <Eigen/Eigenvalues>
#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "trustforge/error.hpp"
#include "trustforge/rng.hpp"
#include "trustforge/text.hpp"

namespace trustforge {

namespace {

constexpr std::uint64_t kFoldStream = 0x666f6c64;   // "fold"
constexpr std::uint64_t kMaskStream = 0x6d61736b;   // "mask"
constexpr std::uint64_t kModelStream = 0x6d6f646c;  // "modl"

void check_folds(int folds) {
  if (folds < 2) throw ConfigError("folds must be at least 2, got " + std::to_string(folds));
}

std::vector<int> distinct(const Eigen::VectorXi& v) {
  std::set<int> s(v.data(), v.data() + v.size());
  return {s.begin(), s.end()};
}

Eigen::VectorXi gather(const Eigen::VectorXi& v, const std::vector<Eigen::Index>& rows) {
  Eigen::VectorXi out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(rows[i]);
  return out;
}

Eigen::MatrixXd gather(const Eigen::MatrixXd& x, const std::vector<Eigen::Index>& rows) {
  return x(rows, Eigen::all);
}

}  // namespace

std::vector<Eigen::Index> FoldPlan::test_rows(int fold) const {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == fold) out.push_back(static_cast<Eigen::Index>(i));
  return out;
}

std::vector<Eigen::Index> FoldPlan::train_rows(int fold) const {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != fold) out.push_back(static_cast<Eigen::Index>(i));
  return out;
}

FoldPlan stratified_kfold(const Eigen::VectorXi& labels, int folds, std::uint64_t seed) {
  check_folds(folds);
  FoldPlan plan;
  plan.folds = folds;
  plan.seed = seed;
  plan.fold_of.assign(static_cast<std::size_t>(labels.size()), -1);
  int offset = 0;
  for (int c : distinct(labels)) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < labels.size(); ++i)
      if (labels(i) == c) rows.push_back(i);
    if (rows.size() < static_cast<std::size_t>(folds))
      throw InsufficientDataError("stratified_kfold: class " + std::to_string(c) + " has " +
                                  std::to_string(rows.size()) + " rows, fewer than " + std::to_string(folds) +
                                  " folds");
    Rng rng(derive_seed({seed, static_cast<std::uint64_t>(c)}));
    std::shuffle(rows.begin(), rows.end(), rng);
    for (Eigen::Index r : rows) {
      plan.fold_of[static_cast<std::size_t>(r)] = offset;
      offset = (offset + 1) % folds;
    }
  }
  return plan;
}

FoldPlan grouped_kfold(const Eigen::VectorXi& labels, const std::vector<int>& groups, int folds,
                       std::uint64_t seed) {
  check_folds(folds);
  if (groups.size() != static_cast<std::size_t>(labels.size()))
    throw ConfigError("grouped_kfold: group/label count mismatch");
  std::set<int> unique(groups.begin(), groups.end());
  std::vector<int> order(unique.begin(), unique.end());
  if (order.size() < static_cast<std::size_t>(folds))
    throw InsufficientDataError("grouped_kfold: " + std::to_string(order.size()) + " groups, fewer than " +
                                std::to_string(folds) + " folds");
  Rng rng(derive_seed({seed, kFoldStream}));
  std::shuffle(order.begin(), order.end(), rng);
  std::map<int, int> fold_of_group;
  for (std::size_t i = 0; i < order.size(); ++i) fold_of_group[order[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));

  FoldPlan plan;
  plan.folds = folds;
  plan.seed = seed;
  plan.grouped_by_day = true;
  for (int g : groups) plan.fold_of.push_back(fold_of_group.at(g));
  const auto classes = distinct(labels);
  for (int f = 0; f < folds; ++f) {
    const auto train = distinct(gather(labels, plan.train_rows(f)));
    if (train.size() != classes.size())
      throw InsufficientDataError("grouped_kfold: training split of fold " + std::to_string(f) +
                                  " misses a class");
  }
  return plan;
}

double accuracy(const Eigen::VectorXi& predicted, const Eigen::VectorXi& truth) {
  if (predicted.size() != truth.size())
    throw ConfigError("accuracy: " + std::to_string(predicted.size()) + " predictions for " +
                      std::to_string(truth.size()) + " labels");
  if (truth.size() == 0) throw ConfigError("accuracy: empty input");
  const auto correct = (predicted.array() == truth.array()).count();
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

std::vector<bool> stratified_label_mask(const Eigen::VectorXi& labels, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("labeled fraction must lie in (0, 1]");
  std::vector<bool> mask(static_cast<std::size_t>(labels.size()), false);
  for (int c : distinct(labels)) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < labels.size(); ++i)
      if (labels(i) == c) rows.push_back(i);
    Rng rng(derive_seed({seed, static_cast<std::uint64_t>(c)}));
    std::shuffle(rows.begin(), rows.end(), rng);
    const auto keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(rows.size()))));
    for (std::size_t i = 0; i < keep && i < rows.size(); ++i) mask[static_cast<std::size_t>(rows[i])] = true;
  }
  return mask;
}

namespace {

double fit_and_score(const Eigen::MatrixXd& xtr, const Eigen::VectorXi& ytr, const Eigen::MatrixXd& xte,
                     const Eigen::VectorXi& yte, const ModelSpec& spec) {
  const Standardizer z = Standardizer::fit(xtr);
  const Eigen::MatrixXd ztr = z.transform(xtr);
  std::vector<bool> labeled;
  if (spec.kind == ModelKind::LabelProp)
    labeled = stratified_label_mask(ytr, spec.labelprop.labeled_fraction, derive_seed({spec.seed, kMaskStream}));
  const TrainedModel model = fit_model(spec, ztr, ytr, labeled);
  return accuracy(classify(model, z.transform(xte)), yte);
}

}  // namespace

CvResult run_cv(const Eigen::MatrixXd& x, const Eigen::VectorXi& labels, const ModelSpec& spec,
                const FoldPlan& plan) {
  if (x.rows() != labels.size() || plan.fold_of.size() != static_cast<std::size_t>(labels.size()))
    throw ConfigError("run_cv: rows, labels and fold plan disagree in length");
  CvResult out;
  for (int f = 0; f < plan.folds; ++f) {
    const auto train = plan.train_rows(f);
    const auto test = plan.test_rows(f);
    if (test.empty()) continue;
    ModelSpec fold_spec = spec;
    fold_spec.seed = derive_seed({spec.seed, static_cast<std::uint64_t>(f)});
    out.fold_accuracies.push_back(
        fit_and_score(gather(x, train), gather(labels, train), gather(x, test), gather(labels, test), fold_spec));
  }
  if (out.fold_accuracies.empty()) throw ConfigError("run_cv: no non-empty fold");
  out.mean = std::accumulate(out.fold_accuracies.begin(), out.fold_accuracies.end(), 0.0) /
             static_cast<double>(out.fold_accuracies.size());
  return out;
}

double cross_dataset_eval(const FeatureTable& train, const FeatureTable& test, const ModelSpec& spec) {
  if (train.kind != test.kind)
    throw ConfigError(std::string("cross_dataset_eval: train features are '") + std::string(to_string(train.kind)) +
                      "', test features are '" + std::string(to_string(test.kind)) + "'");
  if (train.dims() != test.dims())
    throw ConfigError("cross_dataset_eval: feature width " + std::to_string(train.dims()) + " vs " +
                      std::to_string(test.dims()));
  return fit_and_score(train.features, train.labels, test.features, test.labels, spec);
}

RealizationStats summarize(const std::vector<double>& values) {
  RealizationStats s;
  s.per_realization = values;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  // Shifted by the first value so that equal inputs give exactly zero.
  double shift = 0.0;
  for (double v : values) shift += v - values.front();
  shift /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - values.front() - shift) * (v - values.front() - shift);
  s.std = std::sqrt(ss / n);
  return s;
}

namespace {

FoldPlan make_plan(const FeatureTable& table, int folds, bool group_by_day, std::uint64_t seed) {
  const std::uint64_t fold_seed = derive_seed({seed, kFoldStream});
  if (!group_by_day) return stratified_kfold(table.labels, folds, fold_seed);
  std::vector<int> days;
  days.reserve(table.keys.size());
  for (const auto& k : table.keys) days.push_back(k.day_index);
  return grouped_kfold(table.labels, days, folds, fold_seed);
}

ModelSpec seeded(ModelSpec spec, std::uint64_t seed) {
  spec.seed = derive_seed({seed, kModelStream, static_cast<std::uint64_t>(spec.kind)});
  return spec;
}

}  // namespace

RealizationStats repeat_realizations(const std::vector<Instance>& base, const NeighborMap& neighbors,
                                     const StatsMap& stats, const PipelineSpec& spec, int n) {
  if (n < 2) throw ConfigError("repeat_realizations: need at least 2 realizations");
  std::vector<double> acc;
  for (int r = 0; r < n; ++r) {
    const auto data = augment(base, spec.method, spec.synth, spec.base_seed + static_cast<std::uint64_t>(r));
    const auto table = build_features(data.instances, neighbors, stats, spec.kind, r, spec.features);
    const auto plan = make_plan(table, spec.folds, spec.group_by_day, spec.base_seed);
    acc.push_back(run_cv(table.features, table.labels, seeded(spec.model, spec.base_seed), plan).mean);
  }
  return summarize(acc);
}

Pca2d pca2d(const Eigen::MatrixXd& x) {
  if (x.rows() < 2) throw InsufficientDataError("pca2d: need at least 2 rows");
  const Eigen::MatrixXd z = Standardizer::fit(x).transform(x);
  const Eigen::MatrixXd cov = (z.transpose() * z) / static_cast<double>(z.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::Index d = cov.rows();
  const double total = cov.trace();

  Pca2d out;
  out.axes = Eigen::MatrixXd::Zero(d, 2);
  out.explained.setZero();
  for (int a = 0; a < 2 && a < d; ++a) {
    const Eigen::Index idx = d - 1 - a;
    Eigen::VectorXd axis = eig.eigenvectors().col(idx);
    Eigen::Index arg = 0;
    axis.cwiseAbs().maxCoeff(&arg);
    if (axis(arg) < 0.0) axis = -axis;
    out.axes.col(a) = axis;
    double lambda = std::max(0.0, eig.eigenvalues()(idx));
    if (total > 0.0 && lambda <= 1e-12 * total) lambda = 0.0;
    out.explained(a) = total > 0.0 ? lambda / total : 0.0;
  }
  out.projection = z * out.axes;
  return out;
}

SynthMethod table_synth_method(const FeatureTable& table) {
  bool rwi = false;
  bool drift = false;
  for (auto s : table.sources) {
    rwi = rwi || s == TrustSource::RWI;
    drift = drift || s == TrustSource::Drift;
  }
  if (rwi && drift) throw ConfigError("feature table mixes RWI and Drift rows");
  if (!rwi && !drift) throw ConfigError("feature table has no synthesized rows");
  return rwi ? SynthMethod::RWI : SynthMethod::Drift;
}

const Cell* EvalReport::find(const CellKey& key) const {
  for (const auto& c : cells)
    if (c.key == key) return &c;
  return nullptr;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = n;
  std::exception_ptr failure;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < workers; ++t) threads.emplace_back(work);
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

struct Task {
  std::size_t cell = 0;
  int realization = 0;
  const FeatureTable* train = nullptr;
  const FeatureTable* test = nullptr;  // null for cross-validation
  ModelSpec spec;
};

std::string model_echo(const ModelSpec& s) {
  using text::format_double;
  switch (s.kind) {
    case ModelKind::KMeans:
      return "k=" + std::to_string(s.kmeans.k) + " max_iter=" + std::to_string(s.kmeans.max_iter) +
             " tol=" + format_double(s.kmeans.tol);
    case ModelKind::GMM:
      return "k=" + std::to_string(s.gmm.k) + " max_iter=" + std::to_string(s.gmm.max_iter) +
             " tol=" + format_double(s.gmm.tol) + " ridge=" + format_double(s.gmm.ridge);
    case ModelKind::LinearSVM:
      return "C=" + format_double(s.svm.C) + " epochs=" + std::to_string(s.svm.epochs);
    case ModelKind::MLP:
      return "hidden=" + std::to_string(s.mlp.hidden) + " max_epochs=" + std::to_string(s.mlp.max_epochs) +
             " learning_rate=" + format_double(s.mlp.learning_rate) + " momentum=" + format_double(s.mlp.momentum) +
             " batch_size=" + std::to_string(s.mlp.batch_size) +
             " validation_fraction=" + format_double(s.mlp.validation_fraction) +
             " patience=" + std::to_string(s.mlp.patience);
    case ModelKind::LabelProp:
      return "k_graph=" + std::to_string(s.labelprop.k_graph) + " alpha=" + format_double(s.labelprop.alpha) +
             " max_iter=" + std::to_string(s.labelprop.max_iter) + " tol=" + format_double(s.labelprop.tol) +
             " labeled_fraction=" + format_double(s.labelprop.labeled_fraction);
    case ModelKind::SvmViaKMeans:
      return "k=" + std::to_string(s.kmeans.k) + " C=" + format_double(s.svm.C) +
             " epochs=" + std::to_string(s.svm.epochs);
  }
  return {};
}

}  // namespace

EvalReport evaluate(const std::vector<FeatureTable>& tables, const EvalConfig& config,
                    std::vector<std::pair<std::string, std::string>> config_echo) {
  check_folds(config.folds);
  if (config.models.empty() && config.cross.empty()) throw ConfigError("evaluate: no models requested");

  // (kind, method) -> realization -> table
  std::map<std::pair<FeatureKind, SynthMethod>, std::map<int, const FeatureTable*>> groups;
  for (const auto& t : tables) {
    if (t.rows() == 0) throw InsufficientDataError("evaluate: empty feature table");
    std::set<int> rs(t.realizations.begin(), t.realizations.end());
    if (rs.size() != 1) throw ConfigError("evaluate: each feature table must hold exactly one realization");
    auto& slot = groups[{t.kind, table_synth_method(t)}][*rs.begin()];
    if (slot != nullptr)
      throw ConfigError("evaluate: duplicate table for realization " + std::to_string(*rs.begin()));
    slot = &t;
  }
  if (groups.empty()) throw InsufficientDataError("evaluate: no feature tables");

  EvalReport report;
  std::vector<Task> tasks;
  auto add_cell = [&](CellKey key) {
    report.cells.push_back(Cell{std::move(key), {}, {}, 0.0, std::nullopt, {}});
    return report.cells.size() - 1;
  };

  for (const auto& [group, by_r] : groups) {
    const auto [kind, method] = group;
    for (const auto& spec : config.models) {
      const std::size_t cell = add_cell(
          {std::string(to_string(spec.kind)), std::string(to_string(kind)), std::string(to_string(method)),
           std::string(to_string(method))});
      for (const auto& [r, table] : by_r)
        tasks.push_back(Task{cell, r, table, nullptr, seeded(spec, config.seed)});
    }
  }

  for (const auto& [a, b] : config.cross) {
    bool any = false;
    for (FeatureKind kind : {FeatureKind::Correlation, FeatureKind::DST}) {
      const auto ia = groups.find({kind, a});
      const auto ib = groups.find({kind, b});
      if (ia == groups.end() || ib == groups.end()) continue;
      any = true;
      for (ModelKind mk : config.cross_models) {
        ModelSpec spec;
        spec.kind = mk;
        for (const auto& s : config.models)
          if (s.kind == mk) spec = s;
        const std::size_t cell = add_cell({std::string(to_string(mk)), std::string(to_string(kind)),
                                           std::string(to_string(a)), std::string(to_string(b))});
        for (const auto& [r, table] : ia->second) {
          const auto other = ib->second.find(r);
          if (other == ib->second.end()) continue;
          tasks.push_back(Task{cell, r, table, other->second, seeded(spec, config.seed)});
        }
      }
    }
    if (!any)
      throw ConfigError(std::string("evaluate: cross run ") + std::string(to_string(a)) + ":" +
                        std::string(to_string(b)) + " has no matching feature tables");
  }

  std::vector<double> results(tasks.size(), 0.0);
  parallel_for(tasks.size(), config.jobs, [&](std::size_t i) {
    const Task& t = tasks[i];
    if (t.test != nullptr) {
      results[i] = cross_dataset_eval(*t.train, *t.test, t.spec);
    } else {
      const auto plan = make_plan(*t.train, config.folds, config.group_by_day, config.seed);
      results[i] = run_cv(t.train->features, t.train->labels, t.spec, plan).mean;
    }
  });

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    Cell& c = report.cells[tasks[i].cell];
    c.realizations.push_back(tasks[i].realization);
    c.accuracies.push_back(results[i]);
  }
  std::erase_if(report.cells, [](const Cell& c) { return c.accuracies.empty(); });
  for (Cell& c : report.cells) {
    const auto s = summarize(c.accuracies);
    c.mean = s.mean;
    if (c.accuracies.size() >= 2) c.std = s.std;
  }

  config_echo.emplace_back("eval.folds", std::to_string(config.folds));
  config_echo.emplace_back("eval.fold_mode", config.group_by_day ? "group-by-day" : "stratified-rows");
  config_echo.emplace_back("eval.seed", std::to_string(config.seed));
  config_echo.emplace_back("eval.std", "population");
  for (const auto& s : config.models)
    config_echo.emplace_back("model." + std::string(to_string(s.kind)), model_echo(s));
  std::string cross;
  for (const auto& [a, b] : config.cross)
    cross += (cross.empty() ? "" : ",") + std::string(to_string(a)) + ":" + std::string(to_string(b));
  config_echo.emplace_back("eval.cross", cross);
  report.config = std::move(config_echo);

  check_targets(report);
  return report;
}

// Targets ---------------------------------------------------------------------

namespace {

struct TargetContext {
  EvalReport& report;

  const Cell* cv(std::string_view model, std::string_view kind, std::string_view synth) const {
    return report.find({std::string(model), std::string(kind), std::string(synth), std::string(synth)});
  }

  void flag(const Cell* c, int id) {
    if (c == nullptr) return;
    for (auto& cell : report.cells)
      if (cell.key == c->key) {
        const std::string tag = "target-" + std::to_string(id);
        if (std::find(cell.flags.begin(), cell.flags.end(), tag) == cell.flags.end()) cell.flags.push_back(tag);
      }
  }
};

std::string pct(double v) { return text::format_double(std::round(v * 10000.0) / 10000.0); }

const Cell* best_supervised(const TargetContext& ctx) {
  const Cell* best = nullptr;
  for (const char* m : {"svm", "mlp"}) {
    const Cell* c = ctx.cv(m, "corr", "rwi");
    if (c && (!best || c->mean > best->mean)) best = c;
  }
  return best;
}

}  // namespace

void check_targets(EvalReport& report) {
  for (auto& c : report.cells) std::erase_if(c.flags, [](const std::string& f) { return f.starts_with("target-"); });
  report.targets.clear();
  TargetContext ctx{report};
  auto add = [&](int id, std::string description) -> TargetCheck& {
    report.targets.push_back(TargetCheck{id, std::move(description), false, false, "required cells missing"});
    return report.targets.back();
  };

  {
    auto& t = add(5, "MLP on RWI + corr >= 0.85 and SVM within 0.05 of MLP");
    const Cell* mlp = ctx.cv("mlp", "corr", "rwi");
    const Cell* svm = ctx.cv("svm", "corr", "rwi");
    if (mlp && svm) {
      t.evaluated = true;
      t.passed = mlp->mean >= 0.85 && std::abs(svm->mean - mlp->mean) <= 0.05;
      t.detail = "mlp=" + pct(mlp->mean) + " svm=" + pct(svm->mean);
      if (!t.passed) { ctx.flag(mlp, 5); ctx.flag(svm, 5); }
    }
  }
  {
    auto& t = add(6, "|svm-via-kmeans - kmeans| <= 0.02 in every feature/synth cell");
    t.passed = true;
    std::string detail;
    for (const char* kind : {"corr", "dst"})
      for (const char* synth : {"rwi", "drift"}) {
        const Cell* a = ctx.cv("svm-via-kmeans", kind, synth);
        const Cell* b = ctx.cv("kmeans", kind, synth);
        if (!a || !b) continue;
        t.evaluated = true;
        const double d = std::abs(a->mean - b->mean);
        detail += std::string(detail.empty() ? "" : " ") + kind + "/" + synth + "=" + pct(d);
        if (d > 0.02) { t.passed = false; ctx.flag(a, 6); ctx.flag(b, 6); }
      }
    if (t.evaluated) t.detail = detail; else t.passed = false;
  }
  {
    auto& t = add(7, "k-means and GMM at least 0.10 below the best supervised model on RWI + corr");
    const Cell* best = best_supervised(ctx);
    const Cell* km = ctx.cv("kmeans", "corr", "rwi");
    const Cell* gmm = ctx.cv("gmm", "corr", "rwi");
    if (best && km && gmm) {
      t.evaluated = true;
      t.passed = km->mean <= best->mean - 0.10 && gmm->mean <= best->mean - 0.10;
      t.detail = "best=" + pct(best->mean) + " kmeans=" + pct(km->mean) + " gmm=" + pct(gmm->mean);
      if (!t.passed) { ctx.flag(km, 7); ctx.flag(gmm, 7); }
    }
  }
  {
    auto& t = add(8, "corr >= dst in every matched (model, synth) cell");
    t.passed = true;
    std::string failing;
    for (const auto& c : report.cells) {
      if (c.key.features != "corr" || c.key.train_synth != c.key.test_synth) continue;
      const Cell* d = ctx.cv(c.key.model, "dst", c.key.train_synth);
      if (!d) continue;
      t.evaluated = true;
      if (c.mean < d->mean) {
        t.passed = false;
        failing += std::string(failing.empty() ? "" : " ") + c.key.model + "/" + c.key.train_synth;
        ctx.flag(&c, 8);
        ctx.flag(d, 8);
      }
    }
    if (t.evaluated) t.detail = failing.empty() ? "all matched cells hold" : "failing: " + failing;
    else t.passed = false;
  }
  {
    auto& t = add(9, "cross rwi->drift beats drift->rwi for svm, mlp, labelprop on corr");
    const std::string models[] = {"svm", "mlp", "labelprop"};
    t.passed = true;
    t.evaluated = true;
    std::string detail;
    for (const auto& m : models) {
      const Cell* fwd = report.find({m, "corr", "rwi", "drift"});
      const Cell* bwd = report.find({m, "corr", "drift", "rwi"});
      if (!fwd || !bwd) {
        t.evaluated = false;
        break;
      }
      detail += (detail.empty() ? "" : " ") + m + "=" + pct(fwd->mean) + "/" + pct(bwd->mean);
      if (!(fwd->mean > bwd->mean)) { t.passed = false; ctx.flag(fwd, 9); ctx.flag(bwd, 9); }
    }
    if (t.evaluated) t.detail = detail; else { t.passed = false; t.detail = "required cells missing"; }
  }
  {
    auto& t = add(10, "std over realizations <= 0.02 in every cell");
    t.passed = true;
    double worst = 0.0;
    std::size_t min_r = 0;
    for (const auto& c : report.cells) {
      if (!c.std) continue;
      min_r = t.evaluated ? std::min(min_r, c.accuracies.size()) : c.accuracies.size();
      t.evaluated = true;
      worst = std::max(worst, *c.std);
      if (*c.std > 0.02) { t.passed = false; ctx.flag(&c, 10); }
    }
    if (t.evaluated) t.detail = "max std=" + pct(worst) + " realizations>=" + std::to_string(min_r);
    else { t.passed = false; t.detail = "fewer than 2 realizations"; }
  }
  {
    auto& t = add(11, "label propagation within 0.05 of the best supervised model on RWI + corr");
    const Cell* best = best_supervised(ctx);
    const Cell* lp = ctx.cv("labelprop", "corr", "rwi");
    if (best && lp) {
      t.evaluated = true;
      t.passed = lp->mean >= best->mean - 0.05;
      t.detail = "best=" + pct(best->mean) + " labelprop=" + pct(lp->mean);
      if (!t.passed) ctx.flag(lp, 11);
    }
  }
}

// Serialization -----------------------------------------------------------------

void write_report(std::ostream& out, const EvalReport& report) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema_version"] = report.schema_version;
  ordered_json cfg = ordered_json::object();
  for (const auto& [k, v] : report.config) cfg[k] = v;
  j["config"] = cfg;
  ordered_json cells = ordered_json::array();
  for (const auto& c : report.cells) {
    ordered_json jc;
    jc["model"] = c.key.model;
    jc["features"] = c.key.features;
    jc["train_synth"] = c.key.train_synth;
    jc["test_synth"] = c.key.test_synth;
    jc["realizations"] = c.realizations;
    jc["accuracies"] = c.accuracies;
    jc["mean"] = c.mean;
    if (c.std) jc["std"] = *c.std;
    jc["flags"] = c.flags;
    cells.push_back(std::move(jc));
  }
  j["cells"] = std::move(cells);
  ordered_json targets = ordered_json::array();
  for (const auto& t : report.targets)
    targets.push_back(ordered_json{{"id", t.id},
                                   {"description", t.description},
                                   {"evaluated", t.evaluated},
                                   {"passed", t.passed},
                                   {"detail", t.detail}});
  j["targets"] = std::move(targets);
  out << j.dump(2) << '\n';
}

EvalReport read_report(std::istream& in) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(in);
    EvalReport r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != 1)
      throw FormatError("report: unsupported schema_version " + std::to_string(r.schema_version));
    for (const auto& [k, v] : j.at("config").items()) r.config.emplace_back(k, v.get<std::string>());
    for (const auto& jc : j.at("cells")) {
      Cell c;
      c.key = {jc.at("model").get<std::string>(), jc.at("features").get<std::string>(),
               jc.at("train_synth").get<std::string>(), jc.at("test_synth").get<std::string>()};
      c.realizations = jc.at("realizations").get<std::vector<int>>();
      c.accuracies = jc.at("accuracies").get<std::vector<double>>();
      c.mean = jc.at("mean").get<double>();
      if (jc.contains("std")) c.std = jc.at("std").get<double>();
      c.flags = jc.at("flags").get<std::vector<std::string>>();
      r.cells.push_back(std::move(c));
    }
    for (const auto& jt : j.at("targets"))
      r.targets.push_back(TargetCheck{jt.at("id").get<int>(), jt.at("description").get<std::string>(),
                                      jt.at("evaluated").get<bool>(), jt.at("passed").get<bool>(),
                                      jt.at("detail").get<std::string>()});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
}

void write_plot_data(std::ostream& out, const EvalReport& report) {
  out << "model,features,train_synth,test_synth,realization,accuracy\n";
  for (const auto& c : report.cells)
    for (std::size_t i = 0; i < c.accuracies.size(); ++i)
      out << c.key.model << ',' << c.key.features << ',' << c.key.train_synth << ',' << c.key.test_synth << ','
          << c.realizations[i] << ',' << text::format_double(c.accuracies[i]) << '\n';
}

void write_summary(std::ostream& out, const EvalReport& report) {
  out << "model,features,train_synth,test_synth,realizations,mean,std\n";
  for (const auto& c : report.cells)
    out << c.key.model << ',' << c.key.features << ',' << c.key.train_synth << ',' << c.key.test_synth << ','
        << c.accuracies.size() << ',' << text::format_double(c.mean) << ','
        << (c.std ? text::format_double(*c.std) : std::string()) << '\n';
}

}  // namespace trustforge
