// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "trustforge/model_io.hpp"

#include <charconv>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "trustforge/error.hpp"
#include "trustforge/text.hpp"

namespace trustforge {
namespace {

class RecordWriter {
 public:
  explicit RecordWriter(std::ostream& out) : out_(out) {}

  void scalar(std::string_view name, double v) { out_ << "scalar " << name << ' ' << text::format_double(v) << '\n'; }
  void scalar(std::string_view name, long long v) { out_ << "scalar " << name << ' ' << v << '\n'; }
  void scalar_u64(std::string_view name, std::uint64_t v) { out_ << "scalar " << name << ' ' << v << '\n'; }

  void array(std::string_view name, const Eigen::MatrixXd& m) {
    out_ << "array " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) out_ << (c ? " " : "") << text::format_double(m(r, c));
      out_ << '\n';
    }
  }

  void info(std::string_view prefix, const FitInfo& info) {
    scalar(std::string(prefix) + "iterations", static_cast<long long>(info.iterations));
    scalar(std::string(prefix) + "converged", static_cast<long long>(info.converged ? 1 : 0));
    scalar(std::string(prefix) + "objective", info.objective);
    array(std::string(prefix) + "history",
          Eigen::Map<const Eigen::VectorXd>(info.history.data(), static_cast<Eigen::Index>(info.history.size())));
  }

 private:
  std::ostream& out_;
};

struct Record {
  std::map<std::string, std::string> scalars;
  std::map<std::string, Eigen::MatrixXd> arrays;

  const std::string& raw(const std::string& name) const {
    const auto it = scalars.find(name);
    if (it == scalars.end()) throw FormatError("model file: missing scalar '" + name + "'");
    return it->second;
  }
  double real(const std::string& name) const {
    const auto v = text::parse_double(raw(name));
    if (!v) throw FormatError("model file: bad real '" + name + "'");
    return *v;
  }
  long long integer(const std::string& name) const {
    const auto v = text::parse_int(raw(name));
    if (!v) throw FormatError("model file: bad integer '" + name + "'");
    return *v;
  }
  std::uint64_t u64(const std::string& name) const {
    const auto& s = raw(name);
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw FormatError("model file: bad seed");
    return v;
  }
  const Eigen::MatrixXd& array(const std::string& name) const {
    const auto it = arrays.find(name);
    if (it == arrays.end()) throw FormatError("model file: missing array '" + name + "'");
    return it->second;
  }
  FitInfo info(const std::string& prefix) const {
    FitInfo fi;
    fi.iterations = static_cast<int>(integer(prefix + "iterations"));
    fi.converged = integer(prefix + "converged") != 0;
    fi.objective = real(prefix + "objective");
    const auto& h = array(prefix + "history");
    fi.history.assign(h.data(), h.data() + h.size());
    return fi;
  }
  ClusterMap cluster_map(const std::string& name) const {
    const auto& m = array(name);
    if (m.size() != 2) throw FormatError("model file: cluster map needs 2 entries");
    return {static_cast<int>(m(0)), static_cast<int>(m(1))};
  }
};

Eigen::MatrixXd map_array(const ClusterMap& m) {
  Eigen::MatrixXd a(1, 2);
  a << m[0], m[1];
  return a;
}

void write_spec(RecordWriter& w, const ModelSpec& s) {
  w.scalar_u64("seed", s.seed);
  switch (s.kind) {
    case ModelKind::KMeans:
      w.scalar("k", static_cast<long long>(s.kmeans.k));
      w.scalar("max_iter", static_cast<long long>(s.kmeans.max_iter));
      w.scalar("tol", s.kmeans.tol);
      break;
    case ModelKind::GMM:
      w.scalar("k", static_cast<long long>(s.gmm.k));
      w.scalar("max_iter", static_cast<long long>(s.gmm.max_iter));
      w.scalar("tol", s.gmm.tol);
      w.scalar("ridge", s.gmm.ridge);
      break;
    case ModelKind::LinearSVM:
      w.scalar("C", s.svm.C);
      w.scalar("epochs", static_cast<long long>(s.svm.epochs));
      break;
    case ModelKind::MLP:
      w.scalar("hidden", static_cast<long long>(s.mlp.hidden));
      w.scalar("max_epochs", static_cast<long long>(s.mlp.max_epochs));
      w.scalar("learning_rate", s.mlp.learning_rate);
      w.scalar("momentum", s.mlp.momentum);
      w.scalar("batch_size", static_cast<long long>(s.mlp.batch_size));
      w.scalar("validation_fraction", s.mlp.validation_fraction);
      w.scalar("patience", static_cast<long long>(s.mlp.patience));
      break;
    case ModelKind::LabelProp:
      w.scalar("k_graph", static_cast<long long>(s.labelprop.k_graph));
      w.scalar("alpha", s.labelprop.alpha);
      w.scalar("max_iter", static_cast<long long>(s.labelprop.max_iter));
      w.scalar("tol", s.labelprop.tol);
      w.scalar("labeled_fraction", s.labelprop.labeled_fraction);
      break;
    case ModelKind::SvmViaKMeans:
      w.scalar("k", static_cast<long long>(s.kmeans.k));
      w.scalar("max_iter", static_cast<long long>(s.kmeans.max_iter));
      w.scalar("tol", s.kmeans.tol);
      w.scalar("C", s.svm.C);
      w.scalar("epochs", static_cast<long long>(s.svm.epochs));
      break;
  }
}

ModelSpec read_spec(const Record& r, ModelKind kind) {
  ModelSpec s;
  s.kind = kind;
  s.seed = r.u64("seed");
  switch (kind) {
    case ModelKind::KMeans:
    case ModelKind::SvmViaKMeans:
      s.kmeans = {static_cast<int>(r.integer("k")), static_cast<int>(r.integer("max_iter")), r.real("tol")};
      if (kind == ModelKind::SvmViaKMeans) s.svm = {r.real("C"), static_cast<int>(r.integer("epochs"))};
      break;
    case ModelKind::GMM:
      s.gmm = {static_cast<int>(r.integer("k")), static_cast<int>(r.integer("max_iter")), r.real("tol"),
               r.real("ridge")};
      break;
    case ModelKind::LinearSVM:
      s.svm = {r.real("C"), static_cast<int>(r.integer("epochs"))};
      break;
    case ModelKind::MLP:
      s.mlp = {static_cast<int>(r.integer("hidden")),     static_cast<int>(r.integer("max_epochs")),
               r.real("learning_rate"),                    r.real("momentum"),
               static_cast<int>(r.integer("batch_size")), r.real("validation_fraction"),
               static_cast<int>(r.integer("patience"))};
      break;
    case ModelKind::LabelProp:
      s.labelprop = {static_cast<int>(r.integer("k_graph")), r.real("alpha"), static_cast<int>(r.integer("max_iter")),
                     r.real("tol"), r.real("labeled_fraction")};
      break;
  }
  return s;
}

}  // namespace

void save_model(std::ostream& out, const TrainedModel& model) {
  RecordWriter w(out);
  out << "trustforge-model " << kModelFormatVersion << '\n';
  out << "kind " << to_string(model.kind()) << '\n';
  write_spec(w, model.spec);
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, KMeansModel>) {
          w.array("centroids", m.centroids);
          w.array("cluster_to_class", map_array(m.cluster_to_class));
          w.info("", m.info);
        } else if constexpr (std::is_same_v<T, GmmModel>) {
          w.scalar("model_ridge", m.ridge);
          w.array("weights", m.weights);
          w.array("means", m.means);
          for (std::size_t c = 0; c < m.covariances.size(); ++c) w.array("cov" + std::to_string(c), m.covariances[c]);
          w.array("cluster_to_class", map_array(m.cluster_to_class));
          w.info("", m.info);
        } else if constexpr (std::is_same_v<T, SvmModel>) {
          w.array("weights", m.weights);
          w.scalar("bias", m.bias);
          w.info("", m.info);
        } else if constexpr (std::is_same_v<T, MlpModel>) {
          w.array("w1", m.w1);
          w.array("b1", m.b1);
          w.array("w2", m.w2);
          w.scalar("b2", m.b2);
          w.info("", m.info);
        } else if constexpr (std::is_same_v<T, LabelPropModel>) {
          w.array("train_x", m.train_x);
          w.array("scores", m.scores);
          w.array("transductive", m.transductive.template cast<double>());
          w.scalar("bandwidth", m.bandwidth);
          w.scalar("graph_k", static_cast<long long>(m.k_graph));
          w.info("", m.info);
        } else {
          w.array("centroids", m.kmeans.centroids);
          w.array("cluster_to_class", map_array(m.kmeans.cluster_to_class));
          w.info("kmeans_", m.kmeans.info);
          w.array("weights", m.svm.weights);
          w.scalar("bias", m.svm.bias);
          w.info("svm_", m.svm.info);
        }
      },
      model.params);
  out << "end\n";
  if (!out) throw InputError("failed to write model");
}

TrainedModel load_model(std::istream& in) {
  if (!in.good()) throw InputError("model stream is not readable");
  std::string line;
  if (!std::getline(in, line)) throw FormatError("model file: empty");
  const auto head = text::split_whitespace(line);
  if (head.size() != 2 || head[0] != "trustforge-model") throw FormatError("model file: bad magic line");
  if (text::parse_int(head[1]) != kModelFormatVersion) throw FormatError("model file: unsupported version");
  if (!std::getline(in, line)) throw FormatError("model file: missing kind");
  const auto kind_line = text::split_whitespace(line);
  if (kind_line.size() != 2 || kind_line[0] != "kind") throw FormatError("model file: missing kind");
  const ModelKind kind = parse_model_kind(kind_line[1]);

  Record rec;
  bool ended = false;
  while (std::getline(in, line)) {
    const auto f = text::split_whitespace(line);
    if (f.empty()) continue;
    if (f[0] == "end") {
      ended = true;
      break;
    }
    if (f[0] == "scalar" && f.size() == 3) {
      rec.scalars[std::string(f[1])] = std::string(f[2]);
    } else if (f[0] == "array" && f.size() == 4) {
      std::string name(f[1]);
      const auto rows = text::parse_int(f[2]);
      const auto cols = text::parse_int(f[3]);
      if (!rows || !cols || *rows < 0 || *cols < 0) throw FormatError("model file: bad array shape");
      Eigen::MatrixXd m(*rows, *cols);
      for (long long r = 0; r < *rows; ++r) {
        if (!std::getline(in, line)) throw FormatError("model file: truncated array");
        const auto vals = text::split_whitespace(line);
        if (static_cast<long long>(vals.size()) != *cols) throw FormatError("model file: bad array row");
        for (long long c = 0; c < *cols; ++c) {
          const auto v = text::parse_double(vals[static_cast<std::size_t>(c)]);
          if (!v) throw FormatError("model file: bad array value");
          m(r, c) = *v;
        }
      }
      rec.arrays[std::move(name)] = std::move(m);
    } else {
      throw FormatError("model file: unexpected line '" + line + "'");
    }
  }
  if (!ended) throw FormatError("model file: missing end marker");

  TrainedModel model{read_spec(rec, kind), KMeansModel{}};
  switch (kind) {
    case ModelKind::KMeans: {
      KMeansModel m;
      m.centroids = rec.array("centroids");
      m.cluster_to_class = rec.cluster_map("cluster_to_class");
      m.info = rec.info("");
      model.params = std::move(m);
      break;
    }
    case ModelKind::GMM: {
      GmmModel m;
      m.ridge = rec.real("model_ridge");
      m.weights = rec.array("weights");
      m.means = rec.array("means");
      for (Eigen::Index c = 0; c < m.weights.size(); ++c) m.covariances.push_back(rec.array("cov" + std::to_string(c)));
      m.cluster_to_class = rec.cluster_map("cluster_to_class");
      m.info = rec.info("");
      model.params = std::move(m);
      break;
    }
    case ModelKind::LinearSVM: {
      SvmModel m;
      m.weights = rec.array("weights");
      m.bias = rec.real("bias");
      m.info = rec.info("");
      model.params = std::move(m);
      break;
    }
    case ModelKind::MLP: {
      MlpModel m;
      m.w1 = rec.array("w1");
      m.b1 = rec.array("b1");
      m.w2 = rec.array("w2");
      m.b2 = rec.real("b2");
      m.info = rec.info("");
      model.params = std::move(m);
      break;
    }
    case ModelKind::LabelProp: {
      LabelPropModel m;
      m.train_x = rec.array("train_x");
      m.scores = rec.array("scores");
      m.transductive = rec.array("transductive").cast<int>();
      m.bandwidth = rec.real("bandwidth");
      m.k_graph = static_cast<int>(rec.integer("graph_k"));
      m.info = rec.info("");
      model.params = std::move(m);
      break;
    }
    case ModelKind::SvmViaKMeans: {
      SvmViaKMeansModel m;
      m.kmeans.centroids = rec.array("centroids");
      m.kmeans.cluster_to_class = rec.cluster_map("cluster_to_class");
      m.kmeans.info = rec.info("kmeans_");
      m.svm.weights = rec.array("weights");
      m.svm.bias = rec.real("bias");
      m.svm.info = rec.info("svm_");
      model.params = std::move(m);
      break;
    }
  }
  return model;
}

}  // namespace trustforge
