// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "trustforge/error.hpp"
#include "trustforge/eval.hpp"
#include "trustforge/features.hpp"
#include "trustforge/ingest.hpp"
#include "trustforge/pipeline.hpp"
#include "trustforge/simulate.hpp"
#include "trustforge/synth.hpp"
#include "trustforge/text.hpp"
#include "trustforge/topology.hpp"

namespace trustforge::cli {

namespace fs = std::filesystem;

namespace {

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

fs::path meta_path(const fs::path& data) { return fs::path(data).replace_extension(".meta"); }

std::string fmt(double v) { return text::format_double(v); }

std::string base_name(const std::string& p) { return fs::path(p).filename().string(); }

Meta parse_meta_lines(std::istream& in) {
  Meta meta;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    meta.emplace_back(std::string(text::trim(std::string_view(line).substr(0, eq))),
                      std::string(text::trim(std::string_view(line).substr(eq + 1))));
  }
  return meta;
}

std::optional<std::string> lookup(const Meta& meta, std::string_view key) {
  for (const auto& [k, v] : meta)
    if (k == key) return v;
  return std::nullopt;
}

template <typename T>
T load(const fs::path& path, T (*reader)(std::istream&)) {
  auto in = open_in(path);
  try {
    return reader(in);
  } catch (const Error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<Instance> load_instances(const fs::path& p) { return load<std::vector<Instance>>(p, read_instances); }
StatsMap load_stats(const fs::path& p) { return load<StatsMap>(p, read_stats); }
NeighborMap load_neighbors(const fs::path& p) { return load<NeighborMap>(p, read_neighbors); }

FeatureTable load_features(const fs::path& p) {
  auto in = open_in(p);
  try {
    return read_features(in);
  } catch (const Error& e) {
    throw FormatError(p.string() + ": " + e.what());
  }
}

Layout load_layout(const fs::path& p) {
  auto in = open_in(p);
  return parse_layout(in).positions;
}

}  // namespace

Meta read_meta(const std::string& path) {
  std::ifstream in(path);
  if (!in) return {};
  return parse_meta_lines(in);
}

void write_meta(const std::string& path, const Meta& meta) {
  auto out = open_out(path);
  for (const auto& [k, v] : meta) out << k << " = " << v << '\n';
  finish(out, path);
}

// simulate ----------------------------------------------------------------------

int cmd_simulate(const SimulateArgs& args) {
  SimulationConfig config;
  config.sensors = args.sensors;
  config.days = args.days;
  config.seed = args.seed;
  const auto dep = simulate(config);
  const fs::path dir(args.out);
  {
    const auto p = dir / "readings.txt";
    auto out = open_out(p);
    write_readings(out, dep.readings, args.seed);
    finish(out, p);
  }
  {
    const auto p = dir / "layout.txt";
    auto out = open_out(p);
    write_layout(out, dep.layout);
    finish(out, p);
  }
  write_meta((dir / "simulate.meta").string(),
             {{"simulate.sensors", std::to_string(config.sensors)},
              {"simulate.days", std::to_string(config.days)},
              {"simulate.start_date", config.start_date},
              {"simulate.seed", std::to_string(config.seed)}});
  std::printf("simulated %d sensors x %d days: %zu readings -> %s\n", config.sensors, config.days,
              dep.readings.size(), (dir / "readings.txt").string().c_str());
  return 0;
}

// ingest ------------------------------------------------------------------------

int cmd_ingest(const IngestArgs& args) {
  IngestConfig config;
  config.resample.step = args.step;
  config.resample.max_gap = args.max_gap;
  config.coverage_min = args.coverage;
  config.clean.min_value = args.min_temp;
  config.clean.max_value = args.max_temp;
  config.outliers.num_std = args.outlier_std;

  ParsedReadings parsed;
  {
    auto in = open_in(args.readings);
    parsed = parse_readings(in, config.format);
  }
  ParsedLayout layout;
  {
    auto in = open_in(args.layout);
    layout = parse_layout(in, config.format);
  }
  const auto result = ingest(parsed, config);

  const fs::path dir(args.out);
  const auto write = [&](const char* name, auto&& writer) {
    const auto p = dir / name;
    auto out = open_out(p);
    writer(out);
    finish(out, p);
  };
  write("instances.csv", [&](std::ostream& o) { write_instances(o, result.instances); });
  write("stats.csv", [&](std::ostream& o) { write_stats(o, result.stats); });
  write("layout.txt", [&](std::ostream& o) { write_layout(o, layout.positions); });

  const auto& s = result.summary;
  write_meta((dir / "instances.meta").string(),
             {{"ingest.readings", base_name(args.readings)},
              {"ingest.layout", base_name(args.layout)},
              {"ingest.step", fmt(args.step)},
              {"ingest.max_gap", fmt(args.max_gap)},
              {"ingest.coverage_min", fmt(args.coverage)},
              {"ingest.clean_range", fmt(args.min_temp) + ":" + fmt(args.max_temp)},
              {"ingest.outlier_std", fmt(args.outlier_std)},
              {"count.readings", std::to_string(s.readings)},
              {"count.skipped_lines", std::to_string(s.skipped_lines)},
              {"count.removed_by_clean", std::to_string(s.removed_by_clean)},
              {"count.instances", std::to_string(s.instances)},
              {"count.outliers", std::to_string(s.outliers)}});

  for (const auto& w : s.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  if (!layout.missing.empty())
    std::fprintf(stderr, "warning: layout lacks %zu of the expected sensor ids\n", layout.missing.size());
  std::printf("sensors %zu, days %zu, instances %zu, outliers %zu, skipped lines %zu, removed by cleaning %zu\n",
              s.sensors, s.days, s.instances, s.outliers, s.skipped_lines, s.removed_by_clean);
  return 0;
}

// synth -------------------------------------------------------------------------

int cmd_synth(const SynthArgs& args) {
  const SynthMethod method = parse_synth_method(args.method);
  if (args.realizations < 1) throw ConfigError("synth: --realizations must be at least 1");
  SynthConfig config;
  if (method == SynthMethod::RWI) {
    RwiConfig rc;
    rc.num_mid_points = args.mid_points;
    rc.step_variance = args.step_variance;
    rc.adaptive_factor = args.adaptive_factor;
    config = rc;
  } else {
    config = DriftConfig{args.drift_const, args.noise_std, args.cap};
  }
  const auto base = load_instances(args.input);
  const Meta upstream = read_meta(meta_path(args.input).string());
  const fs::path dir(args.out);

  for (int r = 0; r < args.realizations; ++r) {
    const std::uint64_t seed = args.seed + static_cast<std::uint64_t>(r);
    const auto data = augment(base, method, config, seed);
    char name[64];
    std::snprintf(name, sizeof name, "%s_r%02d.csv", std::string(to_string(method)).c_str(), r);
    const auto p = dir / name;
    auto out = open_out(p);
    write_instances(out, data.instances);
    finish(out, p);

    Meta meta;
    for (const auto& kv : upstream)
      if (!kv.first.starts_with("count.")) meta.push_back(kv);
    std::ostringstream synth_meta;
    write_synth_metadata(synth_meta, data);
    std::istringstream lines(synth_meta.str());
    for (auto& [k, v] : parse_meta_lines(lines)) {
      const bool count = k == "instances" || k == "synthesized";
      meta.emplace_back((count ? "count." : "synth.") + k, v);
    }
    meta.emplace_back("synth.master_seed", std::to_string(args.seed));
    meta.emplace_back("synth.realization", std::to_string(r));
    write_meta(meta_path(p).string(), meta);
  }
  std::printf("%s: %d realization(s) from %zu instances -> %s\n", std::string(to_string(method)).c_str(),
              args.realizations, base.size(), dir.string().c_str());
  return 0;
}

// features ----------------------------------------------------------------------

int cmd_features(const FeaturesArgs& args) {
  const FeatureKind kind = parse_feature_kind(args.kind);
  FeatureConfig config;
  config.window_length = args.window;
  config.dct = {args.dct_coeffs, args.dct_bands};
  config.dst_bins = args.dst_bins;
  config.dst_span_std = args.dst_span;
  const NeighborConfig ncfg{static_cast<std::size_t>(args.k_phys), static_cast<std::size_t>(args.k)};
  const StatsMap stats = load_stats(args.stats);

  std::optional<NeighborMap> neighbors;
  if (!args.neighbors.empty() && fs::exists(args.neighbors)) neighbors = load_neighbors(args.neighbors);
  std::optional<Layout> layout;
  if (!neighbors) {
    if (args.layout.empty()) throw ConfigError("features: need --layout to build the neighbor map");
    layout = load_layout(args.layout);
  }

  const fs::path dir(args.out);
  for (const auto& input : args.inputs) {
    const auto dataset = load_instances(input);
    if (!neighbors) {
      neighbors = build_neighbor_map(*layout, dataset, ncfg);
      if (!args.neighbors.empty()) {
        auto out = open_out(args.neighbors);
        write_neighbors(out, *neighbors);
        finish(out, args.neighbors);
      }
    }
    Meta meta = read_meta(meta_path(input).string());
    int realization = 0;
    if (const auto r = lookup(meta, "synth.realization"))
      realization = static_cast<int>(text::parse_int(*r).value_or(0));

    FeatureBuildStats bs;
    const auto table = build_features(dataset, *neighbors, stats, kind, realization, config, &bs);
    const auto p = dir / (fs::path(input).stem().string() + "." + std::string(to_string(kind)) + ".csv");
    auto out = open_out(p);
    write_features(out, table);
    finish(out, p);

    std::erase_if(meta, [](const auto& kv) { return kv.first.starts_with("count."); });
    meta.emplace_back("features.kind", std::string(to_string(kind)));
    meta.emplace_back("features.window", std::to_string(args.window));
    if (kind == FeatureKind::Correlation) {
      meta.emplace_back("features.dct_coeffs", std::to_string(args.dct_coeffs));
      meta.emplace_back("features.dct_bands", std::to_string(args.dct_bands));
    } else {
      meta.emplace_back("features.dst_bins", std::to_string(args.dst_bins));
      meta.emplace_back("features.dst_span_std", fmt(args.dst_span));
    }
    meta.emplace_back("features.k_phys", std::to_string(args.k_phys));
    meta.emplace_back("features.k", std::to_string(args.k));
    meta.emplace_back("count.windows", std::to_string(bs.windows));
    meta.emplace_back("count.skipped_missing_neighbor", std::to_string(bs.skipped_missing_neighbor));
    meta.emplace_back("count.undefined_pearson", std::to_string(bs.undefined_pearson));
    write_meta(meta_path(p).string(), meta);
    std::printf("%s: %ld rows x %ld features (%zu windows skipped for missing neighbors)\n", p.string().c_str(),
                static_cast<long>(table.rows()), static_cast<long>(table.dims()), bs.skipped_missing_neighbor);
  }
  return 0;
}

// eval --------------------------------------------------------------------------

namespace {

std::vector<ModelSpec> model_specs(const EvalArgs& args) {
  std::vector<ModelSpec> out;
  for (auto name : text::split(args.models, ',')) {
    name = text::trim(name);
    if (name.empty()) continue;
    ModelSpec s;
    s.kind = parse_model_kind(name);
    s.svm.C = args.svm_c;
    s.svm.epochs = args.svm_epochs;
    s.mlp.hidden = args.mlp_hidden;
    s.mlp.max_epochs = args.mlp_epochs;
    s.mlp.learning_rate = args.mlp_lr;
    s.labelprop.k_graph = args.lp_k;
    s.labelprop.alpha = args.lp_alpha;
    s.labelprop.labeled_fraction = args.lp_labeled;
    s.gmm.ridge = args.gmm_ridge;
    out.push_back(s);
  }
  return out;
}

std::vector<std::pair<SynthMethod, SynthMethod>> cross_pairs(const std::string& spec) {
  std::vector<std::pair<SynthMethod, SynthMethod>> out;
  for (auto item : text::split(spec, ',')) {
    item = text::trim(item);
    if (item.empty()) continue;
    const auto parts = text::split(item, ':');
    if (parts.size() != 2) throw ConfigError("--cross expects train:test pairs, got '" + std::string(item) + "'");
    out.emplace_back(parse_synth_method(text::trim(parts[0])), parse_synth_method(text::trim(parts[1])));
  }
  return out;
}

// Configuration shared by the inputs; realization-specific keys dropped.
Meta input_echo(const std::vector<std::string>& inputs) {
  Meta echo;
  std::map<std::string, std::size_t> at;
  for (const auto& input : inputs) {
    const Meta meta = read_meta(meta_path(input).string());
    const std::string method = lookup(meta, "synth.method").value_or("unknown");
    for (const auto& [k, v] : meta) {
      if (k.starts_with("count.") || k == "features.kind" || k == "synth.seed" || k == "synth.realization" || k == "synth.method") continue;
      const std::string key = k.starts_with("synth.") ? "synth." + method + "." + k.substr(6) : k;
      const auto it = at.find(key);
      if (it == at.end()) {
        at[key] = echo.size();
        echo.emplace_back(key, v);
      } else if (echo[it->second].second != v) {
        echo[it->second].second = "mixed";
      }
    }
  }
  return echo;
}

void print_report(const EvalReport& report) {
  std::printf("%-15s %-5s %-6s %-6s %4s %8s %8s  %s\n", "model", "feat", "train", "test", "n", "mean", "std",
              "flags");
  for (const auto& c : report.cells) {
    std::string flags;
    for (const auto& f : c.flags) flags += (flags.empty() ? "" : ",") + f;
    std::printf("%-15s %-5s %-6s %-6s %4zu %8.4f %8s  %s\n", c.key.model.c_str(), c.key.features.c_str(),
                c.key.train_synth.c_str(), c.key.test_synth.c_str(), c.accuracies.size(), c.mean,
                c.std ? text::format_double(std::round(*c.std * 1e4) / 1e4).c_str() : "-", flags.c_str());
  }
  for (const auto& t : report.targets)
    std::printf("target %2d %-8s %s (%s)\n", t.id, !t.evaluated ? "n/a" : t.passed ? "pass" : "FLAGGED",
                t.description.c_str(), t.detail.c_str());
}

}  // namespace

int cmd_eval(const EvalArgs& args) {
  EvalConfig config;
  config.models = model_specs(args);
  config.folds = args.folds;
  config.group_by_day = args.group_by_day;
  config.cross = cross_pairs(args.cross);
  config.seed = args.seed;
  config.jobs = args.jobs;

  std::vector<FeatureTable> tables;
  for (const auto& input : args.inputs) tables.push_back(load_features(input));

  const auto start = std::chrono::steady_clock::now();
  const EvalReport report = evaluate(tables, config, input_echo(args.inputs));
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const fs::path dir(args.out);
  const auto write = [&](const char* name, auto&& writer) {
    const auto p = dir / name;
    auto out = open_out(p);
    writer(out);
    finish(out, p);
  };
  write("report.json", [&](std::ostream& o) { write_report(o, report); });
  write("plot.csv", [&](std::ostream& o) { write_plot_data(o, report); });
  write("summary.csv", [&](std::ostream& o) { write_summary(o, report); });
  write("timing.txt", [&](std::ostream& o) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", seconds);
    o << "eval_seconds = " << buf << "\njobs = " << args.jobs << '\n';
  });
  print_report(report);
  std::printf("eval: %zu cells in %.1f s -> %s\n", report.cells.size(), seconds,
              (dir / "report.json").string().c_str());
  return 0;
}

// sweep -------------------------------------------------------------------------

int cmd_sweep(const SweepArgs& args) {
  std::vector<FeatureTable> tables;
  for (const auto& input : args.eval.inputs) tables.push_back(load_features(input));
  const Meta echo = input_echo(args.eval.inputs);

  const fs::path dir(args.eval.out);
  const auto summary_path = dir / "sweep.csv";
  auto summary = open_out(summary_path);
  summary << "config,svm_c,mlp_hidden,lp_alpha";
  for (int id = 5; id <= 11; ++id) summary << ",target_" << id;
  summary << ",orderings_6_9\n";

  int index = 0;
  int holding = 0;
  for (double c : args.svm_c)
    for (int hidden : args.mlp_hidden)
      for (double alpha : args.lp_alpha) {
        EvalArgs ea = args.eval;
        ea.svm_c = c;
        ea.mlp_hidden = hidden;
        ea.lp_alpha = alpha;
        EvalConfig config;
        config.models = model_specs(ea);
        config.folds = ea.folds;
        config.group_by_day = ea.group_by_day;
        config.cross = cross_pairs(ea.cross);
        config.seed = ea.seed;
        config.jobs = ea.jobs;
        const EvalReport report = evaluate(tables, config, echo);

        char name[32];
        std::snprintf(name, sizeof name, "config_%02d", index);
        const auto p = dir / name / "report.json";
        auto out = open_out(p);
        write_report(out, report);
        finish(out, p);

        summary << name << ',' << fmt(c) << ',' << hidden << ',' << fmt(alpha);
        bool orderings = true;
        for (int id = 5; id <= 11; ++id) {
          const auto it = std::find_if(report.targets.begin(), report.targets.end(),
                                       [&](const TargetCheck& t) { return t.id == id; });
          const char* state = it == report.targets.end() || !it->evaluated ? "n/a" : it->passed ? "pass" : "fail";
          summary << ',' << state;
          if (id >= 6 && id <= 9 && std::string(state) != "pass") orderings = false;
        }
        summary << ',' << (orderings ? "yes" : "no") << '\n';
        holding += orderings;
        std::printf("%s svm_c=%s mlp_hidden=%d lp_alpha=%s orderings 6-9 %s\n", name, fmt(c).c_str(), hidden,
                    fmt(alpha).c_str(), orderings ? "hold" : "do not hold");
        ++index;
      }
  finish(summary, summary_path);
  std::printf("sweep: %d of %d configurations satisfy orderings 6-9 -> %s\n", holding, index,
              summary_path.string().c_str());
  return 0;
}

// pca ---------------------------------------------------------------------------

int cmd_pca(const PcaArgs& args) {
  const auto table = load_features(args.input);
  const auto pca = pca2d(table.features);
  auto out = open_out(args.out);
  out << "# explained " << fmt(pca.explained(0)) << ' ' << fmt(pca.explained(1)) << '\n';
  out << "sensor,day,window,label,source,pc1,pc2\n";
  for (Eigen::Index i = 0; i < table.rows(); ++i) {
    const auto& k = table.keys[static_cast<std::size_t>(i)];
    out << k.sensor_id << ',' << k.day_index << ',' << k.window_index << ',' << table.labels(i) << ','
        << to_string(table.sources[static_cast<std::size_t>(i)]) << ',' << fmt(pca.projection(i, 0)) << ','
        << fmt(pca.projection(i, 1)) << '\n';
  }
  finish(out, args.out);
  std::printf("pca: explained variance %.4f, %.4f -> %s\n", pca.explained(0), pca.explained(1), args.out.c_str());
  return 0;
}

// demo --------------------------------------------------------------------------

int cmd_demo(const DemoArgs& args) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir(args.out);
  const auto sub = [&](const char* name) { return (dir / name).string(); };

  cmd_simulate({sub("data"), 10, 10, args.seed});

  IngestArgs ia;
  ia.readings = (dir / "data" / "readings.txt").string();
  ia.layout = (dir / "data" / "layout.txt").string();
  ia.out = sub("ingest");
  cmd_ingest(ia);

  const std::string instances = (dir / "ingest" / "instances.csv").string();
  std::vector<std::string> synth_files;
  for (const char* method : {"rwi", "drift"}) {
    SynthArgs sa;
    sa.input = instances;
    sa.out = sub("synth");
    sa.method = method;
    sa.realizations = args.realizations;
    sa.seed = args.seed;
    cmd_synth(sa);
    for (int r = 0; r < args.realizations; ++r) {
      char name[64];
      std::snprintf(name, sizeof name, "%s_r%02d.csv", method, r);
      synth_files.push_back((dir / "synth" / name).string());
    }
  }

  std::vector<std::string> feature_files;
  for (const char* kind : {"corr", "dst"}) {
    FeaturesArgs fa;
    fa.inputs = synth_files;
    fa.out = sub("features");
    fa.kind = kind;
    fa.stats = (dir / "ingest" / "stats.csv").string();
    fa.layout = (dir / "ingest" / "layout.txt").string();
    fa.neighbors = (dir / "ingest" / "neighbors.txt").string();
    fa.k_phys = 9;  // ten sensors leave nine candidates
    cmd_features(fa);
    for (const auto& f : synth_files)
      feature_files.push_back((dir / "features" / (fs::path(f).stem().string() + "." + kind + ".csv")).string());
  }

  EvalArgs ea;
  ea.inputs = feature_files;
  ea.out = sub("eval");
  ea.folds = args.folds;
  ea.cross = "rwi:drift,drift:rwi";
  ea.seed = args.seed;
  ea.jobs = args.jobs;
  cmd_eval(ea);

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("demo finished in %.1f s\n", seconds);
  return 0;
}

}  // namespace trustforge::cli
