// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>

#include "commands.hpp"
#include "trustforge/error.hpp"
#include "trustforge/models.hpp"
#include "trustforge/text.hpp"

namespace {

using namespace trustforge;

constexpr int kUsageError = 2;

CLI::App* subcommand(CLI::App& app, const char* name, const char* help) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->set_config("--config", "", "key = value file; command-line flags take precedence");
  sub->allow_config_extras(true);
  return sub;
}

// Comma-separated model names.
const CLI::Validator kModelList(
    [](std::string& value) -> std::string {
      for (auto name : text::split(value, ',')) {
        name = text::trim(name);
        if (name.empty()) continue;
        try {
          parse_model_kind(name);
        } catch (const ConfigError& e) {
          return e.what();
        }
      }
      return {};
    },
    "MODEL[,MODEL...]");

const CLI::Validator kCrossList(
    [](std::string& value) -> std::string {
      for (auto item : text::split(value, ',')) {
        item = text::trim(item);
        if (item.empty()) continue;
        const auto parts = text::split(item, ':');
        const auto ok = [](std::string_view m) { return text::trim(m) == "rwi" || text::trim(m) == "drift"; };
        if (parts.size() != 2 || !ok(parts[0]) || !ok(parts[1]))
          return "expected train:test pairs of rwi|drift, got '" + std::string(item) + "'";
      }
      return {};
    },
    "TRAIN:TEST[,...]");

int default_jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trustforge: sensor data trust classification pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "trustforge 0.1.0");

  cli::SimulateArgs sim;
  auto* s_sim = subcommand(app, "simulate", "write a synthetic deployment in Intel Lab text format");
  s_sim->add_option("--out", sim.out, "output directory")->required();
  s_sim->add_option("--sensors", sim.sensors, "sensor count")->check(CLI::Range(2, 54));
  s_sim->add_option("--days", sim.days, "days")->check(CLI::Range(1, 400));
  s_sim->add_option("--seed", sim.seed, "master seed");

  cli::IngestArgs ing;
  auto* s_ing = subcommand(app, "ingest", "parse, clean and grid raw readings into daily instances");
  s_ing->add_option("--readings", ing.readings, "readings text file")->required()->check(CLI::ExistingFile);
  s_ing->add_option("--layout", ing.layout, "sensor layout file")->required()->check(CLI::ExistingFile);
  s_ing->add_option("--out", ing.out, "output directory")->required();
  s_ing->add_option("--step", ing.step, "grid step in seconds")->check(CLI::PositiveNumber);
  s_ing->add_option("--max-gap", ing.max_gap, "longest interpolated gap in seconds")->check(CLI::PositiveNumber);
  s_ing->add_option("--coverage", ing.coverage, "minimum daily coverage")->check(CLI::Range(0.0, 1.0));
  s_ing->add_option("--min-temp", ing.min_temp, "lowest plausible value");
  s_ing->add_option("--max-temp", ing.max_temp, "highest plausible value");
  s_ing->add_option("--outlier-std", ing.outlier_std, "outlier threshold in std")->check(CLI::PositiveNumber);

  cli::SynthArgs syn;
  auto* s_syn = subcommand(app, "synth", "augment instances with synthesized untrustworthy data");
  s_syn->add_option("--input", syn.input, "instances file")->required()->check(CLI::ExistingFile);
  s_syn->add_option("--out", syn.out, "output directory")->required();
  s_syn->add_option("--method", syn.method, "rwi or drift")->check(CLI::IsMember({"rwi", "drift"}));
  s_syn->add_option("--realizations", syn.realizations, "independent realizations")->check(CLI::Range(1, 1000));
  s_syn->add_option("--seed", syn.seed, "master seed; realization r uses seed + r");
  s_syn->add_option("--mid-points", syn.mid_points, "RWI mid points")->check(CLI::NonNegativeNumber);
  s_syn->add_option("--step-variance", syn.step_variance, "fixed RWI step variance (default adaptive)")
      ->check(CLI::NonNegativeNumber);
  s_syn->add_option("--adaptive-factor", syn.adaptive_factor, "RWI step std / RMS first difference")
      ->check(CLI::NonNegativeNumber);
  s_syn->add_option("--drift-const", syn.drift_const, "drift constant per step");
  s_syn->add_option("--noise-std", syn.noise_std, "drift noise std")->check(CLI::NonNegativeNumber);
  s_syn->add_option("--cap", syn.cap, "drift cap")->check(CLI::PositiveNumber);

  cli::FeaturesArgs fea;
  auto* s_fea = subcommand(app, "features", "extract window features");
  s_fea->add_option("--input", fea.inputs, "instance file(s)")->required()->check(CLI::ExistingFile);
  s_fea->add_option("--out", fea.out, "output directory")->required();
  s_fea->add_option("--kind", fea.kind, "corr or dst")->check(CLI::IsMember({"corr", "dst"}));
  s_fea->add_option("--stats", fea.stats, "sensor statistics file")->required()->check(CLI::ExistingFile);
  s_fea->add_option("--layout", fea.layout, "layout file for building neighbors")->check(CLI::ExistingFile);
  s_fea->add_option("--neighbors", fea.neighbors, "neighbor map; read if present, else built and saved here");
  s_fea->add_option("--k-phys", fea.k_phys, "physically nearest candidates")->check(CLI::PositiveNumber);
  s_fea->add_option("--k", fea.k, "neighbors kept")->check(CLI::Range(1, 32));
  s_fea->add_option("--window", fea.window, "window length in samples")->check(CLI::PositiveNumber);
  s_fea->add_option("--dct-coeffs", fea.dct_coeffs, "DCT coefficients")->check(CLI::PositiveNumber);
  s_fea->add_option("--dct-bands", fea.dct_bands, "DCT bands")->check(CLI::PositiveNumber);
  s_fea->add_option("--dst-bins", fea.dst_bins, "DST bins")->check(CLI::Range(2, 1000));
  s_fea->add_option("--dst-span", fea.dst_span, "DST bin span in std")->check(CLI::PositiveNumber);

  cli::EvalArgs ev;
  ev.jobs = default_jobs();
  auto* s_ev = subcommand(app, "eval", "cross-validate models and write the report");
  s_ev->add_option("--input", ev.inputs, "feature file(s)")->required()->check(CLI::ExistingFile);
  s_ev->add_option("--out", ev.out, "output directory")->required();
  s_ev->add_option("--models", ev.models, "models to run")->check(kModelList);
  s_ev->add_option("--folds", ev.folds, "cross-validation folds")->check(CLI::Range(2, 1000));
  s_ev->add_option("--cross", ev.cross, "cross-dataset runs, e.g. rwi:drift,drift:rwi")->check(kCrossList);
  s_ev->add_flag("--group-by-day", ev.group_by_day, "keep each day within one fold");
  s_ev->add_option("--seed", ev.seed, "seed for folds and models");
  s_ev->add_option("--jobs", ev.jobs, "parallel cells")->check(CLI::PositiveNumber);
  s_ev->add_option("--svm-c", ev.svm_c, "SVM C")->check(CLI::PositiveNumber);
  s_ev->add_option("--svm-epochs", ev.svm_epochs, "SVM epochs")->check(CLI::PositiveNumber);
  s_ev->add_option("--mlp-hidden", ev.mlp_hidden, "MLP hidden units")->check(CLI::PositiveNumber);
  s_ev->add_option("--mlp-epochs", ev.mlp_epochs, "MLP maximum epochs")->check(CLI::PositiveNumber);
  s_ev->add_option("--mlp-lr", ev.mlp_lr, "MLP learning rate")->check(CLI::PositiveNumber);
  s_ev->add_option("--lp-k", ev.lp_k, "label propagation graph degree")->check(CLI::PositiveNumber);
  s_ev->add_option("--lp-alpha", ev.lp_alpha, "label propagation alpha")->check(CLI::Range(0.0, 1.0));
  s_ev->add_option("--lp-labeled", ev.lp_labeled, "labeled fraction")->check(CLI::Range(0.0, 1.0));
  s_ev->add_option("--gmm-ridge", ev.gmm_ridge, "GMM covariance ridge")->check(CLI::NonNegativeNumber);

  cli::SweepArgs sw;
  sw.eval.jobs = default_jobs();
  sw.eval.cross = "rwi:drift,drift:rwi";
  auto* s_sw = subcommand(app, "sweep", "evaluate over a hyperparameter grid and tabulate the targets");
  s_sw->add_option("--input", sw.eval.inputs, "feature file(s)")->required()->check(CLI::ExistingFile);
  s_sw->add_option("--out", sw.eval.out, "output directory")->required();
  s_sw->add_option("--models", sw.eval.models, "models to run")->check(kModelList);
  s_sw->add_option("--folds", sw.eval.folds, "cross-validation folds")->check(CLI::Range(2, 1000));
  s_sw->add_option("--cross", sw.eval.cross, "cross-dataset runs")->check(kCrossList);
  s_sw->add_flag("--group-by-day", sw.eval.group_by_day, "keep each day within one fold");
  s_sw->add_option("--seed", sw.eval.seed, "seed for folds and models");
  s_sw->add_option("--jobs", sw.eval.jobs, "parallel cells")->check(CLI::PositiveNumber);
  s_sw->add_option("--svm-c", sw.svm_c, "SVM C grid")->delimiter(',')->check(CLI::PositiveNumber);
  s_sw->add_option("--mlp-hidden", sw.mlp_hidden, "MLP hidden unit grid")->delimiter(',')->check(CLI::PositiveNumber);
  s_sw->add_option("--lp-alpha", sw.lp_alpha, "label propagation alpha grid")->delimiter(',')->check(CLI::Range(0.0, 1.0));

  cli::PcaArgs pca;
  auto* s_pca = subcommand(app, "pca", "2-D principal component projection of a feature file");
  s_pca->add_option("--input", pca.input, "feature file")->required()->check(CLI::ExistingFile);
  s_pca->add_option("--out", pca.out, "output CSV")->required();

  cli::DemoArgs demo;
  demo.jobs = default_jobs();
  auto* s_demo = subcommand(app, "demo", "run the whole pipeline on a simulated 10-sensor, 10-day deployment");
  s_demo->add_option("--out", demo.out, "output directory")->required();
  s_demo->add_option("--seed", demo.seed, "master seed");
  s_demo->add_option("--realizations", demo.realizations, "realizations per method")->check(CLI::Range(1, 100));
  s_demo->add_option("--folds", demo.folds, "cross-validation folds")->check(CLI::Range(2, 100));
  s_demo->add_option("--jobs", demo.jobs, "parallel cells")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
    if (const char* env = std::getenv("TRUSTFORGE_SEED")) {
      const auto v = text::parse_int(env);
      if (!v || *v < 0) throw CLI::ValidationError("TRUSTFORGE_SEED", "must be a non-negative integer");
      const auto seed = static_cast<std::uint64_t>(*v);
      sim.seed = syn.seed = ev.seed = sw.eval.seed = demo.seed = seed;
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsageError;
  }

  try {
    if (s_sim->parsed()) return cli::cmd_simulate(sim);
    if (s_ing->parsed()) return cli::cmd_ingest(ing);
    if (s_syn->parsed()) return cli::cmd_synth(syn);
    if (s_fea->parsed()) return cli::cmd_features(fea);
    if (s_ev->parsed()) return cli::cmd_eval(ev);
    if (s_sw->parsed()) return cli::cmd_sweep(sw);
    if (s_pca->parsed()) return cli::cmd_pca(pca);
    if (s_demo->parsed()) return cli::cmd_demo(demo);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
