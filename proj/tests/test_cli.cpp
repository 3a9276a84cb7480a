// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "trustforge/features.hpp"
#include "trustforge/ingest.hpp"

namespace fs = std::filesystem;
using namespace trustforge;

namespace {

struct Run {
  int code = -1;
  std::string output;
};

Run run(const std::string& args, const fs::path& scratch) {
  const fs::path log = scratch / "cli.log";
  const std::string cmd = std::string("\"") + TRUSTFORGE_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

std::size_t columns(const std::string& header) { return static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1; }

}  // namespace

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(fs::temp_directory_path() / ("trustforge_cli_" + std::to_string(::getpid())));
    fs::remove_all(*dir_);
    fs::create_directories(*dir_);
    ASSERT_EQ(run("simulate --out \"" + (*dir_ / "data").string() + "\" --sensors 9 --days 2 --seed 3", *dir_).code, 0);
    ASSERT_EQ(run("ingest --readings \"" + (*dir_ / "data/readings.txt").string() + "\" --layout \"" +
                      (*dir_ / "data/layout.txt").string() + "\" --out \"" + (*dir_ / "ingest").string() + "\"",
                  *dir_)
                  .code,
              0);
  }
  static void TearDownTestSuite() {
    fs::remove_all(*dir_);
    delete dir_;
  }
  static std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }
  static fs::path* dir_;
};
fs::path* Cli::dir_ = nullptr;

TEST_F(Cli, MissingInputNamesThePath) {
  const auto r = run("synth --input " + q(*dir_ / "nope.csv") + " --out " + q(*dir_ / "x"), *dir_);
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.output.find("nope.csv"), std::string::npos) << r.output;
}

TEST_F(Cli, UsageErrors) {
  const auto inst = q(*dir_ / "ingest/instances.csv");
  EXPECT_EQ(run("synth --input " + inst + " --out " + q(*dir_ / "x") + " --method foo", *dir_).code, 2);
  EXPECT_EQ(run("eval --input " + inst + " --out " + q(*dir_ / "x") + " --folds 1", *dir_).code, 2);
  EXPECT_EQ(run("features --input " + inst + " --stats " + q(*dir_ / "ingest/stats.csv") + " --out " +
                    q(*dir_ / "x") + " --kind wavelet",
                *dir_)
                .code,
            2);
  EXPECT_EQ(run("frobnicate", *dir_).code, 2);
}

TEST_F(Cli, IngestWritesDailyInstances) {
  std::ifstream in(*dir_ / "ingest/instances.csv");
  const auto inst = read_instances(in);
  ASSERT_FALSE(inst.empty());
  for (const auto& i : inst) EXPECT_EQ(i.size(), 1440);
  EXPECT_TRUE(fs::exists(*dir_ / "ingest/stats.csv"));
  EXPECT_TRUE(fs::exists(*dir_ / "ingest/instances.meta"));
}

TEST_F(Cli, IngestStepControlsInstanceLength) {
  const auto out = *dir_ / "ingest120";
  const auto r = run("ingest --readings " + q(*dir_ / "data/readings.txt") + " --layout " +
                         q(*dir_ / "data/layout.txt") + " --out " + q(out) + " --step 120",
                     *dir_);
  ASSERT_EQ(r.code, 0) << r.output;
  std::ifstream in(out / "instances.csv");
  const auto inst = read_instances(in);
  ASSERT_FALSE(inst.empty());
  for (const auto& i : inst) EXPECT_EQ(i.size(), 720);
}

TEST_F(Cli, SynthThenFeatures) {
  const auto synth = *dir_ / "synth";
  auto r = run("synth --input " + q(*dir_ / "ingest/instances.csv") + " --out " + q(synth) +
                   " --method rwi --realizations 10 --seed 4",
               *dir_);
  ASSERT_EQ(r.code, 0) << r.output;
  int csv = 0;
  for (const auto& e : fs::directory_iterator(synth)) csv += e.path().extension() == ".csv";
  EXPECT_EQ(csv, 10);
  ASSERT_TRUE(fs::exists(synth / "rwi_r00.csv"));
  ASSERT_TRUE(fs::exists(synth / "rwi_r09.csv"));

  const auto feats = *dir_ / "features";
  for (const std::string kind : {"corr", "dst"}) {
    r = run("features --input " + q(synth / "rwi_r00.csv") + " --stats " + q(*dir_ / "ingest/stats.csv") +
                " --layout " + q(*dir_ / "ingest/layout.txt") + " --neighbors " + q(*dir_ / "neighbors.txt") +
                " --k-phys 8 --k 7 --kind " + kind + " --out " + q(feats),
            *dir_);
    ASSERT_EQ(r.code, 0) << r.output;
    const auto header = first_line(feats / ("rwi_r00." + kind + ".csv"));
    // sensor, day, window, label, source, realization + features
    EXPECT_EQ(columns(header), 6u + (kind == "corr" ? 17u : 14u)) << header;
  }

  r = run("eval --input " + q(feats / "rwi_r00.corr.csv") + " --out " + q(*dir_ / "eval") +
              " --models svm --folds 3 --jobs 2",
          *dir_);
  ASSERT_EQ(r.code, 0) << r.output;
  std::ifstream rep(*dir_ / "eval/report.json");
  std::stringstream ss;
  ss << rep.rdbuf();
  EXPECT_NE(ss.str().find("\"schema_version\": 1"), std::string::npos);

  r = run("sweep --input " + q(feats / "rwi_r00.corr.csv") + " --out " + q(*dir_ / "sweep") +
              " --models svm,kmeans --folds 3 --cross '' --svm-c 0.5,2 --mlp-hidden 4 --lp-alpha 0.9",
          *dir_);
  ASSERT_EQ(r.code, 0) << r.output;
  std::ifstream sweep(*dir_ / "sweep/sweep.csv");
  std::string line;
  int lines = 0;
  while (std::getline(sweep, line)) ++lines;
  EXPECT_EQ(lines, 3);
  EXPECT_TRUE(fs::exists(*dir_ / "sweep/config_01/report.json"));
}
