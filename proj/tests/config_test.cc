// Copyright 2026 The hsgd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hsgd/cli/config.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "hsgd/cli/commands.h"

namespace hsgd::cli {
namespace {

namespace fs = std::filesystem;

std::string ConfigError(const std::string& text) {
  try {
    LoadExperimentConfig(IniFile::Parse(text, "exp.ini"));
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
    return e.what();
  }
  ADD_FAILURE() << "config accepted:\n" << text;
  return "";
}

TEST(IniFileTest, ParsesSectionsListsAndComments) {
  const IniFile ini = IniFile::Parse(
      "# experiment\n[problem]\nd = 40 ; inline\nnoise_std=0.5\n"
      "[run]\nsigma = 1, 1.25 ,1.5\nshuffle = false\n",
      "x.ini");
  EXPECT_EQ(ini.GetInt("problem", "d", 0), 40);
  EXPECT_DOUBLE_EQ(ini.GetDouble("problem", "noise_std", 0.0), 0.5);
  EXPECT_EQ(ini.GetDoubleList("run", "sigma", {}), (std::vector<double>{1, 1.25, 1.5}));
  EXPECT_FALSE(ini.GetBool("run", "shuffle", true));
  EXPECT_EQ(ini.GetInt("problem", "n", 7), 7);
  EXPECT_EQ(ini.Find("problem", "d")->line, 3);
}

TEST(ExperimentConfigTest, LoadsDefaultsAndValues) {
  const ExperimentConfig c = LoadExperimentConfig(IniFile::Parse(
      "[problem]\nd = 200\nn = 300\nnoise_var_d = 0.25\n"
      "[schedule]\neta = 0.05\n[run]\nsigma = 0, 1.5\nx0 = normal\n",
      "exp.ini"));
  EXPECT_EQ(c.d, 200);
  EXPECT_EQ(c.n, 300);
  ASSERT_TRUE(c.noise_var_d.has_value());
  EXPECT_DOUBLE_EQ(*c.eta, 0.05);
  EXPECT_EQ(c.sigmas, (std::vector<double>{0.0, 1.5}));
  EXPECT_EQ(c.x0, X0Kind::kNormal);
  EXPECT_EQ(c.alphas, (std::vector<double>{2.0}));
  EXPECT_EQ(c.source, "exp.ini");
  EXPECT_FALSE(c.hash.empty());
}

TEST(ExperimentConfigTest, ErrorsNameFileLineAndKey) {
  EXPECT_NE(ConfigError("[problem]\nd = 10\nbogus = 3\n").find("exp.ini:3"),
            std::string::npos);
  const std::string bad_number = ConfigError("[problem]\n\nnoise_std = abc\n");
  EXPECT_NE(bad_number.find("exp.ini:3"), std::string::npos);
  EXPECT_NE(bad_number.find("noise_std"), std::string::npos);
  EXPECT_NE(ConfigError("[run]\nalpha = 1.0\n").find("exp.ini:2"), std::string::npos);
  ConfigError("[nowhere]\nx = 1\n");
  ConfigError("[problem]\nd = 0\n");
  ConfigError("[schedule]\nrate = 1\neta = 0.1\n");
  ConfigError("[release]\nstrategy = sometimes\n");
  ConfigError("[problem]\nd = 10\nd = 11\n");
  ConfigError("[problem\nd = 10\n");
}

class CommandTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hsgd_cli_" + std::string(::testing::UnitTest::GetInstance()
                                          ->current_test_info()
                                          ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliOptions Options(const std::string& command, const std::string& text,
                     const std::string& out = "out") {
    const fs::path config = dir_ / "exp.ini";
    std::ofstream(config) << text;
    CliOptions o;
    o.command = command;
    o.config_path = config.string();
    o.out_dir = (dir_ / out).string();
    return o;
  }

  static std::string Slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
  std::ostringstream log_;
};

constexpr char kSmall[] =
    "[problem]\nd = 20\nn = 30\nnoise_std = 0.5\ndelta = 0.1\nseed = 3\n"
    "[schedule]\neta = 0.1\n[run]\nsigma = 0.5, 1\nreplicas = 4\nseed = 2\n"
    "[release]\npairs = 2\ncurve_points = 3\n";

TEST_F(CommandTest, RiskCurveIsByteReproducible) {
  ASSERT_EQ(RunCommand(Options("risk-curve", kSmall, "a"), log_), kExitOk) << log_.str();
  ASSERT_EQ(RunCommand(Options("risk-curve", kSmall, "b"), log_), kExitOk) << log_.str();
  for (const char* file : {"volterra_sigma1.csv", "sgd_sigma0.5.csv",
                           "ensemble_sigma1.csv"}) {
    const std::string a = Slurp(dir_ / "a" / file);
    EXPECT_FALSE(a.empty()) << file;
    EXPECT_EQ(a, Slurp(dir_ / "b" / file)) << file;
    EXPECT_EQ(a.rfind("# config_hash=", 0), 0u) << file;
  }
  EXPECT_TRUE(fs::exists(dir_ / "a" / "manifest_risk-curve.json"));
}

TEST_F(CommandTest, ZeroRateCurvesStayAtInitialRisk) {
  std::string text = kSmall;
  text.replace(text.find("eta = 0.1"), 9, "rate = 0");
  ASSERT_EQ(RunCommand(Options("risk-curve", text), log_), kExitOk) << log_.str();
  std::ifstream in(dir_ / "out" / "volterra_sigma1.csv");
  std::string line;
  std::string first;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line[0] == '#' || line[0] == 't') continue;
    const std::string p = line.substr(line.find(',') + 1);
    if (first.empty()) first = p;
    EXPECT_EQ(p, first);
    ++rows;
  }
  EXPECT_EQ(rows, 31);
}

TEST_F(CommandTest, PrivacyStrategiesWriteTables) {
  std::string text = kSmall;
  text += "times = 0.5, 1.2\n";
  CliOptions o = Options("privacy", text);
  o.dump_divergences = true;
  for (const char* strategy : {"last", "iterates", "average"}) {
    o.strategy = strategy;
    ASSERT_EQ(RunCommand(o, log_), kExitOk) << log_.str();
    EXPECT_TRUE(fs::exists(dir_ / "out" / (std::string("privacy_") + strategy + ".csv")));
    EXPECT_TRUE(fs::exists(dir_ / "out" / (std::string("divergences_") + strategy +
                                            "_sigma1.csv")));
  }
  EXPECT_NE(Slurp(dir_ / "out" / "privacy_last.csv").find("upper bound"),
            std::string::npos);
}

TEST_F(CommandTest, ExitCodes) {
  EXPECT_EQ(RunCommand(Options("risk-curve", "[problem]\nd = x\n"), log_), kExitConfig);
  std::string late = kSmall;
  late += "times = 5\n";
  EXPECT_EQ(RunCommand(Options("privacy", late), log_), kExitConfig);
  EXPECT_NE(log_.str().find("exceeds the horizon"), std::string::npos);
  EXPECT_EQ(RunCommand(Options("risk-curve",
                               "[problem]\nd = 10\nn = 20\n[schedule]\nrate = 300\n"
                               "[run]\ngrid_step = 1\n"),
                       log_),
            kExitNumerical);
  CliOptions missing = Options("qq", kSmall);
  missing.config_path = (dir_ / "absent.ini").string();
  EXPECT_EQ(RunCommand(missing, log_), kExitConfig);
}

TEST_F(CommandTest, GenDataRoundTripsThroughInstanceFile) {
  ASSERT_EQ(RunCommand(Options("gen-data", kSmall), log_), kExitOk) << log_.str();
  const std::string instance = (dir_ / "out" / "instance.json").string();
  const std::string text = "[problem]\ninstance = " + instance +
                           "\n[schedule]\neta = 0.1\n[doob]\nsamples = 1000\n";
  EXPECT_EQ(RunCommand(Options("risk-curve", text, "again"), log_), kExitOk)
      << log_.str();
  EXPECT_TRUE(fs::exists(dir_ / "out" / "data.csv"));
}

}  // namespace
}  // namespace hsgd::cli
