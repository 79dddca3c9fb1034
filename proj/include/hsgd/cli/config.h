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

#ifndef HSGD_CLI_CONFIG_H_
#define HSGD_CLI_CONFIG_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hsgd/common.h"

namespace hsgd::cli {

// Sectioned key = value text with '#' or ';' comments. Every value remembers
// its line so validation errors can point at it.
class IniFile {
 public:
  static IniFile Parse(const std::string& text, const std::string& name);
  static IniFile Load(const std::string& path);

  struct Entry {
    std::string value;
    int line = 0;
  };

  bool Has(const std::string& section, const std::string& key) const;
  const Entry* Find(const std::string& section, const std::string& key) const;

  // Typed getters; throw Error(kConfig) with "file:line: ..." on bad values.
  std::string GetString(const std::string& section, const std::string& key,
                        const std::string& fallback) const;
  double GetDouble(const std::string& section, const std::string& key,
                   double fallback) const;
  std::int64_t GetInt(const std::string& section, const std::string& key,
                      std::int64_t fallback) const;
  bool GetBool(const std::string& section, const std::string& key,
               bool fallback) const;
  std::vector<double> GetDoubleList(const std::string& section,
                                    const std::string& key,
                                    const std::vector<double>& fallback) const;

  // Throws for sections or keys outside the allowed sets.
  void CheckKnown(
      const std::map<std::string, std::set<std::string>>& allowed) const;

  // "file:line: message" for the entry, or "file: message".
  [[noreturn]] void Fail(const std::string& section, const std::string& key,
                         const std::string& message) const;

  const std::string& name() const { return name_; }
  const std::string& text() const { return text_; }

 private:
  std::string name_;
  std::string text_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

enum class X0Kind { kZero, kNormal, kTruth };

struct ExperimentConfig {
  // [problem]
  std::int64_t d = 100;
  std::int64_t n = 150;
  double noise_std = 0.0;
  // When set, noise variance is noise_var_d / d (overrides noise_std).
  std::optional<double> noise_var_d;
  double delta = 0.1;
  std::uint64_t data_seed = 0;
  std::string csv_path;
  std::string instance_path;
  bool empirical_covariance = false;

  // [schedule]
  std::string schedule_kind = "constant";
  // gamma for a constant schedule; eta * d when eta is given instead.
  std::optional<double> rate;
  std::optional<double> eta;
  std::vector<double> schedule_times;
  std::vector<double> schedule_rates;

  // [run]
  std::vector<double> sigmas{1.0};
  std::vector<double> alphas{2.0};
  // x0 = zero, truth, or normal: x0_scale * N(0, I_d) from x0_seed.
  X0Kind x0 = X0Kind::kZero;
  std::uint64_t x0_seed = 0;
  double x0_scale = 1.0;
  std::int64_t replicas = 1;
  std::uint64_t seed = 0;
  double grid_step = 0.0;  // 0 means 1/d
  double horizon = 0.0;    // 0 means n/d
  bool shuffle = true;
  std::int64_t record_stride = 0;

  // [release]
  std::string strategy = "last";
  std::vector<double> release_times;
  std::int64_t curve_points = 20;
  std::int64_t top_pairs = 5;
  std::uint64_t pair_seed = 0;
  std::string pairs_file;
  std::string engine = "structured";
  std::int64_t max_block_dim = 128;

  // [qq]
  std::int64_t qq_replicas = 2000;
  bool qq_control = true;

  // [doob]
  std::int64_t doob_samples = 1000000;
  std::int64_t doob_step = 0;
  std::uint64_t doob_seed = 0;

  // [sweep]
  std::vector<double> sweep_dims{100, 400};
  std::int64_t sweep_seeds = 50;
  double sweep_n_ratio = 1.5;

  // [output]
  std::string out_dir = "out";
  std::vector<std::string> formats{"csv", "json"};

  std::string hash;  // of the config text and overrides
  std::string source;
};

// Parses and validates. Throws Error(kConfig) with a line-precise message.
ExperimentConfig LoadExperimentConfig(const IniFile& ini);

}  // namespace hsgd::cli

#endif  // HSGD_CLI_CONFIG_H_
