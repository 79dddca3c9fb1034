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

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hsgd::cli {

namespace {

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

IniFile IniFile::Parse(const std::string& text, const std::string& name) {
  IniFile ini;
  ini.name_ = name;
  ini.text_ = text;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorCode::kConfig, name + ":" + std::to_string(line) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const auto comment = s.find_first_of("#;");
    if (comment != std::string::npos) s.erase(comment);
    s = Trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail("unterminated section header");
      section = Lower(Trim(s.substr(1, s.size() - 2)));
      if (section.empty()) fail("empty section name");
      ini.sections_[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    if (section.empty()) fail("key outside of a section");
    const std::string key = Lower(Trim(s.substr(0, eq)));
    const std::string value = Trim(s.substr(eq + 1));
    if (key.empty()) fail("empty key");
    auto& entries = ini.sections_[section];
    if (entries.count(key)) {
      fail("duplicate key '" + key + "' (first on line " +
           std::to_string(entries[key].line) + ")");
    }
    entries[key] = Entry{value, line};
  }
  return ini;
}

IniFile IniFile::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, path + ": cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return Parse(buf.str(), path);
}

bool IniFile::Has(const std::string& section, const std::string& key) const {
  return Find(section, key) != nullptr;
}

const IniFile::Entry* IniFile::Find(const std::string& section,
                                    const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

void IniFile::Fail(const std::string& section, const std::string& key,
                   const std::string& message) const {
  const Entry* e = Find(section, key);
  const std::string where =
      e ? name_ + ":" + std::to_string(e->line) : name_;
  throw Error(ErrorCode::kConfig,
              where + ": [" + section + "] " + key + ": " + message);
}

std::string IniFile::GetString(const std::string& section,
                               const std::string& key,
                               const std::string& fallback) const {
  const Entry* e = Find(section, key);
  return e ? e->value : fallback;
}

double IniFile::GetDouble(const std::string& section, const std::string& key,
                          double fallback) const {
  const Entry* e = Find(section, key);
  if (!e) return fallback;
  char* end = nullptr;
  const double v = std::strtod(e->value.c_str(), &end);
  if (e->value.empty() || *end != '\0' || !std::isfinite(v)) {
    Fail(section, key, "expected a finite number, got '" + e->value + "'");
  }
  return v;
}

std::int64_t IniFile::GetInt(const std::string& section,
                             const std::string& key,
                             std::int64_t fallback) const {
  const Entry* e = Find(section, key);
  if (!e) return fallback;
  char* end = nullptr;
  const long long v = std::strtoll(e->value.c_str(), &end, 10);
  if (e->value.empty() || *end != '\0') {
    Fail(section, key, "expected an integer, got '" + e->value + "'");
  }
  return v;
}

bool IniFile::GetBool(const std::string& section, const std::string& key,
                      bool fallback) const {
  const Entry* e = Find(section, key);
  if (!e) return fallback;
  const std::string v = Lower(e->value);
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  Fail(section, key, "expected a boolean, got '" + e->value + "'");
}

std::vector<double> IniFile::GetDoubleList(
    const std::string& section, const std::string& key,
    const std::vector<double>& fallback) const {
  const Entry* e = Find(section, key);
  if (!e) return fallback;
  std::vector<double> out;
  std::stringstream ss(e->value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0' || !std::isfinite(v)) {
      Fail(section, key, "bad list element '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) Fail(section, key, "empty list");
  return out;
}

void IniFile::CheckKnown(
    const std::map<std::string, std::set<std::string>>& allowed) const {
  for (const auto& [section, entries] : sections_) {
    const auto it = allowed.find(section);
    if (it == allowed.end()) {
      throw Error(ErrorCode::kConfig,
                  name_ + ": unknown section [" + section + "]");
    }
    for (const auto& [key, entry] : entries) {
      if (!it->second.count(key)) {
        throw Error(ErrorCode::kConfig, name_ + ":" +
                                            std::to_string(entry.line) +
                                            ": unknown key '" + key +
                                            "' in [" + section + "]");
      }
    }
  }
}

ExperimentConfig LoadExperimentConfig(const IniFile& ini) {
  ini.CheckKnown({
      {"problem",
       {"d", "n", "noise_std", "noise_var_d", "delta", "seed", "csv",
        "instance", "empirical_covariance"}},
      {"schedule", {"kind", "rate", "eta", "times", "rates"}},
      {"run",
       {"sigma", "alpha", "x0", "x0_seed", "x0_scale", "replicas", "seed",
        "grid_step", "horizon", "shuffle", "record_stride"}},
      {"release",
       {"strategy", "times", "curve_points", "pairs", "pair_seed",
        "pairs_file", "engine", "max_block_dim"}},
      {"qq", {"replicas", "control"}},
      {"doob", {"samples", "step", "seed"}},
      {"sweep", {"dims", "seeds", "n_ratio"}},
      {"output", {"directory", "formats"}},
  });
  ExperimentConfig c;
  c.source = ini.name();

  c.d = ini.GetInt("problem", "d", c.d);
  c.n = ini.GetInt("problem", "n", c.n);
  c.noise_std = ini.GetDouble("problem", "noise_std", c.noise_std);
  if (ini.Has("problem", "noise_var_d")) {
    c.noise_var_d = ini.GetDouble("problem", "noise_var_d", 0.0);
    if (*c.noise_var_d < 0.0) ini.Fail("problem", "noise_var_d", "must be >= 0");
    if (ini.Has("problem", "noise_std")) {
      ini.Fail("problem", "noise_var_d", "give noise_std or noise_var_d, not both");
    }
  }
  c.delta = ini.GetDouble("problem", "delta", c.delta);
  c.data_seed = static_cast<std::uint64_t>(ini.GetInt("problem", "seed", 0));
  c.csv_path = ini.GetString("problem", "csv", "");
  c.instance_path = ini.GetString("problem", "instance", "");
  c.empirical_covariance =
      ini.GetBool("problem", "empirical_covariance", c.empirical_covariance);
  if (c.d < 1) ini.Fail("problem", "d", "must be >= 1");
  if (c.n < 1) ini.Fail("problem", "n", "must be >= 1");
  if (c.noise_std < 0.0) ini.Fail("problem", "noise_std", "must be >= 0");
  if (c.delta < 0.0) ini.Fail("problem", "delta", "must be >= 0");
  for (const char* key : {"csv", "instance"}) {
    const std::string path = ini.GetString("problem", key, "");
    if (!path.empty() && !std::filesystem::exists(path)) {
      ini.Fail("problem", key, "file '" + path + "' does not exist");
    }
  }
  if (!c.csv_path.empty() && !c.instance_path.empty()) {
    ini.Fail("problem", "instance", "give csv or instance, not both");
  }

  c.schedule_kind = ini.GetString("schedule", "kind", c.schedule_kind);
  if (c.schedule_kind == "constant") {
    if (ini.Has("schedule", "rate") && ini.Has("schedule", "eta")) {
      ini.Fail("schedule", "eta", "give rate or eta, not both");
    }
    if (ini.Has("schedule", "rate")) c.rate = ini.GetDouble("schedule", "rate", 0.0);
    if (ini.Has("schedule", "eta")) c.eta = ini.GetDouble("schedule", "eta", 0.0);
    if (!c.rate && !c.eta) c.rate = 1.0;
    if ((c.rate && *c.rate < 0.0) || (c.eta && *c.eta < 0.0)) {
      ini.Fail("schedule", c.rate ? "rate" : "eta", "must be >= 0");
    }
  } else if (c.schedule_kind == "tabulated") {
    c.schedule_times = ini.GetDoubleList("schedule", "times", {});
    c.schedule_rates = ini.GetDoubleList("schedule", "rates", {});
    if (c.schedule_times.empty() ||
        c.schedule_times.size() != c.schedule_rates.size()) {
      ini.Fail("schedule", "rates", "times and rates must have equal length");
    }
    for (std::size_t i = 0; i < c.schedule_times.size(); ++i) {
      if (c.schedule_rates[i] < 0.0) ini.Fail("schedule", "rates", "must be >= 0");
      if (i > 0 && !(c.schedule_times[i] > c.schedule_times[i - 1])) {
        ini.Fail("schedule", "times", "must be strictly increasing");
      }
    }
  } else {
    ini.Fail("schedule", "kind", "expected 'constant' or 'tabulated'");
  }

  c.sigmas = ini.GetDoubleList("run", "sigma", c.sigmas);
  for (const double s : c.sigmas) {
    if (s < 0.0) ini.Fail("run", "sigma", "noise scales must be >= 0");
  }
  c.alphas = ini.GetDoubleList("run", "alpha", c.alphas);
  for (const double a : c.alphas) {
    if (!(a > 1.0)) ini.Fail("run", "alpha", "Renyi orders must exceed 1");
  }
  const std::string x0 = ini.GetString("run", "x0", "zero");
  if (x0 == "zero") {
    c.x0 = X0Kind::kZero;
  } else if (x0 == "normal") {
    c.x0 = X0Kind::kNormal;
  } else if (x0 == "truth") {
    c.x0 = X0Kind::kTruth;
  } else {
    ini.Fail("run", "x0", "expected 'zero', 'normal' or 'truth'");
  }
  c.x0_seed = static_cast<std::uint64_t>(ini.GetInt("run", "x0_seed", 0));
  c.x0_scale = ini.GetDouble("run", "x0_scale", c.x0_scale);
  c.replicas = ini.GetInt("run", "replicas", c.replicas);
  if (c.replicas < 1) ini.Fail("run", "replicas", "must be >= 1");
  c.seed = static_cast<std::uint64_t>(ini.GetInt("run", "seed", 0));
  c.grid_step = ini.GetDouble("run", "grid_step", c.grid_step);
  if (c.grid_step < 0.0) ini.Fail("run", "grid_step", "must be >= 0");
  c.horizon = ini.GetDouble("run", "horizon", c.horizon);
  if (c.horizon < 0.0) ini.Fail("run", "horizon", "must be >= 0");
  c.shuffle = ini.GetBool("run", "shuffle", c.shuffle);
  c.record_stride = ini.GetInt("run", "record_stride", c.record_stride);
  if (c.record_stride < 0) ini.Fail("run", "record_stride", "must be >= 0");

  c.strategy = ini.GetString("release", "strategy", c.strategy);
  if (c.strategy != "last" && c.strategy != "iterates" &&
      c.strategy != "average") {
    ini.Fail("release", "strategy", "expected last, iterates or average");
  }
  c.release_times = ini.GetDoubleList("release", "times", {});
  for (std::size_t i = 0; i < c.release_times.size(); ++i) {
    if (!(c.release_times[i] > 0.0)) ini.Fail("release", "times", "must be > 0");
    if (i > 0 && !(c.release_times[i] > c.release_times[i - 1])) {
      ini.Fail("release", "times", "must be strictly increasing");
    }
  }
  c.curve_points = ini.GetInt("release", "curve_points", c.curve_points);
  if (c.curve_points < 1) ini.Fail("release", "curve_points", "must be >= 1");
  c.top_pairs = ini.GetInt("release", "pairs", c.top_pairs);
  if (c.top_pairs < 1) ini.Fail("release", "pairs", "must be >= 1");
  c.pair_seed = static_cast<std::uint64_t>(ini.GetInt("release", "pair_seed", 0));
  c.pairs_file = ini.GetString("release", "pairs_file", "");
  if (!c.pairs_file.empty() && !std::filesystem::exists(c.pairs_file)) {
    ini.Fail("release", "pairs_file", "file '" + c.pairs_file + "' does not exist");
  }
  c.engine = ini.GetString("release", "engine", c.engine);
  if (c.engine != "structured" && c.engine != "dense") {
    ini.Fail("release", "engine", "expected structured or dense");
  }
  c.max_block_dim = ini.GetInt("release", "max_block_dim", c.max_block_dim);

  c.qq_replicas = ini.GetInt("qq", "replicas", c.qq_replicas);
  if (c.qq_replicas < 2) ini.Fail("qq", "replicas", "must be >= 2");
  c.qq_control = ini.GetBool("qq", "control", c.qq_control);

  c.doob_samples = ini.GetInt("doob", "samples", c.doob_samples);
  if (c.doob_samples < 2) ini.Fail("doob", "samples", "must be >= 2");
  c.doob_step = ini.GetInt("doob", "step", c.doob_step);
  if (c.doob_step < 0) ini.Fail("doob", "step", "must be >= 0");
  c.doob_seed = static_cast<std::uint64_t>(ini.GetInt("doob", "seed", 0));

  c.sweep_dims = ini.GetDoubleList("sweep", "dims", c.sweep_dims);
  for (const double d : c.sweep_dims) {
    if (!(d >= 1.0) || d != std::floor(d)) {
      ini.Fail("sweep", "dims", "dimensions must be positive integers");
    }
  }
  c.sweep_seeds = ini.GetInt("sweep", "seeds", c.sweep_seeds);
  if (c.sweep_seeds < 1) ini.Fail("sweep", "seeds", "must be >= 1");
  c.sweep_n_ratio = ini.GetDouble("sweep", "n_ratio", c.sweep_n_ratio);
  if (!(c.sweep_n_ratio > 0.0)) ini.Fail("sweep", "n_ratio", "must be > 0");

  c.out_dir = ini.GetString("output", "directory", c.out_dir);
  if (ini.Has("output", "formats")) {
    c.formats.clear();
    std::stringstream ss(ini.GetString("output", "formats", ""));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = Trim(item);
      if (item != "csv" && item != "json") {
        ini.Fail("output", "formats", "unknown format '" + item + "'");
      }
      c.formats.push_back(item);
    }
  }
  Fingerprint fp;
  fp.Add(std::string_view(ini.text()));
  c.hash = fp.Hex();
  return c;
}

}  // namespace hsgd::cli
