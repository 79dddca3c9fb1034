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

#include "hsgd/cli/commands.h"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "hsgd/cli/config.h"
#include "hsgd/experiments.h"
#include "hsgd/io.h"
#include "hsgd/law.h"
#include "hsgd/privacy.h"
#include "hsgd/problem.h"
#include "hsgd/rng.h"
#include "hsgd/schedule.h"
#include "hsgd/sgd.h"
#include "hsgd/spectral.h"
#include "hsgd/volterra.h"

namespace hsgd::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct World {
  ProblemInstance instance;
  Schedule schedule;
  SpectralCache cache;
  Vector x0;
  double horizon = 0.0;
  double grid_step = 0.0;
};

Schedule MakeSchedule(const ExperimentConfig& c, std::int64_t d) {
  if (c.schedule_kind == "tabulated") {
    return Schedule::Tabulated(c.schedule_times, c.schedule_rates);
  }
  return Schedule::Constant(c.rate ? *c.rate : *c.eta * static_cast<double>(d));
}

double NoiseStd(const ExperimentConfig& c, std::int64_t d) {
  return c.noise_var_d ? std::sqrt(*c.noise_var_d / static_cast<double>(d))
                       : c.noise_std;
}

Vector MakeX0(const ExperimentConfig& c, const ProblemInstance& inst) {
  switch (c.x0) {
    case X0Kind::kZero:
      return Vector::Zero(inst.d());
    case X0Kind::kTruth:
      return inst.ground_truth;
    case X0Kind::kNormal: {
      GaussianStream normal(StreamKey(c.x0_seed, streams::kInitialPoint));
      return c.x0_scale * normal.Draw(inst.d());
    }
  }
  return Vector::Zero(inst.d());
}

ProblemInstance MakeInstance(const ExperimentConfig& c, bool empirical) {
  ProblemInstance inst;
  if (!c.csv_path.empty()) {
    inst = LoadCsvInstance(c.csv_path, c.delta);
  } else if (!c.instance_path.empty()) {
    inst = LoadInstanceJson(c.instance_path);
  } else {
    inst = GenerateSynthetic(c.d, c.n, NoiseStd(c, c.d), c.delta, c.data_seed);
  }
  if (empirical || c.empirical_covariance) UseEmpiricalCovariance(inst);
  return inst;
}

World BuildWorld(const ExperimentConfig& c, bool empirical) {
  ProblemInstance inst = MakeInstance(c, empirical);
  Schedule schedule = MakeSchedule(c, inst.dim);
  SpectralCache cache = SpectralCache::Build(inst.covariance, inst.delta);
  Vector x0 = MakeX0(c, inst);
  const double dd = static_cast<double>(inst.dim);
  const double horizon =
      c.horizon > 0.0 ? c.horizon : static_cast<double>(inst.n_samples) / dd;
  const double step = c.grid_step > 0.0 ? c.grid_step : 1.0 / dd;
  return World{std::move(inst), std::move(schedule), std::move(cache),
               std::move(x0), horizon, step};
}

std::string Tag(double sigma) {
  std::ostringstream out;
  out << "sigma" << sigma;
  return out.str();
}

bool Wants(const ExperimentConfig& c, const std::string& format) {
  return std::find(c.formats.begin(), c.formats.end(), format) != c.formats.end();
}

json Manifest(const std::string& command, const ExperimentConfig& c,
              const World& w) {
  json m;
  m["command"] = command;
  m["config"] = c.source;
  m["config_hash"] = c.hash;
  m["timestamp"] = UtcTimestamp();
  m["instance_hash"] = w.instance.Hash();
  m["instance_source"] = w.instance.source;
  m["d"] = w.instance.dim;
  m["n"] = w.instance.n_samples;
  m["delta"] = w.instance.delta;
  m["noise_std"] = w.instance.noise_std;
  m["noise_second_moment"] = w.instance.noise_second_moment;
  m["schedule"] = w.schedule.Describe();
  m["horizon"] = w.horizon;
  m["grid_step"] = w.grid_step;
  m["seeds"] = {{"data", c.data_seed},
                {"run", c.seed},
                {"x0", c.x0_seed},
                {"pairs", c.pair_seed},
                {"doob", c.doob_seed}};
  return m;
}

void CheckReleaseTimes(const ExperimentConfig& c, double horizon) {
  for (const double t : c.release_times) {
    if (t > horizon * (1.0 + 1e-12)) {
      throw Error(ErrorCode::kConfig,
                  c.source + ": [release] times: " + FormatDouble(t) +
                      " exceeds the horizon " + FormatDouble(horizon));
    }
  }
}

std::vector<NeighborPair> LoadPairsFile(const std::string& path,
                                        Eigen::Index d) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::vector<NeighborPair> pairs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      values.push_back(std::strtod(cell.c_str(), &end));
      if (end == cell.c_str()) numeric = false;
    }
    if (!numeric && pairs.empty()) continue;  // header
    if (!numeric || static_cast<Eigen::Index>(values.size()) != 2 * d + 2) {
      throw Error(ErrorCode::kConfig, path + ":" + std::to_string(line_no) +
                                          ": expected " +
                                          std::to_string(2 * d + 2) +
                                          " numbers (a, b, a', b')");
    }
    NeighborPair p;
    p.a = Eigen::Map<Vector>(values.data(), d);
    p.b = values[static_cast<std::size_t>(d)];
    p.a_prime = Eigen::Map<Vector>(values.data() + d + 1, d);
    p.b_prime = values[static_cast<std::size_t>(2 * d + 1)];
    pairs.push_back(std::move(p));
  }
  return pairs;
}

int CmdRiskCurve(const ExperimentConfig& c, const CliOptions& o,
                 const World& w, std::ostream& log) {
  json manifest = Manifest("risk-curve", c, w);
  const double dd = static_cast<double>(w.instance.dim);
  for (const double sigma : c.sigmas) {
    const RiskCurves curves = SolveVolterra(w.instance, w.cache, w.schedule,
                                            w.x0, sigma, w.horizon, w.grid_step);
    const std::string tag = Tag(sigma);
    json entry;
    entry["sigma"] = sigma;
    entry["volterra_inputs_hash"] = curves.inputs_hash;
    entry["P_final"] = curves.P(curves.P.size() - 1);
    entry["R_final"] = curves.R(curves.R.size() - 1);

    CsvTable volterra({"t", "P", "R"});
    for (std::size_t j = 0; j < curves.grid.size(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      volterra.NewRow() << curves.grid[j] << curves.P(jj) << curves.R(jj);
    }
    const std::string vpath = "volterra_" + tag + ".csv";
    volterra.Write((fs::path(o.out_dir) / vpath).string(), c.hash);
    entry["volterra_csv"] = vpath;

    SgdOptions sgd;
    sgd.sigma = sigma;
    sgd.seed = ReplicaSeed(c.seed, 0);
    sgd.shuffle = c.shuffle;
    sgd.record_stride = c.record_stride;
    const SgdTrajectory run = RunSgd(w.instance, w.schedule, w.x0, sgd);
    CsvTable single({"k", "t", "P", "R"});
    double sup_gap = 0.0;
    for (std::size_t k = 0; k < run.steps.size(); ++k) {
      single.NewRow() << run.steps[k] << run.times[k] << run.P[k] << run.R[k];
      const double t = static_cast<double>(run.steps[k]) / dd;
      if (t <= curves.horizon()) {
        sup_gap = std::max(sup_gap, std::abs(run.P[k] - curves.InterpolateP(t)));
      }
    }
    const std::string spath = "sgd_" + tag + ".csv";
    single.Write((fs::path(o.out_dir) / spath).string(), c.hash);
    entry["sgd_csv"] = spath;
    entry["sgd_seed"] = sgd.seed;
    entry["sup_gap_sgd_vs_volterra"] = sup_gap;

    if (c.replicas > 1) {
      const EnsembleSummary ens =
          RunEnsemble(w.instance, w.schedule, w.x0, sigma, c.seed, c.replicas,
                      c.shuffle, c.record_stride, o.threads);
      CsvTable table({"k", "t", "mean_P", "se_P", "mean_R", "se_R"});
      double worst_z = 0.0;
      for (std::size_t k = 0; k < ens.steps.size(); ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        const double se_r = std::sqrt(ens.var_R(kk) / static_cast<double>(c.replicas));
        table.NewRow() << ens.steps[k] << ens.times[k] << ens.mean_P(kk)
                       << ens.StandardErrorP(kk) << ens.mean_R(kk) << se_r;
        const double t = ens.times[k];
        if (t <= curves.horizon() && ens.StandardErrorP(kk) > 0.0) {
          worst_z = std::max(worst_z, std::abs(ens.mean_P(kk) - curves.InterpolateP(t)) /
                                          ens.StandardErrorP(kk));
        }
      }
      const std::string epath = "ensemble_" + tag + ".csv";
      table.Write((fs::path(o.out_dir) / epath).string(), c.hash);
      entry["ensemble_csv"] = epath;
      entry["ensemble_replicas"] = c.replicas;
      entry["ensemble_max_abs_z"] = worst_z;
    }
    log << "risk-curve " << tag << ": P(T)=" << FormatDouble(entry["P_final"])
        << " sup-gap=" << FormatDouble(sup_gap) << '\n';
    manifest["runs"].push_back(entry);
  }
  WriteJsonFile(manifest, (fs::path(o.out_dir) / "manifest_risk-curve.json").string());
  return kExitOk;
}

int CmdPrivacy(const ExperimentConfig& c, const CliOptions& o, const World& w,
               std::ostream& log) {
  CheckReleaseTimes(c, w.horizon);
  const std::string strategy = o.strategy.empty() ? c.strategy : o.strategy;
  if (strategy != "last" && strategy != "iterates" && strategy != "average") {
    throw Error(ErrorCode::kConfig, "--strategy must be last, iterates or average");
  }
  if (strategy != "last" && c.release_times.empty()) {
    throw Error(ErrorCode::kConfig,
                c.source + ": [release] times is required for strategy " + strategy);
  }
  json manifest = Manifest("privacy", c, w);
  manifest["strategy"] = strategy;
  manifest["engine"] = c.engine;
  manifest["epsilon_is_upper_bound"] = true;

  std::vector<ScoredPair> scored =
      AdversarialPairs(w.instance, c.top_pairs, c.pair_seed);
  std::vector<NeighborPair> pairs;
  CsvTable pair_table({"pair_index", "first", "second", "score"});
  for (std::size_t p = 0; p < scored.size(); ++p) {
    pairs.push_back(scored[p].pair);
    pair_table.NewRow() << static_cast<std::int64_t>(p) << scored[p].first
                        << scored[p].second << scored[p].score;
  }
  if (!c.pairs_file.empty()) {
    for (auto& p : LoadPairsFile(c.pairs_file, w.instance.d())) {
      pair_table.NewRow() << static_cast<std::int64_t>(pairs.size()) << "-1"
                          << "-1" << PairScoreVector(p, w.instance.delta).norm();
      pairs.push_back(std::move(p));
    }
  }
  pair_table.Write((fs::path(o.out_dir) / "privacy_pairs.csv").string(), c.hash);

  std::vector<ReleaseSpec> releases;
  if (strategy == "last") {
    std::vector<double> times = c.release_times;
    if (times.empty()) {
      for (std::int64_t k = 1; k <= c.curve_points; ++k) {
        times.push_back(w.horizon * static_cast<double>(k) /
                        static_cast<double>(c.curve_points));
      }
    }
    for (const double t : times) releases.push_back(ReleaseSpec::LastIterate(t));
  } else if (strategy == "iterates") {
    releases.push_back(ReleaseSpec::Iterates(c.release_times));
  } else {
    releases.push_back(ReleaseSpec::Average(c.release_times));
  }

  PrivacyOptions options;
  options.engine =
      c.engine == "dense" ? PrivacyEngine::kDense : PrivacyEngine::kStructured;
  options.max_block_dim = c.max_block_dim;
  options.threads = o.threads;
  const std::vector<double> s_grid = DefaultSGrid(w.instance.dim, w.horizon);

  CsvTable eps_table({"t", "alpha", "sigma", "epsilon", "argmax_pair_index", "worst_s"});
  eps_table.AddComment("epsilon is the mixture-bound right-hand side, an upper bound");
  json report;
  report["epsilon_is_upper_bound"] = true;
  report["s_grid"] = s_grid;
  for (const double sigma : c.sigmas) {
    const RiskCurves curves = SolveVolterra(w.instance, w.cache, w.schedule,
                                            w.x0, sigma, w.horizon, w.grid_step);
    const LawTrack track(w.instance, w.cache, w.schedule, curves, w.x0, sigma);
    const PrivacyModel model(track, options);
    CsvTable dump({"t", "alpha", "s", "divergence", "argmax_pair_index"});
    for (const ReleaseSpec& spec : releases) {
      const auto results = RdpRelease(model, pairs, c.alphas, spec, s_grid, w.horizon);
      for (const RdpResult& r : results) {
        eps_table.NewRow() << spec.last() << r.alpha << sigma << r.epsilon
                           << r.worst_pair << r.worst_s;
        json item;
        item["sigma"] = sigma;
        item["alpha"] = r.alpha;
        item["strategy"] = ReleaseKindName(spec.kind);
        item["times"] = spec.times;
        item["epsilon"] = r.epsilon;
        item["worst_s"] = r.worst_s;
        item["worst_pair"] = r.worst_pair;
        item["max_jitter"] = r.max_jitter;
        item["divergence"] = r.divergence;
        item["argmax_pair"] = r.argmax_pair;
        report["releases"].push_back(item);
        if (o.dump_divergences) {
          for (std::size_t k = 0; k < r.s_grid.size(); ++k) {
            dump.NewRow() << spec.last() << r.alpha << r.s_grid[k]
                          << r.divergence[k] << r.argmax_pair[k];
          }
        }
        log << "privacy " << Tag(sigma) << " alpha=" << r.alpha
            << " t=" << FormatDouble(spec.last())
            << " eps=" << FormatDouble(r.epsilon) << '\n';
      }
    }
    if (o.dump_divergences) {
      dump.Write((fs::path(o.out_dir) / ("divergences_" + strategy + "_" +
                                         Tag(sigma) + ".csv"))
                     .string(),
                 c.hash);
    }
  }
  if (Wants(c, "csv")) {
    eps_table.Write((fs::path(o.out_dir) / ("privacy_" + strategy + ".csv")).string(),
                    c.hash);
  }
  if (Wants(c, "json")) {
    report["config_hash"] = c.hash;
    WriteJsonFile(report,
                  (fs::path(o.out_dir) / ("privacy_" + strategy + ".json")).string());
  }
  WriteJsonFile(manifest, (fs::path(o.out_dir) / "manifest_privacy.json").string());
  return kExitOk;
}

void WriteQq(const QqResult& qq, const std::string& path, const std::string& hash) {
  CsvTable table({"index", "chi2_quantile", "mahalanobis2"});
  table.AddComment("slope=" + FormatDouble(qq.slope) +
                   " intercept=" + FormatDouble(qq.intercept));
  for (std::size_t i = 0; i < qq.empirical.size(); ++i) {
    table.NewRow() << static_cast<std::int64_t>(i) << qq.theoretical[i]
                   << qq.empirical[i];
  }
  table.Write(path, hash);
}

int CmdQq(const ExperimentConfig& c, const CliOptions& o, const World& w,
          std::ostream& log) {
  json manifest = Manifest("qq", c, w);
  const double horizon =
      static_cast<double>(w.instance.n_samples) / static_cast<double>(w.instance.dim);
  for (const double sigma : c.sigmas) {
    const RiskCurves curves = SolveVolterra(w.instance, w.cache, w.schedule,
                                            w.x0, sigma, horizon, w.grid_step);
    const LawTrack track(w.instance, w.cache, w.schedule, curves, w.x0, sigma);
    const Vector mean = track.MeanEigen(horizon);
    const Vector var = track.VarianceEigen(horizon);
    const std::string tag = Tag(sigma);
    if (Wants(c, "json")) {
      SaveLawJson(track.Law(horizon), horizon, sigma, curves.inputs_hash,
                  (fs::path(o.out_dir) / ("law_" + tag + ".json")).string());
    }
    const EnsembleSummary ens =
        RunEnsemble(w.instance, w.schedule, w.x0, sigma, c.seed, c.qq_replicas,
                    c.shuffle, 0, o.threads);
    const QqResult qq = MahalanobisQq(w.cache, mean, var, ens.final_iterates);
    WriteQq(qq, (fs::path(o.out_dir) / ("qq_sgd_" + tag + ".csv")).string(), c.hash);
    json entry;
    entry["sigma"] = sigma;
    entry["t"] = horizon;
    entry["replicas"] = c.qq_replicas;
    entry["slope_sgd"] = qq.slope;
    entry["min_law_eigenvalue"] = qq.min_eigenvalue;
    log << "qq " << tag << ": sgd slope=" << FormatDouble(qq.slope) << '\n';
    if (c.qq_control) {
      const Matrix samples =
          SampleDiagonalLaw(w.cache, mean, var, c.qq_replicas, c.seed);
      const QqResult control = MahalanobisQq(w.cache, mean, var, samples);
      WriteQq(control,
              (fs::path(o.out_dir) / ("qq_law_" + tag + ".csv")).string(), c.hash);
      entry["slope_law"] = control.slope;
      log << "qq " << tag << ": law slope=" << FormatDouble(control.slope) << '\n';
    }
    manifest["runs"].push_back(entry);
  }
  WriteJsonFile(manifest, (fs::path(o.out_dir) / "manifest_qq.json").string());
  return kExitOk;
}

int CmdGenData(const ExperimentConfig& c, const CliOptions& o, const World& w,
               std::ostream& log) {
  const std::string json_path = (fs::path(o.out_dir) / "instance.json").string();
  SaveInstanceJson(w.instance, json_path);
  std::vector<std::string> columns;
  for (std::int64_t j = 0; j < w.instance.dim; ++j) {
    columns.push_back("a" + std::to_string(j));
  }
  columns.push_back("b");
  CsvTable data(columns);
  for (std::int64_t r = 0; r < w.instance.n_samples; ++r) {
    auto& row = data.NewRow();
    for (std::int64_t j = 0; j < w.instance.dim; ++j) row << w.instance.design(r, j);
    row << w.instance.labels(r);
  }
  data.Write((fs::path(o.out_dir) / "data.csv").string(), c.hash);
  json manifest = Manifest("gen-data", c, w);
  manifest["files"] = {"instance.json", "data.csv"};
  WriteJsonFile(manifest, (fs::path(o.out_dir) / "manifest_gen-data.json").string());
  log << "gen-data: d=" << w.instance.dim << " n=" << w.instance.n_samples
      << " hash=" << w.instance.Hash() << '\n';
  return kExitOk;
}

int CmdDoob(const ExperimentConfig& c, const CliOptions& o, const World& w,
            std::ostream& log) {
  if (!w.instance.IsSynthetic()) {
    throw Error(ErrorCode::kConfig,
                c.source + ": doob-check needs a synthetic problem");
  }
  const double t = static_cast<double>(c.doob_step) / static_cast<double>(w.instance.dim);
  const Vector state = GradientFlow(w.instance, w.cache, w.schedule, w.x0, t);
  CsvTable table({"sigma", "k", "sample_mean", "standard_error", "predicted", "z_score"});
  json manifest = Manifest("doob-check", c, w);
  for (const double sigma : c.sigmas) {
    const DoobReport r = DoobDiagnostic(w.instance, w.schedule, state, sigma,
                                        c.doob_step, c.doob_samples, c.doob_seed,
                                        o.threads);
    table.NewRow() << sigma << c.doob_step << r.sample_mean << r.standard_error
                   << r.predicted << r.z_score;
    manifest["runs"].push_back({{"sigma", sigma}, {"z_score", r.z_score}});
    log << "doob-check " << Tag(sigma) << ": z=" << FormatDouble(r.z_score) << '\n';
  }
  table.Write((fs::path(o.out_dir) / "doob.csv").string(), c.hash);
  WriteJsonFile(manifest, (fs::path(o.out_dir) / "manifest_doob-check.json").string());
  return kExitOk;
}

int CmdSweep(const ExperimentConfig& c, const CliOptions& o, const World& w,
             std::ostream& log) {
  CsvTable table({"d", "sigma", "run", "sup_gap"});
  json manifest = Manifest("equivalence-sweep", c, w);
  for (const double dv : c.sweep_dims) {
    const auto d = static_cast<std::int64_t>(dv);
    const auto n = std::max<std::int64_t>(1, std::llround(c.sweep_n_ratio * dv));
    const ProblemInstance inst =
        GenerateSynthetic(d, n, NoiseStd(c, d), c.delta, c.data_seed);
    const Schedule schedule = MakeSchedule(c, d);
    const SpectralCache cache = SpectralCache::Build(inst.covariance, inst.delta);
    const Vector x0 = MakeX0(c, inst);
    for (const double sigma : c.sigmas) {
      const auto gaps = PairedSupGaps(inst, cache, schedule, x0, sigma, c.seed,
                                      c.sweep_seeds, c.shuffle, o.threads);
      for (std::size_t r = 0; r < gaps.size(); ++r) {
        table.NewRow() << d << sigma << static_cast<std::int64_t>(r) << gaps[r];
      }
      const double median = Median(gaps);
      manifest["medians"].push_back({{"d", d}, {"sigma", sigma}, {"median_sup_gap", median}});
      log << "equivalence-sweep d=" << d << ' ' << Tag(sigma)
          << ": median sup-gap=" << FormatDouble(median) << '\n';
    }
  }
  table.Write((fs::path(o.out_dir) / "equivalence_sweep.csv").string(), c.hash);
  WriteJsonFile(manifest,
                (fs::path(o.out_dir) / "manifest_equivalence-sweep.json").string());
  return kExitOk;
}

}  // namespace

const std::vector<std::string>& CommandNames() {
  static const std::vector<std::string> names{
      "risk-curve", "privacy", "qq", "gen-data", "doob-check", "equivalence-sweep"};
  return names;
}

int RunCommand(const CliOptions& options, std::ostream& log) {
  try {
    const IniFile ini = IniFile::Load(options.config_path);
    ExperimentConfig config = LoadExperimentConfig(ini);
    CliOptions o = options;
    if (o.out_dir.empty()) o.out_dir = config.out_dir;
    if (o.threads < 1) o.threads = 1;
    {
      // Overrides that change outputs are part of the provenance hash.
      Fingerprint fp;
      fp.Add(std::string_view(config.hash)).Add(std::string_view(o.strategy));
      fp.Add(static_cast<std::int64_t>(o.empirical_covariance));
      config.hash = fp.Hex();
    }
    fs::create_directories(o.out_dir);
    const World world = BuildWorld(config, o.empirical_covariance);
    const auto& cmd = o.command;
    if (cmd == "risk-curve") return CmdRiskCurve(config, o, world, log);
    if (cmd == "privacy") return CmdPrivacy(config, o, world, log);
    if (cmd == "qq") return CmdQq(config, o, world, log);
    if (cmd == "gen-data") return CmdGenData(config, o, world, log);
    if (cmd == "doob-check") return CmdDoob(config, o, world, log);
    if (cmd == "equivalence-sweep") return CmdSweep(config, o, world, log);
    log << "error: unknown command '" << cmd << "'\n";
    return kExitConfig;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return IsNumericalFailure(e.code()) ? kExitNumerical : kExitConfig;
  } catch (const std::exception& e) {
    log << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

int RunCli(int argc, char** argv) {
  CLI::App app{"Noisy SGD / HSGD risk and Renyi-DP experiments"};
  app.require_subcommand(1);
  CliOptions options;
  for (const auto& name : CommandNames()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", options.config_path, "experiment config file")
        ->required();
    sub->add_option("--out", options.out_dir, "output directory");
    sub->add_option("--threads", options.threads, "worker threads")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--dump-divergences", options.dump_divergences,
                  "write per-s divergences (privacy)");
    sub->add_option("--strategy", options.strategy,
                    "release strategy override: last, iterates or average");
    sub->add_flag("--empirical-covariance", options.empirical_covariance,
                  "use the Gram matrix of the data as Sigma");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  options.command = app.get_subcommands().front()->get_name();
  return RunCommand(options, std::cerr);
}

}  // namespace hsgd::cli
