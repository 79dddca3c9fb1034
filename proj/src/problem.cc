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

#include "hsgd/problem.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

#include "json.hpp"

namespace hsgd {

std::string ProblemInstance::Hash() const {
  Fingerprint fp;
  fp.Add(dim).Add(n_samples).Add(noise_std).Add(noise_second_moment).Add(delta);
  fp.Add(static_cast<std::int64_t>(seed)).Add(std::string_view(source));
  fp.Add(design).Add(labels).Add(ground_truth).Add(covariance);
  return fp.Hex();
}

double ClippedGaussianSecondMoment(double std, double clip) {
  if (std == 0.0) return 0.0;
  const double density = std::exp(-0.5 * clip * clip) / std::sqrt(2.0 * std::numbers::pi);
  const double inside = std::erf(clip / std::numbers::sqrt2);
  const double tail = std::erfc(clip / std::numbers::sqrt2);
  // Mass inside contributes its truncated second moment; each tail is moved
  // to the clip point.
  return std * std * (inside - 2.0 * clip * density + clip * clip * tail);
}

ProblemInstance GenerateSynthetic(std::int64_t d, std::int64_t n,
                                  double noise_std, double delta,
                                  std::uint64_t seed) {
  if (d < 1 || n < 1) {
    throw Error(ErrorCode::kInvalidArgument, "d and n must be positive");
  }
  if (!(noise_std >= 0.0) || !(delta >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "noise_std and delta must be nonnegative");
  }
  ProblemInstance inst;
  inst.dim = d;
  inst.n_samples = n;
  inst.noise_std = noise_std;
  inst.noise_second_moment = ClippedGaussianSecondMoment(noise_std);
  inst.delta = delta;
  inst.seed = seed;

  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  std::uniform_real_distribution<double> uniform(0.0, scale);

  Philox4x32 truth_engine(StreamKey(seed, streams::kGroundTruth));
  inst.ground_truth.resize(d);
  for (std::int64_t i = 0; i < d; ++i) inst.ground_truth(i) = uniform(truth_engine);

  Philox4x32 design_engine(StreamKey(seed, streams::kDesign));
  inst.design.resize(n, d);
  for (std::int64_t r = 0; r < n; ++r) {
    for (std::int64_t c = 0; c < d; ++c) inst.design(r, c) = uniform(design_engine);
  }

  GaussianStream noise(StreamKey(seed, streams::kLabelNoise));
  const double clip = 3.0 * noise_std;
  inst.labels = inst.design * inst.ground_truth;
  for (std::int64_t r = 0; r < n; ++r) {
    const double w = std::clamp(noise_std * noise.Next(), -clip, clip);
    inst.labels(r) += w;
  }

  const double dd = static_cast<double>(d);
  inst.covariance = Matrix::Constant(d, d, 1.0 / (4.0 * dd));
  inst.covariance.diagonal().array() += 1.0 / (12.0 * dd);
  return inst;
}

void UseEmpiricalCovariance(ProblemInstance& instance) {
  Matrix gram = Matrix::Zero(instance.d(), instance.d());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(instance.design.transpose());
  gram = gram.selfadjointView<Eigen::Lower>();
  instance.covariance = gram / static_cast<double>(instance.n_samples);
}

double PopulationRisk(const ProblemInstance& instance, const Vector& x,
                      bool regularized) {
  if (x.size() != instance.d()) {
    throw Error(ErrorCode::kDimensionMismatch, "risk point has wrong length");
  }
  const Vector diff = x - instance.ground_truth;
  double p = 0.5 * diff.dot(instance.covariance * diff) +
             0.5 * instance.noise_second_moment;
  if (regularized) p += 0.5 * instance.delta * x.squaredNorm();
  return p;
}

EigenRisk::EigenRisk(const ProblemInstance& instance,
                     const SpectralCache& cache)
    : mu_(cache.sigma_eigvals()),
      truth_(cache.ToEigen(instance.ground_truth)),
      noise_half_(0.5 * instance.noise_second_moment),
      delta_(instance.delta) {}

double EigenRisk::P(const Vector& y) const {
  return 0.5 * (mu_.array() * (y - truth_).array().square()).sum() +
         noise_half_;
}

double EigenRisk::R(const Vector& y) const {
  return P(y) + 0.5 * delta_ * y.squaredNorm();
}

Vector GradientFlowEigen(const ProblemInstance& instance,
                         const SpectralCache& cache, const Schedule& schedule,
                         const Vector& x0, double t) {
  if (t < 0.0) throw Error(ErrorCode::kTimeOrder, "gradient flow needs t >= 0");
  if (x0.size() != instance.d()) {
    throw Error(ErrorCode::kDimensionMismatch, "x0 has wrong length");
  }
  const double big_gamma = schedule.Integral(t);
  const Vector y0 = cache.ToEigen(x0);
  const Vector target = cache.sigma_eigvals().cwiseProduct(
      cache.ToEigen(instance.ground_truth));
  Vector y(y0.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double lambda = cache.eigvals()(i);
    const double decay = std::exp(-lambda * big_gamma);
    // (1 - e^{-lambda Gamma}) / lambda, Gamma in the lambda -> 0 limit.
    const double gain =
        lambda > 0.0 ? -std::expm1(-lambda * big_gamma) / lambda : big_gamma;
    y(i) = decay * y0(i) + gain * target(i);
  }
  return y;
}

Vector GradientFlow(const ProblemInstance& instance, const SpectralCache& cache,
                    const Schedule& schedule, const Vector& x0, double t) {
  return cache.FromEigen(GradientFlowEigen(instance, cache, schedule, x0, t));
}

RecordSampler::RecordSampler(const ProblemInstance& instance, std::uint64_t key)
    : engine_(key),
      feature_(0.0, 1.0 / std::sqrt(static_cast<double>(instance.dim))),
      noise_(0.0, 1.0),
      clip_(3.0 * instance.noise_std) {
  if (!instance.IsSynthetic()) {
    throw Error(ErrorCode::kInvalidArgument,
                "fresh records need the synthetic feature law");
  }
  noise_ = std::normal_distribution<double>(0.0, instance.noise_std > 0.0
                                                     ? instance.noise_std
                                                     : 1.0);
}

double RecordSampler::Draw(Vector& a) {
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = feature_(engine_);
  if (clip_ == 0.0) return 0.0;
  return std::clamp(noise_(engine_), -clip_, clip_);
}

namespace {

bool ParseRow(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    while (end && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
    if (end == begin || (end && *end != '\0')) return false;
    out.push_back(v);
  }
  return !out.empty();
}

}  // namespace

ProblemInstance LoadCsvInstance(const std::string& path, double delta) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::vector<double> row;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!ParseRow(line, row)) {
      // A single non-numeric first row is a header.
      if (rows.empty()) continue;
      throw Error(ErrorCode::kIo,
                  path + ":" + std::to_string(line_no) + ": non-numeric row");
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::kIo, path + ":" + std::to_string(line_no) +
                                      ": ragged row");
    }
    rows.push_back(row);
  }
  if (rows.size() < 2 || rows.front().size() < 2) {
    throw Error(ErrorCode::kIo, path + ": need >= 2 rows and >= 2 columns");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = static_cast<Eigen::Index>(rows.front().size()) - 1;
  ProblemInstance inst;
  inst.dim = d;
  inst.n_samples = n;
  inst.delta = delta;
  inst.source = path;
  inst.design.resize(n, d);
  inst.labels.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) inst.design(r, c) = rows[r][c];
    inst.labels(r) = rows[r][d];
  }
  const Matrix design = inst.design;
  inst.ground_truth = design.completeOrthogonalDecomposition().solve(inst.labels);
  const Vector residual = inst.labels - design * inst.ground_truth;
  inst.noise_second_moment = residual.squaredNorm() / static_cast<double>(n);
  inst.noise_std = std::sqrt(inst.noise_second_moment);
  UseEmpiricalCovariance(inst);
  return inst;
}

namespace {

template <typename M>
std::vector<double> Flatten(const M& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  }
  return out;
}

template <typename M>
void Unflatten(const nlohmann::json& j, Eigen::Index rows, Eigen::Index cols,
               M& out) {
  const auto flat = j.get<std::vector<double>>();
  if (static_cast<Eigen::Index>(flat.size()) != rows * cols) {
    throw Error(ErrorCode::kIo, "array length does not match dims");
  }
  out.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = flat[r * cols + c];
  }
}

}  // namespace

void SaveInstanceJson(const ProblemInstance& inst, const std::string& path) {
  nlohmann::json j;
  j["format"] = "hsgd-instance";
  j["version"] = 1;
  j["dtype"] = "float64";
  j["layout"] = "row-major";
  j["dim"] = inst.dim;
  j["n_samples"] = inst.n_samples;
  j["seed"] = inst.seed;
  j["source"] = inst.source;
  j["noise_std"] = inst.noise_std;
  j["noise_second_moment"] = inst.noise_second_moment;
  j["delta"] = inst.delta;
  j["design"] = Flatten(inst.design);
  j["labels"] = Flatten(inst.labels);
  j["ground_truth"] = Flatten(inst.ground_truth);
  j["covariance"] = Flatten(inst.covariance);
  j["hash"] = inst.Hash();
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << j.dump() << '\n';
}

ProblemInstance LoadInstanceJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
    if (j.at("format") != "hsgd-instance") {
      throw Error(ErrorCode::kIo, path + ": not an instance container");
    }
    ProblemInstance inst;
    inst.dim = j.at("dim").get<std::int64_t>();
    inst.n_samples = j.at("n_samples").get<std::int64_t>();
    inst.seed = j.at("seed").get<std::uint64_t>();
    inst.source = j.at("source").get<std::string>();
    inst.noise_std = j.at("noise_std").get<double>();
    inst.noise_second_moment = j.at("noise_second_moment").get<double>();
    inst.delta = j.at("delta").get<double>();
    const Eigen::Index n = inst.n_samples, d = inst.dim;
    Unflatten(j.at("design"), n, d, inst.design);
    Unflatten(j.at("labels"), n, 1, inst.labels);
    Unflatten(j.at("ground_truth"), d, 1, inst.ground_truth);
    Unflatten(j.at("covariance"), d, d, inst.covariance);
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, path + ": " + e.what());
  }
}

}  // namespace hsgd
