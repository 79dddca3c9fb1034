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

#include "hsgd/sgd.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hsgd/parallel.h"
#include "hsgd/rng.h"

namespace hsgd {

SgdTrajectory RunSgd(const ProblemInstance& instance, const Schedule& schedule,
                     const Vector& x0, const SgdOptions& options) {
  const Eigen::Index d = instance.d();
  if (x0.size() != d) {
    throw Error(ErrorCode::kDimensionMismatch, "x0 has wrong length");
  }
  const std::int64_t steps =
      options.steps > 0 ? options.steps : instance.n_samples;
  if (steps > instance.n_samples) {
    throw Error(ErrorCode::kExhaustedData,
                "requested " + std::to_string(steps) + " steps with " +
                    std::to_string(instance.n_samples) + " records");
  }
  const std::int64_t stride =
      options.record_stride > 0 ? options.record_stride
                                : std::max<std::int64_t>(1, instance.dim / 10);

  std::vector<std::int64_t> order(static_cast<std::size_t>(instance.n_samples));
  std::iota(order.begin(), order.end(), 0);
  if (options.shuffle) {
    Philox4x32 engine(StreamKey(options.seed, streams::kShuffle));
    std::shuffle(order.begin(), order.end(), engine);
  }
  GaussianStream normal(StreamKey(options.seed, streams::kSgdNoise));

  SgdTrajectory out;
  out.seed = options.seed;
  out.sigma = options.sigma;
  std::vector<Vector> kept;
  Vector x = x0;
  Vector z(d);
  auto record = [&](std::int64_t k) {
    out.steps.push_back(k);
    out.times.push_back(static_cast<double>(k) / static_cast<double>(d));
    out.P.push_back(PopulationRisk(instance, x, false));
    out.R.push_back(out.P.back() + 0.5 * instance.delta * x.squaredNorm());
    if (options.record_iterates) kept.push_back(x);
  };
  record(0);
  for (std::int64_t k = 0; k < steps; ++k) {
    const double eta = schedule.StepSize(k, instance.dim);
    const auto a = instance.design.row(order[static_cast<std::size_t>(k)]);
    const double b = instance.labels(order[static_cast<std::size_t>(k)]);
    normal.Fill(z);
    const double residual = a.dot(x) - b;
    // x <- x - eta [(a^T x - b) a + delta x + sigma z]
    x = (1.0 - eta * instance.delta) * x - eta * residual * a.transpose() -
        eta * options.sigma * z;
    if ((k + 1) % stride == 0 || k + 1 == steps) record(k + 1);
  }
  out.final_iterate = x;
  if (options.record_iterates) {
    out.iterates.resize(static_cast<Eigen::Index>(kept.size()), d);
    for (std::size_t r = 0; r < kept.size(); ++r) {
      out.iterates.row(static_cast<Eigen::Index>(r)) = kept[r].transpose();
    }
  }
  return out;
}

std::uint64_t ReplicaSeed(std::uint64_t base_seed, std::int64_t replica) {
  return StreamKey(base_seed, streams::kSgdNoise,
                   static_cast<std::uint64_t>(replica));
}

EnsembleSummary RunEnsemble(const ProblemInstance& instance,
                            const Schedule& schedule, const Vector& x0,
                            double sigma, std::uint64_t base_seed,
                            std::int64_t replicas, bool shuffle,
                            std::int64_t record_stride, int threads) {
  if (replicas < 1) {
    throw Error(ErrorCode::kInvalidArgument, "ensemble needs >= 1 replica");
  }
  std::vector<SgdTrajectory> runs(static_cast<std::size_t>(replicas));
  ParallelFor(replicas, threads, [&](std::int64_t r) {
    SgdOptions options;
    options.sigma = sigma;
    options.seed = ReplicaSeed(base_seed, r);
    options.record_stride = record_stride;
    options.shuffle = shuffle;
    runs[static_cast<std::size_t>(r)] = RunSgd(instance, schedule, x0, options);
  });

  EnsembleSummary out;
  out.replicas = replicas;
  out.steps = runs.front().steps;
  out.times = runs.front().times;
  const auto m = static_cast<Eigen::Index>(out.steps.size());
  out.mean_P.resize(m);
  out.var_P.resize(m);
  out.mean_R.resize(m);
  out.var_R.resize(m);
  const double count = static_cast<double>(replicas);
  for (Eigen::Index k = 0; k < m; ++k) {
    CompensatedSum sp, sr;
    for (const auto& run : runs) {
      sp.Add(run.P[static_cast<std::size_t>(k)]);
      sr.Add(run.R[static_cast<std::size_t>(k)]);
    }
    const double mp = sp.value() / count, mr = sr.value() / count;
    CompensatedSum vp, vr;
    for (const auto& run : runs) {
      vp.Add(std::pow(run.P[static_cast<std::size_t>(k)] - mp, 2));
      vr.Add(std::pow(run.R[static_cast<std::size_t>(k)] - mr, 2));
    }
    out.mean_P(k) = mp;
    out.mean_R(k) = mr;
    out.var_P(k) = replicas > 1 ? vp.value() / (count - 1.0) : 0.0;
    out.var_R(k) = replicas > 1 ? vr.value() / (count - 1.0) : 0.0;
  }
  out.final_iterates.resize(replicas, instance.d());
  for (std::int64_t r = 0; r < replicas; ++r) {
    out.final_iterates.row(r) =
        runs[static_cast<std::size_t>(r)].final_iterate.transpose();
  }
  return out;
}

double UniformQuarticMoment(const Vector& v, double c) {
  const double d = static_cast<double>(v.size());
  const double m1 = c / 2.0, m2 = c * c / 3.0, m3 = std::pow(c, 3) / 4.0,
               m4 = std::pow(c, 4) / 5.0;
  const double s1 = v.sum(), s2 = v.squaredNorm();
  const double cross = s1 * s1 - s2;  // sum over i != j of v_i v_j
  return m4 * s2 + (d - 1.0) * m2 * m2 * s2 + 2.0 * m1 * m3 * cross +
         (d - 2.0) * m1 * m1 * m2 * cross;
}

DoobReport DoobDiagnostic(const ProblemInstance& instance,
                          const Schedule& schedule, const Vector& x_state,
                          double sigma, std::int64_t k,
                          std::int64_t mc_samples, std::uint64_t seed,
                          int threads) {
  const Eigen::Index d = instance.d();
  if (x_state.size() != d) {
    throw Error(ErrorCode::kDimensionMismatch, "state has wrong length");
  }
  if (mc_samples < 2) {
    throw Error(ErrorCode::kInvalidArgument, "need >= 2 Monte Carlo samples");
  }
  const double dd = static_cast<double>(d);
  const double eta = schedule.StepSize(k, instance.dim);
  const Vector v = x_state - instance.ground_truth;
  const Vector shifted = x_state;  // v + x~
  const double delta = instance.delta;

  // Conditional expectation of -eta v^T g + eta^2 |g|^2 / 2.
  const Vector sigma_v = instance.covariance * v;
  const double c = 1.0 / std::sqrt(dd);
  const double mean_a2 = dd * c * c / 3.0;
  const double second =
      UniformQuarticMoment(v, c) + mean_a2 * instance.noise_second_moment +
      2.0 * delta * shifted.dot(sigma_v) + delta * delta * shifted.squaredNorm() +
      sigma * sigma * dd;
  DoobReport report;
  report.samples = mc_samples;
  report.predicted =
      -eta * v.dot(sigma_v + delta * shifted) + 0.5 * eta * eta * second;

  // Fixed chunking keeps the estimate independent of the thread count.
  constexpr std::int64_t kChunks = 64;
  std::vector<double> chunk_sum(kChunks, 0.0), chunk_sq(kChunks, 0.0);
  ParallelFor(kChunks, threads, [&](std::int64_t chunk) {
    const std::int64_t begin = mc_samples * chunk / kChunks;
    const std::int64_t end = mc_samples * (chunk + 1) / kChunks;
    const std::uint64_t key =
        StreamKey(seed, streams::kDoob, static_cast<std::uint64_t>(chunk));
    RecordSampler records(instance, key);
    GaussianStream normal(MixBits(key));
    Vector a(d), z(d), g(d);
    CompensatedSum sum, sq;
    for (std::int64_t i = begin; i < end; ++i) {
      const double w = records.Draw(a);
      normal.Fill(z);
      const double b = a.dot(instance.ground_truth) + w;
      g = (a.dot(x_state) - b) * a + delta * x_state + sigma * z;
      const double inc = -eta * v.dot(g) + 0.5 * eta * eta * g.squaredNorm();
      sum.Add(inc);
      sq.Add(inc * inc);
    }
    chunk_sum[static_cast<std::size_t>(chunk)] = sum.value();
    chunk_sq[static_cast<std::size_t>(chunk)] = sq.value();
  });
  CompensatedSum sum, sq;
  for (std::int64_t c2 = 0; c2 < kChunks; ++c2) {
    sum.Add(chunk_sum[static_cast<std::size_t>(c2)]);
    sq.Add(chunk_sq[static_cast<std::size_t>(c2)]);
  }
  const double n = static_cast<double>(mc_samples);
  report.sample_mean = sum.value() / n;
  const double var =
      std::max(0.0, (sq.value() - n * report.sample_mean * report.sample_mean) /
                        (n - 1.0));
  report.standard_error = std::sqrt(var / n);
  const double gap = report.sample_mean - report.predicted;
  if (report.standard_error > 0.0) {
    report.z_score = gap / report.standard_error;
  } else {
    report.z_score = gap == 0.0 ? 0.0 : std::copysign(INFINITY, gap);
  }
  return report;
}

}  // namespace hsgd
