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

#ifndef HSGD_SGD_H_
#define HSGD_SGD_H_

#include <cstdint>
#include <vector>

#include "hsgd/common.h"
#include "hsgd/problem.h"
#include "hsgd/schedule.h"

namespace hsgd {

struct SgdOptions {
  double sigma = 0.0;
  std::uint64_t seed = 0;
  // Number of one-pass steps; 0 means all n records.
  std::int64_t steps = 0;
  // Risk is recorded every `record_stride` steps plus at the last step;
  // 0 selects max(1, d / 10).
  std::int64_t record_stride = 0;
  // Visit records in a seeded uniform random order instead of 0..n-1.
  bool shuffle = false;
  // Keep the iterate at every recorded step.
  bool record_iterates = false;
};

struct SgdTrajectory {
  std::vector<std::int64_t> steps;  // recorded k
  std::vector<double> times;        // k / d
  std::vector<double> P;
  std::vector<double> R;
  Matrix iterates;  // rows at recorded steps when requested
  Vector final_iterate;
  std::uint64_t seed = 0;
  double sigma = 0.0;
};

// One pass of noisy SGD:
// x_{k+1} = x_k - eta_k [(a a^T + delta I) x_k - b a + sigma Z_k],
// eta_k = gamma(k/d) / d. Throws ExhaustedData if steps > n.
SgdTrajectory RunSgd(const ProblemInstance& instance, const Schedule& schedule,
                     const Vector& x0, const SgdOptions& options);

struct EnsembleSummary {
  std::vector<std::int64_t> steps;
  std::vector<double> times;
  Vector mean_P, var_P;  // var is the unbiased sample variance
  Vector mean_R, var_R;
  Matrix final_iterates;  // replicas x d
  std::int64_t replicas = 0;

  double StandardErrorP(Eigen::Index k) const {
    return std::sqrt(var_P(k) / static_cast<double>(replicas));
  }
};

// Seed used by replica r of an ensemble.
std::uint64_t ReplicaSeed(std::uint64_t base_seed, std::int64_t replica);

// Independent replicas (seed ReplicaSeed(base_seed, r)), reduced in replica
// order with compensated summation so the summary does not depend on the
// thread count.
EnsembleSummary RunEnsemble(const ProblemInstance& instance,
                            const Schedule& schedule, const Vector& x0,
                            double sigma, std::uint64_t base_seed,
                            std::int64_t replicas, bool shuffle,
                            std::int64_t record_stride = 0, int threads = 1);

struct DoobReport {
  double sample_mean = 0.0;
  double standard_error = 0.0;
  double predicted = 0.0;  // exact conditional expectation of the increment
  double z_score = 0.0;
  std::int64_t samples = 0;
};

// Monte Carlo check of the predictable part of the one-step increment of
// q(v) = |v|^2 / 2, v = x - x~, at step k from state x_state. Fresh records
// come from the synthetic feature law.
DoobReport DoobDiagnostic(const ProblemInstance& instance,
                          const Schedule& schedule, const Vector& x_state,
                          double sigma, std::int64_t k,
                          std::int64_t mc_samples, std::uint64_t seed,
                          int threads = 1);

// E[|a|^2 (a^T v)^2] for iid Unif(0, c) coordinates.
double UniformQuarticMoment(const Vector& v, double c);

}  // namespace hsgd

#endif  // HSGD_SGD_H_
