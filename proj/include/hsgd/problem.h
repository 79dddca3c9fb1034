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

#ifndef HSGD_PROBLEM_H_
#define HSGD_PROBLEM_H_

#include <cstdint>
#include <string>

#include "hsgd/common.h"
#include "hsgd/rng.h"
#include "hsgd/schedule.h"
#include "hsgd/spectral.h"

namespace hsgd {

// Regularized least squares min_x E[(a^T x - b)^2] / 2 + delta/2 |x|^2 with a
// finite sample of n records for one-pass SGD.
struct ProblemInstance {
  std::int64_t dim = 0;
  std::int64_t n_samples = 0;
  RowMatrix design;  // n x d, row i is record a_i
  Vector labels;     // n
  Vector ground_truth;
  // Std of the label noise before clipping at +-3 std.
  double noise_std = 0.0;
  // E[w^2] of the clipped noise; enters P(x) and the Volterra source.
  double noise_second_moment = 0.0;
  double delta = 0.0;
  Matrix covariance;  // population Sigma = E[a a^T]
  std::uint64_t seed = 0;
  // "synthetic" or the path of the CSV the instance came from.
  std::string source = "synthetic";

  Eigen::Index d() const { return static_cast<Eigen::Index>(dim); }
  // True when features follow the iid Unif(0, 1/sqrt(d)) model, so fresh
  // records can be drawn.
  bool IsSynthetic() const { return source == "synthetic"; }

  // Provenance hash of every numeric field.
  std::string Hash() const;
};

// E[w^2] for w = clamp(N(0, std^2), -clip*std, clip*std).
double ClippedGaussianSecondMoment(double std, double clip = 3.0);

// Synthetic instance: features and ground truth iid Unif(0, 1/sqrt(d)),
// labels a^T x~ + w with w ~ N(0, noise_std^2) clipped at +-3 noise_std, and
// Sigma = 1/(4d) 11^T + 1/(12d) I, the exact second moment of the features.
ProblemInstance GenerateSynthetic(std::int64_t d, std::int64_t n,
                                  double noise_std, double delta,
                                  std::uint64_t seed);

// Replaces the population covariance by the Gram matrix A^T A / n.
void UseEmpiricalCovariance(ProblemInstance& instance);

// P(x) = 1/2 (x - x~)^T Sigma (x - x~) + 1/2 E[w^2], and
// R(x) = P(x) + delta/2 |x|^2 when regularized is set.
double PopulationRisk(const ProblemInstance& instance, const Vector& x,
                      bool regularized = false);

// Same risks for a point given in the eigenbasis of the cache. O(d).
class EigenRisk {
 public:
  EigenRisk(const ProblemInstance& instance, const SpectralCache& cache);

  double P(const Vector& y) const;
  double R(const Vector& y) const;
  const Vector& ground_truth() const { return truth_; }

 private:
  Vector mu_;
  Vector truth_;
  double noise_half_ = 0.0;
  double delta_ = 0.0;
};

// Gradient flow dX = -gamma(t) grad R(X) dt started at x0. In the eigenbasis
// the integral over u reduces to one over Gamma, so the closed form
// (1 - exp(-lambda Gamma(t))) / lambda holds for every schedule.
Vector GradientFlow(const ProblemInstance& instance, const SpectralCache& cache,
                    const Schedule& schedule, const Vector& x0, double t);
// Same, returned in eigen coordinates.
Vector GradientFlowEigen(const ProblemInstance& instance,
                         const SpectralCache& cache, const Schedule& schedule,
                         const Vector& x0, double t);

// Fresh records from the synthetic feature/label law, for Monte Carlo checks.
class RecordSampler {
 public:
  RecordSampler(const ProblemInstance& instance, std::uint64_t key);

  // Fills a with a feature row and returns the label noise w, so that the
  // label is a^T x~ + w.
  double Draw(Vector& a);

 private:
  Philox4x32 engine_;
  std::uniform_real_distribution<double> feature_;
  std::normal_distribution<double> noise_;
  double clip_ = 0.0;
};

// Reads "features..., label" rows. Ground truth is the least-squares fit,
// covariance the Gram matrix A^T A / n and noise moment the residual MSE.
ProblemInstance LoadCsvInstance(const std::string& path, double delta);

// JSON container: dims, seed and flat row-major float64 arrays.
void SaveInstanceJson(const ProblemInstance& instance, const std::string& path);
ProblemInstance LoadInstanceJson(const std::string& path);

}  // namespace hsgd

#endif  // HSGD_PROBLEM_H_
