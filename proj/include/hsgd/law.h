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

#ifndef HSGD_LAW_H_
#define HSGD_LAW_H_

#include <cstdint>
#include <vector>

#include "hsgd/common.h"
#include "hsgd/problem.h"
#include "hsgd/schedule.h"
#include "hsgd/spectral.h"
#include "hsgd/volterra.h"

namespace hsgd {

// N(mean, cov).
template <typename Scalar>
struct GaussianLaw {
  VectorX<Scalar> mean;
  MatrixX<Scalar> cov;

  Eigen::Index dim() const { return mean.size(); }

  // Throws NotSymmetric or NegativeEigenvalue when the covariance is not a
  // covariance.
  void Validate() const {
    if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "law mean/cov sizes differ");
    }
    const Scalar norm = cov.norm();
    if ((cov - cov.transpose()).norm() > Scalar(1e-10) * std::max(norm, Scalar(1))) {
      throw Error(ErrorCode::kNotSymmetric, "law covariance not symmetric");
    }
    if (mean.size() == 0) return;
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(cov,
                                                         Eigen::EigenvaluesOnly);
    if (solver.eigenvalues()(0) < Scalar(-1e-10) * norm) {
      throw Error(ErrorCode::kNegativeEigenvalue,
                  "law covariance has a negative eigenvalue");
    }
  }
};

// The law of the linearized HSGD process along a Volterra grid. The
// covariance stays diagonal in the eigenbasis of A, with per-mode variance
// v_i(t) = int_0^t gamma^2(u) e^{-2 lambda_i (Gamma(t)-Gamma(u))}
//          (2 P_u mu_i + sigma^2) / d du,
// integrated with the same product rule as the Volterra solver. The track
// keeps pointers to its inputs, which must outlive it.
class LawTrack {
 public:
  LawTrack(const ProblemInstance& instance, const SpectralCache& cache,
           const Schedule& schedule, const RiskCurves& curves,
           const Vector& x0, double sigma);

  double horizon() const { return curves_->horizon(); }
  double sigma() const { return sigma_; }
  const SpectralCache& cache() const { return *cache_; }
  const Schedule& schedule() const { return *schedule_; }
  const ProblemInstance& instance() const { return *instance_; }
  const RiskCurves& curves() const { return *curves_; }
  const Vector& x0() const { return x0_; }

  // m(t) and v(t) in eigen coordinates. Throw HorizonExceeded.
  Vector MeanEigen(double t) const;
  Vector VarianceEigen(double t) const;
  // Variance injected on (s, t]: v(t) - Phi^2(t,s) v(s), floored at zero.
  Vector NoiseVariance(double s, double t) const;

  // Dense law in the original coordinates.
  GaussianLaw<double> Law(double t) const;

 private:
  const ProblemInstance* instance_;
  const SpectralCache* cache_;
  const Schedule* schedule_;
  const RiskCurves* curves_;
  Vector x0_;
  double sigma_;
  // x0 and Sigma x~ in eigen coordinates.
  Vector y0_;
  Vector target_;
  // Column j holds the per-mode accumulators at grid[j] of
  // int gamma^2 e^{-2 lambda (Gamma(t)-Gamma(u))} times P_u (acc_p_) or 1.
  Matrix acc_p_;
  Matrix acc_1_;
};

// Law of noisy HSGD at time t under the linearized dynamics.
GaussianLaw<double> HsgdLaw(const ProblemInstance& instance,
                            const SpectralCache& cache,
                            const Schedule& schedule, const RiskCurves& curves,
                            const Vector& x0, double sigma, double t);

struct SamplerOptions {
  // Euler steps per unit time; 0 selects 4d. Must be >= d.
  double steps_per_unit_time = 0.0;
  int threads = 1;
  // Record P(X) at every k/d; otherwise only at t_end.
  bool record_risk = true;
  bool record_states = true;
};

struct SamplePaths {
  std::vector<double> record_times;
  // replicas x record_times.size()
  Matrix risk;
  // replicas x d, original coordinates, at t_end.
  Matrix final_states;
};

// Euler-Maruyama on the nonlinear SDE
// dX = -gamma grad R(X) dt + gamma sqrt((2 P(X) Sigma + sigma^2 I) / d) dB,
// run in the eigenbasis of A where the diffusion is diagonal. Replica r uses
// the stream StreamKey(seed, kSdeNoise, r).
SamplePaths SampleHsgdPaths(const ProblemInstance& instance,
                            const SpectralCache& cache,
                            const Schedule& schedule, const Vector& x0,
                            double sigma, std::uint64_t seed, double t_end,
                            std::int64_t replicas,
                            const SamplerOptions& options = {});

// Draws from a law given in the eigenbasis (diagonal covariance).
Matrix SampleDiagonalLaw(const SpectralCache& cache, const Vector& mean_eigen,
                         const Vector& var_eigen, std::int64_t replicas,
                         std::uint64_t seed);

struct QqResult {
  std::vector<double> empirical;    // sorted squared Mahalanobis distances
  std::vector<double> theoretical;  // chi^2_d quantiles at (i - 1/2) / N
  double slope = 0.0;               // OLS slope of empirical on theoretical
  double intercept = 0.0;
  double min_eigenvalue = 0.0;
};

// Squared Mahalanobis distances of the rows of `samples` under the law
// (mean, U diag(var) U^T), compared against chi^2_d quantiles. Throws
// SingularCovariance if some var is not positive.
QqResult MahalanobisQq(const SpectralCache& cache, const Vector& mean_eigen,
                       const Vector& var_eigen, const Matrix& samples);

}  // namespace hsgd

#endif  // HSGD_LAW_H_
