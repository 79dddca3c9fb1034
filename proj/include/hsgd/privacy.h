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

#ifndef HSGD_PRIVACY_H_
#define HSGD_PRIVACY_H_

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "hsgd/common.h"
#include "hsgd/law.h"
#include "hsgd/problem.h"
#include "hsgd/schedule.h"
#include "hsgd/spectral.h"

namespace hsgd {

// The two records in which neighboring datasets differ.
struct NeighborPair {
  Vector a;
  double b = 0.0;
  Vector a_prime;
  double b_prime = 0.0;
};

// The SGD step at time s that uses the differing record, as affine maps
// x -> C_i x + c_i plus N(0, noise_var I).
struct DifferentiatingUpdate {
  double s = 0.0;
  Matrix C1, C2;
  Vector c1, c2;
  double noise_var = 0.0;

  static DifferentiatingUpdate Build(const ProblemInstance& instance,
                                     const Schedule& schedule,
                                     const NeighborPair& pair, double sigma,
                                     double s);
};

enum class ReleaseKind { kLastIterate, kIterates, kAverage };

struct ReleaseSpec {
  ReleaseKind kind = ReleaseKind::kLastIterate;
  std::vector<double> times;

  static ReleaseSpec LastIterate(double t) {
    return {ReleaseKind::kLastIterate, {t}};
  }
  static ReleaseSpec Iterates(std::vector<double> times) {
    return {ReleaseKind::kIterates, std::move(times)};
  }
  static ReleaseSpec Average(std::vector<double> times) {
    return {ReleaseKind::kAverage, std::move(times)};
  }

  double last() const { return times.back(); }
  // Throws InvalidArgument or HorizonExceeded.
  void Validate(double horizon) const;
};

const char* ReleaseKindName(ReleaseKind kind);

// Post-update laws N(C_i m + c_i, C_i V C_i^T + noise_var I), i = 1, 2.
std::pair<GaussianLaw<double>, GaussianLaw<double>> CoupleAt(
    const ProblemInstance& instance, const Schedule& schedule,
    const GaussianLaw<double>& law_at_s, const NeighborPair& pair,
    double sigma, double s);

// Carries a law at s+ to t under the linearized dynamics of the track:
// mean Phi(t,s) m + int_s^t Phi(t,u) gamma Sigma x~ du and covariance
// Phi V Phi^T plus the noise injected on (s, t].
GaussianLaw<double> Propagate(const LawTrack& track,
                              const GaussianLaw<double>& post_law, double s,
                              double t);

struct RenyiInfo {
  // Multiple of the identity added to each covariance to make it PD.
  double jitter1 = 0.0;
  double jitter2 = 0.0;
};

namespace internal {

// Cholesky factor of cov, adding trace/d * 1e-12 * I once if needed.
template <typename Scalar>
Eigen::LLT<MatrixX<Scalar>> FactorWithJitter(const MatrixX<Scalar>& cov,
                                             double& jitter) {
  jitter = 0.0;
  Eigen::LLT<MatrixX<Scalar>> llt(cov);
  if (llt.info() == Eigen::Success) return llt;
  const Scalar eps =
      Scalar(1e-12) * cov.trace() / static_cast<Scalar>(cov.rows());
  if (eps > Scalar(0)) {
    llt.compute(cov + eps * MatrixX<Scalar>::Identity(cov.rows(), cov.rows()));
    jitter = static_cast<double>(eps);
  }
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularCovariance,
                "covariance is not positive definite");
  }
  return llt;
}

}  // namespace internal

// D_alpha(law1 || law2) = 1/(alpha-1) ln int p1^alpha p2^(1-alpha) for
// Gaussians: alpha/2 Delta^T M^{-1} Delta +
// [(1-alpha) ld V1 + alpha ld V2 - ld M] / (2 (alpha-1)) with
// M = alpha V2 + (1-alpha) V1. Evaluated through the eigenvalues nu of
// L^{-1} (V2 - V1) L^{-T}, V1 = L L^T, which keeps the log-determinants
// accurate when the laws are close. Throws MixtureNotPD.
template <typename Scalar>
Scalar RenyiGaussian(const GaussianLaw<Scalar>& law1,
                     const GaussianLaw<Scalar>& law2, Scalar alpha,
                     RenyiInfo* info = nullptr) {
  if (!(alpha > Scalar(1))) {
    throw Error(ErrorCode::kInvalidArgument, "Renyi order must exceed 1");
  }
  const Eigen::Index n = law1.dim();
  if (law2.dim() != n || law1.cov.rows() != n || law2.cov.rows() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "laws have different sizes");
  }
  RenyiInfo local;
  MatrixX<Scalar> cov1 = law1.cov, cov2 = law2.cov;
  const auto llt = internal::FactorWithJitter<Scalar>(cov1, local.jitter1);
  internal::FactorWithJitter<Scalar>(cov2, local.jitter2);
  const MatrixX<Scalar> identity = MatrixX<Scalar>::Identity(n, n);
  if (local.jitter1 > 0.0) cov1 += Scalar(local.jitter1) * identity;
  if (local.jitter2 > 0.0) cov2 += Scalar(local.jitter2) * identity;
  if (info) *info = local;

  const auto lower = llt.matrixL();
  MatrixX<Scalar> gap = lower.solve(MatrixX<Scalar>(cov2 - cov1));
  gap = lower.solve(MatrixX<Scalar>(gap.transpose()));
  gap = Scalar(0.5) * (gap + gap.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(gap);
  const VectorX<Scalar>& nu = solver.eigenvalues();
  const VectorX<Scalar> delta =
      solver.eigenvectors().transpose() * lower.solve(law1.mean - law2.mean);

  Scalar quad(0), logs(0);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Scalar mix = Scalar(1) + alpha * nu(k);
    if (!(mix > Scalar(0)) || !(Scalar(1) + nu(k) > Scalar(0))) {
      throw Error(ErrorCode::kMixtureNotPD,
                  "alpha-mixture covariance is not positive definite");
    }
    quad += delta(k) * delta(k) / mix;
    logs += alpha * std::log1p(nu(k)) - std::log1p(alpha * nu(k));
  }
  return alpha / Scalar(2) * quad + logs / (Scalar(2) * (alpha - Scalar(1)));
}

// (1/(alpha-1)) log sum_k w_k exp((alpha-1) D_k), evaluated with log-sum-exp;
// zero weights are skipped.
double MixtureBound(const std::vector<double>& weights,
                    const std::vector<double>& divergences, double alpha);

enum class PrivacyEngine {
  // Diagonal-plus-low-rank algebra in the eigenbasis; O(d J^3) per (s, pair).
  kStructured,
  // Dense d x d (or Jd x Jd) laws and the dense Renyi formula.
  kDense,
};

struct PrivacyOptions {
  PrivacyEngine engine = PrivacyEngine::kStructured;
  // Dense Jd x Jd laws are refused above this d when J > 1.
  std::int64_t max_block_dim = 128;
  int threads = 1;
};

// A pair with its feature vectors also in the eigenbasis of A.
struct ProjectedPair {
  NeighborPair pair;
  Vector a_eigen;
  Vector a_prime_eigen;
};

// Per-s divergence of the released object between the two neighboring
// processes that differ at the update at time s.
class PrivacyModel {
 public:
  PrivacyModel(const LawTrack& track, PrivacyOptions options = {});

  ProjectedPair Project(const NeighborPair& pair) const;

  std::vector<double> Divergences(const ProjectedPair& pair,
                                  const std::vector<double>& alphas,
                                  const ReleaseSpec& spec, double s,
                                  double* max_jitter = nullptr) const;

  // D_alpha for each alpha in `alphas`. Zero when s is after the last
  // release time. `max_jitter` receives the largest regularization used.
  std::vector<double> Divergences(const NeighborPair& pair,
                                  const std::vector<double>& alphas,
                                  const ReleaseSpec& spec, double s,
                                  double* max_jitter = nullptr) const {
    return Divergences(Project(pair), alphas, spec, s, max_jitter);
  }

  double Divergence(const NeighborPair& pair, double alpha,
                    const ReleaseSpec& spec, double s) const {
    return Divergences(pair, {alpha}, spec, s).front();
  }

  const LawTrack& track() const { return *track_; }
  const PrivacyOptions& options() const { return options_; }

 private:
  std::vector<double> Structured(const ProjectedPair& pair,
                                 const std::vector<double>& alphas,
                                 const ReleaseSpec& spec, double s,
                                 double* max_jitter) const;
  std::vector<double> Dense(const NeighborPair& pair,
                            const std::vector<double>& alphas,
                            const ReleaseSpec& spec, double s,
                            double* max_jitter) const;

  const LawTrack* track_;
  PrivacyOptions options_;
};

// s = l/d for l = 1..round(horizon d).
std::vector<double> DefaultSGrid(std::int64_t d, double horizon);

struct RdpResult {
  double alpha = 0.0;
  std::vector<double> s_grid;
  // sup over candidate pairs at each s, and the maximizing pair index.
  std::vector<double> divergence;
  std::vector<std::int64_t> argmax_pair;
  // Right-hand side of the mixture bound: an upper bound on the RDP loss.
  double epsilon = 0.0;
  double worst_s = 0.0;
  std::int64_t worst_pair = -1;
  double max_jitter = 0.0;
};

// Mixed epsilon for each alpha: s uniform on (0, T], points of s_grid in
// (0, t_last] weighted (t_last / T) / count, mass (T - t_last) / T at zero
// divergence.
std::vector<RdpResult> RdpRelease(const PrivacyModel& model,
                                  const std::vector<NeighborPair>& pairs,
                                  const std::vector<double>& alphas,
                                  const ReleaseSpec& spec,
                                  const std::vector<double>& s_grid,
                                  double horizon);

struct ScoredPair {
  std::int64_t first = 0;
  std::int64_t second = 0;
  double score = 0.0;  // |g(theta)|_2
  NeighborPair pair;
};

// g(theta) = (b a - b' a') - (a a^T - a' a'^T + delta I) 1 for a pair of
// records of the instance.
Vector PairScoreVector(const NeighborPair& pair, double delta);

// Top-k ordered record pairs by |g(theta)|. All n(n-1) pairs are scored
// when that is at most 10^6, else 10^6 pairs drawn with the given seed.
std::vector<ScoredPair> AdversarialPairs(const ProblemInstance& instance,
                                         std::int64_t k_top,
                                         std::uint64_t seed = 0);

}  // namespace hsgd

#endif  // HSGD_PRIVACY_H_
