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

#include "hsgd/spectral.h"

#include <cmath>

namespace hsgd {

SpectralCache SpectralCache::Build(const Matrix& covariance, double delta) {
  const Eigen::Index d = covariance.rows();
  if (d < 1 || covariance.cols() != d) {
    throw Error(ErrorCode::kDimensionMismatch, "covariance must be square");
  }
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw Error(ErrorCode::kInvalidArgument, "delta must be nonnegative");
  }
  const double norm = covariance.norm();
  const double asym = (covariance - covariance.transpose()).norm();
  if (asym > 1e-10 * std::max(norm, 1e-300) && asym > 0.0) {
    throw Error(ErrorCode::kNotSymmetric,
                "covariance asymmetry " + std::to_string(asym));
  }
  const Matrix sym = 0.5 * (covariance + covariance.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kInvalidArgument, "eigendecomposition failed");
  }
  SpectralCache cache;
  cache.delta_ = delta;
  cache.eigvecs_ = solver.eigenvectors();
  cache.sigma_eigvals_ = solver.eigenvalues();
  for (Eigen::Index i = 0; i < d; ++i) {
    double& mu = cache.sigma_eigvals_(i);
    if (mu < -1e-8 * norm) {
      throw Error(ErrorCode::kNegativeEigenvalue,
                  "covariance eigenvalue " + std::to_string(mu));
    }
    // Roundoff negatives and near-zeros are clamped.
    if (mu < 1e-12) mu = 0.0;
  }
  cache.eigvals_ = cache.sigma_eigvals_.array() + delta;
  return cache;
}

Matrix SpectralCache::FromEigenDiag(const Vector& w) const {
  return eigvecs_ * w.asDiagonal() * eigvecs_.transpose();
}

Vector TransitionDiag(const SpectralCache& cache, const Schedule& schedule,
                      double t, double s) {
  if (t < s) throw Error(ErrorCode::kTimeOrder, "transition needs t >= s");
  const double dgamma = schedule.Integral(s, t);
  return (-cache.eigvals().array() * dgamma).exp();
}

Matrix Transition(const SpectralCache& cache, const Schedule& schedule,
                  double t, double s) {
  return cache.FromEigenDiag(TransitionDiag(cache, schedule, t, s));
}

KernelPair KernelTraces(const SpectralCache& cache, const Schedule& schedule,
                        double t, double s, double sigma,
                        KernelHessian hessian) {
  if (t < s) throw Error(ErrorCode::kTimeOrder, "kernel needs t >= s");
  const double d = static_cast<double>(cache.dim());
  const double rate = schedule.Rate(s);
  const double dgamma = schedule.Integral(s, t);
  const auto& mu = cache.sigma_eigvals().array();
  const auto& lambda = cache.eigvals().array();
  const Eigen::ArrayXd phi2 = (-2.0 * lambda * dgamma).exp();
  const Eigen::ArrayXd m =
      hessian == KernelHessian::kPopulation ? mu : lambda;
  KernelPair out;
  out.g = rate * rate / d * (mu * m * phi2).sum();
  out.gp = sigma * sigma * rate * rate / (2.0 * d) * (m * phi2).sum();
  return out;
}

}  // namespace hsgd
