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

#ifndef HSGD_SPECTRAL_H_
#define HSGD_SPECTRAL_H_

#include "hsgd/common.h"
#include "hsgd/schedule.h"

namespace hsgd {

// Eigendecomposition of A = Sigma + delta * I. Every matrix function of A
// downstream is evaluated through this one factorization.
class SpectralCache {
 public:
  // Throws NotSymmetric or NegativeEigenvalue.
  static SpectralCache Build(const Matrix& covariance, double delta);

  Eigen::Index dim() const { return eigvals_.size(); }
  // Eigenvalues of A, ascending.
  const Vector& eigvals() const { return eigvals_; }
  const Matrix& eigvecs() const { return eigvecs_; }
  // Eigenvalues of Sigma in the same order.
  const Vector& sigma_eigvals() const { return sigma_eigvals_; }
  double delta() const { return delta_; }

  // Coordinates in the eigenbasis and back.
  template <typename Derived>
  Vector ToEigen(const Eigen::MatrixBase<Derived>& x) const {
    return eigvecs_.transpose() * x;
  }
  template <typename Derived>
  Vector FromEigen(const Eigen::MatrixBase<Derived>& y) const {
    return eigvecs_ * y;
  }
  // U diag(w) U^T.
  Matrix FromEigenDiag(const Vector& w) const;

 private:
  Vector eigvals_;
  Matrix eigvecs_;
  Vector sigma_eigvals_;
  double delta_ = 0.0;
};

// exp(-lambda_i (Gamma(t) - Gamma(s))) for each eigenvalue, i.e. the
// transition operator in the eigenbasis. Throws TimeOrder if t < s.
Vector TransitionDiag(const SpectralCache& cache, const Schedule& schedule,
                      double t, double s);

// Phi(t, s) = U diag(TransitionDiag) U^T.
Matrix Transition(const SpectralCache& cache, const Schedule& schedule,
                  double t, double s);

// Which Hessian M enters the Volterra kernels: Sigma for P, A for R.
enum class KernelHessian { kPopulation, kRegularized };

struct KernelPair {
  double g = 0.0;
  double gp = 0.0;
};

// G(t,s;M) = gamma(s)^2 / d * tr(Sigma M Phi^2(t,s)),
// G'(t,s;M) = sigma^2 gamma(s)^2 / (2d) * tr(M Phi^2(t,s)).
KernelPair KernelTraces(const SpectralCache& cache, const Schedule& schedule,
                        double t, double s, double sigma,
                        KernelHessian hessian = KernelHessian::kPopulation);

}  // namespace hsgd

#endif  // HSGD_SPECTRAL_H_
