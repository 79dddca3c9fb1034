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

#include "hsgd/law.h"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "hsgd/parallel.h"
#include "hsgd/rng.h"

namespace hsgd {

LawTrack::LawTrack(const ProblemInstance& instance, const SpectralCache& cache,
                   const Schedule& schedule, const RiskCurves& curves,
                   const Vector& x0, double sigma)
    : instance_(&instance),
      cache_(&cache),
      schedule_(&schedule),
      curves_(&curves),
      x0_(x0),
      sigma_(sigma),
      y0_(cache.ToEigen(x0)),
      target_(cache.sigma_eigvals().cwiseProduct(
          cache.ToEigen(instance.ground_truth))) {
  const Eigen::Index d = cache.dim();
  const auto m = static_cast<Eigen::Index>(curves.grid.size());
  acc_p_ = Matrix::Zero(d, m);
  acc_1_ = Matrix::Zero(d, m);
  const Eigen::ArrayXd lambda = cache.eigvals().array();
  for (Eigen::Index j = 0; j + 1 < m; ++j) {
    const double t0 = curves.grid[j], t1 = curves.grid[j + 1];
    const double h = t1 - t0;
    const double dgamma = schedule.Integral(t0, t1);
    const double g0 = std::pow(schedule.Rate(t0), 2);
    const double g1 = std::pow(schedule.Rate(t1), 2);
    const double p0 = curves.P(j), p1 = curves.P(j + 1);
    for (Eigen::Index i = 0; i < d; ++i) {
      const double x = 2.0 * lambda(i) * dgamma;
      double w0, w1;
      ProductWeights(x, w0, w1);
      const double decay = std::exp(-x);
      acc_p_(i, j + 1) = decay * acc_p_(i, j) + h * (g0 * p0 * w0 + g1 * p1 * w1);
      acc_1_(i, j + 1) = decay * acc_1_(i, j) + h * (g0 * w0 + g1 * w1);
    }
  }
}

Vector LawTrack::MeanEigen(double t) const {
  curves_->Cell(t);
  const double big_gamma = schedule_->Integral(t);
  Vector y(y0_.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double lambda = cache_->eigvals()(i);
    const double gain =
        lambda > 0.0 ? -std::expm1(-lambda * big_gamma) / lambda : big_gamma;
    y(i) = std::exp(-lambda * big_gamma) * y0_(i) + gain * target_(i);
  }
  return y;
}

Vector LawTrack::VarianceEigen(double t) const {
  const std::size_t j = curves_->Cell(t);
  const double inv_d = 1.0 / static_cast<double>(cache_->dim());
  const Eigen::ArrayXd mu = cache_->sigma_eigvals().array();
  Eigen::ArrayXd acc_p, acc_1;
  const double t0 = curves_->grid[j];
  if (t <= t0) {
    acc_p = acc_p_.col(static_cast<Eigen::Index>(j)).array();
    acc_1 = acc_1_.col(static_cast<Eigen::Index>(j)).array();
  } else {
    // Partial cell from grid[j] to t with P interpolated at t.
    const double h = t - t0;
    const double dgamma = schedule_->Integral(t0, t);
    const double g0 = std::pow(schedule_->Rate(t0), 2);
    const double g1 = std::pow(schedule_->Rate(t), 2);
    const double p0 = curves_->P(static_cast<Eigen::Index>(j));
    const double p1 = curves_->InterpolateP(t);
    const Eigen::ArrayXd lambda = cache_->eigvals().array();
    acc_p.resize(cache_->dim());
    acc_1.resize(cache_->dim());
    for (Eigen::Index i = 0; i < cache_->dim(); ++i) {
      const double x = 2.0 * lambda(i) * dgamma;
      double w0, w1;
      ProductWeights(x, w0, w1);
      const double decay = std::exp(-x);
      const auto col = static_cast<Eigen::Index>(j);
      acc_p(i) = decay * acc_p_(i, col) + h * (g0 * p0 * w0 + g1 * p1 * w1);
      acc_1(i) = decay * acc_1_(i, col) + h * (g0 * w0 + g1 * w1);
    }
  }
  return (2.0 * inv_d * mu * acc_p + sigma_ * sigma_ * inv_d * acc_1).matrix();
}

Vector LawTrack::NoiseVariance(double s, double t) const {
  if (t < s) throw Error(ErrorCode::kTimeOrder, "noise variance needs t >= s");
  const Vector phi = TransitionDiag(*cache_, *schedule_, t, s);
  const Vector vt = VarianceEigen(t);
  const Vector vs = VarianceEigen(s);
  return (vt.array() - phi.array().square() * vs.array()).cwiseMax(0.0).matrix();
}

GaussianLaw<double> LawTrack::Law(double t) const {
  GaussianLaw<double> law;
  law.mean = cache_->FromEigen(MeanEigen(t));
  law.cov = cache_->FromEigenDiag(VarianceEigen(t));
  return law;
}

GaussianLaw<double> HsgdLaw(const ProblemInstance& instance,
                            const SpectralCache& cache,
                            const Schedule& schedule, const RiskCurves& curves,
                            const Vector& x0, double sigma, double t) {
  const LawTrack track(instance, cache, schedule, curves, x0, sigma);
  return track.Law(t);
}

SamplePaths SampleHsgdPaths(const ProblemInstance& instance,
                            const SpectralCache& cache,
                            const Schedule& schedule, const Vector& x0,
                            double sigma, std::uint64_t seed, double t_end,
                            std::int64_t replicas,
                            const SamplerOptions& options) {
  const Eigen::Index d = cache.dim();
  const double dd = static_cast<double>(d);
  const double rate = options.steps_per_unit_time > 0.0
                          ? options.steps_per_unit_time
                          : 4.0 * dd;
  if (rate < dd * (1.0 - 1e-12)) {
    throw Error(ErrorCode::kInvalidArgument,
                "sampler needs at least d steps per unit time");
  }
  if (!(t_end >= 0.0) || replicas < 1) {
    throw Error(ErrorCode::kInvalidArgument, "sampler needs t_end >= 0");
  }
  // Records sit on the k/d grid; each record interval is split into
  // `substeps` Euler steps.
  const auto substeps =
      std::max<std::int64_t>(1, std::llround(rate / dd));
  const auto records = static_cast<std::int64_t>(std::ceil(t_end * dd - 1e-9));
  SamplePaths out;
  out.record_times.push_back(0.0);
  for (std::int64_t k = 1; k <= records; ++k) {
    out.record_times.push_back(std::min(static_cast<double>(k) / dd, t_end));
  }
  const auto cols = options.record_risk
                        ? static_cast<Eigen::Index>(out.record_times.size())
                        : 1;
  out.risk.resize(replicas, cols);
  if (options.record_states) out.final_states.resize(replicas, d);

  const EigenRisk risk(instance, cache);
  const Eigen::ArrayXd mu = cache.sigma_eigvals().array();
  const Eigen::ArrayXd lambda = cache.eigvals().array();
  const Eigen::ArrayXd target = mu * risk.ground_truth().array();
  const Vector y0 = cache.ToEigen(x0);
  const double sigma2 = sigma * sigma;

  ParallelFor(replicas, options.threads, [&](std::int64_t r) {
    GaussianStream normal(StreamKey(seed, streams::kSdeNoise,
                                    static_cast<std::uint64_t>(r)));
    Eigen::ArrayXd y = y0.array();
    Eigen::ArrayXd xi(d);
    if (options.record_risk) out.risk(r, 0) = risk.P(y.matrix());
    for (std::int64_t k = 1; k <= records; ++k) {
      const double start = out.record_times[static_cast<std::size_t>(k - 1)];
      const double h =
          (out.record_times[static_cast<std::size_t>(k)] - start) /
          static_cast<double>(substeps);
      for (std::int64_t q = 0; q < substeps; ++q) {
        const double t = start + static_cast<double>(q) * h;
        const double g = schedule.Rate(t);
        const double p = risk.P(y.matrix());
        for (Eigen::Index i = 0; i < d; ++i) xi(i) = normal.Next();
        const Eigen::ArrayXd scale =
            (g * g * h / dd * (2.0 * p * mu + sigma2)).sqrt();
        y += -g * h * (lambda * y - target) + scale * xi;
      }
      if (options.record_risk) out.risk(r, k) = risk.P(y.matrix());
    }
    if (!options.record_risk) out.risk(r, 0) = risk.P(y.matrix());
    if (options.record_states) {
      out.final_states.row(r) = cache.FromEigen(y.matrix()).transpose();
    }
  });
  return out;
}

Matrix SampleDiagonalLaw(const SpectralCache& cache, const Vector& mean_eigen,
                         const Vector& var_eigen, std::int64_t replicas,
                         std::uint64_t seed) {
  const Eigen::Index d = cache.dim();
  Matrix out(replicas, d);
  const Vector sd = var_eigen.cwiseMax(0.0).cwiseSqrt();
  for (std::int64_t r = 0; r < replicas; ++r) {
    GaussianStream normal(StreamKey(seed, streams::kLawSampling,
                                    static_cast<std::uint64_t>(r)));
    const Vector z = normal.Draw(d);
    out.row(r) =
        cache.FromEigen(mean_eigen + sd.cwiseProduct(z)).transpose();
  }
  return out;
}

QqResult MahalanobisQq(const SpectralCache& cache, const Vector& mean_eigen,
                       const Vector& var_eigen, const Matrix& samples) {
  QqResult out;
  out.min_eigenvalue = var_eigen.minCoeff();
  const double scale = std::max(var_eigen.maxCoeff(), 0.0);
  if (!(out.min_eigenvalue > 1e-14 * scale) || !(scale > 0.0)) {
    throw Error(ErrorCode::kSingularCovariance,
                "law covariance smallest eigenvalue " +
                    std::to_string(out.min_eigenvalue));
  }
  const Eigen::Index n = samples.rows();
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "QQ needs >= 2 samples");
  const Matrix z = (samples * cache.eigvecs()).rowwise() - mean_eigen.transpose();
  const Vector inv_var = var_eigen.cwiseInverse();
  out.empirical.resize(static_cast<std::size_t>(n));
  for (Eigen::Index r = 0; r < n; ++r) {
    out.empirical[static_cast<std::size_t>(r)] =
        z.row(r).array().square().matrix().dot(inv_var);
  }
  std::sort(out.empirical.begin(), out.empirical.end());
  const boost::math::chi_squared chi2(static_cast<double>(cache.dim()));
  out.theoretical.resize(out.empirical.size());
  for (Eigen::Index r = 0; r < n; ++r) {
    const double prob = (static_cast<double>(r) + 0.5) / static_cast<double>(n);
    out.theoretical[static_cast<std::size_t>(r)] = boost::math::quantile(chi2, prob);
  }
  const Eigen::Map<const Vector> x(out.theoretical.data(), n);
  const Eigen::Map<const Vector> y(out.empirical.data(), n);
  const double mx = x.mean(), my = y.mean();
  const double sxy = ((x.array() - mx) * (y.array() - my)).sum();
  const double sxx = (x.array() - mx).square().sum();
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  return out;
}

}  // namespace hsgd
