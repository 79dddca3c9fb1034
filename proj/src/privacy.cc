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

#include "hsgd/privacy.h"

#include <algorithm>
#include <limits>
#include <set>
#include <string>

#include "hsgd/parallel.h"
#include "hsgd/rng.h"

namespace hsgd {

DifferentiatingUpdate DifferentiatingUpdate::Build(
    const ProblemInstance& instance, const Schedule& schedule,
    const NeighborPair& pair, double sigma, double s) {
  const Eigen::Index d = instance.d();
  if (pair.a.size() != d || pair.a_prime.size() != d) {
    throw Error(ErrorCode::kDimensionMismatch, "pair records have wrong length");
  }
  const double eta = schedule.Rate(s) / static_cast<double>(d);
  DifferentiatingUpdate u;
  u.s = s;
  const Matrix identity = Matrix::Identity(d, d);
  u.C1 = (1.0 - eta * instance.delta) * identity - eta * pair.a * pair.a.transpose();
  u.C2 = (1.0 - eta * instance.delta) * identity -
         eta * pair.a_prime * pair.a_prime.transpose();
  u.c1 = eta * pair.b * pair.a;
  u.c2 = eta * pair.b_prime * pair.a_prime;
  u.noise_var = eta * eta * sigma * sigma;
  return u;
}

void ReleaseSpec::Validate(double horizon) const {
  if (times.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "release needs at least one time");
  }
  if (kind == ReleaseKind::kLastIterate && times.size() != 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "last-iterate release takes a single time");
  }
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (!(times[j] > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "release times must be > 0");
    }
    if (j > 0 && !(times[j] > times[j - 1])) {
      throw Error(ErrorCode::kInvalidArgument,
                  "release times must be strictly increasing");
    }
  }
  if (times.back() > horizon * (1.0 + 1e-12)) {
    throw Error(ErrorCode::kHorizonExceeded,
                "release time " + std::to_string(times.back()) +
                    " beyond horizon " + std::to_string(horizon));
  }
}

const char* ReleaseKindName(ReleaseKind kind) {
  switch (kind) {
    case ReleaseKind::kLastIterate:
      return "last";
    case ReleaseKind::kIterates:
      return "iterates";
    case ReleaseKind::kAverage:
      return "average";
  }
  return "unknown";
}

std::pair<GaussianLaw<double>, GaussianLaw<double>> CoupleAt(
    const ProblemInstance& instance, const Schedule& schedule,
    const GaussianLaw<double>& law_at_s, const NeighborPair& pair,
    double sigma, double s) {
  if (law_at_s.dim() != instance.d() || law_at_s.cov.rows() != instance.d()) {
    throw Error(ErrorCode::kDimensionMismatch, "law has wrong dimension");
  }
  const DifferentiatingUpdate u =
      DifferentiatingUpdate::Build(instance, schedule, pair, sigma, s);
  const Matrix identity = Matrix::Identity(instance.d(), instance.d());
  GaussianLaw<double> first, second;
  first.mean = u.C1 * law_at_s.mean + u.c1;
  second.mean = u.C2 * law_at_s.mean + u.c2;
  first.cov = u.C1 * law_at_s.cov * u.C1.transpose() + u.noise_var * identity;
  second.cov = u.C2 * law_at_s.cov * u.C2.transpose() + u.noise_var * identity;
  first.cov = 0.5 * (first.cov + first.cov.transpose()).eval();
  second.cov = 0.5 * (second.cov + second.cov.transpose()).eval();
  return {std::move(first), std::move(second)};
}

GaussianLaw<double> Propagate(const LawTrack& track,
                              const GaussianLaw<double>& post_law, double s,
                              double t) {
  if (t < s) throw Error(ErrorCode::kTimeOrder, "propagate needs t >= s");
  const SpectralCache& cache = track.cache();
  if (post_law.dim() != cache.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "law has wrong dimension");
  }
  if (t == s) return post_law;
  const Vector phi = TransitionDiag(cache, track.schedule(), t, s);
  const Matrix transition = cache.FromEigenDiag(phi);
  GaussianLaw<double> out;
  // Drift contribution over (s, t] equals m(t) - Phi(t,s) m(s) for the
  // reference mean path.
  const Vector drift =
      track.MeanEigen(t) - phi.cwiseProduct(track.MeanEigen(s));
  out.mean = transition * post_law.mean + cache.FromEigen(drift);
  out.cov = transition * post_law.cov * transition +
            cache.FromEigenDiag(track.NoiseVariance(s, t));
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

double MixtureBound(const std::vector<double>& weights,
                    const std::vector<double>& divergences, double alpha) {
  if (weights.size() != divergences.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "weights and divergences differ");
  }
  if (!(alpha > 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "Renyi order must exceed 1");
  }
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] > 0.0) {
      top = std::max(top, std::log(weights[k]) + (alpha - 1.0) * divergences[k]);
    }
  }
  if (!std::isfinite(top)) return 0.0;
  CompensatedSum sum;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] > 0.0) {
      sum.Add(std::exp(std::log(weights[k]) + (alpha - 1.0) * divergences[k] - top));
    }
  }
  return (top + std::log(sum.value())) / (alpha - 1.0);
}

namespace {

// log det(I + S K) for PSD K and symmetric S, as sum log1p of the
// eigenvalues of K^{1/2} S K^{1/2}. Returns false when I + S K is not PD.
bool LogDetLowRank(const Matrix& k, const Matrix& s, double& out) {
  Eigen::SelfAdjointEigenSolver<Matrix> ks(0.5 * (k + k.transpose()));
  const Vector root = ks.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix half = ks.eigenvectors() * root.asDiagonal() *
                      ks.eigenvectors().transpose();
  Matrix inner = half * s * half;
  inner = 0.5 * (inner + inner.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> is(inner, Eigen::EigenvaluesOnly);
  out = 0.0;
  for (Eigen::Index i = 0; i < is.eigenvalues().size(); ++i) {
    const double e = is.eigenvalues()(i);
    if (!(1.0 + e > 0.0)) return false;
    out += std::log1p(e);
  }
  return true;
}

// Renyi divergences between N(mu1, B + W1 S1 W1^T) and N(mu2, B + W2 S2 W2^T)
// given the Gram matrix G = X^T B^{-1} X of X = [W1, W2, mu1 - mu2]. log det B
// cancels between the three determinant terms.
std::vector<double> LowRankRenyi(const Matrix& gram, const Matrix& s1,
                                 const Matrix& s2,
                                 const std::vector<double>& alphas) {
  const Eigen::Index r = s1.rows();
  const Matrix k1 = gram.block(0, 0, r, r);
  const Matrix k2 = gram.block(r, r, r, r);
  const Matrix km = gram.block(0, 0, 2 * r, 2 * r);
  const Vector u = gram.block(0, 2 * r, 2 * r, 1);
  const double q0 = gram(2 * r, 2 * r);
  double ld1 = 0.0, ld2 = 0.0;
  if (!LogDetLowRank(k1, s1, ld1) || !LogDetLowRank(k2, s2, ld2)) {
    throw Error(ErrorCode::kNegativeEigenvalue,
                "post-update covariance is not positive definite");
  }
  std::vector<double> out;
  out.reserve(alphas.size());
  for (const double alpha : alphas) {
    if (!(alpha > 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "Renyi order must exceed 1");
    }
    Matrix sm = Matrix::Zero(2 * r, 2 * r);
    sm.block(0, 0, r, r) = (1.0 - alpha) * s1;
    sm.block(r, r, r, r) = alpha * s2;
    double ldm = 0.0;
    if (!LogDetLowRank(km, sm, ldm)) {
      throw Error(ErrorCode::kMixtureNotPD,
                  "alpha-mixture covariance is not positive definite");
    }
    const Matrix system = Matrix::Identity(2 * r, 2 * r) + sm * km;
    const Vector corr = system.fullPivLu().solve(sm * u);
    const double quad = q0 - u.dot(corr);
    out.push_back(0.5 * alpha * quad +
                  ((1.0 - alpha) * ld1 + alpha * ld2 - ldm) /
                      (2.0 * (alpha - 1.0)));
  }
  return out;
}

// Regularizes a diagonal base that is not strictly positive.
void JitterDiagonal(Vector& base, double& jitter) {
  if (base.minCoeff() > 0.0) return;
  const double eps = 1e-12 * base.mean();
  if (!(eps > 0.0)) {
    throw Error(ErrorCode::kSingularCovariance,
                "released covariance is singular");
  }
  base.array() += eps;
  jitter = std::max(jitter, eps);
}

}  // namespace

PrivacyModel::PrivacyModel(const LawTrack& track, PrivacyOptions options)
    : track_(&track), options_(options) {}

ProjectedPair PrivacyModel::Project(const NeighborPair& pair) const {
  const SpectralCache& cache = track_->cache();
  if (pair.a.size() != cache.dim() || pair.a_prime.size() != cache.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "pair records have wrong length");
  }
  return {pair, cache.ToEigen(pair.a), cache.ToEigen(pair.a_prime)};
}

std::vector<double> PrivacyModel::Divergences(const ProjectedPair& pair,
                                              const std::vector<double>& alphas,
                                              const ReleaseSpec& spec, double s,
                                              double* max_jitter) const {
  if (!(s > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "update time must be > 0");
  }
  spec.Validate(track_->horizon());
  if (max_jitter) *max_jitter = 0.0;
  // Both processes coincide at every release time before s.
  if (s > spec.last()) return std::vector<double>(alphas.size(), 0.0);
  return options_.engine == PrivacyEngine::kStructured
             ? Structured(pair, alphas, spec, s, max_jitter)
             : Dense(pair.pair, alphas, spec, s, max_jitter);
}

std::vector<double> PrivacyModel::Structured(const ProjectedPair& projected,
                                             const std::vector<double>& alphas,
                                             const ReleaseSpec& spec, double s,
                                             double* max_jitter) const {
  const SpectralCache& cache = track_->cache();
  const Schedule& schedule = track_->schedule();
  const ProblemInstance& instance = track_->instance();
  const Eigen::Index d = cache.dim();
  const double eta = schedule.Rate(s) / static_cast<double>(d);
  const double kappa = 1.0 - eta * instance.delta;
  const double sigma = track_->sigma();
  const double c = eta * eta * sigma * sigma;

  const Vector m = track_->MeanEigen(s);
  const Vector v = track_->VarianceEigen(s);
  const NeighborPair& pair = projected.pair;
  const Vector& a1 = projected.a_eigen;
  const Vector& a2 = projected.a_prime_eigen;

  // Post-update covariance in the eigenbasis:
  // diag(kappa^2 v + c) + W_i S_i W_i^T with W_i = [a_i, v o a_i, 0].
  // The third column of each W_i carries the cross-covariance with release
  // times before s and is only filled in for the average release.
  Matrix w = Matrix::Zero(d, 7);
  w.col(0) = a1;
  w.col(1) = v.cwiseProduct(a1);
  w.col(3) = a2;
  w.col(4) = v.cwiseProduct(a2);
  const double beta1 = a1.dot(w.col(1)), beta2 = a2.dot(w.col(4));
  Matrix s1(3, 3), s2(3, 3);
  s1 << eta * eta * beta1, -kappa * eta, -eta, -kappa * eta, 0.0, 0.0, -eta,
      0.0, 0.0;
  s2 << eta * eta * beta2, -kappa * eta, -eta, -kappa * eta, 0.0, 0.0, -eta,
      0.0, 0.0;
  // Mean gap after the update: (C1 - C2) m + c1 - c2.
  w.col(6) = -eta * (a1.dot(m)) * a1 + eta * (a2.dot(m)) * a2 +
             eta * pair.b * a1 - eta * pair.b_prime * a2;
  const Vector post_base = (kappa * kappa * v.array() + c).matrix();

  // Suffix of release times at or after s.
  std::vector<double> suffix, prefix;
  for (const double t : spec.times) (t >= s ? suffix : prefix).push_back(t);
  const auto jn = static_cast<Eigen::Index>(suffix.size());

  std::vector<Vector> phi(suffix.size()), base(suffix.size());
  for (std::size_t r = 0; r < suffix.size(); ++r) {
    phi[r] = TransitionDiag(cache, schedule, suffix[r], s);
    base[r] = track_->NoiseVariance(s, suffix[r]) +
              phi[r].cwiseAbs2().cwiseProduct(post_base);
  }
  double jitter = 0.0;
  Matrix gram;
  if (spec.kind == ReleaseKind::kIterates && jn > 1) {
    // Per-mode J x J base blocks e^{-lambda |Gamma_r - Gamma_j|} B_min(r,j).
    std::vector<double> big_gamma(suffix.size());
    for (std::size_t r = 0; r < suffix.size(); ++r) {
      big_gamma[r] = schedule.Integral(suffix[r]);
    }
    gram = Matrix::Zero(7, 7);
    Matrix block(jn, jn), x(jn, 7);
    for (Eigen::Index i = 0; i < d; ++i) {
      const double lambda = cache.eigvals()(i);
      for (Eigen::Index r = 0; r < jn; ++r) {
        for (Eigen::Index j = 0; j <= r; ++j) {
          const double value =
              std::exp(-lambda * (big_gamma[r] - big_gamma[j])) * base[j](i);
          block(r, j) = value;
          block(j, r) = value;
        }
        x.row(r) = phi[r](i) * w.row(i);
      }
      Eigen::LLT<Matrix> llt(block);
      if (llt.info() != Eigen::Success) {
        const double eps = 1e-12 * block.trace() / static_cast<double>(jn);
        llt.compute(block + eps * Matrix::Identity(jn, jn));
        if (!(eps > 0.0) || llt.info() != Eigen::Success) {
          throw Error(ErrorCode::kSingularCovariance,
                      "released covariance is singular");
        }
        jitter = std::max(jitter, eps);
      }
      const Matrix half = llt.matrixL().solve(x);
      gram.noalias() += half.transpose() * half;
    }
  } else {
    Vector diag_base;
    Matrix x;
    if (spec.kind == ReleaseKind::kAverage) {
      // Average over all J times. With L = sum_r Phi(t_r, s) over the suffix
      // and D = sum_p Phi(s, p) V(p) over the prefix, the cross-covariance
      // of the two partial sums is L C_i D = kappa L D - eta (L a_i)(D a_i)^T.
      const double total = static_cast<double>(spec.times.size());
      diag_base = Vector::Zero(d);
      Vector lsum = Vector::Zero(d);
      for (Eigen::Index r = 0; r < jn; ++r) {
        lsum += phi[r];
        for (Eigen::Index j = 0; j < jn; ++j) {
          const auto lo = std::min(r, j), hi = std::max(r, j);
          diag_base += TransitionDiag(cache, schedule, suffix[hi], suffix[lo])
                           .cwiseProduct(base[lo]);
        }
      }
      Vector dsum = Vector::Zero(d);
      for (std::size_t r = 0; r < prefix.size(); ++r) {
        const Vector vr = track_->VarianceEigen(prefix[r]);
        diag_base += vr;
        dsum += TransitionDiag(cache, schedule, s, prefix[r]).cwiseProduct(vr);
        for (std::size_t j = 0; j < r; ++j) {
          diag_base += 2.0 * TransitionDiag(cache, schedule, prefix[r], prefix[j])
                                 .cwiseProduct(track_->VarianceEigen(prefix[j]));
        }
      }
      diag_base += 2.0 * kappa * lsum.cwiseProduct(dsum);
      x = lsum.asDiagonal() * w;
      x.col(2) = dsum.cwiseProduct(a1);
      x.col(5) = dsum.cwiseProduct(a2);
      diag_base /= total * total;
      x /= total;
    } else {
      // Last iterate, or a single iterate left after the suffix rule.
      diag_base = base.back();
      x = phi.back().asDiagonal() * w;
    }
    JitterDiagonal(diag_base, jitter);
    gram = x.transpose() * diag_base.cwiseInverse().asDiagonal() * x;
  }
  if (max_jitter) *max_jitter = jitter;
  return LowRankRenyi(gram, s1, s2, alphas);
}

std::vector<double> PrivacyModel::Dense(const NeighborPair& pair,
                                        const std::vector<double>& alphas,
                                        const ReleaseSpec& spec, double s,
                                        double* max_jitter) const {
  const SpectralCache& cache = track_->cache();
  const Schedule& schedule = track_->schedule();
  const Eigen::Index d = cache.dim();
  const auto [post1, post2] = CoupleAt(track_->instance(), schedule,
                                       track_->Law(s), pair, track_->sigma(), s);
  std::vector<double> suffix, prefix;
  for (const double t : spec.times) (t >= s ? suffix : prefix).push_back(t);
  const auto jn = static_cast<Eigen::Index>(suffix.size());

  std::vector<GaussianLaw<double>> laws1, laws2;
  for (const double t : suffix) {
    laws1.push_back(Propagate(*track_, post1, s, t));
    laws2.push_back(Propagate(*track_, post2, s, t));
  }
  GaussianLaw<double> out1, out2;
  if (spec.kind == ReleaseKind::kLastIterate) {
    out1 = laws1.back();
    out2 = laws2.back();
  } else if (spec.kind == ReleaseKind::kIterates) {
    if (jn > 1 && d > options_.max_block_dim) {
      throw Error(ErrorCode::kBlockTooLarge,
                  "dense block law needs d <= " +
                      std::to_string(options_.max_block_dim));
    }
    out1.mean.resize(jn * d);
    out2.mean.resize(jn * d);
    out1.cov.resize(jn * d, jn * d);
    out2.cov.resize(jn * d, jn * d);
    for (Eigen::Index r = 0; r < jn; ++r) {
      out1.mean.segment(r * d, d) = laws1[r].mean;
      out2.mean.segment(r * d, d) = laws2[r].mean;
      for (Eigen::Index j = 0; j <= r; ++j) {
        const Matrix phi = Transition(cache, schedule, suffix[r], suffix[j]);
        const Matrix b1 = phi * laws1[j].cov, b2 = phi * laws2[j].cov;
        out1.cov.block(r * d, j * d, d, d) = b1;
        out2.cov.block(r * d, j * d, d, d) = b2;
        out1.cov.block(j * d, r * d, d, d) = b1.transpose();
        out2.cov.block(j * d, r * d, d, d) = b2.transpose();
      }
    }
  } else {
    const double total = static_cast<double>(spec.times.size());
    Vector common_mean = Vector::Zero(d);
    Matrix common_cov = Matrix::Zero(d, d);
    std::vector<GaussianLaw<double>> early;
    for (const double t : prefix) early.push_back(track_->Law(t));
    for (std::size_t r = 0; r < prefix.size(); ++r) {
      common_mean += early[r].mean;
      for (std::size_t j = 0; j <= r; ++j) {
        const Matrix block =
            Transition(cache, schedule, prefix[r], prefix[j]) * early[j].cov;
        common_cov += block;
        if (j < r) common_cov += block.transpose();
      }
    }
    out1.mean = common_mean;
    out2.mean = common_mean;
    out1.cov = common_cov;
    out2.cov = common_cov;
    // Cross-covariance of suffix iterate t_r with prefix iterate p:
    // Phi(t_r, s) C_i Phi(s, p) V(p).
    if (!prefix.empty()) {
      const auto update = DifferentiatingUpdate::Build(
          track_->instance(), schedule, pair, track_->sigma(), s);
      Matrix carried = Matrix::Zero(d, d);
      for (std::size_t p = 0; p < prefix.size(); ++p) {
        carried += Transition(cache, schedule, s, prefix[p]) * early[p].cov;
      }
      Matrix lsum = Matrix::Zero(d, d);
      for (const double t : suffix) lsum += Transition(cache, schedule, t, s);
      const Matrix cross1 = lsum * update.C1 * carried;
      const Matrix cross2 = lsum * update.C2 * carried;
      out1.cov += cross1 + cross1.transpose();
      out2.cov += cross2 + cross2.transpose();
    }
    for (Eigen::Index r = 0; r < jn; ++r) {
      out1.mean += laws1[r].mean;
      out2.mean += laws2[r].mean;
      for (Eigen::Index j = 0; j <= r; ++j) {
        const Matrix phi = Transition(cache, schedule, suffix[r], suffix[j]);
        const Matrix b1 = phi * laws1[j].cov, b2 = phi * laws2[j].cov;
        out1.cov += b1;
        out2.cov += b2;
        if (j < r) {
          out1.cov += b1.transpose();
          out2.cov += b2.transpose();
        }
      }
    }
    out1.mean /= total;
    out2.mean /= total;
    out1.cov /= total * total;
    out2.cov /= total * total;
  }
  out1.cov = 0.5 * (out1.cov + out1.cov.transpose()).eval();
  out2.cov = 0.5 * (out2.cov + out2.cov.transpose()).eval();
  std::vector<double> out;
  double jitter = 0.0;
  for (const double alpha : alphas) {
    RenyiInfo info;
    out.push_back(RenyiGaussian<double>(out1, out2, alpha, &info));
    jitter = std::max({jitter, info.jitter1, info.jitter2});
  }
  if (max_jitter) *max_jitter = jitter;
  return out;
}

std::vector<double> DefaultSGrid(std::int64_t d, double horizon) {
  const auto count = std::llround(horizon * static_cast<double>(d));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(std::max<long long>(count, 0)));
  for (long long l = 1; l <= count; ++l) {
    grid.push_back(std::min(static_cast<double>(l) / static_cast<double>(d),
                            horizon));
  }
  return grid;
}

std::vector<RdpResult> RdpRelease(const PrivacyModel& model,
                                  const std::vector<NeighborPair>& pairs,
                                  const std::vector<double>& alphas,
                                  const ReleaseSpec& spec,
                                  const std::vector<double>& s_grid,
                                  double horizon) {
  if (pairs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one pair");
  }
  if (!(horizon > 0.0) || horizon > model.track().horizon() * (1.0 + 1e-12)) {
    throw Error(ErrorCode::kHorizonExceeded, "privacy horizon outside track");
  }
  spec.Validate(horizon);
  for (const double s : s_grid) {
    if (!(s > 0.0) || s > horizon * (1.0 + 1e-12)) {
      throw Error(ErrorCode::kInvalidArgument, "s grid must lie in (0, T]");
    }
  }
  std::vector<ProjectedPair> projected;
  projected.reserve(pairs.size());
  for (const auto& p : pairs) projected.push_back(model.Project(p));
  const std::size_t ns = s_grid.size(), na = alphas.size();
  // values[k][a], arg[k][a], jitter[k]
  std::vector<std::vector<double>> values(ns, std::vector<double>(na, 0.0));
  std::vector<std::vector<std::int64_t>> arg(ns, std::vector<std::int64_t>(na, 0));
  std::vector<double> jitter(ns, 0.0);
  ParallelFor(static_cast<std::int64_t>(ns), model.options().threads,
              [&](std::int64_t k) {
                const double s = s_grid[static_cast<std::size_t>(k)];
                auto& best = values[static_cast<std::size_t>(k)];
                auto& best_arg = arg[static_cast<std::size_t>(k)];
                std::fill(best.begin(), best.end(),
                          -std::numeric_limits<double>::infinity());
                for (std::size_t p = 0; p < pairs.size(); ++p) {
                  double j = 0.0;
                  std::vector<double> div;
                  try {
                    div = model.Divergences(projected[p], alphas, spec, s, &j);
                  } catch (const Error& e) {
                    throw Error(e.code(), std::string(e.what()) + " (s=" +
                                              std::to_string(s) + ", pair=" +
                                              std::to_string(p) + ")");
                  }
                  jitter[static_cast<std::size_t>(k)] =
                      std::max(jitter[static_cast<std::size_t>(k)], j);
                  for (std::size_t a = 0; a < na; ++a) {
                    if (div[a] > best[a]) {
                      best[a] = div[a];
                      best_arg[a] = static_cast<std::int64_t>(p);
                    }
                  }
                }
              });

  const double t_last = spec.last();
  std::size_t inside = 0;
  for (const double s : s_grid) inside += s <= t_last ? 1 : 0;
  std::vector<RdpResult> results;
  for (std::size_t a = 0; a < na; ++a) {
    RdpResult res;
    res.alpha = alphas[a];
    res.s_grid = s_grid;
    std::vector<double> weights, divs;
    weights.push_back((horizon - t_last) / horizon);
    divs.push_back(0.0);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < ns; ++k) {
      res.divergence.push_back(values[k][a]);
      res.argmax_pair.push_back(arg[k][a]);
      res.max_jitter = std::max(res.max_jitter, jitter[k]);
      if (values[k][a] > worst) {
        worst = values[k][a];
        res.worst_s = s_grid[k];
        res.worst_pair = arg[k][a];
      }
      if (s_grid[k] <= t_last) {
        weights.push_back(t_last / horizon / static_cast<double>(inside));
        divs.push_back(values[k][a]);
      }
    }
    if (inside == 0) weights.front() = 1.0;
    res.epsilon = MixtureBound(weights, divs, alphas[a]);
    results.push_back(std::move(res));
  }
  return results;
}

Vector PairScoreVector(const NeighborPair& pair, double delta) {
  const Eigen::Index d = pair.a.size();
  return (pair.b - pair.a.sum()) * pair.a -
         (pair.b_prime - pair.a_prime.sum()) * pair.a_prime -
         delta * Vector::Ones(d);
}

std::vector<ScoredPair> AdversarialPairs(const ProblemInstance& instance,
                                         std::int64_t k_top,
                                         std::uint64_t seed) {
  const std::int64_t n = instance.n_samples;
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "need >= 2 records");
  if (k_top < 1) throw Error(ErrorCode::kInvalidArgument, "k_top must be >= 1");
  const Eigen::Index d = instance.d();
  // g = u_i - u_j - delta 1 with u_i = (b_i - a_i^T 1) a_i.
  Matrix u(d, n);
  for (std::int64_t i = 0; i < n; ++i) {
    u.col(i) = (instance.labels(i) - instance.design.row(i).sum()) *
               instance.design.row(i).transpose();
  }
  auto score = [&](std::int64_t i, std::int64_t j) {
    return ((u.col(i) - u.col(j)).array() - instance.delta).matrix().norm();
  };
  struct Candidate {
    double score;
    std::int64_t i, j;
  };
  std::vector<Candidate> all;
  constexpr std::int64_t kLimit = 1000000;
  const double total = static_cast<double>(n) * static_cast<double>(n - 1);
  if (total <= static_cast<double>(kLimit)) {
    all.reserve(static_cast<std::size_t>(total));
    for (std::int64_t i = 0; i < n; ++i) {
      for (std::int64_t j = 0; j < n; ++j) {
        if (i != j) all.push_back({score(i, j), i, j});
      }
    }
  } else {
    Philox4x32 engine(StreamKey(seed, streams::kPairSampling));
    std::uniform_int_distribution<std::int64_t> first(0, n - 1), other(0, n - 2);
    all.reserve(kLimit);
    for (std::int64_t k = 0; k < kLimit; ++k) {
      const std::int64_t i = first(engine);
      std::int64_t j = other(engine);
      if (j >= i) ++j;
      all.push_back({score(i, j), i, j});
    }
  }
  std::sort(all.begin(), all.end(), [](const Candidate& x, const Candidate& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.i != y.i ? x.i < y.i : x.j < y.j;
  });
  std::vector<ScoredPair> out;
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  for (const Candidate& c : all) {
    if (static_cast<std::int64_t>(out.size()) >= k_top) break;
    if (!seen.insert({c.i, c.j}).second) continue;
    ScoredPair sp;
    sp.first = c.i;
    sp.second = c.j;
    sp.score = c.score;
    sp.pair.a = instance.design.row(c.i).transpose();
    sp.pair.b = instance.labels(c.i);
    sp.pair.a_prime = instance.design.row(c.j).transpose();
    sp.pair.b_prime = instance.labels(c.j);
    out.push_back(std::move(sp));
  }
  return out;
}

}  // namespace hsgd
