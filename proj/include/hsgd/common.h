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

#ifndef HSGD_COMMON_H_
#define HSGD_COMMON_H_

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace hsgd {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;
// Row-major storage matches the on-disk layout of the JSON containers.
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ErrorCode {
  kInvalidArgument,
  kNotSymmetric,
  kNegativeEigenvalue,
  kTimeOrder,
  kDimensionMismatch,
  kExhaustedData,
  kHorizonExceeded,
  kUnstableStep,
  kMixtureNotPD,
  kSingularCovariance,
  kBlockTooLarge,
  kConfig,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures surface as hsgd::Error. The code is stable and is
// what callers (and the CLI exit-code mapping) dispatch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Numerical failures are exit code 3 in the CLI; everything else that is
// not a config problem is treated as an argument error.
bool IsNumericalFailure(ErrorCode code);

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void Add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

// 64-bit FNV-1a, used for provenance hashes of inputs and config files.
class Fingerprint {
 public:
  Fingerprint& Add(const void* data, std::size_t bytes);
  Fingerprint& Add(double value) { return Add(&value, sizeof(value)); }
  Fingerprint& Add(std::int64_t value) { return Add(&value, sizeof(value)); }
  Fingerprint& Add(std::string_view text) {
    return Add(text.data(), text.size());
  }
  template <typename Derived>
  Fingerprint& Add(const Eigen::DenseBase<Derived>& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) Add(double(m(i, j)));
    }
    return *this;
  }

  std::uint64_t value() const { return state_; }
  std::string Hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace hsgd

#endif  // HSGD_COMMON_H_
