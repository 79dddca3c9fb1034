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

#ifndef HSGD_RNG_H_
#define HSGD_RNG_H_

#include <array>
#include <cstdint>
#include <limits>
#include <random>

#include "hsgd/common.h"

namespace hsgd {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A stream is
// identified by its 64-bit key; the 128-bit counter walks the stream. Two
// streams with different keys are independent by construction, which is what
// makes replica-parallel Monte Carlo reproducible regardless of scheduling.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;

  explicit Philox4x32(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    if (index_ == 4) {
      block_ = Generate(counter_++);
      index_ = 0;
    }
    return block_[index_++];
  }

  std::uint64_t key() const { return key_; }

  // One Philox4x32-10 block for a full 128-bit counter; exposed for
  // known-answer tests.
  static std::array<std::uint32_t, 4> Block(std::array<std::uint32_t, 4> ctr,
                                            std::uint64_t key);

 private:
  std::array<std::uint32_t, 4> Generate(std::uint64_t counter) const {
    return Block({static_cast<std::uint32_t>(counter),
                  static_cast<std::uint32_t>(counter >> 32), 0u, 0u},
                 key_);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int index_ = 4;
};

// SplitMix64 finalizer; used only to derive stream keys.
std::uint64_t MixBits(std::uint64_t x);

// Key for replica `replica` of stream family `stream` under `base_seed`.
std::uint64_t StreamKey(std::uint64_t base_seed, std::uint64_t stream,
                        std::uint64_t replica = 0);

// Named stream families so that e.g. the SGD noise of replica r never shares
// a key with the data shuffle of replica r.
namespace streams {
inline constexpr std::uint64_t kDesign = 1;
inline constexpr std::uint64_t kGroundTruth = 2;
inline constexpr std::uint64_t kLabelNoise = 3;
inline constexpr std::uint64_t kInitialPoint = 4;
inline constexpr std::uint64_t kSgdNoise = 5;
inline constexpr std::uint64_t kShuffle = 6;
inline constexpr std::uint64_t kSdeNoise = 7;
inline constexpr std::uint64_t kDoob = 8;
inline constexpr std::uint64_t kPairSampling = 9;
inline constexpr std::uint64_t kLawSampling = 10;
}  // namespace streams

// Gaussian draws use std::normal_distribution (Marsaglia polar in libstdc++)
// on top of a Philox stream.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t key) : engine_(key) {}

  double Next() { return normal_(engine_); }

  template <typename Derived>
  void Fill(Eigen::DenseBase<Derived>& out) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, j) = Next();
    }
  }

  Vector Draw(Eigen::Index n) {
    Vector v(n);
    Fill(v);
    return v;
  }

  Philox4x32& engine() { return engine_; }

 private:
  Philox4x32 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace hsgd

#endif  // HSGD_RNG_H_
