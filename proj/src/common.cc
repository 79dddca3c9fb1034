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

#include "hsgd/common.h"

#include <cstdio>

#include "hsgd/rng.h"

namespace hsgd {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kNotSymmetric:
      return "NotSymmetric";
    case ErrorCode::kNegativeEigenvalue:
      return "NegativeEigenvalue";
    case ErrorCode::kTimeOrder:
      return "TimeOrder";
    case ErrorCode::kDimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::kExhaustedData:
      return "ExhaustedData";
    case ErrorCode::kHorizonExceeded:
      return "HorizonExceeded";
    case ErrorCode::kUnstableStep:
      return "UnstableStep";
    case ErrorCode::kMixtureNotPD:
      return "MixtureNotPD";
    case ErrorCode::kSingularCovariance:
      return "SingularCovariance";
    case ErrorCode::kBlockTooLarge:
      return "BlockTooLarge";
    case ErrorCode::kConfig:
      return "ConfigError";
    case ErrorCode::kIo:
      return "IoError";
  }
  return "Unknown";
}

bool IsNumericalFailure(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNegativeEigenvalue:
    case ErrorCode::kUnstableStep:
    case ErrorCode::kMixtureNotPD:
    case ErrorCode::kSingularCovariance:
      return true;
    default:
      return false;
  }
}

Fingerprint& Fingerprint::Add(const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    state_ ^= p[i];
    state_ *= 0x100000001b3ULL;
  }
  return *this;
}

std::string Fingerprint::Hex() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(state_));
  return buf;
}

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;

inline void MulHiLo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t product = std::uint64_t{a} * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::Block(std::array<std::uint32_t, 4> x,
                                               std::uint64_t key) {
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    MulHiLo(kPhiloxM0, x[0], hi0, lo0);
    MulHiLo(kPhiloxM1, x[2], hi1, lo1);
    x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
    k0 += kPhiloxW0;
    k1 += kPhiloxW1;
  }
  return x;
}

std::uint64_t MixBits(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t StreamKey(std::uint64_t base_seed, std::uint64_t stream,
                        std::uint64_t replica) {
  return MixBits(MixBits(base_seed ^ MixBits(stream)) ^ MixBits(~replica));
}

}  // namespace hsgd
