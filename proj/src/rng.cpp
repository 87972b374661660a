/*
 * Copyright 2026 The convbound authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "convbound/rng.hpp"

#include <cmath>
#include <numbers>

namespace convbound {

namespace {

// splitmix64 finalizer; full-period bijective mixing of a 64-bit word.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_pair(std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(a) ^ (b + 0x9e3779b97f4a7c15ULL));
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : master_seed_(master_seed),
      stream_index_(stream_index),
      engine_(hash_pair(master_seed, stream_index)) {}

RngStream RngStream::substream(std::uint64_t index) const {
  return RngStream(hash_pair(master_seed_, stream_index_), index);
}

std::uint64_t RngStream::next_u64() { return engine_(); }

double RngStream::uniform() {
  // 53 high bits -> [0, 1)
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 in (0, 1] keeps the log finite.
  const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace convbound
