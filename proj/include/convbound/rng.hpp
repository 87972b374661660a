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

#ifndef CONVBOUND_RNG_HPP
#define CONVBOUND_RNG_HPP

#include <cstdint>
#include <random>

namespace convbound {

/// Counter-based random stream: the engine seed is a hash of
/// (master_seed, stream_index), so trial k can always reconstruct its own
/// stream as substream(k) no matter in which order trials actually run.
///
/// The sample sequence is fully determined by the pair of seeds: the engine
/// is std::mt19937_64 (whose output is pinned by the standard) and normal
/// variates come from an explicit Box-Muller transform rather than
/// std::normal_distribution, whose algorithm is implementation-defined.
class RngStream {
 public:
  explicit RngStream(std::uint64_t master_seed, std::uint64_t stream_index = 0);

  /// Child stream derived from this stream's identity and `index`.
  /// Drawing from the parent does not affect the child.
  RngStream substream(std::uint64_t index) const;

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

  /// Uniform double in [0, 1).
  double uniform();

  /// Standard normal variate.
  double normal();

  std::uint64_t next_u64();

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace convbound

#endif  // CONVBOUND_RNG_HPP
