/*
 * Copyright (c) 2026, the ecreg authors.
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

#ifndef ECREG_UTIL_HPP_
#define ECREG_UTIL_HPP_

#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecreg {

using Bytes = std::vector<std::uint8_t>;

/// Raised when a scenario or CLI input is invalid. Message names the field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a protocol invariant that must hold in every execution with at
/// most t Byzantine nodes is observed broken.
class ProtocolViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline std::uint64_t SplitMix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Deterministic PRNG with a fixed cross-platform algorithm. std::mt19937 is
/// also deterministic, but the standard distributions are not; all randomness
/// that influences schedules or workloads goes through this class.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // Warm up so that small seeds do not produce correlated first draws.
    SplitMix64(state_);
  }

  std::uint64_t NextU64() { return SplitMix64(state_); }

  /// Uniform draw from [0, bound). bound must be nonzero.
  std::uint64_t Below(std::uint64_t bound) { return NextU64() % bound; }

  /// Bernoulli draw with probability p (clamped to [0,1]).
  bool Chance(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return static_cast<double>(NextU64() >> 11) * 0x1.0p-53 < p;
  }

 private:
  std::uint64_t state_;
};

std::string ToHex(const std::uint8_t* data, std::size_t len);
std::string ToHex(const Bytes& data);
Bytes FromHex(const std::string& hex);

}  // namespace ecreg

#endif  // ECREG_UTIL_HPP_
