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

#ifndef ECREG_GF256_HPP_
#define ECREG_GF256_HPP_

#include <array>
#include <cstdint>

namespace ecreg::gf {

/// GF(2^8) with reduction polynomial x^8 + x^4 + x^3 + x^2 + 1 (0x11D) and
/// generator 0x02. Multiplication goes through log/exp tables built at
/// compile time.

inline constexpr unsigned kPoly = 0x11D;

namespace detail {

constexpr std::uint8_t MulSlow(std::uint8_t a, std::uint8_t b) {
  unsigned acc = 0;
  unsigned aa = a;
  for (unsigned bb = b; bb != 0; bb >>= 1) {
    if (bb & 1u) acc ^= aa;
    aa <<= 1;
    if (aa & 0x100u) aa ^= kPoly;
  }
  return static_cast<std::uint8_t>(acc);
}

struct Tables {
  std::array<std::uint8_t, 512> exp{};
  std::array<std::uint8_t, 256> log{};
};

constexpr Tables BuildTables() {
  Tables t;
  std::uint8_t val = 1;
  for (int i = 0; i < 255; ++i) {
    t.exp[i] = val;
    t.log[val] = static_cast<std::uint8_t>(i);
    val = MulSlow(val, 0x02);
  }
  for (int i = 255; i < 512; ++i) t.exp[i] = t.exp[i - 255];
  t.log[0] = 0;  // log(0) is undefined; callers must not use it
  return t;
}

inline constexpr Tables kTables = BuildTables();

}  // namespace detail

inline constexpr std::uint8_t Mul(std::uint8_t a, std::uint8_t b) {
  if (a == 0 || b == 0) return 0;
  return detail::kTables.exp[detail::kTables.log[a] + detail::kTables.log[b]];
}

/// Multiplicative inverse; a must be nonzero.
inline constexpr std::uint8_t Inv(std::uint8_t a) {
  return detail::kTables.exp[255 - detail::kTables.log[a]];
}

inline constexpr std::uint8_t Div(std::uint8_t a, std::uint8_t b) {
  return Mul(a, Inv(b));
}

inline constexpr std::uint8_t Pow(std::uint8_t base, unsigned e) {
  std::uint8_t acc = 1;
  for (unsigned i = 0; i < e; ++i) acc = Mul(acc, base);
  return acc;
}

}  // namespace ecreg::gf

#endif  // ECREG_GF256_HPP_
