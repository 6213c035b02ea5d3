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

#include <doctest.h>

#include "ecreg/gf256.hpp"
#include "support/oracles.hpp"

using namespace ecreg;

TEST_CASE("table multiplication matches the shift-and-xor oracle") {
  for (unsigned a = 0; a < 256; ++a) {
    for (unsigned b = 0; b < 256; ++b) {
      REQUIRE(gf::Mul(static_cast<std::uint8_t>(a),
                      static_cast<std::uint8_t>(b)) ==
              testing::NaiveGfMul(static_cast<std::uint8_t>(a),
                                  static_cast<std::uint8_t>(b)));
    }
  }
}

TEST_CASE("every nonzero element has a multiplicative inverse") {
  for (unsigned a = 1; a < 256; ++a) {
    const auto x = static_cast<std::uint8_t>(a);
    REQUIRE(gf::Mul(x, gf::Inv(x)) == 1);
    REQUIRE(gf::Div(x, x) == 1);
  }
}

TEST_CASE("generator 0x02 has full order") {
  // alpha^i must enumerate all 255 nonzero elements before repeating.
  std::array<bool, 256> seen{};
  std::uint8_t v = 1;
  for (int i = 0; i < 255; ++i) {
    REQUIRE(!seen[v]);
    seen[v] = true;
    v = gf::Mul(v, 0x02);
  }
  CHECK(v == 1);
  CHECK(!seen[0]);
}

TEST_CASE("field laws on a sampled grid") {
  std::uint64_t st = 42;
  for (int trial = 0; trial < 20000; ++trial) {
    const auto a = static_cast<std::uint8_t>(SplitMix64(st));
    const auto b = static_cast<std::uint8_t>(SplitMix64(st));
    const auto c = static_cast<std::uint8_t>(SplitMix64(st));
    CHECK(gf::Mul(a, b) == gf::Mul(b, a));
    CHECK(gf::Mul(gf::Mul(a, b), c) == gf::Mul(a, gf::Mul(b, c)));
    CHECK(gf::Mul(static_cast<std::uint8_t>(a ^ b), c) ==
          (gf::Mul(a, c) ^ gf::Mul(b, c)));
    CHECK(gf::Mul(a, 1) == a);
    CHECK(gf::Mul(a, 0) == 0);
  }
}

TEST_CASE("pow is iterated multiplication") {
  for (unsigned base : {0x02u, 0x03u, 0x1Du, 0xFFu}) {
    std::uint8_t acc = 1;
    for (unsigned e = 0; e < 20; ++e) {
      CHECK(gf::Pow(static_cast<std::uint8_t>(base), e) == acc);
      acc = gf::Mul(acc, static_cast<std::uint8_t>(base));
    }
  }
}
