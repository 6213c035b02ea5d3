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

// Compares the OpenMP erasure kernels against the serial reference loops.
// Args pair: {value bytes, k}; n is fixed at 2k + 2 (t = 1 worth of slack
// on each side of a typical deployment shape).

#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "ecreg/erasure.hpp"
#include "ecreg/util.hpp"

namespace {

ecreg::Bytes MakeValue(std::size_t ell) {
  ecreg::Rng rng(0x636f646563ULL + ell);
  ecreg::Bytes value(ell);
  for (auto& b : value) b = static_cast<std::uint8_t>(rng.NextU64());
  return value;
}

std::vector<ecreg::Fragment> DropToK(std::vector<ecreg::Bytes> fragments,
                                     std::uint16_t k) {
  // Keep only the k highest-indexed (all coded) fragments: the worst case
  // for reconstruction, which must invert a full k x k submatrix.
  std::vector<ecreg::Fragment> present(fragments.size());
  for (std::size_t i = fragments.size() - k; i < fragments.size(); ++i) {
    present[i] = std::move(fragments[i]);
  }
  return present;
}

void BM_Encode(benchmark::State& state) {
  const auto ell = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::uint16_t>(state.range(1));
  const ecreg::Codec codec(static_cast<std::uint16_t>(2 * k + 2), k);
  const ecreg::Bytes value = MakeValue(ell);
  for (auto _ : state) {
    benchmark::DoNotOptimize(codec.Encode(value));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(ell));
}

void BM_EncodeSerial(benchmark::State& state) {
  const auto ell = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::uint16_t>(state.range(1));
  const ecreg::Codec codec(static_cast<std::uint16_t>(2 * k + 2), k);
  const ecreg::Bytes value = MakeValue(ell);
  for (auto _ : state) {
    benchmark::DoNotOptimize(codec.EncodeSerial(value));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(ell));
}

void BM_Reconstruct(benchmark::State& state) {
  const auto ell = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::uint16_t>(state.range(1));
  const ecreg::Codec codec(static_cast<std::uint16_t>(2 * k + 2), k);
  const auto present = DropToK(codec.Encode(MakeValue(ell)), k);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        codec.Reconstruct(present, static_cast<std::uint32_t>(ell)));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(ell));
}

void BM_ReconstructSerial(benchmark::State& state) {
  const auto ell = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::uint16_t>(state.range(1));
  const ecreg::Codec codec(static_cast<std::uint16_t>(2 * k + 2), k);
  const auto present = DropToK(codec.Encode(MakeValue(ell)), k);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        codec.ReconstructSerial(present, static_cast<std::uint32_t>(ell)));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(ell));
}

void Shapes(benchmark::internal::Benchmark* b) {
  for (std::int64_t ell : {1 << 12, 1 << 16, 1 << 20}) {
    for (std::int64_t k : {2, 3, 5}) b->Args({ell, k});
  }
}

BENCHMARK(BM_Encode)->Apply(Shapes);
BENCHMARK(BM_EncodeSerial)->Apply(Shapes);
BENCHMARK(BM_Reconstruct)->Apply(Shapes);
BENCHMARK(BM_ReconstructSerial)->Apply(Shapes);

}  // namespace

BENCHMARK_MAIN();
