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

#include "ecreg/erasure.hpp"

#include <cstddef>
#include <stdexcept>

#include "ecreg/gf256.hpp"

namespace ecreg {

namespace {

// Fragments at least this large go through the OpenMP kernels; the
// simulator's desk-scale fragments stay on the serial path.
constexpr std::size_t kParallelCutoff = 1 << 14;

GfMatrix Identity(std::uint16_t k) {
  GfMatrix id(k, std::vector<std::uint8_t>(k, 0));
  for (std::uint16_t i = 0; i < k; ++i) id[i][i] = 1;
  return id;
}

GfMatrix MatMul(const GfMatrix& a, const GfMatrix& b) {
  const std::size_t rows = a.size();
  const std::size_t inner = b.size();
  const std::size_t cols = b[0].size();
  GfMatrix out(rows, std::vector<std::uint8_t>(cols, 0));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < inner; ++j) {
      const std::uint8_t aij = a[i][j];
      if (aij == 0) continue;
      for (std::size_t col = 0; col < cols; ++col) {
        out[i][col] ^= gf::Mul(aij, b[j][col]);
      }
    }
  }
  return out;
}

bool Invertible(const GfMatrix& mat) { return GfInvert(mat).has_value(); }

// Visit all size-k index subsets of [0, n); returns false if any callback
// returns false.
template <typename Fn>
bool ForEachSubset(std::uint16_t n, std::uint16_t k, Fn&& fn) {
  std::vector<std::uint16_t> pick(k);
  for (std::uint16_t i = 0; i < k; ++i) pick[i] = i;
  while (true) {
    if (!fn(pick)) return false;
    int i = k - 1;
    while (i >= 0 && pick[i] == n - k + i) --i;
    if (i < 0) return true;
    ++pick[i];
    for (std::uint16_t j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
}

}  // namespace

std::optional<GfMatrix> GfInvert(const GfMatrix& mat) {
  const std::size_t k = mat.size();
  GfMatrix a = mat;
  GfMatrix inv = Identity(static_cast<std::uint16_t>(k));
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t pivot = col;
    while (pivot < k && a[pivot][col] == 0) ++pivot;
    if (pivot == k) return std::nullopt;
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    const std::uint8_t scale = gf::Inv(a[col][col]);
    for (std::size_t j = 0; j < k; ++j) {
      a[col][j] = gf::Mul(a[col][j], scale);
      inv[col][j] = gf::Mul(inv[col][j], scale);
    }
    for (std::size_t row = 0; row < k; ++row) {
      if (row == col || a[row][col] == 0) continue;
      const std::uint8_t factor = a[row][col];
      for (std::size_t j = 0; j < k; ++j) {
        a[row][j] ^= gf::Mul(factor, a[col][j]);
        inv[row][j] ^= gf::Mul(factor, inv[col][j]);
      }
    }
  }
  return inv;
}

Codec::Codec(std::uint16_t n, std::uint16_t k) : n_(n), k_(k) {
  if (k < 1 || k > n || n > 255) {
    throw ConfigError("codec requires 1 <= k <= n <= 255");
  }
  // Vandermonde rows on points 1..n, then right-multiply by the inverse of
  // the top block. Column operations keep every k-row minor invertible.
  GfMatrix vand(n, std::vector<std::uint8_t>(k, 0));
  for (std::uint16_t i = 0; i < n; ++i) {
    const auto x = static_cast<std::uint8_t>(i + 1);
    for (std::uint16_t j = 0; j < k; ++j) vand[i][j] = gf::Pow(x, j);
  }
  GfMatrix top(vand.begin(), vand.begin() + k);
  auto top_inv = GfInvert(top);
  if (!top_inv) throw std::logic_error("Vandermonde top block singular");
  gen_ = MatMul(vand, *top_inv);
  for (std::uint16_t i = 0; i < k; ++i) {
    for (std::uint16_t j = 0; j < k; ++j) {
      if (gen_[i][j] != (i == j ? 1 : 0)) {
        throw std::logic_error("generator not systematic");
      }
    }
  }
  ValidateMds();
}

void Codec::ValidateMds() const {
  auto check = [&](const std::vector<std::uint16_t>& rows) {
    GfMatrix sub(k_, std::vector<std::uint8_t>(k_));
    for (std::uint16_t r = 0; r < k_; ++r) sub[r] = gen_[rows[r]];
    return Invertible(sub);
  };
  if (n_ <= 8) {
    if (!ForEachSubset(n_, k_, check)) {
      throw std::logic_error("generator is not MDS");
    }
    return;
  }
  std::uint64_t state = (static_cast<std::uint64_t>(n_) << 16) | k_;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::uint16_t> rows;
    std::vector<bool> used(n_, false);
    while (rows.size() < k_) {
      const auto idx = static_cast<std::uint16_t>(SplitMix64(state) % n_);
      if (used[idx]) continue;
      used[idx] = true;
      rows.push_back(idx);
    }
    if (!check(rows)) throw std::logic_error("generator is not MDS");
  }
}

std::vector<Bytes> Codec::Encode(const Bytes& value) const {
  return EncodeImpl(value, FragmentSize(value.size()) >= kParallelCutoff);
}

std::vector<Bytes> Codec::EncodeSerial(const Bytes& value) const {
  return EncodeImpl(value, false);
}

std::vector<Bytes> Codec::EncodeImpl(const Bytes& value, bool parallel) const {
  const std::size_t len = FragmentSize(value.size());
  Bytes padded(len * k_, 0);
  std::copy(value.begin(), value.end(), padded.begin());

  std::vector<Bytes> frags(n_);
  for (std::uint16_t i = 0; i < k_; ++i) {
    frags[i].assign(padded.begin() + i * len, padded.begin() + (i + 1) * len);
  }
  for (std::uint16_t i = k_; i < n_; ++i) {
    Bytes& out = frags[i];
    out.assign(len, 0);
    const std::vector<std::uint8_t>& row = gen_[i];
    if (parallel) {
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(len); ++b) {
        std::uint8_t acc = 0;
        for (std::uint16_t j = 0; j < k_; ++j) {
          acc ^= gf::Mul(row[j], padded[j * len + b]);
        }
        out[b] = acc;
      }
    } else {
      for (std::size_t b = 0; b < len; ++b) {
        std::uint8_t acc = 0;
        for (std::uint16_t j = 0; j < k_; ++j) {
          acc ^= gf::Mul(row[j], padded[j * len + b]);
        }
        out[b] = acc;
      }
    }
  }
  return frags;
}

std::optional<Bytes> Codec::Reconstruct(const std::vector<Fragment>& fragments,
                                        std::uint32_t ell) const {
  return ReconstructImpl(fragments, ell, FragmentSize(ell) >= kParallelCutoff);
}

std::optional<Bytes> Codec::ReconstructSerial(
    const std::vector<Fragment>& fragments, std::uint32_t ell) const {
  return ReconstructImpl(fragments, ell, false);
}

std::optional<Bytes> Codec::ReconstructImpl(
    const std::vector<Fragment>& fragments, std::uint32_t ell,
    bool parallel) const {
  if (fragments.size() != n_) return std::nullopt;
  const std::size_t len = FragmentSize(ell);

  std::vector<std::uint16_t> rows;
  for (std::uint16_t i = 0; i < n_ && rows.size() < k_; ++i) {
    if (!fragments[i]) continue;
    if (fragments[i]->size() != len) return std::nullopt;
    rows.push_back(i);
  }
  if (rows.size() < k_) return std::nullopt;

  GfMatrix sub(k_, std::vector<std::uint8_t>(k_));
  for (std::uint16_t r = 0; r < k_; ++r) sub[r] = gen_[rows[r]];
  auto inv = GfInvert(sub);
  if (!inv) return std::nullopt;

  Bytes padded(len * k_, 0);
  for (std::uint16_t j = 0; j < k_; ++j) {
    std::uint8_t* piece = padded.data() + j * len;
    const std::vector<std::uint8_t>& coef = (*inv)[j];
    if (parallel) {
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(len); ++b) {
        std::uint8_t acc = 0;
        for (std::uint16_t r = 0; r < k_; ++r) {
          acc ^= gf::Mul(coef[r], (*fragments[rows[r]])[b]);
        }
        piece[b] = acc;
      }
    } else {
      for (std::size_t b = 0; b < len; ++b) {
        std::uint8_t acc = 0;
        for (std::uint16_t r = 0; r < k_; ++r) {
          acc ^= gf::Mul(coef[r], (*fragments[rows[r]])[b]);
        }
        piece[b] = acc;
      }
    }
  }
  padded.resize(ell);
  return padded;
}

}  // namespace ecreg
