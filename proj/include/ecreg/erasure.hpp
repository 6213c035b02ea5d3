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

#ifndef ECREG_ERASURE_HPP_
#define ECREG_ERASURE_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "ecreg/types.hpp"

namespace ecreg {

using GfMatrix = std::vector<std::vector<std::uint8_t>>;

/// Invert a square matrix over GF(2^8) by Gauss-Jordan elimination.
/// Returns nullopt when singular.
std::optional<GfMatrix> GfInvert(const GfMatrix& mat);

/// Systematic (n,k) MDS erasure code over GF(2^8).
///
/// The generator starts from the n x k Vandermonde matrix on the distinct
/// nonzero points 1..n and is normalized so its top k x k block is the
/// identity; any k rows stay invertible, so any k fragments recover the
/// value. Fragment i of a value v is the length-ceil(|v|/k) column
/// G[i] . pieces, where the pieces are v zero-padded and split k ways;
/// fragments 0..k-1 are the padded pieces themselves.
///
/// Encode and Reconstruct dispatch to an OpenMP kernel for large fragments;
/// the *Serial variants are the plain reference loops and produce bit-equal
/// output.
class Codec {
 public:
  Codec(std::uint16_t n, std::uint16_t k);

  std::uint16_t n() const { return n_; }
  std::uint16_t k() const { return k_; }
  const GfMatrix& generator() const { return gen_; }

  std::uint32_t FragmentSize(std::uint32_t ell) const {
    return (ell + k_ - 1) / k_;
  }

  /// Split + pad `value` and produce all n fragments.
  std::vector<Bytes> Encode(const Bytes& value) const;
  std::vector<Bytes> EncodeSerial(const Bytes& value) const;

  /// Recover the ell-byte value from any >= k present fragments (the k
  /// lowest-indexed ones are used). Returns nullopt when fewer than k are
  /// present or sizes are inconsistent.
  std::optional<Bytes> Reconstruct(const std::vector<Fragment>& fragments,
                                   std::uint32_t ell) const;
  std::optional<Bytes> ReconstructSerial(const std::vector<Fragment>& fragments,
                                         std::uint32_t ell) const;

 private:
  std::vector<Bytes> EncodeImpl(const Bytes& value, bool parallel) const;
  std::optional<Bytes> ReconstructImpl(const std::vector<Fragment>& fragments,
                                       std::uint32_t ell, bool parallel) const;
  /// Every k x k row submatrix must be invertible: checked exhaustively for
  /// n <= 8, by random sampling otherwise.
  void ValidateMds() const;

  std::uint16_t n_;
  std::uint16_t k_;
  GfMatrix gen_;  // n rows, k columns
};

}  // namespace ecreg

#endif  // ECREG_ERASURE_HPP_
