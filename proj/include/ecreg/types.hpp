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

#ifndef ECREG_TYPES_HPP_
#define ECREG_TYPES_HPP_

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ecreg/util.hpp"

namespace ecreg {

/// Client ids are dense 0..m-1. The reserved NIL id marks the initial
/// timestamp; it orders below every real id.
using ClientId = std::uint16_t;
inline constexpr ClientId kNilClient = 0xFFFF;

/// Logical timestamp (sn, c): sequence number plus writer id as tiebreaker.
/// Total order: by sn, then by client id with NIL below all real ids.
struct Timestamp {
  std::uint64_t sn = 0;
  ClientId c = kNilClient;

  friend std::strong_ordering operator<=>(const Timestamp& a,
                                          const Timestamp& b) {
    if (auto cmp = a.sn <=> b.sn; cmp != 0) return cmp;
    const std::int32_t ra = (a.c == kNilClient) ? -1 : a.c;
    const std::int32_t rb = (b.c == kNilClient) ? -1 : b.c;
    return ra <=> rb;
  }
  friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

/// The initial timestamp (0, NIL), smaller than every timestamp a writer
/// can produce.
inline constexpr Timestamp kT0{0, kNilClient};

/// Canonical 10-byte encoding: 8-byte big-endian sn, then 2-byte big-endian
/// client id with 0xFFFF for NIL. Used as node storage key and in traces.
using TsKey = std::array<std::uint8_t, 10>;
TsKey EncodeTimestampKey(const Timestamp& ts);
Timestamp DecodeTimestampKey(const TsKey& key);
std::string TimestampHex(const Timestamp& ts);
std::optional<Timestamp> TimestampFromHex(const std::string& hex);

/// 256-bit digest of a fragment.
using Digest = std::array<std::uint8_t, 32>;

/// SHA-256 of the given bytes.
Digest HashFragment(const Bytes& data);

/// A coded fragment; absent models the null entry of a node store or of a
/// reader's response list.
using Fragment = std::optional<Bytes>;

/// Digest vector with one entry per data node; entry i authenticates
/// fragment i. Computed by the writer, validated by readers.
std::vector<Digest> BuildCrossChecksum(const std::vector<Bytes>& fragments);

/// Metadata pointer to a stored value: timestamp, the set of node indices
/// that acknowledged storing their fragment, and the cross checksum. The
/// null pointer has timestamp kT0, an empty set, and no digests; a pointer
/// produced by a completed write has exactly t+k set members and all n
/// digests present.
struct Pointer {
  Timestamp ts = kT0;
  std::vector<std::uint16_t> set;                // sorted node indices
  std::vector<std::optional<Digest>> hash;       // size n, or empty for null

  bool IsNull() const { return ts == kT0; }
  friend bool operator==(const Pointer&, const Pointer&) = default;
};

inline Pointer NullPointer() { return Pointer{}; }

/// One directory row, owned by client p. frozenptrlist[q]/frozenindex[q]
/// hold the pointer p last froze for reader q and the read index it was
/// frozen at; readindex is p's own read counter.
struct MetadataEntry {
  Pointer writeptr;
  std::vector<Pointer> frozenptrlist;   // size m
  std::vector<std::uint64_t> frozenindex;  // size m
  std::uint64_t readindex = 0;

  friend bool operator==(const MetadataEntry&, const MetadataEntry&) = default;
};

MetadataEntry MakeEntry(std::uint16_t m);

/// Static system parameters. n data nodes of which at most t are Byzantine,
/// (n,k) erasure code, m clients, values of exactly ell bytes.
struct SystemConfig {
  std::uint16_t n = 0;
  std::uint16_t t = 0;
  std::uint16_t k = 0;
  std::uint16_t m = 0;
  std::uint32_t ell = 0;

  std::uint16_t quorum() const { return static_cast<std::uint16_t>(t + k); }
  std::uint32_t fragment_size() const { return (ell + k - 1) / k; }

  friend bool operator==(const SystemConfig&, const SystemConfig&) = default;

  /// Throws ConfigError unless 1 <= k, n <= 255, m >= 1, ell >= 1 and
  /// n >= 2t+k. The resilience bound can be waived for negative liveness
  /// tests only.
  void Validate(bool allow_insufficient_nodes = false) const;
};

}  // namespace ecreg

#endif  // ECREG_TYPES_HPP_
