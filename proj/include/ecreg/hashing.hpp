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

#ifndef ECREG_HASHING_HPP_
#define ECREG_HASHING_HPP_

#include <array>
#include <cstdint>
#include <string>

#include "ecreg/messages.hpp"
#include "ecreg/types.hpp"

namespace ecreg {

/// 128-bit incremental digest used to deduplicate simulator states during
/// exhaustive exploration. Two independent multiplicative lanes over the
/// same byte stream; not cryptographic, just collision-safe at the scale of
/// bounded state spaces.
class StateHasher {
 public:
  void PutByte(std::uint8_t x) {
    a_ = (a_ ^ x) * 0x00000100000001b3ULL;
    b_ = (b_ ^ x) * 0xc2b2ae3d27d4eb4fULL;
    b_ ^= b_ >> 29;
  }
  void PutBool(bool x) { PutByte(x ? 1 : 0); }
  void PutU64(std::uint64_t x) {
    for (int i = 0; i < 8; ++i) PutByte(static_cast<std::uint8_t>(x >> (8 * i)));
  }
  void PutBytes(const std::uint8_t* data, std::size_t len) {
    PutU64(len);
    for (std::size_t i = 0; i < len; ++i) PutByte(data[i]);
  }
  void PutString(const std::string& s) {
    PutBytes(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
  }

  std::array<std::uint64_t, 2> Digest() const { return {a_, b_}; }

 private:
  std::uint64_t a_ = 0xcbf29ce484222325ULL;
  std::uint64_t b_ = 0x9e3779b97f4a7c15ULL;
};

inline void HashTimestamp(StateHasher& h, const Timestamp& ts) {
  h.PutU64(ts.sn);
  h.PutU64(ts.c);
}

inline void HashBytes(StateHasher& h, const Bytes& data) {
  h.PutBytes(data.data(), data.size());
}

inline void HashPointer(StateHasher& h, const Pointer& ptr) {
  HashTimestamp(h, ptr.ts);
  h.PutU64(ptr.set.size());
  for (auto idx : ptr.set) h.PutU64(idx);
  h.PutU64(ptr.hash.size());
  for (const auto& digest : ptr.hash) {
    h.PutBool(digest.has_value());
    if (digest.has_value()) h.PutBytes(digest->data(), digest->size());
  }
}

inline void HashEntry(StateHasher& h, const MetadataEntry& entry) {
  HashPointer(h, entry.writeptr);
  h.PutU64(entry.frozenptrlist.size());
  for (const auto& ptr : entry.frozenptrlist) HashPointer(h, ptr);
  h.PutU64(entry.frozenindex.size());
  for (auto idx : entry.frozenindex) h.PutU64(idx);
  h.PutU64(entry.readindex);
}

inline void HashFragmentOpt(StateHasher& h, const Fragment& frag) {
  h.PutBool(frag.has_value());
  if (frag.has_value()) HashBytes(h, *frag);
}

inline void HashMessage(StateHasher& h, const Message& msg) {
  h.PutU64(msg.index());
  std::visit(
      [&h](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, NodeWrite>) {
          HashTimestamp(h, m.ts);
          HashBytes(h, m.frag);
        } else if constexpr (std::is_same_v<T, NodeWriteAck> ||
                             std::is_same_v<T, NodeRead>) {
          HashTimestamp(h, m.ts);
        } else if constexpr (std::is_same_v<T, NodeReadResp>) {
          HashTimestamp(h, m.ts);
          HashFragmentOpt(h, m.frag);
        } else if constexpr (std::is_same_v<T, NodeFree> ||
                             std::is_same_v<T, NodeFreeAck>) {
          h.PutU64(m.ts_set.size());
          for (const auto& ts : m.ts_set) HashTimestamp(h, ts);
        } else if constexpr (std::is_same_v<T, DirUpdate>) {
          h.PutU64(m.client);
          h.PutByte(static_cast<std::uint8_t>(m.tag));
          h.PutBool(m.fields.writeptr.has_value());
          if (m.fields.writeptr) HashPointer(h, *m.fields.writeptr);
          h.PutBool(m.fields.frozenptrlist.has_value());
          if (m.fields.frozenptrlist) {
            h.PutU64(m.fields.frozenptrlist->size());
            for (const auto& ptr : *m.fields.frozenptrlist) {
              HashPointer(h, ptr);
            }
          }
          h.PutBool(m.fields.frozenindex.has_value());
          if (m.fields.frozenindex) {
            h.PutU64(m.fields.frozenindex->size());
            for (auto idx : *m.fields.frozenindex) h.PutU64(idx);
          }
          h.PutBool(m.fields.readindex.has_value());
          if (m.fields.readindex) h.PutU64(*m.fields.readindex);
        } else if constexpr (std::is_same_v<T, DirUpdateAck> ||
                             std::is_same_v<T, DirScan>) {
          h.PutByte(static_cast<std::uint8_t>(m.tag));
        } else if constexpr (std::is_same_v<T, DirScanResp>) {
          h.PutByte(static_cast<std::uint8_t>(m.tag));
          h.PutU64(m.snapshot.size());
          for (const auto& entry : m.snapshot) HashEntry(h, entry);
        }
      },
      msg);
}

}  // namespace ecreg

#endif  // ECREG_HASHING_HPP_
