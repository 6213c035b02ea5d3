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

#ifndef ECREG_NODE_HPP_
#define ECREG_NODE_HPP_

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "ecreg/types.hpp"

namespace ecreg {

/// Per-node fragment store: a plain key-value map from the canonical
/// timestamp encoding to fragment bytes. A correct node stores the fragment
/// of every write it acknowledges and erases exactly what Free names; the
/// amnesic retention logic lives entirely on the writer side.
class NodeStore {
 public:
  /// Last write wins when the same timestamp is stored twice.
  void Write(const Timestamp& ts, Bytes frag) {
    data_[EncodeTimestampKey(ts)] = std::move(frag);
  }

  Fragment Read(const Timestamp& ts) const {
    const auto it = data_.find(EncodeTimestampKey(ts));
    if (it == data_.end()) return std::nullopt;
    return it->second;
  }

  bool Holds(const Timestamp& ts) const {
    return data_.count(EncodeTimestampKey(ts)) != 0;
  }

  /// Erase every named timestamp; absent keys (including the initial
  /// timestamp, which no node ever stores) are a no-op.
  void Free(const std::vector<Timestamp>& ts_set) {
    for (const Timestamp& ts : ts_set) data_.erase(EncodeTimestampKey(ts));
  }

  void Clear() { data_.clear(); }

  std::size_t FragmentCount() const { return data_.size(); }

  std::uint64_t StoredBytes() const {
    std::uint64_t total = 0;
    for (const auto& [key, frag] : data_) total += frag.size();
    return total;
  }

  /// Smallest stored key in canonical order, if any.
  std::optional<std::pair<Timestamp, Bytes>> Oldest() const {
    if (data_.empty()) return std::nullopt;
    const auto& [key, frag] = *data_.begin();
    return std::make_pair(DecodeTimestampKey(key), frag);
  }

  const std::map<TsKey, Bytes>& data() const { return data_; }

  friend bool operator==(const NodeStore&, const NodeStore&) = default;

 private:
  std::map<TsKey, Bytes> data_;
};

}  // namespace ecreg

#endif  // ECREG_NODE_HPP_
