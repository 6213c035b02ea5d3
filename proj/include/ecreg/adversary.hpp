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

#ifndef ECREG_ADVERSARY_HPP_
#define ECREG_ADVERSARY_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ecreg/messages.hpp"
#include "ecreg/node.hpp"

namespace ecreg {

/// Data node fault menu. Every strategy is a deterministic function of
/// (seed, node id, per-node event counter), so runs replay bit-identically.
enum class Strategy : std::uint8_t {
  kHonest = 0,
  kSilent,           // consumes everything, never answers
  kCorruptFragment,  // answers reads with a bit-flipped fragment
  kWrongTimestamp,   // answers acks and reads under a shifted timestamp
  kAckWithoutStore,  // acknowledges writes it never stores
  kSpuriousFree,     // drops its whole store whenever any Free arrives
  kStaleReplay,      // answers reads with its oldest stored pair
};

const char* StrategyName(Strategy s);
std::optional<Strategy> StrategyFromName(const std::string& name);

/// A simulated data node: its store plus fault behavior.
struct NodeRuntime {
  Strategy strategy = Strategy::kHonest;
  NodeStore store;
  std::uint64_t handled = 0;

  friend bool operator==(const NodeRuntime&, const NodeRuntime&) = default;
};

/// Process one incoming message at a node and return the responses to send
/// back to the message's source, in order.
std::vector<Message> NodeHandle(NodeRuntime& node, std::uint16_t node_id,
                                std::uint64_t seed, const Message& msg);

}  // namespace ecreg

#endif  // ECREG_ADVERSARY_HPP_
