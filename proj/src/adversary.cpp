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

#include "ecreg/adversary.hpp"

#include <utility>

#include "ecreg/util.hpp"

namespace ecreg {
namespace {

struct NamedStrategy {
  Strategy strategy;
  const char* name;
};

constexpr NamedStrategy kStrategyNames[] = {
    {Strategy::kHonest, "honest"},
    {Strategy::kSilent, "silent"},
    {Strategy::kCorruptFragment, "corrupt-fragment"},
    {Strategy::kWrongTimestamp, "wrong-timestamp"},
    {Strategy::kAckWithoutStore, "ack-without-store"},
    {Strategy::kSpuriousFree, "spurious-free"},
    {Strategy::kStaleReplay, "stale-replay"},
};

// Nonzero xor mask derived from the node's fault stream. Nonzero so a
// corrupted fragment never equals the stored one.
std::uint8_t CorruptionMask(std::uint16_t node_id, std::uint64_t seed,
                            std::uint64_t counter) {
  std::uint64_t state = seed ^ (0x9e3779b97f4a7c15ULL * (node_id + 1)) ^
                        (0xbf58476d1ce4e5b9ULL * (counter + 1));
  return static_cast<std::uint8_t>(SplitMix64(state) % 255 + 1);
}

}  // namespace

const char* StrategyName(Strategy s) {
  for (const auto& entry : kStrategyNames) {
    if (entry.strategy == s) return entry.name;
  }
  return "unknown";
}

std::optional<Strategy> StrategyFromName(const std::string& name) {
  for (const auto& entry : kStrategyNames) {
    if (name == entry.name) return entry.strategy;
  }
  return std::nullopt;
}

std::vector<Message> NodeHandle(NodeRuntime& node, std::uint16_t node_id,
                                std::uint64_t seed, const Message& msg) {
  const std::uint64_t counter = node.handled++;
  std::vector<Message> out;
  if (node.strategy == Strategy::kSilent) return out;

  if (const auto* write = std::get_if<NodeWrite>(&msg)) {
    if (node.strategy != Strategy::kAckWithoutStore) {
      node.store.Write(write->ts, write->frag);
    }
    Timestamp ack_ts = write->ts;
    if (node.strategy == Strategy::kWrongTimestamp) ack_ts.sn += 1;
    out.push_back(NodeWriteAck{ack_ts});
    return out;
  }

  if (const auto* read = std::get_if<NodeRead>(&msg)) {
    switch (node.strategy) {
      case Strategy::kCorruptFragment: {
        Fragment frag = node.store.Read(read->ts);
        if (frag.has_value()) {
          const std::uint8_t mask = CorruptionMask(node_id, seed, counter);
          for (auto& byte : *frag) byte ^= mask;
        }
        out.push_back(NodeReadResp{read->ts, std::move(frag)});
        break;
      }
      case Strategy::kWrongTimestamp: {
        Timestamp ts = read->ts;
        ts.sn += 1;
        out.push_back(NodeReadResp{ts, node.store.Read(read->ts)});
        break;
      }
      case Strategy::kStaleReplay: {
        if (auto oldest = node.store.Oldest(); oldest.has_value()) {
          out.push_back(NodeReadResp{oldest->first, oldest->second});
        } else {
          out.push_back(NodeReadResp{read->ts, std::nullopt});
        }
        break;
      }
      default:
        out.push_back(NodeReadResp{read->ts, node.store.Read(read->ts)});
        break;
    }
    return out;
  }

  if (const auto* free = std::get_if<NodeFree>(&msg)) {
    if (node.strategy == Strategy::kSpuriousFree) {
      node.store.Clear();
    } else {
      node.store.Free(free->ts_set);
    }
    out.push_back(NodeFreeAck{free->ts_set});
    return out;
  }

  // Nodes ignore message kinds addressed to clients or the directory.
  return out;
}

}  // namespace ecreg
