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

#ifndef ECREG_MESSAGES_HPP_
#define ECREG_MESSAGES_HPP_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ecreg/directory.hpp"
#include "ecreg/types.hpp"

namespace ecreg {

/// Address of a simulated component. kSim names the harness itself in trace
/// lines that no component emitted (run metadata, snapshots, run end).
struct Addr {
  enum class Kind : std::uint8_t { kClient = 0, kNode = 1, kDir = 2, kSim = 3 };
  Kind kind = Kind::kDir;
  std::uint16_t idx = 0;

  static Addr Client(std::uint16_t c) { return {Kind::kClient, c}; }
  static Addr Node(std::uint16_t i) { return {Kind::kNode, i}; }
  static Addr Dir() { return {Kind::kDir, 0}; }
  static Addr Sim() { return {Kind::kSim, 0}; }

  std::string Label() const {
    switch (kind) {
      case Kind::kClient: return "client:" + std::to_string(idx);
      case Kind::kNode: return "node:" + std::to_string(idx);
      case Kind::kDir: return "dir";
      default: return "sim";
    }
  }

  friend auto operator<=>(const Addr&, const Addr&) = default;
};

/// Inverse of Addr::Label. Returns nothing for malformed labels.
std::optional<Addr> AddrFromLabel(const std::string& label);

/// Which step of a client operation a directory message belongs to. Carried
/// for trace annotation only; the protocol itself dispatches on phase.
enum class DirOpTag : std::uint8_t {
  kWriterPreScan = 0,
  kWriterUpdate = 1,
  kWriterPostScan = 2,
  kReaderAnnounce = 3,
  kReaderScan = 4,
};

const char* DirOpTagName(DirOpTag tag);

struct NodeWrite {
  Timestamp ts;
  Bytes frag;
};
struct NodeWriteAck {
  Timestamp ts;
};
struct NodeRead {
  Timestamp ts;
};
struct NodeReadResp {
  Timestamp ts;
  Fragment frag;
};
struct NodeFree {
  std::vector<Timestamp> ts_set;  // sorted
};
struct NodeFreeAck {
  std::vector<Timestamp> ts_set;
};
struct DirUpdate {
  ClientId client;
  PartialEntry fields;
  DirOpTag tag;
};
struct DirUpdateAck {
  DirOpTag tag;
};
struct DirScan {
  DirOpTag tag;
};
struct DirScanResp {
  std::vector<MetadataEntry> snapshot;
  DirOpTag tag;
};

using Message =
    std::variant<NodeWrite, NodeWriteAck, NodeRead, NodeReadResp, NodeFree,
                 NodeFreeAck, DirUpdate, DirUpdateAck, DirScan, DirScanResp>;

const char* MessageKindName(const Message& msg);

/// Fragment payload bytes carried by the message (the data-plane cost).
std::uint64_t MessageDataBytes(const Message& msg);

/// Canonical size of everything else: timestamps are 10 bytes, digests 32,
/// pointers 10 + 1 + |set| + n flagged digest slots, directory entries the
/// sum of their parts. Reported separately from the data plane.
std::uint64_t MessageMetadataBytes(const Message& msg, std::uint16_t n,
                                   std::uint16_t m);

}  // namespace ecreg

#endif  // ECREG_MESSAGES_HPP_
