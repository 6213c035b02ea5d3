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

#ifndef ECREG_CLIENT_HPP_
#define ECREG_CLIENT_HPP_

#include <optional>
#include <utility>
#include <vector>

#include "ecreg/erasure.hpp"
#include "ecreg/hashing.hpp"
#include "ecreg/messages.hpp"
#include "ecreg/types.hpp"

namespace ecreg {

/// Pick the pointer of entry p that a reader at read index `index` must
/// consider: the live write pointer unless p froze one for this reader at
/// exactly this index. The protocol guarantees index never trails
/// frozenindex, so anything else is a violation.
Pointer ReadFrom(const std::vector<MetadataEntry>& m, ClientId c, ClientId p,
                 std::uint64_t index);

struct ReadChoice {
  Pointer ptr;                    // highest candidate, null if none
  std::optional<ClientId> from;   // entry it came from
  bool frozen = false;            // taken from frozenptrlist rather than live
};

/// Maximum of ReadFrom over all entries, by timestamp order.
ReadChoice HighestRead(const std::vector<MetadataEntry>& m, ClientId c,
                       std::uint64_t index);

enum class WriterPhase : std::uint8_t {
  kIdle = 0,
  kScanning,
  kDispersing,
  kUpdating,
  kCollectingIndices,
  kFreeing,
};

enum class ReaderPhase : std::uint8_t {
  kIdle = 0,
  kAnnouncing,
  kScanning,
  kFetching,
};

/// Completion of a client operation, handed back to the environment.
struct OpResponse {
  bool is_write = false;
  std::optional<Bytes> value;       // read result; absent means the register
                                    // was empty (or this is a write ack)
  Timestamp ts = kT0;               // the operation's timestamp
  std::optional<ClientId> read_from;
  bool read_was_frozen = false;
};

/// Everything one protocol step produces: messages to send, in order, plus
/// at most one operation completion.
struct ClientOutput {
  std::vector<std::pair<Addr, Message>> sends;
  std::optional<OpResponse> response;
};

/// One client's protocol state machine. Event-driven and transport-free:
/// the caller (simulator or test) delivers messages and routes the produced
/// sends. A client runs at most one operation at a time; invoking while busy
/// is a well-formedness violation and throws.
class Client {
 public:
  Client(const SystemConfig& cfg, ClientId id, const Codec* codec);

  ClientOutput InvokeWrite(Bytes value);
  ClientOutput InvokeRead();

  /// Deliver one message. Unsolicited or guard-failing messages are dropped.
  ClientOutput OnMessage(const Addr& src, const Message& msg);

  bool Idle() const {
    return wphase_ == WriterPhase::kIdle && rphase_ == ReaderPhase::kIdle;
  }
  ClientId id() const { return id_; }
  WriterPhase writer_phase() const { return wphase_; }
  ReaderPhase reader_phase() const { return rphase_; }
  const Pointer& writeptr() const { return writeptr_; }
  const Pointer& prevptr() const { return prevptr_; }
  const Pointer& readptr() const { return readptr_; }
  const std::vector<Pointer>& frozenptrlist() const { return frozenptrlist_; }
  const std::vector<Pointer>& reservedptrlist() const {
    return reservedptrlist_;
  }
  const std::vector<std::uint64_t>& frozenindex() const { return frozenindex_; }
  std::uint64_t readindex() const { return readindex_; }
  const std::vector<Fragment>& readlist() const { return readlist_; }
  const Bytes& pending_value() const { return value_; }

  /// Feeds every behavior-relevant member to the hasher; used by the
  /// exhaustive explorer to deduplicate world states.
  void HashInto(StateHasher& h) const;

 private:
  ClientOutput HandleWriteAck(std::uint16_t node, const NodeWriteAck& ack);
  ClientOutput HandleReadResp(std::uint16_t node, const NodeReadResp& resp);
  ClientOutput HandleUpdateAck(const DirUpdateAck& ack);
  ClientOutput HandleScanResp(const DirScanResp& resp);
  ClientOutput FinishWrite(const std::vector<MetadataEntry>& m);
  ClientOutput FinishReadScan(const std::vector<MetadataEntry>& m);

  SystemConfig cfg_;
  ClientId id_;
  const Codec* codec_;

  WriterPhase wphase_ = WriterPhase::kIdle;
  ReaderPhase rphase_ = ReaderPhase::kIdle;

  // Persistent writer state.
  Pointer writeptr_;
  Pointer prevptr_;
  std::vector<Pointer> frozenptrlist_;
  std::vector<Pointer> reservedptrlist_;
  std::vector<std::uint64_t> frozenindex_;

  // Persistent reader state.
  std::uint64_t readindex_ = 0;

  // Per-operation state.
  Bytes value_;
  Pointer readptr_;
  std::vector<Fragment> readlist_;
  std::optional<ClientId> read_from_;
  bool read_was_frozen_ = false;
};

}  // namespace ecreg

#endif  // ECREG_CLIENT_HPP_
