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

#ifndef ECREG_TRACE_HPP_
#define ECREG_TRACE_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "ecreg/directory.hpp"
#include "ecreg/messages.hpp"
#include "ecreg/types.hpp"

namespace ecreg {

// Trace files are JSON Lines. Every line is one event:
//   {"step":N,"kind":"...","src":"...","dst":"...","payload":{...}}
// Kinds: meta (first line: scenario + seed), invoke, deliver,
// dir-atomicity-point, respond, snapshot (emitted at quiescent points),
// end (last line). Fragment and value bytes never appear in traces; they are
// logged as sizes plus short digests.

/// First line of every trace.
struct MetaRecord {
  nlohmann::json scenario;
  std::uint64_t seed = 0;
  std::string scenario_digest;
};

/// A client begins an operation. op ids are unique within a run.
struct InvokeRecord {
  ClientId client = 0;
  std::uint64_t op = 0;
  bool is_write = false;
  std::optional<std::string> value;  // written value id
};

/// One message handed to its destination. For directory messages this line
/// marks arrival; the operation itself is the paired dir-atomicity-point.
struct DeliverRecord {
  std::string msg;             // message kind name
  std::uint64_t chseq = 0;     // per (src,dst) channel sequence number
  std::uint64_t op = 0;        // originating client op id (0 = none)
  std::uint64_t data_bytes = 0;
  std::uint64_t meta_bytes = 0;
  std::optional<Timestamp> ts;
  bool frag_present = false;
  std::vector<Timestamp> ts_set;   // free / free-ack payloads
  std::optional<std::string> tag;  // directory op tag
};

/// The indivisible instant at which a directory Update or Scan takes effect.
struct DirPointRecord {
  ClientId client = 0;
  std::string tag;
  bool is_update = false;
  std::uint64_t op = 0;
  // Update: the wildcard fields as JSON. Scan: the returned snapshot.
  nlohmann::json detail;
};

/// A client operation completes.
struct RespondRecord {
  ClientId client = 0;
  std::uint64_t op = 0;
  bool is_write = false;
  std::optional<std::string> value;  // read result id; absent = empty register
  Timestamp ts;                      // write: its timestamp; read: fixed ts
  std::optional<std::uint16_t> read_from;  // writer whose pointer served it
  bool read_was_frozen = false;
  std::uint64_t read_index = 0;         // reads: announced index
  std::vector<std::uint16_t> read_set;  // reads: nodes fetched from
};

struct NodeSample {
  std::uint16_t id = 0;
  std::uint64_t fragments = 0;
  std::uint64_t bytes = 0;

  friend bool operator==(const NodeSample&, const NodeSample&) = default;
};

/// Storage census at a quiescent point (no live op, all channels empty).
struct SnapshotRecord {
  std::uint64_t completed_writes = 0;
  std::uint64_t completed_reads = 0;
  std::vector<NodeSample> nodes;
};

struct PendingRecord {
  ClientId client = 0;
  std::uint64_t op = 0;
  bool is_write = false;
  bool crashed = false;
};

/// Last line of every trace.
struct EndRecord {
  bool drained = false;
  std::uint64_t steps = 0;
  std::vector<PendingRecord> pending;
};

using EventBody = std::variant<MetaRecord, InvokeRecord, DeliverRecord,
                               DirPointRecord, RespondRecord, SnapshotRecord,
                               EndRecord>;

struct TraceEvent {
  std::uint64_t step = 0;
  Addr src = Addr::Sim();
  Addr dst = Addr::Sim();
  EventBody body;

  const char* KindName() const;
  nlohmann::json ToJson() const;
  static TraceEvent FromJson(const nlohmann::json& j);
};

/// In-memory event sequence with JSONL round-tripping. Probes consume the
/// typed events, so checking a freshly simulated run and checking its parsed
/// trace file see identical data.
class TraceLog {
 public:
  void Append(TraceEvent ev) { events_.push_back(std::move(ev)); }
  const std::vector<TraceEvent>& events() const { return events_; }

  void WriteJsonl(std::ostream& out) const;
  static TraceLog FromJsonl(std::istream& in);
  static TraceLog FromFile(const std::string& path);

 private:
  std::vector<TraceEvent> events_;
};

// Rendering helpers, shared with the directory-replay probe so that a
// replayed state can be compared against recorded scan payloads. Digests are
// truncated to 16 hex characters in traces.
nlohmann::json TimestampToJson(const Timestamp& ts);
nlohmann::json PointerToJson(const Pointer& ptr);
nlohmann::json EntryToJson(const MetadataEntry& entry);
nlohmann::json PartialToJson(const PartialEntry& fields);
nlohmann::json DirSnapshotToJson(const std::vector<MetadataEntry>& snapshot);

/// Short content id for a register value: first 16 hex chars of its SHA-256.
std::string ValueId(const Bytes& value);

}  // namespace ecreg

#endif  // ECREG_TRACE_HPP_
