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

#ifndef ECREG_SIM_HPP_
#define ECREG_SIM_HPP_

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ecreg/adversary.hpp"
#include "ecreg/client.hpp"
#include "ecreg/directory.hpp"
#include "ecreg/erasure.hpp"
#include "ecreg/hashing.hpp"
#include "ecreg/scenario.hpp"
#include "ecreg/trace.hpp"

namespace ecreg {

// Discrete-event simulator. All communication goes through per-(src,dst)
// FIFO channels; a step either delivers the head message of one channel or
// lets an idle client start its next scripted operation. Directory messages
// are delivered like any other, and the Update/Scan takes effect at that
// single delivery instant, which is the operation's atomicity point. The
// scheduler owns all nondeterminism: given a scenario and a seed, a run is
// bit-reproducible.

/// One schedulable event. Ordering (deliveries by channel key, then invokes
/// by client) defines the canonical enumeration the policies draw from.
struct Choice {
  enum class Kind : std::uint8_t { kDeliver = 0, kInvoke = 1 };
  Kind kind = Kind::kDeliver;
  Addr src;
  Addr dst;

  static Choice Deliver(Addr from, Addr to) {
    return {Kind::kDeliver, from, to};
  }
  static Choice Invoke(ClientId c) {
    return {Kind::kInvoke, Addr::Client(c), Addr::Client(c)};
  }

  // "deliver:node:2->client:0" or "invoke:1"; the scripted policy matches
  // these labels.
  std::string Label() const;

  friend auto operator<=>(const Choice&, const Choice&) = default;
};

/// A choice plus the step since which it has been enabled (the head
/// message's enqueue step, or the step the client went idle). The random
/// policy uses ages to enforce its fairness bound.
struct EnabledChoice {
  Choice choice;
  std::uint64_t ready_since = 0;
};

struct QueuedMessage {
  Message msg;
  std::uint64_t chseq = 0;
  std::uint64_t enq_step = 0;
  std::uint64_t op = 0;  // originating client op id; trace annotation only

  friend bool operator==(const QueuedMessage&, const QueuedMessage&) = default;
};

struct SimChannel {
  std::deque<QueuedMessage> q;
  std::uint64_t next_seq = 0;
};

/// Retention bookkeeping for one in-flight read: the honest nodes that held
/// a checksum-matching fragment of the fixed timestamp when the reader fixed
/// its pointer. The protocol must keep those fragments until the read
/// returns; an honest node freeing one is flagged immediately.
struct ReadFix {
  Timestamp ts;
  std::vector<std::uint16_t> set;  // the fixed pointer's full node set
  std::vector<std::uint16_t> honest_holders;
};

struct SimClient {
  Client proto;
  std::vector<bool> plan;  // true = write
  std::size_t next_op = 0;
  std::uint32_t writes_issued = 0;
  std::uint64_t cur_op = 0;  // 0 = idle
  bool cur_is_write = false;
  bool crashed = false;
  std::uint64_t ready_since = 0;
  std::optional<ReadFix> fix;

  explicit SimClient(Client c) : proto(std::move(c)) {}
};

struct RunStats {
  bool drained = false;
  bool hit_step_cap = false;
  std::uint64_t steps = 0;
  std::uint64_t completed_writes = 0;
  std::uint64_t completed_reads = 0;
  std::vector<PendingRecord> pending;  // ops never completed

  /// Pending operations of clients that never crashed; nonempty means the
  /// schedule starved someone, which a fair schedule must never do.
  std::vector<PendingRecord> Starved() const;
};

class World {
 public:
  World(const Scenario& scenario, std::uint64_t seed, TraceLog* trace);

  /// Enabled events in canonical order. Empty means the run is over.
  std::vector<EnabledChoice> Enabled();

  /// Execute one event. The choice must currently be enabled.
  void Apply(const Choice& choice);

  /// Append the end-of-run record and return final statistics.
  RunStats Finish(bool hit_step_cap);

  std::uint64_t step() const { return step_; }
  std::uint64_t completed_writes() const { return completed_writes_; }
  std::uint64_t completed_reads() const { return completed_reads_; }
  const Directory& dir() const { return dir_; }
  const std::vector<NodeRuntime>& nodes() const { return nodes_; }
  const std::vector<SimClient>& clients() const { return clients_; }
  const Scenario& scenario() const { return scenario_; }

  void set_trace(TraceLog* trace) { trace_ = trace; }

  /// 128-bit digest of protocol state plus the client-visible history so
  /// far. Step counters, channel sequence numbers, and fairness bookkeeping
  /// are excluded: they do not influence future behavior or verdicts.
  std::array<std::uint64_t, 2> StateHash() const;

 private:
  void RefreshCrashes();
  void DeliverTo(const Choice& choice);
  void InvokeNext(ClientId c);
  void HandleAtDir(Addr src, const QueuedMessage& qm);
  void HandleAtNode(std::uint16_t node_id, Addr src, const QueuedMessage& qm);
  void HandleAtClient(ClientId c, Addr src, const QueuedMessage& qm);
  void Send(Addr src, Addr dst, Message msg, std::uint64_t op);
  void EmitDeliver(Addr src, Addr dst, const QueuedMessage& qm);
  void NoteResponse(ClientId c, const OpResponse& r);
  void NoteReadFixIfAny(ClientId c);
  void GuardRetention(std::uint16_t node_id, const std::vector<Timestamp>& freed);
  void MaybeEmitSnapshot();
  SnapshotRecord CurrentSnapshot() const;
  bool Quiescent() const;

  Scenario scenario_;
  std::uint64_t seed_ = 0;
  std::shared_ptr<const Codec> codec_;
  Directory dir_;
  std::vector<NodeRuntime> nodes_;
  std::vector<SimClient> clients_;
  std::map<std::pair<Addr, Addr>, SimChannel> channels_;
  TraceLog* trace_ = nullptr;

  std::uint64_t step_ = 0;
  std::uint64_t next_op_id_ = 0;
  std::uint64_t completed_writes_ = 0;
  std::uint64_t completed_reads_ = 0;
  bool was_quiescent_ = false;
  StateHasher hist_digest_;  // chained over invoke/respond records
};

/// Run a world to completion under the scenario's random or scripted
/// policy. The world must be freshly constructed.
RunStats DriveWorld(World& world, const Scenario& scenario,
                    std::uint64_t seed);

struct RunOutput {
  TraceLog trace;
  RunStats stats;
};

/// Build, run, and trace one run. Rejects exhaustive scenarios; those go
/// through ExploreExhaustive.
RunOutput SimulateRun(const Scenario& scenario, std::uint64_t seed);

struct ExhaustiveResult {
  bool ok = true;
  std::string violation;  // first failure, empty when ok
  std::optional<TraceLog> counterexample;
  std::uint64_t leaves = 0;
  std::uint64_t branch_points = 0;
  std::uint64_t memo_hits = 0;
  std::uint64_t deepest_branching = 0;  // branch decisions on longest path
};

/// Depth-bounded exhaustive exploration of schedule nondeterminism. Depth
/// counts branch points (instants with two or more enabled events); forced
/// steps are free, and once the budget is spent a path continues
/// deterministically with the first enabled event. Visited states are
/// deduplicated by StateHash, remembering the largest budget they were
/// explored with. Every leaf's history must be linearizable and free of
/// starved operations.
ExhaustiveResult ExploreExhaustive(const Scenario& scenario,
                                   std::uint64_t seed);

}  // namespace ecreg

#endif  // ECREG_SIM_HPP_
