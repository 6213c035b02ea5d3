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

#ifndef ECREG_CHECKER_HPP_
#define ECREG_CHECKER_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "ecreg/history.hpp"
#include "ecreg/trace.hpp"
#include "ecreg/types.hpp"

namespace ecreg {

struct LinearizabilityResult {
  bool ok = false;
  std::string violation;                // empty when ok
  std::vector<std::uint64_t> witness;   // op ids in linearization order
};

/// Decides atomicity of a register history in polynomial time.
///
/// Precondition: all written values are distinct (the workload guarantees
/// this; violations throw ConfigError). With unique values a history is
/// linearizable iff the values can be totally ordered such that every
/// operation's placement respects real-time order and every read returns
/// the latest preceding write. That reduces to cycle detection on a digraph
/// with one vertex per written value (plus one for the empty register):
/// u precedes v whenever any operation on u returns before any operation on
/// v starts. Reads of the empty register precede every write. A read must
/// also not complete before its own value's write was invoked.
///
/// Pending writes take effect exactly when some completed read returned
/// their value; pending reads impose no constraint and are dropped. On
/// success the returned witness order is replayed against a sequential
/// register as a self-check.
LinearizabilityResult CheckLinearizable(const History& h);

struct ProbeResult {
  bool ok = true;
  bool skipped = false;  // probe not applicable to this trace
  std::string detail;
};

struct AmnesicReport {
  ProbeResult result;
  std::uint64_t max_node_fragments = 0;
  std::uint64_t max_total_bytes = 0;
  std::uint64_t byte_bound = 0;
  std::uint64_t snapshots = 0;
};

/// At every quiescent snapshot, total stored fragment bytes must stay under
/// the amnesic bound 2 m^2 n ceil(ell/k).
AmnesicReport CheckAmnesic(const TraceLog& trace, const SystemConfig& cfg);

struct BandwidthReport {
  ProbeResult result;
  std::uint64_t write_ops_checked = 0;
  std::uint64_t read_ops_checked = 0;
  std::uint64_t write_data_per_op = 0;  // required: n * ceil(ell/k)
  std::uint64_t read_data_bound = 0;    // cap: (t+k) * ceil(ell/k)
  std::uint64_t max_read_data = 0;
  std::uint64_t total_metadata_bytes = 0;
};

/// Per-operation data-plane accounting. Every completed write must have
/// dispersed exactly n fragments (n * ceil(ell/k) data bytes); every
/// completed read must have received at most t+k on-timestamp fragments.
/// Needs a drained trace for the write equality; otherwise skipped.
BandwidthReport CheckBandwidth(const TraceLog& trace, const SystemConfig& cfg);

/// Channel sequence numbers must arrive 0,1,2,... per (src,dst) pair.
ProbeResult CheckFifo(const TraceLog& trace);

/// Replays directory atomicity points in trace order; every recorded scan
/// payload must equal the replayed directory state at that instant.
ProbeResult CheckDirectoryReplay(const TraceLog& trace,
                                 const SystemConfig& cfg);

/// A finished run may leave operations pending only at crashed clients.
ProbeResult CheckWaitFreedom(const TraceLog& trace);

/// Structural protocol invariants on the trace: read integrity (returned
/// values match a write, timestamps included), timestamp order consistent
/// with real-time order, unique write timestamps, and frozen-pointer reads
/// only from pointers published inside the read's announce-to-scan window.
ProbeResult CheckStructure(const TraceLog& trace, const SystemConfig& cfg);

struct TraceVerdict {
  LinearizabilityResult linearizable;
  AmnesicReport amnesic;
  BandwidthReport bandwidth;
  ProbeResult fifo;
  ProbeResult directory;
  ProbeResult wait_freedom;
  ProbeResult structure;

  bool ok() const;
  /// One line per check, "ok"/"FAIL"/"skipped" plus detail.
  std::string Summary() const;
};

/// Runs every check on a trace. The system configuration comes from the
/// trace's meta line.
TraceVerdict CheckTrace(const TraceLog& trace);

}  // namespace ecreg

#endif  // ECREG_CHECKER_HPP_
