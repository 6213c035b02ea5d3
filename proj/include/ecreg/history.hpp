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

#ifndef ECREG_HISTORY_HPP_
#define ECREG_HISTORY_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ecreg/trace.hpp"
#include "ecreg/types.hpp"

namespace ecreg {

/// One register operation as observed at the client boundary.
struct Operation {
  ClientId client = 0;
  std::uint64_t op = 0;  // unique id within the history
  bool is_write = false;
  // Writes: the written value id (always present). Completed reads: the
  // returned value id, absent when the register was empty. Pending reads:
  // absent.
  std::optional<std::string> value;
  bool completed = false;
  bool crashed = false;  // issued by a client that crashed during the run
  // Positions in the run's event order; a real-time precedes b iff
  // a.res_pos < b.inv_pos.
  std::size_t inv_pos = 0;
  std::size_t res_pos = std::numeric_limits<std::size_t>::max();
  // Implementation timestamps from respond events, used by structural
  // probes. Not consulted by the linearizability checker.
  Timestamp ts = kT0;

  bool PrecedesRealTime(const Operation& other) const {
    return completed && res_pos < other.inv_pos;
  }
};

/// A run's invoke/respond skeleton. Extraction validates well-formedness:
/// op ids unique, at most one respond per invoke, responds only after their
/// invoke, per-client operations sequential.
struct History {
  std::vector<Operation> ops;

  static History FromTrace(const TraceLog& trace);
};

}  // namespace ecreg

#endif  // ECREG_HISTORY_HPP_
