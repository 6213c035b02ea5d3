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

#ifndef ECREG_DIRECTORY_HPP_
#define ECREG_DIRECTORY_HPP_

#include <optional>
#include <vector>

#include "ecreg/types.hpp"

namespace ecreg {

/// Field mask for a directory update. Absent fields keep their previous
/// value (the wildcard); set fields replace it wholesale.
struct PartialEntry {
  std::optional<Pointer> writeptr;
  std::optional<std::vector<Pointer>> frozenptrlist;
  std::optional<std::vector<std::uint64_t>> frozenindex;
  std::optional<std::uint64_t> readindex;

  friend bool operator==(const PartialEntry&, const PartialEntry&) = default;
};

/// The trusted metadata directory: one entry per client, atomic wildcard
/// updates and atomic full scans. In the simulator each Update/Scan takes
/// effect at a single atomicity-point event.
///
/// Update enforces the structural invariants that hold in every execution
/// with a correct directory: timestamps in writeptr and frozenptrlist never
/// decrease, readindex and frozenindex never decrease, any non-null pointer
/// carries exactly t+k acknowledging nodes and n digests, writeptr.ts stays
/// strictly above every frozenptrlist entry, and frozenindex[p] never
/// exceeds the read index p has published. A violation throws
/// ProtocolViolation.
class Directory {
 public:
  explicit Directory(const SystemConfig& cfg);

  void Update(ClientId c, const PartialEntry& fields);
  std::vector<MetadataEntry> Scan() const { return entries_; }
  const std::vector<MetadataEntry>& state() const { return entries_; }

  friend bool operator==(const Directory&, const Directory&) = default;

 private:
  void CheckPointer(const Pointer& ptr, const char* what) const;

  std::uint16_t n_ = 0;
  std::uint16_t m_ = 0;
  std::uint16_t quorum_ = 0;
  std::vector<MetadataEntry> entries_;
};

}  // namespace ecreg

#endif  // ECREG_DIRECTORY_HPP_
