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

#include "ecreg/directory.hpp"

#include <algorithm>
#include <string>

namespace ecreg {

Directory::Directory(const SystemConfig& cfg)
    : n_(cfg.n), m_(cfg.m), quorum_(cfg.quorum()) {
  entries_.reserve(m_);
  for (std::uint16_t i = 0; i < m_; ++i) entries_.push_back(MakeEntry(m_));
}

void Directory::CheckPointer(const Pointer& ptr, const char* what) const {
  if (ptr.IsNull()) {
    if (!ptr.set.empty() || !ptr.hash.empty()) {
      throw ProtocolViolation(std::string(what) +
                              ": null pointer with nonempty set or digests");
    }
    return;
  }
  if (ptr.set.size() != quorum_) {
    throw ProtocolViolation(std::string(what) +
                            ": pointer set must have exactly t+k members");
  }
  if (!std::is_sorted(ptr.set.begin(), ptr.set.end()) ||
      std::adjacent_find(ptr.set.begin(), ptr.set.end()) != ptr.set.end()) {
    throw ProtocolViolation(std::string(what) + ": pointer set not sorted");
  }
  if (!ptr.set.empty() && ptr.set.back() >= n_) {
    throw ProtocolViolation(std::string(what) + ": node index out of range");
  }
  if (ptr.hash.size() != n_) {
    throw ProtocolViolation(std::string(what) + ": digest vector must have n entries");
  }
  for (const auto& h : ptr.hash) {
    if (!h.has_value()) {
      throw ProtocolViolation(std::string(what) + ": missing fragment digest");
    }
  }
  if (ptr.ts.c == kNilClient || ptr.ts.c >= m_) {
    throw ProtocolViolation(std::string(what) + ": writer id out of range");
  }
}

void Directory::Update(ClientId c, const PartialEntry& fields) {
  if (c >= m_) throw ProtocolViolation("directory update: client id out of range");
  MetadataEntry& entry = entries_[c];

  if (fields.writeptr) {
    CheckPointer(*fields.writeptr, "writeptr");
    if (fields.writeptr->ts < entry.writeptr.ts) {
      throw ProtocolViolation("writeptr timestamp decreased");
    }
  }
  if (fields.frozenptrlist) {
    if (fields.frozenptrlist->size() != m_) {
      throw ProtocolViolation("frozenptrlist must have m entries");
    }
    for (std::uint16_t p = 0; p < m_; ++p) {
      CheckPointer((*fields.frozenptrlist)[p], "frozenptrlist");
      if ((*fields.frozenptrlist)[p].ts < entry.frozenptrlist[p].ts) {
        throw ProtocolViolation("frozen timestamp decreased");
      }
    }
  }
  if (fields.frozenindex) {
    if (fields.frozenindex->size() != m_) {
      throw ProtocolViolation("frozenindex must have m entries");
    }
    for (std::uint16_t p = 0; p < m_; ++p) {
      if ((*fields.frozenindex)[p] < entry.frozenindex[p]) {
        throw ProtocolViolation("frozenindex decreased");
      }
      if ((*fields.frozenindex)[p] > entries_[p].readindex) {
        throw ProtocolViolation("frozenindex ahead of published readindex");
      }
    }
  }
  if (fields.readindex && *fields.readindex < entry.readindex) {
    throw ProtocolViolation("readindex decreased");
  }

  if (fields.writeptr) entry.writeptr = *fields.writeptr;
  if (fields.frozenptrlist) entry.frozenptrlist = *fields.frozenptrlist;
  if (fields.frozenindex) entry.frozenindex = *fields.frozenindex;
  if (fields.readindex) entry.readindex = *fields.readindex;

  if (!entry.writeptr.IsNull()) {
    for (std::uint16_t p = 0; p < m_; ++p) {
      if (entry.frozenptrlist[p].ts >= entry.writeptr.ts) {
        throw ProtocolViolation("frozen timestamp not below writeptr");
      }
    }
  }
}

}  // namespace ecreg
