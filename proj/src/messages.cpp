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

#include "ecreg/messages.hpp"

#include <utility>

namespace ecreg {

namespace {

constexpr std::uint64_t kTsBytes = 10;
constexpr std::uint64_t kDigestBytes = 32;

std::uint64_t PointerBytes(const Pointer& ptr, std::uint16_t n) {
  // ts + set length byte + one byte per member + n digest slots, each a
  // presence flag plus the digest when present.
  std::uint64_t total = kTsBytes + 1 + ptr.set.size();
  total += n;  // presence flags
  for (const auto& h : ptr.hash) {
    if (h.has_value()) total += kDigestBytes;
  }
  return total;
}

std::uint64_t EntryBytes(const MetadataEntry& e, std::uint16_t n,
                         std::uint16_t m) {
  std::uint64_t total = PointerBytes(e.writeptr, n);
  for (std::uint16_t p = 0; p < m; ++p) {
    total += PointerBytes(e.frozenptrlist[p], n) + 8;
  }
  return total + 8;  // frozenindex entries counted above, plus readindex
}

}  // namespace

std::optional<Addr> AddrFromLabel(const std::string& label) {
  if (label == "dir") return Addr::Dir();
  if (label == "sim") return Addr::Sim();
  for (const auto& [prefix, kind] :
       {std::pair<const char*, Addr::Kind>{"client:", Addr::Kind::kClient},
        std::pair<const char*, Addr::Kind>{"node:", Addr::Kind::kNode}}) {
    const std::string p(prefix);
    if (label.rfind(p, 0) != 0) continue;
    const std::string digits = label.substr(p.size());
    if (digits.empty() ||
        digits.find_first_not_of("0123456789") != std::string::npos) {
      return std::nullopt;
    }
    unsigned long idx = std::stoul(digits);
    if (idx > 0xFFFF) return std::nullopt;
    return Addr{kind, static_cast<std::uint16_t>(idx)};
  }
  return std::nullopt;
}

const char* DirOpTagName(DirOpTag tag) {
  switch (tag) {
    case DirOpTag::kWriterPreScan: return "writer-pre-scan";
    case DirOpTag::kWriterUpdate: return "writer-update";
    case DirOpTag::kWriterPostScan: return "writer-post-scan";
    case DirOpTag::kReaderAnnounce: return "reader-announce";
    case DirOpTag::kReaderScan: return "reader-scan";
  }
  return "?";
}

const char* MessageKindName(const Message& msg) {
  struct Visitor {
    const char* operator()(const NodeWrite&) { return "node-write"; }
    const char* operator()(const NodeWriteAck&) { return "node-write-ack"; }
    const char* operator()(const NodeRead&) { return "node-read"; }
    const char* operator()(const NodeReadResp&) { return "node-read-resp"; }
    const char* operator()(const NodeFree&) { return "node-free"; }
    const char* operator()(const NodeFreeAck&) { return "node-free-ack"; }
    const char* operator()(const DirUpdate&) { return "dir-update"; }
    const char* operator()(const DirUpdateAck&) { return "dir-update-ack"; }
    const char* operator()(const DirScan&) { return "dir-scan"; }
    const char* operator()(const DirScanResp&) { return "dir-scan-resp"; }
  };
  return std::visit(Visitor{}, msg);
}

std::uint64_t MessageDataBytes(const Message& msg) {
  if (const auto* w = std::get_if<NodeWrite>(&msg)) return w->frag.size();
  if (const auto* r = std::get_if<NodeReadResp>(&msg)) {
    return r->frag ? r->frag->size() : 0;
  }
  return 0;
}

std::uint64_t MessageMetadataBytes(const Message& msg, std::uint16_t n,
                                   std::uint16_t m) {
  struct Visitor {
    std::uint16_t n;
    std::uint16_t m;
    std::uint64_t operator()(const NodeWrite&) { return kTsBytes; }
    std::uint64_t operator()(const NodeWriteAck&) { return kTsBytes; }
    std::uint64_t operator()(const NodeRead&) { return kTsBytes; }
    std::uint64_t operator()(const NodeReadResp&) { return kTsBytes + 1; }
    std::uint64_t operator()(const NodeFree& f) {
      return 1 + kTsBytes * f.ts_set.size();
    }
    std::uint64_t operator()(const NodeFreeAck& f) {
      return 1 + kTsBytes * f.ts_set.size();
    }
    std::uint64_t operator()(const DirUpdate& u) {
      std::uint64_t total = 2 + 1;  // client id + field mask
      if (u.fields.writeptr) total += PointerBytes(*u.fields.writeptr, n);
      if (u.fields.frozenptrlist) {
        for (const Pointer& p : *u.fields.frozenptrlist) {
          total += PointerBytes(p, n);
        }
      }
      if (u.fields.frozenindex) total += 8ull * m;
      if (u.fields.readindex) total += 8;
      return total;
    }
    std::uint64_t operator()(const DirUpdateAck&) { return 1; }
    std::uint64_t operator()(const DirScan&) { return 1; }
    std::uint64_t operator()(const DirScanResp& s) {
      std::uint64_t total = 1;
      for (const MetadataEntry& e : s.snapshot) total += EntryBytes(e, n, m);
      return total;
    }
  };
  return std::visit(Visitor{n, m}, msg);
}

}  // namespace ecreg
