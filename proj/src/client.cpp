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

#include "ecreg/client.hpp"

#include <algorithm>
#include <set>

namespace ecreg {

Pointer ReadFrom(const std::vector<MetadataEntry>& m, ClientId c, ClientId p,
                 std::uint64_t index) {
  const MetadataEntry& entry = m[p];
  if (index > entry.frozenindex[c]) return entry.writeptr;
  if (index != entry.frozenindex[c]) {
    throw ProtocolViolation("reader index trails a frozen index");
  }
  return entry.frozenptrlist[c];
}

ReadChoice HighestRead(const std::vector<MetadataEntry>& m, ClientId c,
                       std::uint64_t index) {
  ReadChoice best;
  best.ptr = NullPointer();
  for (ClientId p = 0; p < m.size(); ++p) {
    const bool frozen = !(index > m[p].frozenindex[c]);
    Pointer candidate = ReadFrom(m, c, p, index);
    if (candidate.ts > best.ptr.ts) {
      best.ptr = std::move(candidate);
      best.from = p;
      best.frozen = frozen;
    }
  }
  return best;
}

Client::Client(const SystemConfig& cfg, ClientId id, const Codec* codec)
    : cfg_(cfg), id_(id), codec_(codec) {
  frozenptrlist_.assign(cfg_.m, NullPointer());
  reservedptrlist_.assign(cfg_.m, NullPointer());
  frozenindex_.assign(cfg_.m, 0);
  readlist_.assign(cfg_.n, std::nullopt);
}

ClientOutput Client::InvokeWrite(Bytes value) {
  if (!Idle()) throw ProtocolViolation("write invoked while an op is active");
  if (value.size() != cfg_.ell) {
    throw ProtocolViolation("write value must be exactly ell bytes");
  }
  value_ = std::move(value);
  prevptr_ = writeptr_;
  wphase_ = WriterPhase::kScanning;
  ClientOutput out;
  out.sends.emplace_back(Addr::Dir(), DirScan{DirOpTag::kWriterPreScan});
  return out;
}

ClientOutput Client::InvokeRead() {
  if (!Idle()) throw ProtocolViolation("read invoked while an op is active");
  readlist_.assign(cfg_.n, std::nullopt);
  read_from_.reset();
  read_was_frozen_ = false;
  ++readindex_;
  rphase_ = ReaderPhase::kAnnouncing;
  PartialEntry fields;
  fields.readindex = readindex_;
  ClientOutput out;
  out.sends.emplace_back(Addr::Dir(),
                         DirUpdate{id_, fields, DirOpTag::kReaderAnnounce});
  return out;
}

ClientOutput Client::OnMessage(const Addr& src, const Message& msg) {
  if (const auto* ack = std::get_if<NodeWriteAck>(&msg)) {
    if (src.kind != Addr::Kind::kNode) return {};
    return HandleWriteAck(src.idx, *ack);
  }
  if (const auto* resp = std::get_if<NodeReadResp>(&msg)) {
    if (src.kind != Addr::Kind::kNode) return {};
    return HandleReadResp(src.idx, *resp);
  }
  if (const auto* ack = std::get_if<DirUpdateAck>(&msg)) {
    if (src.kind != Addr::Kind::kDir) return {};
    return HandleUpdateAck(*ack);
  }
  if (const auto* resp = std::get_if<DirScanResp>(&msg)) {
    if (src.kind != Addr::Kind::kDir) return {};
    return HandleScanResp(*resp);
  }
  return {};  // FreeAcks and anything unexpected are dropped
}

ClientOutput Client::HandleWriteAck(std::uint16_t node,
                                    const NodeWriteAck& ack) {
  if (wphase_ != WriterPhase::kDispersing) return {};
  if (ack.ts != writeptr_.ts) return {};
  if (writeptr_.set.size() >= cfg_.quorum()) return {};
  const auto it =
      std::lower_bound(writeptr_.set.begin(), writeptr_.set.end(), node);
  if (it != writeptr_.set.end() && *it == node) return {};
  writeptr_.set.insert(it, node);
  if (writeptr_.set.size() < cfg_.quorum()) return {};

  wphase_ = WriterPhase::kUpdating;
  PartialEntry fields;
  fields.writeptr = writeptr_;
  fields.frozenptrlist = frozenptrlist_;
  fields.frozenindex = frozenindex_;
  ClientOutput out;
  out.sends.emplace_back(Addr::Dir(),
                         DirUpdate{id_, fields, DirOpTag::kWriterUpdate});
  return out;
}

ClientOutput Client::HandleUpdateAck(const DirUpdateAck& ack) {
  if (ack.tag == DirOpTag::kWriterUpdate) {
    if (wphase_ != WriterPhase::kUpdating) return {};
    wphase_ = WriterPhase::kCollectingIndices;
    ClientOutput out;
    out.sends.emplace_back(Addr::Dir(), DirScan{DirOpTag::kWriterPostScan});
    return out;
  }
  if (ack.tag == DirOpTag::kReaderAnnounce) {
    if (rphase_ != ReaderPhase::kAnnouncing) return {};
    rphase_ = ReaderPhase::kScanning;
    ClientOutput out;
    out.sends.emplace_back(Addr::Dir(), DirScan{DirOpTag::kReaderScan});
    return out;
  }
  return {};
}

ClientOutput Client::HandleScanResp(const DirScanResp& resp) {
  if (resp.tag == DirOpTag::kWriterPreScan) {
    if (wphase_ != WriterPhase::kScanning) return {};
    Timestamp max_ts = kT0;
    for (const MetadataEntry& e : resp.snapshot) {
      max_ts = std::max(max_ts, e.writeptr.ts);
    }
    writeptr_.ts = Timestamp{max_ts.sn + 1, id_};
    writeptr_.set.clear();
    const std::vector<Bytes> frags = codec_->Encode(value_);
    const std::vector<Digest> checksum = BuildCrossChecksum(frags);
    writeptr_.hash.assign(checksum.begin(), checksum.end());
    wphase_ = WriterPhase::kDispersing;
    ClientOutput out;
    for (std::uint16_t i = 0; i < cfg_.n; ++i) {
      out.sends.emplace_back(Addr::Node(i), NodeWrite{writeptr_.ts, frags[i]});
    }
    return out;
  }
  if (resp.tag == DirOpTag::kWriterPostScan) {
    if (wphase_ != WriterPhase::kCollectingIndices) return {};
    return FinishWrite(resp.snapshot);
  }
  if (resp.tag == DirOpTag::kReaderScan) {
    if (rphase_ != ReaderPhase::kScanning) return {};
    return FinishReadScan(resp.snapshot);
  }
  return {};
}

ClientOutput Client::FinishWrite(const std::vector<MetadataEntry>& m) {
  std::set<Timestamp> freets{prevptr_.ts};
  for (ClientId p = 0; p < cfg_.m; ++p) {
    if (p == id_) continue;
    const std::uint64_t index = m[p].readindex;
    if (index > frozenindex_[p]) {
      freets.insert(frozenptrlist_[p].ts);
      freets.insert(reservedptrlist_[p].ts);
      frozenptrlist_[p] = writeptr_;
      frozenindex_[p] = index;
      reservedptrlist_[p] = prevptr_;
    }
  }
  // Subtracting over every entry includes our own, which stays null, so the
  // initial timestamp never survives into the free set.
  for (ClientId p = 0; p < cfg_.m; ++p) {
    freets.erase(frozenptrlist_[p].ts);
    freets.erase(reservedptrlist_[p].ts);
  }
  if (freets.count(writeptr_.ts) != 0) {
    throw ProtocolViolation("free set contains the live write timestamp");
  }

  wphase_ = WriterPhase::kFreeing;
  ClientOutput out;
  const std::vector<Timestamp> ts_set(freets.begin(), freets.end());
  for (std::uint16_t i = 0; i < cfg_.n; ++i) {
    out.sends.emplace_back(Addr::Node(i), NodeFree{ts_set});
  }
  wphase_ = WriterPhase::kIdle;
  OpResponse resp;
  resp.is_write = true;
  resp.ts = writeptr_.ts;
  out.response = resp;
  value_.clear();
  return out;
}

ClientOutput Client::FinishReadScan(const std::vector<MetadataEntry>& m) {
  ReadChoice choice = HighestRead(m, id_, readindex_);
  readptr_ = std::move(choice.ptr);
  read_from_ = choice.from;
  read_was_frozen_ = choice.frozen;

  ClientOutput out;
  if (readptr_.IsNull()) {
    rphase_ = ReaderPhase::kIdle;
    OpResponse resp;
    resp.is_write = false;
    resp.ts = kT0;
    out.response = resp;
    return out;
  }
  if (readptr_.set.size() != cfg_.quorum() ||
      readptr_.hash.size() != cfg_.n) {
    throw ProtocolViolation("directory returned a malformed pointer");
  }
  rphase_ = ReaderPhase::kFetching;
  for (const std::uint16_t i : readptr_.set) {
    out.sends.emplace_back(Addr::Node(i), NodeRead{readptr_.ts});
  }
  return out;
}

ClientOutput Client::HandleReadResp(std::uint16_t node,
                                    const NodeReadResp& resp) {
  if (rphase_ != ReaderPhase::kFetching) return {};
  if (resp.ts != readptr_.ts) return {};
  if (node >= cfg_.n || readlist_[node].has_value()) return {};
  if (!resp.frag.has_value()) return {};
  if (!readptr_.hash[node].has_value() ||
      HashFragment(*resp.frag) != *readptr_.hash[node]) {
    return {};  // cross checksum mismatch: fabricated or corrupted fragment
  }
  readlist_[node] = resp.frag;

  const auto verified = static_cast<std::uint16_t>(
      std::count_if(readlist_.begin(), readlist_.end(),
                    [](const Fragment& f) { return f.has_value(); }));
  if (verified < cfg_.k) return {};

  auto value = codec_->Reconstruct(readlist_, cfg_.ell);
  if (!value) throw ProtocolViolation("reconstruct failed on verified fragments");
  const Timestamp fixed = readptr_.ts;
  readptr_ = NullPointer();
  rphase_ = ReaderPhase::kIdle;
  ClientOutput out;
  OpResponse r;
  r.is_write = false;
  r.value = std::move(*value);
  r.ts = fixed;
  r.read_from = read_from_;
  r.read_was_frozen = read_was_frozen_;
  out.response = r;
  return out;
}

void Client::HashInto(StateHasher& h) const {
  h.PutU64(id_);
  h.PutByte(static_cast<std::uint8_t>(wphase_));
  h.PutByte(static_cast<std::uint8_t>(rphase_));
  HashPointer(h, writeptr_);
  HashPointer(h, prevptr_);
  h.PutU64(frozenptrlist_.size());
  for (const auto& ptr : frozenptrlist_) HashPointer(h, ptr);
  h.PutU64(reservedptrlist_.size());
  for (const auto& ptr : reservedptrlist_) HashPointer(h, ptr);
  h.PutU64(frozenindex_.size());
  for (auto idx : frozenindex_) h.PutU64(idx);
  h.PutU64(readindex_);
  HashBytes(h, value_);
  HashPointer(h, readptr_);
  h.PutU64(readlist_.size());
  for (const auto& frag : readlist_) HashFragmentOpt(h, frag);
  h.PutBool(read_from_.has_value());
  if (read_from_) h.PutU64(*read_from_);
  h.PutBool(read_was_frozen_);
}

}  // namespace ecreg
