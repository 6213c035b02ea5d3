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

#include <doctest.h>

#include <algorithm>
#include <vector>

#include "ecreg/client.hpp"
#include "ecreg/directory.hpp"

using namespace ecreg;

namespace {

const SystemConfig kCfg{3, 1, 1, 2, 8};  // quorum 2
const Codec kCodec(3, 1);

Bytes Val(std::uint8_t tag) { return Bytes(kCfg.ell, tag); }

// Deliver a full write against a live directory that answers scans and
// updates synchronously; nodes ack in the given order. Returns the write's
// timestamp and collects the final free set.
Timestamp RunWrite(Client& client, Directory& dir, const Bytes& value,
                   std::vector<std::uint16_t> ack_order,
                   std::vector<Timestamp>* freed = nullptr) {
  auto out = client.InvokeWrite(value);
  REQUIRE(out.sends.size() == 1);
  out = client.OnMessage(Addr::Dir(),
                         DirScanResp{dir.Scan(), DirOpTag::kWriterPreScan});
  REQUIRE(out.sends.size() == kCfg.n);
  const auto* first_write = std::get_if<NodeWrite>(&out.sends[0].second);
  REQUIRE(first_write != nullptr);
  const Timestamp ts = first_write->ts;

  ClientOutput next;
  for (const auto node : ack_order) {
    next = client.OnMessage(Addr::Node(node), NodeWriteAck{ts});
    if (!next.sends.empty()) break;
  }
  REQUIRE(next.sends.size() == 1);
  const auto* update = std::get_if<DirUpdate>(&next.sends[0].second);
  REQUIRE(update != nullptr);
  dir.Update(update->client, update->fields);

  next = client.OnMessage(Addr::Dir(), DirUpdateAck{DirOpTag::kWriterUpdate});
  REQUIRE(next.sends.size() == 1);
  next = client.OnMessage(Addr::Dir(),
                          DirScanResp{dir.Scan(), DirOpTag::kWriterPostScan});
  REQUIRE(next.sends.size() == kCfg.n);
  const auto* free_msg = std::get_if<NodeFree>(&next.sends[0].second);
  REQUIRE(free_msg != nullptr);
  if (freed) *freed = free_msg->ts_set;
  REQUIRE(next.response.has_value());
  REQUIRE(next.response->is_write);
  REQUIRE(next.response->ts == ts);
  REQUIRE(client.Idle());
  return ts;
}

}  // namespace

TEST_CASE("readfrom picks the live pointer unless one is frozen at this index") {
  std::vector<MetadataEntry> m{MakeEntry(2), MakeEntry(2)};
  m[0].writeptr.ts = Timestamp{5, 0};
  m[0].frozenptrlist[1].ts = Timestamp{3, 0};
  m[0].frozenindex[1] = 2;

  CHECK(ReadFrom(m, 1, 0, 3).ts == Timestamp{5, 0});  // index moved past
  CHECK(ReadFrom(m, 1, 0, 2).ts == Timestamp{3, 0});  // frozen at this index
  CHECK_THROWS_AS(ReadFrom(m, 1, 0, 1), ProtocolViolation);
}

TEST_CASE("highestread maximizes over all entries") {
  std::vector<MetadataEntry> m{MakeEntry(3), MakeEntry(3), MakeEntry(3)};

  SUBCASE("all null yields the null pointer") {
    const auto choice = HighestRead(m, 2, 1);
    CHECK(choice.ptr.IsNull());
    CHECK(!choice.from.has_value());
  }
  SUBCASE("live pointers compete by timestamp") {
    m[0].writeptr.ts = Timestamp{4, 0};
    m[1].writeptr.ts = Timestamp{4, 1};  // same sn, higher id wins
    const auto choice = HighestRead(m, 2, 1);
    CHECK(choice.ptr.ts == Timestamp{4, 1});
    CHECK(choice.from == ClientId{1});
    CHECK(!choice.frozen);
    // Brute-force cross-check over every entry's candidate.
    Timestamp best = kT0;
    for (ClientId p = 0; p < 3; ++p) {
      best = std::max(best, ReadFrom(m, 2, p, 1).ts);
    }
    CHECK(best == choice.ptr.ts);
  }
  SUBCASE("a frozen pointer can win") {
    m[0].writeptr.ts = Timestamp{9, 0};
    m[0].frozenptrlist[2].ts = Timestamp{8, 0};
    m[0].frozenindex[2] = 1;
    m[1].writeptr.ts = Timestamp{2, 1};
    const auto choice = HighestRead(m, 2, 1);
    CHECK(choice.ptr.ts == Timestamp{8, 0});
    CHECK(choice.from == ClientId{0});
    CHECK(choice.frozen);
  }
}

TEST_CASE("bootstrap write: timestamp, dispersal, quorum, empty free set") {
  Client client(kCfg, 0, &kCodec);
  auto out = client.InvokeWrite(Val(0xAA));
  REQUIRE(out.sends.size() == 1);
  CHECK(std::holds_alternative<DirScan>(out.sends[0].second));
  CHECK(client.writer_phase() == WriterPhase::kScanning);

  Directory dir(kCfg);
  out = client.OnMessage(Addr::Dir(),
                         DirScanResp{dir.Scan(), DirOpTag::kWriterPreScan});
  REQUIRE(out.sends.size() == 3);
  for (std::uint16_t i = 0; i < 3; ++i) {
    CHECK(out.sends[i].first == Addr::Node(i));
    const auto& w = std::get<NodeWrite>(out.sends[i].second);
    CHECK(w.ts == Timestamp{1, 0});
    CHECK(w.frag == Val(0xAA));  // k=1 replicates
    CHECK(*client.writeptr().hash[i] == HashFragment(w.frag));
  }
  CHECK(client.writer_phase() == WriterPhase::kDispersing);

  // Third node's ack arrives first; quorum is {1, 2}.
  CHECK(client.OnMessage(Addr::Node(2), NodeWriteAck{{1, 0}}).sends.empty());
  out = client.OnMessage(Addr::Node(1), NodeWriteAck{{1, 0}});
  REQUIRE(out.sends.size() == 1);
  const auto& update = std::get<DirUpdate>(out.sends[0].second);
  CHECK(update.fields.writeptr->set == std::vector<std::uint16_t>{1, 2});
  CHECK(update.fields.frozenptrlist.has_value());
  CHECK(update.fields.frozenindex.has_value());
  CHECK(!update.fields.readindex.has_value());  // wildcard
  dir.Update(update.client, update.fields);

  // A late ack from node 0 is ignored; the set is fixed.
  CHECK(client.OnMessage(Addr::Node(0), NodeWriteAck{{1, 0}}).sends.empty());
  CHECK(client.writeptr().set.size() == 2);

  out = client.OnMessage(Addr::Dir(), DirUpdateAck{DirOpTag::kWriterUpdate});
  REQUIRE(out.sends.size() == 1);
  CHECK(std::holds_alternative<DirScan>(out.sends[0].second));

  out = client.OnMessage(Addr::Dir(),
                         DirScanResp{dir.Scan(), DirOpTag::kWriterPostScan});
  REQUIRE(out.sends.size() == 3);
  for (const auto& [addr, msg] : out.sends) {
    CHECK(std::get<NodeFree>(msg).ts_set.empty());
  }
  REQUIRE(out.response.has_value());
  CHECK(out.response->is_write);
  CHECK(out.response->ts == Timestamp{1, 0});
  CHECK(client.Idle());
}

TEST_CASE("sequential writes free exactly the previous timestamp") {
  // Replay oracle: with no readers, write i+1 must free write i's timestamp
  // and nothing else.
  Client client(kCfg, 0, &kCodec);
  Directory dir(kCfg);
  std::vector<Timestamp> freed;

  const Timestamp ts1 = RunWrite(client, dir, Val(1), {0, 1}, &freed);
  CHECK(ts1 == Timestamp{1, 0});
  CHECK(freed.empty());

  const Timestamp ts2 = RunWrite(client, dir, Val(2), {1, 2}, &freed);
  CHECK(ts2 == Timestamp{2, 0});
  CHECK(freed == std::vector<Timestamp>{ts1});

  const Timestamp ts3 = RunWrite(client, dir, Val(3), {0, 2}, &freed);
  CHECK(ts3 == Timestamp{3, 0});
  CHECK(freed == std::vector<Timestamp>{ts2});
}

TEST_CASE("timestamps dominate every scanned write pointer") {
  Client client(kCfg, 1, &kCodec);
  Directory dir(kCfg);
  // Seed the directory with a competing writer at sn 7.
  Client other(kCfg, 0, &kCodec);
  Directory seeded(kCfg);
  for (int i = 0; i < 7; ++i) RunWrite(other, seeded, Val(9), {0, 1});

  auto out = client.InvokeWrite(Val(0x55));
  out = client.OnMessage(Addr::Dir(),
                         DirScanResp{seeded.Scan(), DirOpTag::kWriterPreScan});
  const auto& w = std::get<NodeWrite>(out.sends[0].second);
  CHECK(w.ts == Timestamp{8, 1});
}

TEST_CASE("a new read announcement freezes the live write and reserves the previous") {
  Client writer(kCfg, 0, &kCodec);
  Directory dir(kCfg);
  const Timestamp ts1 = RunWrite(writer, dir, Val(1), {0, 1});

  // Reader announces read index 1 before the writer's next post-scan.
  PartialEntry announce;
  announce.readindex = 1;
  dir.Update(1, announce);

  std::vector<Timestamp> freed;
  const Timestamp ts2 = RunWrite(writer, dir, Val(2), {0, 1}, &freed);
  CHECK(freed.empty());  // ts1 is reserved, nothing freeable
  CHECK(writer.frozenptrlist()[1].ts == ts2);
  CHECK(writer.frozenindex()[1] == 1);
  CHECK(writer.reservedptrlist()[1].ts == ts1);

  // Same index again: no refreeze, and the previous write is freed normally.
  const Timestamp ts3 = RunWrite(writer, dir, Val(3), {0, 1}, &freed);
  CHECK(freed.empty());  // ts2 is frozen for reader 1
  CHECK(writer.frozenptrlist()[1].ts == ts2);

  const Timestamp ts4 = RunWrite(writer, dir, Val(4), {0, 1}, &freed);
  CHECK(freed == std::vector<Timestamp>{ts3});

  // A later announcement releases the old frozen/reserved pair.
  announce.readindex = 2;
  dir.Update(1, announce);
  std::vector<Timestamp> freed5;
  const Timestamp ts5 = RunWrite(writer, dir, Val(5), {0, 1}, &freed5);
  CHECK(writer.frozenptrlist()[1].ts == ts5);
  CHECK(writer.reservedptrlist()[1].ts == ts4);
  std::vector<Timestamp> expect{ts1, ts2};  // old reserved + old frozen
  CHECK(freed5 == expect);
}

TEST_CASE("write acks with a stale timestamp are ignored") {
  Client client(kCfg, 0, &kCodec);
  Directory dir(kCfg);
  client.InvokeWrite(Val(1));
  client.OnMessage(Addr::Dir(),
                   DirScanResp{dir.Scan(), DirOpTag::kWriterPreScan});
  CHECK(client.OnMessage(Addr::Node(0), NodeWriteAck{{9, 0}}).sends.empty());
  CHECK(client.OnMessage(Addr::Node(0), NodeWriteAck{kT0}).sends.empty());
  CHECK(client.writeptr().set.empty());
  // Duplicate acks from one node count once.
  client.OnMessage(Addr::Node(1), NodeWriteAck{{1, 0}});
  CHECK(client.OnMessage(Addr::Node(1), NodeWriteAck{{1, 0}}).sends.empty());
  CHECK(client.writeptr().set.size() == 1);
}

TEST_CASE("read of an empty register returns absent without touching nodes") {
  Client client(kCfg, 1, &kCodec);
  Directory dir(kCfg);
  auto out = client.InvokeRead();
  REQUIRE(out.sends.size() == 1);
  const auto& announce = std::get<DirUpdate>(out.sends[0].second);
  CHECK(*announce.fields.readindex == 1);
  CHECK(!announce.fields.writeptr.has_value());
  dir.Update(announce.client, announce.fields);

  out = client.OnMessage(Addr::Dir(), DirUpdateAck{DirOpTag::kReaderAnnounce});
  REQUIRE(out.sends.size() == 1);
  out = client.OnMessage(Addr::Dir(),
                         DirScanResp{dir.Scan(), DirOpTag::kReaderScan});
  CHECK(out.sends.empty());
  REQUIRE(out.response.has_value());
  CHECK(!out.response->is_write);
  CHECK(!out.response->value.has_value());
  CHECK(out.response->ts == kT0);
  CHECK(client.Idle());
}

TEST_CASE("read fetches from the pointer set and verifies digests") {
  const SystemConfig cfg{4, 1, 2, 2, 8};  // quorum 3, k = 2
  const Codec codec(4, 2);
  Client writer(cfg, 0, &codec);
  Directory dir(cfg);

  // Complete one write against the live directory.
  const Bytes value{1, 2, 3, 4, 5, 6, 7, 8};
  auto out = writer.InvokeWrite(value);
  out = writer.OnMessage(Addr::Dir(),
                         DirScanResp{dir.Scan(), DirOpTag::kWriterPreScan});
  std::vector<Bytes> frags;
  for (const auto& [addr, msg] : out.sends) {
    frags.push_back(std::get<NodeWrite>(msg).frag);
  }
  const Timestamp ts = std::get<NodeWrite>(out.sends[0].second).ts;
  for (const auto node : {0, 1, 2}) {
    out = writer.OnMessage(Addr::Node(node), NodeWriteAck{ts});
  }
  dir.Update(0, std::get<DirUpdate>(out.sends.at(0).second).fields);
  writer.OnMessage(Addr::Dir(), DirUpdateAck{DirOpTag::kWriterUpdate});
  writer.OnMessage(Addr::Dir(),
                   DirScanResp{dir.Scan(), DirOpTag::kWriterPostScan});

  Client reader(cfg, 1, &codec);
  out = reader.InvokeRead();
  dir.Update(1, std::get<DirUpdate>(out.sends[0].second).fields);
  out = reader.OnMessage(Addr::Dir(), DirUpdateAck{DirOpTag::kReaderAnnounce});
  out = reader.OnMessage(Addr::Dir(),
                         DirScanResp{dir.Scan(), DirOpTag::kReaderScan});
  REQUIRE(out.sends.size() == 3);  // t+k members of the set
  for (const auto& [addr, msg] : out.sends) {
    CHECK(std::get<NodeRead>(msg).ts == ts);
  }
  CHECK(reader.reader_phase() == ReaderPhase::kFetching);

  SUBCASE("k verified fragments complete the read") {
    out = reader.OnMessage(Addr::Node(0), NodeReadResp{ts, frags[0]});
    CHECK(!out.response.has_value());
    out = reader.OnMessage(Addr::Node(2), NodeReadResp{ts, frags[2]});
    REQUIRE(out.response.has_value());
    CHECK(*out.response->value == value);
    CHECK(out.response->ts == ts);
    CHECK(reader.Idle());
    // Straggler responses after completion are dropped.
    CHECK(reader.OnMessage(Addr::Node(1), NodeReadResp{ts, frags[1]})
              .sends.empty());
  }
  SUBCASE("corrupted and mismatched responses are rejected") {
    Bytes bad = frags[0];
    bad[0] ^= 0xFF;
    CHECK(!reader.OnMessage(Addr::Node(0), NodeReadResp{ts, bad})
               .response.has_value());
    CHECK(!reader.readlist()[0].has_value());

    // Absent fragment, wrong timestamp, fragment under another node's index.
    CHECK(!reader.OnMessage(Addr::Node(1), NodeReadResp{ts, std::nullopt})
               .response.has_value());
    CHECK(!reader.OnMessage(Addr::Node(1), NodeReadResp{{9, 9}, frags[1]})
               .response.has_value());
    CHECK(!reader.OnMessage(Addr::Node(1), NodeReadResp{ts, frags[0]})
               .response.has_value());

    // Two honest fragments still finish the read.
    reader.OnMessage(Addr::Node(1), NodeReadResp{ts, frags[1]});
    out = reader.OnMessage(Addr::Node(2), NodeReadResp{ts, frags[2]});
    REQUIRE(out.response.has_value());
    CHECK(*out.response->value == value);
  }
}

TEST_CASE("invoking while busy is a well-formedness violation") {
  Client client(kCfg, 0, &kCodec);
  client.InvokeWrite(Val(1));
  CHECK_THROWS_AS(client.InvokeWrite(Val(2)), ProtocolViolation);
  CHECK_THROWS_AS(client.InvokeRead(), ProtocolViolation);
}

TEST_CASE("write value must match the configured size") {
  Client client(kCfg, 0, &kCodec);
  CHECK_THROWS_AS(client.InvokeWrite(Bytes{1, 2}), ProtocolViolation);
}
