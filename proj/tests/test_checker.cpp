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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ecreg/checker.hpp"
#include "ecreg/history.hpp"
#include "ecreg/sim.hpp"
#include "support/linearize_oracle.hpp"

using namespace ecreg;

namespace {

Operation Write(ClientId c, std::uint64_t op, const std::string& v,
                std::size_t inv, std::size_t res) {
  Operation w;
  w.client = c;
  w.op = op;
  w.is_write = true;
  w.value = v;
  w.inv_pos = inv;
  if (res != SIZE_MAX) {
    w.completed = true;
    w.res_pos = res;
  }
  return w;
}

Operation Read(ClientId c, std::uint64_t op, std::optional<std::string> v,
               std::size_t inv, std::size_t res) {
  Operation r;
  r.client = c;
  r.op = op;
  r.value = std::move(v);
  r.inv_pos = inv;
  if (res != SIZE_MAX) {
    r.completed = true;
    r.res_pos = res;
  }
  return r;
}

/// Copy `in` with event `idx` rewritten.
TraceLog Mutate(const TraceLog& in, std::size_t idx,
                const std::function<void(TraceEvent&)>& fn) {
  TraceLog out;
  for (std::size_t i = 0; i < in.events().size(); ++i) {
    TraceEvent ev = in.events()[i];
    if (i == idx) fn(ev);
    out.Append(std::move(ev));
  }
  return out;
}

template <typename Record>
std::size_t FindEvent(const TraceLog& trace,
                      const std::function<bool(const Record&)>& pred,
                      std::size_t nth = 0) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < trace.events().size(); ++i) {
    if (const auto* rec = std::get_if<Record>(&trace.events()[i].body)) {
      if (pred(*rec) && seen++ == nth) return i;
    }
  }
  REQUIRE(false);
  return SIZE_MAX;
}

/// A sequential single-client trace: write v1, write v2, read -> v2.
RunOutput SequentialRun() {
  Scenario sc;
  sc.config = {4, 1, 2, 1, 32};
  sc.adversary.node_strategies.assign(4, Strategy::kHonest);
  sc.schedule.policy = SchedulePolicy::kScripted;
  sc.workload.scripts = {{{"write", "write", "read"}}};
  return SimulateRun(sc, 17);
}

}  // namespace

TEST_CASE("write then read sequentially linearizes") {
  History h;
  h.ops = {Write(0, 1, "a", 0, 1), Read(0, 2, "a", 2, 3)};
  const auto res = CheckLinearizable(h);
  CHECK(res.ok);
  CHECK(res.witness == std::vector<std::uint64_t>{1, 2});
}

TEST_CASE("a stale read is rejected with the conflicting values") {
  History h;
  h.ops = {Write(0, 1, "a", 0, 1), Write(0, 2, "b", 2, 3),
           Read(1, 3, "a", 4, 5)};
  const auto res = CheckLinearizable(h);
  CHECK(!res.ok);
  CHECK(res.violation.find("conflicting order") != std::string::npos);
}

TEST_CASE("concurrent operations may settle either way") {
  // Reader overlaps the second write: both outcomes are views.
  for (const char* returned : {"a", "b"}) {
    History h;
    h.ops = {Write(0, 1, "a", 0, 1), Write(0, 2, "b", 2, 6),
             Read(1, 3, returned, 3, 5)};
    CHECK(CheckLinearizable(h).ok);
  }
}

TEST_CASE("an empty read after a completed write is stale") {
  History h;
  h.ops = {Write(0, 1, "a", 0, 1), Read(1, 2, std::nullopt, 2, 3)};
  CHECK(!CheckLinearizable(h).ok);

  SUBCASE("but fine while overlapping the write") {
    h.ops[1].inv_pos = 0;
    h.ops[0].inv_pos = 1;  // read invoked before the write
    CHECK(CheckLinearizable(h).ok);
  }
}

TEST_CASE("a read cannot return a value whose write starts later") {
  History h;
  h.ops = {Read(1, 1, "a", 0, 1), Write(0, 2, "a", 2, 3)};
  const auto res = CheckLinearizable(h);
  CHECK(!res.ok);
  CHECK(res.violation.find("before") != std::string::npos);
}

TEST_CASE("a read of a value no write produced breaks integrity") {
  History h;
  h.ops = {Write(0, 1, "a", 0, 1), Read(1, 2, "zzz", 2, 3)};
  const auto res = CheckLinearizable(h);
  CHECK(!res.ok);
  CHECK(res.violation.find("no write produced") != std::string::npos);
}

TEST_CASE("pending writes take effect exactly when read") {
  SUBCASE("read by a completed read: included") {
    History h;
    h.ops = {Write(0, 1, "a", 0, SIZE_MAX), Read(1, 2, "a", 1, 2)};
    CHECK(CheckLinearizable(h).ok);
  }
  SUBCASE("unread: dropped without constraint") {
    History h;
    h.ops = {Write(0, 1, "a", 0, 1), Write(1, 2, "b", 2, SIZE_MAX),
             Read(2, 3, "a", 3, 4)};
    CHECK(CheckLinearizable(h).ok);
  }
  SUBCASE("a pending write cannot excuse a stale read") {
    History h;
    h.ops = {Write(0, 1, "a", 0, 1), Write(0, 2, "b", 2, 3),
             Write(1, 3, "c", 4, SIZE_MAX), Read(1, 4, "a", 5, 6)};
    CHECK(!CheckLinearizable(h).ok);
  }
}

TEST_CASE("pending reads never constrain the verdict") {
  History h;
  h.ops = {Write(0, 1, "a", 0, 1), Read(1, 2, std::nullopt, 2, SIZE_MAX)};
  CHECK(CheckLinearizable(h).ok);
}

TEST_CASE("duplicate write values are rejected as malformed") {
  History h;
  h.ops = {Write(0, 1, "a", 0, 1), Write(1, 2, "a", 2, 3)};
  CHECK_THROWS_AS(CheckLinearizable(h), ConfigError);
}

TEST_CASE("empty history and empty trace are vacuously fine") {
  CHECK(CheckLinearizable(History{}).ok);
  const auto verdict = CheckTrace(TraceLog{});
  CHECK(verdict.ok());
  CHECK(verdict.amnesic.result.skipped);
}

TEST_CASE("verdict agrees with the brute-force oracle on random histories") {
  Rng rng(0xdecafULL);
  std::size_t agreed_ok = 0, agreed_bad = 0;
  for (int i = 0; i < 300; ++i) {
    const History h = testing::RandomHistory(rng);
    const bool fast = CheckLinearizable(h).ok;
    const bool slow = testing::OracleLinearizable(h);
    INFO("history ", i);
    REQUIRE(fast == slow);
    (fast ? agreed_ok : agreed_bad)++;
  }
  // The generator must exercise both verdicts for the agreement to matter.
  CHECK(agreed_ok > 25);
  CHECK(agreed_bad > 25);
}

TEST_CASE("probes accept an honest trace and flag targeted corruption") {
  const RunOutput run = SequentialRun();
  const Scenario sc = Scenario::FromJson(
      std::get<MetaRecord>(run.trace.events().front().body).scenario);
  const SystemConfig& cfg = sc.config;
  REQUIRE(CheckTrace(run.trace).ok());

  SUBCASE("fifo: a reordered channel sequence number") {
    const auto idx = FindEvent<DeliverRecord>(
        run.trace, [](const DeliverRecord&) { return true; }, 1);
    const TraceLog bad = Mutate(run.trace, idx, [](TraceEvent& ev) {
      std::get<DeliverRecord>(ev.body).chseq += 1;
    });
    CHECK(!CheckFifo(bad).ok);
  }

  SUBCASE("amnesic: an inflated storage census") {
    const auto idx = FindEvent<SnapshotRecord>(
        run.trace, [](const SnapshotRecord& s) { return !s.nodes.empty(); });
    const TraceLog bad = Mutate(run.trace, idx, [](TraceEvent& ev) {
      std::get<SnapshotRecord>(ev.body).nodes[0].bytes = 1u << 20;
    });
    CHECK(!CheckAmnesic(bad, cfg).result.ok);
  }

  SUBCASE("bandwidth: an extra byte on a dispersal") {
    const auto idx = FindEvent<DeliverRecord>(
        run.trace, [](const DeliverRecord& d) { return d.msg == "node-write"; });
    const TraceLog bad = Mutate(run.trace, idx, [](TraceEvent& ev) {
      std::get<DeliverRecord>(ev.body).data_bytes += 1;
    });
    CHECK(!CheckBandwidth(bad, cfg).result.ok);
  }

  SUBCASE("directory: a scan that disagrees with replayed updates") {
    const auto idx = FindEvent<DirPointRecord>(
        run.trace, [](const DirPointRecord& p) { return !p.is_update; }, 1);
    const TraceLog bad = Mutate(run.trace, idx, [](TraceEvent& ev) {
      std::get<DirPointRecord>(ev.body).detail[0]["readindex"] = 99;
    });
    CHECK(!CheckDirectoryReplay(bad, cfg).ok);
  }

  SUBCASE("wait-freedom: a truncated trace") {
    TraceLog bad;
    for (std::size_t i = 0; i + 1 < run.trace.events().size(); ++i) {
      bad.Append(run.trace.events()[i]);
    }
    CHECK(!CheckWaitFreedom(bad).ok);
  }

  SUBCASE("structure: a read timestamp matching no write") {
    const auto idx = FindEvent<RespondRecord>(
        run.trace, [](const RespondRecord& r) { return !r.is_write; });
    const TraceLog bad = Mutate(run.trace, idx, [](TraceEvent& ev) {
      std::get<RespondRecord>(ev.body).ts = Timestamp{99, 0};
    });
    CHECK(!CheckStructure(bad, cfg).ok);
  }

  SUBCASE("linearizability: the read rewritten to the overwritten value") {
    const auto first_write = FindEvent<RespondRecord>(
        run.trace, [](const RespondRecord& r) { return r.is_write; });
    const auto first_invoke = FindEvent<InvokeRecord>(
        run.trace, [](const InvokeRecord& i) { return i.is_write; });
    const auto read_idx = FindEvent<RespondRecord>(
        run.trace, [](const RespondRecord& r) { return !r.is_write; });
    const auto& w1resp =
        std::get<RespondRecord>(run.trace.events()[first_write].body);
    const auto& w1inv =
        std::get<InvokeRecord>(run.trace.events()[first_invoke].body);
    const TraceLog bad =
        Mutate(run.trace, read_idx, [&](TraceEvent& ev) {
          auto& rec = std::get<RespondRecord>(ev.body);
          rec.value = w1inv.value;
          rec.ts = w1resp.ts;
        });
    CHECK(!CheckLinearizable(History::FromTrace(bad)).ok);
  }
}

TEST_CASE("verdict summary names every check") {
  const auto verdict = CheckTrace(SequentialRun().trace);
  const std::string s = verdict.Summary();
  for (const char* name : {"linearizable", "amnesic", "bandwidth", "fifo",
                           "directory", "wait-freedom", "structure"}) {
    CHECK(s.find(name) != std::string::npos);
  }
}
