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
#include <string>
#include <vector>

#include "ecreg/checker.hpp"
#include "ecreg/history.hpp"
#include "ecreg/sim.hpp"

using namespace ecreg;

namespace {

Scenario HonestScenario() {
  Scenario sc;
  sc.config = {4, 1, 2, 2, 64};
  sc.adversary.node_strategies.assign(4, Strategy::kHonest);
  sc.workload.ops = 4;
  return sc;
}

std::string DumpTrace(const TraceLog& trace) {
  std::string out;
  for (const auto& ev : trace.events()) out += ev.ToJson().dump() + "\n";
  return out;
}

}  // namespace

TEST_CASE("same seed, same trace; different seed, different schedule") {
  const Scenario sc = HonestScenario();
  const auto a = SimulateRun(sc, 5);
  const auto b = SimulateRun(sc, 5);
  const auto c = SimulateRun(sc, 6);
  CHECK(DumpTrace(a.trace) == DumpTrace(b.trace));
  CHECK(DumpTrace(a.trace) != DumpTrace(c.trace));
  CHECK(a.stats.drained);
  CHECK(a.stats.completed_writes + a.stats.completed_reads == 8);
}

TEST_CASE("random runs under every fault strategy stay correct") {
  for (auto s : {Strategy::kSilent, Strategy::kCorruptFragment,
                 Strategy::kWrongTimestamp, Strategy::kAckWithoutStore,
                 Strategy::kSpuriousFree, Strategy::kStaleReplay}) {
    Scenario sc = HonestScenario();
    sc.adversary.node_strategies[2] = s;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto out = SimulateRun(sc, seed);
      REQUIRE(out.stats.drained);
      const auto verdict = CheckTrace(out.trace);
      INFO("strategy ", StrategyName(s), " seed ", seed, "\n",
           verdict.Summary());
      CHECK(verdict.ok());
    }
  }
}

TEST_CASE("fairness bound one still completes and verifies") {
  Scenario sc = HonestScenario();
  sc.schedule.fairness = 1;
  const auto out = SimulateRun(sc, 9);
  CHECK(out.stats.drained);
  CHECK(CheckTrace(out.trace).ok());
}

TEST_CASE("empty-script runs are fully sequential with quiescent censuses") {
  Scenario sc;
  sc.config = {4, 1, 2, 1, 32};
  sc.adversary.node_strategies.assign(4, Strategy::kHonest);
  sc.schedule.policy = SchedulePolicy::kScripted;
  sc.workload.scripts = {{{"write", "write", "write"}}};
  const auto out = SimulateRun(sc, 1);
  REQUIRE(out.stats.drained);
  REQUIRE(out.stats.completed_writes == 3);

  std::vector<SnapshotRecord> snapshots;
  for (const auto& ev : out.trace.events()) {
    if (const auto* s = std::get_if<SnapshotRecord>(&ev.body)) {
      snapshots.push_back(*s);
    }
  }
  // One census before any work, one after each completed write.
  REQUIRE(snapshots.size() == 4);
  for (const auto& node : snapshots.front().nodes) CHECK(node.fragments == 0);
  for (std::size_t i = 1; i < snapshots.size(); ++i) {
    // A lone writer retains exactly the current write at every rest point.
    for (const auto& node : snapshots[i].nodes) {
      CHECK(node.fragments == 1);
      CHECK(node.bytes == 16);  // ceil(32 / 2)
    }
  }
  CHECK(CheckTrace(out.trace).ok());
}

TEST_CASE("script labels must match an enabled event") {
  Scenario sc = HonestScenario();
  sc.schedule.policy = SchedulePolicy::kScripted;
  sc.schedule.script = {"deliver:client:0->dir"};  // nothing in flight yet
  CHECK_THROWS_WITH_AS(SimulateRun(sc, 1),
                       doctest::Contains("schedule.script[0]"), ConfigError);
}

TEST_CASE("a crashed client leaves only its own operation pending") {
  Scenario sc = HonestScenario();
  sc.workload.ops = 3;
  sc.adversary.client_crashes[1] = 40;
  const auto out = SimulateRun(sc, 12);
  for (const auto& p : out.stats.pending) {
    CHECK(p.client == 1);
    CHECK(p.crashed);
  }
  const auto verdict = CheckTrace(out.trace);
  INFO(verdict.Summary());
  CHECK(verdict.ok());
}

TEST_CASE("one node short of the resilience bound starves a writer") {
  Scenario sc;
  sc.config = {3, 1, 2, 1, 32};  // n = 2t+k-1
  sc.adversary.node_strategies = {Strategy::kSilent, Strategy::kHonest,
                                  Strategy::kHonest};
  sc.allow_insufficient_nodes = true;
  sc.workload.scripts = {{{"write"}}};
  const auto out = SimulateRun(sc, 2);
  CHECK(out.stats.drained);
  REQUIRE(out.stats.Starved().size() == 1);
  const auto wf = CheckWaitFreedom(out.trace);
  CHECK(!wf.ok);
  CHECK(wf.detail == "write starved (client 0 op 1 never completed)");
}

TEST_CASE("retention guard catches a quorum of acknowledging liars") {
  // Two ack-without-store nodes (more than t faulty, deliberately) can form
  // a write quorum with no honest holder; the read that fixes that pointer
  // must trip the retention assertion.
  Scenario sc;
  sc.config = {3, 1, 1, 1, 8};
  sc.adversary.node_strategies = {Strategy::kHonest,
                                  Strategy::kAckWithoutStore,
                                  Strategy::kAckWithoutStore};
  sc.allow_insufficient_nodes = true;
  sc.schedule.policy = SchedulePolicy::kScripted;
  sc.schedule.script = {
      "invoke:0",
      "deliver:client:0->dir",      // writer pre-scan
      "deliver:dir->client:0",
      "deliver:client:0->node:1",   // disperse to the liars first
      "deliver:client:0->node:2",
      "deliver:node:1->client:0",   // their acks form the quorum
      "deliver:node:2->client:0",
  };
  sc.workload.scripts = {{{"write", "read"}}};
  CHECK_THROWS_WITH_AS(SimulateRun(sc, 1), doctest::Contains("retention"),
                       ProtocolViolation);
}

TEST_CASE("every annotated delivery belongs to a known operation") {
  const auto out = SimulateRun(HonestScenario(), 21);
  std::vector<std::uint64_t> known;
  for (const auto& ev : out.trace.events()) {
    if (const auto* inv = std::get_if<InvokeRecord>(&ev.body)) {
      known.push_back(inv->op);
    }
  }
  for (const auto& ev : out.trace.events()) {
    if (const auto* d = std::get_if<DeliverRecord>(&ev.body)) {
      if (d->op == 0) continue;
      CHECK(std::count(known.begin(), known.end(), d->op) == 1);
    }
  }
}

TEST_CASE("exhaustive exploration of a two-client register is clean") {
  Scenario sc;
  sc.config = {3, 1, 1, 2, 8};
  sc.adversary.node_strategies.assign(3, Strategy::kHonest);
  sc.schedule.policy = SchedulePolicy::kExhaustive;
  sc.schedule.depth = 7;
  sc.workload.scripts = {{{"write"}, {"read"}}};
  const auto res = ExploreExhaustive(sc, 3);
  INFO(res.violation);
  CHECK(res.ok);
  CHECK(res.leaves > 10);
  CHECK(res.branch_points > res.leaves / 2);
  CHECK(res.memo_hits > 0);
  CHECK(res.deepest_branching == 7);
  CHECK(!res.counterexample.has_value());
}

TEST_CASE("exhaustive exploration is driven by branch points, not steps") {
  Scenario sc;
  sc.config = {3, 1, 1, 1, 8};
  sc.adversary.node_strategies.assign(3, Strategy::kHonest);
  sc.schedule.policy = SchedulePolicy::kExhaustive;
  sc.schedule.depth = 0;  // single forced path, still a full run
  sc.workload.scripts = {{{"write", "read"}}};
  const auto res = ExploreExhaustive(sc, 1);
  CHECK(res.ok);
  CHECK(res.leaves == 1);
  CHECK(res.branch_points == 0);
  CHECK(res.deepest_branching == 0);
}
