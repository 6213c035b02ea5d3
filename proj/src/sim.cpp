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

#include "ecreg/sim.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "ecreg/checker.hpp"
#include "ecreg/history.hpp"
#include "ecreg/util.hpp"

namespace ecreg {
namespace {

// Fills the trace annotation fields of a deliver record from the message.
void AnnotateDeliver(DeliverRecord& rec, const Message& msg) {
  std::visit(
      [&rec](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, NodeWrite>) {
          rec.ts = m.ts;
          rec.frag_present = true;
        } else if constexpr (std::is_same_v<T, NodeWriteAck> ||
                             std::is_same_v<T, NodeRead>) {
          rec.ts = m.ts;
        } else if constexpr (std::is_same_v<T, NodeReadResp>) {
          rec.ts = m.ts;
          rec.frag_present = m.frag.has_value();
        } else if constexpr (std::is_same_v<T, NodeFree> ||
                             std::is_same_v<T, NodeFreeAck>) {
          rec.ts_set = m.ts_set;
        } else if constexpr (std::is_same_v<T, DirUpdate>) {
          rec.tag = DirOpTagName(m.tag);
        } else if constexpr (std::is_same_v<T, DirUpdateAck> ||
                             std::is_same_v<T, DirScan> ||
                             std::is_same_v<T, DirScanResp>) {
          rec.tag = DirOpTagName(m.tag);
        }
      },
      msg);
}

// Validates up front so member construction never sees a bad scenario.
const Scenario& Checked(const Scenario& scenario) {
  scenario.Validate();
  return scenario;
}

}  // namespace

std::string Choice::Label() const {
  if (kind == Kind::kInvoke) return "invoke:" + std::to_string(dst.idx);
  return "deliver:" + src.Label() + "->" + dst.Label();
}

std::vector<PendingRecord> RunStats::Starved() const {
  std::vector<PendingRecord> out;
  for (const auto& p : pending) {
    if (!p.crashed) out.push_back(p);
  }
  return out;
}

World::World(const Scenario& scenario, std::uint64_t seed, TraceLog* trace)
    : scenario_(Checked(scenario)),
      seed_(seed),
      codec_(std::make_shared<Codec>(scenario.config.n, scenario.config.k)),
      dir_(scenario.config),
      trace_(trace) {
  const auto& cfg = scenario_.config;
  nodes_.resize(cfg.n);
  for (std::uint16_t i = 0; i < cfg.n; ++i) {
    nodes_[i].strategy = scenario_.adversary.node_strategies[i];
  }
  const auto plan = GenerateWorkload(scenario_, seed_);
  clients_.reserve(cfg.m);
  for (std::uint16_t c = 0; c < cfg.m; ++c) {
    clients_.emplace_back(Client(cfg, c, codec_.get()));
    clients_.back().plan = plan[c];
  }
  if (trace_ != nullptr) {
    MetaRecord meta;
    meta.scenario = scenario_.ToJson();
    meta.seed = seed_;
    meta.scenario_digest = scenario_.Digest();
    trace_->Append({0, Addr::Sim(), Addr::Sim(), std::move(meta)});
  }
  MaybeEmitSnapshot();
}

void World::RefreshCrashes() {
  for (const auto& [client, crash_step] : scenario_.adversary.client_crashes) {
    if (step_ >= crash_step) clients_[client].crashed = true;
  }
}

std::vector<EnabledChoice> World::Enabled() {
  RefreshCrashes();
  std::vector<EnabledChoice> out;
  for (const auto& [key, ch] : channels_) {
    if (ch.q.empty()) continue;
    out.push_back({Choice::Deliver(key.first, key.second),
                   ch.q.front().enq_step});
  }
  for (std::uint16_t c = 0; c < clients_.size(); ++c) {
    const SimClient& sc = clients_[c];
    if (sc.crashed || sc.cur_op != 0 || sc.next_op >= sc.plan.size()) continue;
    out.push_back({Choice::Invoke(c), sc.ready_since});
  }
  return out;
}

void World::Apply(const Choice& choice) {
  RefreshCrashes();
  ++step_;
  if (choice.kind == Choice::Kind::kInvoke) {
    InvokeNext(choice.dst.idx);
  } else {
    DeliverTo(choice);
  }
  MaybeEmitSnapshot();
}

void World::DeliverTo(const Choice& choice) {
  auto it = channels_.find({choice.src, choice.dst});
  if (it == channels_.end() || it->second.q.empty()) {
    throw std::logic_error("delivery from an empty channel: " +
                           choice.Label());
  }
  const QueuedMessage qm = std::move(it->second.q.front());
  it->second.q.pop_front();
  EmitDeliver(choice.src, choice.dst, qm);
  switch (choice.dst.kind) {
    case Addr::Kind::kDir:
      HandleAtDir(choice.src, qm);
      break;
    case Addr::Kind::kNode:
      HandleAtNode(choice.dst.idx, choice.src, qm);
      break;
    case Addr::Kind::kClient:
      HandleAtClient(choice.dst.idx, choice.src, qm);
      break;
    default:
      throw std::logic_error("message addressed to the harness");
  }
}

void World::EmitDeliver(Addr src, Addr dst, const QueuedMessage& qm) {
  if (trace_ == nullptr) return;
  DeliverRecord rec;
  rec.msg = MessageKindName(qm.msg);
  rec.chseq = qm.chseq;
  rec.op = qm.op;
  rec.data_bytes = MessageDataBytes(qm.msg);
  rec.meta_bytes =
      MessageMetadataBytes(qm.msg, scenario_.config.n, scenario_.config.m);
  AnnotateDeliver(rec, qm.msg);
  trace_->Append({step_, src, dst, std::move(rec)});
}

void World::HandleAtDir(Addr src, const QueuedMessage& qm) {
  if (const auto* update = std::get_if<DirUpdate>(&qm.msg)) {
    dir_.Update(update->client, update->fields);
    if (trace_ != nullptr) {
      DirPointRecord rec;
      rec.client = update->client;
      rec.tag = DirOpTagName(update->tag);
      rec.is_update = true;
      rec.op = qm.op;
      rec.detail = PartialToJson(update->fields);
      trace_->Append({step_, Addr::Dir(), Addr::Dir(), std::move(rec)});
    }
    Send(Addr::Dir(), src, DirUpdateAck{update->tag}, qm.op);
    return;
  }
  if (const auto* scan = std::get_if<DirScan>(&qm.msg)) {
    auto snapshot = dir_.Scan();
    if (trace_ != nullptr) {
      DirPointRecord rec;
      rec.client = src.idx;
      rec.tag = DirOpTagName(scan->tag);
      rec.is_update = false;
      rec.op = qm.op;
      rec.detail = DirSnapshotToJson(snapshot);
      trace_->Append({step_, Addr::Dir(), Addr::Dir(), std::move(rec)});
    }
    Send(Addr::Dir(), src, DirScanResp{std::move(snapshot), scan->tag}, qm.op);
    return;
  }
  // Other kinds addressed to the directory are dropped.
}

void World::HandleAtNode(std::uint16_t node_id, Addr src,
                         const QueuedMessage& qm) {
  NodeRuntime& node = nodes_[node_id];
  if (node.strategy == Strategy::kHonest) {
    if (const auto* free = std::get_if<NodeFree>(&qm.msg)) {
      GuardRetention(node_id, free->ts_set);
    }
  }
  auto responses = NodeHandle(node, node_id, seed_, qm.msg);
  for (auto& resp : responses) {
    Send(Addr::Node(node_id), src, std::move(resp), qm.op);
  }
}

void World::HandleAtClient(ClientId c, Addr src, const QueuedMessage& qm) {
  SimClient& sc = clients_[c];
  if (sc.crashed) return;  // consumed, never processed
  ClientOutput out = sc.proto.OnMessage(src, qm.msg);
  for (auto& [dst, msg] : out.sends) {
    Send(Addr::Client(c), dst, std::move(msg), sc.cur_op);
  }
  NoteReadFixIfAny(c);
  if (out.response.has_value()) {
    NoteResponse(c, *out.response);
  }
}

void World::Send(Addr src, Addr dst, Message msg, std::uint64_t op) {
  SimChannel& ch = channels_[{src, dst}];
  ch.q.push_back({std::move(msg), ch.next_seq++, step_, op});
}

void World::InvokeNext(ClientId c) {
  SimClient& sc = clients_[c];
  if (sc.crashed || sc.cur_op != 0 || sc.next_op >= sc.plan.size() ||
      !sc.proto.Idle()) {
    throw std::logic_error("invoke on a busy, crashed, or finished client");
  }
  const bool is_write = sc.plan[sc.next_op];
  ++sc.next_op;
  sc.cur_op = ++next_op_id_;
  sc.cur_is_write = is_write;

  InvokeRecord rec;
  rec.client = c;
  rec.op = sc.cur_op;
  rec.is_write = is_write;

  ClientOutput out;
  if (is_write) {
    Bytes value =
        MakeWriteValue(scenario_.config, seed_, c, sc.writes_issued++);
    rec.value = ValueId(value);
    out = sc.proto.InvokeWrite(std::move(value));
  } else {
    out = sc.proto.InvokeRead();
  }

  hist_digest_.PutByte(1);
  hist_digest_.PutU64(c);
  hist_digest_.PutU64(sc.cur_op);
  hist_digest_.PutBool(is_write);
  if (rec.value) hist_digest_.PutString(*rec.value);
  if (trace_ != nullptr) {
    trace_->Append({step_, Addr::Sim(), Addr::Client(c), std::move(rec)});
  }

  for (auto& [dst, msg] : out.sends) {
    Send(Addr::Client(c), dst, std::move(msg), sc.cur_op);
  }
  if (out.response.has_value()) {
    NoteResponse(c, *out.response);
  }
}

void World::NoteReadFixIfAny(ClientId c) {
  SimClient& sc = clients_[c];
  if (sc.cur_op == 0 || sc.cur_is_write || sc.fix.has_value()) return;
  if (sc.proto.reader_phase() != ReaderPhase::kFetching) return;

  const Pointer& ptr = sc.proto.readptr();
  ReadFix fix;
  fix.ts = ptr.ts;
  fix.set = ptr.set;
  for (auto node : ptr.set) {
    if (node >= nodes_.size() || node >= ptr.hash.size()) continue;
    if (nodes_[node].strategy != Strategy::kHonest) continue;
    if (!ptr.hash[node].has_value()) continue;
    const Fragment stored = nodes_[node].store.Read(ptr.ts);
    if (stored.has_value() && HashFragment(*stored) == *ptr.hash[node]) {
      fix.honest_holders.push_back(node);
    }
  }
  if (fix.honest_holders.size() < scenario_.config.k) {
    throw ProtocolViolation(
        "retention broken: read by client " + std::to_string(c) +
        " fixed timestamp " + TimestampHex(ptr.ts) + " but only " +
        std::to_string(fix.honest_holders.size()) +
        " honest set members still hold a matching fragment");
  }
  sc.fix = std::move(fix);
}

void World::GuardRetention(std::uint16_t node_id,
                           const std::vector<Timestamp>& freed) {
  for (const auto& sc : clients_) {
    if (!sc.fix.has_value()) continue;
    const auto& holders = sc.fix->honest_holders;
    if (std::find(holders.begin(), holders.end(), node_id) == holders.end()) {
      continue;
    }
    for (const auto& ts : freed) {
      if (ts == sc.fix->ts) {
        throw ProtocolViolation(
            "retention broken: node " + std::to_string(node_id) +
            " freed fragment " + TimestampHex(ts) +
            " needed by client " + std::to_string(sc.proto.id()) +
            "'s in-flight read");
      }
    }
  }
}

void World::NoteResponse(ClientId c, const OpResponse& r) {
  SimClient& sc = clients_[c];
  RespondRecord rec;
  rec.client = c;
  rec.op = sc.cur_op;
  rec.is_write = r.is_write;
  rec.ts = r.ts;
  if (!r.is_write) {
    if (r.value.has_value()) rec.value = ValueId(*r.value);
    rec.read_from = r.read_from;
    rec.read_was_frozen = r.read_was_frozen;
    rec.read_index = sc.proto.readindex();
    if (sc.fix.has_value()) rec.read_set = sc.fix->set;
  }

  hist_digest_.PutByte(2);
  hist_digest_.PutU64(c);
  hist_digest_.PutU64(rec.op);
  hist_digest_.PutBool(rec.is_write);
  hist_digest_.PutBool(rec.value.has_value());
  if (rec.value) hist_digest_.PutString(*rec.value);

  if (r.is_write) {
    ++completed_writes_;
  } else {
    ++completed_reads_;
  }
  if (trace_ != nullptr) {
    trace_->Append({step_, Addr::Client(c), Addr::Sim(), std::move(rec)});
  }
  sc.cur_op = 0;
  sc.cur_is_write = false;
  sc.fix.reset();
  sc.ready_since = step_;
}

bool World::Quiescent() const {
  for (const auto& [key, ch] : channels_) {
    if (!ch.q.empty()) return false;
  }
  for (const auto& sc : clients_) {
    if (!sc.crashed && sc.cur_op != 0) return false;
  }
  return true;
}

SnapshotRecord World::CurrentSnapshot() const {
  SnapshotRecord rec;
  rec.completed_writes = completed_writes_;
  rec.completed_reads = completed_reads_;
  for (std::uint16_t i = 0; i < nodes_.size(); ++i) {
    rec.nodes.push_back(
        {i, nodes_[i].store.FragmentCount(), nodes_[i].store.StoredBytes()});
  }
  return rec;
}

void World::MaybeEmitSnapshot() {
  const bool quiescent = Quiescent();
  if (quiescent && !was_quiescent_ && trace_ != nullptr) {
    trace_->Append({step_, Addr::Sim(), Addr::Sim(), CurrentSnapshot()});
  }
  was_quiescent_ = quiescent;
}

RunStats World::Finish(bool hit_step_cap) {
  RunStats stats;
  stats.hit_step_cap = hit_step_cap;
  stats.steps = step_;
  stats.completed_writes = completed_writes_;
  stats.completed_reads = completed_reads_;
  stats.drained = true;
  for (const auto& [key, ch] : channels_) {
    if (!ch.q.empty()) stats.drained = false;
  }
  for (const auto& sc : clients_) {
    if (sc.cur_op != 0) {
      stats.pending.push_back(
          {sc.proto.id(), sc.cur_op, sc.cur_is_write, sc.crashed});
    }
  }
  if (trace_ != nullptr) {
    EndRecord end;
    end.drained = stats.drained;
    end.steps = stats.steps;
    end.pending = stats.pending;
    trace_->Append({step_, Addr::Sim(), Addr::Sim(), std::move(end)});
  }
  return stats;
}

std::array<std::uint64_t, 2> World::StateHash() const {
  StateHasher h;
  for (const auto& entry : dir_.state()) HashEntry(h, entry);
  h.PutU64(nodes_.size());
  for (const auto& node : nodes_) {
    h.PutByte(static_cast<std::uint8_t>(node.strategy));
    h.PutU64(node.handled);
    h.PutU64(node.store.data().size());
    for (const auto& [key, frag] : node.store.data()) {
      h.PutBytes(key.data(), key.size());
      HashBytes(h, frag);
    }
  }
  h.PutU64(clients_.size());
  for (const auto& sc : clients_) {
    sc.proto.HashInto(h);
    h.PutU64(sc.next_op);
    h.PutU64(sc.writes_issued);
    h.PutU64(sc.cur_op);
    h.PutBool(sc.cur_is_write);
    h.PutBool(sc.crashed);
    h.PutBool(sc.fix.has_value());
    if (sc.fix.has_value()) {
      HashTimestamp(h, sc.fix->ts);
      h.PutU64(sc.fix->set.size());
      for (auto i : sc.fix->set) h.PutU64(i);
      h.PutU64(sc.fix->honest_holders.size());
      for (auto i : sc.fix->honest_holders) h.PutU64(i);
    }
  }
  std::uint64_t busy = 0;
  for (const auto& [key, ch] : channels_) {
    if (!ch.q.empty()) ++busy;
  }
  h.PutU64(busy);
  for (const auto& [key, ch] : channels_) {
    if (ch.q.empty()) continue;
    h.PutByte(static_cast<std::uint8_t>(key.first.kind));
    h.PutU64(key.first.idx);
    h.PutByte(static_cast<std::uint8_t>(key.second.kind));
    h.PutU64(key.second.idx);
    h.PutU64(ch.q.size());
    for (const auto& qm : ch.q) HashMessage(h, qm.msg);
  }
  const auto hist = hist_digest_.Digest();
  h.PutU64(hist[0]);
  h.PutU64(hist[1]);
  return h.Digest();
}

RunStats DriveWorld(World& world, const Scenario& scenario,
                    std::uint64_t seed) {
  if (scenario.schedule.policy == SchedulePolicy::kExhaustive) {
    throw ConfigError(
        "schedule.policy: exhaustive scenarios run through the explorer");
  }
  const bool scripted = scenario.schedule.policy == SchedulePolicy::kScripted;
  Rng rng(seed ^ 0x7363686564756c65ULL);  // schedule stream
  std::size_t script_pos = 0;

  for (;;) {
    if (world.step() >= scenario.max_steps) {
      return world.Finish(true);
    }
    auto enabled = world.Enabled();
    if (enabled.empty()) break;

    std::size_t pick = 0;
    if (scripted) {
      if (script_pos < scenario.schedule.script.size()) {
        const std::string& label = scenario.schedule.script[script_pos];
        bool found = false;
        for (std::size_t i = 0; i < enabled.size(); ++i) {
          if (enabled[i].choice.Label() == label) {
            pick = i;
            found = true;
            break;
          }
        }
        if (!found) {
          throw ConfigError("schedule.script[" + std::to_string(script_pos) +
                            "]: '" + label + "' is not enabled at step " +
                            std::to_string(world.step()));
        }
        ++script_pos;
      }
      // Past the script's end the first enabled event runs, which drains
      // all deliveries before the next invoke.
    } else {
      std::size_t oldest = 0;
      for (std::size_t i = 1; i < enabled.size(); ++i) {
        if (enabled[i].ready_since < enabled[oldest].ready_since) oldest = i;
      }
      const std::uint64_t age = world.step() + 1 - enabled[oldest].ready_since;
      if (age >= scenario.schedule.fairness) {
        pick = oldest;
      } else {
        pick = static_cast<std::size_t>(rng.Below(enabled.size()));
      }
    }
    world.Apply(enabled[pick].choice);
  }
  return world.Finish(false);
}

RunOutput SimulateRun(const Scenario& scenario, std::uint64_t seed) {
  RunOutput out;
  World world(scenario, seed, &out.trace);
  out.stats = DriveWorld(world, scenario, seed);
  return out;
}

namespace {

struct ExploreContext {
  std::map<std::array<std::uint64_t, 2>, std::uint32_t> memo;
  ExhaustiveResult result;
  std::uint32_t initial_budget = 0;
};

void ExploreLeaf(World& world, TraceLog& trace, ExploreContext& ctx) {
  RunStats stats = world.Finish(false);
  ++ctx.result.leaves;
  const auto starved = stats.Starved();
  if (!starved.empty()) {
    ctx.result.ok = false;
    ctx.result.violation =
        std::string(starved[0].is_write ? "write" : "read") +
        " starved (client " + std::to_string(starved[0].client) + " op " +
        std::to_string(starved[0].op) + ") in an explored schedule";
    ctx.result.counterexample = trace;
    return;
  }
  const auto lin = CheckLinearizable(History::FromTrace(trace));
  if (!lin.ok) {
    ctx.result.ok = false;
    ctx.result.violation = lin.violation;
    ctx.result.counterexample = trace;
  }
}

void Explore(World world, TraceLog trace, std::uint32_t budget,
             ExploreContext& ctx) {
  world.set_trace(&trace);
  try {
    for (;;) {
      if (!ctx.result.ok) return;
      auto enabled = world.Enabled();
      if (enabled.empty()) {
        ctx.result.deepest_branching =
            std::max<std::uint64_t>(ctx.result.deepest_branching,
                                    ctx.initial_budget - budget);
        ExploreLeaf(world, trace, ctx);
        return;
      }
      if (enabled.size() == 1 || budget == 0) {
        world.Apply(enabled[0].choice);
        continue;
      }
      const auto key = world.StateHash();
      auto it = ctx.memo.find(key);
      if (it != ctx.memo.end() && it->second >= budget) {
        ++ctx.result.memo_hits;
        return;
      }
      ctx.memo[key] = budget;
      ++ctx.result.branch_points;
      for (const auto& e : enabled) {
        if (!ctx.result.ok) return;
        World next = world;
        TraceLog next_trace = trace;
        next.set_trace(&next_trace);
        next.Apply(e.choice);
        Explore(std::move(next), std::move(next_trace), budget - 1, ctx);
      }
      return;
    }
  } catch (const ProtocolViolation& e) {
    ctx.result.ok = false;
    ctx.result.violation = e.what();
    ctx.result.counterexample = std::move(trace);
  }
}

}  // namespace

ExhaustiveResult ExploreExhaustive(const Scenario& scenario,
                                   std::uint64_t seed) {
  if (scenario.schedule.policy != SchedulePolicy::kExhaustive) {
    throw ConfigError("schedule.policy: expected 'exhaustive'");
  }
  ExploreContext ctx;
  ctx.initial_budget = scenario.schedule.depth;
  TraceLog trace;
  World world(scenario, seed, &trace);
  Explore(std::move(world), std::move(trace), ctx.initial_budget, ctx);
  return std::move(ctx.result);
}

}  // namespace ecreg
