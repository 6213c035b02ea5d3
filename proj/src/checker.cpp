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

#include "ecreg/checker.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>

#include "ecreg/scenario.hpp"
#include "ecreg/util.hpp"

namespace ecreg {
namespace {

constexpr std::size_t kNoPos = std::numeric_limits<std::size_t>::max();

struct Cluster {
  std::optional<std::size_t> write;  // index into history ops
  std::vector<std::size_t> reads;
  std::size_t min_res = kNoPos;  // earliest completion among members
  std::size_t max_inv = 0;       // latest invocation among members
  bool has_member = false;
  std::string name;
};

std::string OpLabel(const Operation& op) {
  std::ostringstream os;
  os << (op.is_write ? "write" : "read") << " op " << op.op << " (client "
     << op.client << ")";
  return os.str();
}

// One cycle among the nodes Kahn's algorithm could not order.
std::vector<std::size_t> FindCycle(
    const std::vector<std::vector<std::size_t>>& adj,
    const std::vector<bool>& in_cycle_region) {
  const std::size_t n = adj.size();
  std::vector<int> color(n, 0);
  std::vector<std::size_t> stack;
  std::vector<std::size_t> cycle;

  std::function<bool(std::size_t)> dfs = [&](std::size_t u) -> bool {
    color[u] = 1;
    stack.push_back(u);
    for (std::size_t v : adj[u]) {
      if (!in_cycle_region[v]) continue;
      if (color[v] == 1) {
        auto it = std::find(stack.begin(), stack.end(), v);
        cycle.assign(it, stack.end());
        return true;
      }
      if (color[v] == 0 && dfs(v)) return true;
    }
    color[u] = 2;
    stack.pop_back();
    return false;
  };

  for (std::size_t u = 0; u < n; ++u) {
    if (in_cycle_region[u] && color[u] == 0 && dfs(u)) break;
  }
  return cycle;
}

}  // namespace

LinearizabilityResult CheckLinearizable(const History& h) {
  LinearizabilityResult out;
  const auto& ops = h.ops;

  std::map<std::string, std::size_t> write_of_value;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (!ops[i].is_write) continue;
    if (!ops[i].value.has_value()) {
      throw ConfigError("history: write op " + std::to_string(ops[i].op) +
                        " has no value");
    }
    if (!write_of_value.emplace(*ops[i].value, i).second) {
      throw ConfigError("history: value '" + *ops[i].value +
                        "' written more than once");
    }
  }

  std::set<std::string> read_values;
  for (const auto& op : ops) {
    if (!op.is_write && op.completed && op.value.has_value()) {
      read_values.insert(*op.value);
    }
  }

  for (const auto& op : ops) {
    if (op.is_write || !op.completed || !op.value.has_value()) continue;
    if (!write_of_value.count(*op.value)) {
      out.violation = OpLabel(op) + " returned value '" + *op.value +
                      "' which no write produced";
      return out;
    }
  }

  // Cluster 0 stands for the initial empty register; clusters 1.. hold one
  // written value each, in invocation order. A pending write is included
  // exactly when some completed read observed it.
  std::vector<Cluster> clusters(1);
  clusters[0].name = "(empty)";
  std::map<std::string, std::size_t> cluster_of_value;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const auto& op = ops[i];
    if (!op.is_write) continue;
    if (!op.completed && !read_values.count(*op.value)) continue;
    cluster_of_value[*op.value] = clusters.size();
    Cluster c;
    c.write = i;
    c.name = *op.value;
    clusters.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const auto& op = ops[i];
    if (op.is_write || !op.completed) continue;
    if (op.value.has_value()) {
      clusters[cluster_of_value.at(*op.value)].reads.push_back(i);
    } else {
      clusters[0].reads.push_back(i);
    }
  }

  for (const auto& cluster : clusters) {
    if (!cluster.write.has_value()) continue;
    const auto& w = ops[*cluster.write];
    for (std::size_t r : cluster.reads) {
      if (ops[r].res_pos < w.inv_pos) {
        out.violation = OpLabel(ops[r]) + " returned value '" + cluster.name +
                        "' before " + OpLabel(w) + " was invoked";
        return out;
      }
    }
  }

  for (auto& cluster : clusters) {
    auto absorb = [&cluster, &ops](std::size_t i) {
      cluster.has_member = true;
      cluster.max_inv = std::max(cluster.max_inv, ops[i].inv_pos);
      if (ops[i].completed) {
        cluster.min_res = std::min(cluster.min_res, ops[i].res_pos);
      }
    };
    if (cluster.write.has_value()) absorb(*cluster.write);
    for (std::size_t r : cluster.reads) absorb(r);
  }

  // u -> v iff some operation on u completed before some operation on v
  // began; additionally every empty-register read precedes every write.
  const std::size_t num = clusters.size();
  const bool use_empty = !clusters[0].reads.empty();
  std::vector<std::vector<std::size_t>> adj(num);
  std::vector<std::size_t> indeg(num, 0);
  auto add_edge = [&](std::size_t u, std::size_t v) {
    adj[u].push_back(v);
    ++indeg[v];
  };
  for (std::size_t u = 0; u < num; ++u) {
    for (std::size_t v = 0; v < num; ++v) {
      if (u == v || !clusters[u].has_member || !clusters[v].has_member) {
        continue;
      }
      if (u == 0 && use_empty) {
        add_edge(u, v);  // unconditional: empty register precedes all values
        continue;
      }
      if (clusters[u].min_res != kNoPos &&
          clusters[u].min_res < clusters[v].max_inv) {
        add_edge(u, v);
      }
    }
  }

  std::priority_queue<std::size_t, std::vector<std::size_t>,
                      std::greater<std::size_t>>
      ready;
  for (std::size_t u = 0; u < num; ++u) {
    if (indeg[u] == 0) ready.push(u);
  }
  std::vector<std::size_t> topo;
  {
    auto deg = indeg;
    while (!ready.empty()) {
      const std::size_t u = ready.top();
      ready.pop();
      topo.push_back(u);
      for (std::size_t v : adj[u]) {
        if (--deg[v] == 0) ready.push(v);
      }
    }
  }
  if (topo.size() < num) {
    std::vector<bool> region(num, false);
    std::set<std::size_t> ordered(topo.begin(), topo.end());
    for (std::size_t u = 0; u < num; ++u) region[u] = !ordered.count(u);
    const auto cycle = FindCycle(adj, region);
    std::ostringstream os;
    os << "no linearization: conflicting order among values [";
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      os << (i ? " -> " : "") << clusters[cycle[i]].name;
    }
    if (!cycle.empty()) os << " -> " << clusters[cycle[0]].name;
    os << "]";
    out.violation = os.str();
    return out;
  }

  // Witness: concatenate clusters in topological order, write first, reads
  // by invocation. Then replay it as a self-check: register semantics plus
  // real-time order must hold exactly.
  std::vector<std::size_t> sequence;
  for (std::size_t u : topo) {
    Cluster& cluster = clusters[u];
    if (cluster.write.has_value()) sequence.push_back(*cluster.write);
    std::sort(cluster.reads.begin(), cluster.reads.end(),
              [&ops](std::size_t a, std::size_t b) {
                return ops[a].inv_pos < ops[b].inv_pos;
              });
    for (std::size_t r : cluster.reads) sequence.push_back(r);
  }

  std::optional<std::string> current;
  for (std::size_t i : sequence) {
    if (ops[i].is_write) {
      current = ops[i].value;
    } else if (ops[i].value != current) {
      out.violation = "internal: witness replay failed at " + OpLabel(ops[i]);
      return out;
    }
  }
  std::vector<std::size_t> place(ops.size(), kNoPos);
  for (std::size_t pos = 0; pos < sequence.size(); ++pos) {
    place[sequence[pos]] = pos;
  }
  for (std::size_t a : sequence) {
    for (std::size_t b : sequence) {
      if (ops[a].completed && ops[a].res_pos < ops[b].inv_pos &&
          place[a] > place[b]) {
        out.violation = "internal: witness violates real-time order between " +
                        OpLabel(ops[a]) + " and " + OpLabel(ops[b]);
        return out;
      }
    }
  }

  out.ok = true;
  for (std::size_t i : sequence) out.witness.push_back(ops[i].op);
  return out;
}

AmnesicReport CheckAmnesic(const TraceLog& trace, const SystemConfig& cfg) {
  AmnesicReport report;
  report.byte_bound = 2ull * cfg.m * cfg.m * cfg.n * cfg.fragment_size();
  for (const auto& ev : trace.events()) {
    const auto* snap = std::get_if<SnapshotRecord>(&ev.body);
    if (snap == nullptr) continue;
    ++report.snapshots;
    std::uint64_t total = 0;
    for (const auto& node : snap->nodes) {
      total += node.bytes;
      report.max_node_fragments =
          std::max(report.max_node_fragments, node.fragments);
    }
    report.max_total_bytes = std::max(report.max_total_bytes, total);
    if (total > report.byte_bound && report.result.ok) {
      report.result.ok = false;
      report.result.detail =
          "quiescent point at step " + std::to_string(ev.step) + " stores " +
          std::to_string(total) + " fragment bytes, bound is " +
          std::to_string(report.byte_bound);
    }
  }
  if (report.snapshots == 0) {
    report.result.skipped = true;
    report.result.detail = "trace has no quiescent points";
  }
  return report;
}

BandwidthReport CheckBandwidth(const TraceLog& trace,
                               const SystemConfig& cfg) {
  BandwidthReport report;
  const std::uint64_t frag = cfg.fragment_size();
  report.write_data_per_op = static_cast<std::uint64_t>(cfg.n) * frag;
  report.read_data_bound = static_cast<std::uint64_t>(cfg.quorum()) * frag;

  bool drained = false;
  bool saw_end = false;
  std::map<std::uint64_t, RespondRecord> responses;
  for (const auto& ev : trace.events()) {
    if (const auto* res = std::get_if<RespondRecord>(&ev.body)) {
      responses[res->op] = *res;
    } else if (const auto* end = std::get_if<EndRecord>(&ev.body)) {
      saw_end = true;
      drained = end->drained;
    }
  }
  if (!saw_end || !drained) {
    report.result.skipped = true;
    report.result.detail = "bandwidth accounting needs a drained trace";
    return report;
  }

  std::map<std::uint64_t, std::uint64_t> write_bytes;
  std::map<std::uint64_t, std::uint64_t> read_bytes;
  for (const auto& ev : trace.events()) {
    const auto* del = std::get_if<DeliverRecord>(&ev.body);
    if (del == nullptr) continue;
    report.total_metadata_bytes += del->meta_bytes;
    if (del->op == 0) continue;
    if (del->msg == "node-write") {
      write_bytes[del->op] += del->data_bytes;
    } else if (del->msg == "node-read-resp" && del->frag_present) {
      auto it = responses.find(del->op);
      if (it != responses.end() && !it->second.is_write &&
          del->ts.has_value() && *del->ts == it->second.ts) {
        read_bytes[del->op] += del->data_bytes;
      }
    }
  }

  for (const auto& [op, resp] : responses) {
    if (resp.is_write) {
      ++report.write_ops_checked;
      const std::uint64_t sent = write_bytes.count(op) ? write_bytes.at(op) : 0;
      if (sent != report.write_data_per_op && report.result.ok) {
        report.result.ok = false;
        report.result.detail =
            "write op " + std::to_string(op) + " dispersed " +
            std::to_string(sent) + " data bytes, expected " +
            std::to_string(report.write_data_per_op);
      }
    } else if (resp.value.has_value()) {
      ++report.read_ops_checked;
      const std::uint64_t got = read_bytes.count(op) ? read_bytes.at(op) : 0;
      report.max_read_data = std::max(report.max_read_data, got);
      if (got > report.read_data_bound && report.result.ok) {
        report.result.ok = false;
        report.result.detail =
            "read op " + std::to_string(op) + " received " +
            std::to_string(got) + " on-timestamp data bytes, cap is " +
            std::to_string(report.read_data_bound);
      }
    }
  }
  return report;
}

ProbeResult CheckFifo(const TraceLog& trace) {
  ProbeResult result;
  std::map<std::pair<std::string, std::string>, std::uint64_t> expected;
  for (const auto& ev : trace.events()) {
    const auto* del = std::get_if<DeliverRecord>(&ev.body);
    if (del == nullptr) continue;
    auto& next = expected[{ev.src.Label(), ev.dst.Label()}];
    if (del->chseq != next) {
      result.ok = false;
      result.detail = "channel " + ev.src.Label() + "->" + ev.dst.Label() +
                      " delivered sequence " + std::to_string(del->chseq) +
                      " at step " + std::to_string(ev.step) + ", expected " +
                      std::to_string(next);
      return result;
    }
    ++next;
  }
  return result;
}

ProbeResult CheckDirectoryReplay(const TraceLog& trace,
                                 const SystemConfig& cfg) {
  ProbeResult result;
  std::vector<nlohmann::json> state(cfg.m, EntryToJson(MakeEntry(cfg.m)));
  std::uint64_t points = 0;
  for (const auto& ev : trace.events()) {
    const auto* point = std::get_if<DirPointRecord>(&ev.body);
    if (point == nullptr) continue;
    ++points;
    if (point->is_update) {
      if (point->client >= cfg.m) {
        result.ok = false;
        result.detail = "directory update for out-of-range client " +
                        std::to_string(point->client);
        return result;
      }
      for (const char* key : {"writeptr", "frozen", "frozenindex",
                              "readindex"}) {
        if (point->detail.contains(key)) {
          state[point->client][key] = point->detail.at(key);
        }
      }
    } else {
      nlohmann::json expected = nlohmann::json::array();
      for (const auto& entry : state) expected.push_back(entry);
      if (point->detail != expected) {
        result.ok = false;
        result.detail = "scan at step " + std::to_string(ev.step) +
                        " does not match the replayed directory state";
        return result;
      }
    }
  }
  if (points == 0) {
    result.skipped = true;
    result.detail = "trace has no directory operations";
  }
  return result;
}

ProbeResult CheckWaitFreedom(const TraceLog& trace) {
  ProbeResult result;
  const EndRecord* end = nullptr;
  for (const auto& ev : trace.events()) {
    if (const auto* e = std::get_if<EndRecord>(&ev.body)) end = e;
  }
  if (end == nullptr) {
    result.ok = false;
    result.detail = "trace has no end record";
    return result;
  }
  if (!end->drained) {
    result.ok = false;
    result.detail = "run stopped before draining its channels";
    return result;
  }
  for (const auto& p : end->pending) {
    if (p.crashed) continue;
    result.ok = false;
    result.detail = std::string(p.is_write ? "write" : "read") +
                    " starved (client " + std::to_string(p.client) + " op " +
                    std::to_string(p.op) + " never completed)";
    return result;
  }
  return result;
}

ProbeResult CheckStructure(const TraceLog& trace, const SystemConfig& cfg) {
  ProbeResult result;
  auto fail = [&result](const std::string& detail) {
    result.ok = false;
    result.detail = detail;
  };

  const History h = History::FromTrace(trace);
  const auto& ops = h.ops;

  // Read integrity: every returned value must be some write's value, under
  // the write's own timestamp; empty reads carry the initial timestamp.
  std::map<std::string, const Operation*> completed_write_of;
  for (const auto& op : ops) {
    if (op.is_write && op.completed) {
      completed_write_of[*op.value] = &op;
    }
  }
  for (const auto& op : ops) {
    if (op.is_write || !op.completed) continue;
    if (!op.value.has_value()) {
      if (op.ts != kT0) {
        fail(OpLabel(op) + " returned the empty register under timestamp " +
             TimestampHex(op.ts));
        return result;
      }
      continue;
    }
    auto it = completed_write_of.find(*op.value);
    if (it != completed_write_of.end() && it->second->ts != op.ts) {
      fail(OpLabel(op) + " returned value '" + *op.value + "' under " +
           TimestampHex(op.ts) + " but its write used " +
           TimestampHex(it->second->ts));
      return result;
    }
  }

  // Unique, well-formed write timestamps.
  std::set<std::pair<std::uint64_t, std::uint16_t>> seen_ts;
  for (const auto& op : ops) {
    if (!op.is_write || !op.completed) continue;
    if (op.ts == kT0) {
      fail(OpLabel(op) + " completed with the initial timestamp");
      return result;
    }
    if (op.ts.c != op.client) {
      fail(OpLabel(op) + " completed with timestamp " + TimestampHex(op.ts) +
           " not tagged by its own client id");
      return result;
    }
    if (!seen_ts.insert({op.ts.sn, op.ts.c}).second) {
      fail("two writes completed with timestamp " + TimestampHex(op.ts));
      return result;
    }
  }

  // Timestamps must respect real-time order.
  for (const auto& a : ops) {
    if (!a.completed) continue;
    for (const auto& b : ops) {
      if (!b.completed || !a.PrecedesRealTime(b)) continue;
      if (b.ts < a.ts) {
        fail(OpLabel(b) + " carries timestamp " + TimestampHex(b.ts) +
             " older than preceding " + OpLabel(a) + " at " +
             TimestampHex(a.ts));
        return result;
      }
      if (b.is_write && b.ts == a.ts) {
        fail(OpLabel(b) + " reused timestamp " + TimestampHex(b.ts) +
             " of preceding " + OpLabel(a));
        return result;
      }
    }
  }

  // Fetch-set shape and the frozen-pointer window. Collect the directory
  // atomicity points and respond records with their event positions.
  struct Point {
    std::size_t pos;
    const DirPointRecord* rec;
  };
  std::vector<Point> points;
  std::vector<const RespondRecord*> responds;
  const auto& events = trace.events();
  for (std::size_t pos = 0; pos < events.size(); ++pos) {
    if (const auto* p = std::get_if<DirPointRecord>(&events[pos].body)) {
      points.push_back({pos, p});
    } else if (const auto* r = std::get_if<RespondRecord>(&events[pos].body)) {
      responds.push_back(r);
    }
  }
  auto find_point = [&points](std::uint64_t op, const std::string& tag)
      -> std::optional<std::size_t> {
    for (const auto& point : points) {
      if (point.rec->op == op && point.rec->tag == tag) return point.pos;
    }
    return std::nullopt;
  };

  for (const auto* r : responds) {
    if (r->is_write || !r->value.has_value()) continue;
    if (r->read_set.size() != cfg.quorum()) {
      fail("read op " + std::to_string(r->op) + " fetched from " +
           std::to_string(r->read_set.size()) + " nodes, expected " +
           std::to_string(cfg.quorum()));
      return result;
    }
    for (auto node : r->read_set) {
      if (node >= cfg.n) {
        fail("read op " + std::to_string(r->op) +
             " names out-of-range node " + std::to_string(node));
        return result;
      }
    }
    if (!r->read_was_frozen || !r->read_from.has_value()) continue;

    const auto posA = find_point(r->op, "reader-announce");
    const auto posS = find_point(r->op, "reader-scan");
    if (!posA || !posS) {
      fail("frozen read op " + std::to_string(r->op) +
           " lacks announce/scan directory records");
      return result;
    }
    const std::string want_ts = TimestampHex(r->ts);
    std::optional<std::size_t> posU;
    std::uint64_t publisher_op = 0;
    for (const auto& point : points) {
      if (!point.rec->is_update || point.rec->tag != "writer-update" ||
          point.rec->client != *r->read_from) {
        continue;
      }
      const auto& detail = point.rec->detail;
      if (!detail.contains("frozenindex") || !detail.contains("frozen")) {
        continue;
      }
      const auto& fidx = detail.at("frozenindex");
      const auto& frozen = detail.at("frozen");
      if (r->client >= fidx.size() || r->client >= frozen.size()) continue;
      if (fidx.at(r->client).get<std::uint64_t>() != r->read_index) continue;
      if (frozen.at(r->client).at("ts").get<std::string>() != want_ts) {
        continue;
      }
      posU = point.pos;
      publisher_op = point.rec->op;
      break;
    }
    if (!posU) {
      fail("frozen read op " + std::to_string(r->op) + " used timestamp " +
           want_ts + " that writer " + std::to_string(*r->read_from) +
           " never published for index " + std::to_string(r->read_index));
      return result;
    }
    if (!(*posA < *posU && *posU < *posS)) {
      fail("frozen pointer for read op " + std::to_string(r->op) +
           " was first published outside the announce-to-scan window");
      return result;
    }
    // The freeze itself was decided at the post-scan of the write that
    // created the timestamp, which must also fall inside the window.
    for (const auto& op : ops) {
      if (!op.is_write || !op.completed || op.ts != r->ts) continue;
      if (auto posD = find_point(op.op, "writer-post-scan")) {
        if (!(*posA < *posD && *posD < *posU)) {
          fail("freeze decision for read op " + std::to_string(r->op) +
               " happened outside the announce-to-publication window");
          return result;
        }
      }
    }
    (void)publisher_op;
  }
  return result;
}

bool TraceVerdict::ok() const {
  return linearizable.ok && amnesic.result.ok && bandwidth.result.ok &&
         fifo.ok && directory.ok && wait_freedom.ok && structure.ok;
}

std::string TraceVerdict::Summary() const {
  std::ostringstream os;
  auto line = [&os](const char* name, const ProbeResult& r,
                    const std::string& extra = "") {
    os << name << ": "
       << (r.skipped ? "skipped" : (r.ok ? "ok" : "FAIL"));
    if (!r.detail.empty()) os << " - " << r.detail;
    if (!extra.empty() && r.ok && !r.skipped) os << " (" << extra << ")";
    os << '\n';
  };
  os << "linearizable: " << (linearizable.ok ? "ok" : "FAIL");
  if (!linearizable.ok) os << " - " << linearizable.violation;
  os << '\n';
  line("amnesic", amnesic.result,
       "max " + std::to_string(amnesic.max_node_fragments) +
           " fragments/node, " + std::to_string(amnesic.max_total_bytes) +
           " <= " + std::to_string(amnesic.byte_bound) + " bytes");
  line("bandwidth", bandwidth.result,
       std::to_string(bandwidth.write_ops_checked) + " writes x " +
           std::to_string(bandwidth.write_data_per_op) + " bytes, reads <= " +
           std::to_string(bandwidth.read_data_bound));
  line("fifo", fifo);
  line("directory", directory);
  line("wait-freedom", wait_freedom);
  line("structure", structure);
  return os.str();
}

TraceVerdict CheckTrace(const TraceLog& trace) {
  if (trace.events().empty()) {
    // An empty trace is vacuously linearizable and probes nothing.
    TraceVerdict vacuous;
    vacuous.linearizable.ok = true;
    for (ProbeResult* p :
         {&vacuous.amnesic.result, &vacuous.bandwidth.result, &vacuous.fifo,
          &vacuous.directory, &vacuous.wait_freedom, &vacuous.structure}) {
      p->skipped = true;
      p->detail = "empty trace";
    }
    return vacuous;
  }
  const MetaRecord* meta = nullptr;
  for (const auto& ev : trace.events()) {
    if (const auto* m = std::get_if<MetaRecord>(&ev.body)) {
      meta = m;
      break;
    }
  }
  if (meta == nullptr) {
    throw ConfigError("trace: missing meta record");
  }
  const Scenario scenario = Scenario::FromJson(meta->scenario);
  const SystemConfig& cfg = scenario.config;

  TraceVerdict verdict;
  verdict.linearizable = CheckLinearizable(History::FromTrace(trace));
  verdict.amnesic = CheckAmnesic(trace, cfg);
  verdict.bandwidth = CheckBandwidth(trace, cfg);
  verdict.fifo = CheckFifo(trace);
  verdict.directory = CheckDirectoryReplay(trace, cfg);
  verdict.wait_freedom = CheckWaitFreedom(trace);
  verdict.structure = CheckStructure(trace, cfg);
  return verdict;
}

}  // namespace ecreg
