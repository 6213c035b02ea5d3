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

#include "ecreg/trace.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "ecreg/util.hpp"

namespace ecreg {
namespace {

using nlohmann::json;

[[noreturn]] void Bad(const std::string& what) {
  throw ConfigError("trace: " + what);
}

std::uint64_t GetU64(const json& j, const char* field) {
  if (!j.is_number_unsigned()) Bad(std::string(field) + ": expected integer");
  return j.get<std::uint64_t>();
}

std::uint64_t OptU64(const json& j, const char* field,
                     std::uint64_t fallback = 0) {
  auto it = j.find(field);
  return it == j.end() ? fallback : GetU64(*it, field);
}

std::string GetString(const json& j, const char* field) {
  if (!j.is_string()) Bad(std::string(field) + ": expected string");
  return j.get<std::string>();
}

bool OptBool(const json& j, const char* field, bool fallback = false) {
  auto it = j.find(field);
  if (it == j.end()) return fallback;
  if (!it->is_boolean()) Bad(std::string(field) + ": expected bool");
  return it->get<bool>();
}

Timestamp ParseTs(const json& j, const char* field) {
  auto ts = TimestampFromHex(GetString(j, field));
  if (!ts) Bad(std::string(field) + ": malformed timestamp");
  return *ts;
}

std::string TruncatedDigestHex(const Digest& d) {
  return ToHex(d.data(), 8);
}

const char* OpKindName(bool is_write) { return is_write ? "write" : "read"; }

bool ParseOpKind(const json& j, const char* field) {
  const std::string kind = GetString(j, field);
  if (kind == "write") return true;
  if (kind == "read") return false;
  Bad(std::string(field) + ": expected 'read' or 'write'");
}

json InvokeToJson(const InvokeRecord& r) {
  json j{{"client", r.client}, {"op", r.op}, {"kind", OpKindName(r.is_write)}};
  if (r.value.has_value()) j["value"] = *r.value;
  return j;
}

InvokeRecord InvokeFromJson(const json& j) {
  InvokeRecord r;
  r.client = static_cast<ClientId>(GetU64(j.at("client"), "client"));
  r.op = GetU64(j.at("op"), "op");
  r.is_write = ParseOpKind(j.at("kind"), "kind");
  if (auto it = j.find("value"); it != j.end())
    r.value = GetString(*it, "value");
  return r;
}

json DeliverToJson(const DeliverRecord& r) {
  json j{{"msg", r.msg},
         {"chseq", r.chseq},
         {"data_bytes", r.data_bytes},
         {"meta_bytes", r.meta_bytes}};
  if (r.op != 0) j["op"] = r.op;
  if (r.ts.has_value()) j["ts"] = TimestampHex(*r.ts);
  if (r.frag_present) j["frag"] = true;
  if (!r.ts_set.empty()) {
    json set = json::array();
    for (const auto& ts : r.ts_set) set.push_back(TimestampHex(ts));
    j["ts_set"] = std::move(set);
  }
  if (r.tag.has_value()) j["tag"] = *r.tag;
  return j;
}

DeliverRecord DeliverFromJson(const json& j) {
  DeliverRecord r;
  r.msg = GetString(j.at("msg"), "msg");
  r.chseq = GetU64(j.at("chseq"), "chseq");
  r.op = OptU64(j, "op");
  r.data_bytes = GetU64(j.at("data_bytes"), "data_bytes");
  r.meta_bytes = GetU64(j.at("meta_bytes"), "meta_bytes");
  if (auto it = j.find("ts"); it != j.end()) r.ts = ParseTs(*it, "ts");
  r.frag_present = OptBool(j, "frag");
  if (auto it = j.find("ts_set"); it != j.end()) {
    if (!it->is_array()) Bad("ts_set: expected array");
    for (const auto& entry : *it) r.ts_set.push_back(ParseTs(entry, "ts_set"));
  }
  if (auto it = j.find("tag"); it != j.end()) r.tag = GetString(*it, "tag");
  return r;
}

json DirPointToJson(const DirPointRecord& r) {
  json j{{"client", r.client},
         {"tag", r.tag},
         {"update", r.is_update},
         {"detail", r.detail}};
  if (r.op != 0) j["op"] = r.op;
  return j;
}

DirPointRecord DirPointFromJson(const json& j) {
  DirPointRecord r;
  r.client = static_cast<ClientId>(GetU64(j.at("client"), "client"));
  r.tag = GetString(j.at("tag"), "tag");
  if (!j.at("update").is_boolean()) Bad("update: expected bool");
  r.is_update = j.at("update").get<bool>();
  r.op = OptU64(j, "op");
  r.detail = j.at("detail");
  return r;
}

json RespondToJson(const RespondRecord& r) {
  json j{{"client", r.client},
         {"op", r.op},
         {"kind", OpKindName(r.is_write)},
         {"ts", TimestampHex(r.ts)}};
  if (r.value.has_value()) j["value"] = *r.value;
  if (r.read_from.has_value()) j["read_from"] = *r.read_from;
  if (r.read_was_frozen) j["frozen"] = true;
  if (!r.is_write) j["read_index"] = r.read_index;
  if (!r.read_set.empty()) j["read_set"] = r.read_set;
  return j;
}

RespondRecord RespondFromJson(const json& j) {
  RespondRecord r;
  r.client = static_cast<ClientId>(GetU64(j.at("client"), "client"));
  r.op = GetU64(j.at("op"), "op");
  r.is_write = ParseOpKind(j.at("kind"), "kind");
  r.ts = ParseTs(j.at("ts"), "ts");
  if (auto it = j.find("value"); it != j.end())
    r.value = GetString(*it, "value");
  if (auto it = j.find("read_from"); it != j.end())
    r.read_from = static_cast<std::uint16_t>(GetU64(*it, "read_from"));
  r.read_was_frozen = OptBool(j, "frozen");
  r.read_index = OptU64(j, "read_index");
  if (auto it = j.find("read_set"); it != j.end()) {
    if (!it->is_array()) Bad("read_set: expected array");
    for (const auto& entry : *it) {
      r.read_set.push_back(
          static_cast<std::uint16_t>(GetU64(entry, "read_set")));
    }
  }
  return r;
}

json SnapshotToJson(const SnapshotRecord& r) {
  json nodes = json::array();
  for (const auto& sample : r.nodes) {
    nodes.push_back({{"id", sample.id},
                     {"fragments", sample.fragments},
                     {"bytes", sample.bytes}});
  }
  return json{{"completed_writes", r.completed_writes},
              {"completed_reads", r.completed_reads},
              {"nodes", std::move(nodes)}};
}

SnapshotRecord SnapshotFromJson(const json& j) {
  SnapshotRecord r;
  r.completed_writes = GetU64(j.at("completed_writes"), "completed_writes");
  r.completed_reads = GetU64(j.at("completed_reads"), "completed_reads");
  const json& nodes = j.at("nodes");
  if (!nodes.is_array()) Bad("nodes: expected array");
  for (const auto& entry : nodes) {
    NodeSample sample;
    sample.id = static_cast<std::uint16_t>(GetU64(entry.at("id"), "id"));
    sample.fragments = GetU64(entry.at("fragments"), "fragments");
    sample.bytes = GetU64(entry.at("bytes"), "bytes");
    r.nodes.push_back(sample);
  }
  return r;
}

json EndToJson(const EndRecord& r) {
  json pending = json::array();
  for (const auto& p : r.pending) {
    pending.push_back({{"client", p.client},
                       {"op", p.op},
                       {"kind", OpKindName(p.is_write)},
                       {"crashed", p.crashed}});
  }
  return json{
      {"drained", r.drained}, {"steps", r.steps}, {"pending", pending}};
}

EndRecord EndFromJson(const json& j) {
  EndRecord r;
  r.drained = OptBool(j, "drained");
  r.steps = GetU64(j.at("steps"), "steps");
  const json& pending = j.at("pending");
  if (!pending.is_array()) Bad("pending: expected array");
  for (const auto& entry : pending) {
    PendingRecord p;
    p.client = static_cast<ClientId>(GetU64(entry.at("client"), "client"));
    p.op = GetU64(entry.at("op"), "op");
    p.is_write = ParseOpKind(entry.at("kind"), "kind");
    p.crashed = OptBool(entry, "crashed");
    r.pending.push_back(p);
  }
  return r;
}

json MetaToJson(const MetaRecord& r) {
  return json{{"scenario", r.scenario},
              {"seed", r.seed},
              {"scenario_digest", r.scenario_digest}};
}

MetaRecord MetaFromJson(const json& j) {
  MetaRecord r;
  r.scenario = j.at("scenario");
  r.seed = GetU64(j.at("seed"), "seed");
  r.scenario_digest = GetString(j.at("scenario_digest"), "scenario_digest");
  return r;
}

}  // namespace

const char* TraceEvent::KindName() const {
  switch (body.index()) {
    case 0: return "meta";
    case 1: return "invoke";
    case 2: return "deliver";
    case 3: return "dir-atomicity-point";
    case 4: return "respond";
    case 5: return "snapshot";
    default: return "end";
  }
}

json TraceEvent::ToJson() const {
  json payload = std::visit(
      [](const auto& r) -> json {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, MetaRecord>) return MetaToJson(r);
        if constexpr (std::is_same_v<T, InvokeRecord>) return InvokeToJson(r);
        if constexpr (std::is_same_v<T, DeliverRecord>)
          return DeliverToJson(r);
        if constexpr (std::is_same_v<T, DirPointRecord>)
          return DirPointToJson(r);
        if constexpr (std::is_same_v<T, RespondRecord>)
          return RespondToJson(r);
        if constexpr (std::is_same_v<T, SnapshotRecord>)
          return SnapshotToJson(r);
        if constexpr (std::is_same_v<T, EndRecord>) return EndToJson(r);
      },
      body);
  return json{{"step", step},
              {"kind", KindName()},
              {"src", src.Label()},
              {"dst", dst.Label()},
              {"payload", std::move(payload)}};
}

TraceEvent TraceEvent::FromJson(const json& j) {
  if (!j.is_object()) Bad("event: expected a JSON object");
  TraceEvent ev;
  try {
    ev.step = GetU64(j.at("step"), "step");
    const std::string kind = GetString(j.at("kind"), "kind");
    auto src = AddrFromLabel(GetString(j.at("src"), "src"));
    auto dst = AddrFromLabel(GetString(j.at("dst"), "dst"));
    if (!src || !dst) Bad("src/dst: malformed address label");
    ev.src = *src;
    ev.dst = *dst;
    const json& payload = j.at("payload");
    if (kind == "meta") {
      ev.body = MetaFromJson(payload);
    } else if (kind == "invoke") {
      ev.body = InvokeFromJson(payload);
    } else if (kind == "deliver") {
      ev.body = DeliverFromJson(payload);
    } else if (kind == "dir-atomicity-point") {
      ev.body = DirPointFromJson(payload);
    } else if (kind == "respond") {
      ev.body = RespondFromJson(payload);
    } else if (kind == "snapshot") {
      ev.body = SnapshotFromJson(payload);
    } else if (kind == "end") {
      ev.body = EndFromJson(payload);
    } else {
      Bad("kind: unknown value '" + kind + "'");
    }
  } catch (const json::exception& e) {
    Bad(e.what());
  }
  return ev;
}

void TraceLog::WriteJsonl(std::ostream& out) const {
  for (const auto& ev : events_) {
    out << ev.ToJson().dump() << '\n';
  }
}

TraceLog TraceLog::FromJsonl(std::istream& in) {
  TraceLog log;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      Bad("line " + std::to_string(lineno) + ": " + e.what());
    }
    try {
      log.Append(TraceEvent::FromJson(j));
    } catch (const ConfigError& e) {
      Bad("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return log;
}

TraceLog TraceLog::FromFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("trace: cannot open '" + path + "'");
  return FromJsonl(in);
}

json TimestampToJson(const Timestamp& ts) { return TimestampHex(ts); }

json PointerToJson(const Pointer& ptr) {
  json hash = json::array();
  for (const auto& digest : ptr.hash) {
    if (digest.has_value()) {
      hash.push_back(TruncatedDigestHex(*digest));
    } else {
      hash.push_back(nullptr);
    }
  }
  return json{{"ts", TimestampHex(ptr.ts)},
              {"set", ptr.set},
              {"hash", std::move(hash)}};
}

json EntryToJson(const MetadataEntry& entry) {
  json frozen = json::array();
  for (const auto& ptr : entry.frozenptrlist) frozen.push_back(PointerToJson(ptr));
  return json{{"writeptr", PointerToJson(entry.writeptr)},
              {"frozen", std::move(frozen)},
              {"frozenindex", entry.frozenindex},
              {"readindex", entry.readindex}};
}

json PartialToJson(const PartialEntry& fields) {
  json j = json::object();
  if (fields.writeptr.has_value()) j["writeptr"] = PointerToJson(*fields.writeptr);
  if (fields.frozenptrlist.has_value()) {
    json frozen = json::array();
    for (const auto& ptr : *fields.frozenptrlist) {
      frozen.push_back(PointerToJson(ptr));
    }
    j["frozen"] = std::move(frozen);
  }
  if (fields.frozenindex.has_value()) j["frozenindex"] = *fields.frozenindex;
  if (fields.readindex.has_value()) j["readindex"] = *fields.readindex;
  return j;
}

json DirSnapshotToJson(const std::vector<MetadataEntry>& snapshot) {
  json j = json::array();
  for (const auto& entry : snapshot) j.push_back(EntryToJson(entry));
  return j;
}

std::string ValueId(const Bytes& value) {
  const Digest digest = HashFragment(value);
  return ToHex(digest.data(), 8);
}

}  // namespace ecreg
