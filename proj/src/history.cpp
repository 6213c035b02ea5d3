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

#include "ecreg/history.hpp"

#include <map>

#include "ecreg/util.hpp"

namespace ecreg {
namespace {

[[noreturn]] void Malformed(const std::string& what) {
  throw ConfigError("history: " + what);
}

}  // namespace

History History::FromTrace(const TraceLog& trace) {
  History h;
  std::map<std::uint64_t, std::size_t> by_op;
  std::map<ClientId, std::uint64_t> open_op;  // client -> running op id
  std::vector<PendingRecord> pending;
  bool saw_end = false;

  const auto& events = trace.events();
  for (std::size_t pos = 0; pos < events.size(); ++pos) {
    const TraceEvent& ev = events[pos];
    if (const auto* inv = std::get_if<InvokeRecord>(&ev.body)) {
      if (inv->op == 0) Malformed("op id 0 is reserved");
      if (by_op.count(inv->op)) {
        Malformed("duplicate op id " + std::to_string(inv->op));
      }
      if (auto it = open_op.find(inv->client); it != open_op.end()) {
        Malformed("client " + std::to_string(inv->client) +
                  " invoked op " + std::to_string(inv->op) +
                  " while op " + std::to_string(it->second) + " is open");
      }
      if (inv->is_write && !inv->value.has_value()) {
        Malformed("write invoke without a value id");
      }
      Operation op;
      op.client = inv->client;
      op.op = inv->op;
      op.is_write = inv->is_write;
      if (inv->is_write) op.value = inv->value;
      op.inv_pos = pos;
      by_op[inv->op] = h.ops.size();
      open_op[inv->client] = inv->op;
      h.ops.push_back(std::move(op));
      continue;
    }
    if (const auto* res = std::get_if<RespondRecord>(&ev.body)) {
      auto it = by_op.find(res->op);
      if (it == by_op.end()) {
        Malformed("respond for unknown op " + std::to_string(res->op));
      }
      Operation& op = h.ops[it->second];
      if (op.completed) {
        Malformed("second respond for op " + std::to_string(res->op));
      }
      if (op.client != res->client || op.is_write != res->is_write) {
        Malformed("respond does not match invoke of op " +
                  std::to_string(res->op));
      }
      op.completed = true;
      op.res_pos = pos;
      op.ts = res->ts;
      if (!op.is_write) op.value = res->value;
      open_op.erase(op.client);
      continue;
    }
    if (const auto* end = std::get_if<EndRecord>(&ev.body)) {
      saw_end = true;
      pending = end->pending;
    }
  }

  if (saw_end) {
    for (const auto& rec : pending) {
      auto it = by_op.find(rec.op);
      if (it == by_op.end()) continue;
      h.ops[it->second].crashed = rec.crashed;
    }
  }
  return h;
}

}  // namespace ecreg
