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

#include "ecreg/scenario.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ecreg/util.hpp"

namespace ecreg {
namespace {

using nlohmann::json;

[[noreturn]] void Fail(const std::string& field, const std::string& what) {
  throw ConfigError(field + ": " + what);
}

const json& Require(const json& j, const std::string& ctx,
                    const std::string& key) {
  auto it = j.find(key);
  if (it == j.end()) Fail(ctx.empty() ? key : ctx + "." + key, "missing");
  return *it;
}

std::uint64_t GetU64(const json& j, const std::string& field) {
  if (!j.is_number_unsigned() &&
      !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    Fail(field, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

double GetNumber(const json& j, const std::string& field) {
  if (!j.is_number()) Fail(field, "expected a number");
  return j.get<double>();
}

std::string GetString(const json& j, const std::string& field) {
  if (!j.is_string()) Fail(field, "expected a string");
  return j.get<std::string>();
}

void RejectUnknownKeys(const json& j, const std::string& ctx,
                       std::initializer_list<const char*> known) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) Fail(ctx.empty() ? it.key() : ctx + "." + it.key(),
                  "unknown field");
  }
}

}  // namespace

const char* SchedulePolicyName(SchedulePolicy p) {
  switch (p) {
    case SchedulePolicy::kRandom:
      return "random";
    case SchedulePolicy::kScripted:
      return "scripted";
    case SchedulePolicy::kExhaustive:
      return "exhaustive";
  }
  return "unknown";
}

std::optional<SchedulePolicy> SchedulePolicyFromName(const std::string& name) {
  if (name == "random") return SchedulePolicy::kRandom;
  if (name == "scripted") return SchedulePolicy::kScripted;
  if (name == "exhaustive") return SchedulePolicy::kExhaustive;
  return std::nullopt;
}

Scenario Scenario::FromJson(const json& j) {
  if (!j.is_object()) Fail("scenario", "expected a JSON object");
  RejectUnknownKeys(j, "",
                    {"n", "t", "k", "m", "ell", "schedule", "adversary",
                     "workload", "allow_insufficient_nodes", "max_steps"});
  Scenario s;
  s.config.n = static_cast<std::uint16_t>(GetU64(Require(j, "", "n"), "n"));
  s.config.t = static_cast<std::uint16_t>(GetU64(Require(j, "", "t"), "t"));
  s.config.k = static_cast<std::uint16_t>(GetU64(Require(j, "", "k"), "k"));
  s.config.m = static_cast<std::uint16_t>(GetU64(Require(j, "", "m"), "m"));
  s.config.ell =
      static_cast<std::uint32_t>(GetU64(Require(j, "", "ell"), "ell"));
  if (auto it = j.find("allow_insufficient_nodes"); it != j.end()) {
    if (!it->is_boolean()) Fail("allow_insufficient_nodes", "expected a bool");
    s.allow_insufficient_nodes = it->get<bool>();
  }
  if (auto it = j.find("max_steps"); it != j.end()) {
    s.max_steps = GetU64(*it, "max_steps");
  }

  if (auto it = j.find("schedule"); it != j.end()) {
    const json& sched = *it;
    if (!sched.is_object()) Fail("schedule", "expected a JSON object");
    RejectUnknownKeys(sched, "schedule",
                      {"policy", "seed", "fairness", "depth", "script"});
    if (auto f = sched.find("policy"); f != sched.end()) {
      const std::string name = GetString(*f, "schedule.policy");
      auto policy = SchedulePolicyFromName(name);
      if (!policy) Fail("schedule.policy", "unknown value '" + name + "'");
      s.schedule.policy = *policy;
    }
    if (auto f = sched.find("seed"); f != sched.end())
      s.schedule.seed = GetU64(*f, "schedule.seed");
    if (auto f = sched.find("fairness"); f != sched.end())
      s.schedule.fairness = GetU64(*f, "schedule.fairness");
    if (auto f = sched.find("depth"); f != sched.end())
      s.schedule.depth =
          static_cast<std::uint32_t>(GetU64(*f, "schedule.depth"));
    if (auto f = sched.find("script"); f != sched.end()) {
      if (!f->is_array()) Fail("schedule.script", "expected an array");
      for (std::size_t i = 0; i < f->size(); ++i) {
        s.schedule.script.push_back(GetString(
            (*f)[i], "schedule.script[" + std::to_string(i) + "]"));
      }
    }
  }

  s.adversary.node_strategies.assign(s.config.n, Strategy::kHonest);
  if (auto it = j.find("adversary"); it != j.end()) {
    const json& adv = *it;
    if (!adv.is_object()) Fail("adversary", "expected a JSON object");
    RejectUnknownKeys(adv, "adversary", {"nodes", "client_crashes"});
    if (auto f = adv.find("nodes"); f != adv.end()) {
      if (!f->is_array()) Fail("adversary.nodes", "expected an array");
      for (std::size_t i = 0; i < f->size(); ++i) {
        const std::string ctx = "adversary.nodes[" + std::to_string(i) + "]";
        const json& entry = (*f)[i];
        if (!entry.is_object()) Fail(ctx, "expected a JSON object");
        RejectUnknownKeys(entry, ctx, {"id", "strategy"});
        const std::uint64_t id = GetU64(Require(entry, ctx, "id"), ctx + ".id");
        if (id >= s.config.n)
          Fail(ctx + ".id", "node id " + std::to_string(id) +
                                " out of range (n=" +
                                std::to_string(s.config.n) + ")");
        const std::string name =
            GetString(Require(entry, ctx, "strategy"), ctx + ".strategy");
        auto strat = StrategyFromName(name);
        if (!strat) Fail(ctx + ".strategy", "unknown value '" + name + "'");
        s.adversary.node_strategies[id] = *strat;
      }
    }
    if (auto f = adv.find("client_crashes"); f != adv.end()) {
      if (!f->is_object())
        Fail("adversary.client_crashes", "expected an object");
      for (auto it2 = f->begin(); it2 != f->end(); ++it2) {
        const std::string ctx = "adversary.client_crashes." + it2.key();
        std::size_t pos = 0;
        unsigned long id = 0;
        try {
          id = std::stoul(it2.key(), &pos);
        } catch (const std::exception&) {
          Fail(ctx, "expected a numeric client id key");
        }
        if (pos != it2.key().size()) Fail(ctx, "expected a numeric client id key");
        s.adversary.client_crashes[static_cast<std::uint16_t>(id)] =
            GetU64(*it2, ctx);
      }
    }
  }

  if (auto it = j.find("workload"); it != j.end()) {
    const json& w = *it;
    if (!w.is_object()) Fail("workload", "expected a JSON object");
    RejectUnknownKeys(w, "workload", {"mix", "ops", "scripts"});
    if (auto f = w.find("mix"); f != w.end())
      s.workload.mix = GetNumber(*f, "workload.mix");
    if (auto f = w.find("ops"); f != w.end())
      s.workload.ops = static_cast<std::uint32_t>(GetU64(*f, "workload.ops"));
    if (auto f = w.find("scripts"); f != w.end()) {
      if (!f->is_array()) Fail("workload.scripts", "expected an array");
      std::vector<std::vector<std::string>> scripts;
      for (std::size_t c = 0; c < f->size(); ++c) {
        const std::string ctx = "workload.scripts[" + std::to_string(c) + "]";
        const json& list = (*f)[c];
        if (!list.is_array()) Fail(ctx, "expected an array");
        std::vector<std::string> ops;
        for (std::size_t i = 0; i < list.size(); ++i) {
          ops.push_back(
              GetString(list[i], ctx + "[" + std::to_string(i) + "]"));
        }
        scripts.push_back(std::move(ops));
      }
      s.workload.scripts = std::move(scripts);
    }
  }

  s.Validate();
  return s;
}

Scenario Scenario::FromFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario: " + std::string(e.what()));
  }
  return FromJson(j);
}

nlohmann::json Scenario::ToJson() const {
  json nodes = json::array();
  for (std::uint16_t i = 0; i < adversary.node_strategies.size(); ++i) {
    if (adversary.node_strategies[i] == Strategy::kHonest) continue;
    nodes.push_back(
        {{"id", i}, {"strategy", StrategyName(adversary.node_strategies[i])}});
  }
  json crashes = json::object();
  for (const auto& [client, step] : adversary.client_crashes) {
    crashes[std::to_string(client)] = step;
  }
  json workload = {{"mix", this->workload.mix}, {"ops", this->workload.ops}};
  if (this->workload.scripts.has_value()) {
    workload["scripts"] = *this->workload.scripts;
  }
  return json{
      {"n", config.n},
      {"t", config.t},
      {"k", config.k},
      {"m", config.m},
      {"ell", config.ell},
      {"schedule",
       {{"policy", SchedulePolicyName(schedule.policy)},
        {"seed", schedule.seed},
        {"fairness", schedule.fairness},
        {"depth", schedule.depth},
        {"script", schedule.script}}},
      {"adversary", {{"nodes", nodes}, {"client_crashes", crashes}}},
      {"workload", workload},
      {"allow_insufficient_nodes", allow_insufficient_nodes},
      {"max_steps", max_steps},
  };
}

std::uint32_t Scenario::ByzantineCount() const {
  std::uint32_t count = 0;
  for (Strategy s : adversary.node_strategies) {
    if (s != Strategy::kHonest) ++count;
  }
  return count;
}

void Scenario::Validate() const {
  config.Validate(allow_insufficient_nodes);
  if (adversary.node_strategies.size() != config.n) {
    Fail("adversary.nodes", "expected one strategy slot per node");
  }
  if (!allow_insufficient_nodes && ByzantineCount() > config.t) {
    Fail("adversary.nodes",
         "more than t=" + std::to_string(config.t) + " faulty nodes");
  }
  for (const auto& [client, step] : adversary.client_crashes) {
    (void)step;
    if (client >= config.m) {
      Fail("adversary.client_crashes." + std::to_string(client),
           "client id out of range (m=" + std::to_string(config.m) + ")");
    }
  }
  if (schedule.policy == SchedulePolicy::kExhaustive &&
      !adversary.client_crashes.empty()) {
    Fail("schedule.policy",
         "exhaustive exploration does not support client crashes");
  }
  if (schedule.fairness < 1) Fail("schedule.fairness", "must be at least 1");
  if (workload.mix < 0.0 || workload.mix > 1.0) {
    Fail("workload.mix", "must lie in [0, 1]");
  }
  std::uint64_t max_client_ops = workload.ops;
  if (workload.scripts.has_value()) {
    if (workload.scripts->size() != config.m) {
      Fail("workload.scripts",
           "expected " + std::to_string(config.m) + " client op lists, got " +
               std::to_string(workload.scripts->size()));
    }
    max_client_ops = 0;
    for (std::size_t c = 0; c < workload.scripts->size(); ++c) {
      const auto& ops = (*workload.scripts)[c];
      max_client_ops = std::max<std::uint64_t>(max_client_ops, ops.size());
      for (std::size_t i = 0; i < ops.size(); ++i) {
        if (ops[i] != "write" && ops[i] != "read") {
          Fail("workload.scripts[" + std::to_string(c) + "][" +
                   std::to_string(i) + "]",
               "expected 'read' or 'write', got '" + ops[i] + "'");
        }
      }
    }
  }
  // Write values embed a 4-byte (client, op) tag; a tiny register can only
  // keep values collision-free for one byte's worth of (client, op) pairs.
  if (config.ell < 4 && (config.m > 16 || max_client_ops > 16)) {
    Fail("ell",
         "too small for distinct written values "
         "(ell < 4 requires m <= 16 and at most 16 ops per client)");
  }
  if (max_steps < 1) Fail("max_steps", "must be at least 1");
}

std::string Scenario::Digest() const {
  const std::string dump = ToJson().dump();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int md_len = 0;
  if (EVP_Digest(dump.data(), dump.size(), md, &md_len, EVP_sha256(),
                 nullptr) != 1 ||
      md_len != 32) {
    throw std::runtime_error("sha256 failure");
  }
  return ToHex(md, md_len);
}

std::vector<std::vector<bool>> GenerateWorkload(const Scenario& scenario,
                                                std::uint64_t seed) {
  std::vector<std::vector<bool>> plan(scenario.config.m);
  if (scenario.workload.scripts.has_value()) {
    for (std::size_t c = 0; c < plan.size(); ++c) {
      for (const std::string& op : (*scenario.workload.scripts)[c]) {
        plan[c].push_back(op == "write");
      }
    }
    return plan;
  }
  Rng rng(seed ^ 0x776f726b6c6f6164ULL);  // distinct stream per purpose
  for (std::uint16_t c = 0; c < scenario.config.m; ++c) {
    for (std::uint32_t i = 0; i < scenario.workload.ops; ++i) {
      plan[c].push_back(!rng.Chance(scenario.workload.mix));
    }
  }
  // A history with no writes exercises nothing; force one if the draw came
  // out all reads and the op budget allows it.
  bool any_write = false;
  for (const auto& ops : plan) {
    for (bool w : ops) any_write = any_write || w;
  }
  if (!any_write && !plan.empty() && !plan[0].empty()) plan[0][0] = true;
  return plan;
}

Bytes MakeWriteValue(const SystemConfig& config, std::uint64_t seed,
                     std::uint16_t client, std::uint32_t op_index) {
  Bytes value(config.ell);
  std::uint64_t state = seed ^ (0x56414c5545ULL) ^
                        (static_cast<std::uint64_t>(client) << 32) ^ op_index;
  for (auto& byte : value) {
    byte = static_cast<std::uint8_t>(SplitMix64(state));
  }
  if (config.ell >= 4) {
    value[0] = static_cast<std::uint8_t>(client >> 8);
    value[1] = static_cast<std::uint8_t>(client);
    value[2] = static_cast<std::uint8_t>(op_index >> 8);
    value[3] = static_cast<std::uint8_t>(op_index);
  } else {
    // Validate() caps m and per-client ops at 16 for ell < 4, so a single
    // byte tags the pair injectively.
    value[0] = static_cast<std::uint8_t>((client << 4) | (op_index & 0xF));
  }
  return value;
}

}  // namespace ecreg
