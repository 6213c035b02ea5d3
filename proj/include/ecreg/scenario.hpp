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

#ifndef ECREG_SCENARIO_HPP_
#define ECREG_SCENARIO_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ecreg/adversary.hpp"
#include "ecreg/types.hpp"

namespace ecreg {

enum class SchedulePolicy : std::uint8_t { kRandom, kScripted, kExhaustive };

const char* SchedulePolicyName(SchedulePolicy p);
std::optional<SchedulePolicy> SchedulePolicyFromName(const std::string& name);

struct ScheduleSpec {
  SchedulePolicy policy = SchedulePolicy::kRandom;
  std::uint64_t seed = 1;
  // Random policy: no enabled event waits more than this many steps.
  std::uint64_t fairness = 64;
  // Exhaustive policy: number of branch points explored per path before the
  // remainder of the path is forced to the first enabled event.
  std::uint32_t depth = 12;
  // Scripted policy: explicit event labels; once exhausted the run continues
  // with the first enabled event at every step.
  std::vector<std::string> script;

  friend bool operator==(const ScheduleSpec&, const ScheduleSpec&) = default;
};

struct AdversarySpec {
  // One entry per data node; defaults to honest everywhere.
  std::vector<Strategy> node_strategies;
  // Client id -> step at or after which the client halts.
  std::map<std::uint16_t, std::uint64_t> client_crashes;

  friend bool operator==(const AdversarySpec&, const AdversarySpec&) = default;
};

struct WorkloadSpec {
  double mix = 0.5;       // fraction of reads when ops are drawn randomly
  std::uint32_t ops = 4;  // ops per client when no scripts are given
  // Optional explicit per-client op lists ("write" / "read"); overrides
  // mix/ops when present. Must have one list per client.
  std::optional<std::vector<std::vector<std::string>>> scripts;

  friend bool operator==(const WorkloadSpec&, const WorkloadSpec&) = default;
};

/// A full simulation scenario: system dimensions, scheduling policy, fault
/// plan, and workload. Loadable from JSON; Validate reports offending fields
/// by name.
struct Scenario {
  SystemConfig config;
  ScheduleSpec schedule;
  AdversarySpec adversary;
  WorkloadSpec workload;
  bool allow_insufficient_nodes = false;
  std::uint64_t max_steps = 2'000'000;

  static Scenario FromJson(const nlohmann::json& j);
  static Scenario FromFile(const std::string& path);
  nlohmann::json ToJson() const;
  void Validate() const;

  // SHA-256 hex of the canonical JSON form; identifies the scenario in
  // reports and traces.
  std::string Digest() const;

  std::uint32_t ByzantineCount() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Per-client operation plan drawn from the workload settings. Entry [c][i]
/// is true when client c's i-th operation is a write. Deterministic in the
/// seed.
std::vector<std::vector<bool>> GenerateWorkload(const Scenario& scenario,
                                                std::uint64_t seed);

/// Deterministic, per-run-unique register value for client c's op_index-th
/// write. Embeds (client, op index) and seed-derived filler, padded to ell.
Bytes MakeWriteValue(const SystemConfig& config, std::uint64_t seed,
                     std::uint16_t client, std::uint32_t op_index);

}  // namespace ecreg

#endif  // ECREG_SCENARIO_HPP_
