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

#include "ecreg/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace ecreg {
namespace {

nlohmann::json ProbeToJson(const ProbeResult& p) {
  nlohmann::json j;
  j["ok"] = p.ok;
  if (p.skipped) j["skipped"] = true;
  if (!p.detail.empty()) j["detail"] = p.detail;
  return j;
}

std::string FirstFailure(const TraceVerdict& v) {
  if (!v.linearizable.ok) return "linearizable: " + v.linearizable.violation;
  const std::pair<const char*, const ProbeResult*> probes[] = {
      {"amnesic", &v.amnesic.result}, {"bandwidth", &v.bandwidth.result},
      {"fifo", &v.fifo},              {"directory", &v.directory},
      {"wait-freedom", &v.wait_freedom}, {"structure", &v.structure},
  };
  for (const auto& [name, p] : probes) {
    if (!p->ok) return std::string(name) + ": " + p->detail;
  }
  return "";
}

}  // namespace

nlohmann::json VerdictToJson(const TraceVerdict& verdict) {
  nlohmann::json j;
  nlohmann::json lin;
  lin["ok"] = verdict.linearizable.ok;
  if (!verdict.linearizable.ok) lin["violation"] = verdict.linearizable.violation;
  j["linearizable"] = std::move(lin);

  nlohmann::json am = ProbeToJson(verdict.amnesic.result);
  am["max_node_fragments"] = verdict.amnesic.max_node_fragments;
  am["max_total_bytes"] = verdict.amnesic.max_total_bytes;
  am["byte_bound"] = verdict.amnesic.byte_bound;
  am["snapshots"] = verdict.amnesic.snapshots;
  j["amnesic"] = std::move(am);

  nlohmann::json bw = ProbeToJson(verdict.bandwidth.result);
  bw["write_ops_checked"] = verdict.bandwidth.write_ops_checked;
  bw["read_ops_checked"] = verdict.bandwidth.read_ops_checked;
  bw["write_data_per_op"] = verdict.bandwidth.write_data_per_op;
  bw["read_data_bound"] = verdict.bandwidth.read_data_bound;
  bw["max_read_data"] = verdict.bandwidth.max_read_data;
  bw["total_metadata_bytes"] = verdict.bandwidth.total_metadata_bytes;
  j["bandwidth"] = std::move(bw);

  j["fifo"] = ProbeToJson(verdict.fifo);
  j["directory"] = ProbeToJson(verdict.directory);
  j["wait_freedom"] = ProbeToJson(verdict.wait_freedom);
  j["structure"] = ProbeToJson(verdict.structure);
  return j;
}

nlohmann::json RunReport::ToJson() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["scenario_digest"] = scenario_digest;
  j["ok"] = ok();
  j["runtime_ms"] = runtime_ms;
  j["steps"] = stats.steps;
  j["drained"] = stats.drained;
  j["hit_step_cap"] = stats.hit_step_cap;
  j["completed_writes"] = stats.completed_writes;
  j["completed_reads"] = stats.completed_reads;
  auto pending = nlohmann::json::array();
  for (const auto& p : stats.pending) {
    pending.push_back({{"client", p.client},
                       {"op", p.op},
                       {"kind", p.is_write ? "write" : "read"},
                       {"crashed", p.crashed}});
  }
  j["pending"] = std::move(pending);
  j["max_fragments_per_node"] = verdict.amnesic.max_node_fragments;
  j["verdicts"] = VerdictToJson(verdict);
  if (!trace_file.empty()) j["trace_file"] = trace_file;
  return j;
}

RunReport MakeRunReport(const Scenario& scenario, std::uint64_t seed,
                        const TraceLog& trace, const RunStats& stats,
                        double runtime_ms) {
  RunReport report;
  report.seed = seed;
  report.scenario_digest = scenario.Digest();
  report.stats = stats;
  report.verdict = CheckTrace(trace);
  report.runtime_ms = runtime_ms;
  return report;
}

bool SummaryReport::ok() const {
  return std::all_of(runs.begin(), runs.end(),
                     [](const RunReport& r) { return r.ok(); });
}

nlohmann::json SummaryReport::ToJson() const {
  nlohmann::json j;
  j["scenario"] = scenario;
  j["scenario_digest"] = scenario_digest;
  auto arr = nlohmann::json::array();
  std::uint64_t failed = 0, writes = 0, reads = 0, max_frag = 0, max_bytes = 0;
  double total_ms = 0.0;
  for (const auto& r : runs) {
    arr.push_back(r.ToJson());
    if (!r.ok()) ++failed;
    writes += r.stats.completed_writes;
    reads += r.stats.completed_reads;
    max_frag = std::max(max_frag, r.verdict.amnesic.max_node_fragments);
    max_bytes = std::max(max_bytes, r.verdict.amnesic.max_total_bytes);
    total_ms += r.runtime_ms;
  }
  j["runs"] = std::move(arr);
  j["aggregate"] = {{"runs", runs.size()},
                    {"failed", failed},
                    {"completed_writes", writes},
                    {"completed_reads", reads},
                    {"max_fragments_per_node", max_frag},
                    {"max_total_bytes", max_bytes},
                    {"total_runtime_ms", total_ms}};
  j["ok"] = ok();
  return j;
}

std::string SummaryReport::HumanTable() const {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-12s %9s %8s %8s %9s  %s\n", "seed",
                "ops(w/r)", "steps", "maxfrag", "ms", "verdict");
  out << line;
  std::uint64_t failed = 0;
  for (const auto& r : runs) {
    const std::string ops = std::to_string(r.stats.completed_writes) + "/" +
                            std::to_string(r.stats.completed_reads);
    std::string verdict = "ok";
    if (!r.ok()) {
      ++failed;
      verdict = "FAIL - " + FirstFailure(r.verdict);
    }
    std::snprintf(line, sizeof(line), "%-12llu %9s %8llu %8llu %9.2f  %s\n",
                  static_cast<unsigned long long>(r.seed), ops.c_str(),
                  static_cast<unsigned long long>(r.stats.steps),
                  static_cast<unsigned long long>(
                      r.verdict.amnesic.max_node_fragments),
                  r.runtime_ms, verdict.c_str());
    out << line;
  }
  out << runs.size() << " run(s), " << failed << " failed\n";
  return out.str();
}

nlohmann::json ExploreReport::ToJson() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["scenario_digest"] = scenario_digest;
  j["ok"] = result.ok;
  if (!result.ok) j["violation"] = result.violation;
  j["leaves"] = result.leaves;
  j["branch_points"] = result.branch_points;
  j["memo_hits"] = result.memo_hits;
  j["deepest_branching"] = result.deepest_branching;
  j["runtime_ms"] = runtime_ms;
  if (!counterexample_file.empty()) {
    j["counterexample_file"] = counterexample_file;
  }
  return j;
}

std::string ExploreReport::Human() const {
  std::ostringstream out;
  out << "exhaustive: " << (result.ok ? "ok" : "FAIL") << " (" << result.leaves
      << " leaves, " << result.branch_points << " branch points, "
      << result.memo_hits << " memo hits, deepest " << result.deepest_branching
      << ")\n";
  if (!result.ok) {
    out << "violation: " << result.violation << "\n";
    if (!counterexample_file.empty()) {
      out << "counterexample: " << counterexample_file << "\n";
    }
  }
  return out.str();
}

}  // namespace ecreg
