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

#ifndef ECREG_REPORT_HPP_
#define ECREG_REPORT_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "ecreg/checker.hpp"
#include "ecreg/sim.hpp"

namespace ecreg {

// Machine-readable run reports. Every report is a pure function of
// (scenario, seed), so a summary can be regenerated from its inputs.

nlohmann::json VerdictToJson(const TraceVerdict& verdict);

/// Outcome of one simulated run: statistics plus the full verdict.
struct RunReport {
  std::uint64_t seed = 0;
  std::string scenario_digest;
  RunStats stats;
  TraceVerdict verdict;
  double runtime_ms = 0.0;
  std::string trace_file;  // relative path, empty when traces were not kept

  bool ok() const { return verdict.ok(); }
  nlohmann::json ToJson() const;
};

/// Runs every check on the finished run's trace and assembles the report.
RunReport MakeRunReport(const Scenario& scenario, std::uint64_t seed,
                        const TraceLog& trace, const RunStats& stats,
                        double runtime_ms);

/// All runs of one scenario, plus aggregates.
struct SummaryReport {
  nlohmann::json scenario;
  std::string scenario_digest;
  std::vector<RunReport> runs;

  bool ok() const;
  nlohmann::json ToJson() const;

  /// Aligned per-run table plus a one-line total, for terminals.
  std::string HumanTable() const;
};

/// Outcome of one exhaustive exploration.
struct ExploreReport {
  std::uint64_t seed = 0;
  std::string scenario_digest;
  ExhaustiveResult result;
  double runtime_ms = 0.0;
  std::string counterexample_file;  // empty unless a violation was traced

  bool ok() const { return result.ok; }
  nlohmann::json ToJson() const;
  std::string Human() const;
};

}  // namespace ecreg

#endif  // ECREG_REPORT_HPP_
