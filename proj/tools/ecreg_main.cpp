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

// ecreg: deterministic simulator and checker for an erasure-coded,
// Byzantine-tolerant multi-writer register.
//
//   ecreg run --scenario s.json [--seed N] [--runs N] [--out DIR]
//             [--exhaustive] [--fairness-bound N]
//   ecreg check trace.jsonl
//
// Exit codes: 0 all verdicts pass, 1 a verdict failed, 2 bad input.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ecreg/checker.hpp"
#include "ecreg/report.hpp"
#include "ecreg/scenario.hpp"
#include "ecreg/sim.hpp"
#include "ecreg/util.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double MsSince(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

struct RunOptions {
  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::uint32_t runs = 1;
  std::string out_dir;
  bool exhaustive = false;
  std::optional<std::uint64_t> fairness;
};

bool WriteFile(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) {
    std::cerr << "error: cannot write " << path.string() << "\n";
    return false;
  }
  out << body;
  return out.good();
}

void WriteTraceFile(const std::filesystem::path& path,
                    const ecreg::TraceLog& trace) {
  std::ofstream out(path);
  if (out) trace.WriteJsonl(out);
}

int RunExhaustive(const ecreg::Scenario& scenario, const RunOptions& opt,
                  std::uint64_t base_seed) {
  std::vector<ecreg::ExploreReport> reports(opt.runs);
  for (std::uint32_t i = 0; i < opt.runs; ++i) {
    const std::uint64_t seed = base_seed + i;
    const auto start = Clock::now();
    ecreg::ExploreReport& rep = reports[i];
    rep.seed = seed;
    rep.scenario_digest = scenario.Digest();
    rep.result = ecreg::ExploreExhaustive(scenario, seed);
    rep.runtime_ms = MsSince(start);
    if (!rep.result.ok && rep.result.counterexample.has_value() &&
        !opt.out_dir.empty()) {
      const std::string name = "counterexample-" + std::to_string(seed) +
                               ".jsonl";
      WriteTraceFile(std::filesystem::path(opt.out_dir) / name,
                     *rep.result.counterexample);
      rep.counterexample_file = name;
    }
    std::cout << "seed " << seed << ": " << rep.Human();
  }
  bool ok = true;
  auto arr = nlohmann::json::array();
  for (const auto& rep : reports) {
    ok = ok && rep.ok();
    arr.push_back(rep.ToJson());
  }
  if (!opt.out_dir.empty()) {
    nlohmann::json summary;
    summary["scenario"] = scenario.ToJson();
    summary["scenario_digest"] = scenario.Digest();
    summary["explorations"] = std::move(arr);
    summary["ok"] = ok;
    if (!WriteFile(std::filesystem::path(opt.out_dir) / "summary.json",
                   summary.dump(2) + "\n")) {
      return 2;
    }
  }
  return ok ? 0 : 1;
}

int RunBatch(const ecreg::Scenario& scenario, const RunOptions& opt,
             std::uint64_t base_seed) {
  const int runs = static_cast<int>(opt.runs);
  std::vector<ecreg::RunReport> reports(opt.runs);
  std::vector<std::string> hard_errors(opt.runs);

  // Runs are independent; fan them out. All shared state is read-only.
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < runs; ++i) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
    try {
      const auto start = Clock::now();
      ecreg::RunOutput out = ecreg::SimulateRun(scenario, seed);
      ecreg::RunReport rep = ecreg::MakeRunReport(scenario, seed, out.trace,
                                                  out.stats, MsSince(start));
      if (!opt.out_dir.empty()) {
        const std::string name = "trace-" + std::to_string(seed) + ".jsonl";
        WriteTraceFile(std::filesystem::path(opt.out_dir) / name, out.trace);
        rep.trace_file = name;
      }
      reports[i] = std::move(rep);
    } catch (const ecreg::ProtocolViolation& e) {
      // The protocol itself misbehaved; report it as a failed run.
      reports[i].seed = seed;
      reports[i].scenario_digest = scenario.Digest();
      reports[i].verdict.structure.ok = false;
      reports[i].verdict.structure.detail = e.what();
    } catch (const std::exception& e) {
      hard_errors[i] = e.what();
    }
  }

  for (int i = 0; i < runs; ++i) {
    if (!hard_errors[i].empty()) {
      std::cerr << "error: seed "
                << base_seed + static_cast<std::uint64_t>(i) << ": "
                << hard_errors[i] << "\n";
      return 2;
    }
  }

  ecreg::SummaryReport summary;
  summary.scenario = scenario.ToJson();
  summary.scenario_digest = scenario.Digest();
  summary.runs = std::move(reports);
  std::cout << summary.HumanTable();
  if (!opt.out_dir.empty()) {
    if (!WriteFile(std::filesystem::path(opt.out_dir) / "summary.json",
                   summary.ToJson().dump(2) + "\n")) {
      return 2;
    }
  }
  return summary.ok() ? 0 : 1;
}

int CmdRun(const RunOptions& opt) {
  ecreg::Scenario scenario;
  try {
    scenario = ecreg::Scenario::FromFile(opt.scenario_path);
    if (opt.fairness.has_value()) scenario.schedule.fairness = *opt.fairness;
    if (opt.exhaustive) {
      scenario.schedule.policy = ecreg::SchedulePolicy::kExhaustive;
    }
    scenario.Validate();
  } catch (const ecreg::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (!opt.out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(opt.out_dir, ec);
    if (ec) {
      std::cerr << "error: cannot create " << opt.out_dir << ": "
                << ec.message() << "\n";
      return 2;
    }
  }
  const std::uint64_t base_seed = opt.seed.value_or(scenario.schedule.seed);
  if (scenario.schedule.policy == ecreg::SchedulePolicy::kExhaustive) {
    return RunExhaustive(scenario, opt, base_seed);
  }
  return RunBatch(scenario, opt, base_seed);
}

int CmdCheck(const std::string& trace_path) {
  ecreg::TraceVerdict verdict;
  try {
    const ecreg::TraceLog trace = ecreg::TraceLog::FromFile(trace_path);
    verdict = ecreg::CheckTrace(trace);
  } catch (const ecreg::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cerr << verdict.Summary();
  std::cout << ecreg::VerdictToJson(verdict).dump(2) << "\n";
  return verdict.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Deterministic simulator and checker for an erasure-coded, "
      "Byzantine-tolerant multi-writer register"};
  app.require_subcommand(1);

  RunOptions opt;
  CLI::App* run = app.add_subcommand(
      "run", "Simulate a scenario and verify every run");
  run->add_option("--scenario", opt.scenario_path, "Scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--seed", opt.seed,
                  "Base seed; run i uses seed+i (default: the scenario's)");
  run->add_option("--runs", opt.runs, "Number of seeds to run")
      ->check(CLI::PositiveNumber);
  run->add_option("--out", opt.out_dir,
                  "Directory for per-run traces and summary.json");
  run->add_flag("--exhaustive", opt.exhaustive,
                "Explore all schedules instead of sampling one");
  run->add_option("--fairness-bound", opt.fairness,
                  "Override the random policy's fairness bound");

  std::string trace_path;
  CLI::App* check = app.add_subcommand(
      "check", "Re-verify a stored trace and print the verdict");
  check->add_option("trace", trace_path, "Trace JSONL file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (run->parsed()) return CmdRun(opt);
  return CmdCheck(trace_path);
}
