#pragma once

#include <filesystem>
#include <vector>

#include "translab/harness.hpp"
#include "translab/model.hpp"
#include "translab/record.hpp"
#include "translab/sandbox.hpp"
#include "translab/tools.hpp"

namespace translab {

// Per-run wiring the batch driver owns. The orchestrator wipes and recreates
// work_dir; reference_outcomes, when supplied, skip re-executing the
// reference program (it is deterministic, so callers cache it per program).
struct RunEnv {
    std::filesystem::path suite_dir;
    std::filesystem::path work_dir;
    std::filesystem::path fixture_dir;
    std::string run_id;
    std::vector<Json>* transcript = nullptr;
    const std::vector<ExecutionOutcome>* reference_outcomes = nullptr;
};

// Attempts each strategy in order against the given edits; PASSED on the
// first that applies, FAILED when all were tried. Every probe and write is
// recorded with the strategy id that issued it.
StageOutcome apply_with_fallback(const std::vector<std::string>& strategies,
                                 const std::vector<FileEdit>& edits, const Sandbox& sandbox,
                                 TraceRecorder& recorder, SystemState& state);

// Fixed pipeline executor. The model is consulted only for code content;
// any TOOL_ACTION response is rejected and re-prompted. Never throws: every
// failure lands in the returned record.
RunRecord run_deterministic(const ProgramUnit& program, const RunConfig& config,
                            Backend& backend, const RunEnv& env);

// Model-driven loop. The model picks tools, order, and termination; the
// loop only enforces step/token budgets and the fatal-tool-error cutoff.
RunRecord run_agentic(const ProgramUnit& program, const RunConfig& config, Backend& backend,
                      const RunEnv& env);

// Dispatches on config.mode.
RunRecord run_translation(const ProgramUnit& program, const RunConfig& config, Backend& backend,
                          const RunEnv& env);

}  // namespace translab
