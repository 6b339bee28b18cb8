#pragma once

#include "translab/domain.hpp"

namespace translab {

// Fixed apply strategies, attempted in this order and never reordered.
inline constexpr const char* kStrategyExactPatch = "exact_patch";
inline constexpr const char* kStrategyWholeFileRewrite = "whole_file_rewrite";

// Builds the fixed deterministic pipeline:
//   APPLY    gate ALWAYS
//   PERSIST  gate FLAG_ENABLED(enable_persist) AND FILES_MODIFIED
//   VALIDATE gate FLAG_ENABLED(enable_validate)
//   TEST     gate FLAG_ENABLED(enable_test)
// Pure: structurally equal configs produce structurally equal plans.
StagePlan build_stage_plan(const RunConfig& config);

// Pure predicate evaluation over (state, config). FLAG_ENABLED on a flag the
// config does not declare throws ConfigError. No randomness, no clock reads.
bool evaluate_gate(const GatePredicate& gate, const SystemState& state, const RunConfig& config);

}  // namespace translab
