#include "translab/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "translab/bytes.hpp"
#include "translab/errors.hpp"
#include "translab/plan.hpp"
#include "translab/prompts.hpp"
#include "translab/serialize.hpp"

namespace translab {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kGitEpochBase = 1577836800;  // 2020-01-01T00:00:00Z
constexpr std::size_t kRepairStderrLimit = 2000;
constexpr std::size_t kToolResultStdoutLimit = 2000;
constexpr int kFatalConsecutiveErrors = 3;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string truncate_bytes(const std::string& bytes, std::size_t limit) {
    if (bytes.size() <= limit) return bytes;
    return bytes.substr(0, limit) + "\n[truncated]";
}

Sandbox make_sandbox(const RunConfig& config, const RunEnv& env) {
    Sandbox sandbox;
    sandbox.root = env.work_dir;
    sandbox.allow_network = false;
    sandbox.fixture_dir = env.fixture_dir;
    sandbox.command_timeout_s = config.command_timeout_s;
    sandbox.git_epoch = kGitEpochBase + config.seed % 86400;
    return sandbox;
}

// Fresh workspace holding only the legacy source file.
std::string prepare_workspace(const ProgramUnit& program, const RunEnv& env) {
    std::error_code ec;
    fs::remove_all(env.work_dir, ec);
    fs::create_directories(env.work_dir);
    const fs::path source = env.suite_dir / program.source_path;
    if (!fs::is_regular_file(source, ec)) {
        throw HarnessError("legacy source missing: " + source.string());
    }
    const std::string bytes = slurp(source);
    std::ofstream out(env.work_dir / source.filename(), std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    return bytes;
}

std::vector<Message> initial_messages(const ProgramUnit& program, const RunConfig& config,
                                      const std::string& source_bytes) {
    const PromptBundle& bundle = prompt_bundle(config.prompts);
    Message system{Role::SYSTEM, bundle.system_text};
    Message task{Role::USER, render_template(bundle.task_template,
                                             {{"program_id", program.id},
                                              {"entry", program.target_exec.entry},
                                              {"source", source_bytes}})};
    return {std::move(system), std::move(task)};
}

ModelRequest make_request(const RunConfig& config, std::vector<Message> messages) {
    ModelRequest request;
    request.prompt_bundle_id = config.prompts;
    request.messages = std::move(messages);
    request.seed = config.seed;
    return request;
}

ExecutionOutcome outcome_from_tool_result(const ToolResult& result,
                                          const std::map<std::string, std::string>& before,
                                          const fs::path& out_dir) {
    ExecutionOutcome outcome;
    outcome.exit_code = result.exit_code.value_or(-1);
    outcome.stdout_bytes = result.stdout_bytes;
    outcome.stderr_bytes = result.stderr_bytes;
    outcome.timed_out = result.error_code == kErrTimeout;
    std::error_code ec;
    if (fs::is_directory(out_dir, ec)) {
        for (fs::recursive_directory_iterator it(out_dir, ec), end; it != end;
             it.increment(ec)) {
            if (ec) break;
            if (!it->is_regular_file()) continue;
            const std::string rel = it->path().lexically_relative(out_dir).generic_string();
            std::string bytes = slurp(it->path());
            auto prev = before.find(rel);
            if (prev == before.end() || prev->second != bytes) {
                outcome.produced_files[rel] = std::move(bytes);
            }
        }
    }
    return outcome;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) return files;
    for (fs::recursive_directory_iterator it(dir, ec), end; it != end; it.increment(ec)) {
        if (ec) break;
        if (!it->is_regular_file()) continue;
        files[it->path().lexically_relative(dir).generic_string()] = slurp(it->path());
    }
    return files;
}

// Shared by both modes: run every test through the RUN_COMMAND tool so the
// invocations land in the trace, then score against the reference.
EvalResult run_tests_via_tools(const ProgramUnit& program, const RunConfig& config,
                               const Sandbox& base_sandbox, TraceRecorder& recorder,
                               const std::vector<ExecutionOutcome>& reference_outcomes) {
    Sandbox sandbox = base_sandbox;
    sandbox.command_timeout_s = config.test_timeout_s;
    const fs::path out_dir = sandbox.root / program.target_exec.output_dir;

    std::vector<ExecutionOutcome> generated;
    generated.reserve(program.tests.size());
    for (const auto& test : program.tests) {
        std::error_code ec;
        fs::remove_all(out_dir, ec);
        fs::create_directories(out_dir, ec);
        const auto before = snapshot(out_dir);

        std::vector<std::string> argv;
        for (const auto& part : program.target_exec.interpreter) {
            argv.push_back(part == "{entry}" ? program.target_exec.entry : part);
        }
        argv.insert(argv.end(), test.argv.begin(), test.argv.end());
        ToolRequest request;
        request.tool = Tool::RUN_COMMAND;
        request.args = Json{{"argv", argv}};
        if (!test.stdin_payload.empty()) {
            request.args["stdin_b64"] = base64_encode(test.stdin_payload);
        }
        ToolResult result = invoke(request, sandbox, &recorder);
        generated.push_back(outcome_from_tool_result(result, before, out_dir));
    }
    return score_outcomes(program, generated, reference_outcomes, NormalizationPolicy{});
}

std::vector<ExecutionOutcome> reference_outcomes_for(const ProgramUnit& program,
                                                     const RunConfig& config,
                                                     const RunEnv& env) {
    if (env.reference_outcomes) return *env.reference_outcomes;
    const fs::path scratch = env.work_dir.string() + ".ref";
    auto outcomes = execute_reference(program, env.suite_dir, scratch, config.test_timeout_s);
    std::error_code ec;
    fs::remove_all(scratch, ec);
    return outcomes;
}

RunRecord make_record_shell(const ProgramUnit& program, const RunConfig& config,
                            const RunEnv& env) {
    RunRecord record;
    record.run_id = env.run_id;
    record.program_id = program.id;
    record.category = program.category;
    record.config = config;
    return record;
}

void set_error_once(RunRecord& record, ErrorClass error) {
    if (!record.error) record.error = error;
}

}  // namespace

StageOutcome apply_with_fallback(const std::vector<std::string>& strategies,
                                 const std::vector<FileEdit>& edits, const Sandbox& sandbox,
                                 TraceRecorder& recorder, SystemState& state) {
    for (const auto& strategy : strategies) {
        recorder.set_strategy(strategy);
        bool applicable = true;
        if (strategy == kStrategyExactPatch) {
            // Patching requires every target to exist; the probe reads are
            // the trace evidence of the attempt.
            for (const auto& edit : edits) {
                ToolRequest probe{Tool::READ_FILE, Json{{"path", edit.path}}};
                if (!invoke(probe, sandbox, &recorder).ok()) {
                    applicable = false;
                    break;
                }
            }
        } else if (strategy != kStrategyWholeFileRewrite) {
            continue;  // unknown strategy id: never applicable
        }
        if (!applicable) continue;

        bool all_written = true;
        std::vector<std::string> written;
        for (const auto& edit : edits) {
            ToolRequest write{Tool::WRITE_FILE,
                              Json{{"path", edit.path}, {"content_b64", base64_encode(edit.content)}}};
            if (invoke(write, sandbox, &recorder).ok()) {
                written.push_back(edit.path);
            } else {
                all_written = false;
                break;
            }
        }
        if (all_written) {
            for (auto& p : written) state.modified_files.insert(std::move(p));
            recorder.set_strategy(std::nullopt);
            return StageOutcome::PASSED;
        }
    }
    recorder.set_strategy(std::nullopt);
    return StageOutcome::FAILED;
}

namespace {

// One APPLY-style exchange: ask the model for a CODE_EDIT, rejecting other
// kinds, and apply it through the fallback chain. Consumes retry budget.
StageOutcome solicit_and_apply(const std::vector<std::string>& strategies, int max_retries,
                               Backend& backend, const RunConfig& config,
                               std::vector<Message>& messages, const Sandbox& sandbox,
                               TraceRecorder& recorder, SystemState& state, TokenLedger& ledger,
                               std::vector<Json>* transcript) {
    int attempts = 0;
    while (attempts <= max_retries) {
        ModelResponse response =
            complete(backend, make_request(config, messages), ledger, transcript);
        messages.push_back({Role::ASSISTANT, encode_response(response).dump()});
        if (response.kind != ResponseKind::CODE_EDIT) {
            ++attempts;
            messages.push_back(
                {Role::USER,
                 "Response rejected: this pipeline accepts only CODE_EDIT responses. "
                 "Reply with a CODE_EDIT containing the full file content."});
            continue;
        }
        if (apply_with_fallback(strategies, response.edits, sandbox, recorder, state) ==
            StageOutcome::PASSED) {
            return StageOutcome::PASSED;
        }
        ++attempts;
        messages.push_back({Role::USER,
                            "Edit application failed. Reply with a CODE_EDIT using "
                            "workspace-relative paths."});
    }
    return StageOutcome::FAILED;
}

}  // namespace

RunRecord run_deterministic(const ProgramUnit& program, const RunConfig& config,
                            Backend& backend, const RunEnv& env) {
    const auto start = std::chrono::steady_clock::now();
    RunRecord record = make_record_shell(program, config, env);
    TraceRecorder recorder(env.run_id, config_fingerprint(config));
    Sandbox sandbox = make_sandbox(config, env);
    SystemState state;
    state.workspace_root = env.work_dir.string();

    try {
        const std::string source_bytes = prepare_workspace(program, env);
        std::vector<Message> messages = initial_messages(program, config, source_bytes);
        const StagePlan plan = build_stage_plan(config);
        const std::vector<std::string> apply_strategies = plan.stages.front().strategies;

        for (const auto& stage : plan.stages) {
            recorder.set_stage(stage.id);
            if (!evaluate_gate(stage.gate, state, config)) {
                state.stage_outcomes[stage.id] = StageOutcome::SKIPPED;
                recorder.set_stage(std::nullopt);
                continue;
            }
            StageOutcome outcome = StageOutcome::FAILED;
            switch (stage.id) {
                case StageId::APPLY: {
                    outcome = solicit_and_apply(stage.strategies, stage.max_retries, backend,
                                                config, messages, sandbox, recorder, state,
                                                record.ledger, env.transcript);
                    if (outcome == StageOutcome::FAILED) {
                        set_error_once(record, ErrorClass::TOOL_ERROR);
                    }
                    break;
                }
                case StageId::PERSIST: {
                    recorder.set_strategy(stage.strategies.empty()
                                              ? std::optional<std::string>{}
                                              : std::optional<std::string>{stage.strategies[0]});
                    bool ok = invoke({Tool::GIT, Json{{"subcommand", "init"}}}, sandbox, &recorder)
                                  .ok();
                    std::vector<std::string> paths(state.modified_files.begin(),
                                                   state.modified_files.end());
                    ok = invoke({Tool::GIT, Json{{"subcommand", "add"}, {"paths", paths}}},
                                sandbox, &recorder)
                             .ok() &&
                         ok;
                    ok = invoke({Tool::GIT,
                                 Json{{"subcommand", "commit"},
                                      {"message", "apply translation " + program.id}}},
                                sandbox, &recorder)
                             .ok() &&
                         ok;
                    recorder.set_strategy(std::nullopt);
                    outcome = ok ? StageOutcome::PASSED : StageOutcome::FAILED;
                    break;
                }
                case StageId::VALIDATE: {
                    int attempts = 0;
                    while (true) {
                        std::string first_stderr;
                        bool all_ok = true;
                        recorder.set_strategy(stage.strategies.empty()
                                                  ? std::optional<std::string>{}
                                                  : std::optional<std::string>{
                                                        stage.strategies[0]});
                        for (const auto& file : state.modified_files) {
                            if (file.size() < 3 || file.substr(file.size() - 3) != ".py") {
                                continue;
                            }
                            ToolRequest check{
                                Tool::RUN_COMMAND,
                                Json{{"argv",
                                      Json::array({"python3", "-m", "py_compile", file})}}};
                            ToolResult res = invoke(check, sandbox, &recorder);
                            if (!res.ok() || res.exit_code.value_or(-1) != 0) {
                                all_ok = false;
                                if (first_stderr.empty()) first_stderr = res.stderr_bytes;
                            }
                        }
                        recorder.set_strategy(std::nullopt);
                        if (all_ok) {
                            outcome = StageOutcome::PASSED;
                            break;
                        }
                        if (attempts >= stage.max_retries) {
                            outcome = StageOutcome::FAILED;
                            break;
                        }
                        ++attempts;
                        const PromptBundle& bundle = prompt_bundle(config.prompts);
                        messages.push_back(
                            {Role::USER,
                             render_template(
                                 bundle.repair_template,
                                 {{"stage", to_string(stage.id)},
                                  {"stderr", truncate_bytes(first_stderr, kRepairStderrLimit)}})});
                        // One exchange per retry: a rejected kind or failed
                        // apply burns the attempt and re-checks.
                        solicit_and_apply(apply_strategies, 0, backend, config, messages,
                                          sandbox, recorder, state, record.ledger,
                                          env.transcript);
                    }
                    break;
                }
                case StageId::TEST: {
                    recorder.set_strategy(stage.strategies.empty()
                                              ? std::optional<std::string>{}
                                              : std::optional<std::string>{stage.strategies[0]});
                    const fs::path entry = env.work_dir / program.target_exec.entry;
                    std::error_code ec;
                    EvalResult eval;
                    if (!fs::is_regular_file(entry, ec)) {
                        eval.tests_total = static_cast<int>(program.tests.size());
                        eval.ca = Rational(0, static_cast<std::int64_t>(
                                                  std::max<std::size_t>(1, program.tests.size())));
                        eval.error = ErrorClass::COMPILE_FAIL;
                    } else {
                        const auto reference = reference_outcomes_for(program, config, env);
                        eval = run_tests_via_tools(program, config, sandbox, recorder, reference);
                    }
                    recorder.set_strategy(std::nullopt);
                    record.ca = eval.ca;
                    record.tests_total = eval.tests_total;
                    record.tests_passed = eval.tests_passed;
                    if (eval.error) {
                        // A failed VALIDATE means the translation never
                        // parsed; classify the run as a compile failure.
                        auto validate = state.stage_outcomes.find(StageId::VALIDATE);
                        if (validate != state.stage_outcomes.end() &&
                            validate->second == StageOutcome::FAILED) {
                            set_error_once(record, ErrorClass::COMPILE_FAIL);
                        } else {
                            set_error_once(record, *eval.error);
                        }
                    }
                    outcome = (record.ca && *record.ca == Rational(1)) ? StageOutcome::PASSED
                                                                       : StageOutcome::FAILED;
                    break;
                }
            }
            state.stage_outcomes[stage.id] = outcome;
            recorder.set_stage(std::nullopt);
        }
    } catch (const std::exception&) {
        set_error_once(record, ErrorClass::TOOL_ERROR);
    }

    record.stage_outcomes = state.stage_outcomes;
    try {
        record.trace = canonicalize(recorder.raw(), env.work_dir.string());
    } catch (const CanonicalError&) {
        set_error_once(record, ErrorClass::TOOL_ERROR);
    }
    record.successful = is_successful_run(record);
    record.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return record;
}

namespace {

std::string tool_result_feedback(const ToolResult& result) {
    Json j;
    j["status"] = result.ok() ? "OK" : "ERROR";
    if (!result.ok()) j["error_code"] = result.error_code;
    if (result.exit_code) j["exit_code"] = *result.exit_code;
    j["stdout"] = truncate_bytes(result.stdout_bytes, kToolResultStdoutLimit);
    j["stderr"] = truncate_bytes(result.stderr_bytes, kToolResultStdoutLimit);
    return j.dump();
}

}  // namespace

RunRecord run_agentic(const ProgramUnit& program, const RunConfig& config, Backend& backend,
                      const RunEnv& env) {
    const auto start = std::chrono::steady_clock::now();
    RunRecord record = make_record_shell(program, config, env);
    TraceRecorder recorder(env.run_id, config_fingerprint(config));
    Sandbox sandbox = make_sandbox(config, env);
    SystemState state;
    state.workspace_root = env.work_dir.string();

    AgenticSummary summary;
    try {
        const std::string source_bytes = prepare_workspace(program, env);
        std::vector<Message> messages = initial_messages(program, config, source_bytes);

        int consecutive_errors = 0;
        std::string last_failure_key;
        while (true) {
            if (summary.steps >= config.max_agentic_steps) {
                summary.termination_reason = kAgenticStepLimit;
                break;
            }
            ModelResponse response;
            try {
                response =
                    complete(backend, make_request(config, messages), record.ledger,
                             env.transcript);
            } catch (const BackendError&) {
                summary.termination_reason = kAgenticFatalToolError;
                break;
            }
            if (summary.accepted_tokens.total() + response.usage.total() >
                config.token_budget) {
                // The response is rejected outright: none of its effects
                // apply, only the ledger keeps the spend.
                summary.termination_reason = kAgenticTokenBudget;
                break;
            }
            summary.accepted_tokens += response.usage;
            summary.steps += 1;
            messages.push_back({Role::ASSISTANT, encode_response(response).dump()});

            if (response.kind == ResponseKind::FINISH) {
                summary.termination_reason = kAgenticModelFinish;
                break;
            }

            std::string failure_key;
            if (response.kind == ResponseKind::TOOL_ACTION) {
                ToolResult result = invoke(response.tool_action, sandbox, &recorder);
                if (result.ok() && response.tool_action.tool == Tool::WRITE_FILE) {
                    state.modified_files.insert(
                        response.tool_action.args.at("path").get<std::string>());
                }
                if (!result.ok()) {
                    failure_key = to_string(response.tool_action.tool) +
                                  response.tool_action.args.dump();
                }
                messages.push_back({Role::TOOL_RESULT, tool_result_feedback(result)});
            } else {  // CODE_EDIT: each edit routes through WRITE_FILE
                int applied = 0;
                for (const auto& edit : response.edits) {
                    ToolRequest write{Tool::WRITE_FILE,
                                      Json{{"path", edit.path},
                                           {"content_b64", base64_encode(edit.content)}}};
                    ToolResult result = invoke(write, sandbox, &recorder);
                    if (result.ok()) {
                        state.modified_files.insert(edit.path);
                        ++applied;
                    } else if (failure_key.empty()) {
                        failure_key = "WRITE_FILE:" + edit.path;
                    }
                }
                messages.push_back(
                    {Role::TOOL_RESULT,
                     Json{{"status", applied == static_cast<int>(response.edits.size())
                                         ? "OK"
                                         : "ERROR"},
                          {"edits_applied", applied}}
                         .dump()});
            }

            if (failure_key.empty()) {
                consecutive_errors = 0;
                last_failure_key.clear();
            } else if (failure_key == last_failure_key) {
                ++consecutive_errors;
            } else {
                consecutive_errors = 1;
                last_failure_key = failure_key;
            }
            if (consecutive_errors >= kFatalConsecutiveErrors) {
                summary.termination_reason = kAgenticFatalToolError;
                break;
            }
        }

        if (summary.termination_reason == kAgenticModelFinish) {
            const auto reference = reference_outcomes_for(program, config, env);
            EvalResult eval = evaluate_translation(program, env.work_dir, reference,
                                                   NormalizationPolicy{}, config.test_timeout_s);
            record.ca = eval.ca;
            record.tests_total = eval.tests_total;
            record.tests_passed = eval.tests_passed;
            if (eval.error) set_error_once(record, *eval.error);
        } else if (summary.termination_reason == kAgenticFatalToolError) {
            set_error_once(record, ErrorClass::TOOL_ERROR);
        } else {
            set_error_once(record, ErrorClass::BUDGET_EXHAUSTED);
        }
    } catch (const std::exception&) {
        set_error_once(record, ErrorClass::TOOL_ERROR);
        if (summary.termination_reason.empty()) {
            summary.termination_reason = kAgenticFatalToolError;
        }
    }

    record.agentic = summary;
    record.stage_outcomes = state.stage_outcomes;
    try {
        record.trace = canonicalize(recorder.raw(), env.work_dir.string());
    } catch (const CanonicalError&) {
        set_error_once(record, ErrorClass::TOOL_ERROR);
    }
    record.successful = is_successful_run(record);
    record.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return record;
}

RunRecord run_translation(const ProgramUnit& program, const RunConfig& config, Backend& backend,
                          const RunEnv& env) {
    if (config.mode == Mode::DETERMINISTIC) {
        return run_deterministic(program, config, backend, env);
    }
    return run_agentic(program, config, backend, env);
}

}  // namespace translab
