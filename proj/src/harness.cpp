#include "translab/harness.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "translab/bytes.hpp"
#include "translab/errors.hpp"
#include "translab/sandbox.hpp"
#include "translab/sha256.hpp"
#include "translab/subprocess.hpp"

namespace translab {

namespace fs = std::filesystem;

std::string normalize_text(const std::string& bytes, const NormalizationPolicy& policy) {
    std::string text = bytes;
    if (policy.normalize_newlines) {
        std::string out;
        out.reserve(text.size());
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (text[i] == '\r' && i + 1 < text.size() && text[i + 1] == '\n') continue;
            out += text[i] == '\r' ? '\n' : text[i];
        }
        text = std::move(out);
    }
    if (policy.strip_trailing_ws) {
        std::string out;
        out.reserve(text.size());
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t nl = text.find('\n', start);
            std::size_t end = nl == std::string::npos ? text.size() : nl;
            std::size_t trimmed = end;
            while (trimmed > start && (text[trimmed - 1] == ' ' || text[trimmed - 1] == '\t')) {
                --trimmed;
            }
            out.append(text, start, trimmed - start);
            if (nl == std::string::npos) break;
            out += '\n';
            start = nl + 1;
        }
        text = std::move(out);
    }
    if (policy.strip_trailing_blank_lines) {
        // Trailing newlines, then whole whitespace-only lines; pure-blank
        // input normalizes to empty.
        while (!text.empty() && text.back() == '\n') text.pop_back();
        std::size_t end = text.size();
        while (end > 0) {
            std::size_t line_start = text.rfind('\n', end - 1);
            std::size_t begin = line_start == std::string::npos ? 0 : line_start + 1;
            bool blank = true;
            for (std::size_t i = begin; i < end; ++i) {
                if (text[i] != ' ' && text[i] != '\t') {
                    blank = false;
                    break;
                }
            }
            if (!blank) break;
            end = begin == 0 ? 0 : begin - 1;
        }
        text.resize(end);
    }
    return text;
}

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::map<std::string, std::string> snapshot_dir(const fs::path& dir) {
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

std::vector<std::string> build_argv(const ExecSpec& spec, const TestCase& test) {
    std::vector<std::string> argv;
    for (const auto& part : spec.interpreter) {
        if (part == "{entry}") {
            argv.push_back(spec.entry);
        } else {
            argv.push_back(part);
        }
    }
    argv.insert(argv.end(), test.argv.begin(), test.argv.end());
    return argv;
}

}  // namespace

ExecutionOutcome execute_program(const ExecSpec& spec, const TestCase& test,
                                 const fs::path& workdir, double timeout_s) {
    const fs::path entry = workdir / spec.entry;
    std::error_code ec;
    if (!fs::is_regular_file(entry, ec)) {
        throw HarnessError("entry file missing: " + entry.string());
    }
    const fs::path out_dir = workdir / spec.output_dir;
    fs::create_directories(out_dir, ec);
    const auto before = snapshot_dir(out_dir);

    SubprocessSpec sub;
    sub.argv = build_argv(spec, test);
    Sandbox resolver;
    resolver.root = workdir;
    resolver.command_allowlist = {sub.argv.front()};
    if (auto abs = resolve_command(resolver, sub.argv.front())) {
        sub.argv.front() = *abs;
    } else {
        throw HarnessError("interpreter not found: " + sub.argv.front());
    }
    sub.cwd = workdir.string();
    sub.stdin_bytes = test.stdin_payload;
    sub.env = sandbox_env(resolver);
    sub.timeout_s = timeout_s;
    SubprocessResult result = run_subprocess(sub);

    ExecutionOutcome outcome;
    outcome.exit_code = result.exit_code;
    outcome.stdout_bytes = std::move(result.stdout_bytes);
    outcome.stderr_bytes = std::move(result.stderr_bytes);
    outcome.timed_out = result.timed_out;
    for (auto& [path, bytes] : snapshot_dir(out_dir)) {
        auto it = before.find(path);
        if (it == before.end() || it->second != bytes) {
            outcome.produced_files[path] = std::move(bytes);
        }
    }
    return outcome;
}

bool outcomes_equal(const ExecutionOutcome& a, const ExecutionOutcome& b,
                    const NormalizationPolicy& policy) {
    if (a.timed_out || b.timed_out) return false;
    if (a.exit_code != b.exit_code) return false;
    if (normalize_text(a.stdout_bytes, policy) != normalize_text(b.stdout_bytes, policy)) {
        return false;
    }
    if (policy.compare_stderr &&
        normalize_text(a.stderr_bytes, policy) != normalize_text(b.stderr_bytes, policy)) {
        return false;
    }
    if (a.produced_files.size() != b.produced_files.size()) return false;
    for (const auto& [path, bytes] : a.produced_files) {
        auto it = b.produced_files.find(path);
        if (it == b.produced_files.end()) return false;
        if (normalize_text(bytes, policy) != normalize_text(it->second, policy)) return false;
    }
    return true;
}

Rational computational_accuracy(const std::vector<ExecutionOutcome>& generated,
                                const std::vector<ExecutionOutcome>& reference,
                                const NormalizationPolicy& policy) {
    if (generated.empty() || generated.size() != reference.size()) {
        throw HarnessError("computational_accuracy requires equal non-empty outcome vectors");
    }
    std::int64_t equal = 0;
    for (std::size_t i = 0; i < generated.size(); ++i) {
        if (outcomes_equal(generated[i], reference[i], policy)) ++equal;
    }
    return Rational(equal, static_cast<std::int64_t>(generated.size()));
}

Json encode_outcome(const ExecutionOutcome& o) {
    Json files = Json::array();
    for (const auto& [path, bytes] : o.produced_files) {
        files.push_back(Json{{"path", path}, {"bytes_b64", base64_encode(bytes)}});
    }
    Json j;
    j["exit_code"] = o.exit_code;
    j["stdout_b64"] = base64_encode(o.stdout_bytes);
    j["stderr_b64"] = base64_encode(o.stderr_bytes);
    j["produced_files"] = std::move(files);
    j["timed_out"] = o.timed_out;
    return j;
}

ExecutionOutcome decode_outcome(const Json& j) {
    ExecutionOutcome o;
    o.exit_code = j.at("exit_code").get<int>();
    o.stdout_bytes = base64_decode(j.at("stdout_b64").get<std::string>());
    o.stderr_bytes = base64_decode(j.at("stderr_b64").get<std::string>());
    for (const auto& f : j.at("produced_files")) {
        o.produced_files[f.at("path").get<std::string>()] =
            base64_decode(f.at("bytes_b64").get<std::string>());
    }
    o.timed_out = j.at("timed_out").get<bool>();
    return o;
}

std::vector<ExecutionOutcome> execute_reference(const ProgramUnit& program,
                                                const fs::path& suite_dir,
                                                const fs::path& scratch_dir,
                                                double timeout_s) {
    const fs::path reference = suite_dir / program.reference_path;
    std::error_code ec;
    if (!fs::is_regular_file(reference, ec)) {
        throw HarnessError("reference program missing: " + reference.string());
    }
    fs::create_directories(scratch_dir, ec);
    ExecSpec spec = program.reference_exec;
    if (spec.entry.empty()) spec.entry = reference.filename().string();
    fs::copy_file(reference, scratch_dir / spec.entry, fs::copy_options::overwrite_existing);

    std::vector<ExecutionOutcome> outcomes;
    outcomes.reserve(program.tests.size());
    for (const auto& test : program.tests) {
        // Each test starts from a clean output directory.
        fs::remove_all(scratch_dir / spec.output_dir, ec);
        outcomes.push_back(execute_program(spec, test, scratch_dir, timeout_s));
    }
    return outcomes;
}

EvalResult score_outcomes(const ProgramUnit& program,
                          const std::vector<ExecutionOutcome>& generated,
                          const std::vector<ExecutionOutcome>& reference_outcomes,
                          const NormalizationPolicy& policy) {
    EvalResult result;
    result.tests_total = static_cast<int>(program.tests.size());
    if (generated.size() != reference_outcomes.size()) {
        throw HarnessError("outcome vectors disagree with the test list");
    }
    result.ca = computational_accuracy(generated, reference_outcomes, policy);
    for (std::size_t i = 0; i < generated.size(); ++i) {
        if (outcomes_equal(generated[i], reference_outcomes[i], policy)) ++result.tests_passed;
    }
    if (*result.ca == Rational(1)) return result;

    bool any_timeout = false;
    bool any_runtime = false;
    for (std::size_t i = 0; i < generated.size(); ++i) {
        if (generated[i].timed_out) any_timeout = true;
        if (!generated[i].timed_out && generated[i].exit_code != 0 &&
            reference_outcomes[i].exit_code == 0) {
            any_runtime = true;
        }
    }
    if (any_timeout) {
        result.error = ErrorClass::TIMEOUT;
    } else if (any_runtime) {
        result.error = ErrorClass::RUNTIME_ERROR;
    } else {
        result.error = ErrorClass::TEST_FAIL;
    }
    return result;
}

EvalResult evaluate_translation(const ProgramUnit& program, const fs::path& generated_dir,
                                const std::vector<ExecutionOutcome>& reference_outcomes,
                                const NormalizationPolicy& policy, double timeout_s) {
    EvalResult result;
    result.tests_total = static_cast<int>(program.tests.size());
    if (program.tests.empty()) {
        throw HarnessError("program has no tests: " + program.id);
    }
    const fs::path entry = generated_dir / program.target_exec.entry;
    std::error_code ec;
    if (!fs::is_regular_file(entry, ec)) {
        result.ca = Rational(0, static_cast<std::int64_t>(program.tests.size()));
        result.error = ErrorClass::COMPILE_FAIL;
        return result;
    }
    std::vector<ExecutionOutcome> generated;
    generated.reserve(program.tests.size());
    for (const auto& test : program.tests) {
        fs::remove_all(generated_dir / program.target_exec.output_dir, ec);
        generated.push_back(execute_program(program.target_exec, test, generated_dir, timeout_s));
    }
    return score_outcomes(program, generated, reference_outcomes, policy);
}

bool is_successful_run(const RunRecord& record) {
    return !record.error.has_value() && record.ca.has_value() && *record.ca == Rational(1);
}

HarnessReport build_harness_report(const std::vector<RunRecord>& records,
                                   const std::vector<ProgramUnit>& programs) {
    HarnessReport report;
    std::map<std::string, const ProgramUnit*> by_id;
    for (const auto& p : programs) {
        by_id[p.id] = &p;
        auto& row = report.rows[p.category];
        row.programs += 1;
        row.deleted += p.deleted;
        row.inspect += p.inspect;
    }
    for (const auto& r : records) {
        auto it = by_id.find(r.program_id);
        const Category cat = it != by_id.end() ? it->second->category : r.category;
        auto& row = report.rows[cat];
        if (r.ca.has_value() && r.tests_total.has_value()) {
            row.executed += 1;
            const int passed = r.tests_passed.value_or(0);
            row.pass += passed;
            row.fail += *r.tests_total - passed;
        }
    }
    for (auto& [cat, row] : report.rows) {
        row.error = row.programs - row.executed;
        row.total = row.pass + row.fail + row.deleted + row.inspect;
    }
    return report;
}

namespace {

constexpr const char* kReportColumns =
    "CATEGORY,PROGRAMS,EXECUTED,ERROR,PASS,FAIL,DELETED,INSPECT,TOTAL";

}  // namespace

Json report_to_json(const HarnessReport& report) {
    Json rows = Json::array();
    for (const auto& [cat, row] : report.rows) {
        rows.push_back(Json{{"category", to_string(cat)},
                            {"programs", row.programs},
                            {"executed", row.executed},
                            {"error", row.error},
                            {"pass", row.pass},
                            {"fail", row.fail},
                            {"deleted", row.deleted},
                            {"inspect", row.inspect},
                            {"total", row.total}});
    }
    return Json{{"schema_version", "v1"}, {"rows", std::move(rows)}};
}

HarnessReport report_from_json(const Json& j) {
    HarnessReport report;
    for (const auto& row : j.at("rows")) {
        CategoryCounts c;
        c.programs = row.at("programs").get<int>();
        c.executed = row.at("executed").get<int>();
        c.error = row.at("error").get<int>();
        c.pass = row.at("pass").get<int>();
        c.fail = row.at("fail").get<int>();
        c.deleted = row.at("deleted").get<int>();
        c.inspect = row.at("inspect").get<int>();
        c.total = row.at("total").get<int>();
        if (c.pass + c.fail + c.deleted + c.inspect != c.total) {
            throw SchemaError("harness report row violates the count identity");
        }
        report.rows[category_from_string(row.at("category").get<std::string>())] = c;
    }
    return report;
}

std::string report_to_csv(const HarnessReport& report) {
    std::string out = kReportColumns;
    out += '\n';
    for (const auto& [cat, row] : report.rows) {
        out += to_string(cat) + ',' + std::to_string(row.programs) + ',' +
               std::to_string(row.executed) + ',' + std::to_string(row.error) + ',' +
               std::to_string(row.pass) + ',' + std::to_string(row.fail) + ',' +
               std::to_string(row.deleted) + ',' + std::to_string(row.inspect) + ',' +
               std::to_string(row.total) + '\n';
    }
    return out;
}

HarnessReport report_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line != kReportColumns) {
        throw SchemaError("harness report CSV header mismatch");
    }
    HarnessReport report;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (start <= line.size()) {
            std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) {
                cells.push_back(line.substr(start));
                break;
            }
            cells.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        if (cells.size() != 9) throw SchemaError("harness report CSV row has wrong arity");
        CategoryCounts c;
        c.programs = std::stoi(cells[1]);
        c.executed = std::stoi(cells[2]);
        c.error = std::stoi(cells[3]);
        c.pass = std::stoi(cells[4]);
        c.fail = std::stoi(cells[5]);
        c.deleted = std::stoi(cells[6]);
        c.inspect = std::stoi(cells[7]);
        c.total = std::stoi(cells[8]);
        if (c.pass + c.fail + c.deleted + c.inspect != c.total) {
            throw SchemaError("harness report row violates the count identity");
        }
        report.rows[category_from_string(cells[0])] = c;
    }
    return report;
}

}  // namespace translab
