// Acceptance gate: one line per criterion, exit code = number of failures.
// Each criterion is self-contained and uses only public library entry points,
// so a pass here certifies the shipped surface, not test-only shims.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "translab/batch.hpp"
#include "translab/errors.hpp"
#include "translab/fixtures.hpp"
#include "translab/harness.hpp"
#include "translab/metrics.hpp"
#include "translab/model.hpp"
#include "translab/orchestrator.hpp"
#include "translab/serialize.hpp"
#include "translab/sha256.hpp"
#include "translab/tools.hpp"
#include "translab/trace.hpp"

#include "../util.hpp"

namespace fs = std::filesystem;
using namespace translab;

namespace {

struct Check {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt_seconds(double s) {
    std::ostringstream out;
    out.precision(1);
    out << std::fixed << s << "s";
    return out.str();
}

Check fail(std::string detail) { return {false, std::move(detail)}; }
Check pass(std::string detail) { return {true, std::move(detail)}; }

// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int width = std::min(threads, n);
    pool.reserve(static_cast<std::size_t>(width));
    for (int t = 0; t < width; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

std::vector<RunRecord> read_log(const fs::path& path) {
    return run_records_from_jsonl(testutil::read_file(path));
}

// ---- criterion 1: deterministic mode is bit-reproducible at scale ---------

Check criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& suite = testutil::suite_dir();
    const auto out = testutil::tmp_dir("acc1");

    TranslateSpec spec;
    spec.suite_manifest = suite / "manifest.json";
    spec.config_path = suite / "configs" / "scripted.json";
    spec.modes = {Mode::DETERMINISTIC};
    spec.repeats = 50;
    spec.parallelism = 8;
    spec.out_dir = out;
    std::ostringstream err;
    if (run_translate(spec, err) != 0) return fail("translate failed: " + err.str());

    std::map<std::string, std::set<std::string>> hashes;
    std::map<std::string, int> counts;
    for (const auto& r : read_log(out / "runs-deterministic.jsonl")) {
        hashes[r.program_id].insert(trace_hash_hex(r.trace));
        counts[r.program_id] += 1;
    }
    if (hashes.size() != 10) return fail("expected 10 programs, saw " + std::to_string(hashes.size()));
    for (const auto& [id, set] : hashes) {
        if (counts[id] != 50) return fail(id + ": expected 50 runs, saw " + std::to_string(counts[id]));
        if (set.size() != 1) {
            return fail(id + ": " + std::to_string(set.size()) + " distinct trace hashes across 50 runs");
        }
    }
    const double elapsed = seconds_since(t0);
    if (elapsed >= 60.0) return fail("took " + fmt_seconds(elapsed) + ", bound 60s");
    return pass("500 deterministic runs, 1 trace hash per program, " + fmt_seconds(elapsed));
}

// ---- criterion 2: seeds steer the agentic loop ----------------------------

Check criterion2() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& suite = testutil::suite_dir();
    const auto scratch = testutil::tmp_dir("acc2");

    RunConfig config = load_run_config(suite / "configs" / "stub.json");
    config.mode = Mode::AGENTIC;

    const Suite loaded = load_suite(suite / "manifest.json");
    const ProgramUnit* program = nullptr;
    for (const auto& p : loaded.programs) {
        if (p.id == "nc_sum") program = &p;
    }
    if (!program) return fail("nc_sum missing from bundled suite");

    const auto reference =
        execute_reference(*program, suite, scratch / "ref", config.test_timeout_s);

    constexpr int kPairs = 100;
    std::vector<ToolCallTrace> traces(2 * kPairs);
    std::vector<std::string> errors(2 * kPairs);
    parallel_for(2 * kPairs, 8, [&](int i) {
        try {
            RunConfig mine = config;
            mine.seed = static_cast<std::uint64_t>(i);
            auto backend = make_backend(mine.backend, suite / "configs");
            RunEnv env;
            env.suite_dir = suite;
            env.work_dir = scratch / ("run-" + std::to_string(i));
            env.fixture_dir = loaded.fixture_dir;
            env.run_id = "acc2-" + std::to_string(i);
            env.reference_outcomes = &reference;
            traces[static_cast<std::size_t>(i)] =
                run_translation(*program, mine, *backend, env).trace;
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(i)] = e.what();
        }
    });
    for (const auto& e : errors) {
        if (!e.empty()) return fail("run threw: " + e);
    }

    int divergent = 0;
    for (int i = 0; i < kPairs; ++i) {
        if (divergence_point(traces[static_cast<std::size_t>(2 * i)],
                             traces[static_cast<std::size_t>(2 * i + 1)])) {
            divergent += 1;
        }
    }
    const double elapsed = seconds_since(t0);
    if (divergent < 50) {
        return fail("only " + std::to_string(divergent) + "/100 seed pairs diverged");
    }
    if (elapsed >= 120.0) return fail("took " + fmt_seconds(elapsed) + ", bound 120s");
    return pass(std::to_string(divergent) + "/100 seed pairs diverged, " + fmt_seconds(elapsed));
}

// ---- criterion 3: aggregate metrics agree with brute-force oracles --------

Rational oracle_mean(std::vector<Rational> s) {
    Rational sum(0);
    for (const auto& v : s) sum = sum + v;
    return sum / Rational(static_cast<std::int64_t>(s.size()));
}

// ceil of a non-negative rational, via integer arithmetic.
std::int64_t ceil_of(const Rational& r) { return (r.num() + r.den() - 1) / r.den(); }

Rational oracle_percentile(std::vector<Rational> s, const Rational& q) {
    std::sort(s.begin(), s.end());
    const auto n = static_cast<std::int64_t>(s.size());
    std::int64_t k = ceil_of((q * Rational(n)) / Rational(100));
    k = std::max<std::int64_t>(1, std::min(n, k));
    return s[static_cast<std::size_t>(k - 1)];
}

Rational oracle_cvar(std::vector<Rational> s, const Rational& alpha) {
    std::sort(s.begin(), s.end());
    const auto n = static_cast<std::int64_t>(s.size());
    std::int64_t k = ceil_of(alpha * Rational(n));
    k = std::max<std::int64_t>(1, std::min(n, k));
    Rational sum(0);
    for (std::int64_t i = 0; i < k; ++i) sum = sum + s[static_cast<std::size_t>(i)];
    return sum / Rational(k);
}

Check criterion3() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(0x5eed0003);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 50);
        std::vector<Rational> samples;
        std::vector<bool> successes;
        for (int i = 0; i < n; ++i) {
            const std::int64_t den = 1 + static_cast<std::int64_t>(rng() % 12);
            const std::int64_t num = static_cast<std::int64_t>(rng() % (den + 1));
            samples.emplace_back(num, den);
            successes.push_back(num == den);
        }

        if (mean_ca(samples) != oracle_mean(samples)) {
            return fail("mean mismatch at trial " + std::to_string(trial));
        }

        std::int64_t wins = 0;
        for (bool b : successes) wins += b ? 1 : 0;
        if (success_rate(successes) != Rational(wins, n)) {
            return fail("success rate mismatch at trial " + std::to_string(trial));
        }

        const Rational q(static_cast<std::int64_t>(rng() % 401), 4);
        if (percentile_nearest_rank(samples, q) != oracle_percentile(samples, q)) {
            return fail("percentile mismatch at trial " + std::to_string(trial));
        }

        const std::int64_t aden = 1 + static_cast<std::int64_t>(rng() % 20);
        const Rational alpha(1 + static_cast<std::int64_t>(rng() % aden), aden);
        if (cvar(samples, alpha) != oracle_cvar(samples, alpha)) {
            return fail("cvar mismatch at trial " + std::to_string(trial));
        }
    }
    const double elapsed = seconds_since(t0);
    if (elapsed >= 10.0) return fail("took " + fmt_seconds(elapsed) + ", bound 10s");
    return pass("1000 random sample sets match brute force, " + fmt_seconds(elapsed));
}

// ---- criterion 4: tail metric spot values ---------------------------------

Check criterion4() {
    std::vector<Rational> spread{Rational(1, 2)};
    for (int i = 0; i < 9; ++i) spread.emplace_back(9, 10);
    if (cvar(spread, Rational(1, 10)) != Rational(1, 2)) {
        return fail("CVaR 0.1 of {0.5, 0.9 x9} is not 0.5");
    }

    std::mt19937_64 rng(0x5eed0004);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 30);
        std::vector<Rational> samples;
        for (int i = 0; i < n; ++i) {
            const std::int64_t den = 1 + static_cast<std::int64_t>(rng() % 9);
            samples.emplace_back(static_cast<std::int64_t>(rng() % (den + 1)), den);
        }
        if (cvar(samples, Rational(1)) != mean_ca(samples)) {
            return fail("CVaR 1.0 != mean at trial " + std::to_string(trial));
        }
    }

    const std::vector<Rational> constant(17, Rational(3, 7));
    for (const auto& q : {Rational(0), Rational(5), Rational(50), Rational(100)}) {
        if (percentile_nearest_rank(constant, q) != Rational(3, 7)) {
            return fail("percentile of a constant vector is not the constant");
        }
    }
    return pass("CVaR tail, CVaR 1.0 = mean x100, constant percentile");
}

// ---- criterion 5: differential harness scores and report identity ---------

Check criterion5() {
    const auto& suite = testutil::suite_dir();
    const auto scratch = testutil::tmp_dir("acc5");
    const Suite loaded = load_suite(suite / "manifest.json");
    const ProgramUnit* program = nullptr;
    for (const auto& p : loaded.programs) {
        if (p.id == "nc_sum") program = &p;
    }
    if (!program) return fail("nc_sum missing from bundled suite");

    const auto reference = execute_reference(*program, suite, scratch / "ref", 10.0);
    const std::string good = testutil::read_file(suite / program->reference_path);

    const auto exact_dir = scratch / "exact";
    testutil::write_file(exact_dir / program->target_exec.entry, good);
    EvalResult exact =
        evaluate_translation(*program, exact_dir, reference, NormalizationPolicy{}, 10.0);
    RunRecord exact_record;
    exact_record.ca = exact.ca;
    exact_record.error = exact.error;
    exact_record.successful = !exact.error && exact.ca == Rational(1);
    if (!exact.ca || *exact.ca != Rational(1) || !is_successful_run(exact_record)) {
        return fail("byte-identical translation did not score CA 1.0 successful");
    }

    // Same program, except the first byte of one test's stdout is bumped.
    const std::string mutated =
        "import sys\n"
        "values = [int(tok) for tok in sys.stdin.read().split()]\n"
        "out = f\"{sum(values)}\\n\"\n"
        "if out == \"6\\n\":\n"
        "    out = chr(ord(out[0]) + 1) + out[1:]\n"
        "sys.stdout.write(out)\n";
    const auto mutated_dir = scratch / "mutated";
    testutil::write_file(mutated_dir / program->target_exec.entry, mutated);
    EvalResult off =
        evaluate_translation(*program, mutated_dir, reference, NormalizationPolicy{}, 10.0);
    RunRecord off_record;
    off_record.ca = off.ca;
    off_record.error = off.error;
    off_record.successful = false;
    if (!off.ca || !(*off.ca < Rational(1)) || is_successful_run(off_record)) {
        return fail("single-byte stdout mutation still scored as success");
    }

    // Row identity holds on every constructed report.
    std::mt19937_64 rng(0x5eed0005);
    const std::vector<Category> cats{Category::NC, Category::SM, Category::IC, Category::SQ,
                                     Category::IX, Category::ST, Category::SG, Category::OB,
                                     Category::IF, Category::RL, Category::CM, Category::DB,
                                     Category::RW, Category::OTHER};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<ProgramUnit> programs;
        std::vector<RunRecord> records;
        const int count = 1 + static_cast<int>(rng() % 12);
        for (int i = 0; i < count; ++i) {
            ProgramUnit p;
            p.id = "p" + std::to_string(trial) + "_" + std::to_string(i);
            p.category = cats[rng() % cats.size()];
            p.deleted = static_cast<int>(rng() % 3);
            p.inspect = static_cast<int>(rng() % 3);
            const int tests = 1 + static_cast<int>(rng() % 6);
            for (int t = 0; t < tests; ++t) p.tests.push_back({"t" + std::to_string(t), "", {}, {}});
            programs.push_back(p);
            if (rng() % 4 != 0) {
                RunRecord r;
                r.program_id = p.id;
                r.category = p.category;
                r.tests_total = tests;
                r.tests_passed = static_cast<int>(rng() % (static_cast<unsigned>(tests) + 1));
                r.ca = Rational(*r.tests_passed, tests);
                records.push_back(r);
            }
        }
        const HarnessReport report = build_harness_report(records, programs);
        for (const auto& [cat, row] : report.rows) {
            (void)cat;
            if (row.pass + row.fail + row.deleted + row.inspect != row.total) {
                return fail("row identity violated at trial " + std::to_string(trial));
            }
        }
        if (report_from_csv(report_to_csv(report)) != report ||
            report_from_json(report_to_json(report)) != report) {
            return fail("report round-trip changed rows at trial " + std::to_string(trial));
        }
    }

    HarnessReport published;
    published.rows[Category::NC] = CategoryCounts{90, 90, 0, 4352, 0, 6, 11, 4369};
    if (report_from_csv(report_to_csv(published)) != published ||
        report_from_json(report_to_json(published)) != published) {
        return fail("published NC row did not round-trip");
    }
    return pass("CA scoring, 200 random reports + published NC row round-trip");
}

// ---- criterion 6: token and cost ratios -----------------------------------

Check criterion6() {
    PriceTable prices;
    prices.entries["m"] = {Rational(3, 1000000), Rational(15, 1000000)};

    RunRecord paid;
    paid.ca = Rational(1);
    paid.successful = true;
    paid.ledger.record("m", {1'000'000, 500'000});
    const auto cost = cost_per_success({paid}, prices);
    if (!cost || *cost != Rational(21, 2) || cost->decimal(2) != "10.5") {
        return fail("1M prompt + 0.5M completion at (3e-6, 15e-6) != 10.50 per success");
    }

    RunRecord other;
    other.ca = Rational(0);
    other.error = ErrorClass::TEST_FAIL;
    other.ledger.record("m", {400'000, 100'000});
    RunRecord winner;
    winner.ca = Rational(1);
    winner.successful = true;
    winner.ledger.record("m", {500'000, 200'000});
    const auto tokens = tokens_per_success({other, winner});
    if (!tokens || *tokens != Rational(1'200'000)) {
        return fail("1.2M tokens over 2 runs with 1 success != 1.2M per success");
    }
    return pass("cost 21/2 per success, tokens 1.2M per success");
}

// ---- criterion 7: end-to-end batch CLI surface -----------------------------

std::int64_t total_tokens(const std::vector<RunRecord>& records) {
    std::int64_t total = 0;
    for (const auto& r : records) total += r.ledger.totals().total();
    return total;
}

Check criterion7() {
    const auto& suite = testutil::suite_dir();

    std::map<std::string, fs::path> outs;
    for (const std::string kind : {"scripted", "stub"}) {
        const auto out = testutil::tmp_dir("acc7-" + kind);
        TranslateSpec spec;
        spec.suite_manifest = suite / "manifest.json";
        spec.config_path = suite / "configs" / (kind + ".json");
        spec.modes = {Mode::DETERMINISTIC, Mode::AGENTIC};
        spec.repeats = 5;
        spec.parallelism = 8;
        spec.out_dir = out;
        std::ostringstream err;
        if (run_translate(spec, err) != 0) {
            return fail(kind + " translate exited nonzero: " + err.str());
        }
        outs[kind] = out;

        ReportSpec report;
        report.run_logs = {out / "runs-deterministic.jsonl", out / "runs-agentic.jsonl"};
        report.suite_manifest = suite / "manifest.json";
        report.prices_path = suite / "prices.json";
        report.out_dir = out / "report";
        std::ostringstream rerr;
        if (run_report(report, rerr) != 0) {
            return fail(kind + " report exited nonzero: " + rerr.str());
        }
        for (const char* name : {"metrics.csv", "metrics.json", "harness-deterministic.csv",
                                 "harness-agentic.csv"}) {
            const auto path = out / "report" / name;
            if (!fs::exists(path) || fs::file_size(path) == 0) {
                return fail(kind + " report is missing " + std::string(name));
            }
        }
    }

    const auto det = total_tokens(read_log(outs["stub"] / "runs-deterministic.jsonl"));
    const auto agent = total_tokens(read_log(outs["stub"] / "runs-agentic.jsonl"));
    if (det <= 0 || agent <= 0 || det >= agent) {
        return fail("stub token totals not ordered: deterministic " + std::to_string(det) +
                    " vs agentic " + std::to_string(agent));
    }
    return pass("both backends x both modes x5 repeats, stub tokens " + std::to_string(det) +
                " < " + std::to_string(agent));
}

// ---- criterion 8: traversal attempts leave no marks outside the root ------

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file()) {
            files[fs::relative(entry.path(), dir).generic_string()] =
                Sha256::hex_digest(testutil::read_file(entry.path()));
        }
    }
    return files;
}

Check criterion8() {
    const auto outer = testutil::tmp_dir("acc8");
    const auto ws = outer / "ws";
    const auto outside = outer / "outside";
    fs::create_directories(ws);
    testutil::write_file(outside / "canary.txt", "this is not python\n");
    testutil::write_file(outside / "nested" / "canary2.txt", "second canary\n");

    Sandbox sandbox;
    sandbox.root = ws;
    sandbox.command_timeout_s = 5.0;

    const auto outside_before = snapshot(outside);
    std::set<std::string> outer_before;
    for (const auto& entry : fs::directory_iterator(outer)) {
        outer_before.insert(entry.path().filename().string());
    }

    const std::vector<std::string> escapes{
        "../outside/canary.txt",
        "../../escape.txt",
        "/etc/passwd",
        "..",
        "../outside",
        "a/../../outside/canary.txt",
        "./../outside/new.txt",
        "../outside/../outside/nested/canary2.txt",
        "../../../../../../tmp/acc8-owned.txt",
    };

    std::mt19937_64 rng(0x5eed0008);
    int blocked = 0;
    for (int i = 0; i < 1000; ++i) {
        const std::string& esc = escapes[rng() % escapes.size()];
        ToolRequest request;
        bool must_error = true;
        switch (i % 6) {
            case 0:
                request = {Tool::READ_FILE, Json{{"path", esc}}};
                break;
            case 1:
                request = {Tool::WRITE_FILE, Json{{"path", esc}, {"content", "owned"}}};
                break;
            case 2:
                request = {Tool::LIST_FILES, Json{{"glob", esc + "/**"}}};
                must_error = false;  // glob matches walked paths, cannot leave root
                break;
            case 3:
                request = {Tool::WEB_SCRAPE, Json{{"url", "file://" + esc}}};
                break;
            case 4:
                if (rng() % 2) {
                    request = {Tool::RUN_COMMAND,
                               Json{{"argv", Json::array({esc, "-c", "print(1)"})}}};
                } else {
                    request = {Tool::RUN_COMMAND, Json{{"argv", Json::array({"python3", esc})}}};
                    must_error = false;  // runs confined to cwd; the script input is a read
                }
                break;
            default:
                request = {Tool::GIT,
                           Json{{"subcommand", "add"}, {"paths", Json::array({esc})}}};
                break;
        }
        const ToolResult result = invoke(request, sandbox, nullptr);
        if (must_error) {
            if (result.ok()) {
                return fail("request " + std::to_string(i) + " (" + to_string(request.tool) +
                            " " + esc + ") was not rejected");
            }
            blocked += 1;
        }
    }

    if (snapshot(outside) != outside_before) {
        return fail("files outside the sandbox root changed");
    }
    std::set<std::string> outer_after;
    for (const auto& entry : fs::directory_iterator(outer)) {
        outer_after.insert(entry.path().filename().string());
    }
    if (outer_after != outer_before) {
        return fail("new entries appeared next to the sandbox root");
    }
    if (fs::exists("/tmp/acc8-owned.txt")) {
        return fail("escape artifact reached /tmp");
    }
    return pass("1000 traversal requests, " + std::to_string(blocked) +
                " rejected, zero effects outside the root");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Check()>>> criteria{
        {"deterministic trace reproducibility", criterion1},
        {"agentic seed sensitivity", criterion2},
        {"exact metrics vs brute force", criterion3},
        {"tail metric spot values", criterion4},
        {"differential harness and report identity", criterion5},
        {"token and cost ratios", criterion6},
        {"batch CLI end to end", criterion7},
        {"sandbox containment", criterion8},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check check;
        try {
            check = criteria[i].second();
        } catch (const std::exception& e) {
            check = fail(std::string("threw: ") + e.what());
        }
        std::cout << (check.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": "
                  << criteria[i].first << " (" << check.detail << ")" << std::endl;
        if (!check.pass) failures += 1;
    }
    return failures;
}
