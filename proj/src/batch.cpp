#include "translab/batch.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "translab/errors.hpp"
#include "translab/harness.hpp"
#include "translab/model.hpp"
#include "translab/orchestrator.hpp"
#include "translab/serialize.hpp"
#include "translab/trace.hpp"

namespace translab {

namespace {

namespace fs = std::filesystem;

std::string read_file_or_throw(const fs::path& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(std::string(what) + " not readable: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Json parse_json_or_throw(const std::string& text, const char* what) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) throw SchemaError(std::string(what) + ": invalid JSON");
    return j;
}

std::string mode_slug(Mode mode) {
    std::string s = to_string(mode);
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::vector<RunRecord> load_run_logs(const std::vector<fs::path>& paths) {
    std::vector<RunRecord> all;
    for (const auto& path : paths) {
        auto records = run_records_from_jsonl(read_file_or_throw(path, "run log"));
        all.insert(all.end(), std::make_move_iterator(records.begin()),
                   std::make_move_iterator(records.end()));
    }
    return all;
}

}  // namespace

Suite load_suite(const fs::path& manifest_path) {
    const Json j = parse_json_or_throw(read_file_or_throw(manifest_path, "suite manifest"),
                                       "suite manifest");
    if (!j.is_object() || !j.contains("programs") || !j.at("programs").is_array())
        throw SchemaError("suite manifest: expected object with a programs array");
    if (j.contains("schema_version") && j.at("schema_version") != kSchemaVersion)
        throw SchemaError("suite manifest: unsupported schema_version");

    Suite suite;
    suite.dir = manifest_path.has_parent_path() ? manifest_path.parent_path() : fs::path(".");
    if (j.contains("fixture_dir")) {
        const fs::path d = j.at("fixture_dir").get<std::string>();
        suite.fixture_dir = d.is_absolute() ? d : suite.dir / d;
    }
    std::set<std::string> seen;
    for (const Json& pj : j.at("programs")) {
        ProgramUnit p = decode_program_unit(pj);
        if (!seen.insert(p.id).second)
            throw SchemaError("suite manifest: duplicate program id " + p.id);
        suite.programs.push_back(std::move(p));
    }
    return suite;
}

RunConfig load_run_config(const fs::path& config_path) {
    const Json j =
        parse_json_or_throw(read_file_or_throw(config_path, "run config"), "run config");
    RunConfig config = decode_run_config(j);
    for (const char* flag : {"enable_persist", "enable_validate", "enable_test"}) {
        if (!config.flags.count(flag))
            throw ConfigError(std::string("run config: missing flag ") + flag);
    }
    return config;
}

int run_translate(const TranslateSpec& spec, std::ostream& err) {
    Suite suite;
    RunConfig base_config;
    std::map<std::string, std::vector<ExecutionOutcome>> reference_cache;
    try {
        if (spec.repeats < 1) throw ConfigError("repeats must be >= 1");
        if (spec.modes.empty()) throw ConfigError("no modes selected");
        if (spec.parallelism < 0) throw ConfigError("parallelism must be >= 0");
        base_config = load_run_config(spec.config_path);
        suite = load_suite(spec.suite_manifest);
        if (suite.programs.empty()) throw ConfigError("suite has no programs");

        fs::create_directories(spec.out_dir / "work");
        fs::create_directories(spec.out_dir / "transcripts");

        // The reference side is deterministic; execute it once per program.
        for (const auto& program : suite.programs) {
            const fs::path scratch = spec.out_dir / "work" / (".ref-" + program.id);
            reference_cache[program.id] = execute_reference(program, suite.dir, scratch,
                                                            base_config.test_timeout_s);
            fs::remove_all(scratch);
        }
    } catch (const std::exception& e) {
        err << "translate: " << e.what() << "\n";
        return 2;
    }

    struct Task {
        Mode mode;
        const ProgramUnit* program;
        int repeat;
        std::string run_id;
    };
    std::vector<Task> tasks;
    for (Mode mode : spec.modes) {
        for (const auto& program : suite.programs) {
            for (int r = 0; r < spec.repeats; ++r) {
                tasks.push_back({mode, &program,  r,
                                 program.id + "-" + mode_slug(mode) + "-" + std::to_string(r)});
            }
        }
    }

    const fs::path config_dir =
        spec.config_path.has_parent_path() ? spec.config_path.parent_path() : fs::path(".");
    std::vector<RunRecord> results(tasks.size());
    std::atomic<std::size_t> next{0};
    std::mutex failure_mutex;
    std::string failure;

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure.empty()) return;
            }
            const Task& task = tasks[i];
            try {
                RunConfig config = base_config;
                config.mode = task.mode;
                config.seed = spec.seed_base + task.repeat;

                std::vector<Json> transcript;
                RunEnv env;
                env.suite_dir = suite.dir;
                env.work_dir = spec.out_dir / "work" / task.run_id;
                env.fixture_dir = suite.fixture_dir;
                env.run_id = task.run_id;
                env.transcript = &transcript;
                env.reference_outcomes = &reference_cache.at(task.program->id);

                auto backend = make_backend(config.backend, config_dir);
                results[i] = run_translation(*task.program, config, *backend, env);

                std::string lines;
                for (const Json& entry : transcript) lines += entry.dump() + "\n";
                write_text(spec.out_dir / "transcripts" / (task.run_id + ".jsonl"), lines);
                fs::remove_all(env.work_dir);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (failure.empty()) failure = task.run_id + ": " + e.what();
                return;
            }
        }
    };

    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    std::size_t n_threads = spec.parallelism > 0 ? static_cast<std::size_t>(spec.parallelism)
                                                 : std::min<std::size_t>(hw, 8);
    n_threads = std::min(n_threads, tasks.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t + 1 < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    if (!failure.empty()) {
        err << "translate: " << failure << "\n";
        return 2;
    }

    for (Mode mode : spec.modes) {
        std::vector<RunRecord> mode_records;
        int ok = 0;
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            if (tasks[i].mode != mode) continue;
            ok += results[i].successful ? 1 : 0;
            mode_records.push_back(results[i]);
        }
        try {
            write_text(spec.out_dir / ("runs-" + mode_slug(mode) + ".jsonl"),
                       run_records_to_jsonl(mode_records));
        } catch (const std::exception& e) {
            err << "translate: " << e.what() << "\n";
            return 2;
        }
        err << mode_slug(mode) << ": " << ok << "/" << mode_records.size()
            << " runs successful\n";
    }
    return 0;
}

int run_report(const ReportSpec& spec, std::ostream& err) {
    try {
        std::vector<RunRecord> records = load_run_logs(spec.run_logs);

        std::vector<ProgramUnit> programs;
        if (spec.suite_manifest) {
            programs = load_suite(*spec.suite_manifest).programs;
        } else {
            std::set<std::string> seen;
            for (const auto& r : records) {
                if (!seen.insert(r.program_id).second) continue;
                ProgramUnit p;
                p.id = r.program_id;
                p.category = r.category;
                programs.push_back(std::move(p));
            }
        }

        PriceTable prices;
        if (spec.prices_path) {
            prices = PriceTable::from_json(
                parse_json_or_throw(read_file_or_throw(*spec.prices_path, "price table"),
                                    "price table"));
        }

        fs::create_directories(spec.out_dir);
        const MetricsSummary summary = build_metrics_summary(
            records, programs, spec.metrics, spec.prices_path ? &prices : nullptr);
        write_text(spec.out_dir / "metrics.csv", summary_to_csv(summary));
        write_text(spec.out_dir / "metrics.json", summary_to_json(summary).dump(2) + "\n");

        std::set<Mode> modes;
        for (const auto& r : records) modes.insert(r.config.mode);
        for (Mode mode : modes) {
            // Best CA per program represents the mode in the harness table;
            // a record with a score beats one without, earlier wins ties.
            std::map<std::string, const RunRecord*> best;
            for (const auto& r : records) {
                if (r.config.mode != mode) continue;
                auto [it, inserted] = best.emplace(r.program_id, &r);
                if (inserted) continue;
                const auto& cur = it->second->ca;
                if (r.ca && (!cur || *r.ca > *cur)) it->second = &r;
            }
            std::vector<RunRecord> selected;
            for (const auto& [id, rec] : best) selected.push_back(*rec);
            const HarnessReport report = build_harness_report(selected, programs);
            const std::string stem = "harness-" + mode_slug(mode);
            write_text(spec.out_dir / (stem + ".csv"), report_to_csv(report));
            write_text(spec.out_dir / (stem + ".json"), report_to_json(report).dump(2) + "\n");
        }
        return 0;
    } catch (const std::exception& e) {
        err << "report: " << e.what() << "\n";
        return 2;
    }
}

int run_compare_traces(const CompareSpec& spec, std::ostream& out, std::ostream& err) {
    try {
        const std::vector<RunRecord> records = load_run_logs(spec.run_logs);

        std::vector<std::pair<std::string, Mode>> order;
        std::map<std::pair<std::string, Mode>, std::vector<const RunRecord*>> groups;
        for (const auto& r : records) {
            const auto key = std::make_pair(r.program_id, r.config.mode);
            auto [it, inserted] = groups.emplace(key, std::vector<const RunRecord*>{});
            if (inserted) order.push_back(key);
            it->second.push_back(&r);
        }

        bool diverged = false;
        Json out_groups = Json::array();
        for (const auto& key : order) {
            const auto& group = groups.at(key);
            Json gj{{"program_id", key.first}, {"mode", to_string(key.second)}};
            gj["runs"] = group.size();
            if (group.size() < 2) {
                gj["insufficient_repeats"] = true;
                out_groups.push_back(std::move(gj));
                continue;
            }
            std::set<std::string> distinct;
            Json hashes = Json::array();
            for (const RunRecord* r : group) {
                const std::string h = trace_hash_hex(r->trace);
                distinct.insert(h);
                hashes.push_back(Json{{"run_id", r->run_id}, {"trace_sha256", h}});
            }
            Json divergences = Json::array();
            for (std::size_t a = 0; a < group.size(); ++a) {
                for (std::size_t b = a + 1; b < group.size(); ++b) {
                    const auto seq = divergence_point(group[a]->trace, group[b]->trace);
                    if (!seq) continue;
                    divergences.push_back(Json{{"a", group[a]->run_id},
                                               {"b", group[b]->run_id},
                                               {"seq", *seq}});
                }
            }
            gj["distinct_hashes"] = distinct.size();
            gj["deterministic"] = distinct.size() == 1;
            gj["hashes"] = std::move(hashes);
            gj["divergences"] = std::move(divergences);
            diverged = diverged || distinct.size() > 1;
            out_groups.push_back(std::move(gj));
        }

        out << Json{{"schema_version", kSchemaVersion}, {"groups", std::move(out_groups)}}.dump(2)
            << "\n";
        return diverged ? 1 : 0;
    } catch (const std::exception& e) {
        err << "compare-traces: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace translab
