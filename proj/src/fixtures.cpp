#include "translab/fixtures.hpp"

#include <fstream>

#include "translab/domain.hpp"
#include "translab/serialize.hpp"
#include "translab/sha256.hpp"

namespace translab {

namespace {

struct ProgramFixture {
    const char* id;
    const char* category;
    const char* cobol;
    const char* python;
    std::vector<std::pair<const char*, const char*>> tests;  // (test id, stdin)
    int deleted = 0;
    int inspect = 0;
};

// Legacy sources are texture only: the suite never executes COBOL. The
// reference .py programs define the expected observable behavior.
const std::vector<ProgramFixture>& program_fixtures() {
    static const std::vector<ProgramFixture> fixtures = {
        {"nc_sum", "NC",
         R"COB(       IDENTIFICATION DIVISION.
       PROGRAM-ID. NCSUM.
       DATA DIVISION.
       WORKING-STORAGE SECTION.
       01 WS-LINE    PIC X(80).
       01 WS-NUM     PIC S9(9).
       01 WS-TOTAL   PIC S9(9) VALUE ZERO.
       01 WS-EOF     PIC X VALUE "N".
       PROCEDURE DIVISION.
       MAIN-PARA.
           PERFORM UNTIL WS-EOF = "Y"
               ACCEPT WS-LINE
                   ON EXCEPTION MOVE "Y" TO WS-EOF
               NOT ON EXCEPTION
                   MOVE FUNCTION NUMVAL(WS-LINE) TO WS-NUM
                   ADD WS-NUM TO WS-TOTAL
               END-ACCEPT
           END-PERFORM
           DISPLAY WS-TOTAL
           STOP RUN.
)COB",
         R"PY(import sys

total = 0
for token in sys.stdin.read().split():
    total += int(token)
print(total)
)PY",
         {{"t1", "1\n2\n3\n"}, {"t2", "10\n-4\n"}, {"t3", "0\n"}}},

        {"nc_fizz", "NC",
         R"COB(       IDENTIFICATION DIVISION.
       PROGRAM-ID. NCFIZZ.
       DATA DIVISION.
       WORKING-STORAGE SECTION.
       01 WS-N       PIC 9(4).
       01 WS-I       PIC 9(4).
       01 WS-R15     PIC 9(4).
       01 WS-R3      PIC 9(4).
       01 WS-R5      PIC 9(4).
       PROCEDURE DIVISION.
       MAIN-PARA.
           ACCEPT WS-N
           PERFORM VARYING WS-I FROM 1 BY 1 UNTIL WS-I > WS-N
               COMPUTE WS-R15 = FUNCTION MOD(WS-I, 15)
               COMPUTE WS-R3 = FUNCTION MOD(WS-I, 3)
               COMPUTE WS-R5 = FUNCTION MOD(WS-I, 5)
               EVALUATE TRUE
                   WHEN WS-R15 = 0 DISPLAY "FIZZBUZZ"
                   WHEN WS-R3 = 0 DISPLAY "FIZZ"
                   WHEN WS-R5 = 0 DISPLAY "BUZZ"
                   WHEN OTHER DISPLAY WS-I
               END-EVALUATE
           END-PERFORM
           STOP RUN.
)COB",
         R"PY(import sys

n = int(sys.stdin.readline())
for i in range(1, n + 1):
    if i % 15 == 0:
        print("FIZZBUZZ")
    elif i % 3 == 0:
        print("FIZZ")
    elif i % 5 == 0:
        print("BUZZ")
    else:
        print(i)
)PY",
         {{"t1", "5\n"}, {"t2", "15\n"}, {"t3", "1\n"}},
         0, 1},

        {"nc_calc", "NC",
         R"COB(       IDENTIFICATION DIVISION.
       PROGRAM-ID. NCCALC.
       DATA DIVISION.
       WORKING-STORAGE SECTION.
       01 WS-LINE    PIC X(80).
       01 WS-A       PIC S9(9).
       01 WS-B       PIC S9(9).
       01 WS-OP      PIC X.
       01 WS-OUT     PIC S9(9).
       01 WS-EOF     PIC X VALUE "N".
       PROCEDURE DIVISION.
       MAIN-PARA.
           PERFORM UNTIL WS-EOF = "Y"
               ACCEPT WS-LINE
                   ON EXCEPTION MOVE "Y" TO WS-EOF
               NOT ON EXCEPTION
                   UNSTRING WS-LINE DELIMITED BY SPACE
                       INTO WS-A WS-OP WS-B
                   EVALUATE WS-OP
                       WHEN "+" COMPUTE WS-OUT = WS-A + WS-B
                       WHEN "-" COMPUTE WS-OUT = WS-A - WS-B
                       WHEN "*" COMPUTE WS-OUT = WS-A * WS-B
                       WHEN "/" DIVIDE WS-B INTO WS-A GIVING WS-OUT
                   END-EVALUATE
                   DISPLAY WS-OUT
               END-ACCEPT
           END-PERFORM
           STOP RUN.
)COB",
         R"PY(import sys

for line in sys.stdin:
    parts = line.split()
    if len(parts) != 3:
        continue
    a, op, b = int(parts[0]), parts[1], int(parts[2])
    if op == "+":
        print(a + b)
    elif op == "-":
        print(a - b)
    elif op == "*":
        print(a * b)
    elif op == "/":
        print(a // b if b else 0)
)PY",
         {{"t1", "3 + 4\n10 / 3\n"}, {"t2", "7 * 6\n9 - 12\n"}},
         1, 0},

        {"sq_copy", "SQ",
         R"COB(       IDENTIFICATION DIVISION.
       PROGRAM-ID. SQCOPY.
       ENVIRONMENT DIVISION.
       INPUT-OUTPUT SECTION.
       FILE-CONTROL.
           SELECT OUT-FILE ASSIGN TO "out/OUT.DAT"
               ORGANIZATION IS LINE SEQUENTIAL.
       DATA DIVISION.
       FILE SECTION.
       FD OUT-FILE.
       01 OUT-REC    PIC X(80).
       WORKING-STORAGE SECTION.
       01 WS-LINE    PIC X(80).
       01 WS-COUNT   PIC 9(6) VALUE ZERO.
       01 WS-EOF     PIC X VALUE "N".
       PROCEDURE DIVISION.
       MAIN-PARA.
           OPEN OUTPUT OUT-FILE
           PERFORM UNTIL WS-EOF = "Y"
               ACCEPT WS-LINE
                   ON EXCEPTION MOVE "Y" TO WS-EOF
               NOT ON EXCEPTION
                   MOVE WS-LINE TO OUT-REC
                   WRITE OUT-REC
                   ADD 1 TO WS-COUNT
               END-ACCEPT
           END-PERFORM
           CLOSE OUT-FILE
           DISPLAY WS-COUNT
           STOP RUN.
)COB",
         R"PY(import os
import sys

os.makedirs("out", exist_ok=True)
lines = sys.stdin.read().splitlines()
with open("out/OUT.DAT", "w") as f:
    for line in lines:
        f.write(line + "\n")
print(len(lines))
)PY",
         {{"t1", "alpha\nbeta\n"}, {"t2", "one\ntwo\nthree\n"}, {"t3", ""}}},

        {"sq_records", "SQ",
         R"COB(       IDENTIFICATION DIVISION.
       PROGRAM-ID. SQRECORDS.
       ENVIRONMENT DIVISION.
       INPUT-OUTPUT SECTION.
       FILE-CONTROL.
           SELECT RPT-FILE ASSIGN TO "out/REPORT.DAT"
               ORGANIZATION IS LINE SEQUENTIAL.
       DATA DIVISION.
       FILE SECTION.
       FD RPT-FILE.
       01 RPT-REC.
          05 RPT-NAME    PIC X(10).
          05 RPT-AMOUNT  PIC ZZZZZZ9.
       WORKING-STORAGE SECTION.
       01 WS-LINE.
          05 WS-NAME     PIC X(10).
          05 WS-AMOUNT   PIC 9(5).
       01 WS-TOTAL       PIC 9(7) VALUE ZERO.
       01 WS-EOF         PIC X VALUE "N".
       PROCEDURE DIVISION.
       MAIN-PARA.
           OPEN OUTPUT RPT-FILE
           PERFORM UNTIL WS-EOF = "Y"
               ACCEPT WS-LINE
                   ON EXCEPTION MOVE "Y" TO WS-EOF
               NOT ON EXCEPTION
                   MOVE WS-NAME TO RPT-NAME
                   MOVE WS-AMOUNT TO RPT-AMOUNT
                   ADD WS-AMOUNT TO WS-TOTAL
                   WRITE RPT-REC
               END-ACCEPT
           END-PERFORM
           MOVE "TOTAL" TO RPT-NAME
           MOVE WS-TOTAL TO RPT-AMOUNT
           WRITE RPT-REC
           CLOSE RPT-FILE
           DISPLAY WS-TOTAL
           STOP RUN.
)COB",
         R"PY(import os
import sys

os.makedirs("out", exist_ok=True)
total = 0
with open("out/REPORT.DAT", "w") as f:
    for line in sys.stdin.read().splitlines():
        if len(line) < 15:
            continue
        name = line[:10].strip()
        amount = int(line[10:15])
        total += amount
        f.write(f"{name:<10}{amount:>7}\n")
    f.write(f"{'TOTAL':<10}{total:>7}\n")
print(total)
)PY",
         {{"t1", "WIDGET    00042\nGADGET    00108\n"}, {"t2", "BOLT      00007\n"}},
         0, 1},

        {"sq_filter", "SQ",
         R"COB(       IDENTIFICATION DIVISION.
       PROGRAM-ID. SQFILTER.
       ENVIRONMENT DIVISION.
       INPUT-OUTPUT SECTION.
       FILE-CONTROL.
           SELECT FLT-FILE ASSIGN TO "out/FILTERED.DAT"
               ORGANIZATION IS LINE SEQUENTIAL.
       DATA DIVISION.
       FILE SECTION.
       FD FLT-FILE.
       01 FLT-REC    PIC X(80).
       WORKING-STORAGE SECTION.
       01 WS-LINE    PIC X(80).
       01 WS-KEPT    PIC 9(6) VALUE ZERO.
       01 WS-EOF     PIC X VALUE "N".
       PROCEDURE DIVISION.
       MAIN-PARA.
           OPEN OUTPUT FLT-FILE
           PERFORM UNTIL WS-EOF = "Y"
               ACCEPT WS-LINE
                   ON EXCEPTION MOVE "Y" TO WS-EOF
               NOT ON EXCEPTION
                   IF WS-LINE(1:1) = "A"
                       MOVE WS-LINE TO FLT-REC
                       WRITE FLT-REC
                       ADD 1 TO WS-KEPT
                   END-IF
               END-ACCEPT
           END-PERFORM
           CLOSE FLT-FILE
           DISPLAY WS-KEPT
           STOP RUN.
)COB",
         R"PY(import os
import sys

os.makedirs("out", exist_ok=True)
kept = 0
with open("out/FILTERED.DAT", "w") as f:
    for line in sys.stdin.read().splitlines():
        if line.startswith("A"):
            f.write(line + "\n")
            kept += 1
print(kept)
)PY",
         {{"t1", "APPLE\nBANANA\nAVOCADO\n"}, {"t2", "BERRY\n"}}},

        {"if_strings", "IF",
         R"COB(       IDENTIFICATION DIVISION.
       PROGRAM-ID. IFSTRINGS.
       DATA DIVISION.
       WORKING-STORAGE SECTION.
       01 WS-LINE    PIC X(80).
       01 WS-LEN     PIC 9(4).
       01 WS-EOF     PIC X VALUE "N".
       PROCEDURE DIVISION.
       MAIN-PARA.
           PERFORM UNTIL WS-EOF = "Y"
               ACCEPT WS-LINE
                   ON EXCEPTION MOVE "Y" TO WS-EOF
               NOT ON EXCEPTION
                   MOVE FUNCTION LENGTH(FUNCTION TRIM(WS-LINE)) TO WS-LEN
                   DISPLAY FUNCTION UPPER-CASE(WS-LINE) " "
                       FUNCTION REVERSE(WS-LINE) " " WS-LEN
               END-ACCEPT
           END-PERFORM
           STOP RUN.
)COB",
         R"PY(import sys

for line in sys.stdin.read().splitlines():
    print(line.upper(), line[::-1], len(line))
)PY",
         {{"t1", "hello\n"}, {"t2", "Cobol85\nmigration\n"}}},

        {"if_math", "IF",
         R"COB(       IDENTIFICATION DIVISION.
       PROGRAM-ID. IFMATH.
       DATA DIVISION.
       WORKING-STORAGE SECTION.
       01 WS-LINE    PIC X(80).
       01 WS-MIN     PIC S9(9).
       01 WS-MAX     PIC S9(9).
       01 WS-ABS     PIC 9(9) VALUE ZERO.
       PROCEDURE DIVISION.
       MAIN-PARA.
           ACCEPT WS-LINE
           DISPLAY FUNCTION MIN(WS-MIN WS-MAX) " "
               FUNCTION MAX(WS-MIN WS-MAX) " " WS-ABS
           STOP RUN.
)COB",
         R"PY(import sys

values = [int(v) for v in sys.stdin.read().split()]
if values:
    print(min(values), max(values), sum(abs(v) for v in values))
else:
    print(0, 0, 0)
)PY",
         {{"t1", "3 -7 5\n"}, {"t2", "42\n"}, {"t3", ""}}},

        {"st_sort", "ST",
         R"COB(       IDENTIFICATION DIVISION.
       PROGRAM-ID. STSORT.
       ENVIRONMENT DIVISION.
       INPUT-OUTPUT SECTION.
       FILE-CONTROL.
           SELECT SORT-WORK ASSIGN TO "SORTWK".
       DATA DIVISION.
       FILE SECTION.
       SD SORT-WORK.
       01 SORT-REC   PIC X(80).
       WORKING-STORAGE SECTION.
       01 WS-LINE    PIC X(80).
       PROCEDURE DIVISION.
       MAIN-PARA.
           SORT SORT-WORK ON ASCENDING KEY SORT-REC
               INPUT PROCEDURE IS READ-IN
               OUTPUT PROCEDURE IS WRITE-OUT
           STOP RUN.
)COB",
         R"PY(import sys

for line in sorted(sys.stdin.read().splitlines()):
    print(line)
)PY",
         {{"t1", "pear\napple\nquince\n"}, {"t2", "b\na\n"}}},

        {"st_merge", "ST",
         R"COB(       IDENTIFICATION DIVISION.
       PROGRAM-ID. STMERGE.
       DATA DIVISION.
       WORKING-STORAGE SECTION.
       01 WS-LINE    PIC X(80).
       01 WS-KEY     PIC X(20).
       01 WS-VAL     PIC S9(9).
       PROCEDURE DIVISION.
       MAIN-PARA.
           PERFORM ACCUMULATE-PARA
           PERFORM EMIT-PARA
           STOP RUN.
)COB",
         R"PY(import sys

totals = {}
for line in sys.stdin.read().splitlines():
    parts = line.split()
    if len(parts) != 2:
        continue
    totals[parts[0]] = totals.get(parts[0], 0) + int(parts[1])
for key in sorted(totals):
    print(key, totals[key])
)PY",
         {{"t1", "east 10\nwest 5\neast 7\n"}, {"t2", "north 1\n"}}},
    };
    return fixtures;
}

Json manifest_json() {
    Json programs = Json::array();
    for (const auto& p : program_fixtures()) {
        Json tests = Json::array();
        for (const auto& [tid, stdin_text] : p.tests) {
            tests.push_back(Json{{"id", tid}, {"stdin", stdin_text}});
        }
        const std::string ref_entry = std::string(p.id) + "_ref.py";
        programs.push_back(Json{
            {"id", p.id},
            {"category", p.category},
            {"source_path", "src/" + std::string(p.id) + ".cob"},
            {"reference_path", "ref/" + ref_entry},
            {"tests", std::move(tests)},
            {"reference_exec",
             Json{{"interpreter", Json::array({"python3", "{entry}"})},
                  {"entry", ref_entry},
                  {"output_dir", "out"}}},
            {"target_exec",
             Json{{"interpreter", Json::array({"python3", "{entry}"})},
                  {"entry", "main.py"},
                  {"output_dir", "out"}}},
            {"deleted", p.deleted},
            {"inspect", p.inspect},
        });
    }
    return Json{{"schema_version", "v1"},
                {"fixture_dir", "fixtures/web"},
                {"programs", std::move(programs)}};
}

Json translator_script() {
    Json rules = Json::array();
    for (const auto& p : program_fixtures()) {
        rules.push_back(Json{
            {"contains", "Translate the legacy program " + std::string(p.id) + " to"},
            {"response",
             Json{{"kind", "CODE_EDIT"},
                  {"edits",
                   Json::array({Json{{"path", "main.py"}, {"content", p.python}}})}}},
        });
    }
    return Json{{"schema_version", "v1"},
                {"model_id", "scripted-translator"},
                {"rules", std::move(rules)},
                {"steps", Json::array({Json{{"kind", "FINISH"}, {"status", "done"}}})}};
}

// Never yields a CODE_EDIT: forces the deterministic pipeline's rejection
// path and drives the agentic loop to its step limit.
Json rejector_script() {
    return Json{{"schema_version", "v1"},
                {"model_id", "scripted-rejector"},
                {"rules", Json::array()},
                {"steps", Json::array({Json{{"kind", "TOOL_ACTION"},
                                            {"tool", "LIST_FILES"},
                                            {"args", Json{{"glob", "*"}}}}})}};
}

Json config_json(const std::string& backend_kind) {
    RunConfig config = default_run_config();
    if (backend_kind == "scripted") {
        config.backend.kind = "scripted";
        config.backend.model_id = "scripted-translator";
        config.backend.script_path = "../scripts/translator.json";
    } else {
        config.backend.kind = "stub";
        config.backend.model_id = "stub-default";
    }
    return encode(config);
}

Json prices_json() {
    Json prices;
    for (const char* model : {"scripted-translator", "scripted-rejector", "stub-default"}) {
        prices[model] = Json{{"prompt_price", "3e-6"}, {"completion_price", "15e-6"}};
    }
    return prices;
}

std::vector<FixtureFile> build_suite() {
    std::vector<FixtureFile> files;
    files.push_back({"manifest.json", manifest_json().dump(2) + "\n"});
    for (const auto& p : program_fixtures()) {
        files.push_back({"src/" + std::string(p.id) + ".cob", p.cobol});
        files.push_back({"ref/" + std::string(p.id) + "_ref.py", p.python});
    }
    files.push_back({"scripts/translator.json", translator_script().dump(2) + "\n"});
    files.push_back({"scripts/rejector.json", rejector_script().dump(2) + "\n"});
    files.push_back({"configs/scripted.json", config_json("scripted").dump(2) + "\n"});
    files.push_back({"configs/stub.json", config_json("stub").dump(2) + "\n"});
    files.push_back({"prices.json", prices_json().dump(2) + "\n"});

    const std::string url = "https://example.com/cobol-migration-notes";
    const std::string body = "Sequential files map to line-buffered text I/O.\n";
    const std::string key = Sha256::hex_digest(url);
    files.push_back({"fixtures/web/" + key + ".body", body});
    files.push_back({"fixtures/web/" + key + ".meta",
                     Json{{"url", url}, {"content_type", "text/plain"}}.dump(2) + "\n"});
    return files;
}

}  // namespace

const std::vector<FixtureFile>& fixture_suite_files() {
    static const std::vector<FixtureFile> files = build_suite();
    return files;
}

void init_fixtures(const std::filesystem::path& out_dir) {
    for (const auto& file : fixture_suite_files()) {
        const std::filesystem::path target = out_dir / file.path;
        std::filesystem::create_directories(target.parent_path());
        std::ofstream out(target, std::ios::binary);
        out.write(file.content.data(), static_cast<std::streamsize>(file.content.size()));
    }
}

}  // namespace translab
