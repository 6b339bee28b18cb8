#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "translab/errors.hpp"
#include "translab/harness.hpp"
#include "translab/metrics.hpp"
#include "translab/model.hpp"
#include "translab/plan.hpp"
#include "translab/rational.hpp"
#include "translab/serialize.hpp"
#include "translab/sha256.hpp"
#include "translab/trace.hpp"

namespace py = pybind11;

namespace {

using namespace translab;

Json parse_json(const std::string& text) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) throw SchemaError("invalid JSON");
    return j;
}

// Rationals cross the boundary as (num, den) tuples; ints and strings like
// "0.25" or "1/10" are accepted on the way in.
Rational to_rational(const py::object& v) {
    if (py::isinstance<py::tuple>(v)) {
        auto t = v.cast<std::pair<std::int64_t, std::int64_t>>();
        return Rational(t.first, t.second);
    }
    if (py::isinstance<py::int_>(v)) return Rational(v.cast<std::int64_t>(), 1);
    if (py::isinstance<py::str>(v)) return Rational::from_string(v.cast<std::string>());
    throw py::type_error("expected (num, den) tuple, int, or decimal string");
}

py::tuple from_rational(const Rational& r) { return py::make_tuple(r.num(), r.den()); }

std::vector<Rational> to_samples(const std::vector<py::object>& values) {
    std::vector<Rational> out;
    out.reserve(values.size());
    for (const auto& v : values) out.push_back(to_rational(v));
    return out;
}

NormalizationPolicy make_policy(bool normalize_newlines, bool strip_trailing_ws,
                                bool strip_trailing_blank_lines, bool compare_stderr) {
    NormalizationPolicy p;
    p.normalize_newlines = normalize_newlines;
    p.strip_trailing_ws = strip_trailing_ws;
    p.strip_trailing_blank_lines = strip_trailing_blank_lines;
    p.compare_stderr = compare_stderr;
    return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exact-rational metrics, canonical trace hashing, and plan "
              "evaluation for the translation harness";

    py::register_exception<Error>(m, "CoreError");

    m.def("rational_from_string",
          [](const std::string& s) { return from_rational(Rational::from_string(s)); },
          py::arg("text"));
    m.def("rational_decimal",
          [](const py::object& v, int digits) { return to_rational(v).decimal(digits); },
          py::arg("value"), py::arg("digits") = 12);

    m.def("mean_ca",
          [](const std::vector<py::object>& samples) {
              return from_rational(mean_ca(to_samples(samples)));
          },
          py::arg("samples"));
    m.def("success_rate",
          [](const std::vector<bool>& successes) { return from_rational(success_rate(successes)); },
          py::arg("successes"));
    m.def("percentile_nearest_rank",
          [](const std::vector<py::object>& samples, const py::object& q) {
              return from_rational(percentile_nearest_rank(to_samples(samples), to_rational(q)));
          },
          py::arg("samples"), py::arg("q"));
    m.def("cvar",
          [](const std::vector<py::object>& samples, const py::object& alpha) {
              return from_rational(cvar(to_samples(samples), to_rational(alpha)));
          },
          py::arg("samples"), py::arg("alpha"));
    m.def("cvar_column_name",
          [](const py::object& alpha) { return cvar_column_name(to_rational(alpha)); },
          py::arg("alpha"));

    m.def("canonicalize_trace",
          [](const std::string& trace_json) {
              return encode(canonicalize(decode_trace(parse_json(trace_json)))).dump();
          },
          py::arg("trace_json"), "Re-canonicalize a serialized trace (idempotent).");
    m.def("trace_hash_hex",
          [](const std::string& trace_json) {
              return trace_hash_hex(decode_trace(parse_json(trace_json)));
          },
          py::arg("trace_json"));
    m.def("divergence_point",
          [](const std::string& a_json, const std::string& b_json) {
              return divergence_point(decode_trace(parse_json(a_json)),
                                      decode_trace(parse_json(b_json)));
          },
          py::arg("a_json"), py::arg("b_json"));

    m.def("build_stage_plan",
          [](const std::string& config_json) {
              return encode(build_stage_plan(decode_run_config(parse_json(config_json)))).dump();
          },
          py::arg("config_json"));
    m.def("evaluate_gate",
          [](const std::string& gate_json, const std::string& state_json,
             const std::string& config_json) {
              return evaluate_gate(decode_gate(parse_json(gate_json)),
                                   decode_system_state(parse_json(state_json)),
                                   decode_run_config(parse_json(config_json)));
          },
          py::arg("gate_json"), py::arg("state_json"), py::arg("config_json"));
    m.def("default_run_config", [] { return encode(default_run_config()).dump(); });
    m.def("config_fingerprint",
          [](const std::string& config_json) {
              return config_fingerprint(decode_run_config(parse_json(config_json)));
          },
          py::arg("config_json"));

    m.def("outcomes_equal",
          [](const std::string& a_json, const std::string& b_json, bool normalize_newlines,
             bool strip_trailing_ws, bool strip_trailing_blank_lines, bool compare_stderr) {
              return outcomes_equal(decode_outcome(parse_json(a_json)),
                                    decode_outcome(parse_json(b_json)),
                                    make_policy(normalize_newlines, strip_trailing_ws,
                                                strip_trailing_blank_lines, compare_stderr));
          },
          py::arg("a_json"), py::arg("b_json"), py::arg("normalize_newlines") = true,
          py::arg("strip_trailing_ws") = true, py::arg("strip_trailing_blank_lines") = true,
          py::arg("compare_stderr") = false);
    m.def("normalize_text",
          [](const std::string& text, bool normalize_newlines, bool strip_trailing_ws,
             bool strip_trailing_blank_lines) {
              return normalize_text(text, make_policy(normalize_newlines, strip_trailing_ws,
                                                      strip_trailing_blank_lines, false));
          },
          py::arg("text"), py::arg("normalize_newlines") = true,
          py::arg("strip_trailing_ws") = true, py::arg("strip_trailing_blank_lines") = true);

    m.def("estimate_tokens", [](const std::string& content) { return estimate_tokens(content); },
          py::arg("content"));
    m.def("sha256_hex", [](const std::string& data) { return Sha256::hex_digest(data); },
          py::arg("data"));
}
