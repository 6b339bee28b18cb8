#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "translab/rational.hpp"
#include "translab/record.hpp"

namespace translab {

// CA values from the N repeated runs of one program in one mode.
struct SampleSet {
    std::string program_id;
    std::vector<Rational> samples;  // each in [0,1]

    std::size_t n() const { return samples.size(); }
};

struct MetricsConfig {
    Rational alpha = Rational(1, 10);
    Rational percentile_q = Rational(5);
    int n_runs = 1;
};

Rational mean_ca(const std::vector<Rational>& samples);

// Eq of record: successes / N, exact.
Rational success_rate(const std::vector<bool>& successes);

// Nearest-rank percentile: ascending sort, 1-based index ceil(q/100 * N).
Rational percentile_nearest_rank(const std::vector<Rational>& samples, const Rational& q);

// Mean of the k = max(1, ceil(alpha * N)) smallest samples.
Rational cvar(const std::vector<Rational>& samples, const Rational& alpha);

struct PriceEntry {
    Rational prompt_price;      // currency per prompt token
    Rational completion_price;  // currency per completion token
};

// model_id -> per-token prices. Prices parse from strings or numbers;
// strings keep exact decimal semantics ("3e-6" is exactly 3/1000000).
struct PriceTable {
    std::map<std::string, PriceEntry> entries;

    static PriceTable from_json(const Json& j);
    const PriceEntry& require(const std::string& model_id) const;  // ConfigError when absent
};

// Total tokens across all runs over successful-run count; nullopt when no
// run succeeded (reported as UNDEFINED, never thrown).
std::optional<Rational> tokens_per_success(const std::vector<RunRecord>& records);

// Priced analogue; throws ConfigError before aggregating when any model in
// the records lacks a price entry.
std::optional<Rational> cost_per_success(const std::vector<RunRecord>& records,
                                         const PriceTable& prices);

// One output row: per (program, mode) and per (category, mode) group.
struct SummaryRow {
    std::string scope;  // "program" | "category"
    std::string id;
    Mode mode = Mode::DETERMINISTIC;
    Rational ca;       // mean over runs (missing CA counts as 0)
    Rational ca_best;  // best single run
    Rational sr;
    Rational p5_ca;
    Rational cvar_alpha;
    std::optional<Rational> tokens_per_success;
    std::optional<Rational> cost_per_success;
};

struct MetricsSummary {
    MetricsConfig config;
    std::vector<SummaryRow> rows;
};

// Groups records by (program, mode), computes per-program rows, then
// category rows as unweighted means across programs (token/cost columns
// re-aggregate over the whole group instead).
MetricsSummary build_metrics_summary(const std::vector<RunRecord>& records,
                                     const std::vector<ProgramUnit>& programs,
                                     const MetricsConfig& config,
                                     const PriceTable* prices);

// CSV columns: SCOPE,ID,MODE,CA,CA_BEST,SR,P5_CA,CVAR_<alpha>,
// TOKENS_PER_SUCCESS,COST_PER_SUCCESS. Undefined ratios print as UNDEFINED.
std::string summary_to_csv(const MetricsSummary& summary);
Json summary_to_json(const MetricsSummary& summary);

// Column name for the CVaR header: alpha 1/10 -> "CVAR_0_1".
std::string cvar_column_name(const Rational& alpha);

}  // namespace translab
