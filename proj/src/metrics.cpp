#include "translab/metrics.hpp"

#include <algorithm>
#include <set>

#include "translab/errors.hpp"
#include "translab/harness.hpp"

namespace translab {

namespace {

// ceil(r) for non-negative r.
std::int64_t ceil_of(const Rational& r) {
    return (r.num() + r.den() - 1) / r.den();
}

}  // namespace

Rational mean_ca(const std::vector<Rational>& samples) {
    if (samples.empty()) throw HarnessError("mean over empty sample set");
    Rational sum(0);
    for (const auto& s : samples) sum += s;
    return sum / Rational(static_cast<std::int64_t>(samples.size()));
}

Rational success_rate(const std::vector<bool>& successes) {
    if (successes.empty()) throw HarnessError("success rate over zero runs");
    std::int64_t count = 0;
    for (bool s : successes) {
        if (s) ++count;
    }
    return Rational(count, static_cast<std::int64_t>(successes.size()));
}

Rational percentile_nearest_rank(const std::vector<Rational>& samples, const Rational& q) {
    if (samples.empty()) throw HarnessError("percentile over empty sample set");
    std::vector<Rational> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<std::int64_t>(sorted.size());
    std::int64_t index = ceil_of(q * Rational(n) / Rational(100));
    if (index < 1) index = 1;
    if (index > n) index = n;
    return sorted[static_cast<std::size_t>(index - 1)];
}

Rational cvar(const std::vector<Rational>& samples, const Rational& alpha) {
    if (samples.empty()) throw HarnessError("cvar over empty sample set");
    if (alpha <= Rational(0) || alpha > Rational(1)) {
        throw ConfigError("cvar alpha must lie in (0, 1]");
    }
    std::vector<Rational> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<std::int64_t>(sorted.size());
    std::int64_t k = ceil_of(alpha * Rational(n));
    if (k < 1) k = 1;
    if (k > n) k = n;
    Rational sum(0);
    for (std::int64_t i = 0; i < k; ++i) sum += sorted[static_cast<std::size_t>(i)];
    return sum / Rational(k);
}

PriceTable PriceTable::from_json(const Json& j) {
    PriceTable table;
    for (const auto& [model_id, entry] : j.items()) {
        auto parse = [](const Json& v) {
            if (v.is_string()) return Rational::from_string(v.get<std::string>());
            // Numeric literals re-dump through the shortest round-trip
            // representation, then parse exactly.
            return Rational::from_string(v.dump());
        };
        PriceEntry e;
        e.prompt_price = parse(entry.at("prompt_price"));
        e.completion_price = parse(entry.at("completion_price"));
        table.entries[model_id] = e;
    }
    return table;
}

const PriceEntry& PriceTable::require(const std::string& model_id) const {
    auto it = entries.find(model_id);
    if (it == entries.end()) {
        throw ConfigError("price table has no entry for model: " + model_id);
    }
    return it->second;
}

std::optional<Rational> tokens_per_success(const std::vector<RunRecord>& records) {
    std::int64_t total_tokens = 0;
    std::int64_t successes = 0;
    for (const auto& r : records) {
        total_tokens += r.ledger.totals().total();
        if (is_successful_run(r)) ++successes;
    }
    if (successes == 0) return std::nullopt;
    return Rational(total_tokens, successes);
}

std::optional<Rational> cost_per_success(const std::vector<RunRecord>& records,
                                         const PriceTable& prices) {
    // Guard before any arithmetic: every model must be priced.
    for (const auto& r : records) {
        for (const auto& call : r.ledger.calls) prices.require(call.model_id);
    }
    Rational total_cost(0);
    std::int64_t successes = 0;
    for (const auto& r : records) {
        for (const auto& call : r.ledger.calls) {
            const PriceEntry& price = prices.require(call.model_id);
            total_cost += Rational(call.usage.prompt_tokens) * price.prompt_price;
            total_cost += Rational(call.usage.completion_tokens) * price.completion_price;
        }
        if (is_successful_run(r)) ++successes;
    }
    if (successes == 0) return std::nullopt;
    return total_cost / Rational(successes);
}

std::string cvar_column_name(const Rational& alpha) {
    std::string text = alpha.decimal(6);
    for (auto& c : text) {
        if (c == '.') c = '_';
    }
    return "CVAR_" + text;
}

namespace {

struct Group {
    std::vector<Rational> ca_samples;  // missing CA scored as 0
    std::vector<bool> successes;
    std::vector<RunRecord> records;
};

SummaryRow row_from_group(std::string scope, std::string id, Mode mode, const Group& g,
                          const MetricsConfig& config, const PriceTable* prices) {
    SummaryRow row;
    row.scope = std::move(scope);
    row.id = std::move(id);
    row.mode = mode;
    row.ca = mean_ca(g.ca_samples);
    row.ca_best = *std::max_element(g.ca_samples.begin(), g.ca_samples.end());
    row.sr = success_rate(g.successes);
    row.p5_ca = percentile_nearest_rank(g.ca_samples, config.percentile_q);
    row.cvar_alpha = cvar(g.ca_samples, config.alpha);
    row.tokens_per_success = tokens_per_success(g.records);
    if (prices) row.cost_per_success = cost_per_success(g.records, *prices);
    return row;
}

}  // namespace

MetricsSummary build_metrics_summary(const std::vector<RunRecord>& records,
                                     const std::vector<ProgramUnit>& programs,
                                     const MetricsConfig& config, const PriceTable* prices) {
    MetricsSummary summary;
    summary.config = config;

    std::map<std::string, Category> category_of;
    for (const auto& p : programs) category_of[p.id] = p.category;

    std::map<std::pair<std::string, Mode>, Group> by_program;
    for (const auto& r : records) {
        Group& g = by_program[{r.program_id, r.config.mode}];
        g.ca_samples.push_back(r.ca.value_or(Rational(0)));
        g.successes.push_back(is_successful_run(r));
        g.records.push_back(r);
    }

    std::map<std::pair<Category, Mode>, std::vector<SummaryRow>> category_rows;
    std::map<std::pair<Category, Mode>, Group> category_groups;
    for (const auto& [key, group] : by_program) {
        SummaryRow row = row_from_group("program", key.first, key.second, group, config, prices);
        summary.rows.push_back(row);
        auto cat_it = category_of.find(key.first);
        const Category cat = cat_it != category_of.end() ? cat_it->second : Category::OTHER;
        category_rows[{cat, key.second}].push_back(row);
        Group& cg = category_groups[{cat, key.second}];
        cg.records.insert(cg.records.end(), group.records.begin(), group.records.end());
    }

    // Category rows: unweighted means across member programs (Eq of record
    // aggregates SR that way); token and cost ratios re-derive from the
    // pooled records so the denominators stay meaningful.
    for (const auto& [key, rows] : category_rows) {
        SummaryRow row;
        row.scope = "category";
        row.id = to_string(key.first);
        row.mode = key.second;
        Rational n(static_cast<std::int64_t>(rows.size()));
        Rational ca(0), ca_best(0), sr(0), p5(0), cv(0);
        for (const auto& r : rows) {
            ca += r.ca;
            ca_best += r.ca_best;
            sr += r.sr;
            p5 += r.p5_ca;
            cv += r.cvar_alpha;
        }
        row.ca = ca / n;
        row.ca_best = ca_best / n;
        row.sr = sr / n;
        row.p5_ca = p5 / n;
        row.cvar_alpha = cv / n;
        const Group& cg = category_groups[key];
        row.tokens_per_success = tokens_per_success(cg.records);
        if (prices) row.cost_per_success = cost_per_success(cg.records, *prices);
        summary.rows.push_back(std::move(row));
    }

    std::sort(summary.rows.begin(), summary.rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
        if (a.scope != b.scope) return a.scope > b.scope;  // "program" before "category"
        if (a.id != b.id) return a.id < b.id;
        return to_string(a.mode) < to_string(b.mode);
    });
    return summary;
}

namespace {

std::string cell(const Rational& r) { return r.decimal(6); }

std::string cell(const std::optional<Rational>& r) {
    return r ? r->decimal(6) : "UNDEFINED";
}

}  // namespace

std::string summary_to_csv(const MetricsSummary& summary) {
    std::string out = "SCOPE,ID,MODE,CA,CA_BEST,SR,P5_CA," +
                      cvar_column_name(summary.config.alpha) +
                      ",TOKENS_PER_SUCCESS,COST_PER_SUCCESS\n";
    for (const auto& row : summary.rows) {
        out += row.scope + ',' + row.id + ',' + to_string(row.mode) + ',' + cell(row.ca) + ',' +
               cell(row.ca_best) + ',' + cell(row.sr) + ',' + cell(row.p5_ca) + ',' +
               cell(row.cvar_alpha) + ',' + cell(row.tokens_per_success) + ',' +
               cell(row.cost_per_success) + '\n';
    }
    return out;
}

Json summary_to_json(const MetricsSummary& summary) {
    Json rows = Json::array();
    const std::string cvar_key = cvar_column_name(summary.config.alpha);
    for (const auto& row : summary.rows) {
        Json r;
        r["scope"] = row.scope;
        r["id"] = row.id;
        r["mode"] = to_string(row.mode);
        r["CA"] = row.ca.str();
        r["CA_BEST"] = row.ca_best.str();
        r["SR"] = row.sr.str();
        r["P5_CA"] = row.p5_ca.str();
        r[cvar_key] = row.cvar_alpha.str();
        r["TOKENS_PER_SUCCESS"] =
            row.tokens_per_success ? Json(row.tokens_per_success->str()) : Json(nullptr);
        r["COST_PER_SUCCESS"] =
            row.cost_per_success ? Json(row.cost_per_success->str()) : Json(nullptr);
        rows.push_back(std::move(r));
    }
    return Json{{"schema_version", "v1"},
                {"alpha", summary.config.alpha.str()},
                {"percentile_q", summary.config.percentile_q.str()},
                {"rows", std::move(rows)}};
}

}  // namespace translab
