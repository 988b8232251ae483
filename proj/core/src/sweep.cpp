#include "timflow/sweep.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "timflow/errors.hpp"
#include "timflow/io.hpp"

namespace timflow {

using nlohmann::json;

bool run_converged(const EvaluationReport& report) {
    return report.coverage_fraction >= kConvergedCoverage &&
           report.taboo_violation_fraction <= kConvergedTaboo &&
           report.void_area_fraction <= kConvergedVoidArea;
}

namespace {

bool in_weight_set(double w) {
    for (const double allowed : {0.0, 10.0, 100.0, 1000.0, 10000.0})
        if (w == allowed) return true;
    return false;
}

}  // namespace

void validate_sweep(const SweepConfig& sweep) {
    if (sweep.runs_per_config < 1)
        throw ValidationError("sweep: runs_per_config must be >= 1");
    if (sweep.iterations < 1) throw ValidationError("sweep: iterations must be >= 1");
    if (sweep.segments.first > sweep.segments.second || sweep.segments.first < 1 ||
        sweep.segments.second > 10)
        throw ValidationError("sweep: segment range must lie within [1, 10]");
    if (sweep.configs.empty()) throw ValidationError("sweep: no configurations given");
    for (std::size_t i = 0; i < sweep.configs.size(); ++i) {
        const ObjectiveConfig& c = sweep.configs[i];
        validate_config(c);
        for (const double w : {c.w_comp_tab, c.w_init_over, c.w_void_bin, c.w_void_area}) {
            if (!in_weight_set(w))
                throw ValidationError("sweep config " + std::to_string(i) +
                                      ": swept weights must be one of {0, 10, 100, 1000, 10000}");
        }
    }
}

SweepRow row_from_records(const ObjectiveConfig& config,
                          const std::vector<SweepRunRecord>& records) {
    SweepRow row;
    row.config = config;
    row.runs = static_cast<int>(records.size());
    if (records.empty()) return row;
    double coverage = 0.0;
    int converged = 0;
    for (const SweepRunRecord& r : records) {
        coverage += r.coverage_fraction;
        if (r.converged) ++converged;
    }
    row.coverage_ratio = coverage / static_cast<double>(records.size());
    row.convergence_ratio = static_cast<double>(converged) / static_cast<double>(records.size());
    row.average_performance = (row.coverage_ratio + row.convergence_ratio) / 2.0;
    return row;
}

SweepOutcome run_sweep(const Product& product, const SweepConfig& sweep,
                       std::uint64_t base_seed, int parallelism,
                       const RasterSettings& raster, const FlowSettings& flow,
                       const std::function<void(int, int)>& per_config_progress) {
    validate_product(product);
    validate_sweep(sweep);

    SweepOutcome outcome;
    const int total = static_cast<int>(sweep.configs.size());
    for (int ci = 0; ci < total; ++ci) {
        if (per_config_progress) per_config_progress(ci, total);
        const ObjectiveConfig& config = sweep.configs[static_cast<std::size_t>(ci)];
        std::vector<SweepRunRecord> config_records;
        try {
            const Evaluator evaluator(product, config, product.gap, false, raster, flow);
            CmaesConfig cmaes;
            cmaes.max_iterations = sweep.iterations;
            cmaes.seed = base_seed + static_cast<std::uint64_t>(ci) * 1000003ULL;
            std::vector<std::string> failures;
            const std::vector<TrialResult> trials =
                run_trials(evaluator, sweep.segments, sweep.runs_per_config, cmaes, parallelism,
                           {}, &failures);
            for (const std::string& f : failures)
                outcome.failures.push_back("config " + std::to_string(ci) + ": " + f);
            for (const TrialResult& t : trials) {
                SweepRunRecord record;
                record.config_index = ci;
                record.seed = t.seed;
                record.segments = t.segments;
                record.coverage_fraction = t.best_report.coverage_fraction;
                record.taboo_violation_fraction = t.best_report.taboo_violation_fraction;
                record.void_area_fraction = t.best_report.void_area_fraction;
                record.total_loss = t.best_report.total_loss;
                record.converged = run_converged(t.best_report);
                config_records.push_back(record);
            }
        } catch (const std::exception& e) {
            outcome.failures.push_back("config " + std::to_string(ci) + ": " + e.what());
        }
        outcome.rows.push_back(row_from_records(config, config_records));
        outcome.records.insert(outcome.records.end(), config_records.begin(),
                               config_records.end());
    }
    return outcome;
}

namespace {

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
}

}  // namespace

SweepConfig parse_sweep_json(const std::string& text) {
    const json j = parse_text(text);
    if (!j.contains("schema") || j.at("schema") != "timflow.sweep/1")
        throw ParseError("expected schema 'timflow.sweep/1'");
    SweepConfig sweep;
    try {
        sweep.runs_per_config = j.at("runs_per_config").get<int>();
        sweep.iterations = j.at("iterations").get<int>();
        const json segments = j.at("segments");
        if (!segments.is_array() || segments.size() != 2)
            throw ParseError("'segments' must be [lo, hi]");
        sweep.segments = {segments[0].get<int>(), segments[1].get<int>()};
        for (const json& c : j.at("configs"))
            sweep.configs.push_back(parse_config_json(c.dump()));
    } catch (const json::exception& e) {
        throw ParseError(e.what());
    }
    validate_sweep(sweep);
    return sweep;
}

SweepConfig load_sweep(const std::string& file) { return parse_sweep_json(read_text_file(file)); }

std::string sweep_rows_to_json(const std::vector<SweepRow>& rows) {
    json out = json::array();
    for (const SweepRow& row : rows)
        out.push_back({{"config", json::parse(config_to_json(row.config))},
                       {"runs", row.runs},
                       {"coverage_ratio", row.coverage_ratio},
                       {"convergence_ratio", row.convergence_ratio},
                       {"average_performance", row.average_performance}});
    return json{{"schema", "timflow.sweep-rows/1"}, {"rows", out}}.dump(2);
}

std::vector<SweepRow> parse_sweep_rows_json(const std::string& text) {
    const json j = parse_text(text);
    if (!j.contains("schema") || j.at("schema") != "timflow.sweep-rows/1")
        throw ParseError("expected schema 'timflow.sweep-rows/1'");
    std::vector<SweepRow> rows;
    try {
        for (const json& r : j.at("rows")) {
            SweepRow row;
            row.config = parse_config_json(r.at("config").dump());
            row.runs = r.at("runs").get<int>();
            row.coverage_ratio = r.at("coverage_ratio").get<double>();
            row.convergence_ratio = r.at("convergence_ratio").get<double>();
            row.average_performance = r.at("average_performance").get<double>();
            rows.push_back(std::move(row));
        }
    } catch (const json::exception& e) {
        throw ParseError(e.what());
    }
    return rows;
}

std::string sweep_records_to_json(const std::vector<SweepRunRecord>& records) {
    json out = json::array();
    for (const SweepRunRecord& r : records)
        out.push_back({{"config_index", r.config_index},
                       {"seed", r.seed},
                       {"segments", r.segments},
                       {"coverage_fraction", r.coverage_fraction},
                       {"taboo_violation_fraction", r.taboo_violation_fraction},
                       {"void_area_fraction", r.void_area_fraction},
                       {"total_loss", r.total_loss},
                       {"converged", r.converged}});
    return json{{"schema", "timflow.sweep-records/1"}, {"records", out}}.dump(2);
}

std::vector<SweepRunRecord> parse_sweep_records_json(const std::string& text) {
    const json j = parse_text(text);
    if (!j.contains("schema") || j.at("schema") != "timflow.sweep-records/1")
        throw ParseError("expected schema 'timflow.sweep-records/1'");
    std::vector<SweepRunRecord> records;
    try {
        for (const json& r : j.at("records")) {
            SweepRunRecord record;
            record.config_index = r.at("config_index").get<int>();
            record.seed = r.at("seed").get<std::uint64_t>();
            record.segments = r.at("segments").get<int>();
            record.coverage_fraction = r.at("coverage_fraction").get<double>();
            record.taboo_violation_fraction = r.at("taboo_violation_fraction").get<double>();
            record.void_area_fraction = r.at("void_area_fraction").get<double>();
            record.total_loss = r.at("total_loss").get<double>();
            record.converged = r.at("converged").get<bool>();
            records.push_back(record);
        }
    } catch (const json::exception& e) {
        throw ParseError(e.what());
    }
    return records;
}

}  // namespace timflow
