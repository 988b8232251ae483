// timflow - coverage path planning for dispensed thermal interface material.
//
// Subcommands: evaluate, optimize, compare, sweep, render.
// Exit codes: 0 ok, 1 internal error, 2 parse error, 3 validation error,
// 4 flow non-convergence.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "timflow/errors.hpp"
#include "timflow/io.hpp"
#include "timflow/objective.hpp"
#include "timflow/optimize.hpp"
#include "timflow/render.hpp"
#include "timflow/sweep.hpp"

namespace fs = std::filesystem;
using namespace timflow;

namespace {

std::pair<int, int> parse_segments(const std::string& spec) {
    const auto dash = spec.find('-');
    try {
        if (dash == std::string::npos) {
            const int n = std::stoi(spec);
            return {n, n};
        }
        return {std::stoi(spec.substr(0, dash)), std::stoi(spec.substr(dash + 1))};
    } catch (const std::exception&) {
        throw ParseError("--segments expects N or LO-HI, got '" + spec + "'");
    }
}

Product load_any_product(const std::string& file, const GapSpec& pixmap_gap) {
    const std::string ext = fs::path(file).extension().string();
    if (ext == ".ppm" || ext == ".pnm") return load_product_pixmap(file, pixmap_gap);
    return load_product(file);
}

DispensePath load_path_sized(const std::string& file, const Evaluator& evaluator) {
    DispensePath path = load_path(file);
    if (path.feedrate <= 0.0)
        path.feedrate = feedrate_for_path(path.points, evaluator.required_volume());
    return path;
}

void print_report_line(const std::string& label, const EvaluationReport& report) {
    std::printf("%-12s loss=%.6g coverage=%.4f overflow=%.4f taboo=%.5f voids(init/med)=%g/%g\n",
                label.c_str(), report.total_loss, report.coverage_fraction,
                report.overflow_ratio, report.taboo_violation_fraction,
                report.l_void_bin_init, report.l_void_bin_med);
}

struct CommonOptions {
    std::string product_file;
    std::string config_file;
    int fine_scale = 20;
    double bead_width = 1.0;
    GapSpec pixmap_gap;  // used only when the product is a pixmap

    Product product() const { return load_any_product(product_file, pixmap_gap); }
    ObjectiveConfig config() const {
        return config_file.empty() ? ObjectiveConfig{} : load_config(config_file);
    }
    RasterSettings raster() const { return {fine_scale, bead_width}; }
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--product", opt.product_file, "product document (.json or .ppm)")
        ->required();
    cmd->add_option("--config", opt.config_file, "objective configuration (.json)");
    cmd->add_option("--fine-scale", opt.fine_scale, "fine raster upscale factor")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--bead-width", opt.bead_width, "bead width in grid cells")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--pixmap-gap-final", opt.pixmap_gap.g_final,
                    "nominal gap height for pixmap products");
    cmd->add_option("--pixmap-gap-max", opt.pixmap_gap.g_max,
                    "max gap height for pixmap products");
    cmd->add_option("--pixmap-gap-min", opt.pixmap_gap.g_min,
                    "min gap height for pixmap products");
}

int cmd_evaluate(const CommonOptions& common, const std::string& path_file, bool tolerance,
                 const std::string& out_dir, bool render_images) {
    const Product product = common.product();
    const Evaluator evaluator(product, common.config(), product.gap, tolerance,
                              common.raster());
    const DispensePath path = load_path_sized(path_file, evaluator);
    const EvaluationReport report = evaluator.evaluate(path);

    fs::create_directories(out_dir);
    write_text_file_atomic((fs::path(out_dir) / "report.json").string(),
                           report_to_json(report));
    if (render_images) {
        write_ppm((fs::path(out_dir) / "initial.ppm").string(),
                  render_state(product, report.initial, product.gap.g_final, &path));
        write_ppm((fs::path(out_dir) / "compressed.ppm").string(),
                  render_state(product, report.final_state,
                               tolerance ? product.gap.g_min : product.gap.g_final, &path));
    }
    print_report_line("evaluate", report);
    std::printf("report: %s\n", (fs::path(out_dir) / "report.json").string().c_str());
    return 0;
}

int cmd_optimize(const CommonOptions& common, int trials, const std::string& segments,
                 std::uint64_t seed, int parallelism, bool tolerance, int iterations,
                 double sigma0, int population, const std::string& out_dir, int top_k,
                 bool resume) {
    const Product product = common.product();
    const Evaluator evaluator(product, common.config(), product.gap, tolerance,
                              common.raster());
    const std::pair<int, int> segment_range = parse_segments(segments);

    TrialStore store(out_dir);
    if (store.count() > 0 && !resume)
        std::fprintf(stderr,
                     "note: %d existing trial(s) in %s; appending (use --resume to shift "
                     "seeds past them)\n",
                     store.count(), out_dir.c_str());
    CmaesConfig cmaes;
    cmaes.seed = seed + (resume ? static_cast<std::uint64_t>(store.count()) : 0);
    cmaes.max_iterations = iterations;
    cmaes.sigma0 = sigma0;
    cmaes.population = population;

    std::vector<std::string> failures;
    const std::vector<TrialResult> results =
        run_trials(evaluator, segment_range, trials, cmaes, parallelism,
                   [&](const TrialResult& trial) { store.append(trial); }, &failures);
    for (const std::string& f : failures) std::fprintf(stderr, "failed: %s\n", f.c_str());
    if (results.empty()) {
        std::fprintf(stderr, "no trial succeeded\n");
        return 1;
    }

    const int k = std::min(top_k, static_cast<int>(results.size()));
    std::string summary = "{\n  \"schema\": \"timflow.optimize-summary/1\",\n  \"top\": [\n";
    for (int i = 0; i < k; ++i) {
        const EvaluationReport& r = results[static_cast<std::size_t>(i)].best_report;
        char line[256];
        std::snprintf(line, sizeof line,
                      "    {\"rank\": %d, \"seed\": %llu, \"segments\": %d, "
                      "\"coverage_fraction\": %.17g, \"total_loss\": %.17g}%s\n",
                      i + 1,
                      static_cast<unsigned long long>(results[static_cast<std::size_t>(i)].seed),
                      results[static_cast<std::size_t>(i)].segments, r.coverage_fraction,
                      r.total_loss, i + 1 == k ? "" : ",");
        summary += line;
    }
    summary += "  ]\n}\n";
    write_text_file_atomic((fs::path(out_dir) / "summary.json").string(), summary);

    const TrialResult& best = results.front();
    write_text_file_atomic((fs::path(out_dir) / "best_path.json").string(),
                           path_to_json(best.best_path));
    write_text_file_atomic((fs::path(out_dir) / "best_report.json").string(),
                           report_to_json(best.best_report));
    write_ppm((fs::path(out_dir) / "best.ppm").string(),
              render_state(product, best.best_report.final_state,
                           tolerance ? product.gap.g_min : product.gap.g_final,
                           &best.best_path));

    std::printf("%d/%d trials succeeded; top %d:\n", static_cast<int>(results.size()), trials,
                k);
    for (int i = 0; i < k; ++i) {
        const TrialResult& t = results[static_cast<std::size_t>(i)];
        std::printf("  #%d seed=%llu segments=%d coverage=%.4f loss=%.6g\n", i + 1,
                    static_cast<unsigned long long>(t.seed), t.segments,
                    t.best_report.coverage_fraction, t.best_report.total_loss);
    }
    return 0;
}

int cmd_compare(const CommonOptions& common, const std::string& expert_file,
                const std::string& optimized_file, double target_coverage,
                const std::string& out_file) {
    const Product product = common.product();
    const Evaluator evaluator(product, common.config(), product.gap, false, common.raster());

    struct Side {
        const char* label;
        std::string file;
        DispensePath path;
        EvaluationReport report;
        bool calibrated = false;
        std::string error;
    };
    Side sides[2] = {{"expert", expert_file, {}, {}, false, {}},
                     {"optimized", optimized_file, {}, {}, false, {}}};

    for (Side& side : sides) {
        try {
            side.path = load_path(side.file);
            side.path.feedrate = calibrate_amount(evaluator, side.path, target_coverage);
            side.report = evaluator.evaluate(side.path);
            side.calibrated = true;
        } catch (const ValidationError& e) {
            side.error = e.what();
        }
    }

    std::string out = "{\n  \"schema\": \"timflow.compare/1\",\n";
    char buf[512];
    std::snprintf(buf, sizeof buf, "  \"target_coverage\": %.17g,\n", target_coverage);
    out += buf;
    for (int i = 0; i < 2; ++i) {
        const Side& side = sides[i];
        if (side.calibrated) {
            std::snprintf(
                buf, sizeof buf,
                "  \"%s\": {\"segments\": %d, \"coverage_fraction\": %.17g, "
                "\"overflow_ratio\": %.17g, \"taboo_violation_fraction\": %.17g, "
                "\"void_bin_init\": %g, \"void_bin_med\": %g}%s\n",
                side.label, static_cast<int>(side.path.segment_count()),
                side.report.coverage_fraction, side.report.overflow_ratio,
                side.report.taboo_violation_fraction, side.report.l_void_bin_init,
                side.report.l_void_bin_med, i == 0 ? "," : "");
        } else {
            std::snprintf(buf, sizeof buf, "  \"%s\": {\"error\": \"calibration failed\"}%s\n",
                          side.label, i == 0 ? "," : "");
        }
        out += buf;
    }
    out += "}\n";
    write_text_file_atomic(out_file, out);

    for (const Side& side : sides) {
        if (side.calibrated) print_report_line(side.label, side.report);
        else std::printf("%-12s calibration failed: %s\n", side.label, side.error.c_str());
    }
    if (sides[0].calibrated && sides[1].calibrated) {
        const double delta = std::abs(sides[0].report.coverage_fraction -
                                      sides[1].report.coverage_fraction);
        std::printf("coverage parity |delta| = %.5f\n", delta);
        std::printf("overflow ratio: expert %.4f vs optimized %.4f\n",
                    sides[0].report.overflow_ratio, sides[1].report.overflow_ratio);
    }
    std::printf("comparison: %s\n", out_file.c_str());
    return 0;
}

int cmd_sweep(const CommonOptions& common, const std::string& sweep_file,
              const std::string& out_dir, std::uint64_t seed, int parallelism,
              int runs_override, int iterations_override) {
    const Product product = common.product();
    SweepConfig sweep = load_sweep(sweep_file);
    if (runs_override > 0) sweep.runs_per_config = runs_override;
    if (iterations_override > 0) sweep.iterations = iterations_override;

    const SweepOutcome outcome = run_sweep(
        product, sweep, seed, parallelism, common.raster(), {},
        [&](int i, int total) { std::printf("config %d/%d...\n", i + 1, total); });

    fs::create_directories(out_dir);
    write_text_file_atomic((fs::path(out_dir) / "rows.json").string(),
                           sweep_rows_to_json(outcome.rows));
    write_text_file_atomic((fs::path(out_dir) / "records.json").string(),
                           sweep_records_to_json(outcome.records));
    std::vector<std::vector<double>> table;
    for (const SweepRow& row : outcome.rows)
        table.push_back({row.coverage_ratio, row.convergence_ratio, row.average_performance});
    write_ppm((fs::path(out_dir) / "table.ppm").string(), render_heat_table(table));

    for (const std::string& f : outcome.failures)
        std::fprintf(stderr, "sweep failure: %s\n", f.c_str());
    std::printf("%-6s %-10s %-12s %-10s\n", "row", "coverage", "convergence", "average");
    for (std::size_t i = 0; i < outcome.rows.size(); ++i)
        std::printf("%-6zu %-10.4f %-12.4f %-10.4f\n", i, outcome.rows[i].coverage_ratio,
                    outcome.rows[i].convergence_ratio, outcome.rows[i].average_performance);
    return 0;
}

int cmd_render(const CommonOptions& common, const std::string& path_file,
               const std::string& report_file, const std::string& out_file, int scale,
               bool ascii) {
    const Product product = common.product();
    Pixmap image;
    if (!report_file.empty()) {
        const EvaluationReport report = parse_report_json(read_text_file(report_file));
        image = render_state(product, report.final_state, report.gaps.back().gap, nullptr,
                             scale);
    } else if (!path_file.empty()) {
        const DispensePath path = load_path(path_file);
        const MaterialGrid empty(product.grid_width, product.grid_height, product.cell_size);
        image = render_state(product, empty, product.gap.g_final, &path, scale);
    } else {
        image = render_product(product, scale);
    }
    write_ppm(out_file, image, ascii);
    std::printf("wrote %s (%dx%d)\n", out_file.c_str(), image.width, image.height);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coverage path planning for thermal interface material dispensing"};
    app.require_subcommand(1);

    CommonOptions common;

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "score one dispense path");
    std::string path_file, out_dir = "timflow-out";
    bool tolerance = false, no_render = false;
    add_common(evaluate, common);
    evaluate->add_option("--path", path_file, "dispense path (.json)")->required();
    evaluate->add_flag("--tolerance-mode", tolerance,
                       "evaluate coverage at g_max and g_min");
    evaluate->add_option("--out-dir", out_dir, "output directory");
    evaluate->add_flag("--no-render", no_render, "skip image output");

    // optimize
    auto* optimize_cmd = app.add_subcommand("optimize", "search for a dispense path");
    int trials = 10, parallelism = 1, iterations = 1000, top_k = 5, population = 0;
    std::uint64_t seed = 1;
    double sigma0 = 0.0;
    std::string segments = "5-10";
    bool resume = false;
    add_common(optimize_cmd, common);
    optimize_cmd->add_option("--trials", trials)->check(CLI::PositiveNumber);
    optimize_cmd->add_option("--segments", segments, "segment count N or range LO-HI");
    optimize_cmd->add_option("--seed", seed);
    optimize_cmd->add_option("--parallelism", parallelism)->check(CLI::PositiveNumber);
    optimize_cmd->add_flag("--tolerance-mode", tolerance);
    optimize_cmd->add_option("--iterations", iterations)->check(CLI::PositiveNumber);
    optimize_cmd->add_option("--sigma0", sigma0, "initial step size (0 = grid/4)");
    optimize_cmd->add_option("--population", population, "0 = default");
    optimize_cmd->add_option("--out-dir", out_dir, "trial store directory");
    optimize_cmd->add_option("--top-k", top_k)->check(CLI::PositiveNumber);
    optimize_cmd->add_flag("--resume", resume, "shift seeds past existing trials");

    // compare
    auto* compare = app.add_subcommand("compare", "expert path vs optimized path");
    std::string expert_file, optimized_file, compare_out = "compare.json";
    double target_coverage = 0.95;
    add_common(compare, common);
    compare->add_option("--expert", expert_file, "expert path (.json)")->required();
    compare->add_option("--optimized", optimized_file, "optimized path (.json)")->required();
    compare->add_option("--target-coverage", target_coverage)
        ->check(CLI::Range(0.01, 1.0));
    compare->add_option("--out", compare_out);

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "objective hyperparameter study");
    std::string sweep_file;
    int runs_override = 0, iterations_override = 0;
    add_common(sweep_cmd, common);
    sweep_cmd->add_option("--sweep", sweep_file, "sweep document (.json)")->required();
    sweep_cmd->add_option("--out-dir", out_dir);
    sweep_cmd->add_option("--seed", seed);
    sweep_cmd->add_option("--parallelism", parallelism)->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--runs", runs_override, "override runs_per_config");
    sweep_cmd->add_option("--iterations", iterations_override, "override iterations");

    // render
    auto* render_cmd = app.add_subcommand("render", "write a pixmap of a product/path/report");
    std::string render_path_file, report_file, render_out = "render.ppm";
    int scale = 8;
    bool ascii = false;
    add_common(render_cmd, common);
    render_cmd->add_option("--path", render_path_file, "overlay this path");
    render_cmd->add_option("--report", report_file, "render a report's compressed state");
    render_cmd->add_option("--out", render_out)->required();
    render_cmd->add_option("--scale", scale)->check(CLI::PositiveNumber);
    render_cmd->add_flag("--ascii", ascii, "write P3 instead of P6");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*evaluate) return cmd_evaluate(common, path_file, tolerance, out_dir, !no_render);
        if (*optimize_cmd)
            return cmd_optimize(common, trials, segments, seed, parallelism, tolerance,
                                iterations, sigma0, population, out_dir, top_k, resume);
        if (*compare)
            return cmd_compare(common, expert_file, optimized_file, target_coverage,
                               compare_out);
        if (*sweep_cmd)
            return cmd_sweep(common, sweep_file, out_dir, seed, parallelism, runs_override,
                             iterations_override);
        if (*render_cmd)
            return cmd_render(common, render_path_file, report_file, render_out, scale, ascii);
    } catch (const ParseError& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return 2;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 3;
    } catch (const FlowError& e) {
        std::fprintf(stderr, "flow error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
