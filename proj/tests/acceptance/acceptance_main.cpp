// Acceptance suite: one check per numbered criterion, each printing a
// PASS/FAIL line with its key numbers. Run with --criterion N for a single
// criterion, without arguments for all nine. Criterion 9 drives the CLI
// binary named by the TIMFLOW_CLI environment variable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "timflow/cmaes.hpp"
#include "timflow/fixtures.hpp"
#include "timflow/flow.hpp"
#include "timflow/imageops.hpp"
#include "timflow/io.hpp"
#include "timflow/objective.hpp"
#include "timflow/optimize.hpp"
#include "timflow/raster.hpp"
#include "timflow/sweep.hpp"

namespace fs = std::filesystem;
using namespace timflow;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

// ---------------------------------------------------------------- criterion 1
// volume conservation through rasterization plus full compression
Outcome criterion_conservation() {
    std::mt19937 rng(1001);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int segments = 1 + static_cast<int>(rng() % 10);
        const double volume = 50.0 + static_cast<double>(rng() % 1000);
        const DispensePath path = oracles::random_path(rng, 50, 50, segments, volume, -3.0);
        const MaterialGrid initial = rasterize_coarse(path, 50, 50, 1.0);
        const double expected = path.feedrate * polyline_length(path.points);

        const GapSpec gap{0.8, 0.8, 0.8, 10};
        const FlowTrace trace = compress(initial, gap, 0.8);
        const double final_total = trace.final_state().total_volume();
        worst = std::max(worst, std::abs(final_total - expected) / expected);
    }
    return {worst <= 1e-9, "worst relative drift " + std::to_string(worst) + " over 100 paths"};
}

// ---------------------------------------------------------------- criterion 2
Outcome criterion_imageops() {
    std::mt19937 rng(2002);
    for (int trial = 0; trial < 200; ++trial) {
        const int w = 5 + static_cast<int>(rng() % 46);
        const int h = 5 + static_cast<int>(rng() % 46);
        BitField mask = oracles::random_mask(rng, w, h, 0.02 + 0.18 * (trial % 5));
        if (mask.count() == 0)
            mask.at(static_cast<int>(rng() % w), static_cast<int>(rng() % h)) = 1;
        if (distance_transform_squared(mask) != oracles::brute_force_distance_sq(mask))
            return {false, "distance transform mismatch at trial " + std::to_string(trial)};
    }

    for (int trial = 0; trial < 200; ++trial) {
        const BitField mask = oracles::random_mask(rng, 40, 40, 0.45);
        for (const Connectivity conn : {Connectivity::four, Connectivity::eight}) {
            const LabeledComponents ours = connected_components(mask, conn);
            const LabeledComponents ref = oracles::flood_fill_components(mask, conn);
            if (ours.component_count != ref.component_count ||
                !oracles::same_partition(ours.label_map, ref.label_map))
                return {false, "component labeling mismatch at trial " + std::to_string(trial)};
        }
        const VoidStats ours = enclosed_voids(mask);
        const VoidStats ref = oracles::flood_fill_voids(mask);
        if (ours.count != ref.count || ours.area != ref.area)
            return {false, "void mismatch at trial " + std::to_string(trial)};
    }

    // constructed fixtures: ring and nested rings
    auto ring = [](BitField& m, int x0, int y0, int x1, int y1) {
        for (int x = x0; x <= x1; ++x) m.at(x, y0) = m.at(x, y1) = 1;
        for (int y = y0; y <= y1; ++y) m.at(x0, y) = m.at(x1, y) = 1;
    };
    BitField single(20, 20);
    ring(single, 4, 4, 15, 15);
    const VoidStats one = enclosed_voids(single);
    if (one.count != 1 || one.area != 10 * 10) return {false, "ring fixture failed"};
    BitField nested(24, 24);
    ring(nested, 2, 2, 21, 21);
    ring(nested, 8, 8, 15, 15);
    const VoidStats two = enclosed_voids(nested);
    if (two.count != 2 || two.area != (18 * 18 - 8 * 8) + 6 * 6)
        return {false, "nested ring fixture failed"};

    return {true, "400 random masks + ring fixtures match the oracles exactly"};
}

// ---------------------------------------------------------------- criterion 3
Outcome criterion_objective_identity() {
    const Product product = fixtures::taboo_islands();
    const double required = total_required_volume(product.areas, product.gap, product.cell_size);
    std::mt19937 rng(3003);
    std::uniform_real_distribution<double> wd(0.0, 2000.0);

    const WeightKind cons[] = {WeightKind::con, WeightKind::log};
    const WeightKind areas[] = {WeightKind::con, WeightKind::lin, WeightKind::squ,
                                WeightKind::log};
    const WeightKind inits[] = {WeightKind::none, WeightKind::lin, WeightKind::log};

    for (int trial = 0; trial < 50; ++trial) {
        ObjectiveConfig config;
        config.w_comp_cool = wd(rng);
        config.w_comp_over = wd(rng);
        config.w_comp_tab = wd(rng);
        config.w_init_over = wd(rng);
        config.w_void_bin = wd(rng);
        config.w_void_area = wd(rng);
        config.f_con = cons[rng() % 2];
        config.f_area = areas[rng() % 4];
        config.f_init = inits[rng() % 3];

        DispensePath path = oracles::random_path(rng, 50, 50, 1 + trial % 8, required, 0.0);
        const EvaluationReport report =
            total_loss(path, product, config, product.gap, trial % 5 == 0, {5, 1.0});

        const double recombined = recombine_total(report, config);
        const double scale = std::max(1.0, std::abs(recombined));
        if (std::abs(report.total_loss - recombined) > 1e-12 * scale)
            return {false, "total != recombination at trial " + std::to_string(trial)};

        const double n_gaps = static_cast<double>(report.gaps.size());
        const double flat_cap =
            (config.f_con == WeightKind::log ? -std::log(1e-6) : 1.0) * n_gaps;
        const double terms[] = {report.l_comp_cool, report.l_comp_over, report.l_comp_tab};
        for (const double term : terms)
            if (term < 0.0 || term > flat_cap + 1e-12)
                return {false, "coverage term out of range at trial " + std::to_string(trial)};
        if (report.l_init_over < 0.0 || report.l_init_over > 1.0 + 1e-12)
            return {false, "init term out of range"};
        for (const double term : {report.l_void_area_init, report.l_void_area_med})
            if (term < 0.0 || term > -std::log(1e-6) + 1e-12)
                return {false, "void term out of range"};
        for (const double term : {report.l_void_bin_init, report.l_void_bin_med})
            if (term != 0.0 && term != 1.0) return {false, "void flag not binary"};
    }

    // ranking of a fixed path set is invariant under scaling all weights x10
    ObjectiveConfig config;
    ObjectiveConfig scaled = config;
    for (double* w : {&scaled.w_comp_cool, &scaled.w_comp_over, &scaled.w_comp_tab,
                      &scaled.w_init_over, &scaled.w_void_bin, &scaled.w_void_area})
        *w *= 10.0;
    const Evaluator base(product, config, product.gap, false, {5, 1.0});
    const Evaluator big(product, scaled, product.gap, false, {5, 1.0});
    std::vector<double> l1, l10;
    for (int i = 0; i < 10; ++i) {
        const DispensePath path = oracles::random_path(rng, 50, 50, 4, required, 2.0);
        l1.push_back(base.evaluate(path).total_loss);
        l10.push_back(big.evaluate(path).total_loss);
    }
    std::vector<int> r1(10), r10(10);
    std::iota(r1.begin(), r1.end(), 0);
    r10 = r1;
    std::sort(r1.begin(), r1.end(), [&](int a, int b) { return l1[a] < l1[b]; });
    std::sort(r10.begin(), r10.end(), [&](int a, int b) { return l10[a] < l10[b]; });
    if (r1 != r10) return {false, "ranking changed under x10 weight scaling"};

    return {true, "50 random configs: identity <= 1e-12, terms in range, ranking stable"};
}

// ---------------------------------------------------------------- criterion 4
Outcome criterion_void_semantics() {
    const Product product = fixtures::rectangle();
    ObjectiveConfig config;
    config.w_void_bin = 100.0;  // make the flags observable in the total too
    const Evaluator evaluator(product, config, product.gap, false);  // default fine_scale 20

    DispensePath loop;
    loop.points = {{15.0, 20.0}, {35.0, 20.0}, {35.0, 30.0}, {15.0, 30.0}, {15.0, 20.0}};
    loop.feedrate = feedrate_for_path(loop.points, evaluator.required_volume());
    const EvaluationReport closed = evaluator.evaluate(loop);
    if (closed.l_void_bin_init != 1.0)
        return {false, "closed loop did not raise the initial void flag"};
    if (closed.l_void_area_init <= 0.0)
        return {false, "closed loop produced no void area"};

    DispensePath straight;
    straight.points = {{12.0, 25.0}, {38.0, 25.0}};
    straight.feedrate = feedrate_for_path(straight.points, evaluator.required_volume());
    const EvaluationReport open = evaluator.evaluate(straight);
    if (open.l_void_bin_init != 0.0) return {false, "straight path flagged an initial void"};

    // two-bead pincer: heavy blobs at both ends of two parallel beads bridge
    // first and trap the channel between the beads mid-compression
    MaterialGrid pincer(30, 30, 1.0);
    for (int x = 8; x <= 22; ++x) {
        pincer.at(x, 13) = 1.2;
        pincer.at(x, 16) = 1.2;
    }
    for (const int x : {6, 7, 23, 24}) {
        pincer.at(x, 13) = 6.0;
        pincer.at(x, 16) = 6.0;
    }
    const GapSpec gap{0.6, 0.6, 0.6, 12};
    const FlowTrace trace = compress(pincer, gap, 0.6);
    std::vector<SnapshotStats> stats;
    const VoidLosses voids = void_losses(BitField(30, 30), 1, trace.snapshots, 100.0, 1.0,
                                         WeightKind::con, 1.0, &stats);
    if (voids.bin_med != 1.0)
        return {false, "pincer fixture produced no intermediate void"};
    if (!(voids.first_void_gap > gap.g_final))
        return {false, "intermediate void only appeared at the final gap"};

    return {true, "loop flags init void, straight does not, pincer traps a void at gap " +
                      std::to_string(voids.first_void_gap)};
}

// ---------------------------------------------------------------- criterion 5
Outcome criterion_desk_scale_optimization() {
    const Product product = fixtures::rectangle();
    const ObjectiveConfig config;  // defaults: the strongest studied combination
    const Evaluator evaluator(product, config, product.gap, false, {6, 1.0});

    CmaesConfig cmaes;
    cmaes.seed = 500;
    cmaes.max_iterations = 500;

    const std::vector<TrialResult> trials = run_trials(evaluator, {5, 5}, 20, cmaes, 2);
    int good = 0;
    for (const TrialResult& t : trials) {
        const EvaluationReport& r = t.best_report;
        if (r.coverage_fraction >= 0.80 && r.l_void_bin_init == 0.0 &&
            r.l_void_bin_med == 0.0 && r.taboo_violation_fraction == 0.0)
            ++good;
    }
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "%d/20 trials reached coverage >= 0.80 with zero voids and taboo (best %.3f)",
                  good,
                  trials.empty() ? 0.0 : trials.front().best_report.coverage_fraction);
    return {good * 2 >= 20 && trials.size() == 20, detail};
}

// ---------------------------------------------------------------- criterion 6
Outcome criterion_void_area_vs_bin() {
    const Product product = fixtures::taboo_islands();

    auto make_config = [](double void_area, double void_bin, WeightKind f_con) {
        ObjectiveConfig config;
        config.w_comp_cool = 0.0;
        config.w_comp_over = 1.0;
        config.w_comp_tab = 100.0;
        config.w_init_over = 0.0;
        config.f_init = WeightKind::none;
        config.w_void_area = void_area;
        config.w_void_bin = void_bin;
        config.f_con = f_con;
        config.f_area = WeightKind::con;
        return config;
    };
    SweepConfig sweep;
    sweep.runs_per_config = 30;
    sweep.segments = {5, 10};
    sweep.iterations = 500;
    sweep.configs = {make_config(100.0, 0.0, WeightKind::log),    // area pair 1
                     make_config(100.0, 0.0, WeightKind::con),    // area pair 2
                     make_config(0.0, 100.0, WeightKind::log),    // bin pair 1
                     make_config(0.0, 100.0, WeightKind::con)};   // bin pair 2

    const SweepOutcome outcome = run_sweep(product, sweep, 600, 2, {6, 1.0});
    if (outcome.rows.size() != 4) return {false, "sweep did not produce 4 rows"};
    const double area_mean =
        (outcome.rows[0].convergence_ratio + outcome.rows[1].convergence_ratio) / 2.0;
    const double bin_mean =
        (outcome.rows[2].convergence_ratio + outcome.rows[3].convergence_ratio) / 2.0;
    char detail[200];
    std::snprintf(detail, sizeof detail,
                  "convergence ratio: void-area %.3f vs void-bin %.3f (gap %.3f, need >= 0.2)",
                  area_mean, bin_mean, area_mean - bin_mean);
    return {area_mean - bin_mean >= 0.2, detail};
}

// ---------------------------------------------------------------- criterion 7
Outcome criterion_tolerance_mode() {
    const Product product = fixtures::border_taboo();
    ObjectiveConfig config;
    config.w_comp_tab = 1000.0;
    const Evaluator evaluator(product, config, product.gap, true, {6, 1.0});

    CmaesConfig cmaes;
    cmaes.seed = 700;
    cmaes.max_iterations = 500;
    const std::vector<TrialResult> trials = run_trials(evaluator, {5, 5}, 10, cmaes, 2);
    if (trials.empty()) return {false, "no trial succeeded"};

    bool pass = false;
    double best_cov = 0.0, best_tab = 1.0;
    for (const TrialResult& t : trials) {
        const double cov = t.best_report.gaps.front().coverage_fraction;   // at g_max
        const double tab = t.best_report.gaps.back().taboo_violation_fraction;  // at g_min
        if (cov >= 0.75 && tab <= 0.01) {
            pass = true;
            best_cov = cov;
            best_tab = tab;
            break;
        }
        if (cov > best_cov) {
            best_cov = cov;
            best_tab = tab;
        }
    }
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "best trial: coverage %.3f at g_max, taboo %.5f at g_min", best_cov,
                  best_tab);
    return {pass, detail};
}

// ---------------------------------------------------------------- criterion 8
Outcome criterion_cmaes_sanity() {
    auto sphere = [](const std::vector<double>& x) {
        double s = 0.0;
        for (const double v : x) s += v * v;
        return s;
    };
    for (const std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
        CmaesConfig config;
        config.seed = seed;
        config.max_iterations = 1000;
        bool spd = true;
        const CmaesResult result = cmaes_minimize(
            sphere, std::vector<double>(20, 3.0), 1.0, config,
            [&](const CmaesIterationStats& stats) { spd = spd && stats.min_eigenvalue > 0.0; });
        if (!(result.best_loss < 1e-6))
            return {false, "seed " + std::to_string(seed) + " only reached " +
                               std::to_string(result.best_loss)};
        if (!spd) return {false, "covariance lost positive definiteness"};
    }
    return {true, "20-D sphere < 1e-6 for 5 seeds, covariance SPD throughout"};
}

// ---------------------------------------------------------------- criterion 9
Outcome criterion_cli_determinism() {
    const char* cli = std::getenv("TIMFLOW_CLI");
    if (!cli) return {false, "TIMFLOW_CLI not set"};

    const fs::path dir =
        fs::temp_directory_path() / ("timflow_acc9_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
    const Product product = fixtures::rectangle();
    const std::string product_file = (dir / "product.json").string();
    write_text_file_atomic(product_file, product_to_json(product));

    const std::string args = std::string(cli) + " optimize --product " + product_file +
                             " --trials 3 --segments 4 --seed 42 --iterations 80" +
                             " --parallelism 2 --fine-scale 4 --top-k 3";
    std::vector<std::vector<double>> losses;
    for (const char* run_name : {"a", "b"}) {
        const std::string out_dir = (dir / run_name).string();
        const std::string command = args + " --out-dir " + out_dir + " > /dev/null 2>&1";
        if (std::system(command.c_str()) != 0) {
            fs::remove_all(dir);
            return {false, "cli run failed"};
        }
        const nlohmann::json summary =
            nlohmann::json::parse(read_text_file(out_dir + "/summary.json"));
        std::vector<double> top;
        for (const auto& entry : summary.at("top"))
            top.push_back(entry.at("total_loss").get<double>());
        losses.push_back(std::move(top));
    }
    fs::remove_all(dir);

    if (losses[0].size() != losses[1].size() || losses[0].empty())
        return {false, "top-k lists differ in length"};
    double worst = 0.0;
    for (std::size_t i = 0; i < losses[0].size(); ++i)
        worst = std::max(worst, std::abs(losses[0][i] - losses[1][i]));
    return {worst <= 1e-9,
            "top-k losses differ by at most " + std::to_string(worst) + " across two runs"};
}

const char* kNames[] = {"",
                        "conservation suite",
                        "image-op oracles",
                        "objective identity",
                        "void semantics",
                        "desk-scale optimization",
                        "void-area vs void-bin convergence",
                        "tolerance mode",
                        "cmaes sanity",
                        "cli determinism"};

}  // namespace

int run_criterion(int n) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    switch (n) {
        case 1: outcome = criterion_conservation(); break;
        case 2: outcome = criterion_imageops(); break;
        case 3: outcome = criterion_objective_identity(); break;
        case 4: outcome = criterion_void_semantics(); break;
        case 5: outcome = criterion_desk_scale_optimization(); break;
        case 6: outcome = criterion_void_area_vs_bin(); break;
        case 7: outcome = criterion_tolerance_mode(); break;
        case 8: outcome = criterion_cmaes_sanity(); break;
        case 9: outcome = criterion_cli_determinism(); break;
        default: outcome = {false, "unknown criterion"}; break;
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d [%s]: %s (%.1fs) - %s\n", n, kNames[n],
                outcome.pass ? "PASS" : "FAIL", seconds, outcome.detail.c_str());
    std::fflush(stdout);
    return outcome.pass ? 0 : 1;
}

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
            only = std::atoi(argv[i + 1]);
    }
    int failed = 0;
    for (int n = 1; n <= 9; ++n) {
        if (only != 0 && n != only) continue;
        failed += run_criterion(n);
    }
    return failed == 0 ? 0 : 1;
}
