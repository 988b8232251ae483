#include "timflow/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <random>
#include <thread>

#include "timflow/errors.hpp"

namespace timflow {

namespace {

Vec2 cooling_centroid(const Product& product) {
    const Field& cool = product.areas.cool;
    double mass = 0.0, mx = 0.0, my = 0.0;
    for (int y = 0; y < cool.height; ++y) {
        for (int x = 0; x < cool.width; ++x) {
            const double v = cool.at(x, y);
            mass += v;
            mx += v * (x + 0.5);
            my += v * (y + 0.5);
        }
    }
    return {mx / mass, my / mass};
}

struct SearchSpace {
    std::vector<Vec2> base_points;       // frozen values live here
    std::vector<bool> frozen;            // flattened, 2 per point
    std::vector<int> free_to_flat;       // search vector index -> flat coordinate

    DispensePath make_path(const std::vector<double>& x, double required_volume) const {
        DispensePath path;
        path.points = base_points;
        path.frozen = frozen;
        for (std::size_t i = 0; i < free_to_flat.size(); ++i) {
            const int flat = free_to_flat[i];
            Vec2& p = path.points[static_cast<std::size_t>(flat) / 2];
            if (flat % 2 == 0) p.x = x[i];
            else p.y = x[i];
        }
        path.feedrate = feedrate_for_path(path.points, required_volume);
        return path;
    }
};

}  // namespace

TrialResult optimize(const Evaluator& evaluator, int n_segments, const CmaesConfig& cmaes,
                     const std::optional<DispensePath>& template_path, int eval_threads) {
    if (template_path) {
        validate_path(*template_path);
        n_segments = static_cast<int>(template_path->segment_count());
    }
    if (n_segments < 1 || n_segments > 10)
        throw ValidationError("optimize: segment count must be in [1, 10]");

    const Product& product = evaluator.product();
    const std::size_t n_points = static_cast<std::size_t>(n_segments) + 1;

    SearchSpace space;
    if (template_path) {
        space.base_points = template_path->points;
        space.frozen = template_path->frozen;
    } else {
        space.base_points.assign(n_points, Vec2{});
    }
    space.frozen.resize(2 * n_points, false);
    for (std::size_t flat = 0; flat < 2 * n_points; ++flat)
        if (!space.frozen[flat]) space.free_to_flat.push_back(static_cast<int>(flat));

    const std::size_t dim = space.free_to_flat.size();
    const double required = evaluator.required_volume();
    if (dim == 0) {
        // fully pinned path; nothing to optimize
        DispensePath path = *template_path;
        path.feedrate = feedrate_for_path(path.points, required);
        TrialResult result;
        result.best_path = path;
        result.best_report = evaluator.evaluate(path);
        result.loss_history = {result.best_report.total_loss};
        result.evaluations = 1;
        result.seed = cmaes.seed;
        result.segments = n_segments;
        return result;
    }

    // free coordinates start at the cooling centroid, jittered per seed
    const Vec2 centroid = cooling_centroid(product);
    std::mt19937_64 jitter_gen(cmaes.seed ^ 0x9e3779b97f4a7c15ULL);
    auto jitter = [&]() {
        const double u = static_cast<double>(jitter_gen() >> 11) * 0x1.0p-53;
        return (2.0 * u - 1.0) * 2.0;  // +-2 grid units
    };
    std::vector<double> initial_mean(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        const int flat = space.free_to_flat[i];
        initial_mean[i] = (flat % 2 == 0 ? centroid.x : centroid.y) + jitter();
    }

    const double sigma0 = cmaes.sigma0 > 0.0
                              ? cmaes.sigma0
                              : std::max(product.grid_width, product.grid_height) / 4.0;

    auto objective = [&](const std::vector<double>& x) -> double {
        try {
            return evaluator.evaluate(space.make_path(x, required)).total_loss;
        } catch (const std::exception& e) {
            throw TrialError(std::string("objective evaluation failed: ") + e.what());
        }
    };

    CmaesResult best_run;
    best_run.best_loss = std::numeric_limits<double>::infinity();
    std::vector<double> history;
    long evaluations = 0;
    const int runs = std::max(0, cmaes.restart_count) + 1;
    for (int run = 0; run < runs; ++run) {
        CmaesConfig run_config = cmaes;
        run_config.seed = cmaes.seed + static_cast<std::uint64_t>(run) * 0x51ed2701ULL;
        CmaesResult r =
            cmaes_minimize(objective, initial_mean, sigma0, run_config, {}, eval_threads);
        evaluations += r.evaluations;
        history.insert(history.end(), r.loss_history.begin(), r.loss_history.end());
        if (r.best_loss < best_run.best_loss) best_run = std::move(r);
    }

    TrialResult result;
    result.best_path = space.make_path(best_run.best_x, required);
    result.best_report = evaluator.evaluate(result.best_path);
    result.loss_history = std::move(history);
    result.evaluations = evaluations + 1;
    result.seed = cmaes.seed;
    result.segments = n_segments;
    return result;
}

bool better_trial(const TrialResult& a, const TrialResult& b) {
    if (a.best_report.coverage_fraction != b.best_report.coverage_fraction)
        return a.best_report.coverage_fraction > b.best_report.coverage_fraction;
    if (a.best_report.total_loss != b.best_report.total_loss)
        return a.best_report.total_loss < b.best_report.total_loss;
    return a.seed < b.seed;
}

std::vector<TrialResult> run_trials(const Evaluator& evaluator,
                                    std::pair<int, int> segment_range, int n_trials,
                                    const CmaesConfig& base_config, int parallelism,
                                    const std::function<void(const TrialResult&)>& on_trial,
                                    std::vector<std::string>* failures) {
    if (n_trials < 1) throw ValidationError("run_trials: n_trials must be >= 1");
    if (segment_range.first > segment_range.second || segment_range.first < 1 ||
        segment_range.second > 10)
        throw ValidationError("run_trials: segment range must lie within [1, 10]");

    const int span = segment_range.second - segment_range.first + 1;
    std::vector<TrialResult> results;
    results.reserve(static_cast<std::size_t>(n_trials));
    std::mutex collect_mutex;
    std::atomic<int> next{0};

    auto worker = [&]() {
        for (;;) {
            const int t = next.fetch_add(1);
            if (t >= n_trials) return;
            CmaesConfig config = base_config;
            config.seed = base_config.seed + static_cast<std::uint64_t>(t);
            const int segments = segment_range.first + t % span;
            try {
                TrialResult r = optimize(evaluator, segments, config);
                std::lock_guard<std::mutex> lock(collect_mutex);
                if (on_trial) on_trial(r);
                results.push_back(std::move(r));
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(collect_mutex);
                if (failures)
                    failures->push_back("trial " + std::to_string(t) + " (seed " +
                                        std::to_string(config.seed) + "): " + e.what());
            }
        }
    };

    const int threads = std::max(1, parallelism);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::sort(results.begin(), results.end(), better_trial);
    return results;
}

double calibrate_amount(const Evaluator& evaluator, const DispensePath& path,
                        double target_coverage, double tolerance) {
    if (!(target_coverage > 0.0 && target_coverage <= 1.0))
        throw ValidationError("calibrate_amount: target coverage must be in (0, 1]");
    const double length = polyline_length(path.points);
    if (length <= 0.0) throw ValidationError("calibrate_amount: zero-length path");

    auto coverage_at = [&](double volume) {
        DispensePath probe = path;
        probe.feedrate = volume / length;
        return evaluator.evaluate(probe).coverage_fraction;
    };

    double lo = 0.0;
    double hi = 4.0 * evaluator.required_volume();
    if (coverage_at(hi) < target_coverage - tolerance)
        throw ValidationError("calibrate_amount: target coverage unreachable within 4x the "
                              "required volume");

    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double cov = coverage_at(mid);
        if (std::abs(cov - target_coverage) <= tolerance) return mid / length;
        if (cov < target_coverage) lo = mid;
        else hi = mid;
    }
    throw ValidationError("calibrate_amount: bisection did not converge (is coverage "
                          "monotone for this path?)");
}

}  // namespace timflow
