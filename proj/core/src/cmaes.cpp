#include "timflow/cmaes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "timflow/errors.hpp"

namespace timflow {

namespace {

// Uniform/normal deviates built from raw mt19937_64 output; std::*_distribution
// is implementation-defined and would break cross-platform reproducibility.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : gen_(seed) {}

    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Cyclic Jacobi eigendecomposition of a symmetric matrix (row-major n x n).
// Plenty accurate and fast for the small dimensions used here (n <= ~30).
void jacobi_eigen(std::vector<double> a, int n, std::vector<double>& eigenvalues,
                  std::vector<double>& eigenvectors) {
    eigenvectors.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) eigenvectors[static_cast<std::size_t>(i) * n + i] = 1.0;

    auto off_norm = [&]() {
        double s = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double v = a[static_cast<std::size_t>(p) * n + q];
                s += v * v;
            }
        return s;
    };

    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        scale = std::max(scale, std::abs(a[static_cast<std::size_t>(i) * n + i]));
    scale = std::max(scale, 1.0);
    const double tol = 1e-30 * scale * scale;

    for (int sweep = 0; sweep < 100 && off_norm() > tol; ++sweep) {
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a[static_cast<std::size_t>(p) * n + q];
                if (apq == 0.0) continue;
                const double app = a[static_cast<std::size_t>(p) * n + p];
                const double aqq = a[static_cast<std::size_t>(q) * n + q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a[static_cast<std::size_t>(k) * n + p];
                    const double akq = a[static_cast<std::size_t>(k) * n + q];
                    a[static_cast<std::size_t>(k) * n + p] = akp * c - akq * s;
                    a[static_cast<std::size_t>(k) * n + q] = akp * s + akq * c;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a[static_cast<std::size_t>(p) * n + k];
                    const double aqk = a[static_cast<std::size_t>(q) * n + k];
                    a[static_cast<std::size_t>(p) * n + k] = apk * c - aqk * s;
                    a[static_cast<std::size_t>(q) * n + k] = apk * s + aqk * c;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = eigenvectors[static_cast<std::size_t>(k) * n + p];
                    const double vkq = eigenvectors[static_cast<std::size_t>(k) * n + q];
                    eigenvectors[static_cast<std::size_t>(k) * n + p] = vkp * c - vkq * s;
                    eigenvectors[static_cast<std::size_t>(k) * n + q] = vkp * s + vkq * c;
                }
            }
        }
    }

    eigenvalues.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) eigenvalues[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i) * n + i];
}

}  // namespace

CmaesResult cmaes_minimize(const CmaesObjective& objective, std::vector<double> initial_mean,
                           double sigma0, const CmaesConfig& config,
                           const CmaesCallback& callback, int eval_threads) {
    const int n = static_cast<int>(initial_mean.size());
    if (n < 1) throw ValidationError("cmaes: dimension must be >= 1");
    if (!(sigma0 > 0.0)) throw ValidationError("cmaes: sigma0 must be > 0");
    if (config.max_iterations < 1) throw ValidationError("cmaes: max_iterations must be >= 1");

    const int lambda = config.population > 0
                           ? config.population
                           : 4 + static_cast<int>(std::floor(3.0 * std::log(n)));
    if (lambda < 2) throw ValidationError("cmaes: population must be >= 2");
    const int mu = lambda / 2;

    std::vector<double> weights(static_cast<std::size_t>(mu));
    for (int i = 0; i < mu; ++i)
        weights[static_cast<std::size_t>(i)] = std::log(mu + 0.5) - std::log(i + 1.0);
    const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (double& w : weights) w /= wsum;
    double mueff = 0.0;
    for (const double w : weights) mueff += w * w;
    mueff = 1.0 / mueff;

    const double c_sigma = (mueff + 2.0) / (n + mueff + 5.0);
    const double d_sigma =
        1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (n + 1.0)) - 1.0) + c_sigma;
    const double c_c = (4.0 + mueff / n) / (n + 4.0 + 2.0 * mueff / n);
    const double c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + mueff);
    const double c_mu = std::min(1.0 - c_1, 2.0 * (mueff - 2.0 + 1.0 / mueff) /
                                                ((n + 2.0) * (n + 2.0) + mueff));
    const double chi_n = std::sqrt(static_cast<double>(n)) *
                         (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

    Sampler sampler(config.seed);

    std::vector<double> mean = initial_mean;
    double sigma = sigma0;
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    std::vector<double> C(nn, 0.0), B(nn, 0.0), eigvals;
    std::vector<double> D(static_cast<std::size_t>(n), 1.0);
    for (int i = 0; i < n; ++i) {
        C[static_cast<std::size_t>(i) * n + i] = 1.0;
        B[static_cast<std::size_t>(i) * n + i] = 1.0;
    }
    std::vector<double> p_sigma(static_cast<std::size_t>(n), 0.0);
    std::vector<double> p_c(static_cast<std::size_t>(n), 0.0);

    CmaesResult result;
    result.best_loss = std::numeric_limits<double>::infinity();
    result.loss_history.reserve(static_cast<std::size_t>(config.max_iterations));

    std::vector<std::vector<double>> ys(static_cast<std::size_t>(lambda)),
        xs(static_cast<std::size_t>(lambda));
    std::vector<double> fitness(static_cast<std::size_t>(lambda));
    std::vector<int> order(static_cast<std::size_t>(lambda));
    std::vector<double> z(static_cast<std::size_t>(n));

    for (int iteration = 0; iteration < config.max_iterations; ++iteration) {
        for (int k = 0; k < lambda; ++k) {
            for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = sampler.normal();
            auto& y = ys[static_cast<std::size_t>(k)];
            y.assign(static_cast<std::size_t>(n), 0.0);
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int j = 0; j < n; ++j)
                    acc += B[static_cast<std::size_t>(i) * n + j] *
                           (D[static_cast<std::size_t>(j)] * z[static_cast<std::size_t>(j)]);
                y[static_cast<std::size_t>(i)] = acc;
            }
            auto& x = xs[static_cast<std::size_t>(k)];
            x.resize(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
                x[static_cast<std::size_t>(i)] =
                    mean[static_cast<std::size_t>(i)] + sigma * y[static_cast<std::size_t>(i)];
        }

        if (eval_threads > 1) {
            std::vector<std::thread> pool;
            const int threads = std::min(eval_threads, lambda);
            pool.reserve(static_cast<std::size_t>(threads));
            for (int t = 0; t < threads; ++t) {
                pool.emplace_back([&, t]() {
                    for (int k = t; k < lambda; k += threads)
                        fitness[static_cast<std::size_t>(k)] = objective(xs[static_cast<std::size_t>(k)]);
                });
            }
            for (auto& th : pool) th.join();
        } else {
            for (int k = 0; k < lambda; ++k)
                fitness[static_cast<std::size_t>(k)] = objective(xs[static_cast<std::size_t>(k)]);
        }
        result.evaluations += lambda;
        for (double& f : fitness)
            if (std::isnan(f)) f = std::numeric_limits<double>::infinity();

        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return fitness[static_cast<std::size_t>(a)] < fitness[static_cast<std::size_t>(b)];
        });

        const double gen_best = fitness[static_cast<std::size_t>(order[0])];
        result.loss_history.push_back(gen_best);
        if (gen_best < result.best_loss) {
            result.best_loss = gen_best;
            result.best_x = xs[static_cast<std::size_t>(order[0])];
        }

        std::vector<double> y_w(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < mu; ++i) {
            const auto& y = ys[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
            for (int j = 0; j < n; ++j)
                y_w[static_cast<std::size_t>(j)] += weights[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)];
        }

        // C^(-1/2) y_w = B D^-1 B^T y_w
        std::vector<double> bt_y(static_cast<std::size_t>(n), 0.0);
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i)
                acc += B[static_cast<std::size_t>(i) * n + j] * y_w[static_cast<std::size_t>(i)];
            bt_y[static_cast<std::size_t>(j)] = acc / D[static_cast<std::size_t>(j)];
        }
        std::vector<double> c_inv_sqrt_y(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j)
                acc += B[static_cast<std::size_t>(i) * n + j] * bt_y[static_cast<std::size_t>(j)];
            c_inv_sqrt_y[static_cast<std::size_t>(i)] = acc;
        }

        const double cs_fac = std::sqrt(c_sigma * (2.0 - c_sigma) * mueff);
        double p_sigma_norm2 = 0.0;
        for (int i = 0; i < n; ++i) {
            p_sigma[static_cast<std::size_t>(i)] = (1.0 - c_sigma) * p_sigma[static_cast<std::size_t>(i)] +
                                                   cs_fac * c_inv_sqrt_y[static_cast<std::size_t>(i)];
            p_sigma_norm2 += p_sigma[static_cast<std::size_t>(i)] * p_sigma[static_cast<std::size_t>(i)];
        }
        const double p_sigma_norm = std::sqrt(p_sigma_norm2);

        const double decay = 1.0 - std::pow(1.0 - c_sigma, 2.0 * (iteration + 1));
        const bool h_sigma =
            p_sigma_norm / std::sqrt(decay) < (1.4 + 2.0 / (n + 1.0)) * chi_n;

        const double cc_fac = std::sqrt(c_c * (2.0 - c_c) * mueff);
        for (int i = 0; i < n; ++i)
            p_c[static_cast<std::size_t>(i)] = (1.0 - c_c) * p_c[static_cast<std::size_t>(i)] +
                                               (h_sigma ? cc_fac * y_w[static_cast<std::size_t>(i)] : 0.0);

        const double delta_h = (h_sigma ? 0.0 : 1.0) * c_c * (2.0 - c_c);
        const double keep = 1.0 - c_1 - c_mu;
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                double v = keep * C[static_cast<std::size_t>(i) * n + j] +
                           c_1 * (p_c[static_cast<std::size_t>(i)] * p_c[static_cast<std::size_t>(j)] +
                                  delta_h * C[static_cast<std::size_t>(i) * n + j]);
                for (int k = 0; k < mu; ++k) {
                    const auto& y = ys[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
                    v += c_mu * weights[static_cast<std::size_t>(k)] * y[static_cast<std::size_t>(i)] *
                         y[static_cast<std::size_t>(j)];
                }
                C[static_cast<std::size_t>(i) * n + j] = v;
                C[static_cast<std::size_t>(j) * n + i] = v;
            }
        }

        sigma *= std::exp((c_sigma / d_sigma) * (p_sigma_norm / chi_n - 1.0));

        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int k = 0; k < mu; ++k) {
                const auto& x = xs[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
                acc += weights[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(i)];
            }
            mean[static_cast<std::size_t>(i)] = acc;
        }

        jacobi_eigen(C, n, eigvals, B);
        double min_eig = eigvals.empty() ? 0.0 : eigvals[0];
        double max_eig = min_eig;
        for (const double e : eigvals) {
            min_eig = std::min(min_eig, e);
            max_eig = std::max(max_eig, e);
        }
        const double floor_eig = std::max(max_eig, 1e-300) * 1e-14;
        for (int i = 0; i < n; ++i)
            D[static_cast<std::size_t>(i)] = std::sqrt(std::max(eigvals[static_cast<std::size_t>(i)], floor_eig));

        result.iterations = iteration + 1;
        if (callback) callback({iteration, gen_best, sigma, min_eig, max_eig});

        if (sigma * std::sqrt(max_eig) < 1e-14) break;  // numerical floor; nothing left to search
    }
    return result;
}

}  // namespace timflow
