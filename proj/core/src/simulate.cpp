#include "thetafit/simulate.hpp"

#include "thetafit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <thread>

namespace thetafit {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

constexpr double kOverflowGuard = 1e12;

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) noexcept
    : state_(mix64(seed + kGolden) ^ mix64(stream * kGolden + 0xD1B54A32D192ED03ull)) {}

std::uint64_t Rng::next_u64() noexcept {
    state_ += kGolden;
    return mix64(state_);
}

double Rng::uniform01() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

double Rng::normal() noexcept {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    // Box-Muller; u1 shifted into (0, 1] so the log is always finite.
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_normal_ = radius * std::sin(angle);
    has_cached_normal_ = true;
    return radius * std::cos(angle);
}

std::uint64_t Rng::below(std::uint64_t bound) noexcept {
    // Fixed-point multiply; bias is O(2^-64) and irrelevant for shuffling.
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
}

void shuffle(std::span<std::size_t> values, Rng& rng) noexcept {
    for (std::size_t i = values.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(values[i - 1], values[j]);
    }
}

ThetaFn true_theta_fn(const SdeModelSpec& model) {
    return [fn = model.true_theta](double t, std::span<double> out) {
        const std::vector<double> theta = fn(t);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = theta[i];
    };
}

ThetaFn mlp_theta_fn(MlpSpec spec, Weights weights) {
    spec.validate();
    return [spec = std::move(spec), weights = std::move(weights)](double t, std::span<double> out) {
        const std::vector<double> raw = mlp_forward(spec, weights.values, t);
        const std::vector<double> theta = reported_theta(raw, spec.heads);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = theta[i];
    };
}

ThetaFn grid_theta_fn(std::vector<double> table, int theta_dim, double t0, double step) {
    if (theta_dim <= 0 || table.size() % static_cast<std::size_t>(theta_dim) != 0) {
        throw ConfigError("theta table size is not a multiple of theta_dim");
    }
    const std::size_t rows = table.size() / static_cast<std::size_t>(theta_dim);
    return [table = std::move(table), theta_dim, t0, step, rows](double t, std::span<double> out) {
        auto idx = static_cast<std::size_t>(std::llround((t - t0) / step));
        if (idx >= rows) idx = rows - 1;
        const double* row = table.data() + idx * static_cast<std::size_t>(theta_dim);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = row[i];
    };
}

Trajectory euler_path(const SdeModelSpec& model, const ThetaFn& theta, double x0, double horizon,
                      std::size_t n, Rng& rng, double t0) {
    if (n == 0) throw ConfigError("euler_path needs at least one step");
    const double h = horizon / static_cast<double>(n);
    const double sqrt_h = std::sqrt(h);

    Trajectory traj;
    traj.step = h;
    traj.times.reserve(n + 1);
    traj.values.reserve(n + 1);
    traj.times.push_back(t0);
    traj.values.push_back(x0);

    std::vector<double> th(static_cast<std::size_t>(model.theta_dim));
    double x = x0;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = t0 + static_cast<double>(k) * h;
        theta(t, th);
        const double a = model.drift(t, x, th);
        const double b = model.diffusion(t, x, th);
        x = x + a * h + b * sqrt_h * rng.normal();
        if (!std::isfinite(x) || std::fabs(x) > kOverflowGuard) {
            throw SimulationError("state overflow in Euler recursion", k);
        }
        traj.times.push_back(t0 + static_cast<double>(k + 1) * h);
        traj.values.push_back(x);
    }
    return traj;
}

std::vector<Trajectory> ensemble(const SdeModelSpec& model, const ThetaFn& theta, double x0,
                                 double horizon, std::size_t n, std::size_t n_paths,
                                 std::uint64_t seed) {
    if (n_paths == 0) throw ConfigError("ensemble needs at least one path");
    std::vector<Trajectory> paths(n_paths);

    std::exception_ptr failure;
    std::mutex failure_mutex;

    const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    const std::size_t n_workers = std::min(n_paths, hw);
    std::vector<std::thread> workers;
    workers.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) {
        workers.emplace_back([&, w]() {
            try {
                for (std::size_t i = w; i < n_paths; i += n_workers) {
                    Rng rng(seed, i);
                    paths[i] = euler_path(model, theta, x0, horizon, n, rng);
                }
            } catch (...) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& worker : workers) worker.join();
    if (failure) std::rethrow_exception(failure);
    return paths;
}

std::vector<double> endpoints(std::span<const Trajectory> paths) {
    std::vector<double> out;
    out.reserve(paths.size());
    for (const Trajectory& p : paths) out.push_back(p.values.back());
    return out;
}

Trajectory subsample(const Trajectory& traj, std::size_t stride) {
    if (stride == 0) throw ConfigError("stride must be positive");
    if (stride == 1) return traj;
    if (traj.values.size() < stride + 1) {
        throw ConfigError("trajectory too short for stride " + std::to_string(stride));
    }
    Trajectory out;
    out.step = traj.step * static_cast<double>(stride);
    for (std::size_t k = 0; k < traj.values.size(); k += stride) {
        out.times.push_back(traj.times[k]);
        out.values.push_back(traj.values[k]);
    }
    return out;
}

RegressionDataset regression_sample(const RegressionCaseSpec& spec, Rng& rng) {
    RegressionDataset data;
    data.times.reserve(spec.n);
    data.observations.reserve(spec.n);
    for (std::size_t k = 0; k < spec.n; ++k) {
        const double t = spec.time_at(k);
        const Cov2 cov = spec.covariance(t);
        if (cov.var1 < 0.0 || cov.var2 < 0.0) {
            throw DataError("negative variance in covariance at t=" + std::to_string(t));
        }
        const double s1 = std::sqrt(cov.var1);
        const double s2 = std::sqrt(cov.var2);
        double rho = 0.0;
        if (s1 > 0.0 && s2 > 0.0) {
            rho = cov.cov / (s1 * s2);
            if (std::fabs(rho) > 1.0) {
                throw DataError("covariance not positive semi-definite at t=" + std::to_string(t));
            }
        } else if (cov.cov != 0.0) {
            throw DataError("zero variance with nonzero covariance at t=" + std::to_string(t));
        }
        // 2x2 Cholesky: eps1 = s1 Z1, eps2 = s2 (rho Z1 + sqrt(1-rho^2) Z2)
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        const double e1 = s1 * z1;
        const double e2 = s2 * (rho * z1 + std::sqrt(1.0 - rho * rho) * z2);
        data.times.push_back(t);
        data.observations.push_back({spec.mu1(t) + e1, spec.mu2(t) + e2});
    }
    return data;
}

}  // namespace thetafit
