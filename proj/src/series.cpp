#include "bls/series.hpp"

#include "bls/rng.hpp"

#include <cmath>

namespace bls {

void SeriesConfig::validate() const {
    require(dt > 0.0, "series: dt must be positive");
    require(tau > 0.0, "series: tau must be positive");
    require(warmup >= 0.0, "series: warmup must be nonnegative");
    require(length >= 1, "series: length must be >= 1");
}

std::vector<double> mackey_glass(const SeriesConfig& cfg) {
    cfg.validate();

    // Snap the step so unit sampling instants land exactly on grid points.
    const int steps_per_unit = std::max(1, static_cast<int>(std::lround(1.0 / cfg.dt)));
    const double dt = 1.0 / steps_per_unit;

    const long total_units = static_cast<long>(std::ceil(cfg.warmup)) + cfg.length;
    const long total_steps = total_units * steps_per_unit;

    std::vector<double> grid;  // x at every grid point from t = 0
    grid.reserve(static_cast<std::size_t>(total_steps) + 1);
    grid.push_back(cfg.x0);

    // Constant history x0 for t <= 0; linear interpolation between grid
    // points for delayed lookups that fall inside a step.
    auto delayed = [&](double t) {
        if (t <= 0.0) return cfg.x0;
        const double pos = t / dt;
        const auto lo = static_cast<std::size_t>(pos);
        if (lo + 1 >= grid.size()) return grid.back();
        const double frac = pos - static_cast<double>(lo);
        return grid[lo] + frac * (grid[lo + 1] - grid[lo]);
    };
    auto derivative = [&](double x, double x_delayed) {
        const double p = std::pow(x_delayed, 10);
        return -cfg.b * x + cfg.a * x_delayed / (1.0 + p);
    };

    double x = cfg.x0;
    for (long s = 0; s < total_steps; ++s) {
        const double t = static_cast<double>(s) * dt;
        const double d0 = delayed(t - cfg.tau);
        const double dh = delayed(t - cfg.tau + 0.5 * dt);
        const double d1 = delayed(t - cfg.tau + dt);
        const double k1 = derivative(x, d0);
        const double k2 = derivative(x + 0.5 * dt * k1, dh);
        const double k3 = derivative(x + 0.5 * dt * k2, dh);
        const double k4 = derivative(x + dt * k3, d1);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        grid.push_back(x);
    }

    const long warmup_units = static_cast<long>(std::ceil(cfg.warmup));
    std::vector<double> out(static_cast<std::size_t>(cfg.length));
    for (int i = 0; i < cfg.length; ++i)
        out[static_cast<std::size_t>(i)] =
            grid[static_cast<std::size_t>((warmup_units + i + 1) * steps_per_unit)];
    return out;
}

std::vector<double> gaussian_noise(int n, double variance, std::uint64_t seed) {
    require(n >= 1, "gaussian_noise: n must be >= 1");
    require(variance >= 0.0, "gaussian_noise: variance must be nonnegative");
    Rng rng(seed, 0x67617573ULL);  // "gaus"
    const double stddev = std::sqrt(variance);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& v : out) v = stddev * rng.normal();
    return out;
}

std::vector<double> alpha_stable_noise(int n, double alpha, double gamma_scale,
                                       std::uint64_t seed) {
    require(n >= 1, "alpha_stable_noise: n must be >= 1");
    require(alpha > 0.0 && alpha <= 2.0, "alpha_stable_noise: alpha must be in (0, 2]");
    require(gamma_scale > 0.0, "alpha_stable_noise: scale must be positive");

    const double scale = std::pow(gamma_scale, 1.0 / alpha);
    Rng rng(seed, 0x73746162ULL);  // "stab"
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& v : out) {
        const double angle = M_PI * (rng.uniform() - 0.5);  // uniform on (-pi/2, pi/2)
        double expo = 0.0;
        do {
            expo = -std::log(rng.uniform());
        } while (!(expo > 0.0));
        if (alpha == 1.0) {
            v = scale * std::tan(angle);
            continue;
        }
        const double num = std::sin(alpha * angle);
        const double den = std::pow(std::cos(angle), 1.0 / alpha);
        const double tail =
            std::pow(std::cos((1.0 - alpha) * angle) / expo, (1.0 - alpha) / alpha);
        v = scale * (num / den) * tail;
    }
    return out;
}

EmbeddedSeries embed_series(const std::vector<double>& series, int dim, int delay) {
    require(dim >= 1 && delay >= 1, "embed_series: dim and delay must be >= 1");
    const long window = static_cast<long>(dim) * delay;
    const long n = static_cast<long>(series.size()) - window;
    require(n >= 1, "embed_series: series too short for the requested window");

    EmbeddedSeries out;
    out.X.resize(n, dim);
    out.y.resize(n, 1);
    for (long i = 0; i < n; ++i) {
        const long t = window + i;
        for (int k = 0; k < dim; ++k)
            out.X(i, k) = series[static_cast<std::size_t>(t - window + k * delay)];
        out.y(i, 0) = series[static_cast<std::size_t>(t)];
    }
    return out;
}

} // namespace bls
