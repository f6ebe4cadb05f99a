#include "bls/series.hpp"

#include <doctest.h>

#include <cmath>

using namespace bls;

namespace {

double empirical_cf(const std::vector<double>& xs, double omega) {
    double acc = 0.0;
    for (double x : xs) acc += std::cos(omega * x);
    return acc / static_cast<double>(xs.size());
}

double variance(const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    return var / static_cast<double>(xs.size());
}

} // namespace

TEST_SUITE("series") {

TEST_CASE("mackey_glass: zero history is a fixed point") {
    SeriesConfig cfg;
    cfg.x0 = 0.0;
    cfg.warmup = 10;
    cfg.length = 50;
    for (double v : mackey_glass(cfg)) CHECK(v == 0.0);
}

TEST_CASE("mackey_glass: default series is bounded and finite") {
    const SeriesConfig cfg;  // 1200 points, tau 30, warmup 1000
    const std::vector<double> xs = mackey_glass(cfg);
    REQUIRE(xs.size() == 1200);
    for (double v : xs) {
        CHECK(std::isfinite(v));
        CHECK(v > 0.0);
        CHECK(v < 1.6);
    }
    // the chaotic regime actually oscillates
    double lo = xs[0], hi = xs[0];
    for (double v : xs) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(hi - lo > 0.5);
}

TEST_CASE("mackey_glass: halving dt moves samples by less than 1e-4") {
    SeriesConfig coarse;
    coarse.warmup = 100;
    coarse.length = 200;
    coarse.dt = 0.1;
    SeriesConfig fine = coarse;
    fine.dt = 0.05;
    const auto a = mackey_glass(coarse);
    const auto b = mackey_glass(fine);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    CHECK(worst < 1e-4);
}

TEST_CASE("mackey_glass: long run is finite and non-periodic") {
    SeriesConfig cfg;
    cfg.length = 10000;
    const std::vector<double> xs = mackey_glass(cfg);
    for (double v : xs) CHECK(std::isfinite(v));

    // no lag up to 500 samples replays the sequence
    double best_lag_error = 1e9;
    for (int lag = 1; lag <= 500; ++lag) {
        double worst = 0.0;
        for (std::size_t t = 0; t + static_cast<std::size_t>(lag) < xs.size(); ++t)
            worst = std::max(worst, std::abs(xs[t + static_cast<std::size_t>(lag)] - xs[t]));
        best_lag_error = std::min(best_lag_error, worst);
    }
    CHECK(best_lag_error > 1e-3);
}

TEST_CASE("mackey_glass: config validation") {
    SeriesConfig cfg;
    cfg.dt = 0.0;
    CHECK_THROWS_AS(mackey_glass(cfg), std::invalid_argument);
    cfg = SeriesConfig{};
    cfg.length = 0;
    CHECK_THROWS_AS(mackey_glass(cfg), std::invalid_argument);
}

TEST_CASE("gaussian_noise: determinism and variance") {
    const auto a = gaussian_noise(1000, 0.01, 42);
    const auto b = gaussian_noise(1000, 0.01, 42);
    CHECK(a == b);
    CHECK(gaussian_noise(1000, 0.01, 43) != a);

    const auto big = gaussian_noise(100000, 0.01, 7);
    CHECK(variance(big) == doctest::Approx(0.01).epsilon(0.05));
}

TEST_CASE("alpha_stable_noise: alpha = 2 is Gaussian with variance 2*scale") {
    const double scale = 0.1;
    const auto xs = alpha_stable_noise(100000, 2.0, scale, 11);
    CHECK(variance(xs) == doctest::Approx(2.0 * scale).epsilon(0.05));
}

TEST_CASE("alpha_stable_noise: empirical characteristic function matches") {
    const double alpha = 1.5, scale = 0.1;
    const auto xs = alpha_stable_noise(100000, alpha, scale, 3);
    for (double omega : {0.5, 1.0, 2.0}) {
        const double expected = std::exp(-scale * std::pow(std::abs(omega), alpha));
        CHECK(std::abs(empirical_cf(xs, omega) - expected) < 0.05);
    }
    CHECK(alpha_stable_noise(100, alpha, scale, 5) == alpha_stable_noise(100, alpha, scale, 5));
    CHECK_THROWS_AS(alpha_stable_noise(10, 2.5, scale, 1), std::invalid_argument);
    CHECK_THROWS_AS(alpha_stable_noise(10, 1.5, -1.0, 1), std::invalid_argument);
}

TEST_CASE("embed_series") {
    const EmbeddedSeries emb = embed_series({1, 2, 3, 4}, 2, 1);
    REQUIRE(emb.X.rows() == 2);
    CHECK(emb.X(0, 0) == 1.0);
    CHECK(emb.X(0, 1) == 2.0);
    CHECK(emb.y(0, 0) == 3.0);
    CHECK(emb.X(1, 0) == 2.0);
    CHECK(emb.X(1, 1) == 3.0);
    CHECK(emb.y(1, 0) == 4.0);

    std::vector<double> series(100);
    for (int i = 0; i < 100; ++i) series[static_cast<std::size_t>(i)] = i;
    const EmbeddedSeries seven = embed_series(series, 7, 1);
    CHECK(seven.X.cols() == 7);
    CHECK(seven.X.rows() == 93);  // length - dim*delay

    const EmbeddedSeries lagged = embed_series(series, 3, 2);
    CHECK(lagged.X.rows() == 94);
    CHECK(lagged.X(0, 0) == 0.0);
    CHECK(lagged.X(0, 2) == 4.0);
    CHECK(lagged.y(0, 0) == 6.0);

    CHECK_THROWS_AS(embed_series({1, 2}, 2, 1), std::invalid_argument);
}

}
