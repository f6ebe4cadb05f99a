#pragma once

#include "bls/core.hpp"

#include <cstdint>
#include <vector>

namespace bls {

/// Parameters for dx/dt = -b x(t) + a x(t - tau) / (1 + x(t - tau)^10),
/// integrated with RK4 over a delay buffer. The emitted series is sampled at
/// unit time intervals after discarding `warmup` time units. History before
/// t = 0 is the constant x0.
struct SeriesConfig {
    double a = 0.2;  // delayed-feedback gain; a > b is what sustains the chaotic regime
    double b = 0.1;  // decay rate
    double tau = 30.0;
    double dt = 0.1;
    double warmup = 1000.0;
    int length = 1200;
    double x0 = 1.2;

    void validate() const;
};

std::vector<double> mackey_glass(const SeriesConfig& cfg);

/// Zero-mean Gaussian samples with the given variance.
std::vector<double> gaussian_noise(int n, double variance, std::uint64_t seed);

/// Symmetric alpha-stable samples with characteristic function
/// exp(-gamma_scale * |w|^alpha), drawn by the Chambers-Mallows-Stuck
/// transform. alpha = 2 reduces to a Gaussian with variance 2 * gamma_scale.
std::vector<double> alpha_stable_noise(int n, double alpha, double gamma_scale,
                                       std::uint64_t seed);

struct EmbeddedSeries {
    Matrix X;  // rows of lagged values, oldest first
    Matrix y;  // next value, one column
};

/// Time-delay embedding: row t is [x(t - dim*delay), ..., x(t - delay)] with
/// target x(t), for every t where the full window exists.
EmbeddedSeries embed_series(const std::vector<double>& series, int dim, int delay);

} // namespace bls
