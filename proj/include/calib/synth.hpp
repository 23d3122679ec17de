#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "calib/metrics.hpp"
#include "calib/types.hpp"

namespace calib::synth {

/// xoshiro256++ 1.0 (Blackman & Vigna), seeded from a single 64-bit value
/// through splitmix64. Chosen over std::mt19937 because its output sequence
/// is fixed by a published reference implementation, so generated fixtures
/// can be reproduced outside this codebase.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform double in [0, 1), 53 random bits.
    double next_double();

    /// Standard normal via Marsaglia's polar method (one value per call; the
    /// pair's second value is discarded to keep the draw sequence simple).
    double next_normal();

    /// Gamma(shape, 1) via the Marsaglia-Tsang squeeze method; shapes below 1
    /// use the boosting identity G(a) = G(a+1) * U^(1/a).
    double next_gamma(double shape);

    /// Beta(alpha, beta) as Gx / (Gx + Gy) from two gamma draws.
    double next_beta(double alpha, double beta);

    /// Identifier recorded in generated-file metadata.
    static const char* algorithm_name() { return "xoshiro256++ 1.0 seeded via splitmix64"; }

private:
    std::array<std::uint64_t, 4> state_;
};

/// Recipe for a synthetic binary prediction set with known calibration.
///
/// Each sample draws a class-1 probability p from Beta(alpha, beta) and a
/// label from Bernoulli(p); its calibrated logits are (0, ln(p/(1-p))). The
/// emitted logits are the calibrated logits multiplied by true_temperature,
/// so dividing by true_temperature (what applying that temperature does)
/// restores them exactly, and a temperature fit on the emitted set should
/// recover true_temperature.
struct SynthConfig {
    std::size_t sample_count = 10000;
    std::uint64_t seed = 0;
    double true_temperature = 1.0;
    double alpha = 2.0;
    double beta = 2.0;

    static constexpr int kClassCount = 2;
};

/// Deterministically generates the prediction set described by `config`.
PredictionSet generate(const SynthConfig& config);

/// Reference expected-calibration-error: a naive loop over bins and samples,
/// sharing no code with the metrics module. Exists to cross-check that
/// implementation, not to be fast.
double oracle_ece(const ProbabilitySet& probabilities, const ConfidenceMode& mode,
                  std::size_t bins);

/// Reference temperature fit: exhaustive scan of mean NLL over a log10-spaced
/// temperature grid covering [1e-3, 1e3]. `grid_spacing` is the log10 step.
double oracle_fit_temperature(const PredictionSet& calibration, double grid_spacing);

} // namespace calib::synth
