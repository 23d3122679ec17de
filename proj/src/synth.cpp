#include "calib/synth.hpp"

#include <cmath>

namespace calib::synth {

namespace {

std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

} // namespace

Xoshiro256pp::Xoshiro256pp(std::uint64_t seed) {
    // Expanding one word through splitmix64 is the seeding procedure the
    // xoshiro reference material prescribes; it guarantees a nonzero state.
    std::uint64_t sm = seed;
    for (auto& word : state_) {
        word = splitmix64_next(sm);
    }
}

std::uint64_t Xoshiro256pp::next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Xoshiro256pp::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Xoshiro256pp::next_normal() {
    while (true) {
        const double u = 2.0 * next_double() - 1.0;
        const double v = 2.0 * next_double() - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) {
            return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }
}

double Xoshiro256pp::next_gamma(double shape) {
    if (!(shape > 0.0)) {
        throw ValidationError("next_gamma: shape must be positive");
    }
    if (shape < 1.0) {
        const double boosted = next_gamma(shape + 1.0);
        const double u = next_double();
        return boosted * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x;
        double v;
        do {
            x = next_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = next_double();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) {
            return d * v;
        }
        if (u > 0.0 && std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
            return d * v;
        }
    }
}

double Xoshiro256pp::next_beta(double alpha, double beta) {
    while (true) {
        const double gx = next_gamma(alpha);
        const double gy = next_gamma(beta);
        if (gx + gy > 0.0) {
            return gx / (gx + gy);
        }
    }
}

PredictionSet generate(const SynthConfig& config) {
    if (config.sample_count == 0) {
        throw ValidationError("generate: sample count must be positive");
    }
    if (!(config.true_temperature >= 1e-3 && config.true_temperature <= 1e3)) {
        throw ValidationError("generate: true temperature must lie in [1e-3, 1e3]");
    }
    if (!(config.alpha > 0.0) || !(config.beta > 0.0)) {
        throw ValidationError("generate: Beta distribution parameters must be positive");
    }

    Xoshiro256pp rng(config.seed);
    const std::size_t n = config.sample_count;
    std::vector<double> logits(n * SynthConfig::kClassCount);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        double p = rng.next_beta(config.alpha, config.beta);
        p = std::min(std::max(p, 1e-9), 1.0 - 1e-9);
        labels[i] = rng.next_double() < p ? 1 : 0;
        const double log_odds = std::log(p / (1.0 - p));
        logits[i * 2] = 0.0;
        logits[i * 2 + 1] = log_odds * config.true_temperature;
    }
    return PredictionSet(std::move(logits), std::move(labels), SynthConfig::kClassCount, "synth");
}

double oracle_ece(const ProbabilitySet& probabilities, const ConfidenceMode& mode,
                  std::size_t bins) {
    if (bins == 0) {
        throw ValidationError("oracle_ece: bin count must be positive");
    }
    const std::size_t n = probabilities.sample_count();
    const auto k = static_cast<std::size_t>(probabilities.class_count());

    double total = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
        std::size_t count = 0;
        std::size_t hits = 0;
        double confidence_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = probabilities.row(i);
            double confidence;
            bool outcome;
            if (mode.is_top_label()) {
                std::size_t best = 0;
                for (std::size_t j = 1; j < k; ++j) {
                    if (row[j] > row[best]) {
                        best = j;
                    }
                }
                confidence = row[best];
                outcome = static_cast<int>(best) == probabilities.labels()[i];
            } else {
                const auto chosen = static_cast<std::size_t>(mode.chosen_class_index());
                confidence = row[chosen];
                outcome = probabilities.labels()[i] == mode.chosen_class_index();
            }
            auto assigned = static_cast<std::size_t>(confidence * static_cast<double>(bins));
            if (assigned >= bins) {
                assigned = bins - 1;
            }
            if (assigned != b) {
                continue;
            }
            ++count;
            confidence_sum += confidence;
            if (outcome) {
                ++hits;
            }
        }
        if (count == 0) {
            continue;
        }
        const double mean_confidence = confidence_sum / static_cast<double>(count);
        const double frequency = static_cast<double>(hits) / static_cast<double>(count);
        total += (static_cast<double>(count) / static_cast<double>(n)) *
                 std::abs(frequency - mean_confidence);
    }
    return total;
}

double oracle_fit_temperature(const PredictionSet& calibration, double grid_spacing) {
    if (!(grid_spacing > 0.0)) {
        throw ValidationError("oracle_fit_temperature: grid spacing must be positive");
    }
    const std::size_t n = calibration.sample_count();
    const auto k = static_cast<std::size_t>(calibration.class_count());

    // Per-row max-shifted logits; the shift is temperature-independent.
    std::vector<double> shifted(n * k);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = calibration.logits_row(i);
        double peak = row[0];
        for (std::size_t j = 1; j < k; ++j) {
            peak = std::max(peak, row[j]);
        }
        for (std::size_t j = 0; j < k; ++j) {
            shifted[i * k + j] = row[j] - peak;
        }
    }

    const auto steps = static_cast<std::size_t>(std::llround(6.0 / grid_spacing));
    double best_temperature = 0.0;
    double best_nll = 0.0;
    for (std::size_t step = 0; step <= steps; ++step) {
        const double log10_t = -3.0 + static_cast<double>(step) * grid_spacing;
        const double t = std::pow(10.0, log10_t);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double denominator = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                denominator += std::exp(shifted[i * k + j] / t);
            }
            const auto truth = static_cast<std::size_t>(calibration.labels()[i]);
            const double p = std::exp(shifted[i * k + truth] / t) / denominator;
            total += -std::log(std::max(p, 1e-12));
        }
        const double nll = total / static_cast<double>(n);
        if (step == 0 || nll < best_nll) {
            best_nll = nll;
            best_temperature = t;
        }
    }
    return best_temperature;
}

} // namespace calib::synth
