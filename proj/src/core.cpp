#include "calib/core.hpp"

#include <algorithm>
#include <cmath>

namespace calib {

void softmax_row(std::span<const double> logits, std::span<double> out) {
    const double peak = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t j = 0; j < logits.size(); ++j) {
        out[j] = std::exp(logits[j] - peak);
        sum += out[j];
    }
    for (std::size_t j = 0; j < logits.size(); ++j) {
        out[j] /= sum;
    }
}

ProbabilitySet to_probabilities(const PredictionSet& predictions) {
    const std::size_t n = predictions.sample_count();
    const auto k = static_cast<std::size_t>(predictions.class_count());
    std::vector<double> probabilities(n * k);
    for (std::size_t i = 0; i < n; ++i) {
        softmax_row(predictions.logits_row(i), {probabilities.data() + i * k, k});
    }
    // Softmax rows sum to 1 only up to rounding; rescale to meet the strict
    // row-sum contract.
    return ProbabilitySet::renormalized(std::move(probabilities), predictions.labels(),
                                        predictions.class_count());
}

std::vector<int> predicted_labels(const ProbabilitySet& probabilities) {
    const std::size_t n = probabilities.sample_count();
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = probabilities.row(i);
        std::size_t best = 0;
        for (std::size_t j = 1; j < row.size(); ++j) {
            if (row[j] > row[best]) {
                best = j;
            }
        }
        labels[i] = static_cast<int>(best);
    }
    return labels;
}

std::vector<double> confidences(const ProbabilitySet& probabilities, const ConfidenceMode& mode) {
    const std::size_t n = probabilities.sample_count();
    std::vector<double> out(n);
    if (mode.is_top_label()) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = probabilities.row(i);
            out[i] = *std::max_element(row.begin(), row.end());
        }
    } else {
        const int c = mode.chosen_class_index();
        if (c >= probabilities.class_count()) {
            throw ValidationError("confidences: chosen class index " + std::to_string(c) +
                                  " is outside [0, " +
                                  std::to_string(probabilities.class_count()) + ")");
        }
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = probabilities.row(i)[static_cast<std::size_t>(c)];
        }
    }
    return out;
}

} // namespace calib
