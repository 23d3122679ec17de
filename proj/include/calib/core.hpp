#pragma once

#include <span>
#include <vector>

#include "calib/types.hpp"

namespace calib {

/// Writes softmax(logits) into `out` (same length). Uses the max-subtraction
/// form, so arbitrarily large logits never overflow.
void softmax_row(std::span<const double> logits, std::span<double> out);

/// Softmax applied to every row of a prediction set.
ProbabilitySet to_probabilities(const PredictionSet& predictions);

/// Index of the strictly largest probability in each row; ties resolve to the
/// lowest index. The same rule applied to logits gives the same answer, since
/// softmax is strictly increasing per row.
std::vector<int> predicted_labels(const ProbabilitySet& probabilities);

/// Per-sample confidence values: the probability of the predicted class
/// (top-label mode) or of one fixed class (chosen-class mode).
std::vector<double> confidences(const ProbabilitySet& probabilities, const ConfidenceMode& mode);

} // namespace calib
