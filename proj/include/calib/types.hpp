#pragma once

#include <span>
#include <string>
#include <vector>

#include "calib/errors.hpp"

namespace calib {

/// Selects which per-sample confidence a reliability diagram is built from:
/// the probability of one fixed class, or the probability of the predicted
/// (top) class.
class ConfidenceMode {
public:
    static ConfidenceMode top_label() { return ConfidenceMode(-1); }

    static ConfidenceMode chosen_class(int index) {
        if (index < 0) {
            throw ValidationError("ConfidenceMode: chosen class index must be non-negative");
        }
        return ConfidenceMode(index);
    }

    bool is_top_label() const { return chosen_ < 0; }

    /// Valid only when !is_top_label().
    int chosen_class_index() const {
        if (chosen_ < 0) {
            throw ValidationError("ConfidenceMode: top-label mode has no chosen class");
        }
        return chosen_;
    }

    bool operator==(const ConfidenceMode&) const = default;

private:
    explicit ConfidenceMode(int chosen) : chosen_(chosen) {}

    int chosen_;
};

/// N samples of K-class logits paired with integer true labels.
///
/// Invariants enforced on construction: N >= 1, K >= 2, every logit finite,
/// every label in [0, K). Storage is row-major, one row per sample.
class PredictionSet {
public:
    PredictionSet(std::vector<double> logits, std::vector<int> labels, int class_count,
                  std::string name = "");

    std::size_t sample_count() const { return labels_.size(); }
    int class_count() const { return class_count_; }
    const std::string& name() const { return name_; }

    std::span<const double> logits_row(std::size_t row) const {
        return {logits_.data() + row * static_cast<std::size_t>(class_count_),
                static_cast<std::size_t>(class_count_)};
    }
    std::span<const double> logits_flat() const { return logits_; }
    const std::vector<int>& labels() const { return labels_; }

private:
    std::vector<double> logits_;
    std::vector<int> labels_;
    int class_count_;
    std::string name_;
};

/// N x K row-stochastic probabilities with the labels carried along.
///
/// Rows must sum to 1 within 1e-9 and every entry must lie in [0, 1];
/// use renormalized() for data that only approximately satisfies this
/// (e.g. values that passed through a text format).
class ProbabilitySet {
public:
    ProbabilitySet(std::vector<double> probabilities, std::vector<int> labels, int class_count);

    /// Accepts rows whose sums deviate from 1 by at most 1e-6 and rescales
    /// them to unit sum; anything farther off is rejected as corrupt.
    static ProbabilitySet renormalized(std::vector<double> probabilities, std::vector<int> labels,
                                       int class_count);

    std::size_t sample_count() const { return labels_.size(); }
    int class_count() const { return class_count_; }

    std::span<const double> row(std::size_t index) const {
        return {probabilities_.data() + index * static_cast<std::size_t>(class_count_),
                static_cast<std::size_t>(class_count_)};
    }
    std::span<const double> flat() const { return probabilities_; }
    const std::vector<int>& labels() const { return labels_; }

    static constexpr double kRowSumTolerance = 1e-9;
    static constexpr double kRenormalizeTolerance = 1e-6;

private:
    struct Unchecked {};
    ProbabilitySet(Unchecked, std::vector<double> probabilities, std::vector<int> labels,
                   int class_count);

    std::vector<double> probabilities_;
    std::vector<int> labels_;
    int class_count_;
};

} // namespace calib
