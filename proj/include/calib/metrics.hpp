#pragma once

#include <optional>
#include <string>
#include <vector>

#include "calib/types.hpp"

namespace calib::metrics {

/// One confidence bin of a reliability diagram. `mean_confidence` and
/// `empirical_frequency` are present only when the bin holds samples.
struct ReliabilityBin {
    std::size_t sample_count = 0;
    std::optional<double> mean_confidence;
    std::optional<double> empirical_frequency;
};

/// Equal-width binning of per-sample confidences against observed outcomes.
///
/// In chosen-class mode a bin's empirical frequency is the fraction of its
/// samples whose true label is the chosen class; in top-label mode it is the
/// fraction whose predicted label is correct.
struct ReliabilityDiagram {
    std::vector<ReliabilityBin> bins;
    std::vector<double> bin_edges; // bins.size() + 1 values from 0 to 1
    std::size_t total_samples = 0;
    ConfidenceMode mode = ConfidenceMode::top_label();
};

struct ConfusionCounts {
    std::size_t true_positive = 0;
    std::size_t false_positive = 0;
    std::size_t false_negative = 0;
    std::size_t true_negative = 0;
};

/// Bundle of every metric the toolkit reports for one probability set.
struct CalibrationReport {
    std::string method_tag = "external";
    double error = 0.0;
    std::optional<double> f1;
    double ece = 0.0;
    double mce = 0.0;
    double nll = 0.0;
    double brier = 0.0;
    std::vector<double> fitted_temperatures;
    std::size_t bin_count = 0;
    std::size_t sample_count = 0;
};

/// Fraction of samples whose predicted label differs from the true label.
double classification_error(const std::vector<int>& true_labels,
                            const std::vector<int>& predicted_labels);

/// Binary confusion counts of `predicted_labels` against `true_labels`, with
/// membership in `positive_class` as the positive event. `class_count` bounds
/// the admissible class indices.
ConfusionCounts confusion_counts(const std::vector<int>& true_labels,
                                 const std::vector<int>& predicted_labels, int positive_class,
                                 int class_count);

/// Sørensen-Dice F1 = 2TP / (2TP + FP + FN); defined as 1.0 when TP, FP and
/// FN are all zero (nothing to find, nothing missed). True negatives never
/// enter the value.
double f1_score(const ConfusionCounts& counts);

/// Assigns sample i to bin floor(confidence_i * bins); confidence 1.0 goes to
/// the top bin. Bin means use compensated summation so that equal confidences
/// average back to themselves exactly.
ReliabilityDiagram build_reliability_diagram(const ProbabilitySet& probabilities,
                                             const ConfidenceMode& mode, std::size_t bins);

/// Expected calibration error: sum over occupied bins of
/// (n_i / N) * |frequency_i - confidence_i|.
double ece(const ReliabilityDiagram& diagram);

/// Maximum calibration error: the largest |frequency_i - confidence_i| over
/// occupied bins.
double mce(const ReliabilityDiagram& diagram);

/// Mean negative log-likelihood of the true class, with probabilities clamped
/// to [1e-12, 1] before the log.
double nll(const ProbabilitySet& probabilities);

/// Mean squared distance between each probability row and the one-hot true
/// label; lies in [0, 2].
double brier(const ProbabilitySet& probabilities);

/// Sample Pearson correlation coefficient. Throws if either input has zero
/// variance.
double pearson_correlation(const std::vector<double>& xs, const std::vector<double>& ys);

/// Runs every metric above on one probability set. F1 is computed only when
/// `positive_class` is given.
CalibrationReport evaluate(const ProbabilitySet& probabilities, const ConfidenceMode& mode,
                           std::size_t bins, std::optional<int> positive_class = std::nullopt);

constexpr double kProbabilityFloor = 1e-12;

} // namespace calib::metrics
