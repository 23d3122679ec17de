#include "calib/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "calib/core.hpp"
#include "calib/detail/numeric.hpp"

namespace calib::metrics {

double classification_error(const std::vector<int>& true_labels,
                            const std::vector<int>& predicted_labels) {
    if (true_labels.size() != predicted_labels.size()) {
        throw ValidationError("classification_error: label vectors differ in length");
    }
    if (true_labels.empty()) {
        throw ValidationError("classification_error: at least one sample is required");
    }
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < true_labels.size(); ++i) {
        wrong += (true_labels[i] != predicted_labels[i]) ? 1 : 0;
    }
    return static_cast<double>(wrong) / static_cast<double>(true_labels.size());
}

ConfusionCounts confusion_counts(const std::vector<int>& true_labels,
                                 const std::vector<int>& predicted_labels, int positive_class,
                                 int class_count) {
    if (true_labels.size() != predicted_labels.size()) {
        throw ValidationError("confusion_counts: label vectors differ in length");
    }
    if (positive_class < 0 || positive_class >= class_count) {
        throw ValidationError("confusion_counts: positive class " +
                              std::to_string(positive_class) + " is outside [0, " +
                              std::to_string(class_count) + ")");
    }
    ConfusionCounts counts;
    for (std::size_t i = 0; i < true_labels.size(); ++i) {
        const bool actual = true_labels[i] == positive_class;
        const bool predicted = predicted_labels[i] == positive_class;
        if (actual && predicted) {
            ++counts.true_positive;
        } else if (!actual && predicted) {
            ++counts.false_positive;
        } else if (actual && !predicted) {
            ++counts.false_negative;
        } else {
            ++counts.true_negative;
        }
    }
    return counts;
}

double f1_score(const ConfusionCounts& counts) {
    const std::size_t denominator =
        2 * counts.true_positive + counts.false_positive + counts.false_negative;
    if (denominator == 0) {
        return 1.0;
    }
    return static_cast<double>(2 * counts.true_positive) / static_cast<double>(denominator);
}

ReliabilityDiagram build_reliability_diagram(const ProbabilitySet& probabilities,
                                             const ConfidenceMode& mode, std::size_t bins) {
    if (bins == 0) {
        throw ValidationError("build_reliability_diagram: bin count must be positive");
    }
    const std::size_t n = probabilities.sample_count();
    const std::vector<double> confidence = confidences(probabilities, mode);

    // Outcome per sample: label == chosen class, or prediction correct.
    std::vector<bool> outcome(n);
    if (mode.is_top_label()) {
        const std::vector<int> predicted = predicted_labels(probabilities);
        for (std::size_t i = 0; i < n; ++i) {
            outcome[i] = predicted[i] == probabilities.labels()[i];
        }
    } else {
        const int chosen = mode.chosen_class_index();
        for (std::size_t i = 0; i < n; ++i) {
            outcome[i] = probabilities.labels()[i] == chosen;
        }
    }

    std::vector<std::vector<double>> bin_confidences(bins);
    std::vector<std::size_t> bin_hits(bins, 0);
    for (std::size_t i = 0; i < n; ++i) {
        auto bin = static_cast<std::size_t>(confidence[i] * static_cast<double>(bins));
        if (bin >= bins) {
            bin = bins - 1; // confidence of exactly 1.0
        }
        bin_confidences[bin].push_back(confidence[i]);
        if (outcome[i]) {
            ++bin_hits[bin];
        }
    }

    ReliabilityDiagram diagram;
    diagram.mode = mode;
    diagram.total_samples = n;
    diagram.bin_edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) {
        diagram.bin_edges[b] = static_cast<double>(b) / static_cast<double>(bins);
    }
    diagram.bins.resize(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        const std::size_t count = bin_confidences[b].size();
        diagram.bins[b].sample_count = count;
        if (count > 0) {
            diagram.bins[b].mean_confidence =
                detail::neumaier_sum(bin_confidences[b]) / static_cast<double>(count);
            diagram.bins[b].empirical_frequency =
                static_cast<double>(bin_hits[b]) / static_cast<double>(count);
        }
    }
    return diagram;
}

double ece(const ReliabilityDiagram& diagram) {
    const auto n = static_cast<double>(diagram.total_samples);
    double total = 0.0;
    for (const ReliabilityBin& bin : diagram.bins) {
        if (bin.sample_count == 0) {
            continue;
        }
        const double weight = static_cast<double>(bin.sample_count) / n;
        total += weight * std::abs(*bin.empirical_frequency - *bin.mean_confidence);
    }
    return total;
}

double mce(const ReliabilityDiagram& diagram) {
    double worst = 0.0;
    for (const ReliabilityBin& bin : diagram.bins) {
        if (bin.sample_count == 0) {
            continue;
        }
        worst = std::max(worst, std::abs(*bin.empirical_frequency - *bin.mean_confidence));
    }
    return worst;
}

double nll(const ProbabilitySet& probabilities) {
    const std::size_t n = probabilities.sample_count();
    std::vector<double> terms(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double p =
            probabilities.row(i)[static_cast<std::size_t>(probabilities.labels()[i])];
        terms[i] = -std::log(std::max(p, kProbabilityFloor));
    }
    return detail::neumaier_sum(terms) / static_cast<double>(n);
}

double brier(const ProbabilitySet& probabilities) {
    const std::size_t n = probabilities.sample_count();
    const auto k = static_cast<std::size_t>(probabilities.class_count());
    std::vector<double> terms(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = probabilities.row(i);
        const auto truth = static_cast<std::size_t>(probabilities.labels()[i]);
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double diff = row[j] - (j == truth ? 1.0 : 0.0);
            sum += diff * diff;
        }
        terms[i] = sum;
    }
    return detail::neumaier_sum(terms) / static_cast<double>(n);
}

double pearson_correlation(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) {
        throw ValidationError("pearson_correlation: input vectors differ in length");
    }
    if (xs.size() < 2) {
        throw ValidationError("pearson_correlation: at least two points are required");
    }
    const auto n = static_cast<double>(xs.size());
    const double mean_x = detail::neumaier_sum(xs) / n;
    const double mean_y = detail::neumaier_sum(ys) / n;
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mean_x;
        const double dy = ys[i] - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw ValidationError("pearson_correlation: an input has zero variance");
    }
    return sxy / std::sqrt(sxx * syy);
}

CalibrationReport evaluate(const ProbabilitySet& probabilities, const ConfidenceMode& mode,
                           std::size_t bins, std::optional<int> positive_class) {
    CalibrationReport report;
    const std::vector<int> predicted = predicted_labels(probabilities);
    report.error = classification_error(probabilities.labels(), predicted);
    if (positive_class.has_value()) {
        report.f1 = f1_score(confusion_counts(probabilities.labels(), predicted, *positive_class,
                                              probabilities.class_count()));
    }
    const ReliabilityDiagram diagram = build_reliability_diagram(probabilities, mode, bins);
    report.ece = ece(diagram);
    report.mce = mce(diagram);
    report.nll = nll(probabilities);
    report.brier = brier(probabilities);
    report.bin_count = bins;
    report.sample_count = probabilities.sample_count();
    return report;
}

} // namespace calib::metrics
