#include "calib/types.hpp"

#include <cmath>
#include <utility>

namespace calib {

namespace {

void check_shape(std::size_t values_size, std::size_t label_count, int class_count,
                 const char* what) {
    if (class_count < 2) {
        throw ValidationError(std::string(what) + ": class count must be at least 2");
    }
    if (label_count == 0) {
        throw ValidationError(std::string(what) + ": at least one sample is required");
    }
    if (values_size != label_count * static_cast<std::size_t>(class_count)) {
        throw ValidationError(std::string(what) + ": value storage size does not equal "
                                                  "sample count times class count");
    }
}

void check_labels(const std::vector<int>& labels, int class_count, const char* what) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= class_count) {
            throw ValidationError(std::string(what) + ": label at sample " + std::to_string(i) +
                                  " is outside [0, " + std::to_string(class_count) + ")");
        }
    }
}

} // namespace

PredictionSet::PredictionSet(std::vector<double> logits, std::vector<int> labels, int class_count,
                             std::string name)
    : logits_(std::move(logits)), labels_(std::move(labels)), class_count_(class_count),
      name_(std::move(name)) {
    check_shape(logits_.size(), labels_.size(), class_count_, "PredictionSet");
    check_labels(labels_, class_count_, "PredictionSet");
    for (std::size_t i = 0; i < logits_.size(); ++i) {
        if (!std::isfinite(logits_[i])) {
            throw ValidationError("PredictionSet: non-finite logit at flat index " +
                                  std::to_string(i));
        }
    }
}

ProbabilitySet::ProbabilitySet(Unchecked, std::vector<double> probabilities,
                               std::vector<int> labels, int class_count)
    : probabilities_(std::move(probabilities)), labels_(std::move(labels)),
      class_count_(class_count) {}

ProbabilitySet::ProbabilitySet(std::vector<double> probabilities, std::vector<int> labels,
                               int class_count)
    : ProbabilitySet(Unchecked{}, std::move(probabilities), std::move(labels), class_count) {
    check_shape(probabilities_.size(), labels_.size(), class_count_, "ProbabilitySet");
    check_labels(labels_, class_count_, "ProbabilitySet");
    const auto k = static_cast<std::size_t>(class_count_);
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double p = probabilities_[i * k + j];
            if (!(p >= 0.0 && p <= 1.0)) {
                throw ValidationError("ProbabilitySet: entry outside [0, 1] at sample " +
                                      std::to_string(i));
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
            throw ValidationError("ProbabilitySet: row " + std::to_string(i) +
                                  " does not sum to 1");
        }
    }
}

ProbabilitySet ProbabilitySet::renormalized(std::vector<double> probabilities,
                                            std::vector<int> labels, int class_count) {
    check_shape(probabilities.size(), labels.size(), class_count, "ProbabilitySet");
    check_labels(labels, class_count, "ProbabilitySet");
    const auto k = static_cast<std::size_t>(class_count);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double p = probabilities[i * k + j];
            if (!(p >= 0.0 && p <= 1.0)) {
                throw ValidationError("ProbabilitySet: entry outside [0, 1] at sample " +
                                      std::to_string(i));
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > kRenormalizeTolerance) {
            throw ValidationError("ProbabilitySet: row " + std::to_string(i) +
                                  " sum is too far from 1 to renormalize");
        }
        for (std::size_t j = 0; j < k; ++j) {
            probabilities[i * k + j] /= sum;
        }
    }
    return ProbabilitySet(Unchecked{}, std::move(probabilities), std::move(labels), class_count);
}

std::string ParseError::format(const std::string& path, std::size_t line,
                               const std::string& message) {
    return path + ":" + std::to_string(line) + ": " + message;
}

} // namespace calib
