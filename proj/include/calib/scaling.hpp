#pragma once

#include <functional>
#include <vector>

#include "calib/types.hpp"

namespace calib::scaling {

constexpr double kTemperatureMin = 1e-3;
constexpr double kTemperatureMax = 1e3;

/// Result of a one-dimensional temperature fit.
struct TemperatureModel {
    double temperature = 1.0;
    double calibration_nll = 0.0;
    int iterations = 0;
    bool converged = true; // false when the optimum sat at a search bound
};

/// Logistic recalibration of a scalar score: p = sigmoid(a*s + b).
struct PlattModel {
    double slope = 1.0;
    double intercept = 0.0;
    double calibration_nll = 0.0;
    bool converged = true;
};

/// Result of minimize_scalar_convex.
struct ScalarMinimum {
    double argmin = 0.0;
    double value = 0.0;
    int iterations = 0;
    bool at_boundary = false;
};

/// Golden-section search for the minimum of a unimodal function on
/// [lower, upper]. Stops when the bracket width drops below
/// tolerance * (upper - lower); flags minima that land on a bound.
ScalarMinimum minimize_scalar_convex(const std::function<double(double)>& f, double lower,
                                     double upper, double tolerance);

/// Divides every logit by T and takes the softmax of each row.
ProbabilitySet apply_temperature(const PredictionSet& predictions, double temperature);

/// Finds the temperature minimizing mean negative log-likelihood on the
/// calibration set. The search runs over log(1/T) (the objective is convex in
/// 1/T) within T in [1e-3, 1e3] to relative tolerance 1e-6. If T = 1 scores
/// at least as well as the search result, T = 1 is returned, so fitting can
/// never worsen the uncalibrated objective.
TemperatureModel fit_temperature(const PredictionSet& calibration);

/// Fits p(class 1 | s) = sigmoid(a*s + b) by damped Newton descent of the
/// mean logistic negative log-likelihood (at most 100 iterations, gradient
/// tolerance 1e-9). Labels must contain both classes.
PlattModel fit_platt(const std::vector<double>& scores, const std::vector<int>& labels);

/// Class-1 probabilities sigmoid(a*s + b) for each score.
std::vector<double> apply_platt(const std::vector<double>& scores, const PlattModel& model);

} // namespace calib::scaling
