#include "calib/scaling.hpp"

#include <cmath>

#include "calib/core.hpp"
#include "calib/detail/numeric.hpp"
#include "calib/metrics.hpp"

namespace calib::scaling {

ScalarMinimum minimize_scalar_convex(const std::function<double(double)>& f, double lower,
                                     double upper, double tolerance) {
    if (!(lower < upper)) {
        throw ValidationError("minimize_scalar_convex: lower bound must be below upper bound");
    }
    if (!(tolerance > 0.0)) {
        throw ValidationError("minimize_scalar_convex: tolerance must be positive");
    }

    const auto checked = [&f](double x) {
        const double y = f(x);
        if (!std::isfinite(y)) {
            throw OptimizationError("minimize_scalar_convex: objective returned a non-finite "
                                    "value at x = " + std::to_string(x));
        }
        return y;
    };

    constexpr double inverse_phi = 0.6180339887498949; // (sqrt(5) - 1) / 2
    const double width_goal = tolerance * (upper - lower);
    double a = lower;
    double b = upper;
    double c = b - inverse_phi * (b - a);
    double d = a + inverse_phi * (b - a);
    double fc = checked(c);
    double fd = checked(d);

    ScalarMinimum result;
    constexpr int max_iterations = 200;
    while (b - a > width_goal && result.iterations < max_iterations) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inverse_phi * (b - a);
            fc = checked(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inverse_phi * (b - a);
            fd = checked(d);
        }
        ++result.iterations;
    }

    if (fc < fd) {
        result.argmin = c;
        result.value = fc;
    } else {
        result.argmin = d;
        result.value = fd;
    }
    result.at_boundary = (result.argmin - lower <= width_goal) || (upper - result.argmin <= width_goal);
    return result;
}

ProbabilitySet apply_temperature(const PredictionSet& predictions, double temperature) {
    if (!(temperature >= kTemperatureMin && temperature <= kTemperatureMax)) {
        throw ValidationError("apply_temperature: temperature must lie in [1e-3, 1e3]");
    }
    const std::size_t n = predictions.sample_count();
    const auto k = static_cast<std::size_t>(predictions.class_count());
    std::vector<double> scaled(n * k);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = predictions.logits_row(i);
        for (std::size_t j = 0; j < k; ++j) {
            scaled[i * k + j] = row[j] / temperature;
        }
    }
    PredictionSet tempered(std::move(scaled), predictions.labels(), predictions.class_count(),
                           predictions.name());
    return to_probabilities(tempered);
}

TemperatureModel fit_temperature(const PredictionSet& calibration) {
    if (calibration.sample_count() < 2) {
        throw ValidationError("fit_temperature: calibration set needs at least 2 samples");
    }

    // Mean NLL at temperature T, computed through the exact same code path
    // later evaluations will use, so the reported objective is comparable
    // bit-for-bit.
    const auto objective_at_temperature = [&calibration](double temperature) {
        return metrics::nll(apply_temperature(calibration, temperature));
    };
    // Search coordinate u = log(1/T): the objective is convex in 1/T, and the
    // log keeps the six decades of the temperature range evenly covered.
    const auto objective = [&objective_at_temperature](double u) {
        return objective_at_temperature(std::exp(-u));
    };

    const double lower = std::log(1.0 / kTemperatureMax);
    const double upper = std::log(1.0 / kTemperatureMin);
    const ScalarMinimum minimum = minimize_scalar_convex(objective, lower, upper, 1e-6);

    TemperatureModel model;
    model.temperature = std::exp(-minimum.argmin);
    model.calibration_nll = minimum.value;
    model.iterations = minimum.iterations;
    model.converged = !minimum.at_boundary;

    // Prefer T = 1 whenever it is at least as good: the fit must never score
    // worse than leaving the logits alone.
    const double nll_at_identity = objective_at_temperature(1.0);
    if (nll_at_identity <= model.calibration_nll) {
        model.temperature = 1.0;
        model.calibration_nll = nll_at_identity;
        model.converged = true;
    }
    return model;
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Mean logistic NLL of sigmoid(a*s + b) against binary labels, in the
/// overflow-safe log1p(exp(-|t|)) form. Compensated summation keeps the
/// evaluation noise well below the fit's stopping tolerance.
double logistic_nll(const std::vector<double>& scores, const std::vector<int>& labels, double a,
                    double b) {
    detail::NeumaierAccumulator total;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double t = a * scores[i] + b;
        // -log sigmoid(t) = log(1 + exp(-t)); -log(1 - sigmoid(t)) = log(1 + exp(t))
        const double signed_t = labels[i] == 1 ? t : -t;
        total.add(signed_t > 0 ? std::log1p(std::exp(-signed_t))
                               : -signed_t + std::log1p(std::exp(signed_t)));
    }
    return total.value() / static_cast<double>(scores.size());
}

} // namespace

PlattModel fit_platt(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) {
        throw ValidationError("fit_platt: scores and labels differ in length");
    }
    if (scores.empty()) {
        throw ValidationError("fit_platt: at least one sample is required");
    }
    bool saw_positive = false;
    bool saw_negative = false;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 0) {
            saw_negative = true;
        } else if (labels[i] == 1) {
            saw_positive = true;
        } else {
            throw ValidationError("fit_platt: labels must be 0 or 1");
        }
        if (!std::isfinite(scores[i])) {
            throw ValidationError("fit_platt: non-finite score at sample " + std::to_string(i));
        }
    }
    if (!saw_positive || !saw_negative) {
        throw ValidationError("fit_platt: both classes must be present");
    }

    const auto n = static_cast<double>(scores.size());
    double a = 0.0;
    double b = 0.0;
    double current_nll = logistic_nll(scores, labels, a, b);
    bool converged = false;

    for (int iteration = 0; iteration < 100; ++iteration) {
        // Gradient and Hessian of the mean logistic NLL. The gradient terms
        // cancel almost completely near the optimum, so they are summed with
        // compensation; otherwise the summation noise alone would sit above
        // the stopping tolerance on large inputs.
        detail::NeumaierAccumulator ga_sum;
        detail::NeumaierAccumulator gb_sum;
        double haa = 0.0;
        double hab = 0.0;
        double hbb = 0.0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            const double s = scores[i];
            const double p = sigmoid(a * s + b);
            const double residual = p - (labels[i] == 1 ? 1.0 : 0.0);
            const double weight = p * (1.0 - p);
            ga_sum.add(residual * s);
            gb_sum.add(residual);
            haa += weight * s * s;
            hab += weight * s;
            hbb += weight;
        }
        const double ga = ga_sum.value() / n;
        const double gb = gb_sum.value() / n;
        haa /= n;
        hab /= n;
        hbb /= n;

        if (std::sqrt(ga * ga + gb * gb) < 1e-9) {
            converged = true;
            break;
        }

        // Tiny ridge keeps the step defined when the Hessian degenerates
        // (e.g. constant scores make it rank one).
        const double ridge = 1e-12 * (1.0 + std::abs(haa) + std::abs(hbb));
        const double det = (haa + ridge) * (hbb + ridge) - hab * hab;
        double step_a = ((hbb + ridge) * ga - hab * gb) / det;
        double step_b = ((haa + ridge) * gb - hab * ga) / det;

        // Backtracking damping: halve the step until the objective improves.
        double scale = 1.0;
        double next_nll = logistic_nll(scores, labels, a - step_a, b - step_b);
        while (next_nll > current_nll && scale > 1e-12) {
            scale *= 0.5;
            next_nll = logistic_nll(scores, labels, a - scale * step_a, b - scale * step_b);
        }
        if (next_nll > current_nll) {
            // No scale showed a measurable decrease: the true improvement is
            // below the evaluation's rounding noise. The full Newton step
            // still contracts the gradient on a convex objective, so take it.
            scale = 1.0;
            next_nll = logistic_nll(scores, labels, a - step_a, b - step_b);
        }
        a -= scale * step_a;
        b -= scale * step_b;
        current_nll = next_nll;
    }

    if (!std::isfinite(a) || !std::isfinite(b)) {
        throw OptimizationError("fit_platt: iteration diverged to non-finite parameters");
    }
    PlattModel model;
    model.slope = a;
    model.intercept = b;
    model.calibration_nll = current_nll;
    model.converged = converged;
    return model;
}

std::vector<double> apply_platt(const std::vector<double>& scores, const PlattModel& model) {
    std::vector<double> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = sigmoid(model.slope * scores[i] + model.intercept);
    }
    return out;
}

} // namespace calib::scaling
