#include "calib/ensemble.hpp"

#include <cmath>

#include "calib/core.hpp"
#include "calib/detail/numeric.hpp"
#include "calib/scaling.hpp"

namespace calib::ensemble {

EnsembleInput::EnsembleInput(std::vector<PredictionSet> members) : members_(std::move(members)) {
    if (members_.empty()) {
        throw ValidationError("EnsembleInput: at least one member is required");
    }
    const PredictionSet& first = members_.front();
    for (std::size_t m = 1; m < members_.size(); ++m) {
        const PredictionSet& member = members_[m];
        if (member.sample_count() != first.sample_count() ||
            member.class_count() != first.class_count()) {
            throw ValidationError("EnsembleInput: member " + std::to_string(m) +
                                  " does not match member 0 in shape");
        }
        if (member.labels() != first.labels()) {
            throw ValidationError("EnsembleInput: member " + std::to_string(m) +
                                  " carries different labels than member 0");
        }
    }
}

std::string PipelineMethod::tag() const {
    switch (kind_) {
    case Kind::Individual:
        return "I";
    case Kind::IndividualCalibrated:
        return "I-C";
    case Kind::VoteOnly:
        return "E-M1";
    case Kind::CalibrateThenVote:
        return "E-M2";
    case Kind::VoteThenCalibrate:
        return "E-M3";
    }
    throw ValidationError("PipelineMethod: unknown kind");
}

ProbabilitySet soft_vote(const std::vector<ProbabilitySet>& members) {
    if (members.empty()) {
        throw ValidationError("soft_vote: at least one member is required");
    }
    const ProbabilitySet& first = members.front();
    for (std::size_t m = 1; m < members.size(); ++m) {
        if (members[m].sample_count() != first.sample_count() ||
            members[m].class_count() != first.class_count()) {
            throw ValidationError("soft_vote: member " + std::to_string(m) +
                                  " does not match member 0 in shape");
        }
        if (members[m].labels() != first.labels()) {
            throw ValidationError("soft_vote: member " + std::to_string(m) +
                                  " carries different labels than member 0");
        }
    }

    const std::size_t entries = first.flat().size();
    const auto member_count = static_cast<double>(members.size());
    std::vector<double> mean(entries);
    for (std::size_t e = 0; e < entries; ++e) {
        detail::DoubleDouble accumulator;
        for (const ProbabilitySet& member : members) {
            accumulator.add(member.flat()[e]);
        }
        mean[e] = accumulator.divided_by(member_count);
    }
    // The strict constructor, not renormalized(): the mean of unit-sum rows
    // already sums to 1 within tolerance, and rescaling here would break the
    // exact identity soft_vote(M copies of P) == P.
    return ProbabilitySet(std::move(mean), first.labels(), first.class_count());
}

PredictionSet logits_from_probabilities(const ProbabilitySet& probabilities) {
    const auto flat = probabilities.flat();
    std::vector<double> logits(flat.size());
    for (std::size_t e = 0; e < flat.size(); ++e) {
        logits[e] = std::log(std::max(flat[e], metrics::kProbabilityFloor));
    }
    return PredictionSet(std::move(logits), probabilities.labels(), probabilities.class_count());
}

namespace {

std::vector<ProbabilitySet> member_probabilities(const EnsembleInput& ensemble) {
    std::vector<ProbabilitySet> out;
    out.reserve(ensemble.member_count());
    for (const PredictionSet& member : ensemble.members()) {
        out.push_back(to_probabilities(member));
    }
    return out;
}

const EnsembleInput& require_calibration(const PipelineMethod& method,
                                         const EnsembleInput* calibration,
                                         const EnsembleInput& test) {
    if (calibration == nullptr) {
        throw ValidationError("run_pipeline: method " + method.tag() +
                              " needs a calibration ensemble");
    }
    if (calibration->member_count() != test.member_count()) {
        throw ValidationError("run_pipeline: calibration ensemble has " +
                              std::to_string(calibration->member_count()) +
                              " members but the test ensemble has " +
                              std::to_string(test.member_count()));
    }
    if (calibration->member(0).class_count() != test.member(0).class_count()) {
        throw ValidationError("run_pipeline: calibration and test class counts differ");
    }
    return *calibration;
}

void check_member_index(const PipelineMethod& method, const EnsembleInput& test) {
    if (method.member_index() >= test.member_count()) {
        throw ValidationError("run_pipeline: member index " +
                              std::to_string(method.member_index()) +
                              " is outside the ensemble of " +
                              std::to_string(test.member_count()) + " members");
    }
}

} // namespace

metrics::CalibrationReport run_pipeline(const PipelineMethod& method, const EnsembleInput& test,
                                        const EnsembleInput* calibration,
                                        const PipelineSettings& settings) {
    metrics::CalibrationReport report;
    switch (method.kind()) {
    case PipelineMethod::Kind::Individual: {
        check_member_index(method, test);
        const ProbabilitySet probabilities = to_probabilities(test.member(method.member_index()));
        report = metrics::evaluate(probabilities, settings.mode, settings.bins,
                                   settings.positive_class);
        break;
    }
    case PipelineMethod::Kind::IndividualCalibrated: {
        check_member_index(method, test);
        const EnsembleInput& cal = require_calibration(method, calibration, test);
        const scaling::TemperatureModel model =
            scaling::fit_temperature(cal.member(method.member_index()));
        const ProbabilitySet probabilities =
            scaling::apply_temperature(test.member(method.member_index()), model.temperature);
        report = metrics::evaluate(probabilities, settings.mode, settings.bins,
                                   settings.positive_class);
        report.fitted_temperatures = {model.temperature};
        break;
    }
    case PipelineMethod::Kind::VoteOnly: {
        const ProbabilitySet voted = soft_vote(member_probabilities(test));
        report = metrics::evaluate(voted, settings.mode, settings.bins, settings.positive_class);
        break;
    }
    case PipelineMethod::Kind::CalibrateThenVote: {
        const EnsembleInput& cal = require_calibration(method, calibration, test);
        std::vector<ProbabilitySet> calibrated;
        calibrated.reserve(test.member_count());
        std::vector<double> temperatures;
        temperatures.reserve(test.member_count());
        for (std::size_t m = 0; m < test.member_count(); ++m) {
            const scaling::TemperatureModel model = scaling::fit_temperature(cal.member(m));
            temperatures.push_back(model.temperature);
            calibrated.push_back(scaling::apply_temperature(test.member(m), model.temperature));
        }
        const ProbabilitySet voted = soft_vote(calibrated);
        report = metrics::evaluate(voted, settings.mode, settings.bins, settings.positive_class);
        report.fitted_temperatures = std::move(temperatures);
        break;
    }
    case PipelineMethod::Kind::VoteThenCalibrate: {
        const EnsembleInput& cal = require_calibration(method, calibration, test);
        const PredictionSet voted_calibration =
            logits_from_probabilities(soft_vote(member_probabilities(cal)));
        const PredictionSet voted_test =
            logits_from_probabilities(soft_vote(member_probabilities(test)));
        const scaling::TemperatureModel model = scaling::fit_temperature(voted_calibration);
        const ProbabilitySet probabilities =
            scaling::apply_temperature(voted_test, model.temperature);
        report = metrics::evaluate(probabilities, settings.mode, settings.bins,
                                   settings.positive_class);
        report.fitted_temperatures = {model.temperature};
        break;
    }
    }
    report.method_tag = method.tag();
    return report;
}

std::vector<metrics::CalibrationReport> compare_pipelines(const std::vector<PipelineMethod>& methods,
                                                          const EnsembleInput& test,
                                                          const EnsembleInput* calibration,
                                                          const PipelineSettings& settings) {
    std::vector<metrics::CalibrationReport> reports;
    reports.reserve(methods.size());
    for (const PipelineMethod& method : methods) {
        reports.push_back(run_pipeline(method, test, calibration, settings));
    }
    return reports;
}

std::vector<PipelineMethod> standard_comparison(std::size_t member_count) {
    if (member_count == 0) {
        throw ValidationError("standard_comparison: at least one member is required");
    }
    std::vector<PipelineMethod> methods = {
        PipelineMethod::individual(0),          PipelineMethod::individual_calibrated(0),
        PipelineMethod::vote_only(),            PipelineMethod::calibrate_then_vote(),
        PipelineMethod::vote_then_calibrate(),
    };
    for (std::size_t m = 0; m < member_count; ++m) {
        methods.push_back(PipelineMethod::individual(m));
    }
    return methods;
}

} // namespace calib::ensemble
