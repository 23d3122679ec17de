#pragma once

#include <optional>
#include <string>
#include <vector>

#include "calib/metrics.hpp"
#include "calib/types.hpp"

namespace calib::ensemble {

/// An ordered set of M prediction sets over the same samples: same sample
/// count, class count, and identical label vectors.
class EnsembleInput {
public:
    explicit EnsembleInput(std::vector<PredictionSet> members);

    std::size_t member_count() const { return members_.size(); }
    const PredictionSet& member(std::size_t index) const { return members_.at(index); }
    const std::vector<PredictionSet>& members() const { return members_; }

private:
    std::vector<PredictionSet> members_;
};

/// Which evaluation pipeline to run. The single-member pipelines carry the
/// member they act on.
class PipelineMethod {
public:
    enum class Kind { Individual, IndividualCalibrated, VoteOnly, CalibrateThenVote, VoteThenCalibrate };

    static PipelineMethod individual(std::size_t member_index) {
        return PipelineMethod(Kind::Individual, member_index);
    }
    static PipelineMethod individual_calibrated(std::size_t member_index) {
        return PipelineMethod(Kind::IndividualCalibrated, member_index);
    }
    static PipelineMethod vote_only() { return PipelineMethod(Kind::VoteOnly, 0); }
    static PipelineMethod calibrate_then_vote() { return PipelineMethod(Kind::CalibrateThenVote, 0); }
    static PipelineMethod vote_then_calibrate() { return PipelineMethod(Kind::VoteThenCalibrate, 0); }

    Kind kind() const { return kind_; }
    std::size_t member_index() const { return member_index_; }

    /// Report tag: I, I-C, E-M1, E-M2 or E-M3.
    std::string tag() const;

    bool needs_calibration_data() const {
        return kind_ == Kind::IndividualCalibrated || kind_ == Kind::CalibrateThenVote ||
               kind_ == Kind::VoteThenCalibrate;
    }

private:
    PipelineMethod(Kind kind, std::size_t member_index) : kind_(kind), member_index_(member_index) {}

    Kind kind_;
    std::size_t member_index_;
};

/// Unweighted elementwise mean of the members' probabilities. The mean is
/// accumulated in double-double precision, so averaging M identical members
/// returns each entry bit-for-bit.
ProbabilitySet soft_vote(const std::vector<ProbabilitySet>& members);

/// Elementwise log of the probabilities (clamped below at 1e-12), giving a
/// prediction set whose softmax reproduces the input. This is what lets a
/// temperature be fitted on an ensemble average.
PredictionSet logits_from_probabilities(const ProbabilitySet& probabilities);

/// Evaluation settings shared by every pipeline run.
struct PipelineSettings {
    ConfidenceMode mode = ConfidenceMode::chosen_class(1);
    std::size_t bins = 10;
    std::optional<int> positive_class;
};

/// Runs one pipeline over the test ensemble, fitting any temperatures on the
/// calibration ensemble, and reports every metric. `calibration` may be null
/// only for the fit-free pipelines (I and E-M1).
metrics::CalibrationReport run_pipeline(const PipelineMethod& method, const EnsembleInput& test,
                                        const EnsembleInput* calibration,
                                        const PipelineSettings& settings);

/// Runs several pipelines over the same inputs, preserving request order.
std::vector<metrics::CalibrationReport> compare_pipelines(const std::vector<PipelineMethod>& methods,
                                                          const EnsembleInput& test,
                                                          const EnsembleInput* calibration,
                                                          const PipelineSettings& settings);

/// The canonical comparison: the five named pipelines on member 0, followed
/// by one individual entry per member (the per-member scatter points).
std::vector<PipelineMethod> standard_comparison(std::size_t member_count);

} // namespace calib::ensemble
