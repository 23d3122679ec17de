#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <vector>

#include "calib/core.hpp"
#include "calib/ensemble.hpp"
#include "calib/metrics.hpp"
#include "calib/scaling.hpp"
#include "calib/synth.hpp"
#include "calib/types.hpp"

using namespace calib;

namespace {

/// Builds an ensemble whose members share one label vector: each member is the
/// same seeded base set with its logits rescaled by a member-specific factor
/// (sharpening or flattening the confidence without moving the argmax).
ensemble::EnsembleInput make_ensemble(std::size_t samples, std::uint64_t seed,
                                      const std::vector<double>& member_scales) {
    const PredictionSet base = synth::generate({samples, seed, 1.0, 2.0, 2.0});
    std::vector<PredictionSet> members;
    members.reserve(member_scales.size());
    for (double scale : member_scales) {
        std::vector<double> logits(base.logits_flat().begin(), base.logits_flat().end());
        for (double& value : logits) {
            value *= scale;
        }
        members.emplace_back(std::move(logits), base.labels(), base.class_count());
    }
    return ensemble::EnsembleInput(std::move(members));
}

void check_reports_identical(const metrics::CalibrationReport& a,
                             const metrics::CalibrationReport& b) {
    CHECK(a.error == b.error);
    CHECK(a.ece == b.ece);
    CHECK(a.mce == b.mce);
    CHECK(a.nll == b.nll);
    CHECK(a.brier == b.brier);
    CHECK(a.f1.has_value() == b.f1.has_value());
    if (a.f1 && b.f1) {
        CHECK(*a.f1 == *b.f1);
    }
    CHECK(a.sample_count == b.sample_count);
    CHECK(a.bin_count == b.bin_count);
}

} // namespace

TEST_CASE("soft_vote averages member probabilities elementwise") {
    // Dyadic fractions so the expected means are exact in floating point.
    const ProbabilitySet a({0.75, 0.25, 0.125, 0.875}, {0, 1}, 2);
    const ProbabilitySet b({0.25, 0.75, 0.375, 0.625}, {0, 1}, 2);
    const ProbabilitySet voted = ensemble::soft_vote({a, b});
    CHECK(voted.flat()[0] == 0.5);
    CHECK(voted.flat()[1] == 0.5);
    CHECK(voted.flat()[2] == 0.25);
    CHECK(voted.flat()[3] == 0.75);
    CHECK(voted.labels() == std::vector<int>{0, 1});
}

TEST_CASE("soft_vote of non-dyadic probabilities is correctly rounded") {
    const ProbabilitySet a({0.9, 0.1}, {1}, 2);
    const ProbabilitySet b({0.4, 0.6}, {1}, 2);
    const ProbabilitySet voted = ensemble::soft_vote({a, b});
    CHECK(voted.flat()[0] == doctest::Approx(0.65).epsilon(1e-15));
    CHECK(voted.flat()[1] == doctest::Approx(0.35).epsilon(1e-15));
}

TEST_CASE("soft_vote with a single member returns it bit for bit") {
    const ProbabilitySet member = to_probabilities(synth::generate({300, 5, 1.0, 2.0, 2.0}));
    const ProbabilitySet voted = ensemble::soft_vote({member});
    REQUIRE(voted.flat().size() == member.flat().size());
    for (std::size_t e = 0; e < member.flat().size(); ++e) {
        CHECK(voted.flat()[e] == member.flat()[e]);
    }
}

TEST_CASE("soft_vote of several identical members returns each entry bit for bit") {
    const ProbabilitySet member = to_probabilities(synth::generate({300, 6, 1.0, 2.0, 2.0}));
    for (std::size_t copies : {2, 3, 7}) {
        const std::vector<ProbabilitySet> stack(copies, member);
        const ProbabilitySet voted = ensemble::soft_vote(stack);
        for (std::size_t e = 0; e < member.flat().size(); ++e) {
            CHECK(voted.flat()[e] == member.flat()[e]);
        }
    }
}

TEST_CASE("soft_vote is insensitive to member order") {
    const ProbabilitySet a = to_probabilities(synth::generate({200, 11, 1.0, 2.0, 2.0}));
    const PredictionSet base = synth::generate({200, 11, 1.0, 2.0, 2.0});
    std::vector<double> doubled(base.logits_flat().begin(), base.logits_flat().end());
    for (double& value : doubled) {
        value *= 2.0;
    }
    const ProbabilitySet b =
        to_probabilities(PredictionSet(std::move(doubled), base.labels(), base.class_count()));
    std::vector<double> halved(base.logits_flat().begin(), base.logits_flat().end());
    for (double& value : halved) {
        value *= 0.5;
    }
    const ProbabilitySet c =
        to_probabilities(PredictionSet(std::move(halved), base.labels(), base.class_count()));

    const ProbabilitySet forward = ensemble::soft_vote({a, b, c});
    const ProbabilitySet backward = ensemble::soft_vote({c, b, a});
    for (std::size_t e = 0; e < forward.flat().size(); ++e) {
        CHECK(std::abs(forward.flat()[e] - backward.flat()[e]) <= 1e-15);
    }
}

TEST_CASE("soft_vote rejects empty and misaligned inputs") {
    CHECK_THROWS_AS(ensemble::soft_vote({}), ValidationError);

    const ProbabilitySet two_rows({0.5, 0.5, 0.25, 0.75}, {0, 1}, 2);
    const ProbabilitySet one_row({0.5, 0.5}, {0}, 2);
    CHECK_THROWS_AS(ensemble::soft_vote({two_rows, one_row}), ValidationError);

    const ProbabilitySet other_labels({0.5, 0.5, 0.25, 0.75}, {1, 1}, 2);
    CHECK_THROWS_AS(ensemble::soft_vote({two_rows, other_labels}), ValidationError);
}

TEST_CASE("logits_from_probabilities round-trips through softmax") {
    const ProbabilitySet original = to_probabilities(synth::generate({400, 17, 1.5, 2.0, 2.0}));
    const PredictionSet as_logits = ensemble::logits_from_probabilities(original);
    const ProbabilitySet recovered = to_probabilities(as_logits);
    REQUIRE(recovered.flat().size() == original.flat().size());
    for (std::size_t e = 0; e < original.flat().size(); ++e) {
        CHECK(std::abs(recovered.flat()[e] - original.flat()[e]) <= 1e-9);
    }
}

TEST_CASE("logits_from_probabilities clamps zero probabilities") {
    const ProbabilitySet degenerate({1.0, 0.0}, {0}, 2);
    const PredictionSet logits = ensemble::logits_from_probabilities(degenerate);
    CHECK(logits.logits_row(0)[0] == 0.0);
    CHECK(logits.logits_row(0)[1] == std::log(1e-12));
}

TEST_CASE("averaging pipeline over identical members matches the single-member pipeline") {
    const PredictionSet base = synth::generate({500, 21, 1.0, 2.0, 2.0});
    const ensemble::EnsembleInput test({base, base, base});
    const ensemble::PipelineSettings settings;

    const metrics::CalibrationReport individual =
        ensemble::run_pipeline(ensemble::PipelineMethod::individual(0), test, nullptr, settings);
    const metrics::CalibrationReport voted =
        ensemble::run_pipeline(ensemble::PipelineMethod::vote_only(), test, nullptr, settings);

    CHECK(individual.method_tag == "I");
    CHECK(voted.method_tag == "E-M1");
    check_reports_identical(individual, voted);
}

TEST_CASE("calibrate-then-average with unit temperatures reproduces plain averaging") {
    // Scaling every member by T = 1 is the identity, so hand-composing the
    // calibrated pipeline with unit temperatures must reproduce the plain
    // averaging pipeline bit for bit.
    const ensemble::EnsembleInput test = make_ensemble(400, 23, {0.7, 1.0, 1.9});
    const ensemble::PipelineSettings settings;

    std::vector<ProbabilitySet> unit_calibrated;
    for (const PredictionSet& member : test.members()) {
        unit_calibrated.push_back(scaling::apply_temperature(member, 1.0));
    }
    const ProbabilitySet composed = ensemble::soft_vote(unit_calibrated);
    const metrics::CalibrationReport by_hand =
        metrics::evaluate(composed, settings.mode, settings.bins, settings.positive_class);

    const metrics::CalibrationReport pipeline =
        ensemble::run_pipeline(ensemble::PipelineMethod::vote_only(), test, nullptr, settings);
    check_reports_identical(by_hand, pipeline);
}

TEST_CASE("single-member ensembles collapse the averaging pipelines onto the individual ones") {
    const ensemble::EnsembleInput test = make_ensemble(600, 29, {1.0});
    const ensemble::EnsembleInput calibration = make_ensemble(600, 31, {1.0});
    const ensemble::PipelineSettings settings;

    const metrics::CalibrationReport individual =
        ensemble::run_pipeline(ensemble::PipelineMethod::individual(0), test, nullptr, settings);
    const metrics::CalibrationReport vote_only =
        ensemble::run_pipeline(ensemble::PipelineMethod::vote_only(), test, nullptr, settings);
    check_reports_identical(individual, vote_only);

    const metrics::CalibrationReport calibrated = ensemble::run_pipeline(
        ensemble::PipelineMethod::individual_calibrated(0), test, &calibration, settings);
    const metrics::CalibrationReport calibrate_vote = ensemble::run_pipeline(
        ensemble::PipelineMethod::calibrate_then_vote(), test, &calibration, settings);
    check_reports_identical(calibrated, calibrate_vote);
    REQUIRE(calibrated.fitted_temperatures.size() == 1);
    REQUIRE(calibrate_vote.fitted_temperatures.size() == 1);
    CHECK(calibrated.fitted_temperatures[0] == calibrate_vote.fitted_temperatures[0]);

    // Averaging one member and re-deriving logits changes the representation
    // but not the distribution, so the fitted temperature must agree closely.
    const metrics::CalibrationReport vote_calibrate = ensemble::run_pipeline(
        ensemble::PipelineMethod::vote_then_calibrate(), test, &calibration, settings);
    REQUIRE(vote_calibrate.fitted_temperatures.size() == 1);
    CHECK(vote_calibrate.fitted_temperatures[0] ==
          doctest::Approx(calibrated.fitted_temperatures[0]).epsilon(1e-3));
    CHECK(vote_calibrate.ece == doctest::Approx(calibrated.ece).epsilon(1e-6));
    CHECK(vote_calibrate.nll == doctest::Approx(calibrated.nll).epsilon(1e-6));
}

TEST_CASE("temperature scaling never moves the predicted label") {
    const ensemble::EnsembleInput test = make_ensemble(800, 37, {1.6});
    const ensemble::EnsembleInput calibration = make_ensemble(800, 41, {1.6});
    ensemble::PipelineSettings settings;
    settings.positive_class = 1;

    const metrics::CalibrationReport plain =
        ensemble::run_pipeline(ensemble::PipelineMethod::individual(0), test, nullptr, settings);
    const metrics::CalibrationReport calibrated = ensemble::run_pipeline(
        ensemble::PipelineMethod::individual_calibrated(0), test, &calibration, settings);

    CHECK(plain.error == calibrated.error);
    REQUIRE(plain.f1.has_value());
    REQUIRE(calibrated.f1.has_value());
    CHECK(*plain.f1 == *calibrated.f1);
    // Calibration should still have moved the probability metrics.
    CHECK(calibrated.nll != plain.nll);
}

TEST_CASE("pipelines that fit a temperature require calibration data") {
    const ensemble::EnsembleInput test = make_ensemble(100, 43, {1.0, 2.0});
    const ensemble::PipelineSettings settings;

    CHECK(ensemble::PipelineMethod::individual_calibrated(0).needs_calibration_data());
    CHECK(ensemble::PipelineMethod::calibrate_then_vote().needs_calibration_data());
    CHECK(ensemble::PipelineMethod::vote_then_calibrate().needs_calibration_data());
    CHECK_FALSE(ensemble::PipelineMethod::individual(0).needs_calibration_data());
    CHECK_FALSE(ensemble::PipelineMethod::vote_only().needs_calibration_data());

    CHECK_THROWS_AS(ensemble::run_pipeline(ensemble::PipelineMethod::individual_calibrated(0),
                                           test, nullptr, settings),
                    ValidationError);
    CHECK_THROWS_AS(ensemble::run_pipeline(ensemble::PipelineMethod::calibrate_then_vote(), test,
                                           nullptr, settings),
                    ValidationError);
    CHECK_THROWS_AS(ensemble::run_pipeline(ensemble::PipelineMethod::vote_then_calibrate(), test,
                                           nullptr, settings),
                    ValidationError);
}

TEST_CASE("run_pipeline rejects mismatched calibration ensembles and member indices") {
    const ensemble::EnsembleInput test = make_ensemble(100, 47, {1.0, 2.0});
    const ensemble::EnsembleInput narrow_calibration = make_ensemble(100, 53, {1.0});
    const ensemble::PipelineSettings settings;

    CHECK_THROWS_AS(ensemble::run_pipeline(ensemble::PipelineMethod::calibrate_then_vote(), test,
                                           &narrow_calibration, settings),
                    ValidationError);
    CHECK_THROWS_AS(ensemble::run_pipeline(ensemble::PipelineMethod::individual(2), test, nullptr,
                                           settings),
                    ValidationError);
    CHECK_THROWS_AS(ensemble::run_pipeline(ensemble::PipelineMethod::individual_calibrated(5),
                                           test, &test, settings),
                    ValidationError);
}

TEST_CASE("EnsembleInput validates member alignment") {
    CHECK_THROWS_AS(ensemble::EnsembleInput({}), ValidationError);

    const PredictionSet two_rows({1.0, 0.0, 0.0, 1.0}, {0, 1}, 2);
    const PredictionSet one_row({1.0, 0.0}, {0}, 2);
    CHECK_THROWS_AS(ensemble::EnsembleInput({two_rows, one_row}), ValidationError);

    const PredictionSet other_labels({1.0, 0.0, 0.0, 1.0}, {0, 0}, 2);
    CHECK_THROWS_AS(ensemble::EnsembleInput({two_rows, other_labels}), ValidationError);

    const ensemble::EnsembleInput good({two_rows, two_rows});
    CHECK(good.member_count() == 2);
    CHECK(good.member(1).sample_count() == 2);
}

TEST_CASE("each pipeline records the temperatures it fitted") {
    const ensemble::EnsembleInput test = make_ensemble(500, 59, {0.8, 1.0, 1.7});
    const ensemble::EnsembleInput calibration = make_ensemble(500, 61, {0.8, 1.0, 1.7});
    const ensemble::PipelineSettings settings;

    CHECK(ensemble::run_pipeline(ensemble::PipelineMethod::individual(1), test, nullptr, settings)
              .fitted_temperatures.empty());
    CHECK(ensemble::run_pipeline(ensemble::PipelineMethod::vote_only(), test, nullptr, settings)
              .fitted_temperatures.empty());
    CHECK(ensemble::run_pipeline(ensemble::PipelineMethod::individual_calibrated(1), test,
                                 &calibration, settings)
              .fitted_temperatures.size() == 1);
    CHECK(ensemble::run_pipeline(ensemble::PipelineMethod::calibrate_then_vote(), test,
                                 &calibration, settings)
              .fitted_temperatures.size() == 3);
    CHECK(ensemble::run_pipeline(ensemble::PipelineMethod::vote_then_calibrate(), test,
                                 &calibration, settings)
              .fitted_temperatures.size() == 1);
}

TEST_CASE("compare_pipelines preserves the requested order") {
    const ensemble::EnsembleInput test = make_ensemble(300, 67, {1.0, 1.5});
    const ensemble::EnsembleInput calibration = make_ensemble(300, 71, {1.0, 1.5});
    const ensemble::PipelineSettings settings;

    const std::vector<ensemble::PipelineMethod> methods = {
        ensemble::PipelineMethod::vote_only(),
        ensemble::PipelineMethod::individual(1),
        ensemble::PipelineMethod::vote_then_calibrate(),
    };
    const std::vector<metrics::CalibrationReport> reports =
        ensemble::compare_pipelines(methods, test, &calibration, settings);
    REQUIRE(reports.size() == 3);
    CHECK(reports[0].method_tag == "E-M1");
    CHECK(reports[1].method_tag == "I");
    CHECK(reports[2].method_tag == "E-M3");

    // Each entry matches a standalone run of the same pipeline.
    const metrics::CalibrationReport standalone =
        ensemble::run_pipeline(methods[2], test, &calibration, settings);
    check_reports_identical(reports[2], standalone);
}

TEST_CASE("standard_comparison lists the five named pipelines then every member") {
    const std::vector<ensemble::PipelineMethod> methods = ensemble::standard_comparison(4);
    REQUIRE(methods.size() == 9);
    CHECK(methods[0].tag() == "I");
    CHECK(methods[1].tag() == "I-C");
    CHECK(methods[2].tag() == "E-M1");
    CHECK(methods[3].tag() == "E-M2");
    CHECK(methods[4].tag() == "E-M3");
    for (std::size_t m = 0; m < 4; ++m) {
        CHECK(methods[5 + m].tag() == "I");
        CHECK(methods[5 + m].member_index() == m);
    }
    CHECK_THROWS_AS(ensemble::standard_comparison(0), ValidationError);
}

TEST_CASE("averaging overconfident members improves calibration on held-out data") {
    // Members sharpened by different factors are each overconfident; their
    // average should sit closer to the diagonal than a typical member.
    const ensemble::EnsembleInput test = make_ensemble(4000, 73, {1.8, 2.4, 3.0, 2.1, 2.7});
    const ensemble::PipelineSettings settings;

    std::vector<double> member_eces;
    for (std::size_t m = 0; m < test.member_count(); ++m) {
        member_eces.push_back(
            ensemble::run_pipeline(ensemble::PipelineMethod::individual(m), test, nullptr, settings)
                .ece);
    }
    const double voted_ece =
        ensemble::run_pipeline(ensemble::PipelineMethod::vote_only(), test, nullptr, settings).ece;

    std::vector<double> sorted = member_eces;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    CHECK(voted_ece <= median);
}
