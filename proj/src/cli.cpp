#include "calib/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "calib/core.hpp"
#include "calib/ensemble.hpp"
#include "calib/io.hpp"
#include "calib/metrics.hpp"
#include "calib/scaling.hpp"
#include "calib/svg.hpp"
#include "calib/synth.hpp"
#include "calib/types.hpp"

namespace calib::cli {

namespace {

constexpr const char* kVersion = "calib 1.0.0";

/// Options shared by every metric-producing subcommand.
struct EvalOptions {
    std::size_t bins = 10;
    int chosen_class = 1;
    bool top_label = false;
    int positive_class = 0;
    bool has_positive_class = false;

    ConfidenceMode mode() const {
        return top_label ? ConfidenceMode::top_label() : ConfidenceMode::chosen_class(chosen_class);
    }
    std::optional<int> positive() const {
        return has_positive_class ? std::optional<int>(positive_class) : std::nullopt;
    }
};

void add_eval_options(CLI::App* sub, EvalOptions& options, bool with_positive_class) {
    sub->add_option("--bins", options.bins, "Number of reliability-diagram bins")
        ->default_val(std::size_t{10});
    auto* chosen = sub->add_option("--chosen-class", options.chosen_class,
                                   "Class whose probability is the per-sample confidence")
                       ->default_val(1);
    sub->add_flag("--top-label", options.top_label,
                  "Use the predicted class's probability as the confidence")
        ->excludes(chosen);
    if (with_positive_class) {
        sub->add_option("--positive-class", options.positive_class,
                        "Positive class for F1 (enables the F1 column)");
    }
}

void finish_eval_options(const CLI::App* sub, EvalOptions& options, bool with_positive_class) {
    if (with_positive_class) {
        options.has_positive_class = sub->count("--positive-class") > 0;
    }
}

/// Writes `content` to --out when given, otherwise to the output stream.
void emit(const std::string& content, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << content;
    } else {
        io::write_text_file(out_path, content);
    }
}

ensemble::EnsembleInput load_ensemble(const std::vector<std::filesystem::path>& paths) {
    std::vector<PredictionSet> members;
    members.reserve(paths.size());
    for (const auto& path : paths) {
        members.push_back(io::parse_predictions(path));
    }
    return ensemble::EnsembleInput(std::move(members));
}

ensemble::PipelineMethod method_from_name(const std::string& name, std::size_t member_index) {
    if (name == "i") {
        return ensemble::PipelineMethod::individual(member_index);
    }
    if (name == "i-c") {
        return ensemble::PipelineMethod::individual_calibrated(member_index);
    }
    if (name == "e-m1") {
        return ensemble::PipelineMethod::vote_only();
    }
    if (name == "e-m2") {
        return ensemble::PipelineMethod::calibrate_then_vote();
    }
    return ensemble::PipelineMethod::vote_then_calibrate();
}

PredictionSet scale_logits(const PredictionSet& predictions, double temperature) {
    if (!(temperature >= scaling::kTemperatureMin && temperature <= scaling::kTemperatureMax)) {
        throw ValidationError("apply-temp: temperature must lie in [1e-3, 1e3]");
    }
    std::vector<double> scaled(predictions.logits_flat().begin(),
                               predictions.logits_flat().end());
    for (double& value : scaled) {
        value /= temperature;
    }
    return PredictionSet(std::move(scaled), predictions.labels(), predictions.class_count(),
                         predictions.name());
}

} // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Probability calibration toolkit: metrics, temperature and Platt scaling, "
                 "ensemble pipelines, reliability diagrams",
                 "calib"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    // --- metrics ---------------------------------------------------------
    auto* metrics_cmd = app.add_subcommand("metrics", "Evaluate a predictions file");
    std::string metrics_file;
    std::string metrics_out;
    EvalOptions metrics_eval;
    metrics_cmd->add_option("file", metrics_file, "Predictions CSV")->required();
    add_eval_options(metrics_cmd, metrics_eval, true);
    metrics_cmd->add_option("--out", metrics_out, "Write the report here instead of stdout");
    metrics_cmd->callback([&] {
        finish_eval_options(metrics_cmd, metrics_eval, true);
        const ProbabilitySet probabilities = to_probabilities(io::parse_predictions(metrics_file));
        const metrics::CalibrationReport report = metrics::evaluate(
            probabilities, metrics_eval.mode(), metrics_eval.bins, metrics_eval.positive());
        emit(io::reports_to_json({report}), metrics_out, out);
    });

    // --- fit-temp --------------------------------------------------------
    auto* fit_temp_cmd =
        app.add_subcommand("fit-temp", "Fit a temperature on a calibration predictions file");
    std::string fit_temp_file;
    std::string fit_temp_out;
    fit_temp_cmd->add_option("file", fit_temp_file, "Calibration predictions CSV")->required();
    fit_temp_cmd->add_option("--out", fit_temp_out, "Write the model JSON here instead of stdout");
    fit_temp_cmd->callback([&] {
        const scaling::TemperatureModel model =
            scaling::fit_temperature(io::parse_predictions(fit_temp_file));
        if (!model.converged) {
            err << "warning: the optimum sat at a search bound; the fit did not converge\n";
        }
        emit(io::temperature_model_to_json(model) + "\n", fit_temp_out, out);
    });

    // --- apply-temp ------------------------------------------------------
    auto* apply_temp_cmd =
        app.add_subcommand("apply-temp", "Divide a file's logits by a temperature");
    std::string apply_temp_file;
    std::string apply_temp_out;
    std::string apply_temp_model;
    double apply_temp_t = 1.0;
    apply_temp_cmd->add_option("file", apply_temp_file, "Predictions CSV")->required();
    auto* t_option =
        apply_temp_cmd->add_option("--t", apply_temp_t, "Temperature to apply directly");
    apply_temp_cmd->add_option("--model", apply_temp_model, "Temperature model JSON file")
        ->excludes(t_option);
    apply_temp_cmd->add_option("--out", apply_temp_out,
                               "Write the scaled predictions CSV here instead of stdout");
    apply_temp_cmd->callback([&] {
        double temperature = apply_temp_t;
        if (!apply_temp_model.empty()) {
            temperature = io::parse_temperature_model(apply_temp_model).temperature;
        } else if (apply_temp_cmd->count("--t") == 0) {
            throw ValidationError("apply-temp: provide --t or --model");
        }
        const PredictionSet scaled =
            scale_logits(io::parse_predictions(apply_temp_file), temperature);
        emit(io::predictions_to_csv(scaled), apply_temp_out, out);
    });

    // --- fit-platt -------------------------------------------------------
    auto* fit_platt_cmd = app.add_subcommand(
        "fit-platt", "Fit a logistic recalibration on a binary calibration predictions file");
    std::string fit_platt_file;
    std::string fit_platt_out;
    fit_platt_cmd->add_option("file", fit_platt_file, "Calibration predictions CSV (K = 2)")
        ->required();
    fit_platt_cmd->add_option("--out", fit_platt_out,
                              "Write the model JSON here instead of stdout");
    fit_platt_cmd->callback([&] {
        const PredictionSet predictions = io::parse_predictions(fit_platt_file);
        if (predictions.class_count() != 2) {
            throw ValidationError("fit-platt: requires a binary (K = 2) predictions file");
        }
        std::vector<double> scores(predictions.sample_count());
        for (std::size_t i = 0; i < scores.size(); ++i) {
            const auto row = predictions.logits_row(i);
            scores[i] = row[1] - row[0];
        }
        const scaling::PlattModel model = scaling::fit_platt(scores, predictions.labels());
        if (!model.converged) {
            err << "warning: the fit reached its iteration limit without meeting the gradient "
                   "tolerance\n";
        }
        emit(io::platt_model_to_json(model) + "\n", fit_platt_out, out);
    });

    // --- ensemble --------------------------------------------------------
    auto* ensemble_cmd =
        app.add_subcommand("ensemble", "Soft-vote the members of a manifest into one file");
    std::string ensemble_manifest;
    std::string ensemble_out;
    ensemble_cmd->add_option("manifest", ensemble_manifest, "Ensemble manifest JSON")->required();
    ensemble_cmd->add_option("--out", ensemble_out,
                             "Write the voted predictions CSV here instead of stdout");
    ensemble_cmd->callback([&] {
        const io::EnsembleManifest manifest = io::parse_manifest(ensemble_manifest);
        const ensemble::EnsembleInput input = load_ensemble(manifest.members);
        std::vector<ProbabilitySet> probabilities;
        probabilities.reserve(input.member_count());
        for (const PredictionSet& member : input.members()) {
            probabilities.push_back(to_probabilities(member));
        }
        const PredictionSet voted =
            ensemble::logits_from_probabilities(ensemble::soft_vote(probabilities));
        emit(io::predictions_to_csv(voted), ensemble_out, out);
    });

    // --- pipeline --------------------------------------------------------
    auto* pipeline_cmd =
        app.add_subcommand("pipeline", "Run one calibration pipeline over a manifest");
    std::string pipeline_manifest;
    std::string pipeline_out;
    std::string pipeline_method;
    std::size_t pipeline_member = 0;
    EvalOptions pipeline_eval;
    pipeline_cmd->add_option("manifest", pipeline_manifest, "Ensemble manifest JSON")->required();
    pipeline_cmd
        ->add_option("--method", pipeline_method,
                     "Pipeline to run: i, i-c, e-m1, e-m2 or e-m3")
        ->required()
        ->check(CLI::IsMember({"i", "i-c", "e-m1", "e-m2", "e-m3"}));
    pipeline_cmd->add_option("--member", pipeline_member,
                             "Member index for the single-member pipelines (i, i-c)");
    add_eval_options(pipeline_cmd, pipeline_eval, true);
    pipeline_cmd->add_option("--out", pipeline_out, "Write the report here instead of stdout");
    pipeline_cmd->callback([&] {
        finish_eval_options(pipeline_cmd, pipeline_eval, true);
        const io::EnsembleManifest manifest = io::parse_manifest(pipeline_manifest);
        const ensemble::PipelineMethod method =
            method_from_name(pipeline_method, pipeline_member);
        if (method.needs_calibration_data() && manifest.calibration_members.empty()) {
            throw ValidationError("pipeline: method " + method.tag() +
                                  " needs calibration_members in the manifest");
        }
        const ensemble::EnsembleInput test = load_ensemble(manifest.members);
        std::optional<ensemble::EnsembleInput> calibration;
        if (!manifest.calibration_members.empty()) {
            calibration = load_ensemble(manifest.calibration_members);
        }
        ensemble::PipelineSettings settings;
        settings.mode = pipeline_eval.mode();
        settings.bins = pipeline_eval.bins;
        settings.positive_class = pipeline_eval.positive();
        const metrics::CalibrationReport report = ensemble::run_pipeline(
            method, test, calibration ? &*calibration : nullptr, settings);
        emit(io::reports_to_json({report}), pipeline_out, out);
    });

    // --- compare ---------------------------------------------------------
    auto* compare_cmd = app.add_subcommand(
        "compare", "Run the five pipelines plus per-member individuals over a manifest");
    std::string compare_manifest;
    std::string compare_out;
    std::string compare_csv;
    EvalOptions compare_eval;
    compare_cmd->add_option("manifest", compare_manifest, "Ensemble manifest JSON")->required();
    add_eval_options(compare_cmd, compare_eval, true);
    compare_cmd->add_option("--csv", compare_csv,
                            "Also write the error-vs-calibration table to this CSV file");
    compare_cmd->add_option("--out", compare_out, "Write the reports here instead of stdout");
    compare_cmd->callback([&] {
        finish_eval_options(compare_cmd, compare_eval, true);
        const io::EnsembleManifest manifest = io::parse_manifest(compare_manifest);
        if (manifest.calibration_members.empty()) {
            throw ValidationError("compare: the manifest needs calibration_members (the "
                                  "calibrated pipelines fit on them)");
        }
        const ensemble::EnsembleInput test = load_ensemble(manifest.members);
        const ensemble::EnsembleInput calibration = load_ensemble(manifest.calibration_members);
        ensemble::PipelineSettings settings;
        settings.mode = compare_eval.mode();
        settings.bins = compare_eval.bins;
        settings.positive_class = compare_eval.positive();
        const std::vector<metrics::CalibrationReport> reports = ensemble::compare_pipelines(
            ensemble::standard_comparison(test.member_count()), test, &calibration, settings);
        emit(io::reports_to_json(reports), compare_out, out);
        if (!compare_csv.empty()) {
            io::write_text_file(compare_csv, io::comparison_table_csv(reports));
        }
    });

    // --- reliability -----------------------------------------------------
    auto* reliability_cmd =
        app.add_subcommand("reliability", "Render a reliability diagram as SVG");
    std::string reliability_file;
    std::string reliability_out;
    EvalOptions reliability_eval;
    reliability_cmd->add_option("file", reliability_file, "Predictions CSV")->required();
    add_eval_options(reliability_cmd, reliability_eval, false);
    reliability_cmd->add_option("--out", reliability_out,
                                "Write the SVG here instead of stdout");
    reliability_cmd->callback([&] {
        const ProbabilitySet probabilities =
            to_probabilities(io::parse_predictions(reliability_file));
        const metrics::ReliabilityDiagram diagram = metrics::build_reliability_diagram(
            probabilities, reliability_eval.mode(), reliability_eval.bins);
        emit(io::render_reliability_svg(diagram), reliability_out, out);
    });

    // --- synth -----------------------------------------------------------
    auto* synth_cmd =
        app.add_subcommand("synth", "Generate a seeded synthetic binary predictions file");
    std::string synth_out;
    synth::SynthConfig config;
    synth_cmd->add_option("--n", config.sample_count, "Number of samples")
        ->default_val(std::size_t{10000});
    synth_cmd->add_option("--seed", config.seed, "Generator seed")->default_val(std::uint64_t{0});
    synth_cmd
        ->add_option("--t-true", config.true_temperature,
                     "Ground-truth temperature distorting the emitted logits")
        ->default_val(1.0);
    synth_cmd->add_option("--alpha", config.alpha, "Beta-distribution alpha for confidences")
        ->default_val(2.0);
    synth_cmd->add_option("--beta", config.beta, "Beta-distribution beta for confidences")
        ->default_val(2.0);
    synth_cmd->add_option("--out", synth_out, "Output predictions CSV path")->required();
    synth_cmd->callback([&] {
        const PredictionSet predictions = synth::generate(config);
        io::write_predictions(predictions, synth_out);
        nlohmann::ordered_json meta;
        meta["n"] = config.sample_count;
        meta["seed"] = config.seed;
        meta["true_temperature"] = config.true_temperature;
        meta["alpha"] = config.alpha;
        meta["beta"] = config.beta;
        meta["class_count"] = synth::SynthConfig::kClassCount;
        meta["prng"] = synth::Xoshiro256pp::algorithm_name();
        io::write_text_file(synth_out + ".meta.json", meta.dump(2) + "\n");
    });

    try {
        std::vector<std::string> reversed(args);
        std::reverse(reversed.begin(), reversed.end());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const OptimizationError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace calib::cli
