#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "calib/metrics.hpp"
#include "calib/scaling.hpp"
#include "calib/types.hpp"

namespace calib::io {

/// Shortest decimal string that parses back to exactly the same double.
/// Locale-independent; used for JSON-adjacent and SVG output.
std::string format_double(double value);

/// Fixed-width scientific form with 17 significant digits, the predictions
/// CSV cell format. Always round-trips exactly.
std::string format_csv_double(double value);

/// Reads a predictions CSV (header `label,logit_0,...,logit_{K-1}`, one
/// sample per row). Missing files raise IoError; malformed content raises
/// ParseError carrying the 1-based line number.
PredictionSet parse_predictions(const std::filesystem::path& path);

/// Parses predictions CSV text already in memory; `origin` names the source
/// in error messages.
PredictionSet parse_predictions_text(const std::string& text, const std::string& origin);

/// Writes the predictions CSV for `predictions` at `path`.
void write_predictions(const PredictionSet& predictions, const std::filesystem::path& path);

/// The predictions CSV as a string.
std::string predictions_to_csv(const PredictionSet& predictions);

/// Member file lists for an ensemble, as stored in a manifest JSON
/// ({"members": [...], "calibration_members": [...], "name": "..."}).
/// Relative member paths are resolved against the manifest's directory.
struct EnsembleManifest {
    std::vector<std::filesystem::path> members;
    std::vector<std::filesystem::path> calibration_members; // may be empty
    std::string name;
};

EnsembleManifest parse_manifest(const std::filesystem::path& path);
void write_manifest(const EnsembleManifest& manifest, const std::filesystem::path& path);

/// Serializes reports as a JSON array with the fixed key order
/// method, error, f1, ece, mce, nll, brier, temperatures, bins, n.
/// An absent f1 is serialized as null.
std::string reports_to_json(const std::vector<metrics::CalibrationReport>& reports);

/// Parses what reports_to_json produced (for round-trip checks and tooling).
std::vector<metrics::CalibrationReport> parse_reports_json(const std::string& text,
                                                           const std::string& origin);

/// {"type":"temperature","T":...}
std::string temperature_model_to_json(const scaling::TemperatureModel& model);
/// {"type":"platt","a":...,"b":...}
std::string platt_model_to_json(const scaling::PlattModel& model);

/// Reads a model JSON file of the given type back; the complementary fields
/// (iteration counts, objective values) are not stored and come back default.
scaling::TemperatureModel parse_temperature_model(const std::filesystem::path& path);
scaling::PlattModel parse_platt_model(const std::filesystem::path& path);

/// CSV table of one row per report: method,error,f1,ece,mce,nll,brier
/// (empty f1 cell when absent) — the error-vs-calibration scatter export.
std::string comparison_table_csv(const std::vector<metrics::CalibrationReport>& reports);

/// Reads a whole file, raising IoError when it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

/// Writes a whole file, raising IoError when it cannot be written.
void write_text_file(const std::filesystem::path& path, const std::string& content);

} // namespace calib::io
