#include "calib/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

namespace calib::io {

namespace {

using ordered_json = nlohmann::ordered_json;

std::size_t line_of_byte_offset(const std::string& text, std::size_t offset) {
    const std::size_t end = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + end, '\n'));
}

std::vector<std::string> split(const std::string& line, char separator) {
    std::vector<std::string> tokens;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(separator, start);
        if (pos == std::string::npos) {
            tokens.push_back(line.substr(start));
            return tokens;
        }
        tokens.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

bool parse_full_double(const std::string& token, double& value) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto result = std::from_chars(begin, end, value);
    return result.ec == std::errc() && result.ptr == end;
}

bool parse_full_int(const std::string& token, int& value) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto result = std::from_chars(begin, end, value);
    return result.ec == std::errc() && result.ptr == end;
}

ordered_json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(ParseError::Kind::BadJson, origin, line_of_byte_offset(text, e.byte),
                         "invalid JSON: " + std::string(e.what()));
    }
}

double json_number(const ordered_json& object, const char* key, const std::string& origin) {
    if (!object.contains(key) || !object.at(key).is_number()) {
        throw ParseError(ParseError::Kind::BadJson, origin, 0,
                         std::string("missing or non-numeric field \"") + key + "\"");
    }
    return object.at(key).get<double>();
}

} // namespace

std::string format_double(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

std::string format_csv_double(double value) {
    char buffer[64];
    const auto result =
        std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::scientific, 16);
    return std::string(buffer, result.ptr);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream stream(path, std::ios::binary);
    if (!stream) {
        throw IoError("cannot open file: " + path.string());
    }
    std::ostringstream content;
    content << stream.rdbuf();
    if (stream.bad()) {
        throw IoError("cannot read file: " + path.string());
    }
    return std::move(content).str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream stream(path, std::ios::binary | std::ios::trunc);
    if (!stream) {
        throw IoError("cannot open file for writing: " + path.string());
    }
    stream.write(content.data(), static_cast<std::streamsize>(content.size()));
    stream.flush();
    if (!stream.good()) {
        throw IoError("cannot write file: " + path.string());
    }
}

PredictionSet parse_predictions_text(const std::string& text, const std::string& origin) {
    std::vector<std::string> lines = split(text, '\n');
    // A trailing newline produces one final empty token; drop it.
    if (!lines.empty() && lines.back().empty()) {
        lines.pop_back();
    }
    for (std::string& line : lines) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
    }
    if (lines.empty()) {
        throw ParseError(ParseError::Kind::BadHeader, origin, 0, "file is empty");
    }

    const std::vector<std::string> header = split(lines[0], ',');
    if (header.size() < 3 || header[0] != "label") {
        throw ParseError(ParseError::Kind::BadHeader, origin, 1,
                         "expected header label,logit_0,...,logit_{K-1} with K >= 2");
    }
    const int class_count = static_cast<int>(header.size()) - 1;
    for (int j = 0; j < class_count; ++j) {
        if (header[static_cast<std::size_t>(j) + 1] != "logit_" + std::to_string(j)) {
            throw ParseError(ParseError::Kind::BadHeader, origin, 1,
                             "unexpected header column \"" +
                                 header[static_cast<std::size_t>(j) + 1] + "\"");
        }
    }

    if (lines.size() < 2) {
        throw ParseError(ParseError::Kind::MalformedRow, origin, 2, "file contains no data rows");
    }

    const auto k = static_cast<std::size_t>(class_count);
    std::vector<double> logits;
    logits.reserve((lines.size() - 1) * k);
    std::vector<int> labels;
    labels.reserve(lines.size() - 1);
    for (std::size_t row = 1; row < lines.size(); ++row) {
        const std::size_t line_number = row + 1;
        const std::vector<std::string> cells = split(lines[row], ',');
        if (cells.size() != k + 1) {
            throw ParseError(ParseError::Kind::MalformedRow, origin, line_number,
                             "expected " + std::to_string(k + 1) + " cells, found " +
                                 std::to_string(cells.size()));
        }
        int label = 0;
        if (!parse_full_int(cells[0], label)) {
            throw ParseError(ParseError::Kind::NonNumericCell, origin, line_number,
                             "label \"" + cells[0] + "\" is not an integer");
        }
        if (label < 0 || label >= class_count) {
            throw ParseError(ParseError::Kind::LabelOutOfRange, origin, line_number,
                             "label " + std::to_string(label) + " is outside [0, " +
                                 std::to_string(class_count) + ")");
        }
        labels.push_back(label);
        for (std::size_t j = 0; j < k; ++j) {
            double value = 0.0;
            if (!parse_full_double(cells[j + 1], value) || !std::isfinite(value)) {
                throw ParseError(ParseError::Kind::NonNumericCell, origin, line_number,
                                 "cell \"" + cells[j + 1] + "\" is not a finite number");
            }
            logits.push_back(value);
        }
    }
    return PredictionSet(std::move(logits), std::move(labels), class_count);
}

PredictionSet parse_predictions(const std::filesystem::path& path) {
    return parse_predictions_text(read_text_file(path), path.string());
}

std::string predictions_to_csv(const PredictionSet& predictions) {
    std::string out = "label";
    for (int j = 0; j < predictions.class_count(); ++j) {
        out += ",logit_" + std::to_string(j);
    }
    out += '\n';
    for (std::size_t i = 0; i < predictions.sample_count(); ++i) {
        out += std::to_string(predictions.labels()[i]);
        for (const double value : predictions.logits_row(i)) {
            out += ',';
            out += format_csv_double(value);
        }
        out += '\n';
    }
    return out;
}

void write_predictions(const PredictionSet& predictions, const std::filesystem::path& path) {
    write_text_file(path, predictions_to_csv(predictions));
}

EnsembleManifest parse_manifest(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    const ordered_json parsed = parse_json_text(text, path.string());
    if (!parsed.is_object() || !parsed.contains("members") || !parsed.at("members").is_array()) {
        throw ParseError(ParseError::Kind::BadJson, path.string(), 0,
                         "manifest must be an object with a \"members\" array");
    }

    EnsembleManifest manifest;
    const std::filesystem::path base = path.parent_path();
    for (const auto& entry : parsed.at("members")) {
        if (!entry.is_string()) {
            throw ParseError(ParseError::Kind::BadJson, path.string(), 0,
                             "member entries must be path strings");
        }
        manifest.members.push_back(base / entry.get<std::string>());
    }
    if (manifest.members.empty()) {
        throw ParseError(ParseError::Kind::BadJson, path.string(), 0,
                         "manifest lists no members");
    }
    if (parsed.contains("calibration_members")) {
        if (!parsed.at("calibration_members").is_array()) {
            throw ParseError(ParseError::Kind::BadJson, path.string(), 0,
                             "\"calibration_members\" must be an array");
        }
        for (const auto& entry : parsed.at("calibration_members")) {
            if (!entry.is_string()) {
                throw ParseError(ParseError::Kind::BadJson, path.string(), 0,
                                 "calibration member entries must be path strings");
            }
            manifest.calibration_members.push_back(base / entry.get<std::string>());
        }
        if (!manifest.calibration_members.empty() &&
            manifest.calibration_members.size() != manifest.members.size()) {
            throw ParseError(ParseError::Kind::BadJson, path.string(), 0,
                             "calibration member list length does not match member list length");
        }
    }
    if (parsed.contains("name")) {
        if (!parsed.at("name").is_string()) {
            throw ParseError(ParseError::Kind::BadJson, path.string(), 0,
                             "\"name\" must be a string");
        }
        manifest.name = parsed.at("name").get<std::string>();
    }
    return manifest;
}

void write_manifest(const EnsembleManifest& manifest, const std::filesystem::path& path) {
    ordered_json object;
    object["members"] = ordered_json::array();
    for (const auto& member : manifest.members) {
        object["members"].push_back(member.string());
    }
    object["calibration_members"] = ordered_json::array();
    for (const auto& member : manifest.calibration_members) {
        object["calibration_members"].push_back(member.string());
    }
    object["name"] = manifest.name;
    write_text_file(path, object.dump(2) + "\n");
}

std::string reports_to_json(const std::vector<metrics::CalibrationReport>& reports) {
    ordered_json array = ordered_json::array();
    for (const metrics::CalibrationReport& report : reports) {
        ordered_json object;
        object["method"] = report.method_tag;
        object["error"] = report.error;
        if (report.f1.has_value()) {
            object["f1"] = *report.f1;
        } else {
            object["f1"] = nullptr;
        }
        object["ece"] = report.ece;
        object["mce"] = report.mce;
        object["nll"] = report.nll;
        object["brier"] = report.brier;
        object["temperatures"] = report.fitted_temperatures;
        object["bins"] = report.bin_count;
        object["n"] = report.sample_count;
        array.push_back(std::move(object));
    }
    return array.dump(2) + "\n";
}

std::vector<metrics::CalibrationReport> parse_reports_json(const std::string& text,
                                                           const std::string& origin) {
    const ordered_json parsed = parse_json_text(text, origin);
    if (!parsed.is_array()) {
        throw ParseError(ParseError::Kind::BadJson, origin, 0, "report file must be a JSON array");
    }
    std::vector<metrics::CalibrationReport> reports;
    reports.reserve(parsed.size());
    for (const auto& object : parsed) {
        if (!object.is_object() || !object.contains("method") ||
            !object.at("method").is_string()) {
            throw ParseError(ParseError::Kind::BadJson, origin, 0,
                             "each report must be an object with a \"method\" string");
        }
        metrics::CalibrationReport report;
        report.method_tag = object.at("method").get<std::string>();
        report.error = json_number(object, "error", origin);
        if (object.contains("f1") && !object.at("f1").is_null()) {
            report.f1 = json_number(object, "f1", origin);
        }
        report.ece = json_number(object, "ece", origin);
        report.mce = json_number(object, "mce", origin);
        report.nll = json_number(object, "nll", origin);
        report.brier = json_number(object, "brier", origin);
        if (!object.contains("temperatures") || !object.at("temperatures").is_array()) {
            throw ParseError(ParseError::Kind::BadJson, origin, 0,
                             "missing \"temperatures\" array");
        }
        for (const auto& t : object.at("temperatures")) {
            if (!t.is_number()) {
                throw ParseError(ParseError::Kind::BadJson, origin, 0,
                                 "temperatures must be numbers");
            }
            report.fitted_temperatures.push_back(t.get<double>());
        }
        report.bin_count = static_cast<std::size_t>(json_number(object, "bins", origin));
        report.sample_count = static_cast<std::size_t>(json_number(object, "n", origin));
        reports.push_back(std::move(report));
    }
    return reports;
}

std::string temperature_model_to_json(const scaling::TemperatureModel& model) {
    ordered_json object;
    object["type"] = "temperature";
    object["T"] = model.temperature;
    return object.dump();
}

std::string platt_model_to_json(const scaling::PlattModel& model) {
    ordered_json object;
    object["type"] = "platt";
    object["a"] = model.slope;
    object["b"] = model.intercept;
    return object.dump();
}

scaling::TemperatureModel parse_temperature_model(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    const ordered_json parsed = parse_json_text(text, path.string());
    if (!parsed.is_object() || parsed.value("type", "") != "temperature") {
        throw ParseError(ParseError::Kind::BadJson, path.string(), 0,
                         "expected a model object with \"type\": \"temperature\"");
    }
    scaling::TemperatureModel model;
    model.temperature = json_number(parsed, "T", path.string());
    if (!(model.temperature > 0.0) || !std::isfinite(model.temperature)) {
        throw ParseError(ParseError::Kind::BadJson, path.string(), 0,
                         "temperature must be a positive finite number");
    }
    return model;
}

scaling::PlattModel parse_platt_model(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    const ordered_json parsed = parse_json_text(text, path.string());
    if (!parsed.is_object() || parsed.value("type", "") != "platt") {
        throw ParseError(ParseError::Kind::BadJson, path.string(), 0,
                         "expected a model object with \"type\": \"platt\"");
    }
    scaling::PlattModel model;
    model.slope = json_number(parsed, "a", path.string());
    model.intercept = json_number(parsed, "b", path.string());
    if (!std::isfinite(model.slope) || !std::isfinite(model.intercept)) {
        throw ParseError(ParseError::Kind::BadJson, path.string(), 0,
                         "model parameters must be finite");
    }
    return model;
}

std::string comparison_table_csv(const std::vector<metrics::CalibrationReport>& reports) {
    std::string out = "method,error,f1,ece,mce,nll,brier\n";
    for (const metrics::CalibrationReport& report : reports) {
        out += report.method_tag;
        out += ',';
        out += format_double(report.error);
        out += ',';
        if (report.f1.has_value()) {
            out += format_double(*report.f1);
        }
        out += ',';
        out += format_double(report.ece);
        out += ',';
        out += format_double(report.mce);
        out += ',';
        out += format_double(report.nll);
        out += ',';
        out += format_double(report.brier);
        out += '\n';
    }
    return out;
}

} // namespace calib::io
