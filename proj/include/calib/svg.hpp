#pragma once

#include <filesystem>
#include <string>

#include "calib/metrics.hpp"

namespace calib::io {

/// Renders a reliability diagram as a standalone SVG document.
///
/// Occupied bins appear as bars whose horizontal center is the bin's mean
/// confidence and whose top is its empirical frequency, drawn inside a group
/// scaled so one data unit equals one coordinate unit; the y = x diagonal
/// marks perfect calibration, and the confidence-frequency gap of each bar is
/// shaded. Output bytes depend only on the diagram, so fixed inputs render
/// identically every time.
std::string render_reliability_svg(const metrics::ReliabilityDiagram& diagram);

/// Renders to a file.
void write_reliability_svg(const metrics::ReliabilityDiagram& diagram,
                           const std::filesystem::path& path);

} // namespace calib::io
