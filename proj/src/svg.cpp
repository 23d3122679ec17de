#include "calib/svg.hpp"

#include <algorithm>

#include "calib/io.hpp"

namespace calib::io {

namespace {

constexpr double kCanvasWidth = 640.0;
constexpr double kCanvasHeight = 640.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginRight = 30.0;
constexpr double kMarginBottom = 60.0;
constexpr double kPlotWidth = kCanvasWidth - kMarginLeft - kMarginRight;
constexpr double kPlotHeight = kCanvasHeight - kMarginTop - kMarginBottom;

double pixel_x(double data_x) { return kMarginLeft + kPlotWidth * data_x; }
double pixel_y(double data_y) { return kMarginTop + kPlotHeight * (1.0 - data_y); }

void append_attribute(std::string& out, const char* name, const std::string& value) {
    out += ' ';
    out += name;
    out += "=\"";
    out += value;
    out += '"';
}

void append_rect(std::string& out, double x, double y, double width, double height,
                 const char* style) {
    out += "    <rect";
    append_attribute(out, "x", format_double(x));
    append_attribute(out, "y", format_double(y));
    append_attribute(out, "width", format_double(width));
    append_attribute(out, "height", format_double(height));
    out += ' ';
    out += style;
    out += "/>\n";
}

void append_text(std::string& out, double x, double y, const char* anchor,
                 const std::string& body) {
    out += "  <text";
    append_attribute(out, "x", format_double(x));
    append_attribute(out, "y", format_double(y));
    append_attribute(out, "text-anchor", anchor);
    out += " font-family=\"sans-serif\" font-size=\"14\" fill=\"#333333\">";
    out += body;
    out += "</text>\n";
}

} // namespace

std::string render_reliability_svg(const metrics::ReliabilityDiagram& diagram) {
    const std::size_t bin_count = diagram.bins.size();
    const double bar_width = 0.8 / static_cast<double>(bin_count);

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" "
           "viewBox=\"0 0 640 640\">\n";
    out += "  <rect x=\"0\" y=\"0\" width=\"640\" height=\"640\" fill=\"#ffffff\"/>\n";

    // Gridlines and tick labels every 0.2 in both axes.
    for (int tick = 0; tick <= 5; ++tick) {
        const double value = static_cast<double>(tick) / 5.0;
        const std::string px = format_double(pixel_x(value));
        const std::string py = format_double(pixel_y(value));
        out += "  <line x1=\"" + px + "\" y1=\"" + format_double(pixel_y(0.0)) + "\" x2=\"" + px +
               "\" y2=\"" + format_double(pixel_y(1.0)) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out += "  <line x1=\"" + format_double(pixel_x(0.0)) + "\" y1=\"" + py + "\" x2=\"" +
               format_double(pixel_x(1.0)) + "\" y2=\"" + py +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        append_text(out, pixel_x(value), pixel_y(0.0) + 20.0, "middle", format_double(value));
        append_text(out, pixel_x(0.0) - 10.0, pixel_y(value) + 5.0, "end", format_double(value));
    }

    // Data-space group: translate/scale so x and y run from 0 to 1 with y up.
    // Inside it, every coordinate is in data units, which makes the geometry
    // directly checkable: a bar's top edge y equals its frequency, its center
    // x equals its mean confidence.
    out += "  <g transform=\"translate(" + format_double(kMarginLeft) + "," +
           format_double(kMarginTop + kPlotHeight) + ") scale(" + format_double(kPlotWidth) +
           ",-" + format_double(kPlotHeight) + ")\">\n";

    for (const metrics::ReliabilityBin& bin : diagram.bins) {
        if (bin.sample_count == 0) {
            continue;
        }
        const double confidence = *bin.mean_confidence;
        const double frequency = *bin.empirical_frequency;
        const double gap_low = std::min(confidence, frequency);
        const double gap_high = std::max(confidence, frequency);
        if (gap_high > gap_low) {
            append_rect(out, confidence - bar_width / 2.0, gap_low, bar_width, gap_high - gap_low,
                        "fill=\"#d62728\" fill-opacity=\"0.25\"");
        }
        append_rect(out, confidence - bar_width / 2.0, 0.0, bar_width, frequency,
                    "fill=\"#1f77b4\" fill-opacity=\"0.85\"");
    }

    out += "    <line x1=\"0\" y1=\"0\" x2=\"1\" y2=\"1\" stroke=\"#555555\" "
           "stroke-width=\"0.004\" stroke-dasharray=\"0.03,0.02\"/>\n";
    out += "  </g>\n";

    // Plot frame above the data so bar edges do not overpaint it.
    out += "  <rect x=\"" + format_double(kMarginLeft) + "\" y=\"" + format_double(kMarginTop) +
           "\" width=\"" + format_double(kPlotWidth) + "\" height=\"" +
           format_double(kPlotHeight) + "\" fill=\"none\" stroke=\"#333333\" "
           "stroke-width=\"1\"/>\n";

    append_text(out, kMarginLeft + kPlotWidth / 2.0, kCanvasHeight - 15.0, "middle", "confidence");
    const std::string y_label = diagram.mode.is_top_label()
                                    ? std::string("accuracy")
                                    : "fraction of class " +
                                          std::to_string(diagram.mode.chosen_class_index());
    out += "  <text x=\"20\" y=\"" + format_double(kMarginTop + kPlotHeight / 2.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
           "fill=\"#333333\" transform=\"rotate(-90 20 " +
           format_double(kMarginTop + kPlotHeight / 2.0) + ")\">" + y_label + "</text>\n";

    append_text(out, kMarginLeft + 12.0, kMarginTop + 24.0, "start",
                "ECE = " + format_double(metrics::ece(diagram)));
    append_text(out, kMarginLeft + 12.0, kMarginTop + 44.0, "start",
                "N = " + std::to_string(diagram.total_samples) + ", B = " +
                    std::to_string(bin_count));

    out += "</svg>\n";
    return out;
}

void write_reliability_svg(const metrics::ReliabilityDiagram& diagram,
                           const std::filesystem::path& path) {
    write_text_file(path, render_reliability_svg(diagram));
}

} // namespace calib::io
