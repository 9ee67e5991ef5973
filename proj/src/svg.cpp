#include <algorithm>
#include <string>

#include "capenc/analysis.hpp"
#include "capenc/text.hpp"

namespace capenc {

namespace {

constexpr double kWidth = 900.0;
constexpr double kHeight = 640.0;
constexpr double kMargin = 48.0;
constexpr double kLegendWidth = 200.0;
constexpr double kMarker = 5.0;

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape_xml(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double v) { return text::format_fixed(v, 2); }

std::string marker(EntityKind kind, double x, double y, const std::string& fill,
                   const std::string& css_class) {
    if (kind == EntityKind::Model) {
        return "<circle class=\"" + css_class + "\" cx=\"" + num(x) + "\" cy=\"" + num(y) +
               "\" r=\"" + num(kMarker) + "\" fill=\"" + fill + "\"/>";
    }
    return "<rect class=\"" + css_class + "\" x=\"" + num(x - kMarker) + "\" y=\"" +
           num(y - kMarker) + "\" width=\"" + num(2 * kMarker) + "\" height=\"" +
           num(2 * kMarker) + "\" fill=\"" + fill + "\"/>";
}

}  // namespace

std::string render_scatter(const std::vector<ScatterPoint>& points, std::string_view title) {
    std::vector<std::string> classes;
    for (const auto& p : points)
        if (std::find(classes.begin(), classes.end(), p.cls) == classes.end())
            classes.push_back(p.cls);
    auto color = [&](const std::string& cls) {
        const auto i = static_cast<std::size_t>(
            std::find(classes.begin(), classes.end(), cls) - classes.begin());
        return std::string(kPalette[i % std::size(kPalette)]);
    };

    double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
    if (!points.empty()) {
        min_x = max_x = points.front().x;
        min_y = max_y = points.front().y;
    }
    for (const auto& p : points) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    // One scale for both axes so map distances are not distorted.
    const double plot_w = kWidth - kLegendWidth - 2 * kMargin;
    const double plot_h = kHeight - 2 * kMargin;
    const double span = std::max({max_x - min_x, (max_y - min_y) * plot_w / plot_h, 1e-12});
    const double scale = plot_w / span;
    const double off_x = kMargin + (plot_w - (max_x - min_x) * scale) / 2.0;
    const double off_y = kMargin + (plot_h - (max_y - min_y) * scale) / 2.0;
    auto sx = [&](double x) { return off_x + (x - min_x) * scale; };
    auto sy = [&](double y) { return off_y + (max_y - y) * scale; };  // y grows upward

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
           num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
           "\" fill=\"#ffffff\"/>\n";
    svg += "<text x=\"" + num(kMargin) + "\" y=\"" + num(kMargin / 2 + 6) +
           "\" font-family=\"sans-serif\" font-size=\"16\">" + escape_xml(title) + "</text>\n";

    svg += "<g class=\"points\">\n";
    for (const auto& p : points) {
        const double x = sx(p.x), y = sy(p.y);
        svg += marker(p.kind, x, y, color(p.cls), "marker") + "\n";
        if (!p.label.empty()) {
            svg += "<text x=\"" + num(x + kMarker + 2) + "\" y=\"" + num(y + 3) +
                   "\" font-family=\"sans-serif\" font-size=\"9\">" + escape_xml(p.label) +
                   "</text>\n";
        }
    }
    svg += "</g>\n";

    const double lx = kWidth - kLegendWidth;
    double ly = kMargin;
    svg += "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg += marker(EntityKind::Model, lx + kMarker, ly, "#444444", "legend-shape") + "\n";
    svg += "<text x=\"" + num(lx + 16) + "\" y=\"" + num(ly + 4) + "\">model</text>\n";
    ly += 18;
    svg += marker(EntityKind::Task, lx + kMarker, ly, "#444444", "legend-shape") + "\n";
    svg += "<text x=\"" + num(lx + 16) + "\" y=\"" + num(ly + 4) + "\">task</text>\n";
    ly += 26;
    for (const auto& cls : classes) {
        svg += "<rect class=\"legend-swatch\" x=\"" + num(lx) + "\" y=\"" + num(ly - 5) +
               "\" width=\"10\" height=\"10\" fill=\"" + color(cls) + "\"/>\n";
        svg += "<text x=\"" + num(lx + 16) + "\" y=\"" + num(ly + 4) + "\">" +
               escape_xml(cls.empty() ? "(none)" : cls) + "</text>\n";
        ly += 16;
    }
    svg += "</g>\n</svg>\n";
    return svg;
}

}  // namespace capenc
