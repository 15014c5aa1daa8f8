#include "embeval/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "embeval/error.hpp"

namespace embeval {

namespace {

constexpr std::array<std::string_view, 20> kPalette{
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5", "#c49c94", "#f7b6d2", "#c7c7c7", "#dbdb8d", "#9edae5"};

constexpr double kPanelSize = 480.0;
constexpr double kGalleryPanel = 300.0;
constexpr double kPad = 40.0;
constexpr double kLegendRow = 18.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape_xml(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

void check_input(const MatrixF& coords, const LabelVector& labels) {
    if (!coords.empty() && coords.cols() != 2) {
        throw Error(ErrorCode::DimMismatch, "scatter plots need N x 2 coordinates");
    }
    if (labels.size() != coords.rows()) throw Error(ErrorCode::LengthMismatch, "one label per point is required");
    for (std::size_t i = 0; i < coords.rows(); ++i) {
        for (float v : coords.row(i)) {
            if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, "non-finite coordinate at row " + std::to_string(i), i);
        }
    }
    for (auto l : labels.labels) {
        if (l >= labels.num_classes()) throw Error(ErrorCode::UnknownClass, "label without class name");
    }
}

struct Bounds {
    double x_lo = -1.0, x_hi = 1.0, y_lo = -1.0, y_hi = 1.0;
};

Bounds autoscale(const MatrixF& coords) {
    Bounds b;
    if (coords.empty()) return b;
    b.x_lo = b.x_hi = coords(0, 0);
    b.y_lo = b.y_hi = coords(0, 1);
    for (std::size_t i = 1; i < coords.rows(); ++i) {
        b.x_lo = std::min<double>(b.x_lo, coords(i, 0));
        b.x_hi = std::max<double>(b.x_hi, coords(i, 0));
        b.y_lo = std::min<double>(b.y_lo, coords(i, 1));
        b.y_hi = std::max<double>(b.y_hi, coords(i, 1));
    }
    const double dx = b.x_hi - b.x_lo > 0.0 ? b.x_hi - b.x_lo : 1.0;
    const double dy = b.y_hi - b.y_lo > 0.0 ? b.y_hi - b.y_lo : 1.0;
    b.x_lo -= 0.05 * dx;
    b.x_hi += 0.05 * dx;
    b.y_lo -= 0.05 * dy;
    b.y_hi += 0.05 * dy;
    if (b.x_hi == b.x_lo) b.x_hi = b.x_lo + 1.0;
    if (b.y_hi == b.y_lo) b.y_hi = b.y_lo + 1.0;
    return b;
}

void draw_points(std::string& out, const MatrixF& coords, const LabelVector& labels, double x0, double y0,
                 double size, double radius) {
    const auto b = autoscale(coords);
    out += "<rect x=\"" + num(x0) + "\" y=\"" + num(y0) + "\" width=\"" + num(size) + "\" height=\"" + num(size) +
           "\" fill=\"none\" stroke=\"#444444\"/>\n";
    for (std::size_t i = 0; i < coords.rows(); ++i) {
        const double px = x0 + (coords(i, 0) - b.x_lo) / (b.x_hi - b.x_lo) * size;
        const double py = y0 + (b.y_hi - coords(i, 1)) / (b.y_hi - b.y_lo) * size;
        out += "<circle cx=\"" + num(px) + "\" cy=\"" + num(py) + "\" r=\"" + num(radius) + "\" fill=\"" +
               std::string(class_color(labels.labels[i])) + "\"/>\n";
    }
}

void draw_legend(std::string& out, const LabelVector& labels, double x0, double y0) {
    out += "<g class=\"legend\">\n";
    for (std::size_t c = 0; c < labels.num_classes(); ++c) {
        const double y = y0 + static_cast<double>(c) * kLegendRow;
        out += "<g class=\"legend-entry\"><rect x=\"" + num(x0) + "\" y=\"" + num(y - 10.0) +
               "\" width=\"10\" height=\"10\" fill=\"" + std::string(class_color(c)) + "\"/><text x=\"" +
               num(x0 + 16.0) + "\" y=\"" + num(y) + "\" font-size=\"12\">" + escape_xml(labels.class_names[c]) +
               "</text></g>\n";
    }
    out += "</g>\n";
}

std::string header(double width, double height) {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           num(width) + "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) +
           "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
}

}  // namespace

std::string_view class_color(std::size_t index) noexcept { return kPalette[index % kPalette.size()]; }

std::string render_scatter_svg(const MatrixF& coords, const LabelVector& labels, std::string_view title) {
    check_input(coords, labels);
    const double legend_w = 200.0;
    const double width = kPad + kPanelSize + kPad + legend_w;
    const double height =
        std::max(kPad + kPanelSize + kPad, kPad + kLegendRow * static_cast<double>(labels.num_classes()) + kPad);
    std::string out = header(width, height);
    out += "<text x=\"" + num(kPad) + "\" y=\"" + num(kPad * 0.6) + "\" font-size=\"16\">" + escape_xml(title) +
           "</text>\n";
    draw_points(out, coords, labels, kPad, kPad, kPanelSize, 2.5);
    draw_legend(out, labels, kPad + kPanelSize + kPad, kPad + 10.0);
    out += "</svg>\n";
    return out;
}

std::vector<std::size_t> gallery_order(std::span<const GalleryPanel> panels) {
    std::vector<std::size_t> order(panels.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (panels[a].ami != panels[b].ami) return panels[a].ami > panels[b].ami;
        return panels[a].model < panels[b].model;
    });
    return order;
}

std::string panel_title(const GalleryPanel& panel) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", panel.ami);
    return panel.model + " " + buf;
}

std::string render_gallery(std::span<const GalleryPanel> panels, const LabelVector& labels) {
    for (const auto& p : panels) check_input(p.coords, labels);
    const std::size_t count = panels.size();
    const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(std::max<std::size_t>(count, 1)))));
    const std::size_t rows = (count + cols - 1) / std::max<std::size_t>(cols, 1);
    const double cell = kGalleryPanel + kPad;
    const double legend_w = 200.0;
    const double width = kPad + static_cast<double>(cols) * cell + legend_w;
    const double height = std::max(kPad + static_cast<double>(rows) * cell,
                                   kPad + kLegendRow * static_cast<double>(labels.num_classes()) + kPad);

    std::string out = header(width, height);
    const auto order = gallery_order(panels);
    for (std::size_t slot = 0; slot < order.size(); ++slot) {
        const auto& p = panels[order[slot]];
        const double x0 = kPad + static_cast<double>(slot % cols) * cell;
        const double y0 = kPad + static_cast<double>(slot / cols) * cell;
        out += "<g class=\"panel\">\n<text x=\"" + num(x0) + "\" y=\"" + num(y0 - 8.0) + "\" font-size=\"14\">" +
               escape_xml(panel_title(p)) + "</text>\n";
        draw_points(out, p.coords, labels, x0, y0, kGalleryPanel, 1.5);
        out += "</g>\n";
    }
    draw_legend(out, labels, kPad + static_cast<double>(cols) * cell, kPad + 10.0);
    out += "</svg>\n";
    return out;
}

}  // namespace embeval
