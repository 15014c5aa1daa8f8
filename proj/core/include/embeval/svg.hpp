#ifndef EMBEVAL_SVG_HPP
#define EMBEVAL_SVG_HPP

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "embeval/matrix.hpp"
#include "embeval/types.hpp"

namespace embeval {

/// Fill colour for class `index` (cycles through a fixed 20-colour palette).
std::string_view class_color(std::size_t index) noexcept;

/// Standalone SVG: one circle per row of `coords` (N x 2), coloured by class,
/// axes autoscaled with a 5% margin and a legend of all class names. Output
/// depends only on the inputs. Throws NonFiniteInput.
std::string render_scatter_svg(const MatrixF& coords, const LabelVector& labels, std::string_view title);

struct GalleryPanel {
    std::string model;
    double ami = 0.0;
    MatrixF coords;
};

/// Panel order: descending AMI, ties by model name ascending.
std::vector<std::size_t> gallery_order(std::span<const GalleryPanel> panels);

/// "<model> <ami to 2 decimals>"
std::string panel_title(const GalleryPanel& panel);

/// Grid of scatter panels in gallery_order with one shared legend.
std::string render_gallery(std::span<const GalleryPanel> panels, const LabelVector& labels);

}  // namespace embeval

#endif  // EMBEVAL_SVG_HPP
