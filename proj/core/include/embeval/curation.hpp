#ifndef EMBEVAL_CURATION_HPP
#define EMBEVAL_CURATION_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "embeval/types.hpp"

namespace embeval {

/// Keeps the events whose label occurs strictly more than `threshold` times.
/// Order is preserved. Throws EmptyResult when no class survives.
AnnotationTable filter_min_annotations(const AnnotationTable& table, std::size_t threshold);

/// Drops every event that strictly overlaps another event of the same file.
/// Both sides of an overlap go; touching endpoints are not an overlap.
AnnotationTable remove_overlaps(const AnnotationTable& table);

enum class Part : std::uint8_t { Train, Val, Test };

std::string_view to_string(Part p) noexcept;

using SplitRatios = std::array<double, 3>;
inline constexpr SplitRatios kDefaultSplitRatios{0.65, 0.15, 0.20};

struct SplitAssignment {
    std::vector<Part> assignment;
    std::uint64_t seed = 0;
    SplitRatios ratios = kDefaultSplitRatios;

    std::vector<std::size_t> indices(Part part) const;
};

/// Per class: shuffle members with the class's own stream of `seed`, then
/// floor(r0*n) to train, floor(r1*n) to val and the remainder to test.
/// Throws TooFewMembers (index = class) for classes with fewer than 3 members.
SplitAssignment stratified_split(const LabelVector& labels, const SplitRatios& ratios, std::uint64_t seed);

/// Part sizes for a class of n members.
std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& ratios);

/// Writes `event_id,part`.
void save_split(std::span<const std::string> event_ids, const SplitAssignment& split,
                const std::filesystem::path& path);

struct CurationOptions {
    std::size_t min_annotations = 150;
    bool drop_overlaps = false;
};

/// Class filter first, then (optionally) overlap removal. Classes that fall
/// to <= min_annotations after overlap removal are kept.
AnnotationTable curate(const AnnotationTable& table, const CurationOptions& options);

}  // namespace embeval

#endif  // EMBEVAL_CURATION_HPP
