#include "embeval/curation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "embeval/error.hpp"
#include "embeval/io.hpp"
#include "embeval/rng.hpp"

namespace embeval {

AnnotationTable filter_min_annotations(const AnnotationTable& table, std::size_t threshold) {
    std::unordered_map<std::string_view, std::size_t> count;
    for (const auto& e : table.rows) ++count[e.label];

    AnnotationTable out;
    for (const auto& e : table.rows) {
        if (count[e.label] > threshold) out.rows.push_back(e);
    }
    if (out.rows.empty()) {
        throw Error(ErrorCode::EmptyResult,
                    "no class has more than " + std::to_string(threshold) + " annotations", threshold);
    }
    return out;
}

AnnotationTable remove_overlaps(const AnnotationTable& table) {
    std::unordered_map<std::string_view, std::vector<std::size_t>> by_file;
    for (std::size_t i = 0; i < table.rows.size(); ++i) by_file[table.rows[i].file].push_back(i);

    std::vector<bool> overlapped(table.rows.size(), false);
    for (auto& [file, idx] : by_file) {
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            const auto& ea = table.rows[a];
            const auto& eb = table.rows[b];
            if (ea.start_s != eb.start_s) return ea.start_s < eb.start_s;
            return a < b;
        });
        // Forward: overlap with an event starting no later.
        double max_end = -INFINITY;
        for (auto i : idx) {
            if (max_end > table.rows[i].start_s) overlapped[i] = true;
            max_end = std::max(max_end, table.rows[i].end_s);
        }
        // Backward: overlap with an event starting no earlier.
        double min_start = INFINITY;
        for (auto it = idx.rbegin(); it != idx.rend(); ++it) {
            if (min_start < table.rows[*it].end_s) overlapped[*it] = true;
            min_start = std::min(min_start, table.rows[*it].start_s);
        }
    }

    AnnotationTable out;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (!overlapped[i]) out.rows.push_back(table.rows[i]);
    }
    return out;
}

std::string_view to_string(Part p) noexcept {
    switch (p) {
        case Part::Train: return "train";
        case Part::Val: return "val";
        case Part::Test: return "test";
    }
    return "?";
}

std::vector<std::size_t> SplitAssignment::indices(Part part) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] == part) out.push_back(i);
    }
    return out;
}

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& ratios) {
    // The epsilon keeps exact products such as 0.15 * 20 from flooring to 2.
    constexpr double kSlack = 1e-9;
    const auto part = [&](double r) {
        return static_cast<std::size_t>(std::floor(r * static_cast<double>(n) + kSlack));
    };
    const std::size_t train = std::min(n, part(ratios[0]));
    const std::size_t val = std::min(n - train, part(ratios[1]));
    return {train, val, n - train - val};
}

SplitAssignment stratified_split(const LabelVector& labels, const SplitRatios& ratios, std::uint64_t seed) {
    for (double r : ratios) {
        if (!(r >= 0.0)) throw Error(ErrorCode::InvalidArgument, "split ratios must be non-negative");
    }
    if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-12) {
        throw Error(ErrorCode::InvalidArgument, "split ratios must sum to 1");
    }

    const std::size_t num_classes = std::max(labels.num_classes(), class_counts(labels).size());
    std::vector<std::vector<std::size_t>> members(num_classes);
    for (std::size_t i = 0; i < labels.labels.size(); ++i) members[labels.labels[i]].push_back(i);
    for (std::size_t c = 0; c < num_classes; ++c) {
        if (members[c].size() < 3) {
            const std::string name = c < labels.class_names.size() ? labels.class_names[c] : std::to_string(c);
            throw Error(ErrorCode::TooFewMembers,
                        "class '" + name + "' has " + std::to_string(members[c].size()) + " members (< 3)", c);
        }
    }

    SplitAssignment split;
    split.seed = seed;
    split.ratios = ratios;
    split.assignment.assign(labels.labels.size(), Part::Test);
    const Rng root(seed);
    for (std::size_t c = 0; c < num_classes; ++c) {
        auto& m = members[c];
        auto rng = root.stream(c);
        rng.shuffle(m.begin(), m.end());
        const auto sizes = split_sizes(m.size(), ratios);
        for (std::size_t i = 0; i < m.size(); ++i) {
            split.assignment[m[i]] = i < sizes[0] ? Part::Train : i < sizes[0] + sizes[1] ? Part::Val : Part::Test;
        }
    }
    return split;
}

void save_split(std::span<const std::string> event_ids, const SplitAssignment& split,
                const std::filesystem::path& path) {
    if (event_ids.size() != split.assignment.size()) {
        throw Error(ErrorCode::LengthMismatch, "event id count differs from split length");
    }
    std::string out = "event_id,part\n";
    for (std::size_t i = 0; i < event_ids.size(); ++i) {
        out += csv_escape(event_ids[i]);
        out += ',';
        out += to_string(split.assignment[i]);
        out += '\n';
    }
    write_text_file(path, out);
}

AnnotationTable curate(const AnnotationTable& table, const CurationOptions& options) {
    auto out = filter_min_annotations(table, options.min_annotations);
    if (options.drop_overlaps) out = remove_overlaps(out);
    if (out.rows.empty()) throw Error(ErrorCode::EmptyResult, "no events left after overlap removal");
    return out;
}

}  // namespace embeval
