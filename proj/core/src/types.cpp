#include "embeval/types.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "embeval/error.hpp"

namespace embeval {

void validate(const EmbeddingSet& set) {
    if (set.count() > 0 && set.dim() == 0) {
        throw Error(ErrorCode::InvariantViolation, "dim must be positive when count > 0");
    }
    if (set.event_ids.size() != set.count()) {
        throw Error(ErrorCode::IdCountMismatch,
                    "expected " + std::to_string(set.count()) + " event ids, got " +
                        std::to_string(set.event_ids.size()),
                    set.event_ids.size());
    }
    for (std::size_t r = 0; r < set.count(); ++r) {
        for (float v : set.data.row(r)) {
            if (!std::isfinite(v)) {
                throw Error(ErrorCode::NonFiniteValue, "non-finite value in row " + std::to_string(r), r);
            }
        }
    }
    std::unordered_set<std::string_view> seen;
    for (std::size_t r = 0; r < set.event_ids.size(); ++r) {
        if (!seen.insert(set.event_ids[r]).second) {
            throw Error(ErrorCode::InvariantViolation, "duplicate event id '" + set.event_ids[r] + "'", r);
        }
    }
}

void validate(const AnnotationTable& table) {
    std::unordered_set<std::string_view> seen;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& e = table.rows[i];
        if (!(e.start_s >= 0.0) || !std::isfinite(e.end_s)) {
            throw Error(ErrorCode::InvariantViolation, "bad time bounds for event '" + e.event_id + "'", i);
        }
        if (!(e.end_s > e.start_s)) {
            throw Error(ErrorCode::InvariantViolation, "end_s <= start_s for event '" + e.event_id + "'", i);
        }
        if (!seen.insert(e.event_id).second) {
            throw Error(ErrorCode::InvariantViolation, "duplicate event id '" + e.event_id + "'", i);
        }
    }
}

std::string_view to_string(Training t) noexcept {
    switch (t) {
        case Training::Ssl: return "ssl";
        case Training::Supl: return "supl";
        case Training::SslFt: return "ssl+ft";
    }
    return "?";
}

std::optional<Training> parse_training(std::string_view text) noexcept {
    if (text == "ssl") return Training::Ssl;
    if (text == "supl") return Training::Supl;
    if (text == "ssl+ft" || text == "ssl + ft") return Training::SslFt;
    return std::nullopt;
}

const RegistryEntry* ModelRegistry::find(std::string_view name) const noexcept {
    for (const auto& e : entries) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

void validate(ModelRegistry& registry) {
    std::unordered_set<std::string> names;
    std::unordered_set<std::string> abbrevs;
    for (std::size_t i = 0; i < registry.entries.size(); ++i) {
        auto& e = registry.entries[i];
        if (e.name.empty()) throw Error(ErrorCode::InvariantViolation, "empty model name", i);
        if (e.dimension == 0) throw Error(ErrorCode::InvariantViolation, "dimension must be positive for " + e.name, i);
        if (!names.insert(e.name).second) {
            throw Error(ErrorCode::InvariantViolation, "duplicate model name '" + e.name + "'", i);
        }
        if (!e.abbrev.empty() && !abbrevs.insert(e.abbrev).second) {
            throw Error(ErrorCode::InvariantViolation, "duplicate abbrev '" + e.abbrev + "'", i);
        }
        e.is_bird_trained = std::find(e.domains.begin(), e.domains.end(), kBirdDomain) != e.domains.end();
    }
}

LabelVector LabelVector::from_names(std::span<const std::string> names) {
    std::map<std::string, std::uint32_t> index;
    for (const auto& n : names) index.emplace(n, 0);
    LabelVector out;
    out.class_names.reserve(index.size());
    for (auto& [name, idx] : index) {
        idx = static_cast<std::uint32_t>(out.class_names.size());
        out.class_names.push_back(name);
    }
    out.labels.reserve(names.size());
    for (const auto& n : names) out.labels.push_back(index.at(n));
    return out;
}

LabelVector LabelVector::from_indices(std::vector<std::uint32_t> labels) {
    LabelVector out;
    std::uint32_t c = 0;
    for (auto l : labels) c = std::max(c, l + 1);
    out.class_names.reserve(c);
    for (std::uint32_t i = 0; i < c; ++i) out.class_names.push_back(std::to_string(i));
    out.labels = std::move(labels);
    return out;
}

std::vector<std::size_t> class_counts(const LabelVector& labels) {
    std::vector<std::size_t> counts(labels.num_classes(), 0);
    for (auto l : labels.labels) {
        if (l >= counts.size()) counts.resize(l + 1, 0);
        ++counts[l];
    }
    return counts;
}

}  // namespace embeval
