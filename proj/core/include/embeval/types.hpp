#ifndef EMBEVAL_TYPES_HPP
#define EMBEVAL_TYPES_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "embeval/matrix.hpp"

namespace embeval {

/// N x D embedding matrix with one id per row.
struct EmbeddingSet {
    std::string model_name;
    MatrixF data;
    std::vector<std::string> event_ids;

    std::size_t count() const noexcept { return data.rows(); }
    std::size_t dim() const noexcept { return data.cols(); }

    friend bool operator==(const EmbeddingSet&, const EmbeddingSet&) = default;
};

/// Throws InvariantViolation / NonFiniteValue / IdCountMismatch.
void validate(const EmbeddingSet& set);

struct AnnotationEvent {
    std::string event_id;
    std::string file;
    double start_s = 0.0;
    double end_s = 0.0;
    std::string label;

    double duration() const noexcept { return end_s - start_s; }
    friend bool operator==(const AnnotationEvent&, const AnnotationEvent&) = default;
};

struct AnnotationTable {
    std::vector<AnnotationEvent> rows;

    std::size_t size() const noexcept { return rows.size(); }
    friend bool operator==(const AnnotationTable&, const AnnotationTable&) = default;
};

void validate(const AnnotationTable& table);

enum class Training { Ssl, Supl, SslFt };

std::string_view to_string(Training t) noexcept;
std::optional<Training> parse_training(std::string_view text) noexcept;

struct RegistryEntry {
    std::string name;
    std::string abbrev;
    Training training = Training::Supl;
    std::uint32_t dimension = 0;
    std::vector<std::string> domains;
    bool is_bird_trained = false;
};

struct ModelRegistry {
    std::vector<RegistryEntry> entries;

    const RegistryEntry* find(std::string_view name) const noexcept;
};

/// Tag whose presence marks a bird-trained extractor.
inline constexpr std::string_view kBirdDomain = "birds";

/// Fills is_bird_trained from domains, then checks uniqueness.
void validate(ModelRegistry& registry);

/// Class index per sample plus the index -> name mapping.
struct LabelVector {
    std::vector<std::uint32_t> labels;
    std::vector<std::string> class_names;

    std::size_t size() const noexcept { return labels.size(); }
    std::size_t num_classes() const noexcept { return class_names.size(); }

    /// Indices assigned in lexicographic order of the distinct names.
    static LabelVector from_names(std::span<const std::string> names);
    /// Anonymous classes "0".."C-1" where C = max label + 1.
    static LabelVector from_indices(std::vector<std::uint32_t> labels);

    friend bool operator==(const LabelVector&, const LabelVector&) = default;
};

/// Occurrence count per class index.
std::vector<std::size_t> class_counts(const LabelVector& labels);

}  // namespace embeval

#endif  // EMBEVAL_TYPES_HPP
