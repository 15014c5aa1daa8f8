#ifndef EMBEVAL_REPORT_HPP
#define EMBEVAL_REPORT_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "embeval/contingency.hpp"
#include "embeval/curation.hpp"
#include "embeval/knn.hpp"
#include "embeval/types.hpp"

namespace embeval {

enum class Space { Original, Umap300 };

std::string_view to_string(Space s) noexcept;
std::optional<Space> parse_space(std::string_view text) noexcept;

/// Every setting a score depends on, including the ones chosen here rather
/// than fixed by the protocol.
struct ParamsEcho {
    std::uint64_t seed = 0;
    std::uint64_t model_seed = 0;
    // clustering
    std::size_t kmeans_k = 0;
    std::size_t kmeans_n_init = 10;
    std::size_t kmeans_max_iter = 300;
    double kmeans_tol = 1e-4;
    std::string kmeans_init = "k-means++";
    std::string kmeans_distance = "sqeuclidean";
    AmiNormalizer ami_normalizer = AmiNormalizer::Arithmetic;
    // classification
    std::size_t knn_k = 15;
    Metric knn_metric = Metric::Euclidean;
    std::string knn_vote = "majority, ties: smaller summed distance then lower class";
    SplitRatios split_ratios = kDefaultSplitRatios;
    // reduction
    std::size_t umap_n_components = 300;
    std::size_t umap_n_neighbors = 15;
    double umap_min_dist = 0.1;
    double umap_spread = 1.0;
    double umap_a = 0.0;
    double umap_b = 0.0;
    std::size_t umap_n_epochs = 0;
    double umap_learning_rate = 1.0;
    double umap_negative_sample_rate = 5.0;
    double umap_repulsion_strength = 1.0;
    std::string umap_init;
    std::string umap_init_note;
    bool umap_sequential = true;
};

struct ModelMetrics {
    std::string model;
    Space space = Space::Original;
    double ami = 0.0;
    double balanced_macro_accuracy = 0.0;
    double inertia = 0.0;
    std::size_t kmeans_iterations = 0;
    std::string kmeans_warning;
    std::size_t dim = 0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    ParamsEcho params;
};

/// Mean score of one category; NaN where no member has that score.
struct CategoryRow {
    std::string category;
    std::vector<std::string> members;
    double classification_original = 0.0;
    double classification_umap = 0.0;
    double clustering_original = 0.0;
    double clustering_umap = 0.0;
};

struct CategoryTable {
    std::vector<CategoryRow> rows;

    const CategoryRow* find(std::string_view category) const noexcept;
};

/// Category names in table order.
inline constexpr std::string_view kCategories[] = {"supl", "ssl", "bird", "non-bird"};

/// Means per (category, space, task). A model joins its training-paradigm
/// category (ssl+ft counts as ssl) and its bird / non-bird category.
/// Categories without members are omitted. Throws RegistryMiss.
CategoryTable aggregate_by_category(std::span<const ModelMetrics> metrics, const ModelRegistry& registry);

/// "bird | 0.712 | 0.723 | 0.426 | 0.479"; 3 decimals, "-" for missing.
std::string format_category_row(const CategoryRow& row);

/// Human-readable table; the per-task maxima (over categories and both
/// spaces, compared at the displayed precision) are wrapped in **...**.
std::string render_category_table(const CategoryTable& table);

/// category,members,classification_original,classification_umap,
/// clustering_original,clustering_umap with full-precision values.
std::string category_table_csv(const CategoryTable& table);

/// model,abbrev,training,bird_trained,space,ami,balanced_macro_accuracy
std::string per_model_csv(std::span<const ModelMetrics> metrics, const ModelRegistry& registry);

}  // namespace embeval

#endif  // EMBEVAL_REPORT_HPP
