#ifndef EMBEVAL_PIPELINE_HPP
#define EMBEVAL_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "embeval/contingency.hpp"
#include "embeval/curation.hpp"
#include "embeval/kmeans.hpp"
#include "embeval/knn.hpp"
#include "embeval/report.hpp"
#include "embeval/types.hpp"
#include "embeval/umap.hpp"

namespace embeval {

namespace fs = std::filesystem;

struct EvalConfig {
    std::vector<fs::path> embeddings;
    fs::path annotations;
    fs::path registry;
    std::uint64_t seed = 0;
    std::size_t knn_k = 15;
    Metric knn_metric = Metric::Euclidean;
    /// n_components is the evaluation space size (300).
    LayoutParams umap = [] {
        LayoutParams p;
        p.n_components = 300;
        return p;
    }();
    std::size_t kmeans_n_init = 10;
    std::size_t kmeans_max_iter = 300;
    double kmeans_tol = 1e-4;
    CurationOptions curation;
    SplitRatios split_ratios = kDefaultSplitRatios;
    AmiNormalizer ami_normalizer = AmiNormalizer::Arithmetic;
    /// Also compute 2-d layouts and SVG figures.
    bool plots = true;
    /// 1 keeps every stage sequential; results are identical for any value.
    unsigned threads = 1;
};

/// Relative paths are resolved against `base_dir`. Unknown keys are rejected.
EvalConfig parse_eval_config(std::string_view json_text, const fs::path& base_dir);
EvalConfig load_eval_config(const fs::path& path);

struct SpaceResult {
    ModelMetrics metrics;
    std::vector<std::uint32_t> clusters;     // per curated event
    std::vector<std::size_t> test_rows;      // curated row per prediction
    std::vector<std::uint32_t> predictions;  // per test row
};

struct ModelEvaluation {
    RegistryEntry entry;
    fs::path source;
    std::size_t dim = 0;
    SpaceResult original;
    SpaceResult umap300;
    std::optional<MatrixF> umap2;
    std::string umap2_init;
    std::string umap2_note;
    std::string warning;
};

struct EvaluationReport {
    EvalConfig config;
    std::vector<std::string> event_ids;  // curated order
    LabelVector labels;
    SplitAssignment split;
    std::vector<ModelEvaluation> models;
    ModelRegistry registry;  // entries of the evaluated models, in model order
    CategoryTable categories;

    std::vector<ModelMetrics> all_metrics() const;
};

/// Seed of the per-model pipeline; depends on the global seed and the name only.
std::uint64_t model_seed(std::uint64_t seed, std::string_view model_name) noexcept;

/// Curate annotations, align every embedding file by event id, and score the
/// original and UMAP-300 spaces with K-Means/AMI and kNN/balanced accuracy.
/// Throws MissingEvents, RegistryMiss, and any stage error.
EvaluationReport run_evaluation(const EvalConfig& config);

/// report.json content; a pure function of the report.
std::string report_json(const EvaluationReport& report);

/// Writes report.json, per_model.csv, category_table.csv/.txt, per-model
/// cluster and prediction CSVs and, with plots, umap2_<model>.bemb,
/// scatter_<model>.svg and gallery.svg.
void write_evaluation(const EvaluationReport& report, const fs::path& out_dir);

/// The parts of report.json needed to re-render tables and figures.
struct ReportSummary {
    std::vector<ModelMetrics> metrics;
    ModelRegistry registry;
    CategoryTable categories;
    LabelVector labels;
    /// (model, umap2 file relative to the report) for models with a 2-d layout.
    std::vector<std::pair<std::string, std::string>> layouts;
};

ReportSummary parse_report(std::string_view json_text);

/// Recomputes the category means from the per-model section and compares them
/// with the stored table to 1e-12. Returns an empty string when consistent.
std::string check_report_consistency(const ReportSummary& summary);

/// Writes the tables and figures for a parsed report; layouts are read from
/// `report_dir`.
void render_report(const ReportSummary& summary, const fs::path& report_dir, const fs::path& out_dir);

/// File-system-safe form of a model name.
std::string file_stem_for(std::string_view model_name);

/// Reduces one embedding file to `dims` dimensions and writes
/// `<stem>+umap<dims>.bemb` under out_dir. Returns the written path.
fs::path reduce_file(const fs::path& input, const fs::path& out_dir, const LayoutParams& params, unsigned threads);

}  // namespace embeval

#endif  // EMBEVAL_PIPELINE_HPP
