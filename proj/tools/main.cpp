// embeval: command line front end for the embedding-space evaluation library.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "embeval/curation.hpp"
#include "embeval/error.hpp"
#include "embeval/io.hpp"
#include "embeval/pipeline.hpp"
#include "embeval/types.hpp"

namespace fs = std::filesystem;
using namespace embeval;

namespace {

struct GlobalOptions {
    std::optional<std::uint64_t> seed;
    std::string config;
    std::optional<unsigned> threads;
    std::optional<std::size_t> knn_k;
    std::string out = ".";
};

constexpr int kExitError = 1;
constexpr int kExitInconsistent = 3;

int run_curate(const GlobalOptions& g, const std::string& input, std::size_t min_annotations, bool drop_overlaps) {
    CurationOptions options;
    options.min_annotations = min_annotations;
    options.drop_overlaps = drop_overlaps;
    const auto raw = load_annotations(input);
    const auto curated = curate(raw, options);
    std::vector<std::string> names;
    std::vector<std::string> ids;
    for (const auto& e : curated.rows) {
        names.push_back(e.label);
        ids.push_back(e.event_id);
    }
    const auto labels = LabelVector::from_names(names);
    const auto split = stratified_split(labels, kDefaultSplitRatios, g.seed.value_or(0));

    const fs::path out(g.out);
    fs::create_directories(out);
    save_annotations(curated, out / "curated.csv");
    save_split(ids, split, out / "split.csv");
    std::cout << "curated " << curated.size() << " of " << raw.size() << " events, " << labels.num_classes()
              << " classes; train " << split.indices(Part::Train).size() << ", val "
              << split.indices(Part::Val).size() << ", test " << split.indices(Part::Test).size() << "\n";
    return 0;
}

int run_embed_check(const std::vector<std::string>& files) {
    int status = 0;
    for (const auto& file : files) {
        try {
            const auto set = load_embeddings(file);
            std::cout << file << ": ok model=" << set.model_name << " count=" << set.count() << " dim=" << set.dim()
                      << "\n";
        } catch (const Error& e) {
            std::cout << file << ": " << to_string(e.code()) << ": " << e.what() << "\n";
            status = kExitError;
        }
    }
    return status;
}

int run_reduce(const GlobalOptions& g, const std::string& input, std::size_t dims, const LayoutParams& base) {
    LayoutParams params = base;
    params.n_components = dims;
    params.seed = g.seed.value_or(0);
    const auto path = reduce_file(input, g.out, params, g.threads.value_or(1));
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

int run_eval(const GlobalOptions& g, bool no_plots) {
    if (g.config.empty()) throw Error(ErrorCode::InvalidArgument, "eval needs --config");
    auto config = load_eval_config(g.config);
    if (g.seed) config.seed = *g.seed;
    if (g.knn_k) config.knn_k = *g.knn_k;
    if (g.threads) config.threads = *g.threads;
    if (no_plots) config.plots = false;
    const auto report = run_evaluation(config);
    write_evaluation(report, g.out);
    std::cout << render_category_table(report.categories);
    std::cout << "wrote " << (fs::path(g.out) / "report.json").string() << "\n";
    return 0;
}

int run_report(const GlobalOptions& g, const std::string& input, bool self_test) {
    const fs::path path(input);
    const auto summary = parse_report(read_text_file(path));
    if (self_test) {
        const auto problem = check_report_consistency(summary);
        if (!problem.empty()) {
            std::cerr << "self-test failed: " << problem << "\n";
            return kExitInconsistent;
        }
        std::cout << "self-test passed: category means match " << summary.metrics.size() << " per-model rows\n";
    }
    render_report(summary, path.parent_path(), g.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evaluate and compare bioacoustic embedding spaces"};
    app.require_subcommand(1);
    GlobalOptions g;
    app.add_option("--seed", g.seed, "Global random seed");
    app.add_option("--config", g.config, "Evaluation config (JSON)");
    app.add_option("--threads", g.threads, "Worker threads; 1 keeps runs reproducible")->check(CLI::PositiveNumber);
    app.add_option("--knn-k", g.knn_k, "Neighbours for kNN classification (default 15)")
        ->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "Output directory")->capture_default_str();

    std::string curate_input;
    std::size_t min_annotations = 150;
    bool drop_overlaps = false;
    auto* curate_cmd = app.add_subcommand("curate", "Filter annotations and write a stratified split");
    curate_cmd->fallthrough();
    curate_cmd->add_option("annotations", curate_input, "Annotation CSV")->required()->check(CLI::ExistingFile);
    curate_cmd->add_option("--min-annotations", min_annotations, "Keep classes with more annotations than this")
        ->capture_default_str();
    curate_cmd->add_flag("--drop-overlaps", drop_overlaps, "Drop temporally overlapping events");

    std::vector<std::string> check_files;
    auto* check_cmd = app.add_subcommand("embed-check", "Validate embedding files");
    check_cmd->fallthrough();
    check_cmd->add_option("files", check_files, "BEMB or CSV embedding files")->required();

    std::string reduce_input;
    std::size_t dims = 300;
    LayoutParams layout;
    std::size_t n_epochs = 0;
    auto* reduce_cmd = app.add_subcommand("reduce", "Reduce an embedding file with UMAP");
    reduce_cmd->fallthrough();
    reduce_cmd->add_option("input", reduce_input, "Embedding file")->required()->check(CLI::ExistingFile);
    reduce_cmd->add_option("--dims", dims, "Target dimensionality")->capture_default_str()->check(CLI::IsMember({300, 2}));
    reduce_cmd->add_option("--n-neighbors", layout.n_neighbors, "UMAP neighbourhood size")->capture_default_str();
    reduce_cmd->add_option("--min-dist", layout.min_dist, "UMAP min_dist")->capture_default_str();
    reduce_cmd->add_option("--n-epochs", n_epochs, "Optimisation epochs (0 picks by size)");

    bool no_plots = false;
    auto* eval_cmd = app.add_subcommand("eval", "Run the full evaluation protocol");
    eval_cmd->fallthrough();
    eval_cmd->add_flag("--no-plots", no_plots, "Skip the 2-d layouts and figures");

    std::string report_input;
    bool self_test = false;
    auto* report_cmd = app.add_subcommand("report", "Render tables and figures from report.json");
    report_cmd->fallthrough();
    report_cmd->add_option("report", report_input, "report.json")->required()->check(CLI::ExistingFile);
    report_cmd->add_flag("--self-test", self_test, "Check category means against the per-model rows");

    CLI11_PARSE(app, argc, argv);

    try {
        if (n_epochs > 0) layout.n_epochs = n_epochs;
        if (*curate_cmd) return run_curate(g, curate_input, min_annotations, drop_overlaps);
        if (*check_cmd) return run_embed_check(check_files);
        if (*reduce_cmd) return run_reduce(g, reduce_input, dims, layout);
        if (*eval_cmd) return run_eval(g, no_plots);
        if (*report_cmd) return run_report(g, report_input, self_test);
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return 0;
}
