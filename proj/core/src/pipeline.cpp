#include "embeval/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "embeval/error.hpp"
#include "embeval/io.hpp"
#include "embeval/parallel.hpp"
#include "embeval/rng.hpp"
#include "embeval/svg.hpp"

namespace embeval {

namespace {

using nlohmann::json;

// Stream tags below a model seed.
constexpr std::uint64_t kKmeansStream = 100;
constexpr std::uint64_t kUmapEvalStream = 200;
constexpr std::uint64_t kUmapPlotStream = 201;

std::string_view to_string(AmiNormalizer n) { return n == AmiNormalizer::Arithmetic ? "arithmetic" : "max"; }

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
    return obj.at(key).get<T>();
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known, std::string_view where) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw Error(ErrorCode::InvalidArgument, "unknown key '" + key + "' in " + std::string(where));
        }
    }
}

json params_json(const ParamsEcho& p) {
    json j;
    j["seed"] = p.seed;
    j["model_seed"] = p.model_seed;
    j["kmeans"] = {{"k", p.kmeans_k},
                   {"n_init", p.kmeans_n_init},
                   {"max_iter", p.kmeans_max_iter},
                   {"tol", p.kmeans_tol},
                   {"init", p.kmeans_init},
                   {"distance", p.kmeans_distance}};
    j["ami_normalizer"] = to_string(p.ami_normalizer);
    j["knn"] = {{"k", p.knn_k},
                {"metric", to_string(p.knn_metric)},
                {"vote", p.knn_vote},
                {"split_ratios", p.split_ratios}};
    j["umap"] = {{"n_components", p.umap_n_components},
                 {"n_neighbors", p.umap_n_neighbors},
                 {"min_dist", p.umap_min_dist},
                 {"spread", p.umap_spread},
                 {"a", p.umap_a},
                 {"b", p.umap_b},
                 {"n_epochs", p.umap_n_epochs},
                 {"learning_rate", p.umap_learning_rate},
                 {"negative_sample_rate", p.umap_negative_sample_rate},
                 {"repulsion_strength", p.umap_repulsion_strength},
                 {"init", p.umap_init},
                 {"init_note", p.umap_init_note},
                 {"sequential", p.umap_sequential},
                 {"fit_on", "all curated events"},
                 {"knn_graph", "exact"}};
    return j;
}

json metrics_json(const ModelMetrics& m) {
    json j;
    j["model"] = m.model;
    j["space"] = to_string(m.space);
    j["dim"] = m.dim;
    j["ami"] = m.ami;
    j["balanced_macro_accuracy"] = m.balanced_macro_accuracy;
    j["clustering"] = {{"ami", m.ami},
                       {"inertia", m.inertia},
                       {"k", m.params.kmeans_k},
                       {"seed", derive_seed(m.params.model_seed, kKmeansStream + static_cast<std::uint64_t>(m.space))},
                       {"iterations", m.kmeans_iterations},
                       {"warning", m.kmeans_warning}};
    j["classification"] = {{"balanced_macro_accuracy", m.balanced_macro_accuracy},
                           {"k", m.params.knn_k},
                           {"metric", to_string(m.params.knn_metric)},
                           {"n_train", m.n_train},
                           {"n_test", m.n_test}};
    j["params"] = params_json(m.params);
    return j;
}

json config_json(const EvalConfig& c) {
    json j;
    std::vector<std::string> emb;
    for (const auto& p : c.embeddings) emb.push_back(p.generic_string());
    j["embeddings"] = emb;
    j["annotations"] = c.annotations.generic_string();
    j["registry"] = c.registry.generic_string();
    j["seed"] = c.seed;
    j["knn_k"] = c.knn_k;
    j["knn_metric"] = to_string(c.knn_metric);
    j["umap"] = {{"n_components", c.umap.n_components},
                 {"n_neighbors", c.umap.n_neighbors},
                 {"min_dist", c.umap.min_dist},
                 {"spread", c.umap.spread},
                 {"n_epochs", c.umap.n_epochs ? json(*c.umap.n_epochs) : json(nullptr)},
                 {"learning_rate", c.umap.learning_rate},
                 {"negative_sample_rate", c.umap.negative_sample_rate},
                 {"repulsion_strength", c.umap.repulsion_strength}};
    j["kmeans"] = {{"n_init", c.kmeans_n_init}, {"max_iter", c.kmeans_max_iter}, {"tol", c.kmeans_tol}};
    j["curation"] = {{"min_annotations", c.curation.min_annotations},
                     {"drop_overlaps", c.curation.drop_overlaps}};
    j["split"] = c.split_ratios;
    j["ami_normalizer"] = to_string(c.ami_normalizer);
    j["plots"] = c.plots;
    return j;
}

json category_json(const CategoryTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows) {
        rows.push_back({{"category", r.category},
                        {"members", r.members},
                        {"classification", {{"original", r.classification_original}, {"umap", r.classification_umap}}},
                        {"clustering", {{"original", r.clustering_original}, {"umap", r.clustering_umap}}}});
    }
    return rows;
}

double number_or_nan(const json& j) {
    return j.is_number() ? j.get<double>() : std::numeric_limits<double>::quiet_NaN();
}

SpaceResult evaluate_space(const MatrixF& x, const LabelVector& labels, const SplitAssignment& split,
                           const EvalConfig& config, Space space, const ParamsEcho& echo, unsigned threads) {
    SpaceResult out;
    auto& m = out.metrics;
    m.space = space;
    m.dim = x.cols();
    m.params = echo;

    KMeansParams km;
    km.k = labels.num_classes();
    km.seed = derive_seed(echo.model_seed, kKmeansStream + static_cast<std::uint64_t>(space));
    km.n_init = config.kmeans_n_init;
    km.max_iter = config.kmeans_max_iter;
    km.tol = config.kmeans_tol;
    km.threads = threads;
    auto clustering = kmeans_fit(x, km);
    m.ami = adjusted_mutual_info(std::span<const std::uint32_t>(labels.labels),
                                 std::span<const std::uint32_t>(clustering.assignments), config.ami_normalizer);
    m.inertia = clustering.inertia;
    m.kmeans_iterations = clustering.iterations;
    m.kmeans_warning = clustering.warning;
    m.params.kmeans_k = km.k;
    out.clusters = std::move(clustering.assignments);

    const auto train = split.indices(Part::Train);
    out.test_rows = split.indices(Part::Test);
    LabelVector train_y;
    train_y.class_names = labels.class_names;
    for (auto i : train) train_y.labels.push_back(labels.labels[i]);
    LabelVector test_y;
    test_y.class_names = labels.class_names;
    for (auto i : out.test_rows) test_y.labels.push_back(labels.labels[i]);

    KnnParams kp;
    kp.k = config.knn_k;
    kp.metric = config.knn_metric;
    kp.threads = threads;
    const auto predicted = knn_predict(take_rows(x, train), train_y, take_rows(x, out.test_rows), kp);
    m.balanced_macro_accuracy = balanced_macro_accuracy(confusion(test_y, predicted));
    m.n_train = train.size();
    m.n_test = out.test_rows.size();
    out.predictions = predicted.labels;
    return out;
}

ModelEvaluation evaluate_model(const fs::path& source, const EmbeddingSet& set, const RegistryEntry& entry,
                               const std::vector<std::size_t>& rows, const LabelVector& labels,
                               const SplitAssignment& split, const EvalConfig& config, unsigned threads) {
    ModelEvaluation ev;
    ev.entry = entry;
    ev.source = source;
    ev.dim = set.dim();
    if (set.dim() != entry.dimension) {
        ev.warning = "embedding dim " + std::to_string(set.dim()) + " differs from registry dimension " +
                     std::to_string(entry.dimension);
    }
    const MatrixF x = take_rows(set.data, rows);

    ParamsEcho echo;
    echo.seed = config.seed;
    echo.model_seed = model_seed(config.seed, entry.name);
    echo.kmeans_n_init = config.kmeans_n_init;
    echo.kmeans_max_iter = config.kmeans_max_iter;
    echo.kmeans_tol = config.kmeans_tol;
    echo.ami_normalizer = config.ami_normalizer;
    echo.knn_k = config.knn_k;
    echo.knn_metric = config.knn_metric;
    echo.split_ratios = config.split_ratios;
    echo.umap_n_components = config.umap.n_components;
    echo.umap_n_neighbors = config.umap.n_neighbors;
    echo.umap_min_dist = config.umap.min_dist;
    echo.umap_spread = config.umap.spread;
    echo.umap_learning_rate = config.umap.learning_rate;
    echo.umap_negative_sample_rate = config.umap.negative_sample_rate;
    echo.umap_repulsion_strength = config.umap.repulsion_strength;

    LayoutParams eval_params = config.umap;
    eval_params.seed = derive_seed(echo.model_seed, kUmapEvalStream);
    const auto reduced = umap(x, eval_params, threads);
    echo.umap_a = reduced.a;
    echo.umap_b = reduced.b;
    echo.umap_n_epochs = reduced.n_epochs;
    echo.umap_init = to_string(reduced.init);
    echo.umap_init_note = reduced.init_note;

    ev.original = evaluate_space(x, labels, split, config, Space::Original, echo, threads);
    ev.umap300 = evaluate_space(reduced.embedding, labels, split, config, Space::Umap300, echo, threads);
    ev.original.metrics.model = entry.name;
    ev.umap300.metrics.model = entry.name;

    if (config.plots) {
        LayoutParams plot_params = config.umap;
        plot_params.n_components = 2;
        plot_params.seed = derive_seed(echo.model_seed, kUmapPlotStream);
        auto plot = umap(x, plot_params, threads);
        ev.umap2 = std::move(plot.embedding);
        ev.umap2_init = to_string(plot.init);
        ev.umap2_note = plot.init_note;
    }
    return ev;
}

}  // namespace

std::uint64_t model_seed(std::uint64_t seed, std::string_view model_name) noexcept {
    return derive_seed(seed, hash_text(model_name));
}

EvalConfig parse_eval_config(std::string_view json_text, const fs::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, e.what(), e.byte);
    }
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "config must be a JSON object");
    reject_unknown(j,
                   {"embeddings", "annotations", "registry", "seed", "knn_k", "knn_metric", "umap", "kmeans",
                    "curation", "split", "ami_normalizer", "plots", "threads"},
                   "config");

    EvalConfig c;
    try {
        for (const auto& p : j.at("embeddings")) c.embeddings.push_back(resolve(base_dir, p.get<std::string>()));
        c.annotations = resolve(base_dir, j.at("annotations").get<std::string>());
        c.registry = resolve(base_dir, j.at("registry").get<std::string>());
        c.seed = get_or<std::uint64_t>(j, "seed", 0);
        c.knn_k = get_or<std::size_t>(j, "knn_k", 15);
        const auto metric = get_or<std::string>(j, "knn_metric", "euclidean");
        if (metric == "euclidean") {
            c.knn_metric = Metric::Euclidean;
        } else if (metric == "cosine") {
            c.knn_metric = Metric::Cosine;
        } else {
            throw Error(ErrorCode::InvalidArgument, "unknown knn_metric '" + metric + "'");
        }
        if (j.contains("umap")) {
            const auto& u = j.at("umap");
            reject_unknown(u,
                           {"n_components", "n_neighbors", "min_dist", "spread", "n_epochs", "learning_rate",
                            "negative_sample_rate", "repulsion_strength"},
                           "umap");
            c.umap.n_components = get_or<std::size_t>(u, "n_components", 300);
            c.umap.n_neighbors = get_or<std::size_t>(u, "n_neighbors", 15);
            c.umap.min_dist = get_or<double>(u, "min_dist", 0.1);
            c.umap.spread = get_or<double>(u, "spread", 1.0);
            if (u.contains("n_epochs") && !u.at("n_epochs").is_null()) c.umap.n_epochs = u.at("n_epochs").get<std::size_t>();
            c.umap.learning_rate = get_or<double>(u, "learning_rate", 1.0);
            c.umap.negative_sample_rate = get_or<double>(u, "negative_sample_rate", 5.0);
            c.umap.repulsion_strength = get_or<double>(u, "repulsion_strength", 1.0);
        }
        if (j.contains("kmeans")) {
            const auto& k = j.at("kmeans");
            reject_unknown(k, {"n_init", "max_iter", "tol"}, "kmeans");
            c.kmeans_n_init = get_or<std::size_t>(k, "n_init", 10);
            c.kmeans_max_iter = get_or<std::size_t>(k, "max_iter", 300);
            c.kmeans_tol = get_or<double>(k, "tol", 1e-4);
        }
        if (j.contains("curation")) {
            const auto& cu = j.at("curation");
            reject_unknown(cu, {"min_annotations", "drop_overlaps"}, "curation");
            c.curation.min_annotations = get_or<std::size_t>(cu, "min_annotations", 150);
            c.curation.drop_overlaps = get_or<bool>(cu, "drop_overlaps", false);
        }
        if (j.contains("split")) {
            const auto r = j.at("split").get<std::vector<double>>();
            if (r.size() != 3) throw Error(ErrorCode::InvalidArgument, "split needs three ratios");
            c.split_ratios = {r[0], r[1], r[2]};
        }
        const auto norm = get_or<std::string>(j, "ami_normalizer", "arithmetic");
        if (norm == "arithmetic") {
            c.ami_normalizer = AmiNormalizer::Arithmetic;
        } else if (norm == "max") {
            c.ami_normalizer = AmiNormalizer::Max;
        } else {
            throw Error(ErrorCode::InvalidArgument, "unknown ami_normalizer '" + norm + "'");
        }
        c.plots = get_or<bool>(j, "plots", true);
        c.threads = get_or<unsigned>(j, "threads", 1);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
    }
    if (c.embeddings.empty()) throw Error(ErrorCode::InvalidArgument, "config lists no embedding files");
    return c;
}

EvalConfig load_eval_config(const fs::path& path) {
    return parse_eval_config(read_text_file(path), path.parent_path());
}

std::vector<ModelMetrics> EvaluationReport::all_metrics() const {
    std::vector<ModelMetrics> out;
    for (const auto& m : models) {
        out.push_back(m.original.metrics);
        out.push_back(m.umap300.metrics);
    }
    return out;
}

EvaluationReport run_evaluation(const EvalConfig& config) {
    EvaluationReport report;
    report.config = config;

    const auto raw = load_annotations(config.annotations);
    auto full_registry = load_registry(config.registry);
    const auto curated = curate(raw, config.curation);

    std::vector<std::string> names;
    for (const auto& e : curated.rows) {
        report.event_ids.push_back(e.event_id);
        names.push_back(e.label);
    }
    report.labels = LabelVector::from_names(names);
    report.split = stratified_split(report.labels, config.split_ratios, config.seed);

    std::unordered_map<std::string_view, std::size_t> raw_ids;
    for (std::size_t i = 0; i < raw.rows.size(); ++i) raw_ids.emplace(raw.rows[i].event_id, i);

    // Load and align every file before any heavy work so input errors surface first.
    struct Prepared {
        EmbeddingSet set;
        const RegistryEntry* entry = nullptr;
        std::vector<std::size_t> rows;
    };
    std::vector<Prepared> prepared;
    std::set<std::string> seen_models;
    for (const auto& path : config.embeddings) {
        Prepared p;
        p.set = load_embeddings(path);
        p.entry = full_registry.find(p.set.model_name);
        if (p.entry == nullptr) {
            throw Error(ErrorCode::RegistryMiss, "model '" + p.set.model_name + "' (" + path.string() +
                                                     ") is not in the registry");
        }
        if (!seen_models.insert(p.set.model_name).second) {
            throw Error(ErrorCode::InvariantViolation, "model '" + p.set.model_name + "' appears twice");
        }
        std::size_t unknown = 0;
        std::unordered_map<std::string_view, std::size_t> row_of;
        for (std::size_t r = 0; r < p.set.count(); ++r) {
            if (!raw_ids.contains(p.set.event_ids[r])) ++unknown;
            row_of.emplace(p.set.event_ids[r], r);
        }
        if (unknown > 0) {
            throw Error(ErrorCode::MissingEvents,
                        std::to_string(unknown) + " embedding ids of " + path.string() + " are not annotated",
                        unknown);
        }
        std::size_t uncovered = 0;
        for (const auto& id : report.event_ids) {
            const auto it = row_of.find(id);
            if (it == row_of.end()) {
                ++uncovered;
            } else {
                p.rows.push_back(it->second);
            }
        }
        if (uncovered > 0) {
            throw Error(ErrorCode::MissingEvents,
                        std::to_string(uncovered) + " curated events have no embedding in " + path.string(),
                        uncovered);
        }
        prepared.push_back(std::move(p));
    }

    report.models.resize(prepared.size());
    const unsigned threads = resolve_threads(config.threads);
    const unsigned outer = std::min<unsigned>(threads, static_cast<unsigned>(prepared.size()));
    const unsigned inner = outer > 1 ? 1 : threads;
    parallel_for(prepared.size(), outer, [&](std::size_t i) {
        const auto& p = prepared[i];
        report.models[i] = evaluate_model(config.embeddings[i], p.set, *p.entry, p.rows, report.labels,
                                          report.split, config, inner);
    });

    for (const auto& m : report.models) report.registry.entries.push_back(m.entry);
    const auto metrics = report.all_metrics();
    report.categories = aggregate_by_category(metrics, report.registry);
    return report;
}

std::string report_json(const EvaluationReport& report) {
    json j;
    j["config"] = config_json(report.config);

    json dataset;
    dataset["n_events"] = report.event_ids.size();
    dataset["class_names"] = report.labels.class_names;
    dataset["class_counts"] = class_counts(report.labels);
    dataset["labels"] = report.labels.labels;
    dataset["split"] = {{"seed", report.split.seed},
                        {"ratios", report.split.ratios},
                        {"train", report.split.indices(Part::Train).size()},
                        {"val", report.split.indices(Part::Val).size()},
                        {"test", report.split.indices(Part::Test).size()},
                        {"scored_on", "test"}};
    j["dataset"] = dataset;

    json models = json::array();
    for (const auto& m : report.models) {
        json jm;
        jm["name"] = m.entry.name;
        jm["abbrev"] = m.entry.abbrev;
        jm["training"] = to_string(m.entry.training);
        jm["fine_tuned"] = m.entry.training == Training::SslFt;
        jm["domains"] = m.entry.domains;
        jm["bird_trained"] = m.entry.is_bird_trained;
        jm["dimension"] = m.dim;
        jm["registry_dimension"] = m.entry.dimension;
        jm["source"] = m.source.generic_string();
        jm["warning"] = m.warning;
        jm["results"] = json::array({metrics_json(m.original.metrics), metrics_json(m.umap300.metrics)});
        if (m.umap2) {
            jm["umap2"] = {{"file", "umap2_" + file_stem_for(m.entry.name) + ".bemb"},
                           {"init", m.umap2_init},
                           {"note", m.umap2_note}};
        } else {
            jm["umap2"] = nullptr;
        }
        models.push_back(std::move(jm));
    }
    j["models"] = models;
    j["category_table"] = category_json(report.categories);
    return j.dump(2) + "\n";
}

std::string file_stem_for(std::string_view model_name) {
    std::string out;
    for (char c : model_name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                        c == '-' || c == '.' || c == '+';
        out += ok ? c : '_';
    }
    return out.empty() ? "model" : out;
}

void write_evaluation(const EvaluationReport& report, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    const auto text = report_json(report);
    write_text_file(out_dir / "report.json", text);

    for (const auto& m : report.models) {
        const auto stem = file_stem_for(m.entry.name);
        for (const auto* space : {&m.original, &m.umap300}) {
            const auto tag = std::string(to_string(space->metrics.space));
            std::string clusters = "event_id,cluster\n";
            for (std::size_t i = 0; i < report.event_ids.size(); ++i) {
                clusters += csv_escape(report.event_ids[i]) + ',' + std::to_string(space->clusters[i]) + '\n';
            }
            write_text_file(out_dir / ("clusters_" + stem + "_" + tag + ".csv"), clusters);

            std::string preds = "event_id,true_label,predicted_label\n";
            for (std::size_t t = 0; t < space->test_rows.size(); ++t) {
                const auto row = space->test_rows[t];
                preds += csv_escape(report.event_ids[row]) + ',' +
                         csv_escape(report.labels.class_names[report.labels.labels[row]]) + ',' +
                         csv_escape(report.labels.class_names[space->predictions[t]]) + '\n';
            }
            write_text_file(out_dir / ("predictions_" + stem + "_" + tag + ".csv"), preds);
        }
        if (m.umap2) {
            EmbeddingSet reduced{m.entry.name + "+umap2", *m.umap2, report.event_ids};
            save_embeddings(reduced, out_dir / ("umap2_" + stem + ".bemb"));
        }
    }
    render_report(parse_report(text), out_dir, out_dir);
}

ReportSummary parse_report(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, e.what(), e.byte);
    }
    ReportSummary s;
    try {
        const auto& ds = j.at("dataset");
        s.labels.class_names = ds.at("class_names").get<std::vector<std::string>>();
        s.labels.labels = ds.at("labels").get<std::vector<std::uint32_t>>();
        for (const auto& jm : j.at("models")) {
            RegistryEntry e;
            e.name = jm.at("name").get<std::string>();
            e.abbrev = jm.at("abbrev").get<std::string>();
            const auto training = parse_training(jm.at("training").get<std::string>());
            if (!training) throw Error(ErrorCode::ParseError, "bad training tag for " + e.name);
            e.training = *training;
            e.domains = jm.at("domains").get<std::vector<std::string>>();
            e.dimension = jm.at("registry_dimension").get<std::uint32_t>();
            s.registry.entries.push_back(e);
            for (const auto& r : jm.at("results")) {
                ModelMetrics m;
                m.model = e.name;
                const auto space = parse_space(r.at("space").get<std::string>());
                if (!space) throw Error(ErrorCode::ParseError, "bad space tag for " + e.name);
                m.space = *space;
                m.dim = r.at("dim").get<std::size_t>();
                m.ami = number_or_nan(r.at("ami"));
                m.balanced_macro_accuracy = number_or_nan(r.at("balanced_macro_accuracy"));
                m.inertia = number_or_nan(r.at("clustering").at("inertia"));
                m.params.kmeans_k = r.at("clustering").at("k").get<std::size_t>();
                m.params.knn_k = r.at("classification").at("k").get<std::size_t>();
                s.metrics.push_back(std::move(m));
            }
            if (jm.contains("umap2") && jm.at("umap2").is_object()) {
                s.layouts.emplace_back(e.name, jm.at("umap2").at("file").get<std::string>());
            }
        }
        for (const auto& jr : j.at("category_table")) {
            CategoryRow row;
            row.category = jr.at("category").get<std::string>();
            row.members = jr.at("members").get<std::vector<std::string>>();
            row.classification_original = number_or_nan(jr.at("classification").at("original"));
            row.classification_umap = number_or_nan(jr.at("classification").at("umap"));
            row.clustering_original = number_or_nan(jr.at("clustering").at("original"));
            row.clustering_umap = number_or_nan(jr.at("clustering").at("umap"));
            s.categories.rows.push_back(std::move(row));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("report: ") + e.what());
    }
    validate(s.registry);
    return s;
}

std::string check_report_consistency(const ReportSummary& summary) {
    const auto recomputed = aggregate_by_category(summary.metrics, summary.registry);
    if (recomputed.rows.size() != summary.categories.rows.size()) return "category count differs";
    const auto close = [](double a, double b) {
        return (std::isnan(a) && std::isnan(b)) || std::abs(a - b) <= 1e-12;
    };
    for (std::size_t i = 0; i < recomputed.rows.size(); ++i) {
        const auto& a = recomputed.rows[i];
        const auto& b = summary.categories.rows[i];
        if (a.category != b.category || a.members != b.members) return "membership of '" + b.category + "' differs";
        if (!close(a.classification_original, b.classification_original) ||
            !close(a.classification_umap, b.classification_umap) ||
            !close(a.clustering_original, b.clustering_original) || !close(a.clustering_umap, b.clustering_umap)) {
            return "means of '" + b.category + "' differ from the per-model rows";
        }
    }
    return {};
}

void render_report(const ReportSummary& summary, const fs::path& report_dir, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    const auto table = aggregate_by_category(summary.metrics, summary.registry);
    write_text_file(out_dir / "per_model.csv", per_model_csv(summary.metrics, summary.registry));
    write_text_file(out_dir / "category_table.csv", category_table_csv(table));
    write_text_file(out_dir / "category_table.txt", render_category_table(table));

    if (summary.layouts.empty()) return;
    std::vector<GalleryPanel> panels;
    for (const auto& [model, file] : summary.layouts) {
        auto set = load_embeddings(report_dir / file);
        if (set.count() != summary.labels.size()) {
            throw Error(ErrorCode::LengthMismatch, file + " does not match the report's event count");
        }
        double ami = std::numeric_limits<double>::quiet_NaN();
        for (const auto& m : summary.metrics) {
            if (m.model == model && m.space == Space::Original) ami = m.ami;
        }
        const auto stem = file_stem_for(model);
        GalleryPanel panel{model, ami, std::move(set.data)};
        write_text_file(out_dir / ("scatter_" + stem + ".svg"),
                        render_scatter_svg(panel.coords, summary.labels, panel_title(panel)));
        panels.push_back(std::move(panel));
    }
    write_text_file(out_dir / "gallery.svg", render_gallery(panels, summary.labels));
}

fs::path reduce_file(const fs::path& input, const fs::path& out_dir, const LayoutParams& params, unsigned threads) {
    const auto set = load_embeddings(input);
    const auto reduced = umap(set.data, params, threads);
    const std::string suffix = "+umap" + std::to_string(params.n_components);
    EmbeddingSet out{set.model_name + suffix, reduced.embedding, set.event_ids};
    fs::create_directories(out_dir);
    const auto path = out_dir / (input.stem().string() + suffix + ".bemb");
    save_embeddings(out, path);
    return path;
}

}  // namespace embeval
