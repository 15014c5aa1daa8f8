#include "embeval/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "embeval/error.hpp"
#include "embeval/io.hpp"

namespace embeval {

namespace {

std::string fixed3(double v) {
    if (std::isnan(v)) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string full(double v) { return std::isnan(v) ? "" : format_real(v); }

bool member_of(const RegistryEntry& e, std::string_view category) {
    if (category == "supl") return e.training == Training::Supl;
    if (category == "ssl") return e.training == Training::Ssl || e.training == Training::SslFt;
    if (category == "bird") return e.is_bird_trained;
    if (category == "non-bird") return !e.is_bird_trained;
    return false;
}

double mean_of(std::span<const ModelMetrics> metrics, const std::vector<std::string>& members, Space space,
               bool clustering) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& name : members) {
        for (const auto& m : metrics) {
            if (m.model != name || m.space != space) continue;
            sum += clustering ? m.ami : m.balanced_macro_accuracy;
            ++count;
        }
    }
    return count == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(count);
}

}  // namespace

std::string_view to_string(Space s) noexcept { return s == Space::Original ? "original" : "umap300"; }

std::optional<Space> parse_space(std::string_view text) noexcept {
    if (text == "original") return Space::Original;
    if (text == "umap300") return Space::Umap300;
    return std::nullopt;
}

const CategoryRow* CategoryTable::find(std::string_view category) const noexcept {
    for (const auto& r : rows) {
        if (r.category == category) return &r;
    }
    return nullptr;
}

CategoryTable aggregate_by_category(std::span<const ModelMetrics> metrics, const ModelRegistry& registry) {
    // Distinct models in first-seen order.
    std::vector<const RegistryEntry*> models;
    for (const auto& m : metrics) {
        const auto* entry = registry.find(m.model);
        if (entry == nullptr) throw Error(ErrorCode::RegistryMiss, "model '" + m.model + "' is not in the registry");
        if (std::find(models.begin(), models.end(), entry) == models.end()) models.push_back(entry);
    }

    CategoryTable table;
    for (auto category : kCategories) {
        CategoryRow row;
        row.category = category;
        for (const auto* e : models) {
            if (member_of(*e, category)) row.members.push_back(e->name);
        }
        if (row.members.empty()) continue;
        row.classification_original = mean_of(metrics, row.members, Space::Original, false);
        row.classification_umap = mean_of(metrics, row.members, Space::Umap300, false);
        row.clustering_original = mean_of(metrics, row.members, Space::Original, true);
        row.clustering_umap = mean_of(metrics, row.members, Space::Umap300, true);
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string format_category_row(const CategoryRow& row) {
    return row.category + " | " + fixed3(row.classification_original) + " | " + fixed3(row.classification_umap) +
           " | " + fixed3(row.clustering_original) + " | " + fixed3(row.clustering_umap);
}

std::string render_category_table(const CategoryTable& table) {
    // Bold every cell whose displayed value equals the displayed maximum of its task.
    std::string best_classification;
    std::string best_clustering;
    double best_cls = -INFINITY;
    double best_clu = -INFINITY;
    for (const auto& r : table.rows) {
        for (double v : {r.classification_original, r.classification_umap}) {
            if (!std::isnan(v) && std::stod(fixed3(v)) > best_cls) best_cls = std::stod(fixed3(v));
        }
        for (double v : {r.clustering_original, r.clustering_umap}) {
            if (!std::isnan(v) && std::stod(fixed3(v)) > best_clu) best_clu = std::stod(fixed3(v));
        }
    }
    best_classification = std::isfinite(best_cls) ? fixed3(best_cls) : "";
    best_clustering = std::isfinite(best_clu) ? fixed3(best_clu) : "";
    const auto cell = [](double v, const std::string& best) {
        const auto text = fixed3(v);
        return text == best ? "**" + text + "**" : text;
    };

    std::string out =
        "category | classification original | classification UMAP | clustering original | clustering UMAP\n";
    for (const auto& r : table.rows) {
        out += r.category + " | " + cell(r.classification_original, best_classification) + " | " +
               cell(r.classification_umap, best_classification) + " | " +
               cell(r.clustering_original, best_clustering) + " | " + cell(r.clustering_umap, best_clustering) +
               "\n";
    }
    return out;
}

std::string category_table_csv(const CategoryTable& table) {
    std::string out =
        "category,members,classification_original,classification_umap,clustering_original,clustering_umap\n";
    for (const auto& r : table.rows) {
        std::string members;
        for (std::size_t i = 0; i < r.members.size(); ++i) {
            if (i > 0) members += ';';
            members += r.members[i];
        }
        out += csv_escape(r.category) + ',' + csv_escape(members) + ',' + full(r.classification_original) + ',' +
               full(r.classification_umap) + ',' + full(r.clustering_original) + ',' + full(r.clustering_umap) +
               '\n';
    }
    return out;
}

std::string per_model_csv(std::span<const ModelMetrics> metrics, const ModelRegistry& registry) {
    std::string out = "model,abbrev,training,bird_trained,space,ami,balanced_macro_accuracy\n";
    for (const auto& m : metrics) {
        const auto* e = registry.find(m.model);
        if (e == nullptr) throw Error(ErrorCode::RegistryMiss, "model '" + m.model + "' is not in the registry");
        out += csv_escape(m.model) + ',' + csv_escape(e->abbrev) + ',' + std::string(to_string(e->training)) + ',' +
               (e->is_bird_trained ? "true" : "false") + ',' + std::string(to_string(m.space)) + ',' + full(m.ami) +
               ',' + full(m.balanced_macro_accuracy) + '\n';
    }
    return out;
}

}  // namespace embeval
