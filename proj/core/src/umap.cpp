#include "embeval/umap.hpp"

#include "embeval/error.hpp"

namespace embeval {

UmapResult umap(const MatrixF& x, const LayoutParams& params, unsigned threads) {
    if (x.rows() <= params.n_neighbors) {
        throw Error(ErrorCode::KTooLarge, "UMAP needs more than n_neighbors=" + std::to_string(params.n_neighbors) +
                                              " points, got " + std::to_string(x.rows()),
                    params.n_neighbors);
    }
    LayoutParams resolved = params;
    if (!resolved.a || !resolved.b) {
        const auto fit = fit_ab(params.min_dist, params.spread);
        resolved.a = fit.a;
        resolved.b = fit.b;
    }
    resolved.n_epochs = params.epochs_for(x.rows());

    const auto knn = exact_knn_graph(x, params.n_neighbors, threads);
    const auto graph = prune_weak_edges(fuzzy_simplicial_set(knn), *resolved.n_epochs);
    auto init = initialize_layout(graph, params.n_components, params.seed);
    rescale_columns(init.coords, 10.0);

    UmapResult out;
    out.embedding = optimize_layout(graph, std::move(init.coords), resolved);
    out.a = *resolved.a;
    out.b = *resolved.b;
    out.n_epochs = *resolved.n_epochs;
    out.init = init.method;
    out.init_note = std::move(init.note);
    return out;
}

}  // namespace embeval
