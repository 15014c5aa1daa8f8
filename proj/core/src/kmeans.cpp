#include "embeval/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "embeval/error.hpp"
#include "embeval/parallel.hpp"
#include "embeval/rng.hpp"

namespace embeval {

namespace {

MatrixD seed_plus_plus(const MatrixF& x, std::size_t k, Rng& rng, bool& degenerate) {
    const std::size_t n = x.rows();
    MatrixD centroids(k, x.cols());
    const auto put = [&](std::size_t c, std::size_t point) {
        const auto src = x.row(point);
        auto dst = centroids.row(c);
        for (std::size_t d = 0; d < src.size(); ++d) dst[d] = src[d];
    };

    put(0, rng.below(n));
    std::vector<double> closest(n);
    for (std::size_t i = 0; i < n; ++i) closest[i] = squared_distance(x.row(i), centroids.row(0));

    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (double d : closest) total += d;
        std::size_t pick = 0;
        if (total <= 0.0) {
            degenerate = true;
            pick = rng.below(n);
        } else {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += closest[i];
                if (acc > target && closest[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
            while (closest[pick] <= 0.0 && pick > 0) --pick;
        }
        put(c, pick);
        for (std::size_t i = 0; i < n; ++i) {
            closest[i] = std::min(closest[i], squared_distance(x.row(i), centroids.row(c)));
        }
    }
    return centroids;
}

/// Nearest centroid per point; a point keeps its current cluster on ties.
/// Returns the inertia of the new assignment.
double assign(const MatrixF& x, const MatrixD& centroids, std::vector<std::uint32_t>& labels,
              std::vector<double>& dist, bool first, unsigned threads) {
    parallel_for(x.rows(), threads, [&](std::size_t i) {
        const auto p = x.row(i);
        std::uint32_t best = first ? 0 : labels[i];
        double best_d = squared_distance(p, centroids.row(best));
        for (std::uint32_t c = 0; c < centroids.rows(); ++c) {
            if (c == best) continue;
            const double d = squared_distance(p, centroids.row(c));
            if (d < best_d) {
                best = c;
                best_d = d;
            }
        }
        labels[i] = best;
        dist[i] = best_d;
    });
    double inertia = 0.0;
    for (double d : dist) inertia += d;
    return inertia;
}

}  // namespace

Clustering kmeans_single(const MatrixF& x, std::size_t k, std::uint64_t seed, std::size_t max_iter, double tol,
                         unsigned threads) {
    const std::size_t n = x.rows();
    const std::size_t dim = x.cols();
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be positive");
    if (k > n) {
        throw Error(ErrorCode::KTooLarge, "k=" + std::to_string(k) + " exceeds N=" + std::to_string(n), k);
    }

    Rng rng(seed);
    bool degenerate = false;
    Clustering out;
    out.seed = seed;
    out.centroids = seed_plus_plus(x, k, rng, degenerate);
    out.assignments.assign(n, 0);
    std::vector<double> dist(n, 0.0);

    out.inertia = assign(x, out.centroids, out.assignments, dist, true, threads);
    out.inertia_history.push_back(out.inertia);

    std::vector<std::size_t> members(k);
    MatrixD sums(k, dim);
    for (std::size_t iter = 1; iter <= max_iter; ++iter) {
        out.iterations = iter;
        std::fill(members.begin(), members.end(), 0);
        std::fill(sums.values().begin(), sums.values().end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = out.assignments[i];
            ++members[c];
            auto s = sums.row(c);
            const auto p = x.row(i);
            for (std::size_t d = 0; d < dim; ++d) s[d] += p[d];
        }

        // Empty clusters take the points farthest from their centroids.
        std::vector<std::size_t> far_order;
        double shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            auto centroid = out.centroids.row(c);
            if (members[c] == 0) {
                if (far_order.empty()) {
                    // Ascending, so back() is the farthest point (lowest index on ties).
                    far_order.resize(n);
                    for (std::size_t i = 0; i < n; ++i) far_order[i] = i;
                    std::sort(far_order.begin(), far_order.end(), [&](std::size_t a, std::size_t b) {
                        return dist[a] < dist[b] || (dist[a] == dist[b] && a > b);
                    });
                }
                const auto p = x.row(far_order.back());
                far_order.pop_back();
                double moved = 0.0;
                for (std::size_t d = 0; d < dim; ++d) {
                    const double delta = p[d] - centroid[d];
                    moved += delta * delta;
                    centroid[d] = p[d];
                }
                shift = std::max(shift, std::sqrt(moved));
                continue;
            }
            const auto s = sums.row(c);
            const double inv = 1.0 / static_cast<double>(members[c]);
            double moved = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                const double next = s[d] * inv;
                const double delta = next - centroid[d];
                moved += delta * delta;
                centroid[d] = next;
            }
            shift = std::max(shift, std::sqrt(moved));
        }

        out.inertia = assign(x, out.centroids, out.assignments, dist, false, threads);
        out.inertia_history.push_back(out.inertia);
        if (shift < tol) break;
    }

    if (k > 1) {
        bool all_same = true;
        for (std::size_t i = 1; i < n && all_same; ++i) all_same = squared_distance(x.row(0), x.row(i)) == 0.0;
        if (all_same || degenerate) {
            out.warning = "DegenerateData: fewer distinct points than clusters; centroids are duplicated";
        }
    }
    return out;
}

Clustering kmeans_fit(const MatrixF& x, const KMeansParams& params) {
    if (params.k > x.rows()) {
        throw Error(ErrorCode::KTooLarge, "k=" + std::to_string(params.k) + " exceeds N=" + std::to_string(x.rows()),
                    params.k);
    }
    if (params.n_init == 0 || params.max_iter == 0 || !(params.tol > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "n_init, max_iter and tol must be positive");
    }
    std::vector<Clustering> runs(params.n_init);
    const unsigned outer = std::min<unsigned>(resolve_threads(params.threads), static_cast<unsigned>(params.n_init));
    parallel_for(params.n_init, outer, [&](std::size_t r) {
        const auto seed = derive_seed(params.seed, r);
        runs[r] = kmeans_single(x, params.k, seed, params.max_iter, params.tol, 1);
        runs[r].restart = r;
    });

    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r) {
        if (runs[r].inertia < runs[best].inertia) best = r;
    }
    Clustering out = std::move(runs[best]);
    out.seed = params.seed;
    return out;
}

}  // namespace embeval
