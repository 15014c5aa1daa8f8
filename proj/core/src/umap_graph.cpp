#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "embeval/error.hpp"
#include "embeval/parallel.hpp"
#include "embeval/umap.hpp"

namespace embeval {

KnnGraph exact_knn_graph(const MatrixF& x, std::size_t k, unsigned threads) {
    const std::size_t n = x.rows();
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "n_neighbors must be positive");
    if (k >= n) {
        throw Error(ErrorCode::KTooLarge, "n_neighbors=" + std::to_string(k) + " needs more than " +
                                              std::to_string(k) + " points, got " + std::to_string(n), k);
    }
    KnnGraph g;
    g.n_neighbors = k;
    g.indices = Matrix<std::uint32_t>(n, k);
    g.distances = MatrixD(n, k);
    parallel_for(n, threads, [&](std::size_t i) {
        thread_local std::vector<std::pair<double, std::uint32_t>> cand;
        cand.clear();
        cand.reserve(n - 1);
        const auto p = x.row(i);
        for (std::uint32_t j = 0; j < n; ++j) {
            if (j == i) continue;
            cand.emplace_back(squared_distance(p, x.row(j)), j);
        }
        std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
        for (std::size_t j = 0; j < k; ++j) {
            g.indices(i, j) = cand[j].second;
            g.distances(i, j) = std::sqrt(cand[j].first);
        }
    });
    return g;
}

SmoothKnn smooth_knn_calibrate(std::span<const double> d, std::size_t k) {
    SmoothKnn out;
    for (double v : d) {
        if (v > 0.0) {
            out.rho = v;
            break;
        }
    }
    const double target = std::log2(static_cast<double>(k));

    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double mid = 1.0;
    bool hit = false;
    for (int it = 0; it < kSmoothKnnIterations; ++it) {
        double psum = 0.0;
        for (double v : d) psum += std::exp(-std::max(0.0, v - out.rho) / mid);
        if (std::abs(psum - target) < kSmoothKnnTolerance) {
            hit = true;
            break;
        }
        if (psum > target) {
            hi = mid;
            mid = 0.5 * (lo + hi);
        } else {
            lo = mid;
            mid = std::isinf(hi) ? mid * 2.0 : 0.5 * (lo + hi);
        }
    }

    double mean = 0.0;
    for (double v : d) mean += v;
    if (!d.empty()) mean /= static_cast<double>(d.size());
    const double floor = kMinSigmaScale * mean;
    out.sigma = mid;
    out.converged = hit;
    if (out.sigma < floor) {
        out.sigma = floor;
        out.converged = false;
    }
    if (!(out.sigma > 0.0)) {
        out.sigma = std::numeric_limits<double>::min();
        out.converged = false;
    }
    return out;
}

double membership(double distance, const SmoothKnn& calib) noexcept {
    return std::exp(-std::max(0.0, distance - calib.rho) / calib.sigma);
}

double FuzzyGraph::weight(std::size_t i, std::size_t j) const noexcept {
    const auto first = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
    const auto last = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
    const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(j));
    if (it == last || *it != j) return 0.0;
    return weights[static_cast<std::size_t>(it - cols.begin())];
}

double FuzzyGraph::degree(std::size_t i) const noexcept {
    double s = 0.0;
    for (std::size_t e = row_ptr[i]; e < row_ptr[i + 1]; ++e) s += weights[e];
    return s;
}

FuzzyGraph symmetrize(std::size_t n, std::span<const DirectedEdge> directed) {
    // Directed rows, sorted by target; duplicate (i, j) keep the larger weight.
    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(n);
    for (const auto& e : directed) {
        if (e.from >= n || e.to >= n) throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
        if (e.from == e.to || !(e.weight > 0.0)) continue;
        rows[e.from].emplace_back(e.to, e.weight);
    }
    for (auto& r : rows) {
        std::sort(r.begin(), r.end());
        std::vector<std::pair<std::uint32_t, double>> merged;
        for (const auto& [j, w] : r) {
            if (!merged.empty() && merged.back().first == j) {
                merged.back().second = std::max(merged.back().second, w);
            } else {
                merged.emplace_back(j, w);
            }
        }
        r = std::move(merged);
    }
    const auto directed_weight = [&](std::size_t i, std::uint32_t j) {
        const auto& r = rows[i];
        const auto it = std::lower_bound(r.begin(), r.end(), std::make_pair(j, -1.0));
        return it != r.end() && it->first == j ? it->second : 0.0;
    };

    // Union pattern per row.
    std::vector<std::vector<std::uint32_t>> pattern(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& [j, w] : rows[i]) {
            pattern[i].push_back(j);
            pattern[j].push_back(static_cast<std::uint32_t>(i));
        }
    }

    FuzzyGraph g;
    g.n = n;
    g.row_ptr.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        auto& p = pattern[i];
        std::sort(p.begin(), p.end());
        p.erase(std::unique(p.begin(), p.end()), p.end());
        for (auto j : p) {
            const std::size_t lo = std::min<std::size_t>(i, j);
            const std::size_t hi = std::max<std::size_t>(i, j);
            const double w = fuzzy_union(directed_weight(lo, static_cast<std::uint32_t>(hi)),
                                         directed_weight(hi, static_cast<std::uint32_t>(lo)));
            if (!(w > 0.0)) continue;
            g.cols.push_back(j);
            g.weights.push_back(std::min(w, 1.0));
        }
        g.row_ptr[i + 1] = g.cols.size();
    }
    g.rho.assign(n, 0.0);
    g.sigma.assign(n, 1.0);
    g.converged.assign(n, true);
    return g;
}

FuzzyGraph fuzzy_simplicial_set(const KnnGraph& graph) {
    const std::size_t n = graph.size();
    const std::size_t k = graph.n_neighbors;
    std::vector<SmoothKnn> calib(n);
    std::vector<DirectedEdge> directed;
    directed.reserve(n * k);
    for (std::size_t i = 0; i < n; ++i) {
        calib[i] = smooth_knn_calibrate(graph.distances.row(i), k);
        for (std::size_t j = 0; j < k; ++j) {
            directed.push_back({static_cast<std::uint32_t>(i), graph.indices(i, j),
                                membership(graph.distances(i, j), calib[i])});
        }
    }
    auto g = symmetrize(n, directed);
    for (std::size_t i = 0; i < n; ++i) {
        g.rho[i] = calib[i].rho;
        g.sigma[i] = calib[i].sigma;
        g.converged[i] = calib[i].converged;
    }
    return g;
}

}  // namespace embeval
