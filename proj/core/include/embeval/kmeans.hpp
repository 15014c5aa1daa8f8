#ifndef EMBEVAL_KMEANS_HPP
#define EMBEVAL_KMEANS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "embeval/matrix.hpp"

namespace embeval {

struct KMeansParams {
    std::size_t k = 1;
    std::uint64_t seed = 0;
    std::size_t n_init = 10;
    std::size_t max_iter = 300;
    /// Convergence threshold on the largest centroid displacement.
    double tol = 1e-4;
    /// Workers for the assignment step and restarts; results do not depend on it.
    unsigned threads = 1;
};

struct Clustering {
    std::vector<std::uint32_t> assignments;
    MatrixD centroids;
    double inertia = 0.0;
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
    /// Index of the winning restart.
    std::size_t restart = 0;
    /// Inertia after every assignment step of the winning restart.
    std::vector<double> inertia_history;
    /// Non-empty when the data could not support k distinct centroids.
    std::string warning;
};

/// One k-means++ seeded Lloyd run using the given seed directly.
Clustering kmeans_single(const MatrixF& x, std::size_t k, std::uint64_t seed, std::size_t max_iter, double tol,
                         unsigned threads = 1);

/// Best of n_init restarts by inertia; restart r uses stream r of params.seed.
/// Throws KTooLarge when k > N.
Clustering kmeans_fit(const MatrixF& x, const KMeansParams& params);

}  // namespace embeval

#endif  // EMBEVAL_KMEANS_HPP
