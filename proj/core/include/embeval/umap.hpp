#ifndef EMBEVAL_UMAP_HPP
#define EMBEVAL_UMAP_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "embeval/matrix.hpp"

namespace embeval {

// ---------------------------------------------------------------------------
// Graph construction

/// Exact k nearest neighbours of every row, self excluded.
struct KnnGraph {
    std::size_t n_neighbors = 0;
    Matrix<std::uint32_t> indices;
    MatrixD distances;  // Euclidean, ascending per row

    std::size_t size() const noexcept { return indices.rows(); }
};

/// Brute force; ties in distance go to the lower row index. Throws KTooLarge
/// unless k < N.
KnnGraph exact_knn_graph(const MatrixF& x, std::size_t k, unsigned threads = 1);

struct SmoothKnn {
    double rho = 0.0;
    double sigma = 0.0;
    /// False when the bandwidth was clamped or the search did not reach its
    /// tolerance; such rows cannot hit the log2(k) target.
    bool converged = true;
};

inline constexpr int kSmoothKnnIterations = 64;
inline constexpr double kSmoothKnnTolerance = 1e-5;
inline constexpr double kMinSigmaScale = 1e-3;

/// rho is the smallest strictly positive distance; sigma solves
/// sum_j exp(-max(0, d_j - rho) / sigma) = log2(k) by bisection.
SmoothKnn smooth_knn_calibrate(std::span<const double> row_distances, std::size_t k);

/// Membership of a neighbour at distance d for a calibrated row.
double membership(double distance, const SmoothKnn& calib) noexcept;

/// Probabilistic t-conorm used to symmetrise memberships.
inline double fuzzy_union(double a, double b) noexcept { return a + b - a * b; }

/// Symmetric sparse membership graph in CSR form, columns sorted per row.
struct FuzzyGraph {
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr;  // size n + 1
    std::vector<std::uint32_t> cols;
    std::vector<double> weights;
    std::vector<double> rho;
    std::vector<double> sigma;
    std::vector<bool> converged;

    std::size_t nnz() const noexcept { return cols.size(); }
    /// 0 when (i, j) is not stored.
    double weight(std::size_t i, std::size_t j) const noexcept;
    double degree(std::size_t i) const noexcept;
};

struct DirectedEdge {
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    double weight = 0.0;
};

/// Symmetrises explicit directed memberships. Each unordered pair is combined
/// once, so w(i, j) and w(j, i) are bit-identical. Zero weights are dropped.
FuzzyGraph symmetrize(std::size_t n, std::span<const DirectedEdge> directed);

FuzzyGraph fuzzy_simplicial_set(const KnnGraph& graph);

// ---------------------------------------------------------------------------
// Layout

struct CurveParams {
    double a = 0.0;
    double b = 0.0;
    double rmse = 0.0;
};

inline constexpr std::size_t kCurveSamples = 300;

/// Least-squares fit of 1 / (1 + a x^(2b)) to the target low-dimensional
/// similarity curve on 300 points of [0, 3 spread]. Throws FitDiverged.
CurveParams fit_ab(double min_dist, double spread);

/// Root-mean-square error of (a, b) against the target curve on the fit grid.
double curve_rmse(double a, double b, double min_dist, double spread);

struct LayoutParams {
    std::size_t n_components = 2;
    std::size_t n_neighbors = 15;
    double min_dist = 0.1;
    double spread = 1.0;
    /// Fitted from (min_dist, spread) when not given.
    std::optional<double> a;
    std::optional<double> b;
    /// 500 when N <= 10 000, otherwise 200, when not given.
    std::optional<std::size_t> n_epochs;
    double learning_rate = 1.0;
    double negative_sample_rate = 5.0;
    double repulsion_strength = 1.0;
    std::uint64_t seed = 0;

    std::size_t epochs_for(std::size_t n) const noexcept;
};

enum class InitMethod { Spectral, Random, RandomFallback };

std::string_view to_string(InitMethod m) noexcept;

/// Component count above which the initial layout is random.
inline constexpr std::size_t kMaxSpectralComponents = 10;
/// Largest graph solved with a dense eigendecomposition; larger graphs use
/// subspace iteration.
inline constexpr std::size_t kDenseSpectralLimit = 2000;

struct LayoutInit {
    MatrixF coords;
    InitMethod method = InitMethod::Random;
    std::string note;
};

/// Spectral (normalised Laplacian) coordinates scaled to [-10, 10] plus 1e-4
/// jitter for n_components <= 10; uniform [-10, 10] otherwise. A failed
/// eigensolve falls back to random and says so in `note`.
LayoutInit initialize_layout(const FuzzyGraph& graph, std::size_t n_components, std::uint64_t seed);

/// Drops edges lighter than max weight / n_epochs; they would be sampled
/// less than once over the run. Symmetry is preserved.
FuzzyGraph prune_weak_edges(const FuzzyGraph& graph, std::size_t n_epochs);

/// Affine map of every column onto [0, extent]; constant columns become 0.
void rescale_columns(MatrixF& coords, double extent);

/// Sequential negative-sampling SGD on the fuzzy cross-entropy. Throws
/// NonFiniteCoordinate (index = point) if a coordinate leaves the reals.
MatrixF optimize_layout(const FuzzyGraph& graph, MatrixF init, const LayoutParams& params);

struct UmapResult {
    MatrixF embedding;
    double a = 0.0;
    double b = 0.0;
    std::size_t n_epochs = 0;
    InitMethod init = InitMethod::Random;
    std::string init_note;
};

/// kNN graph -> fuzzy graph -> weak-edge pruning -> initial layout ->
/// per-column rescale to [0, 10] -> optimised layout.
/// `threads` only affects graph construction.
UmapResult umap(const MatrixF& x, const LayoutParams& params, unsigned threads = 1);

}  // namespace embeval

#endif  // EMBEVAL_UMAP_HPP
