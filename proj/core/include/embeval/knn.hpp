#ifndef EMBEVAL_KNN_HPP
#define EMBEVAL_KNN_HPP

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "embeval/matrix.hpp"
#include "embeval/types.hpp"

namespace embeval {

enum class Metric { Euclidean, Cosine };

std::string_view to_string(Metric m) noexcept;

struct KnnParams {
    std::size_t k = 15;
    Metric metric = Metric::Euclidean;
    unsigned threads = 1;
};

/// Distance used for ranking: squared Euclidean (same order as Euclidean)
/// or cosine distance 1 - cos. Zero vectors are at cosine distance 1.
double ranking_distance(std::span<const float> a, std::span<const float> b, Metric metric) noexcept;

/// Indices of the k nearest training rows for each query, nearest first,
/// ties broken by lower training index.
Matrix<std::uint32_t> knn_neighbors(const MatrixF& train_x, const MatrixF& query_x, const KnnParams& params);

/// Majority vote over the k nearest neighbours. Vote ties go to the class
/// whose supporting neighbours have the smaller summed distance, then to the
/// lower class index. Output shares train_y's class_names.
LabelVector knn_predict(const MatrixF& train_x, const LabelVector& train_y, const MatrixF& query_x,
                        const KnnParams& params = {});

/// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
    Matrix<std::uint64_t> counts;

    std::size_t num_classes() const noexcept { return counts.rows(); }
    std::uint64_t total() const noexcept;
};

/// Throws LengthMismatch, or UnknownClass when the class universes differ or
/// a label is out of range.
ConfusionMatrix confusion(const LabelVector& y_true, const LabelVector& y_pred);
ConfusionMatrix confusion(std::span<const std::uint32_t> y_true, std::span<const std::uint32_t> y_pred,
                          std::size_t num_classes);

/// Mean per-class recall. Throws EmptyClass (index = class) when a true class
/// has no samples.
double balanced_macro_accuracy(const ConfusionMatrix& cm);

}  // namespace embeval

#endif  // EMBEVAL_KNN_HPP
