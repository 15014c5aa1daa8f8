#include "embeval/knn.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "embeval/error.hpp"
#include "embeval/parallel.hpp"

namespace embeval {

namespace {

using Candidate = std::pair<double, std::uint32_t>;

void check_shapes(const MatrixF& train_x, const MatrixF& query_x, std::size_t k) {
    if (train_x.cols() != query_x.cols() && query_x.rows() > 0) {
        throw Error(ErrorCode::DimMismatch, "train dim " + std::to_string(train_x.cols()) + " != query dim " +
                                                std::to_string(query_x.cols()));
    }
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be positive");
    if (k > train_x.rows()) {
        throw Error(ErrorCode::KExceedsTrain,
                    "k=" + std::to_string(k) + " exceeds training size " + std::to_string(train_x.rows()), k);
    }
}

void nearest(const MatrixF& train_x, std::span<const float> q, const KnnParams& params,
             std::vector<Candidate>& scratch) {
    scratch.resize(train_x.rows());
    for (std::uint32_t i = 0; i < train_x.rows(); ++i) {
        scratch[i] = {ranking_distance(q, train_x.row(i), params.metric), i};
    }
    std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(params.k), scratch.end());
}

}  // namespace

std::string_view to_string(Metric m) noexcept { return m == Metric::Euclidean ? "euclidean" : "cosine"; }

double ranking_distance(std::span<const float> a, std::span<const float> b, Metric metric) noexcept {
    if (metric == Metric::Euclidean) return squared_distance(a, b);
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 1.0;
    return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

Matrix<std::uint32_t> knn_neighbors(const MatrixF& train_x, const MatrixF& query_x, const KnnParams& params) {
    check_shapes(train_x, query_x, params.k);
    Matrix<std::uint32_t> out(query_x.rows(), params.k);
    parallel_for(query_x.rows(), params.threads, [&](std::size_t q) {
        thread_local std::vector<Candidate> scratch;
        nearest(train_x, query_x.row(q), params, scratch);
        for (std::size_t j = 0; j < params.k; ++j) out(q, j) = scratch[j].second;
    });
    return out;
}

LabelVector knn_predict(const MatrixF& train_x, const LabelVector& train_y, const MatrixF& query_x,
                        const KnnParams& params) {
    check_shapes(train_x, query_x, params.k);
    if (train_y.size() != train_x.rows()) {
        throw Error(ErrorCode::LengthMismatch, "training labels do not match training rows");
    }
    const std::size_t num_classes = std::max(train_y.num_classes(), class_counts(train_y).size());

    LabelVector out;
    out.class_names = train_y.class_names;
    out.labels.assign(query_x.rows(), 0);
    parallel_for(query_x.rows(), params.threads, [&](std::size_t q) {
        thread_local std::vector<Candidate> scratch;
        thread_local std::vector<std::size_t> votes;
        thread_local std::vector<double> support;
        nearest(train_x, query_x.row(q), params, scratch);
        votes.assign(num_classes, 0);
        support.assign(num_classes, 0.0);
        for (std::size_t j = 0; j < params.k; ++j) {
            const auto label = train_y.labels[scratch[j].second];
            ++votes[label];
            const double d = params.metric == Metric::Euclidean ? std::sqrt(scratch[j].first) : scratch[j].first;
            support[label] += d;
        }
        std::uint32_t best = 0;
        bool have = false;
        for (std::uint32_t c = 0; c < num_classes; ++c) {
            if (votes[c] == 0) continue;
            if (!have || votes[c] > votes[best] || (votes[c] == votes[best] && support[c] < support[best])) {
                best = c;
                have = true;
            }
        }
        out.labels[q] = best;
    });
    return out;
}

std::uint64_t ConfusionMatrix::total() const noexcept {
    std::uint64_t t = 0;
    for (auto v : counts.values()) t += v;
    return t;
}

ConfusionMatrix confusion(std::span<const std::uint32_t> y_true, std::span<const std::uint32_t> y_pred,
                          std::size_t num_classes) {
    if (y_true.size() != y_pred.size()) {
        throw Error(ErrorCode::LengthMismatch, "y_true and y_pred lengths differ");
    }
    ConfusionMatrix cm{Matrix<std::uint64_t>(num_classes, num_classes, 0)};
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] >= num_classes || y_pred[i] >= num_classes) {
            throw Error(ErrorCode::UnknownClass, "label outside the class universe at sample " + std::to_string(i),
                        i);
        }
        ++cm.counts(y_true[i], y_pred[i]);
    }
    return cm;
}

ConfusionMatrix confusion(const LabelVector& y_true, const LabelVector& y_pred) {
    if (y_true.class_names != y_pred.class_names) {
        throw Error(ErrorCode::UnknownClass, "y_true and y_pred use different class universes");
    }
    return confusion(y_true.labels, y_pred.labels, y_true.num_classes());
}

double balanced_macro_accuracy(const ConfusionMatrix& cm) {
    const std::size_t c = cm.num_classes();
    if (c == 0) throw Error(ErrorCode::InvalidArgument, "empty confusion matrix");
    double sum = 0.0;
    for (std::size_t t = 0; t < c; ++t) {
        std::uint64_t row = 0;
        for (std::size_t p = 0; p < c; ++p) row += cm.counts(t, p);
        if (row == 0) throw Error(ErrorCode::EmptyClass, "class " + std::to_string(t) + " has no test samples", t);
        sum += static_cast<double>(cm.counts(t, t)) / static_cast<double>(row);
    }
    return sum / static_cast<double>(c);
}

}  // namespace embeval
