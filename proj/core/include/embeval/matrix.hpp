#ifndef EMBEVAL_MATRIX_HPP
#define EMBEVAL_MATRIX_HPP

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace embeval {

/// Dense row-major matrix with value semantics.
template <class T>
class Matrix {
public:
    using value_type = T;

    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        assert(data_.size() == rows_ * cols_);
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0; }

    T& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<T> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const T> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using MatrixF = Matrix<float>;
using MatrixD = Matrix<double>;

/// Squared Euclidean distance accumulated in double, in index order.
template <class A, class B>
double squared_distance(std::span<A> x, std::span<B> y) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = static_cast<double>(x[i]) - static_cast<double>(y[i]);
        s += d * d;
    }
    return s;
}

/// Rows of `m` selected by `index`, in that order.
template <class T>
Matrix<T> take_rows(const Matrix<T>& m, std::span<const std::size_t> index) {
    Matrix<T> out(index.size(), m.cols());
    for (std::size_t i = 0; i < index.size(); ++i) {
        const auto src = m.row(index[i]);
        auto dst = out.row(i);
        for (std::size_t c = 0; c < src.size(); ++c) dst[c] = src[c];
    }
    return out;
}

}  // namespace embeval

#endif  // EMBEVAL_MATRIX_HPP
