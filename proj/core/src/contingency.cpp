#include "embeval/contingency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "embeval/error.hpp"

namespace embeval {

ContingencyTable ContingencyTable::from_counts(Matrix<std::uint64_t> counts) {
    ContingencyTable ct;
    ct.row_sums.assign(counts.rows(), 0);
    ct.col_sums.assign(counts.cols(), 0);
    for (std::size_t i = 0; i < counts.rows(); ++i) {
        for (std::size_t j = 0; j < counts.cols(); ++j) {
            ct.row_sums[i] += counts(i, j);
            ct.col_sums[j] += counts(i, j);
            ct.total += counts(i, j);
        }
    }
    ct.counts = std::move(counts);
    return ct;
}

ContingencyTable ContingencyTable::compact() const {
    std::vector<std::size_t> keep_rows;
    std::vector<std::size_t> keep_cols;
    for (std::size_t i = 0; i < rows(); ++i) {
        if (row_sums[i] > 0) keep_rows.push_back(i);
    }
    for (std::size_t j = 0; j < cols(); ++j) {
        if (col_sums[j] > 0) keep_cols.push_back(j);
    }
    Matrix<std::uint64_t> m(keep_rows.size(), keep_cols.size());
    for (std::size_t i = 0; i < keep_rows.size(); ++i) {
        for (std::size_t j = 0; j < keep_cols.size(); ++j) m(i, j) = counts(keep_rows[i], keep_cols[j]);
    }
    return from_counts(std::move(m));
}

bool ContingencyTable::is_permuted_diagonal() const noexcept {
    std::vector<std::size_t> col_nonzero(cols(), 0);
    for (std::size_t i = 0; i < rows(); ++i) {
        std::size_t nonzero = 0;
        for (std::size_t j = 0; j < cols(); ++j) {
            if (counts(i, j) > 0) {
                ++nonzero;
                ++col_nonzero[j];
            }
        }
        if (row_sums[i] > 0 && nonzero != 1) return false;
    }
    for (std::size_t j = 0; j < cols(); ++j) {
        if (col_sums[j] > 0 && col_nonzero[j] != 1) return false;
    }
    return true;
}

ContingencyTable build_contingency(std::span<const std::uint32_t> u, std::span<const std::uint32_t> v) {
    if (u.size() != v.size()) {
        throw Error(ErrorCode::LengthMismatch,
                    "labelings have lengths " + std::to_string(u.size()) + " and " + std::to_string(v.size()));
    }
    if (u.empty()) throw Error(ErrorCode::InvalidArgument, "labelings are empty");
    const std::size_t r = *std::max_element(u.begin(), u.end()) + std::size_t{1};
    const std::size_t c = *std::max_element(v.begin(), v.end()) + std::size_t{1};
    Matrix<std::uint64_t> counts(r, c, 0);
    for (std::size_t t = 0; t < u.size(); ++t) ++counts(u[t], v[t]);
    return ContingencyTable::from_counts(std::move(counts));
}

ContingencyTable build_contingency(const LabelVector& u, const LabelVector& v) {
    auto ct = build_contingency(std::span<const std::uint32_t>(u.labels), std::span<const std::uint32_t>(v.labels));
    // Keep declared-but-unused classes as empty rows/columns.
    if (ct.rows() < u.num_classes() || ct.cols() < v.num_classes()) {
        Matrix<std::uint64_t> m(std::max(ct.rows(), u.num_classes()), std::max(ct.cols(), v.num_classes()), 0);
        for (std::size_t i = 0; i < ct.rows(); ++i) {
            for (std::size_t j = 0; j < ct.cols(); ++j) m(i, j) = ct.counts(i, j);
        }
        ct = ContingencyTable::from_counts(std::move(m));
    }
    return ct;
}

double mutual_information(const ContingencyTable& ct) {
    if (ct.total == 0) return 0.0;
    const double n = static_cast<double>(ct.total);
    double mi = 0.0;
    for (std::size_t i = 0; i < ct.rows(); ++i) {
        for (std::size_t j = 0; j < ct.cols(); ++j) {
            const auto nij = ct.counts(i, j);
            if (nij == 0) continue;
            const double x = static_cast<double>(nij);
            mi += (x / n) * (std::log(n * x) -
                             std::log(static_cast<double>(ct.row_sums[i]) * static_cast<double>(ct.col_sums[j])));
        }
    }
    return std::max(mi, 0.0);
}

double expected_mutual_information(const ContingencyTable& ct) {
    if (ct.total == 0) return 0.0;
    const auto big_n = ct.total;
    const double n = static_cast<double>(big_n);
    const double log_n = std::log(n);
    const double lg_n = std::lgamma(n + 1.0);

    // lgamma(k + 1) for k = 0..N, shared by all terms.
    std::vector<double> log_fact(big_n + 1);
    for (std::uint64_t k = 0; k <= big_n; ++k) log_fact[k] = std::lgamma(static_cast<double>(k) + 1.0);

    double emi = 0.0;
    for (std::size_t i = 0; i < ct.rows(); ++i) {
        const auto a = ct.row_sums[i];
        if (a == 0) continue;
        for (std::size_t j = 0; j < ct.cols(); ++j) {
            const auto b = ct.col_sums[j];
            if (b == 0) continue;
            const double log_ab = std::log(static_cast<double>(a)) + std::log(static_cast<double>(b));
            const double outer = log_fact[a] + log_fact[b] + log_fact[big_n - a] + log_fact[big_n - b] - lg_n;
            const std::uint64_t lo = std::max<std::uint64_t>(1, a + b > big_n ? a + b - big_n : 0);
            const std::uint64_t hi = std::min(a, b);
            for (std::uint64_t k = lo; k <= hi; ++k) {
                const double x = static_cast<double>(k);
                const double log_p = outer - log_fact[k] - log_fact[a - k] - log_fact[b - k] -
                                     log_fact[big_n - a - b + k];
                emi += (x / n) * (log_n + std::log(x) - log_ab) * std::exp(log_p);
            }
        }
    }
    return emi;
}

double entropy(std::span<const std::uint64_t> counts) {
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) return 0.0;
    const double n = static_cast<double>(total);
    double h = 0.0;
    for (auto c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log(p);
    }
    return h;
}

double adjusted_mutual_info(const ContingencyTable& table, AmiNormalizer normalizer) {
    if (table.total == 0) throw Error(ErrorCode::InvalidArgument, "empty contingency table");
    const auto ct = table.compact();
    if (ct.is_permuted_diagonal()) return 1.0;

    const double mi = mutual_information(ct);
    const double emi = expected_mutual_information(ct);
    const double hu = entropy(ct.row_sums);
    const double hv = entropy(ct.col_sums);
    const double norm = normalizer == AmiNormalizer::Arithmetic ? 0.5 * (hu + hv) : std::max(hu, hv);

    double denom = norm - emi;
    if (denom == 0.0 && mi == emi) return 1.0;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    denom = denom < 0.0 ? std::min(denom, -eps) : std::max(denom, eps);
    return (mi - emi) / denom;
}

double adjusted_mutual_info(std::span<const std::uint32_t> u, std::span<const std::uint32_t> v,
                            AmiNormalizer normalizer) {
    return adjusted_mutual_info(build_contingency(u, v), normalizer);
}

double adjusted_mutual_info(const LabelVector& u, const LabelVector& v, AmiNormalizer normalizer) {
    return adjusted_mutual_info(build_contingency(u, v), normalizer);
}

}  // namespace embeval
