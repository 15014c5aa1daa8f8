#ifndef EMBEVAL_CONTINGENCY_HPP
#define EMBEVAL_CONTINGENCY_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "embeval/matrix.hpp"
#include "embeval/types.hpp"

namespace embeval {

/// R x C cross-tabulation of two labelings. All information quantities
/// below are in nats.
struct ContingencyTable {
    Matrix<std::uint64_t> counts;
    std::vector<std::uint64_t> row_sums;
    std::vector<std::uint64_t> col_sums;
    std::uint64_t total = 0;

    std::size_t rows() const noexcept { return counts.rows(); }
    std::size_t cols() const noexcept { return counts.cols(); }

    /// Builds sums from a count matrix.
    static ContingencyTable from_counts(Matrix<std::uint64_t> counts);

    /// Same table with all-zero rows and columns removed.
    ContingencyTable compact() const;

    /// True when every non-empty row and column holds exactly one non-zero cell.
    bool is_permuted_diagonal() const noexcept;
};

ContingencyTable build_contingency(std::span<const std::uint32_t> u, std::span<const std::uint32_t> v);
ContingencyTable build_contingency(const LabelVector& u, const LabelVector& v);

double mutual_information(const ContingencyTable& ct);

/// E[MI] under the hypergeometric permutation model with the table's margins.
double expected_mutual_information(const ContingencyTable& ct);

/// Shannon entropy of a count vector.
double entropy(std::span<const std::uint64_t> counts);

enum class AmiNormalizer { Arithmetic, Max };

/// (MI - E[MI]) / (norm(H(u), H(v)) - E[MI]). Exactly 1.0 for permuted
/// diagonal tables (including the case where both labelings are trivial).
double adjusted_mutual_info(std::span<const std::uint32_t> u, std::span<const std::uint32_t> v,
                            AmiNormalizer normalizer = AmiNormalizer::Arithmetic);
double adjusted_mutual_info(const LabelVector& u, const LabelVector& v,
                            AmiNormalizer normalizer = AmiNormalizer::Arithmetic);
double adjusted_mutual_info(const ContingencyTable& ct, AmiNormalizer normalizer = AmiNormalizer::Arithmetic);

}  // namespace embeval

#endif  // EMBEVAL_CONTINGENCY_HPP
