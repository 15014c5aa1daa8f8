#ifndef EMBEVAL_RNG_HPP
#define EMBEVAL_RNG_HPP

#include <algorithm>
#include <cstdint>
#include <random>
#include <string_view>

namespace embeval {

/// SplitMix64 finaliser; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// FNV-1a over the bytes of `text`.
std::uint64_t hash_text(std::string_view text) noexcept;

/// Seed for stream `stream` of the generator family rooted at `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Portable random source. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; the distribution helpers below are
/// implemented here because the std:: distributions are not portable.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    /// Independent generator for sub-task `index` (class, restart, ...).
    Rng stream(std::uint64_t index) const { return Rng(derive_seed(seed_, index)); }

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (one value per call).
    double normal();

    template <class It>
    void shuffle(It first, It last) {
        const auto n = static_cast<std::uint64_t>(last - first);
        for (std::uint64_t i = n; i > 1; --i) {
            const auto j = below(i);
            std::iter_swap(first + (i - 1), first + j);
        }
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

}  // namespace embeval

#endif  // EMBEVAL_RNG_HPP
