#include <doctest.h>

#include <cmath>
#include <vector>

#include "embeval/contingency.hpp"
#include "embeval/error.hpp"
#include "embeval/kmeans.hpp"
#include "embeval/rng.hpp"
#include "synthetic.hpp"

using namespace embeval;

namespace {

MatrixF random_points(Rng& rng, std::size_t n, std::size_t dim) {
    MatrixF x(n, dim);
    for (auto& v : x.values()) v = static_cast<float>(rng.normal());
    return x;
}

double inertia_of(const MatrixF& x, const std::vector<std::uint32_t>& a, const MatrixD& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t d = 0; d < x.cols(); ++d) {
            const double diff = x(i, d) - c(a[i], d);
            s += diff * diff;
        }
    return s;
}

}  // namespace

TEST_CASE("inertia never increases between Lloyd iterations") {
    Rng gen(50);
    for (int run = 0; run < 50; ++run) {
        const auto x = random_points(gen, 40 + gen.below(200), 1 + gen.below(8));
        const auto k = 2 + gen.below(8);
        const auto c = kmeans_single(x, k, gen.next(), 300, 1e-4);
        REQUIRE(c.inertia_history.size() >= 2);
        for (std::size_t i = 1; i < c.inertia_history.size(); ++i) {
            CHECK(c.inertia_history[i] <= c.inertia_history[i - 1]);
        }
        CHECK(c.inertia == c.inertia_history.back());
    }
}

TEST_CASE("result is a Lloyd fixed point with consistent inertia") {
    Rng gen(7);
    for (int run = 0; run < 20; ++run) {
        const auto x = random_points(gen, 150, 4);
        KMeansParams p;
        p.k = 5;
        p.seed = gen.next();
        p.tol = 1e-12;
        const auto c = kmeans_fit(x, p);
        CHECK(std::abs(c.inertia - inertia_of(x, c.assignments, c.centroids)) <= 1e-9 * (1.0 + c.inertia));
        for (std::size_t i = 0; i < x.rows(); ++i) {
            double own = 0.0;
            for (std::size_t d = 0; d < x.cols(); ++d) own += std::pow(x(i, d) - c.centroids(c.assignments[i], d), 2);
            for (std::size_t k = 0; k < p.k; ++k) {
                double other = 0.0;
                for (std::size_t d = 0; d < x.cols(); ++d) other += std::pow(x(i, d) - c.centroids(k, d), 2);
                CHECK(own <= other + 1e-9);
            }
        }
    }
}

TEST_CASE("three separated blobs are recovered") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto centres = std::vector<std::vector<double>>{{0, 0}, {5, 0}, {0, 5}};
        const auto b = testing::make_blobs(centres, 100, 0.1, 1000 + seed);
        KMeansParams p;
        p.k = 3;
        p.seed = seed;
        const auto c = kmeans_fit(b.x, p);
        CHECK(adjusted_mutual_info(std::span<const std::uint32_t>(b.labels),
                                   std::span<const std::uint32_t>(c.assignments)) >= 0.99);
    }
}

TEST_CASE("best restart wins and results ignore the thread count") {
    Rng gen(3);
    const auto x = random_points(gen, 300, 6);
    KMeansParams p;
    p.k = 7;
    p.seed = 99;
    const auto one = kmeans_fit(x, p);
    for (std::size_t r = 0; r < p.n_init; ++r) {
        const auto single = kmeans_single(x, p.k, derive_seed(p.seed, r), p.max_iter, p.tol);
        CHECK(one.inertia <= single.inertia);
        if (r == one.restart) CHECK(single.assignments == one.assignments);
    }
    p.threads = 4;
    const auto four = kmeans_fit(x, p);
    CHECK(four.assignments == one.assignments);
    CHECK(four.inertia == one.inertia);
    CHECK(four.centroids == one.centroids);
}

TEST_CASE("edge cases") {
    Rng gen(1);
    const auto x = random_points(gen, 10, 2);

    SUBCASE("k equal to N gives zero inertia") {
        KMeansParams p;
        p.k = 10;
        CHECK(kmeans_fit(x, p).inertia == doctest::Approx(0.0));
    }
    SUBCASE("k above N") {
        KMeansParams p;
        p.k = 11;
        try {
            kmeans_fit(x, p);
            FAIL("no throw");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::KTooLarge);
        }
    }
    SUBCASE("identical points warn") {
        MatrixF same(6, 2);
        for (auto& v : same.values()) v = 1.5f;
        KMeansParams p;
        p.k = 3;
        const auto c = kmeans_fit(same, p);
        CHECK_FALSE(c.warning.empty());
        CHECK(c.inertia == 0.0);
    }
    SUBCASE("k of one is the mean") {
        KMeansParams p;
        p.k = 1;
        const auto c = kmeans_fit(x, p);
        for (std::size_t d = 0; d < 2; ++d) {
            double m = 0.0;
            for (std::size_t i = 0; i < 10; ++i) m += x(i, d);
            CHECK(c.centroids(0, d) == doctest::Approx(m / 10.0));
        }
        CHECK(c.warning.empty());
    }
}
