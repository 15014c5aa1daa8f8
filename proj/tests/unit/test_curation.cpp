#include <doctest.h>

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "embeval/curation.hpp"
#include "embeval/error.hpp"
#include "embeval/rng.hpp"
#include "oracles.hpp"

using namespace embeval;

namespace {

AnnotationTable classes(const std::vector<std::pair<std::string, std::size_t>>& sizes) {
    AnnotationTable t;
    std::size_t id = 0;
    for (const auto& [label, n] : sizes) {
        for (std::size_t i = 0; i < n; ++i, ++id) {
            const double s = static_cast<double>(id);
            t.rows.push_back({"e" + std::to_string(id), "f.wav", s, s + 0.5, label});
        }
    }
    return t;
}

std::map<std::string, std::size_t> label_counts(const AnnotationTable& t) {
    std::map<std::string, std::size_t> m;
    for (const auto& e : t.rows) ++m[e.label];
    return m;
}

AnnotationTable random_events(Rng& rng, std::size_t n) {
    AnnotationTable t;
    for (std::size_t i = 0; i < n; ++i) {
        // Coarse grid so touching endpoints and exact duplicates occur.
        const double start = static_cast<double>(rng.below(40)) * 0.5;
        const double len = 0.5 * static_cast<double>(1 + rng.below(4));
        t.rows.push_back({"e" + std::to_string(i), "f" + std::to_string(rng.below(4)), start, start + len,
                          "L" + std::to_string(rng.below(3))});
    }
    return t;
}

std::vector<std::string> ids(const AnnotationTable& t) {
    std::vector<std::string> out;
    for (const auto& e : t.rows) out.push_back(e.event_id);
    return out;
}

LabelVector labels_with_sizes(const std::vector<std::size_t>& sizes, Rng& rng) {
    std::vector<std::uint32_t> y;
    for (std::size_t c = 0; c < sizes.size(); ++c) y.insert(y.end(), sizes[c], static_cast<std::uint32_t>(c));
    rng.shuffle(y.begin(), y.end());
    return LabelVector::from_indices(y);
}

}  // namespace

TEST_CASE("class filter is strict") {
    const auto t = classes({{"A", 151}, {"B", 150}});
    const auto f = filter_min_annotations(t, 150);
    CHECK(label_counts(f) == std::map<std::string, std::size_t>{{"A", 151}});

    CHECK(filter_min_annotations(t, 0) == t);

    const auto small = classes({{"A", 5}, {"B", 3}});
    CHECK(label_counts(filter_min_annotations(small, 4)) == std::map<std::string, std::size_t>{{"A", 5}});

    try {
        filter_min_annotations(small, 5);
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyResult);
    }
}

TEST_CASE("class filter keeps exactly the classes above threshold") {
    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::pair<std::string, std::size_t>> sizes;
        const auto k = 1 + rng.below(5);
        for (std::size_t c = 0; c < k; ++c) sizes.emplace_back("C" + std::to_string(c), 1 + rng.below(12));
        const std::size_t threshold = rng.below(8);
        const auto t = classes(sizes);
        std::map<std::string, std::size_t> expected;
        for (const auto& [l, n] : sizes)
            if (n > threshold) expected[l] = n;
        if (expected.empty()) {
            CHECK_THROWS_AS(filter_min_annotations(t, threshold), Error);
        } else {
            const auto f = filter_min_annotations(t, threshold);
            CHECK(label_counts(f) == expected);
            // Order preserved.
            auto f_ids = ids(f);
            auto t_ids = ids(t);
            std::erase_if(t_ids, [&](const std::string& id) {
                return std::find(f_ids.begin(), f_ids.end(), id) == f_ids.end();
            });
            CHECK(f_ids == t_ids);
        }
    }
}

TEST_CASE("overlap removal boundary cases") {
    AnnotationTable t;
    t.rows.push_back({"a", "f", 0, 2, "X"});
    t.rows.push_back({"b", "f", 1, 3, "X"});
    CHECK(remove_overlaps(t).rows.empty());

    AnnotationTable touching;
    touching.rows.push_back({"a", "f", 0, 1, "X"});
    touching.rows.push_back({"b", "f", 1, 2, "X"});
    CHECK(remove_overlaps(touching) == touching);

    AnnotationTable other_file;
    other_file.rows.push_back({"a", "f", 0, 2, "X"});
    other_file.rows.push_back({"b", "g", 1, 3, "X"});
    CHECK(remove_overlaps(other_file) == other_file);

    // A long event removes itself and every short event it covers.
    AnnotationTable chain;
    chain.rows.push_back({"long", "f", 0, 10, "X"});
    chain.rows.push_back({"s1", "f", 1, 2, "X"});
    chain.rows.push_back({"s2", "f", 5, 6, "X"});
    chain.rows.push_back({"after", "f", 10, 11, "X"});
    CHECK(ids(remove_overlaps(chain)) == std::vector<std::string>{"after"});
}

TEST_CASE("overlap removal matches the pairwise oracle") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const auto t = random_events(rng, 1 + rng.below(100));
        const auto out = remove_overlaps(t);
        CHECK(ids(out) == oracle::overlap_free_ids(t));
        CHECK_FALSE(oracle::has_overlap(out));
    }
}

TEST_CASE("curation filters before removing overlaps") {
    AnnotationTable t = classes({{"A", 4}, {"B", 2}});
    t.rows.push_back({"clash", "f.wav", 0.25, 0.75, "A"});
    CurationOptions o;
    o.min_annotations = 3;
    o.drop_overlaps = true;
    const auto out = curate(t, o);
    // e0 and "clash" overlap and both go; A then has 3 members and stays.
    CHECK(label_counts(out) == std::map<std::string, std::size_t>{{"A", 3}});
}

TEST_CASE("split sizes") {
    CHECK(split_sizes(10, kDefaultSplitRatios) == std::array<std::size_t, 3>{6, 1, 3});
    CHECK(split_sizes(20, kDefaultSplitRatios) == std::array<std::size_t, 3>{13, 3, 4});
    CHECK(split_sizes(151, kDefaultSplitRatios) == std::array<std::size_t, 3>{98, 22, 31});
    CHECK(split_sizes(3, kDefaultSplitRatios) == std::array<std::size_t, 3>{1, 0, 2});
    for (std::size_t n = 3; n < 2000; ++n) {
        const auto s = split_sizes(n, kDefaultSplitRatios);
        REQUIRE(s[0] + s[1] + s[2] == n);
        REQUIRE(s[0] == static_cast<std::size_t>(0.65 * static_cast<double>(n) + 1e-9));
    }
}

TEST_CASE("stratified split properties") {
    Rng gen(17);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<std::size_t> sizes;
        const auto k = 1 + gen.below(6);
        for (std::size_t c = 0; c < k; ++c) sizes.push_back(3 + gen.below(60));
        const auto y = labels_with_sizes(sizes, gen);
        const std::uint64_t seed = gen.next();
        const auto split = stratified_split(y, kDefaultSplitRatios, seed);
        REQUIRE(split.assignment.size() == y.size());

        std::vector<std::array<std::size_t, 3>> got(k, {0, 0, 0});
        for (std::size_t i = 0; i < y.size(); ++i) ++got[y.labels[i]][static_cast<int>(split.assignment[i])];
        for (std::size_t c = 0; c < k; ++c) CHECK(got[c] == split_sizes(sizes[c], kDefaultSplitRatios));

        CHECK(stratified_split(y, kDefaultSplitRatios, seed).assignment == split.assignment);

        // Reordering rows keeps the per-class part sizes.
        std::vector<std::size_t> perm(y.size());
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
        gen.shuffle(perm.begin(), perm.end());
        LabelVector z = y;
        for (std::size_t i = 0; i < perm.size(); ++i) z.labels[i] = y.labels[perm[i]];
        const auto split_z = stratified_split(z, kDefaultSplitRatios, seed);
        std::vector<std::array<std::size_t, 3>> got_z(k, {0, 0, 0});
        for (std::size_t i = 0; i < z.size(); ++i) ++got_z[z.labels[i]][static_cast<int>(split_z.assignment[i])];
        CHECK(got_z == got);
    }
}

TEST_CASE("train fraction approaches the ratio as classes grow") {
    Rng gen(3);
    double previous_gap = 1.0;
    for (std::size_t n : {3, 10, 100, 1000, 10000}) {
        const auto y = labels_with_sizes({n, n}, gen);
        const auto split = stratified_split(y, kDefaultSplitRatios, 1);
        const double frac = static_cast<double>(split.indices(Part::Train).size()) / static_cast<double>(2 * n);
        const double gap = std::abs(frac - 0.65);
        CHECK(gap <= previous_gap);
        previous_gap = gap;
    }
    CHECK(previous_gap < 1e-3);
}

TEST_CASE("split error paths") {
    Rng gen(1);
    const auto y = labels_with_sizes({5, 2}, gen);
    try {
        stratified_split(y, kDefaultSplitRatios, 0);
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TooFewMembers);
        CHECK(e.index() == std::optional<std::size_t>(1));
    }
    const auto ok = labels_with_sizes({5, 5}, gen);
    CHECK_THROWS_AS(stratified_split(ok, {0.5, 0.5, 0.5}, 0), Error);
    CHECK_THROWS_AS(stratified_split(ok, {-0.1, 0.6, 0.5}, 0), Error);
}
