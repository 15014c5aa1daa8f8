// Acceptance checks 1-10. One PASS/FAIL line per criterion; exit status is 0
// only when every criterion passes.
//
//   embeval_acceptance <path to embeval CLI> <work dir>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "embeval/contingency.hpp"
#include "embeval/curation.hpp"
#include "embeval/error.hpp"
#include "embeval/io.hpp"
#include "embeval/kmeans.hpp"
#include "embeval/knn.hpp"
#include "embeval/rng.hpp"
#include "embeval/umap.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace embeval;
namespace fs = std::filesystem;

namespace {

// Tolerances and limits.
constexpr double kAmiOracleTol = 1e-9;
constexpr double kAmiChanceBand = 0.05;
constexpr double kPermutedAmiTol = 1e-12;
constexpr double kDuplicationTol = 1e-12;
constexpr double kBlobAmi = 0.99;
constexpr double kResidualTol = 1e-3;
constexpr double kFitRmse = 1e-2;
constexpr double kLayoutAccuracy = 0.95;
constexpr double kReducedAmiBand = 0.05;
constexpr double kMeanTol = 1e-12;
constexpr double kAmiSeconds = 30.0;
constexpr double kKmeansSeconds = 10.0;
constexpr double kStructureSeconds = 120.0;
constexpr double kLadderSeconds = 300.0;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

MatrixF random_points(Rng& rng, std::size_t n, std::size_t dim) {
    MatrixF x(n, dim);
    for (auto& v : x.values()) v = static_cast<float>(rng.normal());
    return x;
}

MatrixF grid_points(Rng& rng, std::size_t n, std::size_t dim) {
    MatrixF x(n, dim);
    for (auto& v : x.values()) v = static_cast<float>(rng.below(4));
    return x;
}

LabelVector anonymous(std::vector<std::uint32_t> y, std::size_t classes) {
    LabelVector l;
    l.labels = std::move(y);
    for (std::size_t c = 0; c < classes; ++c) l.class_names.push_back("c" + std::to_string(c));
    return l;
}

// 1 ---------------------------------------------------------------------------

Outcome ami_oracle_equivalence() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    std::map<std::pair<std::vector<int>, std::vector<int>>, long double> emi_memo;
    const auto oracle_ami = [&](const oracle::Table& raw) -> long double {
        const auto t = oracle::compact(raw);
        bool diagonal = true;
        for (const auto& row : t) diagonal &= std::count_if(row.begin(), row.end(), [](int v) { return v > 0; }) == 1;
        for (std::size_t j = 0; j < t[0].size(); ++j) {
            int nz = 0;
            for (const auto& row : t) nz += row[j] > 0;
            diagonal &= nz == 1;
        }
        if (diagonal) return 1.0L;
        auto r = oracle::row_margins(t);
        auto c = oracle::col_margins(t);
        auto key = std::make_pair(r, c);
        std::sort(key.first.begin(), key.first.end());
        std::sort(key.second.begin(), key.second.end());
        auto it = emi_memo.find(key);
        if (it == emi_memo.end()) it = emi_memo.emplace(key, oracle::emi_by_tables(r, c)).first;
        const long double emi = it->second;
        return (oracle::mutual_information(t) - emi) / (0.5L * (oracle::entropy(r) + oracle::entropy(c)) - emi);
    };

    std::size_t tables = 0;
    double worst = 0.0;
    for (std::size_t rows = 1; rows <= 3; ++rows) {
        for (std::size_t cols = 1; cols <= 3; ++cols) {
            const std::size_t cells = rows * cols;
            for (int n = 1; n <= 12; ++n) {
                // Every composition of n into `cells` non-negative parts.
                std::vector<int> cell(cells, 0);
                std::function<void(std::size_t, int)> fill = [&](std::size_t i, int left) {
                    if (i + 1 == cells) {
                        cell[i] = left;
                        oracle::Table t(rows, std::vector<int>(cols));
                        Matrix<std::uint64_t> m(rows, cols);
                        for (std::size_t a = 0; a < rows; ++a)
                            for (std::size_t b = 0; b < cols; ++b) {
                                t[a][b] = cell[a * cols + b];
                                m(a, b) = static_cast<std::uint64_t>(cell[a * cols + b]);
                            }
                        const double got = adjusted_mutual_info(ContingencyTable::from_counts(std::move(m)));
                        const double diff = std::abs(got - static_cast<double>(oracle_ami(t)));
                        if (!(diff <= worst)) worst = std::isnan(diff) ? INFINITY : diff;
                        ++tables;
                        return;
                    }
                    for (int v = 0; v <= left; ++v) {
                        cell[i] = v;
                        fill(i + 1, left - v);
                    }
                };
                fill(0, n);
            }
        }
    }
    const double secs = seconds_since(t0);
    out.require(worst <= kAmiOracleTol, "max |AMI - oracle| = " + fmt("%.3g", worst));
    out.require(secs < kAmiSeconds, "runtime " + fmt("%.1f", secs) + " s");
    out.note(std::to_string(tables) + " tables, max diff " + fmt("%.2g", worst) + ", " + fmt("%.1f", secs) + " s");
    return out;
}

// 2 ---------------------------------------------------------------------------

Outcome ami_calibration() {
    Outcome out;
    double sum = 0.0;
    bool identical_exact = true;
    double permuted_worst = 0.0;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        Rng rng(derive_seed(2024, trial));
        std::vector<std::uint32_t> u(1000), v(1000);
        for (auto& x : u) x = static_cast<std::uint32_t>(rng.below(10));
        for (auto& x : v) x = static_cast<std::uint32_t>(rng.below(10));
        sum += adjusted_mutual_info(std::span<const std::uint32_t>(u), std::span<const std::uint32_t>(v));
        identical_exact &= adjusted_mutual_info(std::span<const std::uint32_t>(u), std::span<const std::uint32_t>(u)) == 1.0;

        std::vector<std::uint32_t> rename(10);
        std::iota(rename.begin(), rename.end(), 0u);
        rng.shuffle(rename.begin(), rename.end());
        std::vector<std::uint32_t> w(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) w[i] = rename[u[i]];
        permuted_worst = std::max(permuted_worst, std::abs(adjusted_mutual_info(std::span<const std::uint32_t>(u),
                                                                                std::span<const std::uint32_t>(w)) -
                                                           1.0));
    }
    const double mean = sum / 100.0;
    out.require(std::abs(mean) <= kAmiChanceBand, "mean random AMI " + fmt("%.4f", mean));
    out.require(identical_exact, "identical labelings not exactly 1");
    out.require(permuted_worst <= kPermutedAmiTol, "permuted labelings off by " + fmt("%.3g", permuted_worst));
    out.note("mean random AMI " + fmt("%.5f", mean) + ", permuted max dev " + fmt("%.2g", permuted_worst));
    return out;
}

// 3 ---------------------------------------------------------------------------

Outcome knn_oracle_equivalence() {
    Outcome out;
    std::size_t mismatches = 0;
    std::size_t queries = 0;
    for (std::uint64_t inst = 0; inst < 20; ++inst) {
        Rng rng(derive_seed(33, inst));
        const auto n_train = 15 + rng.below(486);
        const auto n_query = 1 + rng.below(100);
        const auto dim = 1 + rng.below(32);
        const auto classes = 2 + rng.below(9);
        const bool ties = inst % 2 == 1;
        const auto train = ties ? grid_points(rng, n_train, dim) : random_points(rng, n_train, dim);
        const auto query = ties ? grid_points(rng, n_query, dim) : random_points(rng, n_query, dim);
        std::vector<std::uint32_t> y(n_train);
        for (auto& v : y) v = static_cast<std::uint32_t>(rng.below(classes));
        KnnParams p;
        p.k = 15;
        const auto got = knn_predict(train, anonymous(y, classes), query, p).labels;
        const auto want = oracle::knn_predict(train, y, classes, query, 15);
        for (std::size_t q = 0; q < n_query; ++q) mismatches += got[q] != want[q];
        queries += n_query;
    }
    out.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
    out.note(std::to_string(queries) + " queries over 20 instances, " + std::to_string(mismatches) + " mismatches");
    return out;
}

// 4 ---------------------------------------------------------------------------

Outcome balanced_accuracy() {
    Outcome out;
    Rng rng(44);
    std::vector<std::uint32_t> truth;
    for (std::uint32_t c = 0; c < 11; ++c) truth.insert(truth.end(), 1 + rng.below(30), c);
    bool exact = true;
    for (std::uint32_t c = 0; c < 11; ++c) {
        const std::vector<std::uint32_t> pred(truth.size(), c);
        exact &= balanced_macro_accuracy(confusion(anonymous(truth, 11), anonymous(pred, 11))) == 1.0 / 11.0;
    }
    out.require(exact, "constant predictor is not exactly 1/11");

    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto classes = 2 + rng.below(12);
        std::vector<std::uint32_t> t, p;
        for (std::uint32_t c = 0; c < classes; ++c)
            for (std::size_t i = 0, n = 1 + rng.below(40); i < n; ++i) {
                t.push_back(c);
                p.push_back(static_cast<std::uint32_t>(rng.below(classes)));
            }
        const double base = balanced_macro_accuracy(confusion(anonymous(t, classes), anonymous(p, classes)));
        const auto dup = static_cast<std::uint32_t>(rng.below(classes));
        const auto m = 2 + rng.below(6);
        auto t2 = t;
        auto p2 = p;
        for (std::size_t i = 0; i < t.size(); ++i)
            if (t[i] == dup)
                for (std::size_t r = 1; r < m; ++r) {
                    t2.push_back(t[i]);
                    p2.push_back(p[i]);
                }
        const double again = balanced_macro_accuracy(confusion(anonymous(t2, classes), anonymous(p2, classes)));
        worst = std::max(worst, std::abs(again - base));
    }
    out.require(worst <= kDuplicationTol, "duplication changed the score by " + fmt("%.3g", worst));
    out.note("1/11 exact for all 11 constants, duplication max dev " + fmt("%.2g", worst));
    return out;
}

// 5 ---------------------------------------------------------------------------

Outcome kmeans_checks() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t increases = 0;
    std::size_t iterations = 0;
    for (std::uint64_t run = 0; run < 50; ++run) {
        Rng rng(derive_seed(55, run));
        const auto x = random_points(rng, 50 + rng.below(400), 1 + rng.below(16));
        const auto c = kmeans_single(x, 2 + rng.below(10), rng.next(), 300, 1e-4);
        for (std::size_t i = 1; i < c.inertia_history.size(); ++i) increases += c.inertia_history[i] > c.inertia_history[i - 1];
        iterations += c.inertia_history.size();
    }
    out.require(increases == 0, std::to_string(increases) + " inertia increases");

    double lowest = 1.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const std::vector<std::vector<double>> centres{{0, 0}, {5, 0}, {0, 5}};
        const auto b = testing::make_blobs(centres, 100, 0.1, 500 + seed);
        KMeansParams p;
        p.k = 3;
        p.seed = seed;
        const auto c = kmeans_fit(b.x, p);
        lowest = std::min(lowest, adjusted_mutual_info(std::span<const std::uint32_t>(b.labels),
                                                       std::span<const std::uint32_t>(c.assignments)));
    }
    const double secs = seconds_since(t0);
    out.require(lowest >= kBlobAmi, "blob AMI " + fmt("%.4f", lowest));
    out.require(secs < kKmeansSeconds, "runtime " + fmt("%.1f", secs) + " s");
    out.note(std::to_string(iterations) + " Lloyd steps monotone, min blob AMI " + fmt("%.4f", lowest) + ", " +
             fmt("%.1f", secs) + " s");
    return out;
}

// 6 ---------------------------------------------------------------------------

Outcome umap_stages() {
    Outcome out;
    Rng rng(66);
    const auto x = random_points(rng, 1000, 10);
    const std::size_t k = 15;
    const auto knn = exact_knn_graph(x, k);

    const auto want = oracle::knn_graph(x, k);
    std::size_t graph_diffs = 0;
    for (std::size_t i = 0; i < 1000; ++i)
        for (std::size_t j = 0; j < k; ++j)
            graph_diffs += knn.indices(i, j) != want[i][j].second || knn.distances(i, j) != want[i][j].first;
    out.require(graph_diffs == 0, std::to_string(graph_diffs) + " kNN graph entries differ from the oracle");

    const auto g = fuzzy_simplicial_set(knn);
    std::size_t asym = 0;
    std::size_t out_of_range = 0;
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t e = g.row_ptr[i]; e < g.row_ptr[i + 1]; ++e) {
            const double w = g.weights[e];
            const double back = g.weight(g.cols[e], i);
            asym += std::memcmp(&w, &back, sizeof w) != 0;
            out_of_range += !(w > 0.0 && w <= 1.0);
        }
    out.require(asym == 0, std::to_string(asym) + " asymmetric edges");
    out.require(out_of_range == 0, std::to_string(out_of_range) + " memberships outside (0,1]");

    // Non-degenerate: fewer than log2(k) neighbours sit at distance rho, so the
    // calibration target is reachable.
    double worst_residual = 0.0;
    std::size_t rows_checked = 0;
    const auto check_row = [&](std::span<const double> d) {
        const auto s = smooth_knn_calibrate(d, d.size());
        const auto at_rho = std::count_if(d.begin(), d.end(), [&](double v) { return v <= s.rho; });
        if (static_cast<double>(at_rho) >= std::log2(static_cast<double>(d.size())) - kResidualTol) return;
        double sum = 0.0;
        for (double v : d) sum += std::exp(-std::max(0.0, v - s.rho) / s.sigma);
        worst_residual = std::max(worst_residual, std::abs(sum - std::log2(static_cast<double>(d.size()))));
        ++rows_checked;
    };
    for (std::size_t i = 0; i < 1000; ++i) {
        const auto row = knn.distances.row(i);
        check_row(std::span<const double>(row.data(), row.size()));
    }
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<double> d(2 + rng.below(60));
        for (auto& v : d) v = rng.uniform(0.0, 5.0);
        std::sort(d.begin(), d.end());
        check_row(d);
    }
    out.require(worst_residual <= kResidualTol, "smooth-kNN residual " + fmt("%.3g", worst_residual));

    std::string fits;
    for (double md : {0.0, 0.1, 0.5}) {
        const auto f = fit_ab(md, 1.0);
        out.require(f.rmse <= kFitRmse, "fit_ab(min_dist=" + fmt("%.1f", md) + ") RMSE " + fmt("%.4f", f.rmse));
        fits += (fits.empty() ? "" : " ") + fmt("%.4f", f.rmse);
    }
    out.note("graph N=1000 matches oracle, " + std::to_string(rows_checked) + " rows max residual " +
             fmt("%.2g", worst_residual) + ", fit_ab RMSE " + fits);
    return out;
}

// 7 ---------------------------------------------------------------------------

Outcome umap_structure() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const auto b = testing::make_blobs(testing::three_centres(64), 100, 1.0, 77);
    const auto labels = anonymous(b.labels, 3);

    LayoutParams p2;
    p2.n_components = 2;
    p2.seed = 7;
    const auto y2 = umap(b.x, p2).embedding;
    const auto split = stratified_split(labels, kDefaultSplitRatios, 7);
    const auto train = split.indices(Part::Train);
    const auto test = split.indices(Part::Test);
    std::vector<std::uint32_t> y_train, y_test;
    for (auto i : train) y_train.push_back(b.labels[i]);
    for (auto i : test) y_test.push_back(b.labels[i]);
    KnnParams kp;
    kp.k = 15;
    const auto pred = knn_predict(take_rows(y2, train), anonymous(y_train, 3), take_rows(y2, test), kp);
    const double acc = balanced_macro_accuracy(confusion(anonymous(y_test, 3), pred));
    out.require(acc >= kLayoutAccuracy, "2-d kNN balanced accuracy " + fmt("%.3f", acc));

    LayoutParams p300;
    p300.n_components = 300;
    p300.seed = 7;
    const auto y300 = umap(b.x, p300).embedding;
    out.require(y300.rows() == 300 && y300.cols() == 300,
                "reduced shape " + std::to_string(y300.rows()) + "x" + std::to_string(y300.cols()));
    KMeansParams km;
    km.k = 3;
    km.seed = 7;
    const double ami_orig = adjusted_mutual_info(std::span<const std::uint32_t>(b.labels),
                                                 std::span<const std::uint32_t>(kmeans_fit(b.x, km).assignments));
    const double ami_300 = adjusted_mutual_info(std::span<const std::uint32_t>(b.labels),
                                                std::span<const std::uint32_t>(kmeans_fit(y300, km).assignments));
    out.require(std::abs(ami_300 - ami_orig) <= kReducedAmiBand,
                "AMI original " + fmt("%.4f", ami_orig) + " vs 300-d " + fmt("%.4f", ami_300));
    const double secs = seconds_since(t0);
    out.require(secs < kStructureSeconds, "runtime " + fmt("%.1f", secs) + " s");
    out.note("2-d accuracy " + fmt("%.3f", acc) + ", AMI " + fmt("%.4f", ami_orig) + " -> " + fmt("%.4f", ami_300) +
             ", " + fmt("%.1f", secs) + " s");
    return out;
}

// 8 ---------------------------------------------------------------------------

AnnotationTable random_annotations(Rng& rng) {
    AnnotationTable t;
    const auto n = 1 + rng.below(80);
    const auto files = 1 + rng.below(4);
    for (std::size_t i = 0; i < n; ++i) {
        AnnotationEvent e;
        e.event_id = "e" + std::to_string(i);
        e.file = "f" + std::to_string(rng.below(files));
        // Half-second grid so touching endpoints are frequent.
        e.start_s = 0.5 * static_cast<double>(rng.below(60));
        e.end_s = e.start_s + 0.5 * static_cast<double>(1 + rng.below(4));
        e.label = "s" + std::to_string(rng.below(3));
        t.rows.push_back(e);
    }
    return t;
}

Outcome curation_checks() {
    Outcome out;
    Rng rng(88);
    std::size_t bad = 0;
    std::size_t overlapping_inputs = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto t = random_annotations(rng);
        overlapping_inputs += oracle::has_overlap(t);
        const auto kept = remove_overlaps(t);
        std::vector<std::string> ids;
        for (const auto& e : kept.rows) ids.push_back(e.event_id);
        bad += oracle::has_overlap(kept) || ids != oracle::overlap_free_ids(t);
    }
    out.require(bad == 0, std::to_string(bad) + " tables disagree with the overlap oracle");

    AnnotationTable t;
    for (int i = 0; i < 301; ++i) {
        AnnotationEvent e;
        e.event_id = "t" + std::to_string(i);
        e.file = "x.wav";
        e.start_s = i;
        e.end_s = i + 0.5;
        e.label = i < 150 ? "at150" : "at151";
        t.rows.push_back(e);
    }
    std::set<std::string> labels;
    for (const auto& e : filter_min_annotations(t, 150).rows) labels.insert(e.label);
    out.require(labels == std::set<std::string>{"at151"}, "threshold is not strict");

    const std::vector<std::pair<std::size_t, std::array<std::size_t, 3>>> expected{
        {10, {6, 1, 3}}, {20, {13, 3, 4}}, {151, {98, 22, 31}}};
    std::vector<std::uint32_t> y;
    for (std::uint32_t c = 0; c < expected.size(); ++c) {
        out.require(split_sizes(expected[c].first, kDefaultSplitRatios) == expected[c].second,
                    "split_sizes(" + std::to_string(expected[c].first) + ")");
        y.insert(y.end(), expected[c].first, c);
    }
    const auto split = stratified_split(anonymous(y, 3), kDefaultSplitRatios, 5);
    for (std::uint32_t c = 0; c < expected.size(); ++c) {
        std::array<std::size_t, 3> got{};
        for (std::size_t i = 0; i < y.size(); ++i)
            if (y[i] == c) ++got[static_cast<std::size_t>(split.assignment[i])];
        out.require(got == expected[c].second, "stratified split sizes for class of " + std::to_string(expected[c].first));
    }
    out.note("50 tables (" + std::to_string(overlapping_inputs) + " with overlaps) match the oracle");
    return out;
}

// 9, 10 -----------------------------------------------------------------------

int run(const std::string& cmd) {
    const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(read_text_file(path));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line))
        if (!line.empty()) rows.push_back(split_csv_line(line));
    return rows;
}

Outcome ladder(const std::string& cli, const fs::path& work) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const auto cfg = testing::write_zoo(work / "zoo");
    for (const char* name : {"run1", "run2"}) {
        const int rc = run("\"" + cli + "\" eval --config \"" + cfg.string() + "\" --threads 1 --out \"" +
                           (work / name).string() + "\"");
        out.require(rc == 0, std::string(name) + " exited with " + std::to_string(rc));
    }
    if (!out.pass) return out;
    const auto first = read_text_file(work / "run1" / "report.json");
    out.require(first == read_text_file(work / "run2" / "report.json"), "report.json differs between runs");

    const auto j = nlohmann::json::parse(first);
    std::map<std::string, std::map<std::string, std::pair<double, double>>> score;
    for (const auto& m : j.at("models"))
        for (const auto& r : m.at("results"))
            score[r.at("space").get<std::string>()][m.at("name").get<std::string>()] = {
                r.at("ami").get<double>(), r.at("balanced_macro_accuracy").get<double>()};
    std::string summary;
    for (const char* space : {"original", "umap300"}) {
        const auto& s = score[space];
        if (s.size() != 3 || !s.contains("clean") || !s.contains("noisy") || !s.contains("shuffled")) {
            out.require(false, std::string("missing results for ") + space);
            continue;
        }
        const auto& c = s.at("clean");
        const auto& n = s.at("noisy");
        const auto& h = s.at("shuffled");
        out.require(c.first > n.first && n.first > h.first, std::string("AMI not strictly ordered in ") + space);
        out.require(c.second > n.second && n.second > h.second,
                    std::string("accuracy not strictly ordered in ") + space);
        summary += std::string(summary.empty() ? "" : ", ") + space + " AMI " + fmt("%.3f", c.first) + " > " +
                   fmt("%.3f", n.first) + " > " + fmt("%.3f", h.first) + " acc " + fmt("%.3f", c.second) + " > " +
                   fmt("%.3f", n.second) + " > " + fmt("%.3f", h.second);
    }
    const double secs = seconds_since(t0);
    out.require(secs < kLadderSeconds, "runtime " + fmt("%.1f", secs) + " s");
    out.note(summary + ", identical reports, " + fmt("%.1f", secs) + " s");
    return out;
}

double cell_value(const std::string& s) { return s.empty() ? std::nan("") : std::stod(s); }

Outcome report_fidelity(const fs::path& work) {
    Outcome out;
    const auto dir = work / "run1";
    if (!fs::exists(dir / "per_model.csv")) {
        out.require(false, "no evaluation output to check");
        return out;
    }
    // model,abbrev,training,bird_trained,space,ami,balanced_macro_accuracy
    const auto per_model = read_csv(dir / "per_model.csv");
    const auto member = [](const std::vector<std::string>& row, const std::string& category) {
        if (category == "supl") return row[2] == "supl";
        if (category == "ssl") return row[2] == "ssl" || row[2] == "ssl+ft";
        if (category == "bird") return row[3] == "true";
        if (category == "non-bird") return row[3] == "false";
        return false;
    };
    double worst = 0.0;
    std::size_t rows_checked = 0;
    // category,members,classification_original,classification_umap,clustering_original,clustering_umap
    for (const auto& row : read_csv(dir / "category_table.csv")) {
        const std::pair<const char*, bool> columns[] = {
            {"original", false}, {"umap300", false}, {"original", true}, {"umap300", true}};
        std::set<std::string> members;
        for (std::size_t c = 0; c < 4; ++c) {
            double sum = 0.0;
            std::size_t count = 0;
            for (const auto& m : per_model) {
                if (!member(m, row[0]) || m[4] != columns[c].first) continue;
                sum += std::stod(columns[c].second ? m[5] : m[6]);
                ++count;
                members.insert(m[0]);
            }
            const double stored = cell_value(row[2 + c]);
            if (count == 0) {
                out.require(std::isnan(stored), "category " + row[0] + " has a value without members");
                continue;
            }
            worst = std::max(worst, std::abs(stored - sum / static_cast<double>(count)));
        }
        std::set<std::string> listed;
        std::istringstream m(row[1]);
        for (std::string name; std::getline(m, name, ';');) listed.insert(name);
        out.require(listed == members, "members of " + row[0] + " differ");
        ++rows_checked;
    }
    out.require(rows_checked > 0, "empty category table");
    out.require(worst <= kMeanTol, "category mean off by " + fmt("%.3g", worst));

    // Panel titles in document order against the original-space AMI ranking.
    std::vector<std::pair<double, std::string>> ranking;
    for (const auto& m : per_model)
        if (m[4] == "original") ranking.emplace_back(std::stod(m[5]), m[0]);
    std::sort(ranking.begin(), ranking.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    const auto svg = read_text_file(dir / "gallery.svg");
    std::vector<std::string> titles;
    const std::string marker = "<g class=\"panel\">\n<text ";
    for (auto pos = svg.find(marker); pos != std::string::npos; pos = svg.find(marker, pos + 1)) {
        const auto open = svg.find('>', pos + marker.size()) + 1;
        titles.push_back(svg.substr(open, svg.find("</text>", open) - open));
    }
    bool ordered = titles.size() == ranking.size();
    double previous = INFINITY;
    for (std::size_t i = 0; ordered && i < titles.size(); ++i) {
        const auto space = titles[i].rfind(' ');
        ordered = titles[i].substr(0, space) == ranking[i].second;
        const double shown = std::stod(titles[i].substr(space + 1));
        ordered &= shown <= previous;
        previous = shown;
    }
    out.require(ordered, "gallery panels are not in descending AMI order");
    out.note(std::to_string(rows_checked) + " category rows, max mean diff " + fmt("%.2g", worst) + ", " +
             std::to_string(titles.size()) + " panels in order");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::fprintf(stderr, "usage: %s <embeval cli> <work dir>\n", argv[0]);
        return 2;
    }
    const std::string cli = argv[1];
    const fs::path work = argv[2];
    fs::remove_all(work);
    fs::create_directories(work);

    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"AMI oracle equivalence", ami_oracle_equivalence},
        {"AMI calibration", ami_calibration},
        {"kNN oracle equivalence", knn_oracle_equivalence},
        {"balanced macro accuracy", balanced_accuracy},
        {"K-Means", kmeans_checks},
        {"UMAP stage checks", umap_stages},
        {"UMAP structure preservation", umap_structure},
        {"curation", curation_checks},
        {"end-to-end monotone ladder", [&] { return ladder(cli, work); }},
        {"report fidelity", [&] { return report_fidelity(work); }},
    };
    int failed = 0;
    int index = 0;
    for (const auto& [name, check] : criteria) {
        ++index;
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        failed += !o.pass;
        std::printf("%-4s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of 10 criteria passed\n", 10 - failed);
    return failed == 0 ? 0 : 1;
}
