#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "embeval/error.hpp"
#include "embeval/rng.hpp"
#include "embeval/umap.hpp"

namespace embeval {

namespace {

// Stream tags below a LayoutParams / initialize_layout seed.
constexpr std::uint64_t kJitterStream = 1;
constexpr std::uint64_t kRandomInitStream = 2;
constexpr std::uint64_t kSubspaceStream = 3;
constexpr std::uint64_t kNegativeSampleStream = 4;

constexpr double kGradientClip = 4.0;
constexpr double kInitExtent = 10.0;
constexpr double kJitterScale = 1e-4;

double target_curve(double x, double min_dist, double spread) {
    return x <= min_dist ? 1.0 : std::exp(-(x - min_dist) / spread);
}

std::vector<double> curve_grid(double spread) {
    std::vector<double> xs(kCurveSamples);
    const double hi = 3.0 * spread;
    for (std::size_t i = 0; i < kCurveSamples; ++i) {
        xs[i] = hi * static_cast<double>(i) / static_cast<double>(kCurveSamples - 1);
    }
    return xs;
}

double sum_squares(double a, double b, const std::vector<double>& xs, const std::vector<double>& ys) {
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = 1.0 / (1.0 + a * std::pow(xs[i], 2.0 * b)) - ys[i];
        s += r * r;
    }
    return s;
}

MatrixF random_layout(std::size_t n, std::size_t dims, std::uint64_t seed) {
    Rng rng(derive_seed(seed, kRandomInitStream));
    MatrixF out(n, dims);
    for (auto& v : out.values()) v = static_cast<float>(rng.uniform(-kInitExtent, kInitExtent));
    return out;
}

void normalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
}

/// Eigenvectors of the normalised Laplacian for the `dims` smallest
/// eigenvalues after the trivial one, as columns.
bool spectral_vectors(const FuzzyGraph& g, std::size_t dims, std::uint64_t seed, Eigen::MatrixXd& out,
                      std::string& note) {
    const auto n = static_cast<Eigen::Index>(g.n);
    Eigen::VectorXd dinv(n);
    Eigen::VectorXd u(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = g.degree(static_cast<std::size_t>(i));
        dinv(i) = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
        u(i) = std::sqrt(d);
    }
    if (u.norm() == 0.0) {
        note = "graph has no edges";
        return false;
    }
    u.normalize();

    if (g.n <= kDenseSpectralLimit) {
        // L + 3 u u^T moves the trivial eigenvalue 0 above the spectrum (<= 2).
        Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(n, n);
        for (std::size_t i = 0; i < g.n; ++i) {
            for (std::size_t e = g.row_ptr[i]; e < g.row_ptr[i + 1]; ++e) {
                const auto j = g.cols[e];
                lap(static_cast<Eigen::Index>(i), j) -= g.weights[e] * dinv(static_cast<Eigen::Index>(i)) * dinv(j);
            }
        }
        lap.noalias() += 3.0 * u * u.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
        if (solver.info() != Eigen::Success) {
            note = "dense eigensolver did not converge";
            return false;
        }
        out = solver.eigenvectors().leftCols(static_cast<Eigen::Index>(dims));
    } else {
        // Subspace iteration on M = (I + D^-1/2 W D^-1/2) / 2 - u u^T, whose
        // top eigenvectors are the wanted Laplacian ones.
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(g.nnz());
        for (std::size_t i = 0; i < g.n; ++i) {
            for (std::size_t e = g.row_ptr[i]; e < g.row_ptr[i + 1]; ++e) {
                const auto r = static_cast<Eigen::Index>(i);
                const auto c = static_cast<Eigen::Index>(g.cols[e]);
                trip.emplace_back(r, c, g.weights[e] * dinv(r) * dinv(c));
            }
        }
        Eigen::SparseMatrix<double> a(n, n);
        a.setFromTriplets(trip.begin(), trip.end());
        const auto apply = [&](const Eigen::MatrixXd& q) -> Eigen::MatrixXd {
            Eigen::MatrixXd y = 0.5 * (q + a * q);
            y.noalias() -= u * (u.transpose() * q);
            return y;
        };

        const auto block = static_cast<Eigen::Index>(std::min<std::size_t>(dims + 6, g.n - 1));
        Rng rng(derive_seed(seed, kSubspaceStream));
        Eigen::MatrixXd q(n, block);
        for (Eigen::Index c = 0; c < block; ++c) {
            for (Eigen::Index r = 0; r < n; ++r) q(r, c) = rng.normal();
        }
        constexpr int kMaxIterations = 5000;
        constexpr double kResidualTol = 1e-6;
        bool converged = false;
        for (int it = 1; it <= kMaxIterations && !converged; ++it) {
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(apply(q));
            q = qr.householderQ() * Eigen::MatrixXd::Identity(n, block);
            if (it % 10 != 0) continue;
            const Eigen::MatrixXd mq = apply(q);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(q.transpose() * mq);
            // Ascending eigenvalues: the wanted vectors are the last `dims`.
            const Eigen::MatrixXd ritz = q * small.eigenvectors().rightCols(static_cast<Eigen::Index>(dims));
            const Eigen::VectorXd theta = small.eigenvalues().tail(static_cast<Eigen::Index>(dims));
            const Eigen::MatrixXd resid = apply(ritz) - ritz * theta.asDiagonal();
            double worst = 0.0;
            for (Eigen::Index c = 0; c < resid.cols(); ++c) worst = std::max(worst, resid.col(c).norm());
            if (worst < kResidualTol) {
                out = ritz.rowwise().reverse();
                converged = true;
            }
        }
        if (!converged) {
            note = "subspace iteration did not converge";
            return false;
        }
    }
    for (Eigen::Index c = 0; c < out.cols(); ++c) normalize_sign(out.col(c));
    return true;
}

}  // namespace

double curve_rmse(double a, double b, double min_dist, double spread) {
    const auto xs = curve_grid(spread);
    std::vector<double> ys(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = target_curve(xs[i], min_dist, spread);
    return std::sqrt(sum_squares(a, b, xs, ys) / static_cast<double>(xs.size()));
}

CurveParams fit_ab(double min_dist, double spread) {
    if (!(spread > 0.0) || !(min_dist >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "fit_ab needs spread > 0 and min_dist >= 0");
    }
    const auto xs = curve_grid(spread);
    std::vector<double> ys(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = target_curve(xs[i], min_dist, spread);

    // Levenberg-Marquardt from (1, 1).
    double a = 1.0;
    double b = 1.0;
    double sse = sum_squares(a, b, xs, ys);
    const double initial_sse = sse;
    double lambda = 1e-3;
    for (int it = 0; it < 500; ++it) {
        double jtj00 = 0.0, jtj01 = 0.0, jtj11 = 0.0, jtr0 = 0.0, jtr1 = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double x = xs[i];
            const double p = x > 0.0 ? std::pow(x, 2.0 * b) : 0.0;
            const double den = 1.0 + a * p;
            const double f = 1.0 / den;
            const double r = f - ys[i];
            const double da = -p / (den * den);
            const double db = x > 0.0 ? -a * p * 2.0 * std::log(x) / (den * den) : 0.0;
            jtj00 += da * da;
            jtj01 += da * db;
            jtj11 += db * db;
            jtr0 += da * r;
            jtr1 += db * r;
        }
        bool accepted = false;
        while (lambda < 1e12) {
            const double m00 = jtj00 * (1.0 + lambda);
            const double m11 = jtj11 * (1.0 + lambda);
            const double det = m00 * m11 - jtj01 * jtj01;
            if (det != 0.0) {
                const double step_a = -(m11 * jtr0 - jtj01 * jtr1) / det;
                const double step_b = -(m00 * jtr1 - jtj01 * jtr0) / det;
                const double na = a + step_a;
                const double nb = b + step_b;
                if (na > 0.0 && nb > 0.0) {
                    const double next = sum_squares(na, nb, xs, ys);
                    if (next < sse) {
                        const double gain = sse - next;
                        a = na;
                        b = nb;
                        sse = next;
                        lambda = std::max(lambda / 10.0, 1e-12);
                        accepted = true;
                        if (gain <= 1e-15 * sse) it = 500;
                        break;
                    }
                }
            }
            lambda *= 10.0;
        }
        if (!accepted) break;
    }
    if (!std::isfinite(sse) || !(a > 0.0) || !(b > 0.0) || !(sse < initial_sse || initial_sse == 0.0)) {
        throw Error(ErrorCode::FitDiverged, "curve fit failed for min_dist=" + std::to_string(min_dist) +
                                                ", spread=" + std::to_string(spread));
    }
    return {a, b, std::sqrt(sse / static_cast<double>(xs.size()))};
}

std::size_t LayoutParams::epochs_for(std::size_t n) const noexcept {
    if (n_epochs) return *n_epochs;
    return n <= 10000 ? 500 : 200;
}

std::string_view to_string(InitMethod m) noexcept {
    switch (m) {
        case InitMethod::Spectral: return "spectral";
        case InitMethod::Random: return "random";
        case InitMethod::RandomFallback: return "random-fallback";
    }
    return "?";
}

LayoutInit initialize_layout(const FuzzyGraph& graph, std::size_t n_components, std::uint64_t seed) {
    LayoutInit init;
    if (n_components == 0) throw Error(ErrorCode::InvalidArgument, "n_components must be positive");
    if (n_components > kMaxSpectralComponents) {
        init.coords = random_layout(graph.n, n_components, seed);
        init.method = InitMethod::Random;
        return init;
    }
    if (graph.n < n_components + 2) {
        init.coords = random_layout(graph.n, n_components, seed);
        init.method = InitMethod::RandomFallback;
        init.note = "SpectralFailure: too few points for a spectral layout";
        return init;
    }

    Eigen::MatrixXd vecs;
    std::string why;
    if (!spectral_vectors(graph, n_components, seed, vecs, why)) {
        init.coords = random_layout(graph.n, n_components, seed);
        init.method = InitMethod::RandomFallback;
        init.note = "SpectralFailure: " + why;
        return init;
    }
    const double extent = vecs.cwiseAbs().maxCoeff();
    const double scale = extent > 0.0 ? kInitExtent / extent : 1.0;
    Rng rng(derive_seed(seed, kJitterStream));
    init.coords = MatrixF(graph.n, n_components);
    for (std::size_t i = 0; i < graph.n; ++i) {
        for (std::size_t c = 0; c < n_components; ++c) {
            const double v = vecs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) * scale;
            init.coords(i, c) = static_cast<float>(v + kJitterScale * rng.normal());
        }
    }
    init.method = InitMethod::Spectral;
    return init;
}

FuzzyGraph prune_weak_edges(const FuzzyGraph& graph, std::size_t n_epochs) {
    if (graph.nnz() == 0 || n_epochs == 0) return graph;
    const double w_max = *std::max_element(graph.weights.begin(), graph.weights.end());
    const double cutoff = w_max / static_cast<double>(n_epochs);
    FuzzyGraph out = graph;
    out.cols.clear();
    out.weights.clear();
    out.row_ptr.assign(graph.n + 1, 0);
    for (std::size_t i = 0; i < graph.n; ++i) {
        for (std::size_t e = graph.row_ptr[i]; e < graph.row_ptr[i + 1]; ++e) {
            if (graph.weights[e] < cutoff) continue;
            out.cols.push_back(graph.cols[e]);
            out.weights.push_back(graph.weights[e]);
        }
        out.row_ptr[i + 1] = out.cols.size();
    }
    return out;
}

void rescale_columns(MatrixF& coords, double extent) {
    for (std::size_t c = 0; c < coords.cols(); ++c) {
        float lo = std::numeric_limits<float>::infinity();
        float hi = -std::numeric_limits<float>::infinity();
        for (std::size_t r = 0; r < coords.rows(); ++r) {
            lo = std::min(lo, coords(r, c));
            hi = std::max(hi, coords(r, c));
        }
        const double span = static_cast<double>(hi) - lo;
        for (std::size_t r = 0; r < coords.rows(); ++r) {
            coords(r, c) = span > 0.0 ? static_cast<float>(extent * (coords(r, c) - lo) / span) : 0.0f;
        }
    }
}

MatrixF optimize_layout(const FuzzyGraph& graph, MatrixF emb, const LayoutParams& params) {
    const std::size_t n = graph.n;
    const std::size_t dims = emb.cols();
    if (emb.rows() != n) throw Error(ErrorCode::DimMismatch, "initial layout has the wrong number of rows");
    if (graph.nnz() == 0 || n == 0) return emb;

    double a = 0.0, b = 0.0;
    if (params.a && params.b) {
        a = *params.a;
        b = *params.b;
    } else {
        const auto fit = fit_ab(params.min_dist, params.spread);
        a = fit.a;
        b = fit.b;
    }
    if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::InvalidArgument, "curve parameters must be positive");
    const std::size_t n_epochs = params.epochs_for(n);
    if (n_epochs == 0) throw Error(ErrorCode::InvalidArgument, "n_epochs must be >= 1");

    const std::size_t m = graph.nnz();
    std::vector<std::uint32_t> head(m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t e = graph.row_ptr[i]; e < graph.row_ptr[i + 1]; ++e) head[e] = static_cast<std::uint32_t>(i);
    }
    const double w_max = *std::max_element(graph.weights.begin(), graph.weights.end());
    std::vector<double> per_sample(m), per_negative(m), next_sample(m), next_negative(m);
    for (std::size_t e = 0; e < m; ++e) {
        per_sample[e] = w_max / graph.weights[e];
        per_negative[e] = per_sample[e] / params.negative_sample_rate;
        next_sample[e] = per_sample[e];
        next_negative[e] = per_negative[e];
    }

    const auto clip = [](double g) { return std::clamp(g, -kGradientClip, kGradientClip); };
    Rng rng(derive_seed(params.seed, kNegativeSampleStream));
    const double gamma = params.repulsion_strength;

    for (std::size_t epoch = 0; epoch < n_epochs; ++epoch) {
        const double now = static_cast<double>(epoch);
        const double alpha =
            params.learning_rate * (1.0 - static_cast<double>(epoch) / static_cast<double>(n_epochs));
        for (std::size_t e = 0; e < m; ++e) {
            if (next_sample[e] > now) continue;
            const std::uint32_t j = head[e];
            const std::uint32_t k = graph.cols[e];
            auto cur = emb.row(j);
            auto oth = emb.row(k);

            const double d2 = squared_distance(std::span<const float>(cur), std::span<const float>(oth));
            const double attract = d2 > 0.0 ? (-2.0 * a * b * std::pow(d2, b - 1.0)) / (a * std::pow(d2, b) + 1.0)
                                            : 0.0;
            for (std::size_t d = 0; d < dims; ++d) {
                const double g = clip(attract * (static_cast<double>(cur[d]) - oth[d]));
                cur[d] = static_cast<float>(cur[d] + g * alpha);
                oth[d] = static_cast<float>(oth[d] - g * alpha);
            }
            next_sample[e] += per_sample[e];

            const auto n_neg = static_cast<long long>((now - next_negative[e]) / per_negative[e]);
            for (long long p = 0; p < n_neg; ++p) {
                const auto r = static_cast<std::uint32_t>(rng.below(n));
                if (r == j) continue;
                const auto other = emb.row(r);
                const double nd2 = squared_distance(std::span<const float>(cur), std::span<const float>(other));
                const double repel =
                    nd2 > 0.0 ? (2.0 * gamma * b) / ((0.001 + nd2) * (a * std::pow(nd2, b) + 1.0)) : 0.0;
                for (std::size_t d = 0; d < dims; ++d) {
                    const double g =
                        repel > 0.0 ? clip(repel * (static_cast<double>(cur[d]) - other[d])) : kGradientClip;
                    cur[d] = static_cast<float>(cur[d] + g * alpha);
                }
            }
            next_negative[e] += static_cast<double>(n_neg) * per_negative[e];
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (float v : emb.row(i)) {
                if (!std::isfinite(v)) {
                    throw Error(ErrorCode::NonFiniteCoordinate,
                                "epoch " + std::to_string(epoch) + ", point " + std::to_string(i), i);
                }
            }
        }
    }
    return emb;
}

}  // namespace embeval
