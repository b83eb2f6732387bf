#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "spanemb/graph.hpp"

namespace spanemb {

enum class SpectralMethod { Dense, Iterative };

struct SpectralReport {
    std::size_t n = 0;
    double d = 0;             // average degree
    bool regular = true;
    double lambda_hat = 0;    // max(|lambda_2|, |lambda_n|)
    double lambda_top = 0;
    double lambda_2 = 0;
    double lambda_min = 0;
    SpectralMethod method = SpectralMethod::Dense;
    double residual_tol = 1e-6;
    double residual = 0;
    bool disconnected = false;  // lambda_2 equals the top eigenvalue
    bool bipartite = false;     // lambda_min equals minus the top eigenvalue
};

struct SpectralOptions {
    std::size_t dense_cutoff = 2000;
    std::size_t max_iterations = 600;
    std::uint64_t seed = 1;
};

namespace detail {

inline Eigen::VectorXd adjacency_times(const Graph& g, const Eigen::VectorXd& x) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(x.size());
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        double s = 0;
        for (Vertex w : g.neighbors(v)) s += x[w];
        y[v] = s;
    }
    return y;
}

struct LanczosResult {
    double top = 0, bottom = 0;
    double top_residual = 0, bottom_residual = 0;
    Eigen::VectorXd top_vector;
};

// Extreme eigenpairs of the adjacency operator restricted to the orthogonal
// complement of the columns of `deflate` (assumed orthonormal).
inline LanczosResult lanczos(const Graph& g, const Eigen::MatrixXd& deflate, double tol, std::size_t max_iter,
                             std::uint64_t seed) {
    const Eigen::Index n = static_cast<Eigen::Index>(g.vertex_count());
    const Eigen::Index room = n - deflate.cols();
    if (room <= 0) return {};
    Rng rng(seed);
    auto project = [&](Eigen::VectorXd& x) {
        if (deflate.cols() > 0) x -= deflate * (deflate.transpose() * x);
    };
    Eigen::VectorXd q(n);
    for (Eigen::Index i = 0; i < n; ++i) q[i] = uniform_unit(rng) - 0.5;
    project(q);
    q.normalize();

    const Eigen::Index cap = std::min<Eigen::Index>(room, static_cast<Eigen::Index>(max_iter));
    Eigen::MatrixXd basis(n, cap);
    std::vector<double> alpha, beta;
    LanczosResult best;
    best.top_residual = best.bottom_residual = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < cap; ++j) {
        basis.col(j) = q;
        Eigen::VectorXd w = adjacency_times(g, q);
        alpha.push_back(q.dot(w));
        project(w);
        for (int pass = 0; pass < 2; ++pass) w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
        const double b = w.norm();
        const bool exhausted = b < 1e-12 || j + 1 == cap;
        if ((j + 1) % 8 == 0 || exhausted) {
            const Eigen::Index m = j + 1;
            Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
            for (Eigen::Index i = 0; i < m; ++i) {
                t(i, i) = alpha[i];
                if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
            const auto& ev = es.eigenvalues();
            const auto& vec = es.eigenvectors();
            LanczosResult r;
            r.bottom = ev[0];
            r.top = ev[m - 1];
            r.bottom_residual = exhausted && b < 1e-12 ? 0 : std::abs(b * vec(m - 1, 0));
            r.top_residual = exhausted && b < 1e-12 ? 0 : std::abs(b * vec(m - 1, m - 1));
            r.top_vector = basis.leftCols(m) * vec.col(m - 1);
            best = r;
            if ((r.top_residual <= tol && r.bottom_residual <= tol) || exhausted) return best;
        }
        beta.push_back(b);
        q = w / b;
    }
    return best;
}

}  // namespace detail

inline SpectralReport second_eigenvalue(const Graph& g, double tol = 1e-6, const SpectralOptions& opt = {}) {
    SpectralReport r;
    r.n = g.vertex_count();
    r.residual_tol = tol;
    r.regular = g.is_regular();
    r.d = r.n == 0 ? 0.0 : 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(r.n);
    if (r.n <= 1) return r;
    const Eigen::Index n = static_cast<Eigen::Index>(r.n);

    if (r.n <= opt.dense_cutoff) {
        r.method = SpectralMethod::Dense;
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
        for (Vertex v = 0; v < r.n; ++v)
            for (Vertex w : g.neighbors(v)) a(v, w) = 1.0;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        r.lambda_top = ev[n - 1];
        r.lambda_2 = ev[n - 2];
        r.lambda_min = ev[0];
    } else {
        r.method = SpectralMethod::Iterative;
        Eigen::MatrixXd top(n, 1);
        if (r.regular) {
            top.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
            r.lambda_top = static_cast<double>(g.degree(0));
        } else {
            auto first = detail::lanczos(g, Eigen::MatrixXd(n, 0), tol, opt.max_iterations, opt.seed);
            if (first.top_residual > tol) throw NonConvergence("top eigenvector did not converge", first.top_residual);
            top.col(0) = first.top_vector.normalized();
            r.lambda_top = first.top;
        }
        auto rest = detail::lanczos(g, top, tol, opt.max_iterations, derive_seed(opt.seed, 1));
        r.residual = std::max(rest.top_residual, rest.bottom_residual);
        if (r.residual > tol) throw NonConvergence("second eigenvalue did not converge", r.residual);
        r.lambda_2 = rest.top;
        r.lambda_min = std::min(rest.bottom, r.lambda_top);
    }
    r.lambda_hat = std::max(std::abs(r.lambda_2), std::abs(r.lambda_min));
    r.disconnected = r.lambda_2 >= r.lambda_top - 1e-8;
    r.bipartite = r.lambda_min <= -r.lambda_top + 1e-8;
    return r;
}

// lambda_hat >= sqrt(d(n-d)/(n-1)) for d-regular graphs.
inline double spectral_lower_bound(const SpectralReport& r) {
    if (r.n <= 1) return 0;
    const double n = static_cast<double>(r.n);
    return std::sqrt(std::max(0.0, r.d * (n - r.d) / (n - 1)));
}

inline bool check_lower_bound(const SpectralReport& r, double tol = 1e-9) {
    return r.lambda_hat >= spectral_lower_bound(r) - tol;
}

struct MixingViolation {
    std::size_t a_size, b_size;
    double edges, expected, allowance;
};

struct MixingAudit {
    std::size_t samples = 0;
    std::size_t violations = 0;
    double max_normalized_deviation = 0;  // |e(A,B) - d|A||B|/n| / sqrt(|A||B|)
    std::vector<MixingViolation> examples;
};

namespace detail {

// Random subset of [0, n) of uniform size in [1, n], biased half the time toward small sets.
inline std::vector<char> random_subset(std::size_t n, Rng& rng, std::size_t* size_out) {
    std::size_t s = uniform_below(rng, 2) == 0 ? 1 + uniform_below(rng, n) : 1 + uniform_below(rng, std::min<std::size_t>(n, 20));
    std::vector<Vertex> all(n);
    for (Vertex i = 0; i < n; ++i) all[i] = i;
    std::vector<char> in(n, 0);
    for (std::size_t i = 0; i < s; ++i) {
        std::size_t j = i + uniform_below(rng, n - i);
        std::swap(all[i], all[j]);
        in[all[i]] = 1;
    }
    *size_out = s;
    return in;
}

inline double edges_between(const Graph& g, const std::vector<char>& a, const std::vector<char>& b) {
    double e = 0;
    for (Vertex v = 0; v < g.vertex_count(); ++v)
        if (a[v])
            for (Vertex w : g.neighbors(v)) e += b[w];
    return e;
}

}  // namespace detail

inline MixingAudit mixing_audit(const Graph& g, double lambda_hat, std::size_t samples, std::uint64_t seed,
                                double tol = 1e-9) {
    MixingAudit audit;
    const std::size_t n = g.vertex_count();
    if (n == 0) return audit;
    const double d = 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(n);
    Rng rng(seed);
    for (std::size_t s = 0; s < samples; ++s) {
        std::size_t sa, sb;
        auto a = detail::random_subset(n, rng, &sa);
        auto b = detail::random_subset(n, rng, &sb);
        const double e = detail::edges_between(g, a, b);
        const double expected = d * static_cast<double>(sa) * static_cast<double>(sb) / static_cast<double>(n);
        const double root = std::sqrt(static_cast<double>(sa) * static_cast<double>(sb));
        const double dev = std::abs(e - expected);
        ++audit.samples;
        audit.max_normalized_deviation = std::max(audit.max_normalized_deviation, dev / root);
        if (!(dev < lambda_hat * root + tol)) {
            ++audit.violations;
            if (audit.examples.size() < 8) audit.examples.push_back({sa, sb, e, expected, lambda_hat * root});
        }
    }
    return audit;
}

class JoinednessCounterexample : public Error {
public:
    JoinednessCounterexample(std::vector<Vertex> a, std::vector<Vertex> b)
        : Error("found two disjoint sets of size " + std::to_string(a.size()) + " with no edge between them"),
          a_(std::move(a)), b_(std::move(b)) {}
    const std::vector<Vertex>& a() const { return a_; }
    const std::vector<Vertex>& b() const { return b_; }

private:
    std::vector<Vertex> a_, b_;
};

// m = ceil(lambda_hat * n / d), falsification-tested on random disjoint m-set pairs.
inline std::size_t joined_bound(const Graph& g, const SpectralReport& r, std::size_t samples = 1000,
                                std::uint64_t seed = 1) {
    const std::size_t n = g.vertex_count();
    if (r.d <= 0) throw PreconditionError("joinedness needs a graph with edges");
    const std::size_t m = static_cast<std::size_t>(std::ceil(r.lambda_hat * static_cast<double>(n) / r.d - 1e-12));
    if (m == 0 || 2 * m > n) return m;
    Rng rng(seed);
    std::vector<Vertex> all(n);
    for (Vertex i = 0; i < n; ++i) all[i] = i;
    std::vector<char> in_b(n, 0);
    for (std::size_t s = 0; s < samples; ++s) {
        for (std::size_t i = 0; i < 2 * m; ++i) std::swap(all[i], all[i + uniform_below(rng, n - i)]);
        std::fill(in_b.begin(), in_b.end(), 0);
        for (std::size_t i = m; i < 2 * m; ++i) in_b[all[i]] = 1;
        bool joined = false;
        for (std::size_t i = 0; i < m && !joined; ++i)
            for (Vertex w : g.neighbors(all[i]))
                if (in_b[w]) {
                    joined = true;
                    break;
                }
        if (!joined) {
            std::vector<Vertex> a(all.begin(), all.begin() + m), b(all.begin() + m, all.begin() + 2 * m);
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            throw JoinednessCounterexample(std::move(a), std::move(b));
        }
    }
    return m;
}

struct ExpansionAudit {
    bool ok = true;
    std::size_t samples = 0;
    std::vector<Vertex> witness;
};

// Samples S within x_set, |S| <= max_set, and checks |N(S) ∩ y_set| >= d_factor |S|.
inline ExpansionAudit expansion_audit(const Graph& g, std::span<const Vertex> x_set, std::span<const Vertex> y_set,
                                      double min_deg_into_y, std::size_t d_factor, std::size_t max_set,
                                      std::size_t sample_budget, std::uint64_t seed) {
    const std::size_t n = g.vertex_count();
    std::vector<char> in_y(n, 0);
    for (Vertex y : y_set) in_y[y] = 1;
    for (Vertex x : x_set) {
        std::size_t c = 0;
        for (Vertex w : g.neighbors(x)) c += in_y[w];
        if (static_cast<double>(c) < min_deg_into_y)
            throw PreconditionError("vertex " + std::to_string(x) + " has only " + std::to_string(c) +
                                    " neighbours in the target set");
    }
    ExpansionAudit audit;
    if (x_set.empty() || max_set == 0) return audit;
    Rng rng(seed);
    std::vector<Vertex> pool(x_set.begin(), x_set.end());
    std::vector<std::uint32_t> mark(n, 0);
    std::uint32_t stamp = 0;
    for (std::size_t s = 0; s < sample_budget; ++s) {
        const std::size_t size = 1 + uniform_below(rng, std::min(max_set, pool.size()));
        for (std::size_t i = 0; i < size; ++i) std::swap(pool[i], pool[i + uniform_below(rng, pool.size() - i)]);
        ++stamp;
        std::size_t reach = 0;
        for (std::size_t i = 0; i < size; ++i)
            for (Vertex w : g.neighbors(pool[i]))
                if (in_y[w] && mark[w] != stamp) {
                    mark[w] = stamp;
                    ++reach;
                }
        ++audit.samples;
        if (reach < d_factor * size) {
            audit.ok = false;
            audit.witness.assign(pool.begin(), pool.begin() + size);
            std::sort(audit.witness.begin(), audit.witness.end());
            return audit;
        }
    }
    return audit;
}

}  // namespace spanemb
