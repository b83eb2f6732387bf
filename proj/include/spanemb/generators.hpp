#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "spanemb/graph.hpp"

namespace spanemb {

// Random d-regular simple graph: points are paired one random pair at a time and
// pairs that would create a loop or a repeated edge are redrawn; a stuck
// configuration restarts from scratch.
inline Graph generate_random_regular(std::size_t n, std::size_t d, std::uint64_t seed,
                                     std::size_t restart_cap = 1000) {
    if (d >= n) throw PreconditionError("degree must be below the vertex count");
    if ((n * d) % 2 != 0) throw PreconditionError("n*d must be even");
    Rng rng(seed);
    std::vector<std::vector<Vertex>> adj(n);
    std::vector<Vertex> points;
    for (std::size_t attempt = 0; attempt < restart_cap; ++attempt) {
        for (auto& a : adj) a.clear();
        points.clear();
        for (Vertex v = 0; v < n; ++v)
            for (std::size_t c = 0; c < d; ++c) points.push_back(v);
        std::size_t misses = 0;
        bool stuck = false;
        while (!points.empty()) {
            const std::size_t i = uniform_below(rng, points.size());
            std::size_t j = uniform_below(rng, points.size() - 1);
            if (j >= i) ++j;
            const Vertex u = points[i], v = points[j];
            if (u == v || std::find(adj[u].begin(), adj[u].end(), v) != adj[u].end()) {
                if (++misses > 64 + 8 * points.size()) {
                    stuck = true;
                    break;
                }
                continue;
            }
            misses = 0;
            adj[u].push_back(v);
            adj[v].push_back(u);
            const std::size_t hi = std::max(i, j), lo = std::min(i, j);
            std::swap(points[hi], points.back());
            points.pop_back();
            std::swap(points[lo], points.back());
            points.pop_back();
        }
        if (stuck) continue;
        std::vector<Edge> edges;
        for (Vertex u = 0; u < n; ++u)
            for (Vertex v : adj[u])
                if (u < v) edges.emplace_back(u, v);
        Graph g = Graph::from_edges(n, edges);
        if (g.min_degree() != d || g.max_degree() != d) throw Error("regular generator produced an irregular graph");
        return g;
    }
    throw StepFailure("generate-host", "restart cap exceeded");
}

enum class TreeKind { Path, Caterpillar, Broom, RandomBounded, Spider };

struct TreeOptions {
    std::size_t spacing = 3;  // caterpillar: spine distance between vertices carrying leaves
    std::size_t legs = 0;     // spider: number of legs, 0 means delta_cap
};

inline std::string to_string(TreeKind k) {
    switch (k) {
        case TreeKind::Path: return "path";
        case TreeKind::Caterpillar: return "caterpillar";
        case TreeKind::Broom: return "broom";
        case TreeKind::RandomBounded: return "random_bounded";
        case TreeKind::Spider: return "spider";
    }
    return "?";
}

inline TreeKind tree_kind_from_string(const std::string& s) {
    for (TreeKind k : {TreeKind::Path, TreeKind::Caterpillar, TreeKind::Broom, TreeKind::RandomBounded, TreeKind::Spider})
        if (to_string(k) == s) return k;
    throw PreconditionError("unknown tree kind '" + s + "'");
}

inline Graph generate_tree(TreeKind kind, std::size_t n, std::size_t delta_cap, std::uint64_t seed,
                           const TreeOptions& opt = {}) {
    if (n < 1) throw PreconditionError("tree needs at least one vertex");
    if (delta_cap < 2) throw PreconditionError("degree cap must be at least 2");
    std::vector<Edge> e;
    switch (kind) {
        case TreeKind::Path:
            for (Vertex i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
            break;
        case TreeKind::Spider: {
            std::size_t legs = std::min(opt.legs == 0 ? delta_cap : opt.legs, n - 1);
            if (legs > delta_cap) throw PreconditionError("spider needs more legs than the degree cap allows");
            Vertex next = 1;
            for (std::size_t l = 0; l < legs; ++l) {
                std::size_t len = (n - 1) / legs + (l < (n - 1) % legs ? 1 : 0);
                Vertex prev = 0;
                for (std::size_t s = 0; s < len; ++s) {
                    e.emplace_back(prev, next);
                    prev = next++;
                }
            }
            break;
        }
        case TreeKind::Caterpillar: {
            const std::size_t spacing = std::max<std::size_t>(1, opt.spacing);
            Vertex next = 1, spine = 0;
            std::size_t position = 0;
            while (next < n) {
                e.emplace_back(spine, next);
                spine = next++;
                ++position;
                if (position % spacing == 0)
                    for (std::size_t h = 0; h + 2 < delta_cap && next < n; ++h) e.emplace_back(spine, next++);
            }
            break;
        }
        case TreeKind::Broom: {
            const std::size_t bristles = std::min(delta_cap - 1, n - 1);
            const std::size_t handle = n - bristles;
            for (Vertex i = 0; i + 1 < handle; ++i) e.emplace_back(i, i + 1);
            for (Vertex b = static_cast<Vertex>(handle); b < n; ++b) e.emplace_back(static_cast<Vertex>(handle - 1), b);
            break;
        }
        case TreeKind::RandomBounded: {
            Rng rng(seed);
            std::vector<Vertex> open{0};
            std::vector<std::size_t> deg(n, 0);
            for (Vertex v = 1; v < n; ++v) {
                const std::size_t idx = uniform_below(rng, open.size());
                const Vertex p = open[idx];
                e.emplace_back(p, v);
                if (++deg[p] == delta_cap) {
                    std::swap(open[idx], open.back());
                    open.pop_back();
                }
                deg[v] = 1;
                if (delta_cap > 1) open.push_back(v);
            }
            break;
        }
    }
    Graph t = Graph::from_edges(n, e);
    if (t.max_degree() > delta_cap || !is_tree(t)) throw Error("tree generator violated its contract");
    return t;
}

}  // namespace spanemb
