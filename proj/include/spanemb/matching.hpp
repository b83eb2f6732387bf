#pragma once

#include <algorithm>
#include <limits>
#include <queue>
#include <variant>
#include <vector>

#include "spanemb/graph.hpp"

namespace spanemb {

struct HallViolator {
    std::vector<Vertex> set;           // subset of a_set
    std::vector<Vertex> neighborhood;  // its neighbours inside b_set, strictly smaller
};

using HallResult = std::variant<Matching, HallViolator>;

// Perfect matching of g[a_set, b_set] by Hopcroft-Karp, or a Hall violator.
inline HallResult hall_matching(const Graph& g, std::span<const Vertex> a_set, std::span<const Vertex> b_set) {
    if (a_set.size() != b_set.size()) throw PreconditionError("hall_matching needs |A| = |B|");
    const std::size_t n = a_set.size();
    std::vector<int> b_index(g.vertex_count(), -1);
    for (std::size_t j = 0; j < n; ++j) {
        if (b_set[j] >= g.vertex_count()) throw PreconditionError("vertex outside the graph");
        if (b_index[b_set[j]] >= 0) throw PreconditionError("repeated vertex in B");
        b_index[b_set[j]] = static_cast<int>(j);
    }
    std::vector<char> in_a(g.vertex_count(), 0);
    for (Vertex a : a_set) {
        if (a >= g.vertex_count()) throw PreconditionError("vertex outside the graph");
        if (b_index[a] >= 0) throw PreconditionError("A and B must be disjoint");
        if (in_a[a]) throw PreconditionError("repeated vertex in A");
        in_a[a] = 1;
    }
    std::vector<std::vector<int>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (Vertex w : g.neighbors(a_set[i]))
            if (b_index[w] >= 0) adj[i].push_back(b_index[w]);

    constexpr int kInf = std::numeric_limits<int>::max();
    std::vector<int> mate_a(n, -1), mate_b(n, -1), dist(n);
    auto bfs = [&] {
        std::queue<int> q;
        bool found = false;
        for (std::size_t i = 0; i < n; ++i) {
            dist[i] = mate_a[i] < 0 ? 0 : kInf;
            if (mate_a[i] < 0) q.push(static_cast<int>(i));
        }
        while (!q.empty()) {
            int i = q.front();
            q.pop();
            for (int j : adj[i]) {
                int k = mate_b[j];
                if (k < 0) found = true;
                else if (dist[k] == kInf) {
                    dist[k] = dist[i] + 1;
                    q.push(k);
                }
            }
        }
        return found;
    };
    std::vector<std::size_t> cursor(n);
    auto dfs = [&](auto&& self, int i) -> bool {
        for (std::size_t& c = cursor[i]; c < adj[i].size(); ++c) {
            int j = adj[i][c];
            int k = mate_b[j];
            if (k < 0 || (dist[k] == dist[i] + 1 && self(self, k))) {
                mate_a[i] = j;
                mate_b[j] = i;
                ++c;
                return true;
            }
        }
        dist[i] = kInf;
        return false;
    };
    std::size_t size = 0;
    while (bfs()) {
        std::fill(cursor.begin(), cursor.end(), 0);
        for (std::size_t i = 0; i < n; ++i)
            if (mate_a[i] < 0 && dfs(dfs, static_cast<int>(i))) ++size;
    }
    if (size == n) {
        Matching m;
        for (std::size_t i = 0; i < n; ++i) m.pairs.emplace_back(a_set[i], b_set[mate_a[i]]);
        return m;
    }
    // alternating reachability from the unmatched A vertices
    std::vector<char> seen_a(n, 0), seen_b(n, 0);
    std::vector<int> stack;
    for (std::size_t i = 0; i < n; ++i)
        if (mate_a[i] < 0) {
            seen_a[i] = 1;
            stack.push_back(static_cast<int>(i));
        }
    while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        for (int j : adj[i]) {
            if (seen_b[j]) continue;
            seen_b[j] = 1;
            int k = mate_b[j];
            if (k >= 0 && !seen_a[k]) {
                seen_a[k] = 1;
                stack.push_back(k);
            }
        }
    }
    HallViolator v;
    for (std::size_t i = 0; i < n; ++i)
        if (seen_a[i]) v.set.push_back(a_set[i]);
    for (std::size_t j = 0; j < n; ++j)
        if (seen_b[j]) v.neighborhood.push_back(b_set[j]);
    std::sort(v.set.begin(), v.set.end());
    std::sort(v.neighborhood.begin(), v.neighborhood.end());
    return v;
}

}  // namespace spanemb
