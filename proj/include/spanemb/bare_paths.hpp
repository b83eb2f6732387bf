#pragma once

#include <vector>

#include "spanemb/graph.hpp"

namespace spanemb {

inline std::size_t leaf_count(const Graph& t) {
    std::size_t c = 0;
    for (Vertex v = 0; v < t.vertex_count(); ++v) c += t.degree(v) == 1;
    return c;
}

// n/(k+1) - (2L - 2)
inline double bare_path_bound(std::size_t n, std::size_t leaves, std::size_t k) {
    return static_cast<double>(n) / static_cast<double>(k + 1) - (2.0 * static_cast<double>(leaves) - 2.0);
}

// Maximal runs of degree-2 vertices, each listed from one end to the other.
inline std::vector<std::vector<Vertex>> degree_two_chains(const Graph& t) {
    const std::size_t n = t.vertex_count();
    std::vector<char> seen(n, 0);
    std::vector<std::vector<Vertex>> chains;
    for (Vertex v = 0; v < n; ++v) {
        if (seen[v] || t.degree(v) != 2) continue;
        // walk to one end of the run
        Vertex end = v, prev = kNoVertex;
        for (;;) {
            Vertex next = kNoVertex;
            for (Vertex w : t.neighbors(end))
                if (w != prev && t.degree(w) == 2) next = w;
            if (next == kNoVertex || next == v) break;
            prev = end;
            end = next;
        }
        std::vector<Vertex> chain;
        prev = kNoVertex;
        for (Vertex cur = end; cur != kNoVertex;) {
            chain.push_back(cur);
            seen[cur] = 1;
            Vertex next = kNoVertex;
            for (Vertex w : t.neighbors(cur))
                if (w != prev && t.degree(w) == 2 && !seen[w]) next = w;
            prev = cur;
            cur = next;
        }
        chains.push_back(std::move(chain));
    }
    return chains;
}

// Disjoint paths of length k made of degree-2 vertices only.
inline std::vector<Path> extract_bare_paths(const Graph& t, std::size_t k) {
    if (k < 1) throw PreconditionError("bare paths need k >= 1");
    if (!is_tree(t)) throw PreconditionError("extract_bare_paths needs a tree");
    std::vector<Path> out;
    for (const auto& chain : degree_two_chains(t))
        for (std::size_t i = 0; i + k + 1 <= chain.size(); i += k + 1)
            out.push_back(Path{std::vector<Vertex>(chain.begin() + i, chain.begin() + i + k + 1)});
    return out;
}

}  // namespace spanemb
