#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include "spanemb/graph.hpp"

namespace spanemb {

// Checks that seq builds g path by path from a_set: every path attaches only at
// its endpoints, at least one endpoint already exists, the paths are
// edge-disjoint and cover E(g) exactly, and lengths lie in [len_lo, len_hi].
inline Check verify_constructible(const Graph& g, std::span<const Vertex> a_set, std::span<const Path> seq,
                                  std::size_t len_lo, std::size_t len_hi) {
    std::vector<char> placed(g.vertex_count(), 0);
    for (Vertex a : a_set) {
        if (a >= g.vertex_count()) return Check::fail("base vertex " + std::to_string(a) + " out of range");
        placed[a] = 1;
    }
    std::set<Edge> used;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const Path& p = seq[i];
        const std::string at = " at index " + std::to_string(i);
        if (auto d = path_defect(g, p)) return Check::fail("clause (i)" + at + ": " + *d);
        if (p.length() < len_lo || p.length() > len_hi)
            return Check::fail("length window" + at + ": length " + std::to_string(p.length()) + " outside [" +
                               std::to_string(len_lo) + "," + std::to_string(len_hi) + "]");
        for (std::size_t j = 1; j + 1 < p.vertices.size(); ++j)
            if (placed[p.vertices[j]])
                return Check::fail("clause (ii)" + at + ": internal vertex " + std::to_string(p.vertices[j]) +
                                   " already built");
        if (!placed[p.front()] && !placed[p.back()]) return Check::fail("clause (iii)" + at + ": no endpoint already built");
        for (std::size_t j = 0; j + 1 < p.vertices.size(); ++j) {
            Edge e = std::minmax(p.vertices[j], p.vertices[j + 1]);
            if (!used.insert(e).second)
                return Check::fail("clause (i)" + at + ": edge (" + std::to_string(e.first) + "," +
                                   std::to_string(e.second) + ") used twice");
        }
        for (Vertex v : p.vertices) placed[v] = 1;
    }
    if (used.size() != g.edge_count()) {
        for (const Edge& e : g.edges())
            if (!used.count(e))
                return Check::fail("clause (i): edge (" + std::to_string(e.first) + "," + std::to_string(e.second) +
                                   ") never built");
    }
    return Check::pass();
}

}  // namespace spanemb
