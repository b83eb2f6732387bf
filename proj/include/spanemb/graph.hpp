#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "spanemb/common.hpp"

namespace spanemb {

// Immutable simple undirected graph on vertices 0..n-1 with sorted adjacency.
class Graph {
public:
    Graph() = default;
    explicit Graph(std::size_t n) : adj_(n) {}

    static Graph from_edges(std::size_t n, std::span<const Edge> edges) {
        Graph g(n);
        for (auto [u, v] : edges) {
            if (u >= n || v >= n)
                throw PreconditionError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                                        ") has an endpoint outside [0," + std::to_string(n) + ")");
            if (u == v)
                throw PreconditionError("loop (" + std::to_string(u) + "," + std::to_string(v) + ")");
            g.adj_[u].push_back(v);
            g.adj_[v].push_back(u);
        }
        std::size_t total = 0;
        for (auto& a : g.adj_) {
            std::sort(a.begin(), a.end());
            a.erase(std::unique(a.begin(), a.end()), a.end());
            total += a.size();
        }
        g.edge_count_ = total / 2;
        return g;
    }

    std::size_t vertex_count() const { return adj_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    std::span<const Vertex> neighbors(Vertex v) const { return adj_[v]; }
    std::size_t degree(Vertex v) const { return adj_[v].size(); }

    bool has_edge(Vertex u, Vertex v) const {
        if (u >= adj_.size() || v >= adj_.size()) return false;
        const auto& a = adj_[u].size() <= adj_[v].size() ? adj_[u] : adj_[v];
        Vertex x = adj_[u].size() <= adj_[v].size() ? v : u;
        return std::binary_search(a.begin(), a.end(), x);
    }

    std::size_t max_degree() const {
        std::size_t d = 0;
        for (const auto& a : adj_) d = std::max(d, a.size());
        return d;
    }
    std::size_t min_degree() const {
        if (adj_.empty()) return 0;
        std::size_t d = adj_[0].size();
        for (const auto& a : adj_) d = std::min(d, a.size());
        return d;
    }
    bool is_regular() const { return max_degree() == min_degree(); }

    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        out.reserve(edge_count_);
        for (Vertex u = 0; u < adj_.size(); ++u)
            for (Vertex v : adj_[u])
                if (u < v) out.emplace_back(u, v);
        return out;
    }

    bool operator==(const Graph& o) const { return adj_ == o.adj_; }

private:
    std::vector<std::vector<Vertex>> adj_;
    std::size_t edge_count_ = 0;
};

inline Graph graph_from_edges(std::size_t n, std::span<const Edge> edges) {
    return Graph::from_edges(n, edges);
}

inline bool is_connected(const Graph& g) {
    const std::size_t n = g.vertex_count();
    if (n == 0) return true;
    std::vector<char> seen(n, 0);
    std::vector<Vertex> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
        Vertex v = stack.back();
        stack.pop_back();
        for (Vertex w : g.neighbors(v))
            if (!seen[w]) {
                seen[w] = 1;
                ++count;
                stack.push_back(w);
            }
    }
    return count == n;
}

inline bool is_tree(const Graph& g) {
    return g.vertex_count() >= 1 && g.edge_count() + 1 == g.vertex_count() && is_connected(g);
}

// Γ(U) \ U, sorted.
inline std::vector<Vertex> external_neighborhood(const Graph& g, std::span<const Vertex> u_set) {
    std::vector<char> in_u(g.vertex_count(), 0), mark(g.vertex_count(), 0);
    for (Vertex u : u_set) in_u[u] = 1;
    std::vector<Vertex> out;
    for (Vertex u : u_set)
        for (Vertex w : g.neighbors(u))
            if (!in_u[w] && !mark[w]) {
                mark[w] = 1;
                out.push_back(w);
            }
    std::sort(out.begin(), out.end());
    return out;
}

struct Path {
    std::vector<Vertex> vertices;

    std::size_t length() const { return vertices.empty() ? 0 : vertices.size() - 1; }
    Vertex front() const { return vertices.front(); }
    Vertex back() const { return vertices.back(); }
    Path reversed() const { return Path{{vertices.rbegin(), vertices.rend()}}; }
    bool operator==(const Path&) const = default;
};

// Empty optional when p is a path of g; otherwise a description of the first defect.
inline std::optional<std::string> path_defect(const Graph& g, const Path& p) {
    if (p.vertices.empty()) return "empty path";
    std::vector<Vertex> sorted = p.vertices;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i] >= g.vertex_count()) return "vertex " + std::to_string(sorted[i]) + " out of range";
        if (i > 0 && sorted[i] == sorted[i - 1]) return "repeated vertex " + std::to_string(sorted[i]);
    }
    for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i)
        if (!g.has_edge(p.vertices[i], p.vertices[i + 1]))
            return "non-edge (" + std::to_string(p.vertices[i]) + "," + std::to_string(p.vertices[i + 1]) + ")";
    return std::nullopt;
}

inline bool is_valid_path(const Graph& g, const Path& p) { return !path_defect(g, p); }

struct PathFactor {
    std::vector<Path> paths;
    std::vector<Vertex> target_set;
    bool operator==(const PathFactor&) const = default;
};

struct Check {
    bool ok = true;
    std::string diagnostic;
    explicit operator bool() const { return ok; }
    static Check pass() { return {}; }
    static Check fail(std::string d) { return {false, std::move(d)}; }
};

inline Check is_valid_path_factor(const Graph& g, const PathFactor& f,
                                  std::optional<std::span<const Edge>> endpoint_constraint = std::nullopt) {
    for (std::size_t i = 0; i < f.paths.size(); ++i)
        if (auto d = path_defect(g, f.paths[i])) return Check::fail("validity: path " + std::to_string(i) + ": " + *d);
    std::vector<int> owner(g.vertex_count(), -1);
    for (std::size_t i = 0; i < f.paths.size(); ++i)
        for (Vertex v : f.paths[i].vertices) {
            if (owner[v] >= 0)
                return Check::fail("disjointness: vertex " + std::to_string(v) + " in paths " +
                                   std::to_string(owner[v]) + " and " + std::to_string(i));
            owner[v] = static_cast<int>(i);
        }
    std::vector<char> target(g.vertex_count(), 0);
    for (Vertex v : f.target_set) {
        if (v >= g.vertex_count()) return Check::fail("coverage: target vertex " + std::to_string(v) + " out of range");
        target[v] = 1;
        if (owner[v] < 0) return Check::fail("coverage: target vertex " + std::to_string(v) + " uncovered");
    }
    for (Vertex v = 0; v < g.vertex_count(); ++v)
        if (owner[v] >= 0 && !target[v])
            return Check::fail("coverage: vertex " + std::to_string(v) + " outside the target set");
    if (endpoint_constraint) {
        std::multiset<Edge> wanted;
        for (auto [a, b] : *endpoint_constraint) wanted.insert(std::minmax(a, b));
        for (std::size_t i = 0; i < f.paths.size(); ++i) {
            Edge e = std::minmax(f.paths[i].front(), f.paths[i].back());
            auto it = wanted.find(e);
            if (it == wanted.end())
                return Check::fail("endpoints: path " + std::to_string(i) + " joins " + std::to_string(e.first) +
                                   " and " + std::to_string(e.second) + ", not a required pair");
            wanted.erase(it);
        }
        if (!wanted.empty())
            return Check::fail("endpoints: pair (" + std::to_string(wanted.begin()->first) + "," +
                               std::to_string(wanted.begin()->second) + ") not realized");
    }
    return Check::pass();
}

struct Matching {
    std::vector<Edge> pairs;
    bool operator==(const Matching&) const = default;
};

inline Check is_valid_matching(const Graph& g, const Matching& m) {
    std::vector<char> used(g.vertex_count(), 0);
    for (auto [a, b] : m.pairs) {
        if (!g.has_edge(a, b))
            return Check::fail("non-edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
        if (used[a] || used[b])
            return Check::fail("vertex reused in pair (" + std::to_string(a) + "," + std::to_string(b) + ")");
        used[a] = used[b] = 1;
    }
    return Check::pass();
}

// Mutable subgraph of an ambient graph on the same id space.
class Subgraph {
public:
    Subgraph() = default;
    explicit Subgraph(std::size_t ambient_n) : in_(ambient_n, 0), adj_(ambient_n) {}

    // I(U): the edgeless subgraph on U.
    static Subgraph independent(std::size_t ambient_n, std::span<const Vertex> vs) {
        Subgraph s(ambient_n);
        for (Vertex v : vs) s.add_vertex(v);
        return s;
    }

    std::size_t ambient_size() const { return in_.size(); }
    bool contains(Vertex v) const { return v < in_.size() && in_[v]; }
    std::size_t degree(Vertex v) const { return adj_[v].size(); }
    std::span<const Vertex> neighbors(Vertex v) const { return adj_[v]; }
    std::size_t vertex_count() const { return count_; }
    std::size_t edge_count() const { return edges_; }

    std::vector<Vertex> vertices() const {
        std::vector<Vertex> out;
        out.reserve(count_);
        for (Vertex v = 0; v < in_.size(); ++v)
            if (in_[v]) out.push_back(v);
        return out;
    }
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        for (Vertex u = 0; u < in_.size(); ++u)
            for (Vertex v : adj_[u])
                if (u < v) out.emplace_back(u, v);
        std::sort(out.begin(), out.end());
        return out;
    }
    std::size_t max_degree() const {
        std::size_t d = 0;
        for (const auto& a : adj_) d = std::max(d, a.size());
        return d;
    }
    bool has_edge(Vertex u, Vertex v) const {
        if (!contains(u) || !contains(v)) return false;
        return std::find(adj_[u].begin(), adj_[u].end(), v) != adj_[u].end();
    }

    void add_vertex(Vertex v) {
        if (v >= in_.size()) throw PreconditionError("vertex " + std::to_string(v) + " outside ambient graph");
        if (!in_[v]) {
            in_[v] = 1;
            ++count_;
        }
    }
    void add_edge(Vertex u, Vertex v) {
        if (!contains(u) || !contains(v) || u == v)
            throw PreconditionError("edge (" + std::to_string(u) + "," + std::to_string(v) + ") needs two member endpoints");
        if (has_edge(u, v))
            throw PreconditionError("edge (" + std::to_string(u) + "," + std::to_string(v) + ") already present");
        adj_[u].push_back(v);
        adj_[v].push_back(u);
        ++edges_;
    }
    void remove_edge(Vertex u, Vertex v) {
        auto drop = [](std::vector<Vertex>& a, Vertex x) {
            auto it = std::find(a.begin(), a.end(), x);
            if (it == a.end()) return false;
            a.erase(it);
            return true;
        };
        if (!contains(u) || !drop(adj_[u], v))
            throw PreconditionError("edge (" + std::to_string(u) + "," + std::to_string(v) + ") not present");
        drop(adj_[v], u);
        --edges_;
    }
    void remove_vertex(Vertex v) {
        if (!contains(v)) throw PreconditionError("vertex " + std::to_string(v) + " not present");
        while (!adj_[v].empty()) remove_edge(v, adj_[v].back());
        in_[v] = 0;
        --count_;
    }

    bool operator==(const Subgraph& o) const {
        if (in_ != o.in_ || edges_ != o.edges_) return false;
        return edges() == o.edges();
    }

private:
    std::vector<char> in_;
    std::vector<std::vector<Vertex>> adj_;
    std::size_t count_ = 0;
    std::size_t edges_ = 0;
};

// S + P. Internal vertices of p must be outside s; endpoints may already be present.
inline void add_path_in_place(Subgraph& s, const Graph& g, const Path& p) {
    if (auto d = path_defect(g, p)) throw PreconditionError("path is not valid in the ambient graph: " + *d);
    for (std::size_t i = 1; i + 1 < p.vertices.size(); ++i)
        if (s.contains(p.vertices[i]))
            throw PreconditionError("internal vertex " + std::to_string(p.vertices[i]) + " already in the subgraph");
    for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i)
        if (s.has_edge(p.vertices[i], p.vertices[i + 1]))
            throw PreconditionError("edge (" + std::to_string(p.vertices[i]) + "," +
                                    std::to_string(p.vertices[i + 1]) + ") already in the subgraph");
    for (Vertex v : p.vertices) s.add_vertex(v);
    for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i) s.add_edge(p.vertices[i], p.vertices[i + 1]);
}

inline Subgraph add_path(Subgraph s, const Graph& g, const Path& p) {
    add_path_in_place(s, g, p);
    return s;
}

inline Subgraph remove_vertices(Subgraph s, std::span<const Vertex> vs) {
    for (Vertex v : vs) s.remove_vertex(v);
    return s;
}

}  // namespace spanemb
