#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "spanemb/constructible.hpp"
#include "spanemb/graph.hpp"

namespace spanemb {

// The comparison gadget G_k.
struct Gadget {
    Graph graph;
    std::size_t k = 0;
    Vertex in1 = 0, in2 = 0, out1 = 0, out2 = 0;
    Path p1, q1, p2, q2;
    std::vector<Vertex> cycle;       // base cycle order, starting at u_1
    std::vector<Path> attachments;   // one path per pair of S, u-pairs first
};

namespace detail {
inline Vertex gadget_u(std::size_t i) { return static_cast<Vertex>(i - 1); }
inline Vertex gadget_v(std::size_t k, std::size_t i) { return static_cast<Vertex>(k + i - 1); }

inline void append_segment(std::vector<Vertex>& out, const std::vector<Vertex>& seg) {
    out.insert(out.end(), seg.begin(), seg.end());
}
}  // namespace detail

inline Gadget build_gadget(std::size_t k) {
    if (k < 2 || k % 4 != 2) throw PreconditionError("gadget needs k >= 2 with k = 2 mod 4, got " + std::to_string(k));
    using detail::gadget_u;
    auto v = [k](std::size_t i) { return detail::gadget_v(k, i); };
    auto u = [](std::size_t i) { return gadget_u(i); };

    std::vector<Edge> edges;
    std::vector<Edge> cycle_edges;
    cycle_edges.emplace_back(u(1), v(2));
    cycle_edges.emplace_back(u(k), v(k - 1));
    for (std::size_t i = 1; i < k; i += 2) {
        cycle_edges.emplace_back(u(i), u(i + 1));
        cycle_edges.emplace_back(v(i), v(i + 1));
    }
    for (std::size_t i = 2; i + 2 <= k; i += 2) cycle_edges.emplace_back(u(i), v(i + 2));
    for (std::size_t i = 3; i <= k; i += 2) cycle_edges.emplace_back(u(i), v(i - 2));
    edges = cycle_edges;

    Gadget g;
    g.k = k;
    const std::size_t n = 2 * k * (k - 1);
    Vertex next = static_cast<Vertex>(2 * k);
    // S pairs in fixed order: (u_i,u_{i+1}) then (v_i,v_{i+1}), i even.
    std::vector<Edge> pairs;
    for (std::size_t i = 2; i + 2 <= k; i += 2) pairs.emplace_back(u(i), u(i + 1));
    for (std::size_t i = 2; i + 2 <= k; i += 2) pairs.emplace_back(v(i), v(i + 1));
    for (auto [a, b] : pairs) {
        Path p;
        p.vertices.push_back(a);
        for (std::size_t t = 0; t < 2 * k; ++t) p.vertices.push_back(next++);
        p.vertices.push_back(b);
        for (std::size_t t = 0; t + 1 < p.vertices.size(); ++t) edges.emplace_back(p.vertices[t], p.vertices[t + 1]);
        g.attachments.push_back(std::move(p));
    }
    g.graph = Graph::from_edges(n, edges);

    // Walk the base cycle from u_1 towards u_2.
    Graph c = Graph::from_edges(2 * k, cycle_edges);
    g.cycle.push_back(u(1));
    Vertex prev = u(1), cur = u(2);
    while (cur != u(1)) {
        g.cycle.push_back(cur);
        auto nb = c.neighbors(cur);
        Vertex nxt = nb[0] == prev ? nb[1] : nb[0];
        prev = cur;
        cur = nxt;
    }

    auto seg = [&](Vertex a, Vertex b) {
        for (const auto& p : g.attachments) {
            if (p.front() == a && p.back() == b) return p.vertices;
            if (p.front() == b && p.back() == a) return p.reversed().vertices;
        }
        throw Error("gadget: no attachment path between " + std::to_string(a) + " and " + std::to_string(b));
    };
    const std::size_t half = (k - 2) / 2;
    std::vector<Vertex> p1{u(1)}, q1{v(1)}, p2{u(1)}, q2{v(1)};
    for (std::size_t j = 1; j <= half; ++j) {
        auto vv = seg(v(2 * j), v(2 * j + 1));
        auto uu = seg(u(2 * j + 1), u(2 * j));
        if (j % 2 == 1) {
            detail::append_segment(p1, vv);
            detail::append_segment(q1, uu);
        } else {
            detail::append_segment(p1, uu);
            detail::append_segment(q1, vv);
        }
        detail::append_segment(p2, seg(u(2 * j), u(2 * j + 1)));
        detail::append_segment(q2, vv);
    }
    p1.push_back(v(k));
    q1.push_back(u(k));
    p2.push_back(u(k));
    q2.push_back(v(k));
    g.p1 = Path{std::move(p1)};
    g.q1 = Path{std::move(q1)};
    g.p2 = Path{std::move(p2)};
    g.q2 = Path{std::move(q2)};
    g.in1 = u(1);
    g.in2 = v(1);
    g.out1 = u(k);
    g.out2 = v(k);
    return g;
}

inline std::vector<Path> gadget_construction_sequence(const Gadget& g, Vertex z) {
    if (z != g.in1 && z != g.in2) throw PreconditionError("construction must start at an input terminal");
    const std::size_t len = g.cycle.size();
    auto it = std::find(g.cycle.begin(), g.cycle.end(), z);
    if (it == g.cycle.end()) throw PreconditionError("terminal is not on the base cycle");
    const std::size_t s = static_cast<std::size_t>(it - g.cycle.begin());
    std::vector<Path> seq(2);
    for (std::size_t t = 0; t <= len / 2; ++t) seq[0].vertices.push_back(g.cycle[(s + t) % len]);
    for (std::size_t t = 0; t <= len / 2; ++t) seq[1].vertices.push_back(g.cycle[(s + len - t) % len]);
    seq.insert(seq.end(), g.attachments.begin(), g.attachments.end());
    return seq;
}

struct GadgetCheck {
    std::string property;
    bool ok;
    std::string detail;
};

struct GadgetReport {
    std::vector<GadgetCheck> checks;
    bool ok() const {
        return std::all_of(checks.begin(), checks.end(), [](const GadgetCheck& c) { return c.ok; });
    }
    const GadgetCheck* first_failure() const {
        for (const auto& c : checks)
            if (!c.ok) return &c;
        return nullptr;
    }
};

inline GadgetReport verify_gadget(const Gadget& g) {
    GadgetReport r;
    const std::size_t k = g.k;
    const std::size_t n = g.graph.vertex_count();
    auto add = [&](std::string prop, bool ok, std::string detail = {}) {
        r.checks.push_back({std::move(prop), ok, std::move(detail)});
    };

    const Path* paths[4] = {&g.p1, &g.q1, &g.p2, &g.q2};
    const char* names[4] = {"P1", "Q1", "P2", "Q2"};
    {
        std::string bad;
        for (int i = 0; i < 4 && bad.empty(); ++i)
            if (auto d = path_defect(g.graph, *paths[i])) bad = std::string(names[i]) + ": " + *d;
        add("(paths valid)", bad.empty(), bad);
    }
    add("(i)", n == 2 * k * (k - 1), "|V| = " + std::to_string(n));
    {
        const std::size_t want = k == 2 ? 2 : 3;
        add("(ii)", g.graph.max_degree() == want, "max degree " + std::to_string(g.graph.max_degree()));
    }
    {
        std::string bad;
        for (Vertex z : {g.in1, g.in2}) {
            if (!bad.empty()) break;
            try {
                auto seq = gadget_construction_sequence(g, z);
                std::vector<Vertex> base{z};
                auto c = verify_constructible(g.graph, base, seq, k, 2 * k + 1);
                if (!c) bad = "from " + std::to_string(z) + ": " + c.diagnostic;
            } catch (const Error& e) {
                bad = e.what();
            }
        }
        add("(iii)", bad.empty(), bad);
    }
    {
        bool ok = !g.p1.vertices.empty() && !g.q1.vertices.empty() && !g.p2.vertices.empty() && !g.q2.vertices.empty();
        ok = ok && g.p1.front() == g.in1 && g.p1.back() == g.out2;
        ok = ok && g.q1.front() == g.in2 && g.q1.back() == g.out1;
        ok = ok && g.p2.front() == g.in1 && g.p2.back() == g.out1;
        ok = ok && g.q2.front() == g.in2 && g.q2.back() == g.out2;
        add("(iv)", ok);
    }
    {
        auto partitions = [&](const Path& a, const Path& b) {
            std::vector<int> seen(n, 0);
            for (Vertex x : a.vertices)
                if (x < n) ++seen[x];
            for (Vertex x : b.vertices)
                if (x < n) ++seen[x];
            return a.vertices.size() + b.vertices.size() == n &&
                   std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
        };
        add("(v)", partitions(g.p1, g.q1) && partitions(g.p2, g.q2));
    }
    {
        const std::size_t want = k * (k - 1);
        bool ok = true;
        for (const Path* p : paths) ok = ok && p->vertices.size() == want;
        add("(vi)", ok, "|V(P1)| = " + std::to_string(g.p1.vertices.size()));
    }
    return r;
}

}  // namespace spanemb
