#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spanemb/constructible.hpp"
#include "spanemb/gadget.hpp"
#include "spanemb/graph.hpp"
#include "spanemb/sorting_network.hpp"

namespace spanemb {

struct GadgetInstance {
    std::size_t level;  // 1-based
    Comparator comparator;
    std::vector<Vertex> map;  // gadget vertex -> template vertex
};

// A sorting network with every comparator replaced by a gadget.
struct RoutingTemplate {
    Graph graph;
    std::vector<Vertex> a, b;
    ComparisonNetwork network;
    std::size_t k = 0;
    std::size_t ell = 0;
    std::size_t natural_ell = 0;
    std::size_t padding = 0;  // extra length appended to every register line
    std::size_t prepad_vertex_count = 0;
    std::vector<std::vector<Vertex>> in;   // in[i][j], i = 1..depth+1 (row 0 unused)
    std::vector<std::vector<Vertex>> out;  // out[i][j], i = 0..depth
    Gadget prototype;
    std::vector<GadgetInstance> gadgets;
    std::vector<std::vector<int>> gadget_at;        // [i][j] -> gadget index or -1, i = 1..depth
    std::vector<std::vector<Path>> pass_through;    // [i][j], empty when register j is compared at level i
    std::vector<std::vector<Path>> connectors;      // [i][j]: out[i][j] -> in[i+1][j], i = 0..depth

    std::size_t registers() const { return a.size(); }
    std::size_t depth() const { return network.depth(); }
};

inline std::size_t round_gadget_k(std::size_t k) {
    if (k < 2) k = 2;
    while (k % 4 != 2) ++k;
    return k;
}

inline std::size_t natural_template_length(std::size_t depth, std::size_t k) {
    if (depth == 0) return k;
    return depth * k * (k - 1) + (depth + 1) * k - 1;
}

inline RoutingTemplate build_template_from_network(ComparisonNetwork net, std::size_t k_requested,
                                                   std::optional<std::size_t> ell = std::nullopt) {
    net.validate();
    const std::size_t n_reg = net.registers;
    if (n_reg < 2) throw PreconditionError("routing template needs at least two registers");
    const std::size_t k = round_gadget_k(k_requested);
    const std::size_t depth = net.depth();
    const std::size_t natural = natural_template_length(depth, k);
    if (ell && *ell < natural)
        throw PreconditionError("path length " + std::to_string(*ell) + " is unreachable; nearest feasible value is " +
                                std::to_string(natural) + " (any larger value is reachable by padding)");

    RoutingTemplate t;
    t.network = net;
    t.k = k;
    t.natural_ell = natural;
    t.ell = ell.value_or(natural);
    t.padding = t.ell - natural;
    t.prototype = build_gadget(k);

    Vertex next = 0;
    t.out.assign(depth + 1, std::vector<Vertex>(n_reg));
    t.in.assign(depth + 2, std::vector<Vertex>(n_reg));
    for (std::size_t j = 0; j < n_reg; ++j) t.out[0][j] = next++;
    for (std::size_t i = 1; i <= depth; ++i)
        for (std::size_t j = 0; j < n_reg; ++j) {
            t.in[i][j] = next++;
            t.out[i][j] = next++;
        }
    for (std::size_t j = 0; j < n_reg; ++j) t.in[depth + 1][j] = next++;
    t.a = t.out[0];
    t.b = t.in[depth + 1];

    std::vector<Edge> edges;
    auto add_path_edges = [&](const Path& p) {
        for (std::size_t x = 0; x + 1 < p.vertices.size(); ++x) edges.emplace_back(p.vertices[x], p.vertices[x + 1]);
    };

    const Gadget& proto = t.prototype;
    t.gadget_at.assign(depth + 1, std::vector<int>(n_reg, -1));
    t.pass_through.assign(depth + 1, std::vector<Path>(n_reg));
    for (std::size_t i = 1; i <= depth; ++i) {
        for (const auto& c : net.levels[i - 1]) {
            GadgetInstance inst{i, c, std::vector<Vertex>(proto.graph.vertex_count(), kNoVertex)};
            inst.map[proto.in1] = t.in[i][c.lo];
            inst.map[proto.in2] = t.in[i][c.hi];
            inst.map[proto.out1] = t.out[i][c.lo];
            inst.map[proto.out2] = t.out[i][c.hi];
            for (auto& x : inst.map)
                if (x == kNoVertex) x = next++;
            for (auto [u, v] : proto.graph.edges()) edges.emplace_back(inst.map[u], inst.map[v]);
            t.gadget_at[i][c.lo] = t.gadget_at[i][c.hi] = static_cast<int>(t.gadgets.size());
            t.gadgets.push_back(std::move(inst));
        }
        for (std::size_t j = 0; j < n_reg; ++j) {
            if (t.gadget_at[i][j] >= 0) continue;
            Path p{{t.in[i][j]}};
            for (std::size_t x = 0; x + 2 < k * (k - 1); ++x) p.vertices.push_back(next++);
            p.vertices.push_back(t.out[i][j]);
            add_path_edges(p);
            t.pass_through[i][j] = std::move(p);
        }
    }

    t.connectors.assign(depth + 1, std::vector<Path>(n_reg));
    for (std::size_t i = 0; i <= depth; ++i) {
        std::size_t len = (i == 0 || i == depth) ? k : k + 1;
        if (i == depth) len += t.padding;
        for (std::size_t j = 0; j < n_reg; ++j) {
            Path p{{t.out[i][j]}};
            for (std::size_t x = 0; x + 1 < len; ++x) p.vertices.push_back(next++);
            p.vertices.push_back(t.in[i + 1][j]);
            add_path_edges(p);
            t.connectors[i][j] = std::move(p);
        }
    }

    t.graph = Graph::from_edges(next, edges);
    t.prepad_vertex_count = next - n_reg * t.padding;
    return t;
}

inline RoutingTemplate build_template(std::size_t n_reg, std::size_t k, std::optional<std::size_t> ell = std::nullopt,
                                      NetworkProvider provider = NetworkProvider::OddEven) {
    if (n_reg < 2) throw PreconditionError("routing template needs at least two registers");
    return build_template_from_network(build_network(provider, n_reg), k, ell);
}

namespace detail {
inline void extend_by(std::vector<Vertex>& line, const std::vector<Vertex>& seg) {
    line.insert(line.end(), seg.begin() + 1, seg.end());
}
}  // namespace detail

// phi[j] is the index in B of the image of a_j.
inline PathFactor route(const RoutingTemplate& t, std::span<const std::size_t> phi) {
    const std::size_t n_reg = t.registers();
    Assignment rho0(phi.size());
    for (std::size_t j = 0; j < phi.size(); ++j) rho0[j] = phi[j] + 1;
    try {
        require_bijection(rho0, n_reg);
    } catch (const PreconditionError&) {
        throw PreconditionError("phi is not a bijection of the terminal lists");
    }
    const NetworkRun run = apply_network(t.network, rho0);
    std::vector<std::vector<int>> position(t.depth() + 1, std::vector<int>(n_reg, -1));
    for (std::size_t i = 0; i < t.depth(); ++i)
        for (std::size_t c = 0; c < t.network.levels[i].size(); ++c) {
            position[i + 1][t.network.levels[i][c].lo] = static_cast<int>(c);
            position[i + 1][t.network.levels[i][c].hi] = static_cast<int>(c);
        }

    PathFactor f;
    const Gadget& proto = t.prototype;
    for (std::size_t j = 0; j < n_reg; ++j) {
        std::vector<Vertex> line = t.connectors[0][j].vertices;
        std::size_t reg = j;
        for (std::size_t i = 1; i <= t.depth(); ++i) {
            const int gi = t.gadget_at[i][reg];
            if (gi < 0) {
                detail::extend_by(line, t.pass_through[i][reg].vertices);
            } else {
                const GadgetInstance& inst = t.gadgets[gi];
                const bool swapped = run.swaps[i - 1][position[i][reg]];
                const Path* p;
                if (reg == inst.comparator.lo) {
                    p = swapped ? &proto.p1 : &proto.p2;
                    reg = swapped ? inst.comparator.hi : inst.comparator.lo;
                } else {
                    p = swapped ? &proto.q1 : &proto.q2;
                    reg = swapped ? inst.comparator.lo : inst.comparator.hi;
                }
                std::vector<Vertex> mapped;
                mapped.reserve(p->vertices.size());
                for (Vertex x : p->vertices) mapped.push_back(inst.map[x]);
                detail::extend_by(line, mapped);
            }
            detail::extend_by(line, t.connectors[i][reg].vertices);
        }
        if (line.back() != t.b[phi[j]]) throw Error("routing ended at the wrong terminal; network does not sort");
        f.paths.push_back(Path{std::move(line)});
    }
    f.target_set.resize(t.graph.vertex_count());
    for (Vertex v = 0; v < t.graph.vertex_count(); ++v) f.target_set[v] = v;
    return f;
}

// Splits a path of length >= lo into consecutive pieces with lengths in [lo, hi].
inline std::vector<Path> split_path(const Path& p, std::size_t lo, std::size_t hi) {
    const std::size_t len = p.length();
    if (len <= hi || len < 2 * lo) return {p};
    const std::size_t pieces = (len + hi - 1) / hi;
    const std::size_t base = len / pieces, extra = len % pieces;
    std::vector<Path> out;
    std::size_t start = 0;
    for (std::size_t s = 0; s < pieces; ++s) {
        const std::size_t l = base + (s < extra ? 1 : 0);
        out.push_back(Path{{p.vertices.begin() + start, p.vertices.begin() + start + l + 1}});
        start += l;
    }
    return out;
}

inline std::vector<Path> template_construction_sequence(const RoutingTemplate& t) {
    const std::size_t lo = t.k, hi = 4 * t.k;
    std::vector<Path> seq;
    auto emit = [&](const Path& p) {
        for (auto& piece : split_path(p, lo, hi)) seq.push_back(std::move(piece));
    };
    const std::size_t n_reg = t.registers();
    for (std::size_t i = 1; i <= t.depth(); ++i) {
        const auto& level = t.network.levels[i - 1];
        std::vector<char> done(n_reg, 0);
        for (const auto& c : level) {
            emit(t.connectors[i - 1][c.lo]);
            done[c.lo] = 1;
        }
        for (std::size_t g = 0; g < t.gadgets.size(); ++g) {
            const GadgetInstance& inst = t.gadgets[g];
            if (inst.level != i) continue;
            for (const Path& p : gadget_construction_sequence(t.prototype, t.prototype.in1)) {
                Path mapped;
                for (Vertex x : p.vertices) mapped.vertices.push_back(inst.map[x]);
                seq.push_back(std::move(mapped));
            }
        }
        for (std::size_t j = 0; j < n_reg; ++j) {
            if (done[j]) continue;
            if (t.gadget_at[i][j] >= 0) {
                emit(t.connectors[i - 1][j]);
            } else {
                Path chain = t.connectors[i - 1][j];
                detail::extend_by(chain.vertices, t.pass_through[i][j].vertices);
                emit(chain);
            }
        }
    }
    for (std::size_t j = 0; j < n_reg; ++j) emit(t.connectors[t.depth()][j]);
    return seq;
}

inline std::vector<Vertex> template_base_set(const RoutingTemplate& t) {
    std::vector<Vertex> base = t.a;
    base.insert(base.end(), t.b.begin(), t.b.end());
    return base;
}

}  // namespace spanemb
