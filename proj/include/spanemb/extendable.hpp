#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spanemb/graph.hpp"

namespace spanemb {

enum class AuditTier { Exact, Sampled, Trust };

inline std::string to_string(AuditTier t) {
    switch (t) {
        case AuditTier::Exact: return "exact";
        case AuditTier::Sampled: return "sampled";
        case AuditTier::Trust: return "trust";
    }
    return "?";
}

inline AuditTier audit_tier_from_string(const std::string& s) {
    for (AuditTier t : {AuditTier::Exact, AuditTier::Sampled, AuditTier::Trust})
        if (to_string(t) == s) return t;
    throw PreconditionError("unknown audit tier '" + s + "'");
}

// A (D,m)-extendable subgraph S of a host, together with a partial embedding of
// some target graph into S. Work can be confined to a subset of host vertices.
class ExtendableState {
public:
    ExtendableState(const Graph& host, std::size_t d_cap, std::size_t m, std::uint64_t seed = 1)
        : host_(&host), d_cap_(d_cap), m_(m), s(host.vertex_count()), rng(seed),
          preimage_(host.vertex_count(), kNoVertex) {
        if (d_cap < 3) throw PreconditionError("extendability needs D >= 3");
        if (m < 1) throw PreconditionError("extendability needs m >= 1");
    }

    const Graph& host() const { return *host_; }
    std::size_t d_cap() const { return d_cap_; }
    std::size_t m() const { return m_; }

    bool allowed(Vertex v) const { return allowed_.empty() || allowed_[v]; }
    void restrict_to(std::vector<char> mask) { allowed_ = std::move(mask); }
    void allow(Vertex v) {
        if (!allowed_.empty()) allowed_[v] = 1;
    }
    void forbid(Vertex v) {
        if (allowed_.empty()) allowed_.assign(host_->vertex_count(), 1);
        allowed_[v] = 0;
    }
    std::size_t allowed_count() const {
        if (allowed_.empty()) return host_->vertex_count();
        return static_cast<std::size_t>(std::count(allowed_.begin(), allowed_.end(), 1));
    }

    Vertex image(Vertex target) const {
        auto it = embedding_.find(target);
        return it == embedding_.end() ? kNoVertex : it->second;
    }
    Vertex preimage(Vertex host_vertex) const { return preimage_[host_vertex]; }
    void bind(Vertex target, Vertex host_vertex) {
        if (embedding_.count(target)) throw PreconditionError("target vertex " + std::to_string(target) + " already embedded");
        if (preimage_[host_vertex] != kNoVertex)
            throw PreconditionError("host vertex " + std::to_string(host_vertex) + " already carries a target vertex");
        embedding_[target] = host_vertex;
        preimage_[host_vertex] = target;
    }
    void unbind(Vertex target) {
        auto it = embedding_.find(target);
        if (it == embedding_.end()) return;
        preimage_[it->second] = kNoVertex;
        embedding_.erase(it);
    }
    const std::map<Vertex, Vertex>& embedding() const { return embedding_; }

    bool same_contents(const ExtendableState& o) const { return s == o.s && embedding_ == o.embedding_; }

private:
    const Graph* host_;
    std::size_t d_cap_;
    std::size_t m_;

public:
    Subgraph s;
    AuditTier tier = AuditTier::Trust;
    std::size_t sample_budget = 128;
    Rng rng;

private:
    std::vector<char> allowed_;
    std::map<Vertex, Vertex> embedding_;
    std::vector<Vertex> preimage_;
};

struct ExtendMode {
    enum Kind { Exact, Sampled } kind = Exact;
    std::size_t budget = 0;
    std::uint64_t seed = 0;
    static ExtendMode exact() { return {Exact, 0, 0}; }
    static ExtendMode sampled(std::size_t budget, std::uint64_t seed) { return {Sampled, budget, seed}; }
};

struct ExtendabilityResult {
    bool ok = true;
    std::vector<Vertex> witness;  // a violating U when !ok (empty when the degree cap fails)
    explicit operator bool() const { return ok; }
};

namespace detail {

struct CompactHost {
    std::vector<Vertex> ids;
    std::vector<std::uint32_t> nbr;
    std::uint32_t s_mask = 0;
    std::vector<int> s_deg;
};

inline CompactHost compact_host(const ExtendableState& st, const char* op) {
    const Graph& g = st.host();
    CompactHost c;
    std::vector<int> index(g.vertex_count(), -1);
    for (Vertex v = 0; v < g.vertex_count(); ++v)
        if (st.allowed(v) || st.s.contains(v)) {
            index[v] = static_cast<int>(c.ids.size());
            c.ids.push_back(v);
        }
    if (c.ids.size() > 18 || st.m() > 3)
        throw PreconditionError(std::string(op) + " supports at most 18 host vertices and m <= 3");
    c.nbr.assign(c.ids.size(), 0);
    c.s_deg.assign(c.ids.size(), 0);
    for (std::size_t i = 0; i < c.ids.size(); ++i) {
        for (Vertex w : g.neighbors(c.ids[i]))
            if (index[w] >= 0) c.nbr[i] |= 1u << index[w];
        if (st.s.contains(c.ids[i])) {
            c.s_mask |= 1u << i;
            c.s_deg[i] = static_cast<int>(st.s.degree(c.ids[i]));
        }
    }
    return c;
}

// Enumerates all U with 1 <= |U| <= max_size; `bad(gamma, u_mask, size, credit)` flags a violation.
template <class Bad>
bool enumerate_sets(const CompactHost& c, std::size_t max_size, Bad bad, std::uint32_t* witness) {
    const int n = static_cast<int>(c.ids.size());
    struct Frame {
        int next;
        std::uint32_t gamma, u;
        int size, credit;
    };
    std::vector<Frame> stack{{0, 0, 0, 0, 0}};
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next >= n) {
            stack.pop_back();
            continue;
        }
        const int i = f.next++;
        Frame nf{i + 1, f.gamma | c.nbr[i], f.u | (1u << i), f.size + 1,
                 f.credit + ((c.s_mask >> i & 1u) ? c.s_deg[i] - 1 : 0)};
        if (bad(nf.gamma, nf.u, nf.size, nf.credit)) {
            *witness = nf.u;
            return false;
        }
        if (static_cast<std::size_t>(nf.size) < max_size) stack.push_back(nf);
    }
    return true;
}

inline std::vector<Vertex> unpack(const CompactHost& c, std::uint32_t mask) {
    std::vector<Vertex> out;
    for (std::size_t i = 0; i < c.ids.size(); ++i)
        if (mask >> i & 1u) out.push_back(c.ids[i]);
    return out;
}

}  // namespace detail

inline ExtendabilityResult is_extendable(const ExtendableState& st, ExtendMode mode = ExtendMode::exact()) {
    const long D = static_cast<long>(st.d_cap());
    if (st.s.max_degree() > st.d_cap()) return {false, {}};
    if (mode.kind == ExtendMode::Exact) {
        auto c = detail::compact_host(st, "exact extendability");
        std::uint32_t w = 0;
        bool ok = detail::enumerate_sets(
            c, 2 * st.m(),
            [&](std::uint32_t gamma, std::uint32_t, int size, int credit) {
                return std::popcount(gamma & ~c.s_mask) < (D - 1) * size - credit;
            },
            &w);
        if (ok) return {};
        return {false, detail::unpack(c, w)};
    }

    const Graph& g = st.host();
    std::vector<Vertex> everywhere, local;
    std::vector<char> in_local(g.vertex_count(), 0);
    for (Vertex v = 0; v < g.vertex_count(); ++v)
        if (st.allowed(v) || st.s.contains(v)) everywhere.push_back(v);
    for (Vertex v : everywhere)
        if (st.s.contains(v)) {
            if (!in_local[v]) local.push_back(v);
            in_local[v] = 1;
            for (Vertex w : g.neighbors(v))
                if (!in_local[w] && (st.allowed(w) || st.s.contains(w))) {
                    in_local[w] = 1;
                    local.push_back(w);
                }
        }
    if (everywhere.empty()) return {};
    Rng rng(mode.seed);
    std::vector<std::uint32_t> mark(g.vertex_count(), 0), chosen(g.vertex_count(), 0);
    std::uint32_t stamp = 0;
    for (std::size_t t = 0; t < mode.budget; ++t) {
        const std::size_t size = 1 + uniform_below(rng, 2 * st.m());
        ++stamp;
        std::vector<Vertex> u;
        for (std::size_t tries = 0; u.size() < size && tries < 8 * size; ++tries) {
            const auto& pool = (!local.empty() && uniform_below(rng, 2) == 0) ? local : everywhere;
            Vertex v = pool[uniform_below(rng, pool.size())];
            if (chosen[v] == stamp) continue;
            chosen[v] = stamp;
            u.push_back(v);
        }
        long credit = 0;
        long reach = 0;
        for (Vertex x : u) {
            if (st.s.contains(x)) credit += static_cast<long>(st.s.degree(x)) - 1;
            for (Vertex w : g.neighbors(x))
                if (mark[w] != stamp && st.allowed(w) && !st.s.contains(w)) {
                    mark[w] = stamp;
                    ++reach;
                }
        }
        if (reach < (D - 1) * static_cast<long>(u.size()) - credit) {
            std::sort(u.begin(), u.end());
            return {false, u};
        }
    }
    return {};
}

// |N(U) \ V(S)| >= D|U| for all admissible U, which implies extendability.
inline bool check_expansion_condition(const ExtendableState& st) {
    auto c = detail::compact_host(st, "expansion check");
    const int D = static_cast<int>(st.d_cap());
    std::uint32_t w = 0;
    return detail::enumerate_sets(
        c, 2 * st.m(),
        [&](std::uint32_t gamma, std::uint32_t u, int size, int) {
            return std::popcount(gamma & ~u & ~c.s_mask) < D * size;
        },
        &w);
}

namespace detail {

inline bool passes_audit(ExtendableState& st) {
    switch (st.tier) {
        case AuditTier::Exact: return is_extendable(st, ExtendMode::exact()).ok;
        case AuditTier::Sampled: return is_extendable(st, ExtendMode::sampled(st.sample_budget, st.rng())).ok;
        case AuditTier::Trust: return true;
    }
    return true;
}

}  // namespace detail

// Adds a host neighbour w of `anchor` as a new leaf of S; binds new_target to w when given.
inline Vertex extend_leaf(ExtendableState& st, Vertex anchor, std::optional<Vertex> new_target = std::nullopt) {
    if (!st.s.contains(anchor)) throw PreconditionError("anchor " + std::to_string(anchor) + " is not in S");
    if (st.s.degree(anchor) >= st.d_cap())
        throw PreconditionError("anchor " + std::to_string(anchor) + " already has degree D in S");
    if (new_target && st.image(*new_target) != kNoVertex)
        throw PreconditionError("target vertex " + std::to_string(*new_target) + " is already embedded");
    const Graph& g = st.host();
    struct Candidate {
        std::size_t into_s;
        std::uint64_t tiebreak;
        Vertex w;
    };
    std::vector<Candidate> cands;
    for (Vertex w : g.neighbors(anchor)) {
        if (!st.allowed(w) || st.s.contains(w)) continue;
        std::size_t c = 0;
        for (Vertex x : g.neighbors(w)) c += st.s.contains(x);
        cands.push_back({c, st.rng(), w});
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        return a.into_s != b.into_s ? a.into_s < b.into_s : a.tiebreak < b.tiebreak;
    });
    std::vector<std::string> log;
    for (const auto& c : cands) {
        st.s.add_vertex(c.w);
        st.s.add_edge(anchor, c.w);
        if (detail::passes_audit(st)) {
            if (new_target) st.bind(*new_target, c.w);
            return c.w;
        }
        st.s.remove_vertex(c.w);
        log.push_back("candidate " + std::to_string(c.w) + " rejected by " + to_string(st.tier) + " audit");
    }
    if (cands.empty()) log.push_back("anchor " + std::to_string(anchor) + " has no free neighbour");
    throw NoExtension("no extension of " + std::to_string(anchor) + " keeps S extendable", std::move(log));
}

inline void rollback(ExtendableState& st, Vertex leaf) {
    if (!st.s.contains(leaf) || st.s.degree(leaf) != 1)
        throw PreconditionError("vertex " + std::to_string(leaf) + " is not a leaf of S");
    st.s.remove_vertex(leaf);
    const Vertex t = st.preimage(leaf);
    if (t != kNoVertex) st.unbind(t);
}

inline std::size_t connect_radius(std::size_t d_cap, std::size_t m) {
    const double r = std::log(2.0 * static_cast<double>(m)) / std::log(static_cast<double>(d_cap) - 1.0);
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(r - 1e-12)));
}

inline std::size_t connect_min_length(std::size_t d_cap, std::size_t m) { return 2 * connect_radius(d_cap, m) + 1; }

struct ConnectOptions {
    std::size_t retries = 16;
    std::size_t frontier_cap = 0;  // max vertices per tree level, 0 = unbounded
    bool strict_budget = false;    // enforce the size budget on |S|
};

namespace detail {

inline Path assemble_connection(const std::vector<Vertex>& tail, Vertex x, Vertex y, Vertex b,
                                const std::map<Vertex, Vertex>& parent) {
    Path p{tail};
    std::vector<Vertex> up;
    for (Vertex v = x; v != p.vertices.back(); v = parent.at(v)) up.push_back(v);
    p.vertices.insert(p.vertices.end(), up.rbegin(), up.rend());
    for (Vertex v = y;; v = parent.at(v)) {
        p.vertices.push_back(v);
        if (v == b) break;
    }
    return p;
}

}  // namespace detail

// Finds an a-b path of length exactly ell whose internal vertices are new to S, and adds it to S.
inline Path connect(ExtendableState& st, Vertex a, Vertex b, std::size_t ell, const ConnectOptions& opt = {}) {
    if (a == b) throw PreconditionError("connect needs distinct endpoints");
    if (!st.s.contains(a) || !st.s.contains(b)) throw PreconditionError("connect endpoints must lie in S");
    if (2 * st.s.degree(a) > st.d_cap() || 2 * st.s.degree(b) > st.d_cap())
        throw PreconditionError("connect endpoints must have S-degree at most D/2");
    const std::size_t h = connect_radius(st.d_cap(), st.m());
    if (ell < 2 * h + 1)
        throw PreconditionError("length " + std::to_string(ell) + " is below the minimum " + std::to_string(2 * h + 1));
    if (opt.strict_budget) {
        const std::size_t reserve = 10 * st.d_cap() * st.m() + (ell - 2 * h - 1);
        if (st.s.vertex_count() + reserve > st.allowed_count())
            throw PreconditionError("S is too large for a guaranteed connection");
    }
    const Graph& g = st.host();
    std::size_t last_a = 0, last_b = 0;

    for (std::size_t attempt = 0; attempt < std::max<std::size_t>(1, opt.retries); ++attempt) {
        // radius grows with the attempt number, the tail from a takes the rest
        const std::size_t r = std::min(h + attempt, (ell - 1) / 2);
        const std::size_t surplus = ell - 2 * r - 1;
        std::vector<Vertex> added;
        std::map<Vertex, Vertex> parent;
        auto undo = [&] {
            for (auto it = added.rbegin(); it != added.rend(); ++it) rollback(st, *it);
        };
        auto grow = [&](Vertex root) {
            std::vector<std::vector<Vertex>> layers{{root}};
            for (std::size_t depth = 1; depth <= r; ++depth) {
                std::vector<Vertex> next;
                for (Vertex x : layers.back()) {
                    for (std::size_t c = 0; c + 1 < st.d_cap() && st.s.degree(x) < st.d_cap(); ++c) {
                        if (opt.frontier_cap && next.size() >= opt.frontier_cap) break;
                        Vertex w;
                        try {
                            w = extend_leaf(st, x);
                        } catch (const NoExtension&) {
                            break;
                        }
                        added.push_back(w);
                        parent[w] = x;
                        next.push_back(w);
                    }
                }
                layers.push_back(std::move(next));
                if (layers.back().empty()) break;
            }
            return layers;
        };

        std::vector<Vertex> tail{a};
        bool ok = true;
        for (std::size_t t = 0; t < surplus && ok; ++t) {
            try {
                Vertex w = extend_leaf(st, tail.back());
                added.push_back(w);
                tail.push_back(w);
            } catch (const NoExtension&) {
                ok = false;
            }
        }
        if (!ok) {
            undo();
            continue;
        }
        auto a_layers = grow(tail.back());
        auto b_layers = grow(b);
        const std::vector<Vertex> empty;
        const auto& a_front = a_layers.size() > r ? a_layers[r] : empty;
        const auto& b_front = b_layers.size() > r ? b_layers[r] : empty;
        last_a = a_front.size();
        last_b = b_front.size();

        std::vector<char> in_b(g.vertex_count(), 0);
        for (Vertex y : b_front) in_b[y] = 1;
        std::vector<Vertex> xs = a_front;
        std::sort(xs.begin(), xs.end());
        std::vector<Edge> joins;
        for (Vertex x : xs)
            for (Vertex y : g.neighbors(x))
                if (in_b[y]) joins.emplace_back(x, y);

        for (auto [x, y] : joins) {
            Path p = detail::assemble_connection(tail, x, y, b, parent);
            std::vector<char> keep(g.vertex_count(), 0);
            for (Vertex v : p.vertices) keep[v] = 1;
            auto commit = [&](ExtendableState& target) {
                for (auto it = added.rbegin(); it != added.rend(); ++it)
                    if (!keep[*it]) rollback(target, *it);
                target.s.add_edge(x, y);
            };
            if (st.tier == AuditTier::Trust) {
                commit(st);
                return p;
            }
            ExtendableState trial = st;
            commit(trial);
            if (detail::passes_audit(trial)) {
                st = std::move(trial);
                return p;
            }
        }
        undo();
    }
    throw ConnectFailure("no frontier join found between " + std::to_string(a) + " and " + std::to_string(b) +
                             " (frontiers " + std::to_string(last_a) + " and " + std::to_string(last_b) + ")",
                         last_a, last_b);
}

// Exhaustive search for an a-b path of exactly ell edges through vertices outside S.
// Meant for lengths below connect's minimum.
inline Path connect_short(ExtendableState& st, Vertex a, Vertex b, std::size_t ell, std::size_t node_budget = 200000) {
    if (a == b || ell < 1) throw PreconditionError("short link needs distinct endpoints and positive length");
    if (!st.s.contains(a) || !st.s.contains(b)) throw PreconditionError("short link endpoints must lie in S");
    if (st.s.degree(a) >= st.d_cap() || st.s.degree(b) >= st.d_cap())
        throw PreconditionError("short link endpoints are saturated");
    const Graph& g = st.host();
    std::vector<Vertex> path{a};
    std::vector<char> on(g.vertex_count(), 0);
    std::size_t nodes = 0;
    std::optional<Path> found;

    auto usable = [&](Vertex w) { return st.allowed(w) && !st.s.contains(w) && !on[w]; };
    std::function<bool(Vertex)> dfs = [&](Vertex v) -> bool {
        if (++nodes > node_budget) return false;
        const std::size_t remaining = ell - (path.size() - 1);
        if (remaining == 1) {
            if (!g.has_edge(v, b)) return false;
            if (path.size() == 1 && st.s.has_edge(a, b)) return false;
            path.push_back(b);
            Path p{path};
            ExtendableState trial = st;
            add_path_in_place(trial.s, g, p);
            if (trial.s.max_degree() <= st.d_cap() && detail::passes_audit(trial)) {
                st = std::move(trial);
                found = std::move(p);
                return true;
            }
            path.pop_back();
            return false;
        }
        std::vector<Vertex> next;
        for (Vertex w : g.neighbors(v))
            if (usable(w)) next.push_back(w);
        shuffle_in_place(next, st.rng);
        for (Vertex w : next) {
            on[w] = 1;
            path.push_back(w);
            if (dfs(w)) return true;
            path.pop_back();
            on[w] = 0;
            if (nodes > node_budget) return false;
        }
        return false;
    };
    on[a] = 1;
    if (dfs(a)) return *found;
    throw ConnectFailure("no short link of length " + std::to_string(ell) + " between " + std::to_string(a) + " and " +
                             std::to_string(b),
                         0, 0);
}

// Embeds the component of `root` in t by breadth-first leaf extensions, root -> image.
// On failure the partial embedding is rolled back and reported.
inline void embed_tree(ExtendableState& st, const Graph& t, Vertex root, Vertex image) {
    if (root >= t.vertex_count()) throw PreconditionError("root outside the target tree");
    if (!st.s.contains(image)) throw PreconditionError("root image must lie in S");
    if (2 * t.max_degree() > st.d_cap()) throw PreconditionError("target maximum degree exceeds D/2");
    const Vertex bound = st.image(root);
    if (bound != kNoVertex && bound != image) throw PreconditionError("root already embedded elsewhere");
    for (Vertex x = 0; x < t.vertex_count(); ++x)
        if (x != root && st.image(x) != kNoVertex)
            throw PreconditionError("target vertex " + std::to_string(x) + " is already embedded");
    if (bound == kNoVertex) st.bind(root, image);

    std::vector<Vertex> order{root};
    std::vector<Vertex> parent(t.vertex_count(), kNoVertex);
    std::vector<char> seen(t.vertex_count(), 0);
    seen[root] = 1;
    std::vector<Vertex> placed;
    try {
        for (std::size_t i = 0; i < order.size(); ++i) {
            const Vertex x = order[i];
            for (Vertex c : t.neighbors(x)) {
                if (seen[c]) continue;
                seen[c] = 1;
                Vertex w = extend_leaf(st, st.image(x), c);
                placed.push_back(w);
                order.push_back(c);
            }
        }
    } catch (const NoExtension& e) {
        const std::size_t partial = placed.size();
        for (auto it = placed.rbegin(); it != placed.rend(); ++it) rollback(st, *it);
        if (bound == kNoVertex) st.unbind(root);
        auto log = e.audit_log();
        log.push_back("partial embedding held " + std::to_string(partial + 1) + " of the component's vertices");
        throw NoExtension(std::string("tree embedding stalled: ") + e.what(), std::move(log));
    }
}

}  // namespace spanemb
