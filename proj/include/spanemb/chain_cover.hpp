#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "spanemb/graph.hpp"

namespace spanemb {

struct ChainCoverOptions {
    std::size_t restarts = 8;
    std::size_t rotation_states = 256;
};

// chains[i] starts next to starts[i] and ends next to ends[end_index[i]].
struct ChainCover {
    std::vector<std::vector<Vertex>> chains;
    std::vector<std::size_t> end_index;
};

namespace detail {

// Posa rotations with p.front() fixed, one representative per reachable end.
inline std::vector<std::vector<Vertex>> rotation_variants(const Graph& g, const std::vector<Vertex>& p,
                                                          std::size_t max_states, Rng& rng,
                                                          std::vector<int>& pos) {
    std::vector<std::vector<Vertex>> out{p};
    std::vector<Vertex> seen_end{p.back()};
    for (std::size_t idx = 0; idx < out.size() && out.size() < max_states; ++idx) {
        const std::vector<Vertex> cur = out[idx];
        const std::size_t len = cur.size();
        for (std::size_t i = 0; i < len; ++i) pos[cur[i]] = static_cast<int>(i);
        std::vector<Vertex> nbrs(g.neighbors(cur.back()).begin(), g.neighbors(cur.back()).end());
        shuffle_in_place(nbrs, rng);
        for (Vertex z : nbrs) {
            const int j = pos[z];
            if (j < 0 || static_cast<std::size_t>(j) + 2 >= len) continue;
            const Vertex end = cur[j + 1];
            if (std::find(seen_end.begin(), seen_end.end(), end) != seen_end.end()) continue;
            std::vector<Vertex> next(cur.begin(), cur.begin() + j + 1);
            next.insert(next.end(), cur.rbegin(), cur.rend() - (j + 1));
            seen_end.push_back(end);
            out.push_back(std::move(next));
            if (out.size() >= max_states) break;
        }
        for (Vertex v : cur) pos[v] = -1;
    }
    return out;
}

inline std::vector<Vertex> reversed(std::vector<Vertex> p) {
    std::reverse(p.begin(), p.end());
    return p;
}

// Kuhn's augmenting paths on a small dense bipartite relation; match[l] = right index.
inline std::optional<std::vector<std::size_t>> small_perfect_matching(const std::vector<std::vector<char>>& ok) {
    const std::size_t k = ok.size();
    std::vector<int> right(k, -1);
    std::vector<char> seen;
    auto aug = [&](auto&& self, std::size_t l) -> bool {
        for (std::size_t r = 0; r < k; ++r) {
            if (!ok[l][r] || seen[r]) continue;
            seen[r] = 1;
            if (right[r] < 0 || self(self, static_cast<std::size_t>(right[r]))) {
                right[r] = static_cast<int>(l);
                return true;
            }
        }
        return false;
    };
    for (std::size_t l = 0; l < k; ++l) {
        seen.assign(k, 0);
        if (!aug(aug, l)) return std::nullopt;
    }
    std::vector<std::size_t> match(k);
    for (std::size_t r = 0; r < k; ++r) match[right[r]] = r;
    return match;
}

}  // namespace detail

// Hamilton path of g[w] by greedy extension (fewest onward moves first) and Posa rotations.
inline std::optional<std::vector<Vertex>> hamilton_path(const Graph& g, std::span<const Vertex> w, Rng& rng,
                                                        const ChainCoverOptions& opt = {}) {
    const std::size_t n = g.vertex_count();
    if (w.empty()) return std::vector<Vertex>{};
    std::vector<char> in_w(n, 0), on(n, 0);
    for (Vertex v : w) in_w[v] = 1;
    std::vector<int> free_deg(n, 0), pos(n, -1);
    for (Vertex v : w)
        for (Vertex x : g.neighbors(v)) free_deg[v] += in_w[x];
    auto take = [&](Vertex v) {
        on[v] = 1;
        for (Vertex x : g.neighbors(v)) --free_deg[x];
    };
    auto has_free = [&](Vertex v) {
        for (Vertex x : g.neighbors(v))
            if (in_w[x] && !on[x]) return true;
        return false;
    };
    Vertex start = w[0];
    std::uint64_t best_key = ~0ull;
    for (Vertex v : w) {
        std::uint64_t key = (static_cast<std::uint64_t>(free_deg[v]) << 32) | (rng() & 0xffffffffu);
        if (key < best_key) {
            best_key = key;
            start = v;
        }
    }
    std::vector<Vertex> path{start};
    take(start);
    for (std::size_t guard = 0; path.size() < w.size() && guard < 4 * w.size() + 64; ++guard) {
        const Vertex y = path.back();
        Vertex best = kNoVertex;
        std::uint64_t bk = ~0ull;
        for (Vertex x : g.neighbors(y)) {
            if (!in_w[x] || on[x]) continue;
            std::uint64_t key = (static_cast<std::uint64_t>(free_deg[x]) << 32) | (rng() & 0xffffffffu);
            if (key < bk) {
                bk = key;
                best = x;
            }
        }
        if (best != kNoVertex) {
            path.push_back(best);
            take(best);
            continue;
        }
        bool moved = false;
        std::vector<std::vector<Vertex>> pool;
        for (int side = 0; side < 2 && !moved; ++side) {
            if (side == 1) std::reverse(path.begin(), path.end());
            auto vars = detail::rotation_variants(g, path, opt.rotation_states, rng, pos);
            for (auto& v : vars)
                if (has_free(v.back())) {
                    path = std::move(v);
                    moved = true;
                    break;
                }
            if (!moved) pool.insert(pool.end(), vars.begin(), vars.end());
        }
        if (moved) continue;
        // a rotation that closes a cycle can be reopened next to any vertex with a free neighbour
        for (auto& v : pool) {
            if (!g.has_edge(v.front(), v.back())) continue;
            for (std::size_t j = 0; j < v.size() && !moved; ++j) {
                for (Vertex x : g.neighbors(v[j])) {
                    if (!in_w[x] || on[x]) continue;
                    std::vector<Vertex> next(v.begin() + j + 1, v.end());
                    next.insert(next.end(), v.begin(), v.begin() + j + 1);
                    next.push_back(x);
                    take(x);
                    path = std::move(next);
                    moved = true;
                    break;
                }
            }
            if (moved) break;
        }
        if (!moved) return std::nullopt;
    }
    if (path.size() != w.size()) return std::nullopt;
    return path;
}

// Partitions w into starts.size() paths of equal size whose first vertices see
// distinct starts and whose last vertices see distinct ends.
inline std::optional<ChainCover> chain_cover(const Graph& g, std::span<const Vertex> w, std::span<const Vertex> starts,
                                             std::span<const Vertex> ends, Rng& rng, const ChainCoverOptions& opt = {}) {
    const std::size_t k = starts.size();
    if (k == 0 || ends.size() != k) throw PreconditionError("chain cover needs equally many starts and ends");
    if (w.size() % k != 0) throw PreconditionError("chain cover needs |W| divisible by the number of chains");
    const std::size_t m = w.size() / k;
    if (m == 0) {
        std::vector<std::vector<char>> ok(k, std::vector<char>(k, 0));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) ok[i][j] = g.has_edge(starts[i], ends[j]);
        auto mt = detail::small_perfect_matching(ok);
        if (!mt) return std::nullopt;
        return ChainCover{std::vector<std::vector<Vertex>>(k), *mt};
    }
    std::vector<int> pos(g.vertex_count(), -1);
    for (std::size_t restart = 0; restart < std::max<std::size_t>(1, opt.restarts); ++restart) {
        auto h = hamilton_path(g, w, rng, opt);
        if (!h) continue;
        std::vector<std::vector<Vertex>> segs;
        for (std::size_t s = 0; s < k; ++s) segs.emplace_back(h->begin() + s * m, h->begin() + (s + 1) * m);

        // heads: rotate either end while the other stays put
        std::vector<std::vector<std::vector<Vertex>>> head_vars(k);
        std::vector<std::vector<char>> ok(k, std::vector<char>(k, 0));
        for (std::size_t s = 0; s < k; ++s) {
            for (int side = 0; side < 2; ++side) {
                auto base = side == 0 ? detail::reversed(segs[s]) : segs[s];
                for (auto& v : detail::rotation_variants(g, base, opt.rotation_states, rng, pos))
                    head_vars[s].push_back(detail::reversed(std::move(v)));
            }
            for (const auto& v : head_vars[s])
                for (std::size_t i = 0; i < k; ++i)
                    if (g.has_edge(v.front(), starts[i])) ok[s][i] = 1;
        }
        auto heads = detail::small_perfect_matching(ok);
        if (!heads) continue;
        std::vector<std::vector<Vertex>> chains(k);
        for (std::size_t s = 0; s < k; ++s)
            for (const auto& v : head_vars[s])
                if (g.has_edge(v.front(), starts[(*heads)[s]])) {
                    chains[(*heads)[s]] = v;
                    break;
                }

        // tails: rotate with the head fixed
        std::vector<std::vector<std::vector<Vertex>>> tail_vars(k);
        std::vector<std::vector<char>> ok2(k, std::vector<char>(k, 0));
        for (std::size_t i = 0; i < k; ++i) {
            tail_vars[i] = detail::rotation_variants(g, chains[i], opt.rotation_states, rng, pos);
            for (const auto& v : tail_vars[i])
                for (std::size_t j = 0; j < k; ++j)
                    if (g.has_edge(v.back(), ends[j])) ok2[i][j] = 1;
        }
        auto tails = detail::small_perfect_matching(ok2);
        if (!tails) continue;
        ChainCover out;
        out.end_index = *tails;
        for (std::size_t i = 0; i < k; ++i)
            for (const auto& v : tail_vars[i])
                if (g.has_edge(v.back(), ends[(*tails)[i]])) {
                    out.chains.push_back(v);
                    break;
                }
        return out;
    }
    return std::nullopt;
}

// Partitions w into cycles of `len` vertices each (listed in cyclic order).
inline std::optional<std::vector<std::vector<Vertex>>> closed_chain_cover(const Graph& g, std::span<const Vertex> w,
                                                                          std::size_t len, Rng& rng,
                                                                          const ChainCoverOptions& opt = {}) {
    if (len < 3 || w.size() % len != 0) throw PreconditionError("cycle length must be >= 3 and divide |W|");
    std::vector<int> pos(g.vertex_count(), -1);
    for (std::size_t restart = 0; restart < std::max<std::size_t>(1, opt.restarts); ++restart) {
        auto h = hamilton_path(g, w, rng, opt);
        if (!h) continue;
        std::vector<std::vector<Vertex>> cycles;
        bool ok = true;
        for (std::size_t s = 0; s < w.size() / len && ok; ++s) {
            std::vector<Vertex> seg(h->begin() + s * len, h->begin() + (s + 1) * len);
            ok = false;
            for (int side = 0; side < 2 && !ok; ++side) {
                if (side == 1) std::reverse(seg.begin(), seg.end());
                for (auto& v : detail::rotation_variants(g, seg, opt.rotation_states, rng, pos))
                    if (g.has_edge(v.front(), v.back())) {
                        cycles.push_back(std::move(v));
                        ok = true;
                        break;
                    }
            }
        }
        if (ok) return cycles;
    }
    return std::nullopt;
}

}  // namespace spanemb
