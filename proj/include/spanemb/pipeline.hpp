#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spanemb/bare_paths.hpp"
#include "spanemb/chain_cover.hpp"
#include "spanemb/config.hpp"
#include "spanemb/extendable.hpp"
#include "spanemb/matching.hpp"
#include "spanemb/routing_template.hpp"
#include "spanemb/spectral.hpp"

namespace spanemb {

using json = nlohmann::json;

// A failed run; the trace names the step that gave up.
class PipelineFailure : public StepFailure {
public:
    PipelineFailure(std::string step, const std::string& what, json trace)
        : StepFailure(std::move(step), what), trace_(std::move(trace)) {}
    const json& trace() const { return trace_; }

private:
    json trace_;
};

// ---------------------------------------------------------------- reserved sets

struct SetSpec {
    std::string name;
    std::size_t size = 0;
    double lo_factor = 0;     // degree into the set >= floor(lo_factor * deg(v)|R|/n)
    double hi_factor = 0;     // degree into the set <= ceil(hi_factor * deg(v)|R|/n); 0 = unbounded
    int neighbors_of = -1;    // index of an earlier set: pick one distinct neighbour per member
};

struct ReservedSets {
    std::vector<std::string> names;
    std::vector<std::vector<Vertex>> sets;
    std::size_t tries = 0;

    const std::vector<Vertex>& at(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return sets[i];
        throw PreconditionError("no reserved set named " + name);
    }
};

inline ReservedSets sample_reserved_sets(const Graph& g, const std::vector<SetSpec>& specs, double residual_factor,
                                         std::size_t retry_cap, std::uint64_t seed,
                                         std::span<const Vertex> excluded = {}) {
    const std::size_t n = g.vertex_count();
    std::vector<char> banned(n, 0);
    for (Vertex v : excluded) banned[v] = 1;
    std::vector<Vertex> avail;
    for (Vertex v = 0; v < n; ++v)
        if (!banned[v]) avail.push_back(v);
    std::size_t total = 0;
    for (const auto& s : specs) {
        total += s.size;
        if (s.neighbors_of >= 0 && static_cast<std::size_t>(s.neighbors_of) >= static_cast<std::size_t>(&s - specs.data()))
            throw PreconditionError("set " + s.name + " plants on a later set");
    }
    if (total > avail.size()) throw PreconditionError("reserved sizes exceed the available vertices");

    Rng rng(seed);
    std::string worst = "none";
    double worst_score = -1;
    for (std::size_t attempt = 1; attempt <= std::max<std::size_t>(1, retry_cap); ++attempt) {
        ReservedSets out;
        out.tries = attempt;
        std::vector<int> owner(n, -1);
        std::vector<Vertex> perm = avail;
        shuffle_in_place(perm, rng);
        std::size_t cursor = 0;
        bool ok = true;
        for (std::size_t si = 0; si < specs.size() && ok; ++si) {
            const auto& s = specs[si];
            std::vector<Vertex> set;
            if (s.neighbors_of < 0) {
                while (set.size() < s.size) {
                    while (owner[perm[cursor]] >= 0) ++cursor;
                    set.push_back(perm[cursor]);
                    owner[perm[cursor++]] = static_cast<int>(si);
                }
            } else {
                const auto& base = out.sets[s.neighbors_of];
                for (std::size_t i = 0; i < s.size; ++i) {
                    const Vertex y = base[i % base.size()];
                    std::vector<Vertex> nb;
                    for (Vertex x : g.neighbors(y))
                        if (!banned[x] && owner[x] < 0) nb.push_back(x);
                    if (nb.empty()) {
                        ok = false;
                        if (worst_score < 1e9) {
                            worst_score = 1e9;
                            worst = "vertex " + std::to_string(y) + " of " + specs[s.neighbors_of].name +
                                    " has no free neighbour to plant " + s.name;
                        }
                        break;
                    }
                    const Vertex x = nb[uniform_below(rng, nb.size())];
                    set.push_back(x);
                    owner[x] = static_cast<int>(si);
                }
            }
            out.names.push_back(s.name);
            out.sets.push_back(std::move(set));
        }
        if (!ok) continue;
        // degree bands
        std::vector<std::size_t> cnt(n);
        for (std::size_t si = 0; si < specs.size() && ok; ++si) {
            const auto& s = specs[si];
            if (s.lo_factor <= 0 && s.hi_factor <= 0) continue;
            std::fill(cnt.begin(), cnt.end(), 0);
            for (Vertex x : out.sets[si])
                for (Vertex v : g.neighbors(x)) ++cnt[v];
            for (Vertex v = 0; v < n; ++v) {
                const double expect = static_cast<double>(g.degree(v)) * static_cast<double>(s.size) / static_cast<double>(n);
                const double lo = std::floor(s.lo_factor * expect);
                const double hi = s.hi_factor > 0 ? std::ceil(s.hi_factor * expect) : 1e300;
                const double c = static_cast<double>(cnt[v]);
                if (c < lo || c > hi) {
                    const double score = c < lo ? (lo - c) / std::max(1.0, lo) : (c - hi) / std::max(1.0, hi);
                    if (score > worst_score) {
                        worst_score = score;
                        worst = "vertex " + std::to_string(v) + " has degree " + std::to_string(cnt[v]) + " into " +
                                s.name + ", outside [" + std::to_string(static_cast<long long>(lo)) + ", " +
                                (s.hi_factor > 0 ? std::to_string(static_cast<long long>(hi)) : std::string("inf")) + "]";
                    }
                    ok = false;
                    break;
                }
            }
        }
        if (!ok) continue;
        if (residual_factor > 0) {
            std::size_t unreserved = 0;
            for (Vertex v = 0; v < n; ++v) unreserved += owner[v] < 0;
            for (Vertex v = 0; v < n && ok; ++v) {
                std::size_t r = 0;
                for (Vertex x : g.neighbors(v)) r += owner[x] < 0;
                const double need = std::floor(residual_factor * static_cast<double>(g.degree(v)) *
                                               static_cast<double>(unreserved) / static_cast<double>(n));
                if (static_cast<double>(r) < need) {
                    const double score = (need - static_cast<double>(r)) / std::max(1.0, need);
                    if (score > worst_score) {
                        worst_score = score;
                        worst = "vertex " + std::to_string(v) + " keeps only " + std::to_string(r) +
                                " unreserved neighbours";
                    }
                    ok = false;
                }
            }
        }
        if (ok) return out;
    }
    throw StepFailure("reserve", "retry cap exceeded; worst violation: " + worst);
}

// ---------------------------------------------------------------- template embedding

// Realises t inside the host with A -> v1 and B -> v2; returns template vertex -> host vertex.
inline std::vector<Vertex> embed_template(ExtendableState& st, const RoutingTemplate& t, std::span<const Vertex> v1,
                                          std::span<const Vertex> v2, const ConnectOptions& copt = {}) {
    const std::size_t r = t.registers();
    if (v1.size() != r || v2.size() != r) throw PreconditionError("terminal lists must match the register count");
    for (Vertex v : v1)
        if (!st.s.contains(v)) throw PreconditionError("terminal images must lie in S");
    for (Vertex v : v2)
        if (!st.s.contains(v)) throw PreconditionError("terminal images must lie in S");
    std::size_t room = 0;
    for (Vertex v = 0; v < st.host().vertex_count(); ++v) room += st.allowed(v) && !st.s.contains(v);
    if (room + 2 * r < t.graph.vertex_count())
        throw PreconditionError("host has room for " + std::to_string(room + 2 * r) + " template vertices, needs " +
                                std::to_string(t.graph.vertex_count()));

    std::vector<Vertex> map(t.graph.vertex_count(), kNoVertex);
    for (std::size_t j = 0; j < r; ++j) {
        map[t.a[j]] = v1[j];
        map[t.b[j]] = v2[j];
    }
    const auto seq = template_construction_sequence(t);
    const std::size_t cmin = connect_min_length(st.d_cap(), st.m());
    for (std::size_t idx = 0; idx < seq.size(); ++idx) {
        Path p = seq[idx];
        const std::string where = "piece " + std::to_string(idx + 1) + "/" + std::to_string(seq.size());
        try {
            const bool front = map[p.front()] != kNoVertex, back = map[p.back()] != kNoVertex;
            if (front && back) {
                const std::size_t len = p.length();
                Path h = len >= cmin ? connect(st, map[p.front()], map[p.back()], len, copt)
                                     : connect_short(st, map[p.front()], map[p.back()], len);
                for (std::size_t i = 1; i + 1 < p.vertices.size(); ++i) map[p.vertices[i]] = h.vertices[i];
            } else if (front || back) {
                if (!front) p = p.reversed();
                Vertex cur = map[p.front()];
                for (std::size_t i = 1; i < p.vertices.size(); ++i) {
                    cur = extend_leaf(st, cur);
                    map[p.vertices[i]] = cur;
                }
            } else {
                throw Error(where + " has no placed endpoint");
            }
        } catch (const NoExtension& e) {
            throw StepFailure("template", where + ": " + e.what());
        } catch (const ConnectFailure& e) {
            throw StepFailure("template", where + ": " + e.what());
        }
    }
    for (auto [x, y] : t.graph.edges())
        if (!st.host().has_edge(map[x], map[y])) throw Error("template edge lost during embedding");
    return map;
}

// ---------------------------------------------------------------- verification

inline Check verify_embedding(const Graph& g, const Graph& t, std::span<const Vertex> map) {
    if (map.size() != t.vertex_count())
        return Check::fail("totality: map has " + std::to_string(map.size()) + " entries for " +
                           std::to_string(t.vertex_count()) + " tree vertices");
    std::vector<Vertex> owner(g.vertex_count(), kNoVertex);
    for (Vertex x = 0; x < map.size(); ++x) {
        if (map[x] == kNoVertex || map[x] >= g.vertex_count())
            return Check::fail("totality: tree vertex " + std::to_string(x) + " is unmapped");
        if (owner[map[x]] != kNoVertex)
            return Check::fail("injectivity: tree vertices " + std::to_string(owner[map[x]]) + " and " +
                               std::to_string(x) + " both map to " + std::to_string(map[x]));
        owner[map[x]] = x;
    }
    for (auto [x, y] : t.edges())
        if (!g.has_edge(map[x], map[y]))
            return Check::fail("edge (" + std::to_string(x) + "," + std::to_string(y) + ") maps to the non-edge (" +
                               std::to_string(map[x]) + "," + std::to_string(map[y]) + ")");
    if (t.vertex_count() == g.vertex_count()) {
        for (Vertex v = 0; v < g.vertex_count(); ++v)
            if (owner[v] == kNoVertex) return Check::fail("spanning: host vertex " + std::to_string(v) + " is uncovered");
    }
    return Check::pass();
}

inline Check verify_cycle_factor(const Graph& g, const std::vector<std::vector<Vertex>>& cycles, std::size_t len) {
    std::vector<char> seen(g.vertex_count(), 0);
    for (std::size_t c = 0; c < cycles.size(); ++c) {
        const auto& cyc = cycles[c];
        if (cyc.size() != len)
            return Check::fail("length: cycle " + std::to_string(c) + " has " + std::to_string(cyc.size()) + " vertices");
        for (std::size_t i = 0; i < cyc.size(); ++i) {
            const Vertex v = cyc[i], w = cyc[(i + 1) % cyc.size()];
            if (v >= g.vertex_count()) return Check::fail("validity: vertex out of range");
            if (seen[v]) return Check::fail("disjointness: vertex " + std::to_string(v) + " is used twice");
            seen[v] = 1;
            if (!g.has_edge(v, w))
                return Check::fail("edge: cycle " + std::to_string(c) + " uses the non-edge (" + std::to_string(v) + "," +
                                   std::to_string(w) + ")");
        }
    }
    for (Vertex v = 0; v < g.vertex_count(); ++v)
        if (!seen[v]) return Check::fail("coverage: vertex " + std::to_string(v) + " is not covered");
    return Check::pass();
}

// ---------------------------------------------------------------- planning

struct BarePlan {
    std::size_t registers = 0, k_gadget = 0, t_prime = 0, num_levels = 0;
    std::size_t bare_length = 0, template_length = 0, template_size = 0;
    std::size_t v_size = 0, r0_size = 0, forest_size = 0, pool = 0;
    double load = 0;
    std::vector<Path> bare_paths;
};

inline std::size_t resolve_join_m(const PipelineConfig& cfg, const Graph& g, const SpectralReport& rep) {
    if (cfg.join_m) return cfg.join_m;
    const double d = std::max(1.0, rep.d);
    return std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(rep.lambda_hat * g.vertex_count() / d - 1e-9)));
}

inline std::size_t resolve_k_gadget(const PipelineConfig& cfg, std::size_t n) {
    return round_gadget_k(cfg.k_gadget ? cfg.k_gadget : (n >= 400 ? 6 : 2));
}

inline std::size_t resolve_t_prime(const PipelineConfig& cfg, std::size_t n, std::size_t cmin) {
    if (cfg.t_prime) return std::max(cfg.t_prime, cmin);
    if (n < 200) return cmin;
    return std::max(cmin, 2 * static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(n)))));
}

inline std::optional<BarePlan> plan_bare_route(const Graph& t, const PipelineConfig& cfg, std::size_t join_m,
                                               std::string* why = nullptr) {
    const std::size_t n = t.vertex_count();
    std::vector<std::size_t> chain_len;
    for (const auto& c : degree_two_chains(t)) chain_len.push_back(c.size());
    const std::size_t kg = resolve_k_gadget(cfg, n);
    const std::size_t tp = resolve_t_prime(cfg, n, connect_min_length(cfg.D, join_m));
    std::vector<std::size_t> regs = cfg.registers ? std::vector<std::size_t>{cfg.registers} : std::vector<std::size_t>{2, 4, 8};
    std::optional<BarePlan> best;
    std::string reason = "no register count admits enough bare paths";
    const std::size_t r0 =
        cfg.r0_size ? cfg.r0_size : static_cast<std::size_t>(std::round(cfg.r0_fraction * static_cast<double>(n)));
    for (std::size_t kr : regs) {
        if (kr < 2) continue;
        const std::size_t depth = build_network(cfg.provider, kr).depth();
        const std::size_t lt = natural_template_length(depth, kg);
        const std::size_t tsize = kr * (lt + 1);
        auto make = [&](std::size_t m) -> std::optional<BarePlan> {
            const std::size_t ell = 2 * tp + m + lt + 2;
            std::size_t count = 0;
            for (std::size_t c : chain_len) count += c / (ell + 1);
            if (count < kr || kr * (ell - 1) >= n) return std::nullopt;
            BarePlan p;
            p.registers = kr;
            p.k_gadget = kg;
            p.t_prime = tp;
            p.num_levels = m;
            p.bare_length = ell;
            p.template_length = lt;
            p.template_size = tsize;
            const std::size_t w = kr * m;
            p.v_size = cfg.v_size ? std::min(cfg.v_size, w)
                                  : static_cast<std::size_t>(cfg.level_reserve_fraction * static_cast<double>(w));
            p.r0_size = r0;
            p.forest_size = n - kr * (ell - 1);
            const std::size_t used = p.v_size + p.r0_size + 2 * kr + tsize;
            p.pool = used < n ? n - used : 0;
            p.load = p.pool ? static_cast<double>(p.forest_size) / static_cast<double>(p.pool) : 1e300;
            return p;
        };
        // bare paths run out as m grows, load falls as m grows: feasible m form an interval
        std::optional<BarePlan> pick;
        if (cfg.num_levels) {
            pick = make(cfg.num_levels);
            if (!pick) reason = "too few bare paths for num_levels";
        } else {
            const std::size_t target = std::max<std::size_t>(
                1, static_cast<std::size_t>(cfg.level_fraction * static_cast<double>(n) / static_cast<double>(kr)));
            std::size_t m_max = 0;
            for (std::size_t m = 1; make(m); ++m) m_max = m;
            if (m_max == 0) continue;
            std::size_t m_min = m_max + 1;
            for (std::size_t m = m_max; m >= 1; --m) {
                if (make(m)->load > cfg.max_load) break;
                m_min = m;
            }
            if (m_min > m_max) {
                reason = "forest load " + std::to_string(make(m_max)->load) + " exceeds max_load";
                continue;
            }
            pick = make(std::clamp(target, m_min, m_max));
        }
        if (!pick) continue;
        if (pick->load > cfg.max_load) {
            reason = "forest load " + std::to_string(pick->load) + " exceeds max_load";
            continue;
        }
        const std::size_t w = pick->registers * pick->num_levels;
        const std::size_t w_best = best ? best->registers * best->num_levels : 0;
        if (!best || w > w_best || (w == w_best && pick->load < best->load)) best = pick;
    }
    if (best) {
        auto paths = extract_bare_paths(t, best->bare_length);
        paths.resize(best->registers);
        best->bare_paths = std::move(paths);
    } else if (why) {
        *why = reason;
    }
    return best;
}

// ---------------------------------------------------------------- spanning tree pipeline

struct EmbeddingResult {
    std::vector<Vertex> map;  // tree vertex -> host vertex
    json trace;
};

namespace detail {

inline json spectral_json(const SpectralReport& r) {
    return json{{"n", r.n},           {"d", r.d},
                {"regular", r.regular}, {"lambda_hat", r.lambda_hat},
                {"lambda_2", r.lambda_2}, {"lambda_min", r.lambda_min},
                {"disconnected", r.disconnected}, {"bipartite", r.bipartite}};
}

inline std::vector<char> mask_of(std::size_t n, std::initializer_list<const std::vector<Vertex>*> sets) {
    std::vector<char> m(n, 0);
    for (auto* s : sets)
        for (Vertex v : *s) m[v] = 1;
    return m;
}

inline ConnectOptions connect_options(const PipelineConfig& cfg) {
    ConnectOptions o;
    o.retries = cfg.connect_retries;
    o.frontier_cap = cfg.frontier_cap;
    return o;
}

inline ExtendableState fresh_state(const Graph& g, const PipelineConfig& cfg, std::size_t join_m, std::uint64_t seed) {
    ExtendableState st(g, cfg.D, join_m, seed);
    st.tier = cfg.audit;
    st.sample_budget = cfg.sample_budget;
    return st;
}

inline Vertex random_free(const ExtendableState& st, Rng& rng) {
    std::vector<Vertex> c;
    for (Vertex v = 0; v < st.host().vertex_count(); ++v)
        if (st.allowed(v) && !st.s.contains(v)) c.push_back(v);
    if (c.empty()) throw StepFailure("forest", "no free vertex for the root");
    return c[uniform_below(rng, c.size())];
}

inline std::vector<Vertex> bare_route_attempt(const Graph& g, const Graph& t, const PipelineConfig& cfg,
                                              const BarePlan& plan, std::size_t join_m, std::uint64_t seed,
                                              json& trace) {
    const std::size_t n = g.vertex_count(), kr = plan.registers;
    Rng rng(derive_seed(seed, 1));
    std::vector<std::string> steps;

    // step 0: contract the bare paths
    std::vector<char> interior(n, 0);
    for (const auto& p : plan.bare_paths)
        for (std::size_t i = 1; i + 1 < p.vertices.size(); ++i) interior[p.vertices[i]] = 1;
    std::vector<Edge> forest_edges;
    for (auto [x, y] : t.edges())
        if (!interior[x] && !interior[y]) forest_edges.emplace_back(x, y);
    for (const auto& p : plan.bare_paths) forest_edges.emplace_back(p.front(), p.back());
    const Graph forest = Graph::from_edges(n, forest_edges);
    json bp = json::array();
    for (const auto& p : plan.bare_paths) bp.push_back({p.front(), p.back()});
    trace["bare_paths"] = bp;
    steps.push_back("bare-paths");

    // step 1: reserved sets
    const double rlo = cfg.r_band_lo, rhi = cfg.r_band_hi;
    std::vector<SetSpec> specs{{"R3", kr, rlo, rhi},       {"R4", kr, rlo, rhi},       {"R1", kr, rlo, rhi},
                               {"R2", kr, 0, 0, 1},        {"R0", plan.r0_size, 0, 0}, {"V", plan.v_size, cfg.v_band_lo, cfg.v_band_hi}};
    const ReservedSets rs = sample_reserved_sets(g, specs, cfg.residual_factor, cfg.reserve_retries, derive_seed(seed, 2));
    const auto &r0 = rs.at("R0"), &r1 = rs.at("R1"), &r2 = rs.at("R2"), &r3 = rs.at("R3"), &r4 = rs.at("R4"),
               &vres = rs.at("V");
    trace["reserved"] = {{"R0", r0.size()}, {"R1", r1.size()}, {"R2", r2.size()}, {"R3", r3.size()},
                         {"R4", r4.size()}, {"V", vres.size()},  {"tries", rs.tries}};
    steps.push_back("reserve");

    // step 2: template between R3 and R4
    ExtendableState st = fresh_state(g, cfg, join_m, derive_seed(seed, 3));
    std::vector<char> blocked = mask_of(n, {&r0, &r1, &r2, &vres});
    std::vector<char> allowed(n);
    for (Vertex v = 0; v < n; ++v) allowed[v] = !blocked[v];
    st.restrict_to(allowed);
    for (Vertex v : r3) st.s.add_vertex(v);
    for (Vertex v : r4) st.s.add_vertex(v);
    const RoutingTemplate tmpl = build_template(kr, plan.k_gadget, std::nullopt, cfg.provider);
    const std::vector<Vertex> tmap = embed_template(st, tmpl, r3, r4, connect_options(cfg));
    trace["template"] = {{"registers", kr},
                         {"k", tmpl.k},
                         {"depth", tmpl.depth()},
                         {"path_length", tmpl.ell},
                         {"vertices", tmpl.graph.vertex_count()}};
    steps.push_back("template");

    // step 3: the contracted forest, avoiding every reserved set
    for (Vertex v : r1) st.s.add_vertex(v);
    for (Vertex v : r2) st.s.add_vertex(v);
    Vertex root = 0;
    while (interior[root]) ++root;
    const Vertex root_image = random_free(st, rng);
    st.s.add_vertex(root_image);
    try {
        embed_tree(st, forest, root, root_image);
    } catch (const NoExtension& e) {
        throw StepFailure("forest", e.what());
    }
    for (const auto& p : plan.bare_paths) st.s.remove_edge(st.image(p.front()), st.image(p.back()));
    trace["forest"] = {{"vertices", st.embedding().size()}, {"pool", plan.pool}, {"load", plan.load}};
    steps.push_back("forest");

    // step 4: connectors of length t'
    for (Vertex v : r0) st.allow(v);
    for (Vertex v : vres) st.allow(v);
    std::vector<Path> left(kr), right(kr);
    for (std::size_t i = 0; i < kr; ++i) {
        const auto& p = plan.bare_paths[i];
        try {
            left[i] = connect(st, st.image(p.front()), r1[i], plan.t_prime, connect_options(cfg));
            right[i] = connect(st, st.image(p.back()), r2[i], plan.t_prime, connect_options(cfg));
        } catch (const ConnectFailure& e) {
            throw StepFailure("connect", e.what());
        }
    }
    trace["connect"] = {{"paths", 2 * kr}, {"length", plan.t_prime}};
    steps.push_back("connect");

    // step 5: matching chain R1 -> V'_1 -> ... -> V'_m -> R3 and R2 -> R4
    std::vector<Vertex> rest;
    for (Vertex v = 0; v < n; ++v)
        if (!st.s.contains(v)) rest.push_back(v);
    if (rest.size() != kr * plan.num_levels)
        throw Error("leftover count " + std::to_string(rest.size()) + " differs from " +
                    std::to_string(kr * plan.num_levels));
    ChainCoverOptions co;
    co.restarts = cfg.chain_restarts;
    auto cover = chain_cover(g, rest, r1, r3, rng, co);
    if (!cover) throw StepFailure("matching", "no equal-length chain cover of the " + std::to_string(rest.size()) +
                                                  " leftover vertices");
    const std::size_t m = plan.num_levels;
    std::vector<Matching> chain_matchings(m + 1);
    for (std::size_t i = 0; i < kr; ++i) {
        const auto& c = cover->chains[i];
        chain_matchings[0].pairs.emplace_back(r1[i], c.front());
        for (std::size_t j = 1; j < m; ++j) chain_matchings[j].pairs.emplace_back(c[j - 1], c[j]);
        chain_matchings[m].pairs.emplace_back(c.back(), r3[cover->end_index[i]]);
    }
    Matching r2r4;
    for (std::size_t i = 0; i < kr; ++i) r2r4.pairs.emplace_back(r2[i], r4[i]);
    for (const auto& mt : chain_matchings)
        if (auto c = is_valid_matching(g, mt); !c.ok) throw StepFailure("matching", c.diagnostic);
    if (auto c = is_valid_matching(g, r2r4); !c.ok) throw StepFailure("matching", c.diagnostic);
    PathFactor chain_factor;
    for (std::size_t i = 0; i < kr; ++i) {
        Path p{{r1[i]}};
        p.vertices.insert(p.vertices.end(), cover->chains[i].begin(), cover->chains[i].end());
        p.vertices.push_back(r3[cover->end_index[i]]);
        chain_factor.paths.push_back(std::move(p));
    }
    chain_factor.target_set = rest;
    for (std::size_t i = 0; i < kr; ++i) {
        chain_factor.target_set.push_back(r1[i]);
        chain_factor.target_set.push_back(r3[i]);
    }
    std::vector<Edge> endpoint_pairs;
    for (std::size_t i = 0; i < kr; ++i) endpoint_pairs.emplace_back(r1[i], r3[cover->end_index[i]]);
    if (auto c = is_valid_path_factor(g, chain_factor, endpoint_pairs); !c.ok) throw StepFailure("matching", c.diagnostic);
    trace["matching"] = {{"levels", m}, {"matchings", m + 2}, {"level_size", kr}};
    steps.push_back("matching");

    // step 6: route R3 -> R4 through the template
    std::vector<std::size_t> phi(kr);
    for (std::size_t i = 0; i < kr; ++i) phi[cover->end_index[i]] = i;
    const PathFactor routed = route(tmpl, phi);
    std::vector<Vertex> map(n, kNoVertex);
    for (auto [x, h] : st.embedding()) map[x] = h;
    for (std::size_t i = 0; i < kr; ++i) {
        std::vector<Vertex> seq = left[i].vertices;
        seq.insert(seq.end(), cover->chains[i].begin(), cover->chains[i].end());
        for (Vertex x : routed.paths[cover->end_index[i]].vertices) seq.push_back(tmap[x]);
        for (auto it = right[i].vertices.rbegin(); it != right[i].vertices.rend(); ++it) seq.push_back(*it);
        const auto& bare = plan.bare_paths[i].vertices;
        if (seq.size() != bare.size())
            throw Error("bare path " + std::to_string(i) + " realised with " + std::to_string(seq.size() - 1) +
                        " edges instead of " + std::to_string(bare.size() - 1));
        for (std::size_t j = 0; j < bare.size(); ++j) map[bare[j]] = seq[j];
    }
    json route_json = json::array();
    for (std::size_t v : phi) route_json.push_back(v);
    trace["route"] = {{"phi", route_json}};
    steps.push_back("route");
    trace["steps"] = steps;
    return map;
}

inline std::vector<Vertex> many_leaves_attempt(const Graph& g, const Graph& t, const PipelineConfig& cfg,
                                               std::size_t join_m, std::uint64_t seed, json& trace) {
    const std::size_t n = g.vertex_count();
    std::vector<Vertex> leaves, parent(n, kNoVertex);
    for (Vertex v = 0; v < n; ++v)
        if (t.degree(v) == 1) {
            leaves.push_back(v);
            parent[v] = t.neighbors(v)[0];
        }
    std::vector<char> is_leaf(n, 0);
    for (Vertex v : leaves) is_leaf[v] = 1;
    std::vector<Edge> core_edges;
    for (auto [x, y] : t.edges())
        if (!is_leaf[x] && !is_leaf[y]) core_edges.emplace_back(x, y);
    const Graph core = Graph::from_edges(n, core_edges);
    const std::size_t core_n = n - leaves.size();
    const double slack_share = std::max(0.0, 1.0 / std::max(cfg.max_load, 1e-9) - 1.0);
    const std::size_t slack =
        std::min(leaves.size(), static_cast<std::size_t>(std::ceil(slack_share * static_cast<double>(core_n))));
    const std::size_t x_size = leaves.size() - slack;
    std::vector<SetSpec> specs{{"X", x_size, 0, 0}};
    const ReservedSets rs = sample_reserved_sets(g, specs, 0.0, cfg.reserve_retries, derive_seed(seed, 2));
    trace["reserved"] = {{"X", x_size}, {"tries", rs.tries}};

    ExtendableState st = fresh_state(g, cfg, join_m, derive_seed(seed, 3));
    std::vector<char> allowed(n, 1);
    for (Vertex v : rs.at("X")) allowed[v] = 0;
    st.restrict_to(allowed);
    Rng rng(derive_seed(seed, 1));
    Vertex root = 0;
    while (is_leaf[root]) ++root;
    const Vertex root_image = random_free(st, rng);
    st.s.add_vertex(root_image);
    try {
        embed_tree(st, core, root, root_image);
    } catch (const NoExtension& e) {
        throw StepFailure("forest", e.what());
    }
    trace["forest"] = {{"vertices", core_n}, {"leaves", leaves.size()}};

    std::vector<Vertex> rest;
    for (Vertex v = 0; v < n; ++v)
        if (!st.s.contains(v)) rest.push_back(v);
    const std::size_t L = leaves.size();
    if (rest.size() != L) throw Error("leftover count differs from the leaf count");
    std::vector<Edge> aux;
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = 0; j < L; ++j)
            if (g.has_edge(st.image(parent[leaves[i]]), rest[j]))
                aux.emplace_back(static_cast<Vertex>(i), static_cast<Vertex>(L + j));
    const Graph bip = Graph::from_edges(2 * L, aux);
    std::vector<Vertex> slots(L), hosts(L);
    std::iota(slots.begin(), slots.end(), 0);
    std::iota(hosts.begin(), hosts.end(), static_cast<Vertex>(L));
    auto res = hall_matching(bip, slots, hosts);
    if (auto* hv = std::get_if<HallViolator>(&res))
        throw StepFailure("leaf-matching", "Hall violator: " + std::to_string(hv->set.size()) + " leaves see only " +
                                               std::to_string(hv->neighborhood.size()) + " free vertices");
    std::vector<Vertex> map(n, kNoVertex);
    for (auto [x, h] : st.embedding()) map[x] = h;
    for (auto [slot, host] : std::get<Matching>(res).pairs) map[leaves[slot]] = rest[host - L];
    trace["matching"] = {{"leaves", L}};
    trace["steps"] = {"reserve", "forest", "leaf-matching"};
    return map;
}

inline void validate_host(const Graph& g) {
    if (g.vertex_count() == 0) throw PreconditionError("empty host");
    if (!g.is_regular()) throw PreconditionError("host must be regular");
    if (!is_connected(g)) throw PreconditionError("host must be connected");
}

}  // namespace detail

inline EmbeddingResult embed_spanning_tree(const Graph& g, const Graph& t, const PipelineConfig& cfg,
                                           const SpectralReport* known = nullptr) {
    const std::size_t n = g.vertex_count();
    if (t.vertex_count() != n) throw PreconditionError("tree and host must have the same number of vertices");
    if (!is_tree(t)) throw PreconditionError("target is not a tree");
    detail::validate_host(g);
    if (2 * t.max_degree() > cfg.D) throw PreconditionError("tree maximum degree exceeds D/2");

    EmbeddingResult res;
    const SpectralReport rep = known ? *known : second_eigenvalue(g);
    const std::size_t join_m = resolve_join_m(cfg, g, rep);
    res.trace = {{"schema", "v1"}, {"host", detail::spectral_json(rep)}, {"join_m", join_m}, {"seed", cfg.seed}};

    if (n <= 2) {
        res.map.resize(n);
        for (Vertex v = 0; v < n; ++v) res.map[v] = v;
        res.trace["method"] = "trivial";
        return res;
    }

    std::string why;
    auto plan = plan_bare_route(t, cfg, join_m, &why);
    if (!plan && !cfg.many_leaves_fallback)
        throw BarePathDeficit("tree lacks the bare paths the configuration needs (" + why + ")");
    if (plan) {
        res.trace["method"] = "bare-paths";
        res.trace["plan"] = {{"registers", plan->registers},     {"k_gadget", plan->k_gadget},
                             {"t_prime", plan->t_prime},         {"num_levels", plan->num_levels},
                             {"bare_length", plan->bare_length}, {"template_length", plan->template_length},
                             {"v_size", plan->v_size},           {"r0_size", plan->r0_size}};
    } else {
        res.trace["method"] = "many-leaves";
        res.trace["plan"] = {{"reason", why}};
    }

    std::string last_step = "plan", last_what;
    json failures = json::array();
    for (std::size_t a = 0; a < cfg.attempts; ++a) {
        const std::uint64_t seed = derive_seed(cfg.seed, a);
        json trace;
        try {
            auto map = plan ? detail::bare_route_attempt(g, t, cfg, *plan, join_m, seed, trace)
                            : detail::many_leaves_attempt(g, t, cfg, join_m, seed, trace);
            if (auto c = verify_embedding(g, t, map); !c.ok) throw StepFailure("verify", c.diagnostic);
            res.map = std::move(map);
            res.trace["attempt"] = a;
            res.trace["failures"] = failures;
            for (auto& [k, v] : trace.items()) res.trace[k] = v;
            return res;
        } catch (const StepFailure& e) {
            last_step = e.step();
            last_what = e.what();
        }
        failures.push_back({{"attempt", a}, {"step", last_step}, {"error", last_what}});
    }
    res.trace["failures"] = failures;
    throw PipelineFailure(last_step, "all " + std::to_string(cfg.attempts) + " attempts failed; last: " + last_what,
                          res.trace);
}

// ---------------------------------------------------------------- cycle factor

struct CycleFactorResult {
    std::vector<std::vector<Vertex>> cycles;
    json trace;
};

inline CycleFactorResult cycle_factor(const Graph& g, std::size_t k_cycle, const PipelineConfig& cfg,
                                      const SpectralReport* known = nullptr) {
    const std::size_t n = g.vertex_count();
    if (k_cycle < 3) throw PreconditionError("cycle length must be at least 3");
    if (n % k_cycle != 0) throw PreconditionError("cycle length " + std::to_string(k_cycle) + " does not divide " +
                                                  std::to_string(n));
    detail::validate_host(g);
    CycleFactorResult out;
    out.trace = {{"schema", "v1"}, {"k_cycle", k_cycle}, {"seed", cfg.seed}};
    const std::size_t r = n / k_cycle;

    if (r == 1 && g.max_degree() == 2) {
        std::vector<Vertex> cyc{0};
        Vertex prev = kNoVertex, cur = 0;
        while (cyc.size() < n) {
            Vertex next = g.neighbors(cur)[0] == prev ? g.neighbors(cur)[1] : g.neighbors(cur)[0];
            cyc.push_back(next);
            prev = cur;
            cur = next;
        }
        out.cycles.push_back(std::move(cyc));
        out.trace["method"] = "host-cycle";
        return out;
    }

    const SpectralReport rep = known ? *known : second_eigenvalue(g);
    const std::size_t join_m = resolve_join_m(cfg, g, rep);
    out.trace["host"] = detail::spectral_json(rep);
    const std::size_t kg = resolve_k_gadget(cfg, n);
    std::size_t lt = 0;
    bool templated = r >= 2;
    if (templated) {
        lt = natural_template_length(build_network(cfg.provider, r).depth(), kg);
        templated = k_cycle >= lt + 2;
    }
    ChainCoverOptions co;
    co.restarts = cfg.chain_restarts;
    std::string last_step, last_what;
    json failures = json::array();
    for (std::size_t a = 0; a < cfg.attempts; ++a) {
        const std::uint64_t seed = derive_seed(cfg.seed, a);
        Rng rng(derive_seed(seed, 1));
        try {
            std::vector<std::vector<Vertex>> cycles;
            json trace;
            if (!templated) {
                std::vector<Vertex> all(n);
                std::iota(all.begin(), all.end(), 0);
                auto c = closed_chain_cover(g, all, k_cycle, rng, co);
                if (!c) throw StepFailure("cycles", "no direct cover by " + std::to_string(r) + " cycles");
                cycles = std::move(*c);
                trace["method"] = "direct";
            } else {
                const std::size_t w = n - r * (lt + 1);
                const std::size_t v_size = static_cast<std::size_t>(cfg.level_reserve_fraction * static_cast<double>(w));
                std::vector<SetSpec> specs{{"V1", r, cfg.r_band_lo, cfg.r_band_hi},
                                           {"V2", r, cfg.r_band_lo, cfg.r_band_hi},
                                           {"V", v_size, cfg.v_band_lo, cfg.v_band_hi}};
                const ReservedSets rs =
                    sample_reserved_sets(g, specs, cfg.residual_factor, cfg.reserve_retries, derive_seed(seed, 2));
                const auto &v1 = rs.at("V1"), &v2 = rs.at("V2"), &vres = rs.at("V");
                ExtendableState st = detail::fresh_state(g, cfg, join_m, derive_seed(seed, 3));
                std::vector<char> allowed(n, 1);
                for (Vertex v : vres) allowed[v] = 0;
                st.restrict_to(allowed);
                for (Vertex v : v1) st.s.add_vertex(v);
                for (Vertex v : v2) st.s.add_vertex(v);
                const RoutingTemplate tmpl = build_template(r, kg, std::nullopt, cfg.provider);
                const auto tmap = embed_template(st, tmpl, v1, v2, detail::connect_options(cfg));
                std::vector<Vertex> rest;
                for (Vertex v = 0; v < n; ++v)
                    if (!st.s.contains(v)) rest.push_back(v);
                auto cover = chain_cover(g, rest, v2, v1, rng, co);
                if (!cover) throw StepFailure("matching", "no equal-length chain cover of the leftover vertices");
                std::vector<std::size_t> phi(r);
                for (std::size_t i = 0; i < r; ++i) phi[cover->end_index[i]] = i;
                const PathFactor routed = route(tmpl, phi);
                for (std::size_t i = 0; i < r; ++i) {
                    std::vector<Vertex> cyc;
                    for (Vertex x : routed.paths[cover->end_index[i]].vertices) cyc.push_back(tmap[x]);
                    cyc.insert(cyc.end(), cover->chains[i].begin(), cover->chains[i].end());
                    cycles.push_back(std::move(cyc));
                }
                json phi_json = json::array();
                for (std::size_t v : phi) phi_json.push_back(v);
                trace["method"] = "template";
                trace["template"] = {{"registers", r},
                                     {"k", tmpl.k},
                                     {"depth", tmpl.depth()},
                                     {"path_length", tmpl.ell},
                                     {"vertices", tmpl.graph.vertex_count()}};
                trace["reserved"] = {{"V1", r}, {"V2", r}, {"V", v_size}, {"tries", rs.tries}};
                trace["route"] = {{"phi", phi_json}};
            }
            if (auto c = verify_cycle_factor(g, cycles, k_cycle); !c.ok) throw StepFailure("verify", c.diagnostic);
            out.cycles = std::move(cycles);
            for (auto& [k, v] : trace.items()) out.trace[k] = v;
            out.trace["attempt"] = a;
            out.trace["failures"] = failures;
            return out;
        } catch (const StepFailure& e) {
            last_step = e.step();
            last_what = e.what();
        }
        failures.push_back({{"attempt", a}, {"step", last_step}, {"error", last_what}});
    }
    out.trace["failures"] = failures;
    throw PipelineFailure(last_step, "all " + std::to_string(cfg.attempts) + " attempts failed; last: " + last_what,
                          out.trace);
}

}  // namespace spanemb
