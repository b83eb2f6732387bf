#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unistd.h>

#include <json.hpp>

#include "spanemb/gadget.hpp"
#include "spanemb/graph.hpp"
#include "spanemb/routing_template.hpp"
#include "spanemb/sorting_network.hpp"

namespace spanemb {

using json = nlohmann::json;

inline constexpr const char* kSchema = "v1";

class ParseError : public PreconditionError {
public:
    ParseError(std::string source, std::size_t line, std::size_t column, const std::string& what)
        : PreconditionError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_, column_;
};

// ---------------------------------------------------------------- files

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PreconditionError("cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// temp file in the target directory, then rename over the target
inline void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp." + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw PreconditionError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw PreconditionError("short write to " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw PreconditionError("cannot rename onto " + path);
    }
}

// nlohmann reports a byte offset; callers get line and column
inline json parse_json(const std::string& text, const std::string& source = "<json>") {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string msg = e.what();
        if (auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
        throw ParseError(source, line, col, msg);
    }
}

inline std::string dump(const json& j) { return j.dump(1) + "\n"; }

namespace detail {

inline void require_schema(const json& j, const char* kind) {
    if (!j.is_object()) throw PreconditionError(std::string(kind) + " JSON must be an object");
    if (j.contains("schema") && j["schema"] != kSchema)
        throw PreconditionError(std::string(kind) + " JSON has unsupported schema " + j["schema"].dump());
}

template <class T>
T field(const json& j, const char* key, const char* kind) {
    if (!j.contains(key)) throw PreconditionError(std::string(kind) + " JSON lacks \"" + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw PreconditionError(std::string(kind) + " JSON field \"" + key + "\" has the wrong type");
    }
}

inline json path_json(const Path& p) { return p.vertices; }

}  // namespace detail

// ---------------------------------------------------------------- graphs

inline json to_json(const Graph& g) {
    json edges = json::array();
    for (auto [u, v] : g.edges()) edges.push_back({u, v});
    return {{"schema", kSchema}, {"n", g.vertex_count()}, {"edges", edges}};
}

inline Graph graph_from_json(const json& j) {
    detail::require_schema(j, "graph");
    const auto n = detail::field<std::size_t>(j, "n", "graph");
    const auto raw = detail::field<std::vector<std::vector<std::int64_t>>>(j, "edges", "graph");
    std::vector<Edge> edges;
    edges.reserve(raw.size());
    for (const auto& e : raw) {
        if (e.size() != 2 || e[0] < 0 || e[1] < 0) throw PreconditionError("graph JSON edges must be pairs of ids");
        edges.emplace_back(static_cast<Vertex>(e[0]), static_cast<Vertex>(e[1]));
    }
    return Graph::from_edges(n, edges);
}

// one edge per line; colors keyed by (min, max) endpoint pair
inline std::string to_dot(const Graph& g, const std::string& name = "G",
                          const std::map<Edge, std::string>& colors = {}) {
    std::ostringstream o;
    o << "graph " << name << " {\n";
    for (Vertex v = 0; v < g.vertex_count(); ++v)
        if (g.degree(v) == 0) o << "  " << v << ";\n";
    for (auto [u, v] : g.edges()) {
        o << "  " << u << " -- " << v;
        if (auto it = colors.find(Edge{u, v}); it != colors.end()) o << " [color=" << it->second << "]";
        o << ";\n";
    }
    o << "}\n";
    return o.str();
}

inline void color_path(std::map<Edge, std::string>& colors, const Path& p, const std::string& color) {
    for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i)
        colors[std::minmax(p.vertices[i], p.vertices[i + 1])] = color;
}

inline const std::vector<std::string>& dot_palette() {
    static const std::vector<std::string> p{"red", "blue", "darkgreen", "orange", "purple", "brown", "magenta", "cyan"};
    return p;
}

// ---------------------------------------------------------------- networks

inline json to_json(const ComparisonNetwork& net) {
    json levels = json::array();
    for (const auto& level : net.levels) {
        json l = json::array();
        for (const auto& c : level) l.push_back({c.lo, c.hi});
        levels.push_back(l);
    }
    return {{"schema", kSchema}, {"n", net.registers}, {"levels", levels}};
}

inline ComparisonNetwork network_from_json(const json& j) {
    detail::require_schema(j, "network");
    ComparisonNetwork net;
    net.registers = detail::field<std::size_t>(j, "n", "network");
    for (const auto& level : detail::field<std::vector<std::vector<std::vector<std::size_t>>>>(j, "levels", "network")) {
        Level l;
        for (const auto& c : level) {
            if (c.size() != 2) throw PreconditionError("network JSON comparators must be pairs");
            l.push_back({c[0], c[1]});
        }
        net.levels.push_back(std::move(l));
    }
    net.validate();
    return net;
}

// ---------------------------------------------------------------- gadgets and templates

inline json to_json(const Gadget& g) {
    return {{"schema", kSchema},
            {"k", g.k},
            {"graph", to_json(g.graph)},
            {"terminals", {{"in1", g.in1}, {"in2", g.in2}, {"out1", g.out1}, {"out2", g.out2}}},
            {"paths",
             {{"P1", detail::path_json(g.p1)},
              {"Q1", detail::path_json(g.q1)},
              {"P2", detail::path_json(g.p2)},
              {"Q2", detail::path_json(g.q2)}}}};
}

// rebuilt from k and checked against the stored graph and paths
inline Gadget gadget_from_json(const json& j) {
    detail::require_schema(j, "gadget");
    Gadget g = build_gadget(detail::field<std::size_t>(j, "k", "gadget"));
    if (!(graph_from_json(detail::field<json>(j, "graph", "gadget")) == g.graph) || to_json(g) != j)
        throw PreconditionError("gadget JSON does not match the construction for k = " + std::to_string(g.k));
    return g;
}

inline json to_json(const PathFactor& f) {
    json paths = json::array();
    for (const auto& p : f.paths) paths.push_back(detail::path_json(p));
    return {{"schema", kSchema}, {"paths", paths}, {"target_set", f.target_set}};
}

inline PathFactor factor_from_json(const json& j) {
    detail::require_schema(j, "factor");
    PathFactor f;
    for (auto& p : detail::field<std::vector<std::vector<Vertex>>>(j, "paths", "factor")) f.paths.push_back(Path{p});
    f.target_set = detail::field<std::vector<Vertex>>(j, "target_set", "factor");
    return f;
}

inline json to_json(const RoutingTemplate& t, NetworkProvider provider) {
    return {{"schema", kSchema},
            {"registers", t.registers()},
            {"k", t.k},
            {"ell", t.ell},
            {"provider", provider == NetworkProvider::OddEven ? "odd_even" : "brickwall"},
            {"network", to_json(t.network)},
            {"a", t.a},
            {"b", t.b},
            {"graph", to_json(t.graph)}};
}

inline RoutingTemplate template_from_json(const json& j) {
    detail::require_schema(j, "template");
    const auto prov = detail::field<std::string>(j, "provider", "template");
    const NetworkProvider p = prov == "brickwall" ? NetworkProvider::Brickwall : NetworkProvider::OddEven;
    RoutingTemplate t = build_template(detail::field<std::size_t>(j, "registers", "template"),
                                       detail::field<std::size_t>(j, "k", "template"),
                                       detail::field<std::size_t>(j, "ell", "template"), p);
    if (to_json(t, p) != j) throw PreconditionError("template JSON does not match its construction parameters");
    return t;
}

// ---------------------------------------------------------------- pipeline outputs

struct EmbeddingFile {
    std::vector<Vertex> map;
    json trace;
    bool operator==(const EmbeddingFile&) const = default;
};

inline json embedding_json(const std::vector<Vertex>& map, const json& trace) {
    return {{"schema", kSchema}, {"map", map}, {"trace", trace}};
}

inline EmbeddingFile embedding_from_json(const json& j) {
    detail::require_schema(j, "embedding");
    return {detail::field<std::vector<Vertex>>(j, "map", "embedding"), j.value("trace", json::object())};
}

struct CycleFile {
    std::size_t k = 0;
    std::vector<std::vector<Vertex>> cycles;
    json trace;
    bool operator==(const CycleFile&) const = default;
};

inline json cycles_json(std::size_t k, const std::vector<std::vector<Vertex>>& cycles, const json& trace) {
    return {{"schema", kSchema}, {"k", k}, {"cycles", cycles}, {"trace", trace}};
}

inline CycleFile cycles_from_json(const json& j) {
    detail::require_schema(j, "cycle factor");
    return {detail::field<std::size_t>(j, "k", "cycle factor"),
            detail::field<std::vector<std::vector<Vertex>>>(j, "cycles", "cycle factor"),
            j.value("trace", json::object())};
}

}  // namespace spanemb
