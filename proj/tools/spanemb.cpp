#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "spanemb/generators.hpp"
#include "spanemb/io.hpp"
#include "spanemb/pipeline.hpp"
#include "spanemb/spectral.hpp"

using namespace spanemb;

namespace {

constexpr std::uint64_t kDefaultSeed = 1;

std::vector<std::size_t> parse_list(const std::string& s, const char* what) {
    std::vector<std::size_t> out;
    std::stringstream in(s);
    std::string tok;
    std::size_t col = 1;
    while (std::getline(in, tok, ',')) {
        std::size_t used = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != tok.size())
            throw ParseError(what, 1, col + used, "expected a comma-separated list of positive integers");
        out.push_back(v);
        col += tok.size() + 1;
    }
    return out;
}

Graph load_graph(const std::string& path) { return graph_from_json(parse_json(read_file(path), path)); }

void emit(const std::string& out, const json& j) {
    if (out.empty())
        std::cout << dump(j);
    else
        write_atomic(out, dump(j));
}

void emit_text(const std::string& out, const std::string& text) {
    if (out.empty())
        std::cout << text;
    else
        write_atomic(out, text);
}

PipelineConfig load_config(const std::string& path, std::optional<std::uint64_t> seed) {
    PipelineConfig cfg;
    if (!path.empty()) {
        try {
            cfg = parse_config(read_file(path));
        } catch (const ConfigParseError& e) {
            throw PreconditionError(path + ": " + e.what());
        }
    }
    if (seed) cfg.seed = *seed;
    return cfg;
}

NetworkProvider provider_flag(const std::string& s) { return provider_from_string(s); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spanning-tree and cycle-factor embedding in pseudorandom regular graphs"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    // spectra
    std::string sp_host, sp_out;
    double sp_tol = 1e-6;
    auto* spectra = app.add_subcommand("spectra", "Second eigenvalue report of a host graph");
    spectra->add_option("--host", sp_host, "Graph JSON")->required()->check(CLI::ExistingFile);
    spectra->add_option("--tol", sp_tol, "Residual tolerance")->capture_default_str();
    spectra->add_option("--out", sp_out, "Write JSON here instead of standard output");

    // network
    std::string nw_builder = "odd_even", nw_mode = "zero-one", nw_perm, nw_out, nw_in;
    std::size_t nw_n = 0;
    auto* network = app.add_subcommand("network", "Comparison networks");
    network->require_subcommand(1);
    auto add_source = [&](CLI::App* c) {
        c->add_option("--builder", nw_builder, "odd_even (odd-even) or brickwall")->capture_default_str();
        c->add_option("--n", nw_n, "Register count");
        c->add_option("--in", nw_in, "Network JSON instead of a builder")->check(CLI::ExistingFile);
    };
    auto* nw_build = network->add_subcommand("build", "Emit a network as JSON");
    add_source(nw_build);
    nw_build->add_option("--out", nw_out, "Output file");
    auto* nw_verify = network->add_subcommand("verify", "Check the sorting property");
    add_source(nw_verify);
    nw_verify->add_option("--mode", nw_mode, "zero-one or perms")
        ->check(CLI::IsMember({"zero-one", "perms"}))
        ->capture_default_str();
    auto* nw_apply = network->add_subcommand("apply", "Run a network on an assignment");
    add_source(nw_apply);
    nw_apply->add_option("--perm", nw_perm, "Assignment of values 1..n, e.g. 2,1,4,3")->required();
    nw_apply->add_option("--out", nw_out, "Output file");

    // gadget
    std::size_t gd_k = 6;
    std::string gd_out, gd_dot;
    auto* gadget = app.add_subcommand("gadget", "Build and verify a comparator gadget");
    gadget->add_option("--k", gd_k, "Gadget size, k = 2 mod 4")->capture_default_str();
    gadget->add_option("--out", gd_out, "JSON output");
    gadget->add_option("--dot", gd_dot, "DOT output with P1 red and Q1 blue");

    // route
    std::size_t rt_regs = 4, rt_k = 2;
    std::string rt_phi, rt_builder = "odd_even", rt_out, rt_dot, rt_tmpl_out;
    auto* route_cmd = app.add_subcommand("route", "Route a bijection through a routing template");
    route_cmd->add_option("--registers", rt_regs, "Register count")->capture_default_str();
    route_cmd->add_option("--k", rt_k, "Gadget size")->capture_default_str();
    route_cmd->add_option("--phi", rt_phi, "Image indices 1..n, a_j -> b_phi(j), e.g. 4,1,2,3")->required();
    route_cmd->add_option("--builder", rt_builder, "Network builder")->capture_default_str();
    route_cmd->add_option("--out", rt_out, "Factor JSON output");
    route_cmd->add_option("--template-out", rt_tmpl_out, "Template JSON output");
    route_cmd->add_option("--dot", rt_dot, "DOT output with one color per path");

    // gen-host
    std::size_t gh_n = 0, gh_d = 0;
    std::uint64_t gh_seed = kDefaultSeed;
    std::string gh_out;
    auto* gen_host = app.add_subcommand("gen-host", "Random regular host graph");
    gen_host->add_option("--n", gh_n, "Vertices")->required();
    gen_host->add_option("--d", gh_d, "Degree")->required();
    gen_host->add_option("--seed", gh_seed, "Seed")->capture_default_str();
    gen_host->add_option("--out", gh_out, "Output file");

    // gen-tree
    std::string gt_kind = "path", gt_out;
    std::size_t gt_n = 0, gt_cap = 4, gt_spacing = 3, gt_legs = 0;
    std::uint64_t gt_seed = kDefaultSeed;
    auto* gen_tree = app.add_subcommand("gen-tree", "Target tree");
    gen_tree->add_option("--kind", gt_kind, "path, caterpillar, broom, random_bounded or spider")->capture_default_str();
    gen_tree->add_option("--n", gt_n, "Vertices")->required();
    gen_tree->add_option("--max-deg", gt_cap, "Degree cap")->capture_default_str();
    gen_tree->add_option("--seed", gt_seed, "Seed")->capture_default_str();
    gen_tree->add_option("--spacing", gt_spacing, "Caterpillar spine spacing")->capture_default_str();
    gen_tree->add_option("--legs", gt_legs, "Spider legs, 0 = degree cap")->capture_default_str();
    gen_tree->add_option("--out", gt_out, "Output file");

    // embed
    std::string em_host, em_tree, em_config, em_out;
    std::optional<std::uint64_t> em_seed;
    auto* embed = app.add_subcommand("embed", "Embed a spanning tree into a host");
    embed->add_option("--host", em_host, "Host graph JSON")->required()->check(CLI::ExistingFile);
    embed->add_option("--tree", em_tree, "Tree JSON")->required()->check(CLI::ExistingFile);
    embed->add_option("--config", em_config, "key=value configuration")->check(CLI::ExistingFile);
    embed->add_option("--seed", em_seed, "Overrides the configured seed");
    embed->add_option("--out", em_out, "Embedding JSON output");

    // verify
    std::string vf_host, vf_tree, vf_map;
    auto* verify = app.add_subcommand("verify", "Check an embedding");
    verify->add_option("--host", vf_host, "Host graph JSON")->required()->check(CLI::ExistingFile);
    verify->add_option("--tree", vf_tree, "Tree JSON")->required()->check(CLI::ExistingFile);
    verify->add_option("--map", vf_map, "Embedding JSON")->required()->check(CLI::ExistingFile);

    // cycle-factor
    std::string cf_host, cf_config, cf_out;
    std::size_t cf_k = 0;
    std::optional<std::uint64_t> cf_seed;
    auto* cycle = app.add_subcommand("cycle-factor", "Cover a host by vertex-disjoint cycles of one length");
    cycle->add_option("--host", cf_host, "Host graph JSON")->required()->check(CLI::ExistingFile);
    cycle->add_option("--k", cf_k, "Cycle length")->required();
    cycle->add_option("--config", cf_config, "key=value configuration")->check(CLI::ExistingFile);
    cycle->add_option("--seed", cf_seed, "Overrides the configured seed");
    cycle->add_option("--out", cf_out, "Cycle factor JSON output");

    // export-dot
    std::string ed_in, ed_out, ed_map;
    auto* export_dot = app.add_subcommand("export-dot", "DOT rendering of a graph, gadget or template JSON");
    export_dot->add_option("--in", ed_in, "Graph, gadget or template JSON")->required()->check(CLI::ExistingFile);
    export_dot->add_option("--factor", ed_map, "Factor or cycle factor JSON to color")->check(CLI::ExistingFile);
    export_dot->add_option("--out", ed_out, "Output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*spectra) {
            const Graph g = load_graph(sp_host);
            const SpectralReport r = second_eigenvalue(g, sp_tol);
            json j = detail::spectral_json(r);
            j["schema"] = kSchema;
            j["lambda_top"] = r.lambda_top;
            j["residual"] = r.residual;
            j["method"] = r.method == SpectralMethod::Dense ? "dense" : "iterative";
            j["lower_bound"] = spectral_lower_bound(r);
            std::cerr << "lambda_hat: " << r.lambda_hat << ", d: " << r.d << "\n";
            emit(sp_out, j);
        } else if (*network) {
            auto source = [&]() {
                if (!nw_in.empty()) return network_from_json(parse_json(read_file(nw_in), nw_in));
                if (nw_n == 0) throw PreconditionError("--n or --in is required");
                return build_network(provider_flag(nw_builder), nw_n);
            };
            const ComparisonNetwork net = source();
            if (*nw_build) {
                emit(nw_out, to_json(net));
            } else if (*nw_verify) {
                const bool ok = is_sorting_network(net, nw_mode == "perms" ? SortCheck::Permutations : SortCheck::ZeroOne);
                std::cout << "sorting: " << (ok ? "true" : "false") << ", depth: " << net.depth() << "\n";
                return ok ? 0 : 1;
            } else if (*nw_apply) {
                const auto perm = parse_list(nw_perm, "--perm");
                const NetworkRun run = apply_network(net, perm);
                json swaps = json::array();
                for (const auto& l : run.swaps) swaps.push_back(l);
                emit(nw_out, {{"schema", kSchema}, {"final", run.final}, {"swaps", swaps}});
            }
        } else if (*gadget) {
            const Gadget g = build_gadget(gd_k);
            const GadgetReport rep = verify_gadget(g);
            std::cerr << "gadget k=" << g.k << ": " << g.graph.vertex_count() << " vertices, "
                      << (rep.ok() ? "all properties hold" : "property failed: " + rep.first_failure()->property)
                      << "\n";
            if (!gd_dot.empty()) {
                std::map<Edge, std::string> colors;
                color_path(colors, g.p1, "red");
                color_path(colors, g.q1, "blue");
                write_atomic(gd_dot, to_dot(g.graph, "gadget", colors));
            }
            emit(gd_out, to_json(g));
            if (!rep.ok()) return 3;
        } else if (*route_cmd) {
            const NetworkProvider p = provider_flag(rt_builder);
            const RoutingTemplate t = build_template(rt_regs, rt_k, std::nullopt, p);
            auto phi = parse_list(rt_phi, "--phi");
            for (auto& v : phi) {
                if (v == 0) throw PreconditionError("--phi entries start at 1");
                --v;
            }
            const PathFactor f = route(t, phi);
            std::vector<Edge> pairs;
            for (std::size_t j = 0; j < phi.size(); ++j) pairs.emplace_back(t.a[j], t.b[phi[j]]);
            const Check c = is_valid_path_factor(t.graph, f, pairs);
            std::cerr << "template: " << t.graph.vertex_count() << " vertices, path length " << t.ell
                      << ", factor " << (c.ok ? "valid" : "invalid: " + c.diagnostic) << "\n";
            json j = to_json(f);
            j["registers"] = rt_regs;
            j["k"] = t.k;
            j["ell"] = t.ell;
            j["phi"] = parse_list(rt_phi, "--phi");
            j["a"] = t.a;
            j["b"] = t.b;
            if (!rt_tmpl_out.empty()) write_atomic(rt_tmpl_out, dump(to_json(t, p)));
            if (!rt_dot.empty()) {
                std::map<Edge, std::string> colors;
                for (std::size_t i = 0; i < f.paths.size(); ++i)
                    color_path(colors, f.paths[i], dot_palette()[i % dot_palette().size()]);
                write_atomic(rt_dot, to_dot(t.graph, "template", colors));
            }
            emit(rt_out, j);
            if (!c.ok) return 3;
        } else if (*gen_host) {
            emit(gh_out, to_json(generate_random_regular(gh_n, gh_d, gh_seed)));
        } else if (*gen_tree) {
            emit(gt_out, to_json(generate_tree(tree_kind_from_string(gt_kind), gt_n, gt_cap, gt_seed,
                                               TreeOptions{gt_spacing, gt_legs})));
        } else if (*embed) {
            const Graph g = load_graph(em_host);
            const Graph t = load_graph(em_tree);
            const PipelineConfig cfg = load_config(em_config, em_seed);
            try {
                auto r = embed_spanning_tree(g, t, cfg);
                std::cerr << "embedded " << t.vertex_count() << " vertices via " << r.trace["method"].get<std::string>()
                          << "\n";
                emit(em_out, embedding_json(r.map, r.trace));
            } catch (const PipelineFailure& e) {
                if (!em_out.empty()) write_atomic(em_out, dump({{"schema", kSchema}, {"error", e.what()}, {"trace", e.trace()}}));
                throw;
            }
        } else if (*verify) {
            const Graph g = load_graph(vf_host);
            const Graph t = load_graph(vf_tree);
            const EmbeddingFile e = embedding_from_json(parse_json(read_file(vf_map), vf_map));
            const Check c = verify_embedding(g, t, e.map);
            std::cout << (c.ok ? "valid" : "invalid: " + c.diagnostic) << "\n";
            return c.ok ? 0 : 1;
        } else if (*cycle) {
            const Graph g = load_graph(cf_host);
            const PipelineConfig cfg = load_config(cf_config, cf_seed);
            auto r = cycle_factor(g, cf_k, cfg);
            std::cerr << r.cycles.size() << " cycles of length " << cf_k << " via "
                      << r.trace["method"].get<std::string>() << "\n";
            emit(cf_out, cycles_json(cf_k, r.cycles, r.trace));
        } else if (*export_dot) {
            const json j = parse_json(read_file(ed_in), ed_in);
            Graph g;
            std::string name = "G";
            if (j.contains("edges")) {
                g = graph_from_json(j);
            } else if (j.contains("graph")) {
                g = graph_from_json(j["graph"]);
                name = j.contains("registers") ? "template" : "gadget";
            } else {
                throw PreconditionError(ed_in + ": not a graph, gadget or template JSON");
            }
            std::map<Edge, std::string> colors;
            if (j.contains("paths") && j["paths"].is_object()) {
                color_path(colors, Path{j["paths"]["P1"].get<std::vector<Vertex>>()}, "red");
                color_path(colors, Path{j["paths"]["Q1"].get<std::vector<Vertex>>()}, "blue");
            }
            if (!ed_map.empty()) {
                const json f = parse_json(read_file(ed_map), ed_map);
                const auto key = f.contains("cycles") ? "cycles" : "paths";
                const auto seqs = detail::field<std::vector<std::vector<Vertex>>>(f, key, "factor");
                for (std::size_t i = 0; i < seqs.size(); ++i) {
                    Path p{seqs[i]};
                    if (f.contains("cycles") && !seqs[i].empty()) p.vertices.push_back(seqs[i].front());
                    color_path(colors, p, dot_palette()[i % dot_palette().size()]);
                }
            }
            emit_text(ed_out, to_dot(g, name, colors));
        }
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const StepFailure& e) {
        std::cerr << "step failed: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "step failed: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
