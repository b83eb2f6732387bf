#include <gtest/gtest.h>

#include <numeric>

#include "spanemb/routing_template.hpp"

using namespace spanemb;

namespace {

std::vector<Edge> pairs_for(const RoutingTemplate& t, const std::vector<std::size_t>& phi) {
    std::vector<Edge> out;
    for (std::size_t j = 0; j < phi.size(); ++j) out.emplace_back(t.a[j], t.b[phi[j]]);
    return out;
}

std::size_t census(std::size_t n_reg, std::size_t depth, std::size_t k) {
    return n_reg * (depth * k * (k - 1) + (depth + 1) * k);
}

}  // namespace

TEST(BuildTemplate, SingleComparator) {
    auto t = build_template(2, 2);
    EXPECT_EQ(t.depth(), 1u);
    EXPECT_EQ(t.graph.vertex_count(), 12u);
    EXPECT_EQ(t.ell, 5u);
    EXPECT_EQ(t.gadgets.size(), 1u);
}

TEST(BuildTemplate, RoundsK) {
    EXPECT_EQ(build_template(2, 3).k, 6u);
    EXPECT_EQ(build_template(2, 7).k, 10u);
    EXPECT_EQ(build_template(2, 1).k, 2u);
}

TEST(BuildTemplate, CensusMatchesClosedForm) {
    for (std::size_t n = 2; n <= 8; ++n)
        for (std::size_t k : {2, 6})
            for (auto p : {NetworkProvider::OddEven, NetworkProvider::Brickwall}) {
                auto t = build_template(n, k, std::nullopt, p);
                EXPECT_EQ(t.prepad_vertex_count, census(n, t.depth(), k));
                EXPECT_EQ(t.graph.vertex_count() / n - 1, t.ell);
                EXPECT_LE(t.graph.max_degree(), 4u);
            }
}

TEST(BuildTemplate, Padding) {
    auto base = build_template(3, 2);
    EXPECT_THROW(build_template(3, 2, base.ell - 1), PreconditionError);
    for (std::size_t extra : {1, 5, 17}) {
        auto t = build_template(3, 2, base.ell + extra);
        EXPECT_EQ(t.ell, base.ell + extra);
        EXPECT_EQ(t.graph.vertex_count(), 3 * (t.ell + 1));
        EXPECT_EQ(t.prepad_vertex_count, base.graph.vertex_count());
        std::vector<std::size_t> phi{2, 0, 1};
        auto f = route(t, phi);
        EXPECT_TRUE(is_valid_path_factor(t.graph, f, pairs_for(t, phi)));
        for (const auto& p : f.paths) EXPECT_EQ(p.length(), t.ell);
        auto seq = template_construction_sequence(t);
        EXPECT_TRUE(verify_constructible(t.graph, template_base_set(t), seq, t.k, 4 * t.k));
    }
}

TEST(Route, IdentityAndReversal) {
    auto t = build_template(2, 2);
    std::vector<std::size_t> id{0, 1}, rev{1, 0};
    auto f = route(t, id);
    ASSERT_TRUE(is_valid_path_factor(t.graph, f, pairs_for(t, id)));
    for (const auto& p : f.paths) EXPECT_EQ(p.length(), 5u);
    auto g = route(t, rev);
    ASSERT_TRUE(is_valid_path_factor(t.graph, g, pairs_for(t, rev)));
    EXPECT_EQ(g.paths[0].back(), t.b[1]);
}

TEST(Route, RejectsNonBijection) {
    auto t = build_template(3, 2);
    std::vector<std::size_t> bad{0, 0, 1};
    EXPECT_THROW(route(t, bad), PreconditionError);
}

TEST(Route, FourRegisterWiring) {
    auto t = build_template_from_network(build_four_register_network(), 2);
    for (const auto& inst : t.gadgets) EXPECT_EQ(inst.map.size(), 4u);
    std::vector<std::size_t> phi{3, 0, 1, 2};
    auto f = route(t, phi);
    EXPECT_TRUE(is_valid_path_factor(t.graph, f, pairs_for(t, phi)));
    auto seq = template_construction_sequence(t);
    EXPECT_TRUE(verify_constructible(t.graph, template_base_set(t), seq, 2, 8));
}

TEST(Route, ExhaustiveSmall) {
    for (std::size_t n = 2; n <= 5; ++n) {
        auto t = build_template(n, 2);
        std::vector<std::size_t> phi(n);
        std::iota(phi.begin(), phi.end(), 0);
        do {
            auto f = route(t, phi);
            auto c = is_valid_path_factor(t.graph, f, pairs_for(t, phi));
            ASSERT_TRUE(c) << c.diagnostic;
            for (const auto& p : f.paths) ASSERT_EQ(p.length(), t.ell);
        } while (std::next_permutation(phi.begin(), phi.end()));
    }
}

TEST(TemplateConstructionSequence, Constructible) {
    for (std::size_t n = 2; n <= 8; ++n)
        for (std::size_t k : {2, 6})
            for (auto p : {NetworkProvider::OddEven, NetworkProvider::Brickwall}) {
                auto t = build_template(n, k, std::nullopt, p);
                auto c = verify_constructible(t.graph, template_base_set(t), template_construction_sequence(t), k, 4 * k);
                EXPECT_TRUE(c) << n << " " << k << " " << c.diagnostic;
            }
}

TEST(TemplateConstructionSequence, EmptyNetwork) {
    auto t = build_template_from_network(ComparisonNetwork{3, {}}, 2);
    auto seq = template_construction_sequence(t);
    ASSERT_EQ(seq.size(), 3u);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(seq[j].front(), t.a[j]);
    EXPECT_TRUE(verify_constructible(t.graph, template_base_set(t), seq, 2, 8));
}
