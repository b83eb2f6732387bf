#include <gtest/gtest.h>

#include <numeric>

#include "spanemb/sorting_network.hpp"

using namespace spanemb;

namespace {

Assignment identity(std::size_t n) {
    Assignment a(n);
    std::iota(a.begin(), a.end(), 1);
    return a;
}

ComparisonNetwork random_network(std::size_t n, std::size_t depth, Rng& rng) {
    ComparisonNetwork net{n, {}};
    for (std::size_t d = 0; d < depth; ++d) {
        std::vector<std::size_t> regs(n);
        std::iota(regs.begin(), regs.end(), 0);
        shuffle_in_place(regs, rng);
        Level level;
        for (std::size_t i = 0; i + 1 < n; i += 2)
            if (uniform_below(rng, 3) != 0) level.push_back({std::min(regs[i], regs[i + 1]), std::max(regs[i], regs[i + 1])});
        net.levels.push_back(level);
    }
    return net;
}

}  // namespace

TEST(ApplyNetwork, IdentityNeverSwaps) {
    auto net = build_odd_even_mergesort(8);
    auto run = apply_network(net, identity(8));
    EXPECT_EQ(run.final, identity(8));
    for (const auto& l : run.swaps)
        for (bool s : l) EXPECT_FALSE(s);
}

TEST(ApplyNetwork, SingleComparator) {
    ComparisonNetwork net{2, {{{0, 1}}}};
    auto run = apply_network(net, Assignment{2, 1});
    EXPECT_EQ(run.final, (Assignment{1, 2}));
    ASSERT_EQ(run.swaps.size(), 1u);
    EXPECT_TRUE(run.swaps[0][0]);
}

TEST(ApplyNetwork, RejectsNonBijection) {
    ComparisonNetwork net{3, {}};
    EXPECT_THROW(apply_network(net, Assignment{1, 1, 2}), PreconditionError);
    EXPECT_THROW(apply_network(net, Assignment{1, 2}), PreconditionError);
}

TEST(ApplyNetwork, FourRegisterNetworkSortsAllPermutations) {
    auto net = build_four_register_network();
    EXPECT_EQ(net.depth(), 4u);
    Assignment p = identity(4);
    do {
        EXPECT_EQ(apply_network(net, p).final, identity(4));
    } while (std::next_permutation(p.begin(), p.end()));
}

TEST(ApplyNetwork, OutputIsPermutation) {
    Rng rng(4);
    for (int t = 0; t < 50; ++t) {
        auto net = random_network(7, 5, rng);
        Assignment p = identity(7);
        shuffle_in_place(p, rng);
        auto out = apply_network(net, p).final;
        EXPECT_NO_THROW(require_bijection(out, 7));
    }
}

TEST(IsSortingNetwork, Examples) {
    EXPECT_TRUE(is_sorting_network(ComparisonNetwork{1, {}}));
    auto fig = build_four_register_network();
    EXPECT_TRUE(is_sorting_network(fig, SortCheck::ZeroOne));
    EXPECT_TRUE(is_sorting_network(fig, SortCheck::Permutations));
    fig.levels.pop_back();
    EXPECT_FALSE(is_sorting_network(fig, SortCheck::ZeroOne));
    EXPECT_FALSE(is_sorting_network(fig, SortCheck::Permutations));
}

TEST(IsSortingNetwork, SizeLimits) {
    EXPECT_THROW(is_sorting_network(ComparisonNetwork{25, {}}), PreconditionError);
    EXPECT_THROW(is_sorting_network(ComparisonNetwork{9, {}}, SortCheck::Permutations), PreconditionError);
}

TEST(IsSortingNetwork, ModesAgree) {
    Rng rng(11);
    int sorting = 0;
    for (int t = 0; t < 200; ++t) {
        std::size_t n = 2 + uniform_below(rng, 6);
        ComparisonNetwork net = build_odd_even_mergesort(n);
        if (t % 2 == 0) {
            net = random_network(n, 2 + uniform_below(rng, 8), rng);
        } else if (net.comparator_count() > 0 && t % 4 == 1) {
            auto& l = net.levels[uniform_below(rng, net.depth())];
            l.erase(l.begin() + uniform_below(rng, l.size()));
        }
        bool a = is_sorting_network(net, SortCheck::ZeroOne);
        EXPECT_EQ(a, is_sorting_network(net, SortCheck::Permutations));
        sorting += a;
    }
    EXPECT_GT(sorting, 0);
}

TEST(OddEvenMergesort, Depths) {
    EXPECT_EQ(build_odd_even_mergesort(2).depth(), 1u);
    EXPECT_EQ(build_odd_even_mergesort(4).depth(), 3u);
    EXPECT_EQ(build_odd_even_mergesort(8).depth(), 6u);
    EXPECT_EQ(build_odd_even_mergesort(16).depth(), 10u);
}

TEST(OddEvenMergesort, SortsAllTestableSizes) {
    for (std::size_t n = 1; n <= 20; ++n) {
        auto net = build_odd_even_mergesort(n);
        EXPECT_NO_THROW(net.validate());
        EXPECT_TRUE(is_sorting_network(net)) << n;
    }
}

TEST(Brickwall, Examples) {
    auto two = build_brickwall(2);
    EXPECT_EQ(two.comparator_count(), 1u);
    EXPECT_EQ(build_brickwall(4).depth(), 4u);
    EXPECT_TRUE(is_sorting_network(build_brickwall(4), SortCheck::Permutations));
    EXPECT_EQ(build_brickwall(6).depth(), 6u);
    for (std::size_t n = 1; n <= 16; ++n) EXPECT_TRUE(is_sorting_network(build_brickwall(n))) << n;
}

TEST(SortingNetwork, SortsToIdentity) {
    Rng rng(2);
    auto net = build_odd_even_mergesort(10);
    for (int t = 0; t < 100; ++t) {
        Assignment p = identity(10);
        shuffle_in_place(p, rng);
        auto a = apply_network(net, p);
        auto b = apply_network(net, p);
        EXPECT_EQ(a.final, identity(10));
        EXPECT_EQ(a.swaps, b.swaps);
    }
}
