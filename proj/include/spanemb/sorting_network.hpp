#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "spanemb/common.hpp"

namespace spanemb {

struct Comparator {
    std::size_t lo;
    std::size_t hi;
    bool operator==(const Comparator&) const = default;
};

using Level = std::vector<Comparator>;

struct ComparisonNetwork {
    std::size_t registers = 0;
    std::vector<Level> levels;

    std::size_t depth() const { return levels.size(); }
    std::size_t comparator_count() const {
        std::size_t c = 0;
        for (const auto& l : levels) c += l.size();
        return c;
    }

    // Throws unless every comparator has lo < hi < registers and levels are matchings.
    void validate() const {
        for (std::size_t i = 0; i < levels.size(); ++i) {
            std::vector<char> used(registers, 0);
            for (const auto& c : levels[i]) {
                if (!(c.lo < c.hi && c.hi < registers))
                    throw PreconditionError("level " + std::to_string(i) + ": bad comparator (" +
                                            std::to_string(c.lo) + "," + std::to_string(c.hi) + ")");
                if (used[c.lo] || used[c.hi])
                    throw PreconditionError("level " + std::to_string(i) + ": register used twice");
                used[c.lo] = used[c.hi] = 1;
            }
        }
    }

    bool operator==(const ComparisonNetwork&) const = default;
};

// Register index -> value in [1..n].
using Assignment = std::vector<std::size_t>;

struct NetworkRun {
    Assignment final;
    std::vector<std::vector<bool>> swaps;  // [level][comparator]
};

inline void require_bijection(const Assignment& rho, std::size_t n) {
    if (rho.size() != n) throw PreconditionError("assignment has " + std::to_string(rho.size()) + " entries, expected " + std::to_string(n));
    std::vector<char> seen(n + 1, 0);
    for (std::size_t v : rho) {
        if (v < 1 || v > n || seen[v]) throw PreconditionError("assignment is not a bijection onto [1.." + std::to_string(n) + "]");
        seen[v] = 1;
    }
}

inline NetworkRun apply_network(const ComparisonNetwork& net, const Assignment& rho0) {
    require_bijection(rho0, net.registers);
    NetworkRun run{rho0, {}};
    run.swaps.reserve(net.depth());
    for (const auto& level : net.levels) {
        std::vector<bool> trace;
        trace.reserve(level.size());
        for (const auto& c : level) {
            bool swap = run.final[c.lo] > run.final[c.hi];
            if (swap) std::swap(run.final[c.lo], run.final[c.hi]);
            trace.push_back(swap);
        }
        run.swaps.push_back(std::move(trace));
    }
    return run;
}

enum class SortCheck { ZeroOne, Permutations };

inline bool is_sorting_network(const ComparisonNetwork& net, SortCheck mode = SortCheck::ZeroOne) {
    const std::size_t n = net.registers;
    if (mode == SortCheck::ZeroOne) {
        if (n > 24) throw PreconditionError("zero-one check supports at most 24 registers");
        if (n <= 1) return true;
        const std::uint32_t full = (1u << n) - 1;
        for (std::uint32_t x = 0; x <= full; ++x) {
            std::uint32_t y = x;
            for (const auto& level : net.levels)
                for (const auto& c : level) {
                    std::uint32_t a = (y >> c.lo) & 1u, b = (y >> c.hi) & 1u;
                    if (a > b) y ^= (1u << c.lo) | (1u << c.hi);
                }
            const int ones = __builtin_popcount(y);
            const std::uint32_t sorted = ones == 0 ? 0 : (full ^ ((1u << (n - ones)) - 1));
            if (y != sorted) return false;
        }
        return true;
    }
    if (n > 8) throw PreconditionError("permutation check supports at most 8 registers");
    Assignment rho(n);
    std::iota(rho.begin(), rho.end(), 1);
    do {
        Assignment r = rho;
        for (const auto& level : net.levels)
            for (const auto& c : level)
                if (r[c.lo] > r[c.hi]) std::swap(r[c.lo], r[c.hi]);
        for (std::size_t i = 0; i < n; ++i)
            if (r[i] != i + 1) return false;
    } while (std::next_permutation(rho.begin(), rho.end()));
    return true;
}

inline ComparisonNetwork build_odd_even_mergesort(std::size_t n) {
    if (n < 1) throw PreconditionError("network needs at least one register");
    ComparisonNetwork net{n, {}};
    for (std::size_t p = 1; p < n; p <<= 1)
        for (std::size_t k = p; k >= 1; k >>= 1) {
            Level level;
            for (std::size_t j = k % p; j + k < n; j += 2 * k)
                for (std::size_t i = 0; i < k && i + j + k < n; ++i)
                    if ((i + j) / (2 * p) == (i + j + k) / (2 * p)) level.push_back({i + j, i + j + k});
            if (!level.empty()) net.levels.push_back(std::move(level));
        }
    return net;
}

inline ComparisonNetwork build_brickwall(std::size_t n) {
    if (n < 1) throw PreconditionError("network needs at least one register");
    ComparisonNetwork net{n, {}};
    for (std::size_t t = 0; t < n; ++t) {
        Level level;
        for (std::size_t i = t % 2; i + 1 < n; i += 2) level.push_back({i, i + 1});
        if (!level.empty()) net.levels.push_back(std::move(level));
    }
    return net;
}

// Four registers: outer pairs, then the two extreme comparisons, then the middle pair.
inline ComparisonNetwork build_four_register_network() {
    return ComparisonNetwork{4, {{{0, 1}, {2, 3}}, {{0, 2}}, {{1, 3}}, {{1, 2}}}};
}

enum class NetworkProvider { OddEven, Brickwall };

inline ComparisonNetwork build_network(NetworkProvider p, std::size_t n) {
    return p == NetworkProvider::OddEven ? build_odd_even_mergesort(n) : build_brickwall(n);
}

}  // namespace spanemb
