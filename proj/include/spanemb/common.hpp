#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spanemb {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

inline constexpr Vertex kNoVertex = std::numeric_limits<Vertex>::max();

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller violated an operation's precondition. Maps to CLI exit code 2.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// A pipeline step could not complete. Maps to CLI exit code 3.
class StepFailure : public Error {
public:
    StepFailure(std::string step, const std::string& what)
        : Error(step + ": " + what), step_(std::move(step)) {}
    const std::string& step() const { return step_; }

private:
    std::string step_;
};

class NoExtension : public Error {
public:
    NoExtension(const std::string& what, std::vector<std::string> log)
        : Error(what), log_(std::move(log)) {}
    const std::vector<std::string>& audit_log() const { return log_; }

private:
    std::vector<std::string> log_;
};

class ConnectFailure : public Error {
public:
    ConnectFailure(const std::string& what, std::size_t a_frontier, std::size_t b_frontier)
        : Error(what), a_frontier_(a_frontier), b_frontier_(b_frontier) {}
    std::size_t a_frontier() const { return a_frontier_; }
    std::size_t b_frontier() const { return b_frontier_; }

private:
    std::size_t a_frontier_;
    std::size_t b_frontier_;
};

class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, double residual) : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

class BarePathDeficit : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

using Rng = std::mt19937_64;

// Unbiased integer in [0, bound). Written out so results do not depend on the
// standard library's distribution implementations.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <class T>
void shuffle_in_place(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream for (seed, stream) pairs.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ (stream * 0xd1342543de82ef95ULL + 1));
}

}  // namespace spanemb
