#pragma once

#include <charconv>
#include <cmath>
#include <sstream>
#include <string>

#include "spanemb/extendable.hpp"
#include "spanemb/sorting_network.hpp"

namespace spanemb {

// Every size knob set to 0 is chosen automatically.
struct PipelineConfig {
    std::size_t D = 8;
    std::size_t join_m = 0;          // 0: max(2, ceil(lambda_hat * n / d))
    std::size_t registers = 0;       // 0: best of 2, 4, 8
    std::size_t k_gadget = 0;        // 0: 6 when n >= 400, else 2
    std::size_t t_prime = 0;         // 0: max(connect minimum, 2 ceil(ln n)), connect minimum when n < 200
    std::size_t num_levels = 0;      // 0: largest value the tree's bare paths allow
    std::size_t r0_size = 0;         // 0: r0_fraction * n
    std::size_t v_size = 0;          // 0: level_reserve_fraction * (registers * num_levels)
    double level_fraction = 0.4;     // target share of the host covered by level sets
    double level_reserve_fraction = 0.6;
    double r0_fraction = 0.02;
    double max_load = 0.6;           // largest share of the free pool the almost-spanning forest may take
    double v_band_lo = 0.25;
    double v_band_hi = 0.0;          // 0: unbounded
    double r_band_lo = 0.0;
    double r_band_hi = 0.0;
    double residual_factor = 0.3;
    std::uint64_t seed = 1;
    AuditTier audit = AuditTier::Trust;
    std::size_t sample_budget = 64;
    std::size_t reserve_retries = 50;
    std::size_t connect_retries = 24;
    std::size_t frontier_cap = 16;
    std::size_t chain_restarts = 8;
    std::size_t attempts = 3;
    bool many_leaves_fallback = true;
    NetworkProvider provider = NetworkProvider::OddEven;
};

class ConfigParseError : public PreconditionError {
public:
    ConfigParseError(std::size_t line, std::size_t column, const std::string& what)
        : PreconditionError("config " + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_, column_;
};

inline std::string to_string(NetworkProvider p) { return p == NetworkProvider::OddEven ? "odd_even" : "brickwall"; }

inline NetworkProvider provider_from_string(const std::string& s) {
    if (s == "odd_even" || s == "odd-even") return NetworkProvider::OddEven;
    if (s == "brickwall") return NetworkProvider::Brickwall;
    throw PreconditionError("unknown network builder '" + s + "'");
}

namespace detail {

inline std::string trim(const std::string& s, std::size_t* lead = nullptr) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        if (lead) *lead = s.size();
        return "";
    }
    std::size_t e = s.find_last_not_of(" \t\r");
    if (lead) *lead = b;
    return s.substr(b, e - b + 1);
}

}  // namespace detail

// Flat key=value lines; '#' starts a comment.
inline PipelineConfig parse_config(const std::string& text) {
    PipelineConfig c;
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw.substr(0, raw.find('#'));
        std::size_t lead = 0;
        std::string body = detail::trim(line, &lead);
        if (body.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigParseError(line_no, lead + 1, "expected key=value");
        std::string key = detail::trim(line.substr(0, eq));
        std::size_t vlead = 0;
        std::string value = detail::trim(line.substr(eq + 1), &vlead);
        const std::size_t vcol = eq + 2 + vlead;
        if (key.empty()) throw ConfigParseError(line_no, lead + 1, "missing key");
        if (value.empty()) throw ConfigParseError(line_no, vcol, "missing value for '" + key + "'");

        auto as_size = [&]() -> std::size_t {
            std::size_t v = 0;
            auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc() || p != value.data() + value.size())
                throw ConfigParseError(line_no, vcol + (p - value.data()), "expected a non-negative integer for '" + key + "'");
            return v;
        };
        auto as_double = [&]() -> double {
            double v = 0;
            std::size_t used = 0;
            try {
                v = std::stod(value, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != value.size() || !std::isfinite(v) || v < 0)
                throw ConfigParseError(line_no, vcol + used, "expected a non-negative number for '" + key + "'");
            return v;
        };
        auto as_bool = [&]() -> bool {
            if (value == "true" || value == "1") return true;
            if (value == "false" || value == "0") return false;
            throw ConfigParseError(line_no, vcol, "expected true or false for '" + key + "'");
        };

        if (key == "D") c.D = as_size();
        else if (key == "join_m") c.join_m = as_size();
        else if (key == "registers") c.registers = as_size();
        else if (key == "k_gadget") c.k_gadget = as_size();
        else if (key == "t_prime") c.t_prime = as_size();
        else if (key == "num_levels") c.num_levels = as_size();
        else if (key == "r0_size") c.r0_size = as_size();
        else if (key == "v_size") c.v_size = as_size();
        else if (key == "level_fraction") c.level_fraction = as_double();
        else if (key == "level_reserve_fraction") c.level_reserve_fraction = as_double();
        else if (key == "r0_fraction") c.r0_fraction = as_double();
        else if (key == "max_load") c.max_load = as_double();
        else if (key == "v_band_lo") c.v_band_lo = as_double();
        else if (key == "v_band_hi") c.v_band_hi = as_double();
        else if (key == "r_band_lo") c.r_band_lo = as_double();
        else if (key == "r_band_hi") c.r_band_hi = as_double();
        else if (key == "residual_factor") c.residual_factor = as_double();
        else if (key == "seed") c.seed = as_size();
        else if (key == "audit") {
            try {
                c.audit = audit_tier_from_string(value);
            } catch (const PreconditionError& e) {
                throw ConfigParseError(line_no, vcol, e.what());
            }
        } else if (key == "sample_budget") c.sample_budget = as_size();
        else if (key == "reserve_retries") c.reserve_retries = as_size();
        else if (key == "connect_retries") c.connect_retries = as_size();
        else if (key == "frontier_cap") c.frontier_cap = as_size();
        else if (key == "chain_restarts") c.chain_restarts = as_size();
        else if (key == "attempts") c.attempts = as_size();
        else if (key == "many_leaves_fallback") c.many_leaves_fallback = as_bool();
        else if (key == "provider") {
            try {
                c.provider = provider_from_string(value);
            } catch (const PreconditionError& e) {
                throw ConfigParseError(line_no, vcol, e.what());
            }
        } else throw ConfigParseError(line_no, lead + 1, "unknown key '" + key + "'");
    }
    if (c.D < 3) throw ConfigParseError(0, 0, "D must be at least 3");
    if (c.attempts == 0) throw ConfigParseError(0, 0, "attempts must be positive");
    return c;
}

inline std::string format_config(const PipelineConfig& c) {
    std::ostringstream o;
    o << "D=" << c.D << "\njoin_m=" << c.join_m << "\nregisters=" << c.registers << "\nk_gadget=" << c.k_gadget
      << "\nt_prime=" << c.t_prime << "\nnum_levels=" << c.num_levels << "\nr0_size=" << c.r0_size
      << "\nv_size=" << c.v_size << "\nlevel_fraction=" << c.level_fraction
      << "\nlevel_reserve_fraction=" << c.level_reserve_fraction << "\nr0_fraction=" << c.r0_fraction
      << "\nmax_load=" << c.max_load << "\nv_band_lo=" << c.v_band_lo << "\nv_band_hi=" << c.v_band_hi
      << "\nr_band_lo=" << c.r_band_lo << "\nr_band_hi=" << c.r_band_hi << "\nresidual_factor=" << c.residual_factor
      << "\nseed=" << c.seed << "\naudit=" << to_string(c.audit) << "\nsample_budget=" << c.sample_budget
      << "\nreserve_retries=" << c.reserve_retries << "\nconnect_retries=" << c.connect_retries
      << "\nfrontier_cap=" << c.frontier_cap << "\nchain_restarts=" << c.chain_restarts << "\nattempts=" << c.attempts
      << "\nmany_leaves_fallback=" << (c.many_leaves_fallback ? "true" : "false")
      << "\nprovider=" << to_string(c.provider) << "\n";
    return o.str();
}

}  // namespace spanemb
