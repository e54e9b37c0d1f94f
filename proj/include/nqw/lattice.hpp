#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nqw/errors.hpp"
#include "nqw/spinor.hpp"

namespace nqw {

/// Fixed, non-periodic 1-D lattice. Site index i sits at physical x = i − origin_index.
struct LatticeConfig {
    std::size_t n_sites = 3;
    std::size_t origin_index = 1;
    double boundary_guard_eps = 1e-12;

    void validate() const {
        if (n_sites < 3) throw InvalidState("lattice needs at least 3 sites");
        if (origin_index >= n_sites) throw InvalidState("origin_index outside lattice");
        if (!(boundary_guard_eps >= 0.0) || !std::isfinite(boundary_guard_eps))
            throw InvalidState("boundary_guard_eps must be finite and nonnegative");
    }

    long position(std::size_t i) const noexcept {
        return static_cast<long>(i) - static_cast<long>(origin_index);
    }

    /// Odd lattice centred on x = 0, large enough for `steps` steps from data of half-width
    /// `halfwidth` (n = 2(steps + halfwidth) + 3).
    static LatticeConfig sized_for(std::size_t steps, std::size_t halfwidth, double eps = 1e-12) {
        const std::size_t n = 2 * (steps + halfwidth) + 3;
        return {n, n / 2, eps};
    }

    friend bool operator==(const LatticeConfig&, const LatticeConfig&) = default;
};

/// ψ(t, ·): one spinor per site plus the step counter. A plain value type.
class WalkerState {
public:
    explicit WalkerState(LatticeConfig config, std::size_t t = 0)
        : config_(config), amps_(config.n_sites), t_(t) {
        config_.validate();
    }

    WalkerState(LatticeConfig config, std::vector<Spinor> amps, std::size_t t = 0)
        : config_(config), amps_(std::move(amps)), t_(t) {
        config_.validate();
        if (amps_.size() != config_.n_sites)
            throw InvalidState("amplitude count does not match n_sites");
    }

    const LatticeConfig& config() const noexcept { return config_; }
    std::size_t size() const noexcept { return amps_.size(); }
    std::size_t t() const noexcept { return t_; }
    void set_t(std::size_t t) noexcept { t_ = t; }

    const std::vector<Spinor>& amps() const noexcept { return amps_; }
    std::vector<Spinor>& amps() noexcept { return amps_; }
    const Spinor& operator[](std::size_t i) const { return amps_[i]; }
    Spinor& operator[](std::size_t i) { return amps_[i]; }

    /// Site holding physical position x.
    Spinor& at_x(long x) { return amps_.at(index_of(x)); }
    const Spinor& at_x(long x) const { return amps_.at(index_of(x)); }
    std::size_t index_of(long x) const {
        const long i = x + static_cast<long>(config_.origin_index);
        if (i < 0 || i >= static_cast<long>(amps_.size()))
            throw InvalidState("position " + std::to_string(x) + " outside lattice");
        return static_cast<std::size_t>(i);
    }

    friend bool operator==(const WalkerState&, const WalkerState&) = default;

private:
    LatticeConfig config_;
    std::vector<Spinor> amps_;
    std::size_t t_ = 0;
};

/// |u(x)|² + |v(x)|² per site.
inline std::vector<double> charge_density(const WalkerState& state) {
    std::vector<double> rho(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) rho[i] = state[i].norm2();
    return rho;
}

/// Discrete charge Q = Σ_x (|u|² + |v|²).
inline double total_charge(const WalkerState& state) {
    double q = 0.0;
    for (const auto& s : state.amps()) q += s.norm2();
    if (!std::isfinite(q)) throw NumericFailure("total charge is not finite");
    if (q == 0.0) throw InvalidState("total charge is zero");
    return q;
}

struct GuardViolation {
    double edge_fraction = 0.0;
    std::size_t step = 0;
};

/// Edge-charge check: each edge site must hold at most eps × Q.
/// Returns nullopt when the guard holds.
inline std::optional<GuardViolation> guard_boundaries(const WalkerState& state) {
    double q = 0.0;
    for (const auto& s : state.amps()) q += s.norm2();
    const double edge = std::max(state.amps().front().norm2(), state.amps().back().norm2());
    if (edge == 0.0) return std::nullopt;
    const double frac = edge / q;
    if (frac <= state.config().boundary_guard_eps) return std::nullopt;
    return GuardViolation{frac, state.t()};
}

}  // namespace nqw
