#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>

#include "nqw/errors.hpp"
#include "nqw/lattice.hpp"
#include "nqw/linear_walk.hpp"
#include "nqw/spinor.hpp"

namespace nqw {

/// Self-coupling type. Scalar is Gross–Neveu (ψ̄ψ), vector is Thirring (ψ†ψ).
enum class InteractionType { scalar, vector };

inline std::string_view to_string(InteractionType k) noexcept {
    return k == InteractionType::scalar ? "scalar" : "vector";
}

inline InteractionType parse_interaction(std::string_view s) {
    if (s == "scalar") return InteractionType::scalar;
    if (s == "vector") return InteractionType::vector;
    throw DomainError("unknown interaction type '" + std::string(s) + "'");
}

struct WalkParams {
    CoinAngle theta{};
    InteractionType kind = InteractionType::scalar;
    double g = 1.0;

    void validate() const {
        if (!std::isfinite(g) || g < 0.0) throw DomainError("coupling g must be finite and >= 0");
        if (!std::isfinite(theta.radians)) throw DomainError("coin angle must be finite");
    }
};

/// Measured local bilinear: |u|² − |v|² (scalar) or |u|² + |v|² (vector).
inline double bilinear(const Spinor& s, InteractionType kind) noexcept {
    const double up = std::norm(s.u);
    const double down = std::norm(s.v);
    return kind == InteractionType::scalar ? up - down : up + down;
}

/// Feed-forward gate e^{−i h_NL} built from the measured spinor.
///   scalar: coin-form rotation with angle −g (|u|² − |v|²)
///   vector: the pure phase e^{+i g (|u|² + |v|²)}
inline Mat2 nonlinear_gate(const Spinor& s, const WalkParams& params) noexcept {
    const double b = bilinear(s, params.kind);
    if (params.kind == InteractionType::scalar) return coin_matrix(CoinAngle{-params.g * b});
    return std::polar(1.0, params.g * b) * Mat2::identity();
}

namespace detail {

/// Gate·coin on one site, with the gate read from the pre-step spinor.
inline Spinor gated_coin(const Mat2& coin, const Spinor& pre, const WalkParams& params) noexcept {
    const Spinor w = coin * pre;
    const double b = bilinear(pre, params.kind);
    if (params.kind == InteractionType::scalar) return coin_matrix(CoinAngle{-params.g * b}) * w;
    const cplx phase = std::polar(1.0, params.g * b);
    return {phase * w.u, phase * w.v};
}

}  // namespace detail

/// One NQW step: [u(t+1,x+1); v(t+1,x−1)] = G[ψ(t,x)] · C · [u(t,x); v(t,x)].
/// Writes into `out`, which must share the lattice of `in`.
inline void nqw_step_into(const WalkerState& in, WalkerState& out, const WalkParams& params) {
    const Mat2 coin = coin_matrix(params.theta);
    detail::local_then_shift(in, out, [&](std::size_t, const Spinor& s) {
        return detail::gated_coin(coin, s, params);
    });
}

inline WalkerState nqw_step(const WalkerState& state, const WalkParams& params) {
    WalkerState out(state.config());
    nqw_step_into(state, out, params);
    return out;
}

/// Runs `steps` NQW steps. After every step the state is checked for NaN/Inf and against the
/// edge guard, then handed to `observer` (signature void(const WalkerState&)).
template <class Observer>
WalkerState evolve(WalkerState state, const WalkParams& params, std::size_t steps,
                   Observer&& observer) {
    params.validate();
    WalkerState next(state.config(), state.t());
    for (std::size_t k = 0; k < steps; ++k) {
        nqw_step_into(state, next, params);
        std::swap(state, next);
        for (const auto& s : state.amps())
            if (!s.is_finite())
                throw NumericFailure("non-finite amplitude at step " + std::to_string(state.t()));
        if (auto v = guard_boundaries(state)) throw BoundaryViolation(v->step, v->edge_fraction);
        observer(static_cast<const WalkerState&>(state));
    }
    return state;
}

inline WalkerState evolve(WalkerState state, const WalkParams& params, std::size_t steps) {
    return evolve(std::move(state), params, steps, [](const WalkerState&) {});
}

}  // namespace nqw
