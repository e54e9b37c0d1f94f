#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "nqw/errors.hpp"
#include "nqw/lattice.hpp"
#include "nqw/linear_walk.hpp"
#include "nqw/nonlinear_step.hpp"
#include "nqw/spinor.hpp"

namespace nqw {

/// Boosted solitons above this fraction of c stop holding a single peak.
inline constexpr double kStableVelocityFraction = 0.8;

/// One stationary or boosted Dirac soliton, placed on the lattice with a complex weight.
struct SolitonSpec {
    InteractionType kind = InteractionType::scalar;
    double g = 1.0;
    double omega = 0.99;  ///< frequency, 0 < ω < m c²
    CoinAngle theta{};    ///< fixes m c² and c through the Dirac mapping
    double velocity = 0.0;
    double center = 0.0;
    cplx coefficient{1.0, 0.0};

    double mass_energy() const { return dirac_params(theta).mass_energy; }
    double light_speed() const { return dirac_params(theta).c; }

    /// a = √((mc² − ω)/(mc² + ω))
    double a() const {
        const double mc2 = mass_energy();
        return std::sqrt((mc2 - omega) / (mc2 + omega));
    }
    /// b = √(m²c⁴ − ω²), the inverse width.
    double b() const {
        const double mc2 = mass_energy();
        return std::sqrt(mc2 * mc2 - omega * omega);
    }
    double lorentz_gamma() const {
        const double beta = velocity / light_speed();
        return 1.0 / std::sqrt(1.0 - beta * beta);
    }

    void validate() const {
        if (!(g > 0.0) || !std::isfinite(g)) throw DomainError("soliton coupling g must be > 0");
        const double mc2 = mass_energy();
        if (!(omega > 0.0) || !(omega < mc2))
            throw DomainError("soliton frequency must satisfy 0 < omega < m c^2");
        if (!(std::abs(velocity) < light_speed()))
            throw DomainError("soliton velocity must satisfy |v| < c");
        if (!std::isfinite(center)) throw DomainError("soliton center must be finite");
    }

    bool stability_warning() const {
        return std::abs(velocity) > kStableVelocityFraction * light_speed();
    }

    /// Spec with frequency given as a fraction of m c².
    static SolitonSpec with_ratio(InteractionType kind, double g, double omega_ratio,
                                  CoinAngle theta) {
        SolitonSpec s;
        s.kind = kind;
        s.g = g;
        s.theta = theta;
        s.omega = omega_ratio * dirac_params(theta).mass_energy;
        return s;
    }
};

namespace detail {

inline Spinor rest_frame_profile(double x, const SolitonSpec& spec) {
    const double mc2 = spec.mass_energy();
    const double a = spec.a();
    const double b = spec.b();
    const double th = std::tanh(b * x);
    const double sign = spec.kind == InteractionType::scalar ? -1.0 : 1.0;
    const double u = std::sqrt(2.0 * (mc2 - spec.omega) / spec.g) / std::cosh(b * x) /
                     (1.0 + sign * a * a * th * th);
    return {u, a * th * u};
}

}  // namespace detail

/// Real stationary profile (u_st, v_st) at distance x from the soliton centre, in the
/// representation β = σ₃, α = −σ₂.
///
///   u_st(x) = √(2(mc² − ω)/g) · sech(bx) / (1 ∓ a² tanh²(bx))   (− scalar, + vector)
///   v_st(x) = a tanh(bx) u_st(x)
inline Spinor stationary_profile(double x, const SolitonSpec& spec) {
    spec.validate();
    if (spec.velocity != 0.0) throw DomainError("stationary_profile needs velocity = 0");
    return detail::rest_frame_profile(x, spec);
}

/// Closed-form charge: 2b/(gω) for scalar, (2/g) atan(b/ω) for vector.
inline double analytic_charge(const SolitonSpec& spec) {
    spec.validate();
    const double b = spec.b();
    if (spec.kind == InteractionType::scalar) return 2.0 * b / (spec.g * spec.omega);
    return 2.0 / spec.g * std::atan(b / spec.omega);
}

/// R(Θ) = R_y(π − Θ) R_x(−π/2), with R_k(φ) = exp(−iφσ_k/2). Carries (β = σ₃, α = −σ₂) to the
/// walk's (β = σ₂, α = −cos Θ σ₃ + sin Θ σ₁).
inline Mat2 walk_frame_rotation(CoinAngle theta) noexcept {
    return pauli_rotation(pauli::sigma2, std::numbers::pi - theta.radians) *
           pauli_rotation(pauli::sigma1, -std::numbers::pi / 2);
}

/// Λ(v) = √((γ+1)/2) I − sgn(v) √((γ−1)/2) α, γ = 1/√(1 − (v/c)²).
inline Mat2 lorentz_matrix(double v, double c, const Mat2& alpha) {
    if (!(std::abs(v) < c)) throw DomainError("boost requires |v| < c");
    if (v == 0.0) return Mat2::identity();
    const double beta = v / c;
    const double gamma = 1.0 / std::sqrt(1.0 - beta * beta);
    const double sgn = v > 0.0 ? 1.0 : -1.0;
    return cplx{std::sqrt((gamma + 1.0) / 2.0), 0.0} * Mat2::identity() -
           cplx{sgn * std::sqrt((gamma - 1.0) / 2.0), 0.0} * alpha;
}

/// α of the representation the stationary profiles are written in.
inline Mat2 rest_frame_alpha() noexcept { return cplx{-1.0, 0.0} * pauli::sigma2; }

/// Travelling solution ψ_v(t, x) = Λ⁻¹(v) e^{−iωt′} φ_st(x′) with x′ = γ(x − vt),
/// t′ = γ(t − vx/c²); x is measured from the soliton centre. Same representation as
/// stationary_profile.
inline Spinor moving_profile(double x, double t, const SolitonSpec& spec) {
    spec.validate();
    const double c = spec.light_speed();
    const double v = spec.velocity;
    const double gamma = spec.lorentz_gamma();
    const double xp = gamma * (x - v * t);
    const double tp = gamma * (t - v * x / (c * c));
    const Spinor rest = std::polar(1.0, -spec.omega * tp) * detail::rest_frame_profile(xp, spec);
    if (v == 0.0) return rest;
    return lorentz_matrix(-v, c, rest_frame_alpha()) * rest;
}

/// Samples Σ_k coefficient_k · ψ_{v_k}(x − center_k, t = 0) at every site and rotates each
/// summed spinor into the walk basis with R(Θ).
inline WalkerState build_initial_state(const LatticeConfig& config,
                                       std::span<const SolitonSpec> specs, CoinAngle theta) {
    for (const auto& s : specs) s.validate();
    WalkerState state(config);
    const Mat2 rot = walk_frame_rotation(theta);
    for (std::size_t i = 0; i < state.size(); ++i) {
        const double x = static_cast<double>(config.position(i));
        Spinor sum{};
        for (const auto& s : specs) sum += s.coefficient * moving_profile(x - s.center, 0.0, s);
        state[i] = rot * sum;
    }
    total_charge(state);
    if (auto v = guard_boundaries(state)) throw BoundaryViolation(0, v->edge_fraction);
    return state;
}

/// Half-width (in sites) beyond which a soliton's tail is negligible: ⌈15/b⌉ past its centre.
inline std::size_t profile_halfwidth(std::span<const SolitonSpec> specs) {
    double w = 1.0;
    for (const auto& s : specs) w = std::max(w, std::abs(s.center) + std::ceil(15.0 / s.b()));
    return static_cast<std::size_t>(w);
}

}  // namespace nqw
