#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>

#include <Eigen/Eigenvalues>

#include "nqw/errors.hpp"
#include "nqw/lattice.hpp"
#include "nqw/spinor.hpp"

namespace nqw {

/// Coin rotation angle Θ in radians.
struct CoinAngle {
    double radians = std::numbers::pi / 4;

    constexpr CoinAngle() = default;
    constexpr explicit CoinAngle(double r) : radians(r) {}
    friend constexpr bool operator==(CoinAngle, CoinAngle) = default;
};

/// C(Θ) = [[cos Θ, −sin Θ], [sin Θ, cos Θ]].
inline Mat2 coin_matrix(CoinAngle theta) noexcept {
    const double c = std::cos(theta.radians);
    const double s = std::sin(theta.radians);
    return {c, -s, s, c};
}

namespace detail {

/// Applies `local` to every site, then moves the up component one site right and the down
/// component one site left. `local` maps (index, spinor) to the pre-shift spinor. Zero sites
/// are skipped: every local map used here is linear in the site spinor. Amplitude pushed off
/// the lattice is dropped while its charge stays within boundary_guard_eps of the total;
/// beyond that the step fails.
template <class LocalMap>
void local_then_shift(const WalkerState& in, WalkerState& out, LocalMap&& local) {
    const std::size_t n = in.size();
    auto& dst = out.amps();
    for (auto& s : dst) s = Spinor{};
    const auto& src = in.amps();
    double lost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (src[i].is_zero()) continue;
        const Spinor w = local(i, src[i]);
        if (i + 1 < n)
            dst[i + 1].u = w.u;
        else
            lost = std::max(lost, std::norm(w.u));
        if (i > 0)
            dst[i - 1].v = w.v;
        else
            lost = std::max(lost, std::norm(w.v));
    }
    if (lost > 0.0) {
        const double fraction = lost / total_charge(in);
        if (fraction > in.config().boundary_guard_eps) throw BoundaryViolation(in.t() + 1, fraction);
    }
    out.set_t(in.t() + 1);
}

}  // namespace detail

/// Shift S: u(x+1) ← u(x), v(x−1) ← v(x). Amplitude leaving the lattice follows the guard rule.
/// The step counter is not advanced.
inline WalkerState apply_shift(const WalkerState& state) {
    WalkerState out(state.config());
    detail::local_then_shift(state, out, [](std::size_t, const Spinor& s) { return s; });
    out.set_t(state.t());
    return out;
}

/// One linear walk step W = S·C.
inline WalkerState linear_step(const WalkerState& state, CoinAngle theta) {
    const Mat2 coin = coin_matrix(theta);
    WalkerState out(state.config());
    detail::local_then_shift(state, out, [&](std::size_t, const Spinor& s) { return coin * s; });
    return out;
}

/// Positive branch of the walk dispersion, cos ω = cos Θ cos p, ω ∈ [0, π].
///
/// Evaluated as atan2(sin ω, cos ω) with sin²ω = sin²Θ + cos²Θ sin²p, which stays accurate
/// near ω = 0 and ω = π where acos loses half the digits.
inline double dispersion_omega(double p, CoinAngle theta) noexcept {
    const double ct = std::cos(theta.radians);
    const double st = std::sin(theta.radians);
    const double sp = std::sin(p);
    const double sin_w = std::sqrt(st * st + ct * ct * sp * sp);
    return std::atan2(sin_w, ct * std::cos(p));
}

/// Eigenphases of the momentum-space step matrix
/// [[cos Θ e^{ip}, −sin Θ e^{ip}], [sin Θ e^{−ip}, cos Θ e^{−ip}]], found by numerical
/// diagonalization. Returned as {ω, −ω} with ω ∈ [0, π].
inline std::pair<double, double> walk_eigenphases(double p, CoinAngle theta) {
    const double ct = std::cos(theta.radians);
    const double st = std::sin(theta.radians);
    const cplx ep = std::polar(1.0, p);
    const cplx em = std::polar(1.0, -p);
    Eigen::Matrix2cd w;
    w << ct * ep, -st * ep, st * em, ct * em;
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> solver(w, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw NumericFailure("2x2 eigen-solver failed");
    // det W = 1, so the phases come as a ± pair; averaging the magnitudes cancels the
    // solver's rounding asymmetry and handles the degenerate ends ω ∈ {0, π}.
    const double a = std::abs(std::arg(solver.eigenvalues()(0)));
    const double b = std::abs(std::arg(solver.eigenvalues()(1)));
    const double w_pos = 0.5 * (a + b);
    return {w_pos, -w_pos};
}

/// Continuum Dirac parameters read off a coin angle.
struct DiracParams {
    double c = 1.0;            ///< effective light speed, sec Θ
    double mass_energy = 0.0;  ///< m c² = tan Θ
    double mass = 0.0;         ///< m = sin Θ cos Θ
    Mat2 alpha;                ///< −cos Θ σ₃ + sin Θ σ₁
    Mat2 beta;                 ///< σ₂
};

inline constexpr double kCosThetaFloor = 1e-12;

inline DiracParams dirac_params(CoinAngle theta) {
    const double ct = std::cos(theta.radians);
    const double st = std::sin(theta.radians);
    if (std::abs(ct) < kCosThetaFloor)
        throw DomainError("Dirac mapping undefined at cos(theta) = 0");
    DiracParams d;
    d.c = 1.0 / ct;
    d.mass_energy = st / ct;
    d.mass = st * ct;
    d.alpha = cplx{-ct, 0.0} * pauli::sigma3 + cplx{st, 0.0} * pauli::sigma1;
    d.beta = pauli::sigma2;
    return d;
}

}  // namespace nqw
