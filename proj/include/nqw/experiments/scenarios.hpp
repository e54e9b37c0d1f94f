#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "nqw/experiments/config.hpp"
#include "nqw/experiments/parallel.hpp"
#include "nqw/experiments/table.hpp"
#include "nqw/lattice.hpp"
#include "nqw/linear_walk.hpp"
#include "nqw/nonlinear_step.hpp"
#include "nqw/observables.hpp"
#include "nqw/solitons.hpp"

namespace nqw::experiments {

enum class Evolution { linear, scalar, vector };

inline constexpr Evolution kAllEvolutions[] = {Evolution::linear, Evolution::scalar,
                                               Evolution::vector};

inline std::string_view to_string(Evolution e) {
    switch (e) {
        case Evolution::linear: return "linear";
        case Evolution::scalar: return "scalar";
        case Evolution::vector: return "vector";
    }
    return "?";
}

/// The linear walk is the g = 0 NQW; the gates then reduce to the identity exactly.
inline WalkParams params_for(Evolution e, CoinAngle theta, double g) {
    switch (e) {
        case Evolution::linear: return {theta, InteractionType::scalar, 0.0};
        case Evolution::scalar: return {theta, InteractionType::scalar, g};
        case Evolution::vector: return {theta, InteractionType::vector, g};
    }
    return {};
}

/// |x = 0⟩ ⊗ coin.
inline WalkerState localized_state(const LatticeConfig& config, const Spinor& coin) {
    WalkerState s(config);
    s.at_x(0) = coin;
    total_charge(s);
    return s;
}

/// σ(t)/t after `steps` steps from |x = 0⟩ ⊗ coin on an auto-sized lattice.
inline double final_speed(const Spinor& coin, Evolution e, CoinAngle theta, double g,
                          std::size_t steps, double guard_eps = 1e-12) {
    const auto lattice = LatticeConfig::sized_for(steps, 1, guard_eps);
    const WalkerState out = evolve(localized_state(lattice, coin), params_for(e, theta, g), steps);
    return position_stats(out).sigma / static_cast<double>(steps);
}

struct SpeedTriple {
    double linear = 0.0;
    double scalar = 0.0;
    double vector = 0.0;
};

inline SpeedTriple speed_triple(const Spinor& coin, CoinAngle theta, double g, std::size_t steps,
                                double guard_eps = 1e-12) {
    return {final_speed(coin, Evolution::linear, theta, g, steps, guard_eps),
            final_speed(coin, Evolution::scalar, theta, g, steps, guard_eps),
            final_speed(coin, Evolution::vector, theta, g, steps, guard_eps)};
}

// ---------------------------------------------------------------------------------------------
// Single-run scenarios

struct StationaryResult {
    RunRecord record;
    std::size_t radius = 0;              ///< ⌈5/b⌉
    std::vector<double> localization;    ///< per recorded time
    std::vector<long> peak_x;            ///< position of the global density maximum
};

inline StationaryResult run_stationary(const ExperimentConfig& cfg) {
    validate(cfg);
    const auto& spec = cfg.solitons.front();
    const LatticeConfig lattice = cfg.lattice_for(profile_halfwidth(cfg.solitons));
    const WalkerState init = build_initial_state(lattice, cfg.solitons, cfg.walk.theta);

    StationaryResult res;
    res.radius = static_cast<std::size_t>(std::ceil(5.0 / spec.b()));
    res.record = record_run(init, cfg.walk, cfg.steps, cfg.snapshot_stride,
                            [&](const WalkerState& s) {
                                res.localization.push_back(localization_fraction(s, res.radius));
                                const auto rho = charge_density(s);
                                const auto top = std::max_element(rho.begin(), rho.end());
                                res.peak_x.push_back(lattice.position(
                                    static_cast<std::size_t>(top - rho.begin())));
                            });
    return res;
}

struct CollisionResult {
    RunRecord record;
    std::vector<std::vector<long>> peaks;  ///< peak positions per recorded time
};

inline CollisionResult run_collision(const ExperimentConfig& cfg) {
    validate(cfg);
    const LatticeConfig lattice = cfg.lattice_for(profile_halfwidth(cfg.solitons));
    const WalkerState init = build_initial_state(lattice, cfg.solitons, cfg.walk.theta);
    CollisionResult res;
    res.record = record_run(init, cfg.walk, cfg.steps, cfg.snapshot_stride,
                            [&](const WalkerState& s) {
                                const auto rho = charge_density(s);
                                std::vector<long> xs;
                                for (auto i : peak_positions(rho, cfg.peaks))
                                    xs.push_back(lattice.position(i));
                                res.peaks.push_back(std::move(xs));
                            });
    return res;
}

struct DiffusionResult {
    RunRecord linear;
    RunRecord scalar;
    RunRecord vector;

    const RunRecord& of(Evolution e) const {
        return e == Evolution::linear ? linear : e == Evolution::scalar ? scalar : vector;
    }
};

/// Linear, scalar and vector runs from |x = 0⟩ ⊗ coin_state. Each record ends with a density
/// snapshot of the final state.
inline DiffusionResult run_diffusion(const ExperimentConfig& cfg) {
    validate(cfg);
    const LatticeConfig lattice = cfg.lattice_for(1);
    const WalkerState init = localized_state(lattice, cfg.coin_state.coin_state());
    auto one = [&](Evolution e) {
        std::vector<double> last;
        RunRecord rec = record_run(init, params_for(e, cfg.walk.theta, cfg.walk.g), cfg.steps,
                                   cfg.snapshot_stride, [&](const WalkerState& s) {
                                       if (s.t() == cfg.steps) last = charge_density(s);
                                   });
        if (rec.snapshots.empty() || rec.snapshots.back().t != cfg.steps)
            rec.snapshots.push_back({cfg.steps, std::move(last)});
        return rec;
    };
    DiffusionResult res{one(Evolution::linear), one(Evolution::scalar), one(Evolution::vector)};
    return res;
}

// ---------------------------------------------------------------------------------------------
// Sweeps

struct BlochRow {
    double theta_b = 0.0;
    double phi_b = 0.0;
    SpeedTriple speed;
};

/// One row per Bloch grid point in row-major (θ_B outer) order.
inline std::vector<BlochRow> run_bloch_sweep(const ExperimentConfig& cfg) {
    const auto thetas = cfg.bloch.thetas();
    const auto phis = cfg.bloch.phis();
    std::vector<BlochRow> rows(thetas.size() * phis.size());
    for (std::size_t i = 0; i < thetas.size(); ++i)
        for (std::size_t k = 0; k < phis.size(); ++k)
            rows[i * phis.size() + k] = {thetas[i], phis[k], {}};
    parallel_for(
        rows.size(), cfg.workers,
        [&](std::size_t i) {
            const Spinor coin = BlochAngles{rows[i].theta_b, rows[i].phi_b}.coin_state();
            rows[i].speed =
                speed_triple(coin, cfg.walk.theta, cfg.walk.g, cfg.steps, cfg.boundary_guard_eps);
        },
        [&](std::size_t i) {
            return "theta_b=" + format_double(rows[i].theta_b) +
                   ", phi_b=" + format_double(rows[i].phi_b);
        });
    return rows;
}

/// Rows re-ordered by ascending linear speed (ties keep grid order).
inline std::vector<BlochRow> sorted_by_linear_speed(std::vector<BlochRow> rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const BlochRow& a, const BlochRow& b) {
        return a.speed.linear < b.speed.linear;
    });
    return rows;
}

struct SpeedRow {
    double g = 0.0;
    double theta = 0.0;
    std::string coin;  ///< "phi+" or "phi-"
    SpeedTriple speed;
};

namespace detail {

inline void fill_speed_rows(std::vector<SpeedRow>& rows, const ExperimentConfig& cfg) {
    parallel_for(
        rows.size(), cfg.workers,
        [&](std::size_t i) {
            const BlochAngles b = rows[i].coin == "phi+" ? kPhiPlus : kPhiMinus;
            rows[i].speed = speed_triple(b.coin_state(), CoinAngle{rows[i].theta}, rows[i].g,
                                         cfg.steps, cfg.boundary_guard_eps);
        },
        [&](std::size_t i) {
            return "g=" + format_double(rows[i].g) + ", theta=" + format_double(rows[i].theta) +
                   ", coin=" + rows[i].coin;
        });
}

}  // namespace detail

/// Speeds of φ± versus g at the configured coin angle.
inline std::vector<SpeedRow> run_g_sweep(const ExperimentConfig& cfg) {
    std::vector<SpeedRow> rows;
    for (double g : cfg.g_grid.values())
        for (const char* c : {"phi+", "phi-"}) rows.push_back({g, cfg.walk.theta.radians, c, {}});
    detail::fill_speed_rows(rows, cfg);
    return rows;
}

/// Speeds of φ± versus Θ at the configured g.
inline std::vector<SpeedRow> run_theta_sweep(const ExperimentConfig& cfg) {
    std::vector<SpeedRow> rows;
    for (double th : cfg.theta_grid.values())
        for (const char* c : {"phi+", "phi-"}) rows.push_back({cfg.walk.g, th, c, {}});
    detail::fill_speed_rows(rows, cfg);
    return rows;
}

/// Speeds of φ₋ over the (g, Θ) grid, g outer.
inline std::vector<SpeedRow> run_g_theta_surface(const ExperimentConfig& cfg) {
    std::vector<SpeedRow> rows;
    for (double g : cfg.g_grid.values())
        for (double th : cfg.theta_grid.values()) rows.push_back({g, th, "phi-", {}});
    detail::fill_speed_rows(rows, cfg);
    return rows;
}

struct DispersionRow {
    double theta = 0.0;
    std::optional<DiracParams> dirac;  ///< empty where cos Θ = 0
    double mass = 0.0;
    double max_error = 0.0;
};

struct DispersionReport {
    std::vector<DispersionRow> rows;
    double max_error = 0.0;
};

/// Grid point k of an N-point sampling of (−π, π].
inline double half_open_angle(std::size_t k, std::size_t n) {
    return -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(k + 1) /
                                   static_cast<double>(n);
}

/// Compares numerically diagonalized eigenphases with the closed-form dispersion on a
/// (p, Θ) grid over (−π, π]².
inline DispersionReport run_dispersion_check(const ExperimentConfig& cfg) {
    const std::size_t np = cfg.dispersion_p_count;
    const std::size_t nt = cfg.dispersion_theta_count;
    if (np == 0 || nt == 0) throw ConfigError("dispersion grid counts must be positive");
    DispersionReport rep;
    rep.rows.resize(nt);
    for (std::size_t j = 0; j < nt; ++j) {
        const CoinAngle th{half_open_angle(j, nt)};
        auto& row = rep.rows[j];
        row.theta = th.radians;
        row.mass = std::sin(th.radians) * std::cos(th.radians);
        try {
            row.dirac = dirac_params(th);
        } catch (const DomainError&) {
            row.dirac.reset();
        }
        for (std::size_t k = 0; k < np; ++k) {
            const double p = half_open_angle(k, np);
            const double w = dispersion_omega(p, th);
            const auto [plus, minus] = walk_eigenphases(p, th);
            row.max_error = std::max({row.max_error, std::abs(plus - w), std::abs(minus + w)});
        }
        rep.max_error = std::max(rep.max_error, row.max_error);
    }
    return rep;
}

}  // namespace nqw::experiments
