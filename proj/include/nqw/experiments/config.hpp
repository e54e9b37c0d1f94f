#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "nqw/errors.hpp"
#include "nqw/lattice.hpp"
#include "nqw/nonlinear_step.hpp"
#include "nqw/observables.hpp"
#include "nqw/solitons.hpp"

namespace nqw::experiments {

using json = nlohmann::json;

enum class Scenario {
    stationary,
    collision,
    diffusion,
    bloch_sweep,
    g_sweep,
    theta_sweep,
    g_theta_surface,
    dispersion_check,
};

struct ScenarioName {
    Scenario scenario;
    std::string_view name;
};

inline constexpr ScenarioName kScenarioNames[] = {
    {Scenario::stationary, "stationary"},
    {Scenario::collision, "collision"},
    {Scenario::diffusion, "diffusion"},
    {Scenario::bloch_sweep, "bloch-sweep"},
    {Scenario::g_sweep, "g-sweep"},
    {Scenario::theta_sweep, "theta-sweep"},
    {Scenario::g_theta_surface, "g-theta-surface"},
    {Scenario::dispersion_check, "dispersion-check"},
};

inline std::string_view to_string(Scenario s) {
    for (const auto& e : kScenarioNames)
        if (e.scenario == s) return e.name;
    return "?";
}

inline Scenario parse_scenario(std::string_view s) {
    for (const auto& e : kScenarioNames)
        if (e.name == s) return e.scenario;
    throw ConfigError("unknown scenario '" + std::string(s) + "'");
}

/// Coin state cos(θ_B/2)|↑⟩ + sin(θ_B/2) e^{iφ_B}|↓⟩.
struct BlochAngles {
    double theta_b = std::numbers::pi / 2;
    double phi_b = std::numbers::pi / 2;

    Spinor coin_state() const {
        return {std::cos(theta_b / 2), std::polar(std::sin(theta_b / 2), phi_b)};
    }
};

/// (|↑⟩ + i|↓⟩)/√2 and (|↑⟩ − i|↓⟩)/√2.
inline constexpr BlochAngles kPhiPlus{std::numbers::pi / 2, std::numbers::pi / 2};
inline constexpr BlochAngles kPhiMinus{std::numbers::pi / 2, 3 * std::numbers::pi / 2};

/// Bloch-sphere grid: θ_B = k·Δθ for k·Δθ ≤ π, φ_B = l·Δφ for l·Δφ ≤ 2π.
/// The default 0.04 rad spacing gives 79 × 158 = 12,482 points.
struct BlochGrid {
    double theta_spacing = 0.04;
    double phi_spacing = 0.04;

    static std::vector<double> axis(double spacing, double upper) {
        if (!(spacing > 0.0)) throw ConfigError("grid spacing must be positive");
        const auto count = static_cast<std::size_t>(std::floor(upper / spacing + 1e-9)) + 1;
        std::vector<double> v(count);
        for (std::size_t k = 0; k < count; ++k) v[k] = static_cast<double>(k) * spacing;
        return v;
    }
    std::vector<double> thetas() const { return axis(theta_spacing, std::numbers::pi); }
    std::vector<double> phis() const { return axis(phi_spacing, 2 * std::numbers::pi); }
    std::size_t size() const { return thetas().size() * phis().size(); }
};

/// `count` evenly spaced values from lo to hi inclusive.
struct LinearGrid {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t count = 2;

    std::vector<double> values() const {
        if (count == 0) throw ConfigError("grid count must be positive");
        std::vector<double> v(count);
        if (count == 1) {
            v[0] = lo;
            return v;
        }
        const double h = (hi - lo) / static_cast<double>(count - 1);
        for (std::size_t k = 0; k < count; ++k) v[k] = lo + static_cast<double>(k) * h;
        v.back() = hi;
        return v;
    }
};

struct ExperimentConfig {
    Scenario scenario = Scenario::stationary;
    WalkParams walk{};
    std::optional<LatticeConfig> lattice;
    double boundary_guard_eps = 1e-12;
    std::size_t steps = 200;
    std::vector<SolitonSpec> solitons;
    BlochAngles coin_state = kPhiPlus;
    double collision_offset = 40.0;
    BlochGrid bloch{};
    LinearGrid g_grid{0.0, 3.0, 31};
    LinearGrid theta_grid{0.0, std::numbers::pi, 21};
    std::size_t dispersion_p_count = 100;
    std::size_t dispersion_theta_count = 100;
    std::string output = "nqw_out";
    std::size_t snapshot_stride = 0;
    PeakOptions peaks{};
    std::size_t workers = 0;
    json echo = json::object();

    /// Lattice for a run whose initial data has the given half-width.
    LatticeConfig lattice_for(std::size_t halfwidth) const {
        if (lattice) return *lattice;
        return LatticeConfig::sized_for(steps, halfwidth, boundary_guard_eps);
    }
};

namespace detail {

inline void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                           std::string_view where) {
    if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

inline std::size_t get_count(const json& obj, const char* key, std::size_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError(std::string("'") + key + "' must be a nonnegative integer");
    return v.get<std::size_t>();
}

inline cplx parse_coefficient(const json& v) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError("coefficient must be a number or [re, im]");
}

inline LinearGrid parse_grid(const json& obj, LinearGrid fallback, std::string_view where) {
    reject_unknown(obj, {"min", "max", "count"}, where);
    return {get_or(obj, "min", fallback.lo), get_or(obj, "max", fallback.hi),
            get_count(obj, "count", fallback.count)};
}

}  // namespace detail

/// Default soliton set for a scenario when the config lists none.
inline std::vector<SolitonSpec> default_solitons(const ExperimentConfig& cfg) {
    const double g = cfg.walk.g > 0.0 ? cfg.walk.g : 1.0;
    SolitonSpec base = SolitonSpec::with_ratio(cfg.walk.kind, g, 0.99, cfg.walk.theta);
    if (cfg.scenario == Scenario::collision) {
        const double v = 0.3 * base.light_speed();
        SolitonSpec left = base, right = base;
        left.velocity = v;
        left.center = -cfg.collision_offset;
        left.coefficient = std::sqrt(2.0);
        right.velocity = -v;
        right.center = cfg.collision_offset;
        right.coefficient = 1.0;
        return {left, right};
    }
    return {base};
}

inline void validate(const ExperimentConfig& cfg) {
    cfg.walk.validate();
    if (cfg.steps == 0 && cfg.scenario != Scenario::dispersion_check)
        throw ConfigError("steps must be positive");
    if (cfg.lattice) cfg.lattice->validate();
    for (const auto& s : cfg.solitons) s.validate();
    switch (cfg.scenario) {
        case Scenario::stationary:
            if (cfg.solitons.size() != 1 || cfg.solitons[0].velocity != 0.0)
                throw ConfigError("stationary needs exactly one zero-velocity soliton");
            break;
        case Scenario::collision:
            if (cfg.solitons.size() != 2)
                throw ConfigError("collision needs exactly two solitons");
            if (cfg.solitons[0].velocity != -cfg.solitons[1].velocity)
                throw ConfigError("collision solitons must have opposite velocities");
            break;
        default:
            break;
    }
    if (!(cfg.peaks.threshold_fraction > 0.0 && cfg.peaks.threshold_fraction < 1.0))
        throw ConfigError("peaks.threshold_fraction must lie in (0, 1)");
    if (cfg.peaks.min_separation == 0) throw ConfigError("peaks.min_separation must be positive");
}

/// Builds a config from JSON. Unknown keys are errors. `scenario` may come from the command
/// line; if the file also names one they must agree.
inline ExperimentConfig parse_config(const json& j, std::optional<Scenario> scenario = {}) {
    using namespace detail;
    reject_unknown(j,
                   {"scenario", "walk", "lattice", "steps", "solitons", "coin_state",
                    "collision_offset", "sweep", "output", "snapshot_stride", "peaks",
                    "workers"},
                   "config");
    ExperimentConfig cfg;
    cfg.echo = j;
    if (j.contains("scenario")) {
        if (!j["scenario"].is_string()) throw ConfigError("scenario must be a string");
        cfg.scenario = parse_scenario(j["scenario"].get<std::string>());
        if (scenario && *scenario != cfg.scenario)
            throw ConfigError("scenario on command line does not match config file");
    } else if (scenario) {
        cfg.scenario = *scenario;
    } else {
        throw ConfigError("no scenario given");
    }

    if (j.contains("walk")) {
        const auto& w = j["walk"];
        reject_unknown(w, {"theta", "kind", "g"}, "walk");
        cfg.walk.theta = CoinAngle{get_or(w, "theta", cfg.walk.theta.radians)};
        if (w.contains("kind")) {
            try {
                cfg.walk.kind = parse_interaction(get_or<std::string>(w, "kind", "scalar"));
            } catch (const DomainError& e) {
                throw ConfigError(e.what());
            }
        }
        cfg.walk.g = get_or(w, "g", cfg.walk.g);
    }
    try {
        cfg.walk.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }

    if (j.contains("lattice")) {
        const auto& l = j["lattice"];
        reject_unknown(l, {"n_sites", "origin_index", "boundary_guard_eps"}, "lattice");
        cfg.boundary_guard_eps = get_or(l, "boundary_guard_eps", cfg.boundary_guard_eps);
        if (l.contains("n_sites")) {
            LatticeConfig lc;
            lc.n_sites = get_count(l, "n_sites", 0);
            lc.origin_index = get_count(l, "origin_index", lc.n_sites / 2);
            lc.boundary_guard_eps = cfg.boundary_guard_eps;
            try {
                lc.validate();
            } catch (const InvalidState& e) {
                throw ConfigError(e.what());
            }
            cfg.lattice = lc;
        } else if (l.contains("origin_index")) {
            throw ConfigError("lattice.origin_index needs lattice.n_sites");
        }
    }
    cfg.steps = get_count(j, "steps", cfg.steps);
    cfg.collision_offset = get_or(j, "collision_offset", cfg.collision_offset);
    cfg.output = get_or<std::string>(j, "output", cfg.output);
    cfg.snapshot_stride = get_count(j, "snapshot_stride", cfg.snapshot_stride);
    cfg.workers = get_count(j, "workers", cfg.workers);

    if (j.contains("coin_state")) {
        const auto& c = j["coin_state"];
        reject_unknown(c, {"theta_b", "phi_b"}, "coin_state");
        cfg.coin_state.theta_b = get_or(c, "theta_b", cfg.coin_state.theta_b);
        cfg.coin_state.phi_b = get_or(c, "phi_b", cfg.coin_state.phi_b);
        if (cfg.coin_state.theta_b < 0.0 || cfg.coin_state.theta_b > std::numbers::pi)
            throw ConfigError("coin_state.theta_b must lie in [0, pi]");
        if (cfg.coin_state.phi_b < 0.0 || cfg.coin_state.phi_b >= 2 * std::numbers::pi)
            throw ConfigError("coin_state.phi_b must lie in [0, 2 pi)");
    }

    if (j.contains("peaks")) {
        const auto& p = j["peaks"];
        reject_unknown(p, {"min_separation", "threshold_fraction"}, "peaks");
        cfg.peaks.min_separation = get_count(p, "min_separation", cfg.peaks.min_separation);
        cfg.peaks.threshold_fraction =
            get_or(p, "threshold_fraction", cfg.peaks.threshold_fraction);
    }

    if (j.contains("sweep")) {
        const auto& s = j["sweep"];
        reject_unknown(s,
                       {"bloch_theta_spacing", "bloch_phi_spacing", "g", "theta",
                        "dispersion_p_count", "dispersion_theta_count"},
                       "sweep");
        cfg.bloch.theta_spacing = get_or(s, "bloch_theta_spacing", cfg.bloch.theta_spacing);
        cfg.bloch.phi_spacing = get_or(s, "bloch_phi_spacing", cfg.bloch.phi_spacing);
        if (!(cfg.bloch.theta_spacing > 0.0) || !(cfg.bloch.phi_spacing > 0.0))
            throw ConfigError("Bloch grid spacings must be positive");
        if (s.contains("g")) cfg.g_grid = parse_grid(s["g"], cfg.g_grid, "sweep.g");
        if (s.contains("theta"))
            cfg.theta_grid = parse_grid(s["theta"], cfg.theta_grid, "sweep.theta");
        cfg.dispersion_p_count = get_count(s, "dispersion_p_count", cfg.dispersion_p_count);
        cfg.dispersion_theta_count =
            get_count(s, "dispersion_theta_count", cfg.dispersion_theta_count);
    }

    if (j.contains("solitons")) {
        if (!j["solitons"].is_array()) throw ConfigError("solitons must be a list");
        for (const auto& e : j["solitons"]) {
            reject_unknown(e,
                           {"omega", "omega_ratio", "velocity", "velocity_over_c", "center",
                            "coefficient", "g"},
                           "soliton");
            if (e.contains("omega") && e.contains("omega_ratio"))
                throw ConfigError("give either omega or omega_ratio, not both");
            if (e.contains("velocity") && e.contains("velocity_over_c"))
                throw ConfigError("give either velocity or velocity_over_c, not both");
            try {
                const double g = get_or(e, "g", cfg.walk.g > 0.0 ? cfg.walk.g : 1.0);
                SolitonSpec s = SolitonSpec::with_ratio(
                    cfg.walk.kind, g, get_or(e, "omega_ratio", 0.99), cfg.walk.theta);
                if (e.contains("omega")) s.omega = get_or(e, "omega", s.omega);
                if (e.contains("velocity_over_c"))
                    s.velocity = get_or(e, "velocity_over_c", 0.0) * s.light_speed();
                else
                    s.velocity = get_or(e, "velocity", 0.0);
                s.center = get_or(e, "center", 0.0);
                if (e.contains("coefficient")) s.coefficient = parse_coefficient(e["coefficient"]);
                cfg.solitons.push_back(s);
            } catch (const DomainError& err) {
                throw ConfigError(std::string("soliton: ") + err.what());
            }
        }
    }
    if (cfg.solitons.empty() &&
        (cfg.scenario == Scenario::stationary || cfg.scenario == Scenario::collision)) {
        try {
            cfg.solitons = default_solitons(cfg);
        } catch (const DomainError& err) {
            throw ConfigError(std::string("soliton defaults: ") + err.what());
        }
    }
    try {
        validate(cfg);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path,
                                    std::optional<Scenario> scenario = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error: " + std::string(e.what()));
    }
    return parse_config(j, scenario);
}

}  // namespace nqw::experiments
