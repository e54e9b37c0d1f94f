#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>

#include "nqw/experiments/config.hpp"
#include "nqw/experiments/scenarios.hpp"
#include "nqw/experiments/table.hpp"
#include "nqw/version.hpp"

namespace nqw::experiments {

/// Everything a scenario emits: CSV tables keyed by relative path, plus the meta record.
struct ScenarioOutput {
    std::map<std::string, Table> tables;
    json meta = json::object();
};

inline Table stats_table(const RunRecord& r) {
    Table t{{"t", "mean_x", "sigma", "speed"}, {}};
    for (std::size_t k = 0; k < r.size(); ++k)
        t.add({static_cast<long long>(r.times[k]), r.mean_x[k], r.sigma[k], r.speed[k]});
    return t;
}

inline Table density_table(const DensitySnapshot& s, const LatticeConfig& lattice) {
    Table t{{"x", "density"}, {}};
    for (std::size_t i = 0; i < s.density.size(); ++i)
        t.add({static_cast<long long>(lattice.position(i)), s.density[i]});
    return t;
}

inline void add_run(ScenarioOutput& out, const RunRecord& r, const std::string& prefix = "") {
    out.tables[prefix + "stats.csv"] = stats_table(r);
    for (const auto& s : r.snapshots)
        out.tables[prefix + "density_t" + std::to_string(s.t) + ".csv"] =
            density_table(s, r.lattice);
}

inline json lattice_json(const LatticeConfig& l) {
    return {{"n_sites", l.n_sites},
            {"origin_index", l.origin_index},
            {"boundary_guard_eps", l.boundary_guard_eps}};
}

inline json walk_json(const WalkParams& w) {
    return {{"theta", w.theta.radians}, {"kind", std::string(to_string(w.kind))}, {"g", w.g}};
}

inline json base_meta(const ExperimentConfig& cfg) {
    json solitons = json::array();
    for (const auto& s : cfg.solitons)
        solitons.push_back({{"omega", s.omega},
                            {"velocity", s.velocity},
                            {"center", s.center},
                            {"g", s.g},
                            {"coefficient", {s.coefficient.real(), s.coefficient.imag()}},
                            {"stability_warning", s.stability_warning()}});
    return {{"tool", "nqw"},
            {"version", std::string(kVersion)},
            {"scenario", std::string(to_string(cfg.scenario))},
            {"config", cfg.echo},
            {"resolved",
             {{"walk", walk_json(cfg.walk)},
              {"steps", cfg.steps},
              {"solitons", solitons},
              {"coin_state", {{"theta_b", cfg.coin_state.theta_b}, {"phi_b", cfg.coin_state.phi_b}}},
              {"lattice", cfg.lattice ? lattice_json(*cfg.lattice) : json("auto")}}},
            {"boundary_policy",
             "fixed non-periodic lattice; a run is invalid once either edge site holds more than "
             "boundary_guard_eps of the total charge"},
            {"status", "ok"},
            {"guard_status", "ok"}};
}

inline std::string join_positions(const std::vector<long>& xs) {
    std::string s;
    for (std::size_t k = 0; k < xs.size(); ++k) s += (k ? ";" : "") + std::to_string(xs[k]);
    return s;
}

inline Table speed_rows_table(const std::vector<SpeedRow>& rows, bool with_g, bool with_theta,
                              bool with_coin) {
    Table t;
    if (with_g) t.header.push_back("g");
    if (with_theta) t.header.push_back("theta");
    if (with_coin) t.header.push_back("coin");
    for (const char* h : {"speed_linear", "speed_scalar", "speed_vector"}) t.header.push_back(h);
    for (const auto& r : rows) {
        std::vector<Cell> row;
        if (with_g) row.push_back(r.g);
        if (with_theta) row.push_back(r.theta);
        if (with_coin) row.push_back(r.coin);
        row.push_back(r.speed.linear);
        row.push_back(r.speed.scalar);
        row.push_back(r.speed.vector);
        t.add(std::move(row));
    }
    return t;
}

inline Table bloch_table(const std::vector<BlochRow>& rows) {
    Table t{{"theta_b", "phi_b", "speed_linear", "speed_scalar", "speed_vector"}, {}};
    for (const auto& r : rows)
        t.add({r.theta_b, r.phi_b, r.speed.linear, r.speed.scalar, r.speed.vector});
    return t;
}

inline json speed_summary(double lin, double sca, double vec) {
    return {{"max_speed_linear", lin}, {"max_speed_scalar", sca}, {"max_speed_vector", vec}};
}

template <class Rows>
json max_speeds(const Rows& rows) {
    double l = 0, s = 0, v = 0;
    for (const auto& r : rows) {
        l = std::max(l, r.speed.linear);
        s = std::max(s, r.speed.scalar);
        v = std::max(v, r.speed.vector);
    }
    return speed_summary(l, s, v);
}

/// Runs the configured scenario and collects its outputs.
inline ScenarioOutput run_scenario(const ExperimentConfig& cfg) {
    ScenarioOutput out;
    out.meta = base_meta(cfg);
    switch (cfg.scenario) {
        case Scenario::stationary: {
            const auto res = run_stationary(cfg);
            add_run(out, res.record);
            Table loc{{"t", "localization_fraction", "peak_x"}, {}};
            for (std::size_t k = 0; k < res.record.size(); ++k)
                loc.add({static_cast<long long>(res.record.times[k]), res.localization[k],
                         static_cast<long long>(res.peak_x[k])});
            out.tables["localization.csv"] = std::move(loc);
            out.meta["localization_radius"] = res.radius;
            out.meta["lattice"] = lattice_json(res.record.lattice);
            break;
        }
        case Scenario::collision: {
            const auto res = run_collision(cfg);
            add_run(out, res.record);
            Table pk{{"t", "peak_count", "peak_x"}, {}};
            for (std::size_t k = 0; k < res.record.size(); ++k)
                pk.add({static_cast<long long>(res.record.times[k]),
                        static_cast<long long>(res.peaks[k].size()), join_positions(res.peaks[k])});
            out.tables["peaks.csv"] = std::move(pk);
            out.meta["lattice"] = lattice_json(res.record.lattice);
            break;
        }
        case Scenario::diffusion: {
            const auto res = run_diffusion(cfg);
            Table summary{{"evolution", "speed"}, {}};
            for (Evolution e : kAllEvolutions) {
                add_run(out, res.of(e), std::string(to_string(e)) + "/");
                summary.add({std::string(to_string(e)), res.of(e).final_speed()});
            }
            out.tables["speeds.csv"] = std::move(summary);
            out.meta["lattice"] = lattice_json(res.linear.lattice);
            break;
        }
        case Scenario::bloch_sweep: {
            const auto rows = run_bloch_sweep(cfg);
            out.tables["sweep.csv"] = bloch_table(rows);
            out.tables["sweep_sorted.csv"] = bloch_table(sorted_by_linear_speed(rows));
            out.meta["rows"] = rows.size();
            out.meta["summary"] = max_speeds(rows);
            break;
        }
        case Scenario::g_sweep: {
            const auto rows = run_g_sweep(cfg);
            out.tables["sweep.csv"] = speed_rows_table(rows, true, false, true);
            out.meta["rows"] = rows.size();
            break;
        }
        case Scenario::theta_sweep: {
            const auto rows = run_theta_sweep(cfg);
            out.tables["sweep.csv"] = speed_rows_table(rows, false, true, true);
            out.meta["rows"] = rows.size();
            break;
        }
        case Scenario::g_theta_surface: {
            const auto rows = run_g_theta_surface(cfg);
            out.tables["sweep.csv"] = speed_rows_table(rows, true, true, false);
            out.meta["rows"] = rows.size();
            break;
        }
        case Scenario::dispersion_check: {
            const auto rep = run_dispersion_check(cfg);
            Table t{{"theta", "c", "mass_energy", "mass", "max_error"}, {}};
            for (const auto& r : rep.rows) {
                if (r.dirac)
                    t.add({r.theta, r.dirac->c, r.dirac->mass_energy, r.mass, r.max_error});
                else
                    t.add({r.theta, std::string{}, std::string{}, r.mass, r.max_error});
            }
            out.tables["dispersion.csv"] = std::move(t);
            out.meta["max_error"] = rep.max_error;
            break;
        }
    }
    return out;
}

inline void write_meta(const std::filesystem::path& dir, const json& meta) {
    std::filesystem::create_directories(dir);
    std::ofstream os(dir / "meta.json", std::ios::binary);
    if (!os) throw Error("cannot write meta.json in '" + dir.string() + "'");
    os << meta.dump(2) << '\n';
}

inline void write_output(const std::filesystem::path& dir, const ScenarioOutput& out) {
    std::filesystem::create_directories(dir);
    for (const auto& [rel, table] : out.tables) {
        const auto path = dir / rel;
        std::filesystem::create_directories(path.parent_path());
        write_csv(path.string(), table);
    }
    write_meta(dir, out.meta);
}

/// Column layout of each scenario's CSV files, shown by `nqw --help`.
inline constexpr std::string_view kOutputSchemas = R"(Outputs (CSV with header row, shortest round-trip decimals, empty cell = undefined):
  stationary        stats.csv (t,mean_x,sigma,speed)  localization.csv (t,localization_fraction,peak_x)
  collision         stats.csv  peaks.csv (t,peak_count,peak_x; positions separated by ';')
  diffusion         {linear,scalar,vector}/stats.csv  {..}/density_t<steps>.csv (x,density)
                    speeds.csv (evolution,speed)
  bloch-sweep       sweep.csv, sweep_sorted.csv (theta_b,phi_b,speed_linear,speed_scalar,speed_vector)
  g-sweep           sweep.csv (g,coin,speed_linear,speed_scalar,speed_vector)
  theta-sweep       sweep.csv (theta,coin,speed_linear,speed_scalar,speed_vector)
  g-theta-surface   sweep.csv (g,theta,speed_linear,speed_scalar,speed_vector)   coin = phi-
  dispersion-check  dispersion.csv (theta,c,mass_energy,mass,max_error)
  every scenario    meta.json (config echo, resolved parameters, version, status, guard status)
  --snapshots k     adds density_t<t>.csv for every t divisible by k)";

}  // namespace nqw::experiments
