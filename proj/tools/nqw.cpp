#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nqw/experiments/config.hpp"
#include "nqw/experiments/output.hpp"
#include "nqw/experiments/parallel.hpp"

namespace ex = nqw::experiments;

namespace {

enum ExitCode : int { kOk = 0, kConfigError = 2, kBoundary = 3, kNumeric = 4 };

int classify(const std::exception_ptr& ep) {
    try {
        std::rethrow_exception(ep);
    } catch (const ex::SweepFailure& e) {
        return classify(e.cause());
    } catch (const nqw::BoundaryViolation&) {
        return kBoundary;
    } catch (const nqw::NumericFailure&) {
        return kNumeric;
    } catch (...) {
        return kConfigError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlinear quantum walk simulator of the 1+1-D nonlinear Dirac equation"};
    app.footer(std::string(ex::kOutputSchemas) +
               "\n\nExit codes: 0 ok, 2 config error, 3 boundary-guard violation, "
               "4 numeric failure");

    std::string scenario_name;
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> snapshots;
    std::optional<std::size_t> workers;
    bool seedless = false;

    std::string names;
    for (const auto& e : ex::kScenarioNames) names += (names.empty() ? "" : ", ") + std::string(e.name);
    app.add_option("scenario", scenario_name, "one of: " + names)->required();
    app.add_option("--config", config_path, "JSON config file")->required();
    app.add_option("--out", out_dir, "output directory (overrides config 'output')");
    app.add_option("--snapshots", snapshots, "density snapshot stride (0 = none)");
    app.add_option("--workers", workers, "worker threads for sweeps (0 = all cores)");
    app.add_flag("--seedless", seedless,
                 "accepted for scripting symmetry; every scenario is deterministic");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    ex::ExperimentConfig cfg;
    try {
        cfg = ex::load_config(config_path, ex::parse_scenario(scenario_name));
        if (snapshots) cfg.snapshot_stride = *snapshots;
        if (workers) cfg.workers = *workers;
        if (out_dir) cfg.output = *out_dir;
    } catch (const std::exception& e) {
        std::cerr << "nqw: config error: " << e.what() << '\n';
        return kConfigError;
    }
    for (const auto& s : cfg.solitons)
        if (s.stability_warning())
            std::cerr << "nqw: warning: soliton velocity exceeds 0.8c; expect loss of a single "
                         "peak\n";

    const std::filesystem::path dir = cfg.output;
    try {
        const auto out = ex::run_scenario(cfg);
        ex::write_output(dir, out);
    } catch (const std::exception& e) {
        const int rc = classify(std::current_exception());
        std::cerr << "nqw: " << e.what() << '\n';
        try {
            auto meta = ex::base_meta(cfg);
            meta["status"] = "failed";
            meta["error"] = e.what();
            if (rc == kBoundary) meta["guard_status"] = "violated";
            ex::write_meta(dir, meta);
        } catch (const std::exception& w) {
            std::cerr << "nqw: could not write meta.json: " << w.what() << '\n';
        }
        return rc;
    }
    return kOk;
}
