#include <gtest/gtest.h>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "nqw/experiments/config.hpp"
#include "nqw/experiments/output.hpp"
#include "nqw/experiments/parallel.hpp"
#include "nqw/experiments/scenarios.hpp"
#include "nqw/experiments/table.hpp"

using namespace nqw;
using namespace nqw::experiments;
using nlohmann::json;
using std::numbers::pi;

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("nqw_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const int status = std::system((std::string(NQW_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, ScenarioNamesRoundTrip) {
    for (const auto& n : kScenarioNames) EXPECT_EQ(to_string(parse_scenario(n.name)), n.name);
    EXPECT_THROW(parse_scenario("nope"), ConfigError);
}

TEST(Config, Defaults) {
    const auto cfg = parse_config(json::object(), Scenario::collision);
    EXPECT_EQ(cfg.steps, 200u);
    EXPECT_EQ(cfg.walk.theta.radians, pi / 4);
    ASSERT_EQ(cfg.solitons.size(), 2u);
    EXPECT_EQ(cfg.solitons[0].center, -40.0);
    EXPECT_EQ(cfg.solitons[1].center, 40.0);
    EXPECT_NEAR(cfg.solitons[0].velocity, -cfg.solitons[1].velocity, 1e-15);
    EXPECT_NEAR(std::abs(cfg.solitons[0].coefficient), std::sqrt(2.0), 1e-15);
    EXPECT_FALSE(cfg.lattice.has_value());
}

TEST(Config, FullDocument) {
    const auto j = json::parse(R"({
        "scenario": "stationary",
        "walk": {"theta": 0.5, "kind": "vector", "g": 2.0},
        "lattice": {"n_sites": 301, "boundary_guard_eps": 1e-10},
        "steps": 50,
        "solitons": [{"omega_ratio": 0.95, "coefficient": [0.0, 1.0]}],
        "output": "somewhere",
        "workers": 3
    })");
    const auto cfg = parse_config(j);
    EXPECT_EQ(cfg.scenario, Scenario::stationary);
    EXPECT_EQ(cfg.walk.kind, InteractionType::vector);
    EXPECT_EQ(cfg.walk.g, 2.0);
    ASSERT_TRUE(cfg.lattice);
    EXPECT_EQ(cfg.lattice->origin_index, 150u);
    EXPECT_EQ(cfg.lattice->boundary_guard_eps, 1e-10);
    ASSERT_EQ(cfg.solitons.size(), 1u);
    EXPECT_EQ(cfg.solitons[0].g, 2.0);
    EXPECT_NEAR(cfg.solitons[0].omega, 0.95 * std::tan(0.5), 1e-15);
    EXPECT_EQ(cfg.solitons[0].coefficient, (cplx{0.0, 1.0}));
    EXPECT_EQ(cfg.workers, 3u);
    EXPECT_EQ(cfg.echo, j);
}

TEST(Config, Rejections) {
    auto bad = [](const char* text) {
        EXPECT_THROW(parse_config(json::parse(text)), ConfigError) << text;
    };
    bad(R"({})");
    bad(R"({"scenario": "diffusion", "stepz": 3})");
    bad(R"({"scenario": "diffusion", "walk": {"gg": 1}})");
    bad(R"({"scenario": "diffusion", "walk": {"g": -1}})");
    bad(R"({"scenario": "diffusion", "walk": {"kind": "tensor"}})");
    bad(R"({"scenario": "diffusion", "steps": -4})");
    bad(R"({"scenario": "diffusion", "lattice": {"n_sites": 2}})");
    bad(R"({"scenario": "diffusion", "coin_state": {"theta_b": 4}})");
    bad(R"({"scenario": "bloch-sweep", "sweep": {"bloch_theta_spacing": 0}})");
    bad(R"({"scenario": "stationary", "solitons": [{"omega_ratio": 1.5}]})");
    bad(R"({"scenario": "stationary", "solitons": [{"velocity_over_c": 0.2}]})");
    bad(R"({"scenario": "stationary", "solitons": [{}, {}]})");
    bad(R"({"scenario": "collision", "solitons": [{"velocity_over_c": 0.2}, {"velocity_over_c": 0.2}]})");
    bad(R"({"scenario": "collision", "solitons": [{"omega": 1, "omega_ratio": 0.5}]})");
    EXPECT_THROW(parse_config(json::parse(R"({"scenario": "diffusion"})"), Scenario::collision),
                 ConfigError);
}

TEST(BlochGridTest, Counts) {
    EXPECT_EQ(BlochGrid{}.thetas().size(), 79u);
    EXPECT_EQ(BlochGrid{}.phis().size(), 158u);
    EXPECT_EQ(BlochGrid{}.size(), 12482u);
    EXPECT_EQ((BlochGrid{0.2, 0.2}.size()), 16u * 32u);
    for (double p : BlochGrid{}.phis()) EXPECT_LT(p, 2 * pi);
}

TEST(BlochGridTest, CoinStatesNormalized) {
    const auto p = kPhiPlus.coin_state(), m = kPhiMinus.coin_state();
    EXPECT_NEAR(p.norm2(), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(p.v - cplx{0.0, 1.0} * p.u), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(m.v + cplx{0.0, 1.0} * m.u), 0.0, 1e-15);
}

TEST(Table, FormatDoubleRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::nextafter(1.0, 2.0)}) {
        const auto s = format_double(v);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        EXPECT_EQ(back, v) << s;
    }
    EXPECT_EQ(format_double(std::nan("")), "");
    EXPECT_EQ(format_double(3.0), "3");
}

TEST(Table, CsvLayout) {
    Table t{{"a", "b", "c"}, {}};
    t.add({1.5, 2LL, std::string("x;y")});
    std::ostringstream os;
    write_csv(os, t);
    EXPECT_EQ(os.str(), "a,b,c\n1.5,2,x;y\n");
    EXPECT_THROW(t.add({1.0}), std::exception);
}

TEST(Parallel, OrderAndLowestFailure) {
    std::vector<std::size_t> out(100);
    parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = i * i; },
                 [](std::size_t i) { return std::to_string(i); });
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], i * i);

    try {
        parallel_for(50, 1,
                     [](std::size_t i) {
                         if (i == 17 || i == 30) throw NumericFailure("boom");
                     },
                     [](std::size_t i) { return "i=" + std::to_string(i); });
        FAIL();
    } catch (const SweepFailure& e) {
        EXPECT_EQ(e.index(), 17u);
        EXPECT_NE(std::string(e.what()).find("i=17"), std::string::npos);
        EXPECT_THROW(std::rethrow_exception(e.cause()), NumericFailure);
    }
}

TEST(Sweeps, DeterministicAcrossWorkerCounts) {
    auto cfg = parse_config(json::parse(R"({"scenario": "bloch-sweep", "steps": 30,
        "sweep": {"bloch_theta_spacing": 0.6, "bloch_phi_spacing": 0.9}})"));
    cfg.workers = 1;
    const auto a = run_bloch_sweep(cfg);
    cfg.workers = 3;
    const auto b = run_bloch_sweep(cfg);
    ASSERT_EQ(a.size(), cfg.bloch.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].theta_b, b[i].theta_b);
        EXPECT_EQ(a[i].phi_b, b[i].phi_b);
        EXPECT_EQ(a[i].speed.linear, b[i].speed.linear);
        EXPECT_EQ(a[i].speed.scalar, b[i].speed.scalar);
        EXPECT_EQ(a[i].speed.vector, b[i].speed.vector);
    }
    EXPECT_EQ(a[1].theta_b, 0.0);
    EXPECT_NEAR(a[1].phi_b, 0.9, 1e-15);
    const auto s = sorted_by_linear_speed(a);
    for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LE(s[i - 1].speed.linear, s[i].speed.linear);
}

TEST(Sweeps, ThetaMirrorSymmetry) {
    auto cfg = parse_config(json::parse(R"({"scenario": "theta-sweep", "steps": 40,
        "sweep": {"theta": {"min": 0, "max": 3.141592653589793, "count": 9}}})"));
    const auto rows = run_theta_sweep(cfg);
    ASSERT_EQ(rows.size(), 18u);
    for (std::size_t k = 0; k < 9; ++k) {
        const auto& lo = rows[2 * k];            // phi+ at theta
        const auto& hi = rows[2 * (8 - k) + 1];  // phi- at pi - theta
        EXPECT_NEAR(lo.speed.linear, hi.speed.linear, 1e-9);
        EXPECT_NEAR(lo.speed.scalar, hi.speed.scalar, 1e-9);
        EXPECT_NEAR(lo.speed.vector, hi.speed.vector, 1e-9);
    }
}

TEST(Sweeps, GSweepStartsLinear) {
    auto cfg = parse_config(json::parse(R"({"scenario": "g-sweep", "steps": 40,
        "sweep": {"g": {"min": 0, "max": 2, "count": 3}}})"));
    const auto rows = run_g_sweep(cfg);
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows[0].coin, "phi+");
    EXPECT_EQ(rows[1].coin, "phi-");
    EXPECT_EQ(rows[0].speed.scalar, rows[0].speed.linear);
    EXPECT_EQ(rows[0].speed.vector, rows[0].speed.linear);
    const auto surf = run_g_theta_surface(parse_config(json::parse(R"({"scenario": "g-theta-surface",
        "steps": 10, "sweep": {"g": {"min": 0, "max": 1, "count": 2},
        "theta": {"min": 0.1, "max": 1.1, "count": 3}}})")));
    ASSERT_EQ(surf.size(), 6u);
    EXPECT_EQ(surf[3].g, 1.0);
    EXPECT_EQ(surf[3].theta, 0.1);
}

TEST(Scenarios, StationaryStaysPut) {
    auto cfg = parse_config(json::parse(R"({"scenario": "stationary", "steps": 60})"));
    const auto res = run_stationary(cfg);
    ASSERT_EQ(res.localization.size(), 61u);
    for (double f : res.localization) EXPECT_GE(f, 0.9);
    for (long x : res.peak_x) EXPECT_LE(std::abs(x), 5);
}

TEST(Scenarios, CollisionStartsWithTwoPeaks) {
    auto cfg = parse_config(json::parse(R"({"scenario": "collision", "steps": 10})"));
    const auto res = run_collision(cfg);
    ASSERT_EQ(res.peaks.size(), 11u);
    EXPECT_EQ(res.peaks[0].size(), 2u);
    EXPECT_LT(res.peaks[0][0], 0);
    EXPECT_GT(res.peaks[0][1], 0);
}

TEST(Scenarios, DiffusionRecordsAllThree) {
    auto cfg = parse_config(json::parse(R"({"scenario": "diffusion", "steps": 25})"));
    const auto res = run_diffusion(cfg);
    for (Evolution e : kAllEvolutions) {
        EXPECT_EQ(res.of(e).size(), 26u);
        ASSERT_FALSE(res.of(e).snapshots.empty());
        EXPECT_EQ(res.of(e).snapshots.back().t, 25u);
    }
    EXPECT_NE(res.scalar.final_speed(), res.linear.final_speed());
}

TEST(Scenarios, BoundaryViolationOnSmallLattice) {
    auto cfg = parse_config(json::parse(R"({"scenario": "diffusion", "steps": 30,
        "lattice": {"n_sites": 21}})"));
    EXPECT_THROW(run_diffusion(cfg), BoundaryViolation);
}

TEST(Scenarios, DispersionCheck) {
    auto cfg = parse_config(json::parse(R"({"scenario": "dispersion-check",
        "sweep": {"dispersion_p_count": 40, "dispersion_theta_count": 40}})"));
    const auto rep = run_dispersion_check(cfg);
    ASSERT_EQ(rep.rows.size(), 40u);
    EXPECT_LT(rep.max_error, 1e-12);
    EXPECT_EQ(rep.rows.back().theta, pi);
    std::size_t singular = 0;
    for (const auto& r : rep.rows) singular += !r.dirac;
    EXPECT_EQ(singular, 2u);
}

TEST(Output, ByteIdenticalReruns) {
    const auto cfg = parse_config(json::parse(R"({"scenario": "diffusion", "steps": 20,
        "snapshot_stride": 10})"));
    const auto d1 = scratch("rerun1"), d2 = scratch("rerun2");
    write_output(d1, run_scenario(cfg));
    write_output(d2, run_scenario(cfg));
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(d1)) {
        if (!e.is_regular_file()) continue;
        ++files;
        EXPECT_EQ(slurp(e.path()), slurp(d2 / fs::relative(e.path(), d1))) << e.path();
    }
    EXPECT_EQ(files, 14u);
    EXPECT_EQ(slurp(d1 / "speeds.csv").substr(0, 17), "evolution,speed\nl");
}

TEST(Cli, ExitCodes) {
    const auto dir = scratch("cli");
    auto write = [&](const char* name, const char* body) {
        std::ofstream(dir / name) << body;
        return (dir / name).string();
    };
    const auto ok = write("ok.json", R"({"steps": 5})");
    const auto bad = write("bad.json", R"({"steps": 5, "typo": 1})");
    const auto small = write("small.json", R"({"steps": 30, "lattice": {"n_sites": 21}})");
    const auto out = (dir / "out").string();

    EXPECT_EQ(run_cli("diffusion --config " + ok + " --out " + out), 0);
    EXPECT_TRUE(fs::exists(dir / "out" / "meta.json"));
    EXPECT_EQ(run_cli("diffusion --config " + bad + " --out " + out), 2);
    EXPECT_EQ(run_cli("diffusion --config " + small + " --out " + out), 3);
    const auto meta = json::parse(slurp(dir / "out" / "meta.json"));
    EXPECT_EQ(meta["status"], "failed");
    EXPECT_EQ(meta["guard_status"], "violated");
    EXPECT_NE(run_cli("not-a-scenario --config " + ok), 0);
}
