#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qwalk/experiment.hpp"
#include "qwalk/io.hpp"
#include "qwalk/util.hpp"

using namespace qwalk;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("qwalk_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

std::vector<double> split_row(const std::string& line) {
    std::vector<double> out;
    std::istringstream in(line);
    std::string field;
    while (std::getline(in, field, ',')) out.push_back(std::stod(field));
    return out;
}

ExperimentConfig tiny_config(const std::string& out_dir) {
    ExperimentConfig c;
    c.model = WalkModel::dirac(1, 0.3);
    c.sizes = {64};
    c.state.type = "gaussian";
    c.state.kprime = {0.5, 0, 0};
    c.state.sigma = {0.125, 0, 0};
    c.engine = "spectral";
    c.steps = 8;
    c.stride = 4;
    c.observables = {"mean"};
    c.snapshots = {0, 8};
    c.marginals = {{0}};
    c.dump_states = true;
    c.out_dir = out_dir;
    return c;
}

}  // namespace

TEST_CASE("cli_preset_catalogue_round_trips") {
    const auto names = preset_names();
    REQUIRE(names == std::vector<std::string>{"fig2", "fig3", "fig4", "fig5", "fig6"});
    for (const auto& name : names) {
        CHECK_FALSE(preset_summary(name).empty());
        const ExperimentConfig c = preset_config(name);
        const nlohmann::json j = config_to_json(c);
        const ExperimentConfig back = config_from_json(j);
        CHECK(config_to_json(back).dump() == j.dump());
    }
    CHECK_THROWS(preset_config("fig1"));
    CHECK_THROWS(preset_summary("nope"));
}

TEST_CASE("cli_config_json_round_trip_preserves_all_fields") {
    ExperimentConfig c;
    c.model = WalkModel::dirac(3, 0.25);
    c.sizes = {8, 8, 8};
    c.state.type = "superposition";
    c.state.kprime = {0.1, 0.2, 0.3};
    c.state.sigma = {0.25, 0.25, 0.25};
    c.state.branch = -1;
    c.state.parity = -1;
    c.state.c_plus = {0.6, 0.0};
    c.state.c_minus = {0.0, 0.8};
    c.engine = "truncated-2";
    c.steps = 12;
    c.stride = 3;
    c.observables = {"mean", "decomposition"};
    c.snapshots = {0, 6, 12};
    c.marginals = {{0, 1}, {2}};
    c.dump_states = true;
    c.out_dir = "somewhere";
    c.seed = 99;

    const nlohmann::json j = config_to_json(c);
    CHECK(j.contains("grid"));
    CHECK(j["grid"] == nlohmann::json({8, 8, 8}));
    const ExperimentConfig back = config_from_json(j);
    CHECK(config_to_json(back).dump() == j.dump());
    CHECK(back.sizes == c.sizes);
    CHECK(back.state.type == c.state.type);
    CHECK(back.state.c_minus == c.state.c_minus);
    CHECK(back.engine == c.engine);
    CHECK(back.marginals == c.marginals);
    CHECK(back.seed == c.seed);

    // localized x0 and zeta entries survive, the latter as [re, im] pairs
    ExperimentConfig loc;
    loc.model = WalkModel::dirac(2, 0.2);
    loc.sizes = {4, 4};
    loc.state.type = "localized";
    loc.state.x0_set = true;
    loc.state.x0 = {1, 3, 0};
    loc.state.zeta = {{0.6, 0.0}, {0.0, 0.8}, {0.0, 0.0}, {0.0, 0.0}};
    const ExperimentConfig locback = config_from_json(config_to_json(loc));
    CHECK(locback.state.x0_set);
    CHECK(locback.state.x0 == loc.state.x0);
    CHECK(locback.state.zeta == loc.state.zeta);

    CHECK_THROWS(config_from_json(nlohmann::json{{"model", nullptr}}));
}

TEST_CASE("cli_run_experiment_artifacts") {
    const fs::path dir = fresh_dir("run");
    std::ostringstream log;
    const int rc = run_experiment(tiny_config(dir.string()), log);
    CHECK(rc == 0);

    for (const char* name : {"series.csv", "dist_t0.csv", "dist_t8.csv", "state_t0.qwlk",
                             "state_t8.qwlk", "run.json"}) {
        CHECK(fs::exists(dir / name));
    }

    const auto series = lines_of(slurp(dir / "series.csv"));
    REQUIRE(series.size() == 4);
    CHECK(series[0] == "t,x_mean_1");
    CHECK(split_row(series[1])[0] == 0.0);
    CHECK(split_row(series[3])[0] == 8.0);

    const auto dist = lines_of(slurp(dir / "dist_t0.csv"));
    REQUIRE(dist.size() == 65);
    CHECK(dist[0] == "x,p");
    double mass = 0.0;
    for (std::size_t i = 1; i < dist.size(); ++i) mass += split_row(dist[i])[1];
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));

    const nlohmann::json report = nlohmann::json::parse(slurp(dir / "run.json"));
    CHECK(std::abs(report["final_norm"].get<double>() - 1.0) < 1e-9);
    CHECK_FALSE(report["degraded"].get<bool>());
    CHECK(report["config"]["grid"] == nlohmann::json({64}));

    const FieldState snap = load_state((dir / "state_t8.qwlk").string());
    CHECK(snap.time == 8);
    CHECK(snap.domain == Domain::Position);
    CHECK(snap.grid.sizes == std::array<std::int64_t, 3>{64, 1, 1});
    CHECK(norm(snap) == doctest::Approx(1.0).epsilon(1e-12));

    fs::remove_all(dir);
}

TEST_CASE("cli_run_experiment_deterministic_and_thread_invariant") {
    const fs::path dir1 = fresh_dir("det1");
    const fs::path dir2 = fresh_dir("det2");
    const fs::path dir4 = fresh_dir("det4");
    std::ostringstream log;
    REQUIRE(run_experiment(tiny_config(dir1.string()), log) == 0);
    REQUIRE(run_experiment(tiny_config(dir2.string()), log) == 0);
    set_max_threads(4);
    REQUIRE(run_experiment(tiny_config(dir4.string()), log) == 0);
    set_max_threads(1);

    const std::string base = slurp(dir1 / "series.csv");
    CHECK(slurp(dir2 / "series.csv") == base);
    CHECK(slurp(dir4 / "series.csv") == base);
    CHECK(slurp(dir4 / "dist_t8.csv") == slurp(dir1 / "dist_t8.csv"));

    fs::remove_all(dir1);
    fs::remove_all(dir2);
    fs::remove_all(dir4);
}

TEST_CASE("cli_run_experiment_decomposition_series") {
    const fs::path dir = fresh_dir("dec");
    ExperimentConfig c = tiny_config(dir.string());
    c.sizes = {128};
    c.state.type = "superposition";
    c.state.c_plus = {1.0 / std::sqrt(2.0), 0.0};
    c.state.c_minus = {1.0 / std::sqrt(2.0), 0.0};
    c.observables = {"decomposition"};
    c.snapshots.clear();
    c.marginals.clear();
    c.dump_states = false;
    c.steps = 12;
    c.stride = 2;

    std::ostringstream log;
    REQUIRE(run_experiment(c, log) == 0);

    const auto series = lines_of(slurp(dir / "series.csv"));
    REQUIRE(series.size() == 8);
    CHECK(series[0] == "t,x_mean_1,xplus_1,xminus_1,xint_1");
    for (std::size_t i = 1; i < series.size(); ++i) {
        const auto row = split_row(series[i]);
        REQUIRE(row.size() == 5);
        CHECK(std::abs(row[2] + row[3] + row[4] - row[1]) < 1e-8);
    }

    const nlohmann::json report = nlohmann::json::parse(slurp(dir / "run.json"));
    CHECK(report["degenerate_mass"].get<double>() == 0.0);

    // decomposition needs the spectral engine
    c.engine = "position";
    CHECK_THROWS(run_experiment(c, log));

    fs::remove_all(dir);
}

TEST_CASE("cli_run_verify_passes_and_detects_corruption") {
    std::ostringstream log;
    CHECK(run_verify(2024, false, log) == 0);
    CHECK(log.str().find("PASS") != std::string::npos);
    CHECK(log.str().find("FAIL") == std::string::npos);

    std::ostringstream bad;
    CHECK(run_verify(2024, true, bad) != 0);
    CHECK(bad.str().find("FAIL") != std::string::npos);
}

TEST_CASE("cli_dispersion_csv") {
    const fs::path dir = fresh_dir("disp");

    write_dispersion_csv((dir / "w1.csv").string(), WalkModel::weyl(1), 16);
    const auto w1 = lines_of(slurp(dir / "w1.csv"));
    REQUIRE(w1.size() == 17);
    CHECK(w1[0] == "k1,omega,v1,u");
    for (std::size_t i = 1; i < w1.size(); ++i) {
        const auto row = split_row(w1[i]);
        REQUIRE(row.size() == 4);
        CHECK(row[1] == doctest::Approx(std::abs(row[0])).epsilon(1e-12));
    }

    // flat band: omega = pi/2 everywhere, velocity reported as zero
    write_dispersion_csv((dir / "flat.csv").string(), WalkModel::dirac(1, 1.0), 8);
    const auto flat = lines_of(slurp(dir / "flat.csv"));
    REQUIRE(flat.size() == 9);
    for (std::size_t i = 1; i < flat.size(); ++i) {
        const auto row = split_row(flat[i]);
        CHECK(row[1] == doctest::Approx(M_PI / 2).epsilon(1e-15));
        CHECK(row[2] == 0.0);
    }

    write_dispersion_csv((dir / "w3.csv").string(), WalkModel::weyl(3), 8);
    const auto w3 = lines_of(slurp(dir / "w3.csv"));
    REQUIRE(w3.size() == 513);
    CHECK(w3[0] == "k1,k2,k3,omega,v1,v2,v3,u");

    CHECK_THROWS(write_dispersion_csv((dir / "bad.csv").string(), WalkModel::weyl(1), 0));

    fs::remove_all(dir);
}

TEST_CASE("cli_state_dump_round_trip") {
    const fs::path dir = fresh_dir("qwlk");

    ParticleStateSpec spec;
    spec.model = WalkModel::dirac(3, 0.3);
    spec.grid = GridSpec::bcc(4, 4, 4);
    spec.kprime = {0, 0.5, 0};
    spec.sigma = {0.25, 0.25, 0.25};
    const FieldState state = gaussian_particle_state(spec);

    for (const FieldState& original : {state, to_momentum(state)}) {
        const std::string path = (dir / "s.qwlk").string();
        dump_state(path, original);
        const FieldState back = load_state(path);
        CHECK(back.domain == original.domain);
        CHECK(back.time == original.time);
        CHECK(back.grid.sizes == original.grid.sizes);
        CHECK(back.grid.kind == original.grid.kind);
        CHECK(back.model.family == original.model.family);
        CHECK(back.model.mass == original.model.mass);
        CHECK(back.origin == original.origin);
        REQUIRE(back.amps.size() == original.amps.size());
        CHECK((back.amps - original.amps).cwiseAbs().maxCoeff() == 0.0);
    }

    // cubic 1D as well, with a nonzero time stamp
    Eigen::VectorXcd zeta(2);
    zeta << 0.6, std::complex<double>(0, 0.8);
    FieldState small = localized_state(GridSpec::cubic({8}), WalkModel::dirac(1, 0.5), {3, 0, 0},
                                       zeta);
    small.time = 42;
    dump_state((dir / "small.qwlk").string(), small);
    const FieldState small_back = load_state((dir / "small.qwlk").string());
    CHECK(small_back.time == 42);
    CHECK((small_back.amps - small.amps).cwiseAbs().maxCoeff() == 0.0);

    // corrupt magic is rejected
    std::string bytes = slurp(dir / "small.qwlk");
    bytes[0] = 'X';
    std::ofstream(dir / "corrupt.qwlk", std::ios::binary) << bytes;
    CHECK_THROWS(load_state((dir / "corrupt.qwlk").string()));

    // truncated payload is rejected
    std::ofstream(dir / "short.qwlk", std::ios::binary) << bytes.substr(0, 24);
    CHECK_THROWS(load_state((dir / "short.qwlk").string()));

    CHECK_THROWS(load_state((dir / "missing.qwlk").string()));

    fs::remove_all(dir);
}

TEST_CASE("cli_marginal_file_naming") {
    const fs::path dir = fresh_dir("marg");
    ExperimentConfig c = tiny_config(dir.string());
    c.model = WalkModel::dirac(2, 0.2);
    c.sizes = {8, 8};
    c.state.kprime = {0.5, 0.3, 0};
    c.state.sigma = {0.25, 0.25, 0};
    c.snapshots = {2};
    c.dump_states = false;

    // a lone marginal keeps the bare name
    c.marginals = {{1}};
    std::ostringstream log;
    REQUIRE(run_experiment(c, log) == 0);
    CHECK(fs::exists(dir / "dist_t2.csv"));
    const auto lone = lines_of(slurp(dir / "dist_t2.csv"));
    CHECK(lone[0] == "y,p");

    // several marginals get axis-letter suffixes
    c.marginals = {{0}, {1, 0}};
    REQUIRE(run_experiment(c, log) == 0);
    CHECK(fs::exists(dir / "dist_t2_x.csv"));
    CHECK(fs::exists(dir / "dist_t2_yx.csv"));
    const auto yx = lines_of(slurp(dir / "dist_t2_yx.csv"));
    CHECK(yx[0] == "y,x,p");
    REQUIRE(yx.size() == 65);

    fs::remove_all(dir);
}
