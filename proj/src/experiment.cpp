#include "qwalk/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <stdexcept>

#include "qwalk/evolve.hpp"
#include "qwalk/io.hpp"
#include "qwalk/observe.hpp"
#include "qwalk/spectral.hpp"
#include "qwalk/util.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

namespace {

using cplx = std::complex<double>;
using nlohmann::json;

json complex_to_json(const cplx& c) { return json::array({c.real(), c.imag()}); }

cplx complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) {
        throw std::invalid_argument("complex values must be [re, im] pairs");
    }
    return cplx(j[0].get<double>(), j[1].get<double>());
}

std::string family_name(WalkFamily f) { return f == WalkFamily::Dirac ? "dirac" : "weyl"; }

WalkFamily family_from_name(const std::string& s) {
    if (s == "dirac") return WalkFamily::Dirac;
    if (s == "weyl") return WalkFamily::Weyl;
    throw std::invalid_argument("unknown model family: " + s);
}

GridSpec grid_from_config(const ExperimentConfig& config) {
    const int d = config.model.dimension;
    if (static_cast<int>(config.sizes.size()) != d) {
        throw std::invalid_argument("grid size count does not match the model dimension");
    }
    for (std::int64_t n : config.sizes) {
        if (n < 2) throw std::invalid_argument("grid sizes must be at least 2");
    }
    if (config.model.grid_kind() == GridKind::Bcc) {
        return GridSpec::bcc(config.sizes[0], config.sizes[1], config.sizes[2]);
    }
    return GridSpec::cubic(config.sizes);
}

ParticleStateSpec packet_spec(const ExperimentConfig& config) {
    ParticleStateSpec spec;
    spec.model = config.model;
    spec.grid = grid_from_config(config);
    spec.kprime = config.state.kprime;
    spec.sigma = config.state.sigma;
    spec.branch = config.state.branch;
    spec.parity = config.state.parity;
    return spec;
}

// Engine selector. Truncated orders carry the Taylor degree.
struct Engine {
    enum Kind { Position, Spectral, Truncated } kind = Spectral;
    int order = 0;
};

Engine parse_engine(const std::string& name) {
    if (name == "position") return {Engine::Position, 0};
    if (name == "spectral") return {Engine::Spectral, 0};
    if (name == "truncated-1") return {Engine::Truncated, 1};
    if (name == "truncated-2") return {Engine::Truncated, 2};
    if (name == "truncated-3") return {Engine::Truncated, 3};
    throw std::invalid_argument("unknown engine: " + name);
}

bool has_observable(const ExperimentConfig& config, const std::string& name) {
    for (const auto& o : config.observables) {
        if (o == name) return true;
    }
    return false;
}

std::string marginal_file_name(std::int64_t t, const std::vector<int>& axes, bool lone) {
    std::string name = "dist_t" + std::to_string(t);
    if (!lone) {
        name += '_';
        for (int axis : axes) name += "xyz"[axis];
    }
    return name + ".csv";
}

// Brute-force discrete Fourier transform straight from the plane-wave
// definition, used as the oracle for the fast path.
Eigen::VectorXcd brute_force_dft(const GridSpec& grid, const Eigen::VectorXcd& f) {
    const std::int64_t n = grid.site_count();
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    Eigen::VectorXcd out(n);
    for (std::int64_t slot = 0; slot < n; ++slot) {
        const auto kappa = grid.wavevector(slot);
        cplx acc = 0.0;
        for (std::int64_t site = 0; site < n; ++site) {
            const auto x = grid.site_coord(site);
            double phase = 0.0;
            for (int i = 0; i < grid.dimension; ++i) phase += kappa[i] * x[i];
            acc += f[site] * std::exp(cplx(0.0, -phase));
        }
        out[slot] = scale * acc;
    }
    return out;
}

struct CheckReport {
    bool all_pass = true;

    void check(std::ostream& log, const std::string& name, double residual, double tol) {
        const bool ok = residual < tol;
        all_pass = all_pass && ok;
        log << (ok ? "PASS" : "FAIL") << "  " << name << "  residual=" << format_double(residual)
            << "  tol=" << format_double(tol) << '\n';
    }
};

std::array<double, 3> random_kappa(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-M_PI, M_PI);
    return {dist(rng), dist(rng), dist(rng)};
}

std::vector<WalkModel> verify_models() {
    return {WalkModel::weyl(1),        WalkModel::weyl(2),        WalkModel::weyl(3),
            WalkModel::dirac(1, 0.15), WalkModel::dirac(1, 0.5),  WalkModel::dirac(2, 0.2),
            WalkModel::dirac(3, 0.02), WalkModel::dirac(3, 0.3)};
}

}  // namespace

json config_to_json(const ExperimentConfig& config) {
    json j;
    j["model"] = {{"family", family_name(config.model.family)},
                  {"dimension", config.model.dimension},
                  {"mass", config.model.mass}};
    j["grid"] = config.sizes;

    json s;
    s["type"] = config.state.type;
    const int d = config.model.dimension;
    if (config.state.type == "gaussian" || config.state.type == "superposition") {
        s["kprime"] = std::vector<double>(config.state.kprime.begin(),
                                          config.state.kprime.begin() + d);
        s["sigma"] =
            std::vector<double>(config.state.sigma.begin(), config.state.sigma.begin() + d);
        s["parity"] = config.state.parity;
        if (config.state.type == "gaussian") {
            s["branch"] = config.state.branch;
        } else {
            s["c_plus"] = complex_to_json(config.state.c_plus);
            s["c_minus"] = complex_to_json(config.state.c_minus);
        }
    } else if (config.state.type == "localized") {
        if (config.state.x0_set) {
            s["x0"] = std::vector<std::int64_t>(config.state.x0.begin(),
                                                config.state.x0.begin() + d);
        }
        if (!config.state.zeta.empty()) {
            json z = json::array();
            for (const auto& c : config.state.zeta) z.push_back(complex_to_json(c));
            s["zeta"] = z;
        }
    }
    j["state"] = s;

    j["engine"] = config.engine;
    j["steps"] = config.steps;
    j["stride"] = config.stride;
    j["observables"] = config.observables;
    j["snapshots"] = config.snapshots;
    j["marginals"] = config.marginals;
    j["dump_states"] = config.dump_states;
    j["out_dir"] = config.out_dir;
    j["seed"] = config.seed;
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig config;
    const json& m = j.at("model");
    config.model = (family_from_name(m.at("family").get<std::string>()) == WalkFamily::Dirac)
                       ? WalkModel::dirac(m.at("dimension").get<int>(), m.at("mass").get<double>())
                       : WalkModel::weyl(m.at("dimension").get<int>());
    config.sizes = j.at("grid").get<std::vector<std::int64_t>>();

    const json& s = j.at("state");
    config.state.type = s.at("type").get<std::string>();
    if (s.contains("kprime")) {
        const auto v = s["kprime"].get<std::vector<double>>();
        for (std::size_t i = 0; i < v.size() && i < 3; ++i) config.state.kprime[i] = v[i];
    }
    if (s.contains("sigma")) {
        const auto v = s["sigma"].get<std::vector<double>>();
        for (std::size_t i = 0; i < v.size() && i < 3; ++i) config.state.sigma[i] = v[i];
    }
    if (s.contains("branch")) config.state.branch = s["branch"].get<int>();
    if (s.contains("parity")) config.state.parity = s["parity"].get<int>();
    if (s.contains("c_plus")) config.state.c_plus = complex_from_json(s["c_plus"]);
    if (s.contains("c_minus")) config.state.c_minus = complex_from_json(s["c_minus"]);
    if (s.contains("x0")) {
        const auto v = s["x0"].get<std::vector<std::int64_t>>();
        for (std::size_t i = 0; i < v.size() && i < 3; ++i) config.state.x0[i] = v[i];
        config.state.x0_set = true;
    }
    if (s.contains("zeta")) {
        for (const auto& e : s["zeta"]) config.state.zeta.push_back(complex_from_json(e));
    }

    if (j.contains("engine")) config.engine = j["engine"].get<std::string>();
    if (j.contains("steps")) config.steps = j["steps"].get<std::int64_t>();
    if (j.contains("stride")) config.stride = j["stride"].get<std::int64_t>();
    if (j.contains("observables")) {
        config.observables = j["observables"].get<std::vector<std::string>>();
    }
    if (j.contains("snapshots")) {
        config.snapshots = j["snapshots"].get<std::vector<std::int64_t>>();
    }
    if (j.contains("marginals")) {
        config.marginals = j["marginals"].get<std::vector<std::vector<int>>>();
    }
    if (j.contains("dump_states")) config.dump_states = j["dump_states"].get<bool>();
    if (j.contains("out_dir")) config.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
    return config;
}

std::vector<std::string> preset_names() { return {"fig2", "fig3", "fig4", "fig5", "fig6"}; }

std::string preset_summary(const std::string& name) {
    if (name == "fig2") {
        return "3D Dirac wave packet, transport and spreading (m=0.02, BCC 64^3, T=150)";
    }
    if (name == "fig3") {
        return "localized-state light cone, axis marginals (m=0.03, BCC 32^3, T=28)";
    }
    if (name == "fig4") return "localized-state xy marginal at t=28 (m=0.03, BCC 32^3)";
    if (name == "fig5") {
        return "1D Zitterbewegung with mean-position decomposition (m=0.15, N=2048, T=150)";
    }
    if (name == "fig6") {
        return "3D Zitterbewegung of a branch superposition (m=0.3, BCC 64^3, T=200)";
    }
    throw std::invalid_argument("unknown preset: " + name);
}

ExperimentConfig preset_config(const std::string& name) {
    ExperimentConfig c;
    if (name == "fig2") {
        c.model = WalkModel::dirac(3, 0.02);
        c.sizes = {64, 64, 64};
        c.state.type = "gaussian";
        c.state.kprime = {0.0, 0.01, 0.0};
        c.state.sigma = {1.0 / 32, 1.0 / 32, 1.0 / 32};
        c.state.branch = +1;
        c.state.parity = +1;
        c.engine = "spectral";
        c.steps = 150;
        c.stride = 5;
        c.observables = {"mean"};
        c.snapshots = {0, 50, 100, 150};
        c.marginals = {{2}};
    } else if (name == "fig3" || name == "fig4") {
        c.model = WalkModel::dirac(3, 0.03);
        c.sizes = {32, 32, 32};
        c.state.type = "localized";
        c.engine = "position";
        c.steps = 28;
        c.stride = 1;
        c.observables = {"mean"};
        if (name == "fig3") {
            c.snapshots = {0, 8, 16, 28};
            c.marginals = {{0}, {1}, {2}};
        } else {
            c.snapshots = {28};
            c.marginals = {{0, 1}};
        }
    } else if (name == "fig5") {
        c.model = WalkModel::dirac(1, 0.15);
        c.sizes = {2048};
        c.state.type = "superposition";
        c.state.kprime = {0.01 * M_PI, 0.0, 0.0};
        c.state.sigma = {1.0 / 40, 0.0, 0.0};
        c.state.parity = +1;
        c.state.c_plus = cplx(1.0 / std::sqrt(2.0), 0.0);
        c.state.c_minus = cplx(1.0 / std::sqrt(2.0), 0.0);
        c.engine = "spectral";
        c.steps = 150;
        c.stride = 1;
        c.observables = {"mean", "decomposition"};
    } else if (name == "fig6") {
        c.model = WalkModel::dirac(3, 0.3);
        c.sizes = {64, 64, 64};
        c.state.type = "superposition";
        c.state.kprime = {0.0, 0.01 * M_PI, 0.0};
        c.state.sigma = {1.0 / 32, 1.0 / 32, 1.0 / 32};
        c.state.parity = +1;
        c.state.c_plus = cplx(1.0 / std::sqrt(2.0), 0.0);
        c.state.c_minus = cplx(1.0 / std::sqrt(2.0), 0.0);
        c.engine = "spectral";
        c.steps = 200;
        c.stride = 1;
        c.observables = {"mean", "decomposition"};
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }
    return c;
}

FieldState initial_state(const ExperimentConfig& config) {
    const GridSpec grid = grid_from_config(config);
    const std::string& type = config.state.type;
    if (type == "localized") {
        const auto x0 = config.state.x0_set ? config.state.x0 : centre_site(grid);
        Eigen::VectorXcd zeta;
        if (config.state.zeta.empty()) {
            zeta = Eigen::VectorXcd::Zero(config.model.coin_dim());
            zeta[0] = 1.0;
        } else {
            zeta.resize(static_cast<Eigen::Index>(config.state.zeta.size()));
            for (std::size_t i = 0; i < config.state.zeta.size(); ++i) {
                zeta[static_cast<Eigen::Index>(i)] = config.state.zeta[i];
            }
        }
        return localized_state(grid, config.model, x0, zeta);
    }
    if (type == "gaussian") return gaussian_particle_state(packet_spec(config));
    if (type == "superposition") {
        return superposition_state(packet_spec(config), config.state.c_plus,
                                   config.state.c_minus);
    }
    if (type == "random") return random_state(grid, config.model, config.seed);
    throw std::invalid_argument("unknown state type: " + type);
}

int run_experiment(const ExperimentConfig& config, std::ostream& log) {
    const auto t_begin = std::chrono::steady_clock::now();
    const Engine engine = parse_engine(config.engine);
    if (config.steps < 0) throw std::invalid_argument("steps must be non-negative");
    if (config.stride < 1) throw std::invalid_argument("stride must be positive");

    std::filesystem::create_directories(config.out_dir);
    const auto out_path = [&](const std::string& name) {
        return (std::filesystem::path(config.out_dir) / name).string();
    };

    const FieldState state0 = initial_state(config);
    const bool want_mean = has_observable(config, "mean");
    const bool want_decomposition = has_observable(config, "decomposition");

    if (engine.kind == Engine::Truncated && config.state.type != "gaussian") {
        throw std::invalid_argument("the truncated engine needs a single-branch gaussian state");
    }
    if (want_decomposition && engine.kind != Engine::Spectral) {
        throw std::invalid_argument("decomposition series requires the spectral engine");
    }

    bool wrap_warning = false;
    double degenerate_mass = 0.0;
    if (want_decomposition) {
        const DecompositionSeries series =
            decomposition_series(state0, config.steps, config.stride);
        write_decomposition_series_csv(out_path("series.csv"), series, config.model.dimension);
        for (auto w : series.wrap_warnings) wrap_warning = wrap_warning || (w != 0);
        degenerate_mass = series.degenerate_mass;
        log << "series.csv: " << series.times.size() << " samples (with decomposition)\n";
    } else if (want_mean) {
        PositionSeries series;
        if (engine.kind == Engine::Spectral) {
            series = position_series(state0, config.steps, config.stride);
        } else if (engine.kind == Engine::Position) {
            FieldState cur = state0;
            for (std::int64_t t = 0; t <= config.steps; t += config.stride) {
                if (t > 0) cur = step_position(cur, config.stride);
                const MeanPosition m = mean_position(cur);
                series.times.push_back(cur.time);
                series.mean.push_back(m.value);
                series.spread.push_back(position_std(cur));
                series.wrap_warnings.push_back(m.wrap_warning ? 1 : 0);
            }
        } else {
            const ParticleStateSpec spec = packet_spec(config);
            for (std::int64_t t = 0; t <= config.steps; t += config.stride) {
                const FieldState st = evolve_truncated(state0, spec, engine.order, t);
                const MeanPosition m = mean_position(st);
                series.times.push_back(state0.time + t);
                series.mean.push_back(m.value);
                series.spread.push_back(position_std(st));
                series.wrap_warnings.push_back(m.wrap_warning ? 1 : 0);
            }
        }
        write_position_series_csv(out_path("series.csv"), series, config.model.dimension);
        for (auto w : series.wrap_warnings) wrap_warning = wrap_warning || (w != 0);
        log << "series.csv: " << series.times.size() << " samples\n";
    }

    // Snapshots: marginal CSVs and optional binary dumps.
    std::vector<std::int64_t> snaps = config.snapshots;
    std::sort(snaps.begin(), snaps.end());
    snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());
    if (!snaps.empty() && snaps.front() < 0) {
        throw std::invalid_argument("snapshot times must be non-negative");
    }
    FieldState cursor = state0;  // position-engine snapshots advance incrementally
    for (std::int64_t t : snaps) {
        FieldState snap;
        if (engine.kind == Engine::Position) {
            cursor = step_position(cursor, t - (cursor.time - state0.time));
            snap = cursor;
        } else if (engine.kind == Engine::Spectral) {
            snap = evolve_spectral(state0, t);
        } else {
            snap = evolve_truncated(state0, packet_spec(config), engine.order, t);
        }
        const Eigen::VectorXd dist = probability_distribution(snap);
        for (const auto& axes : config.marginals) {
            const Eigen::VectorXd m = marginal(dist, snap.grid, axes);
            const std::string name = marginal_file_name(t, axes, config.marginals.size() == 1);
            write_marginal_csv(out_path(name), m, snap.grid, axes);
        }
        if (config.dump_states) {
            dump_state(out_path("state_t" + std::to_string(t) + ".qwlk"), snap);
        }
    }
    if (!snaps.empty()) {
        log << "snapshots: " << snaps.size() << " at t in {";
        for (std::size_t i = 0; i < snaps.size(); ++i) log << (i ? "," : "") << snaps[i];
        log << "}\n";
    }

    // Final state norm, from the configured engine.
    FieldState final_state;
    if (engine.kind == Engine::Position) {
        const std::int64_t remaining = config.steps - (cursor.time - state0.time);
        final_state = remaining >= 0 ? step_position(cursor, remaining)
                                     : step_position(state0, config.steps);
    } else if (engine.kind == Engine::Spectral) {
        final_state = evolve_spectral(state0, config.steps);
    } else {
        final_state = evolve_truncated(state0, packet_spec(config), engine.order, config.steps);
    }
    const double final_norm = norm(final_state);
    const bool degraded = std::abs(final_norm - 1.0) >= 1e-9;

    const auto t_end = std::chrono::steady_clock::now();
    const double elapsed = std::chrono::duration<double>(t_end - t_begin).count();

    json report;
    report["config"] = config_to_json(config);
    report["final_norm"] = final_norm;
    report["degraded"] = degraded;
    report["wrap_warning"] = wrap_warning;
    report["degenerate_mass"] = degenerate_mass;
    report["elapsed_seconds"] = elapsed;
    std::ofstream rj(out_path("run.json"), std::ios::binary);
    if (!rj) throw std::runtime_error("cannot open for writing: " + out_path("run.json"));
    rj << report.dump(2) << '\n';

    log << "final norm " << format_double(final_norm) << (degraded ? " (degraded)" : "") << ", "
        << format_double(elapsed) << " s\n";
    return degraded ? 1 : 0;
}

int run_verify(std::uint64_t seed, bool corrupt_transitions, std::ostream& log) {
    std::mt19937_64 rng(seed);
    CheckReport report;

    // Unitarity and eigenphases at random wavevectors.
    for (const WalkModel& model : verify_models()) {
        double worst_unitary = 0.0;
        double worst_phase = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const auto kappa = random_kappa(rng);
            const Eigen::MatrixXcd u = walk_unitary(kappa, model);
            const Eigen::Index s = u.rows();
            worst_unitary = std::max(
                worst_unitary,
                (u.adjoint() * u - Eigen::MatrixXcd::Identity(s, s)).cwiseAbs().maxCoeff());
            const SpectrumSlot ev = eigensystem(kappa, model);
            for (Eigen::Index r = 0; r < s; ++r) {
                const double sign = (r < s / 2) ? 1.0 : -1.0;
                const cplx lambda = std::exp(cplx(0.0, -sign * ev.omega));
                worst_phase = std::max(
                    worst_phase,
                    (u * ev.vectors.col(r) - lambda * ev.vectors.col(r)).cwiseAbs().maxCoeff());
            }
        }
        report.check(log, "unitarity " + model.name(), worst_unitary, 1e-12);
        report.check(log, "eigenphases " + model.name(), worst_phase, 1e-10);
    }

    // Transition matrices: shift-orthogonality conditions and reconstruction.
    for (const WalkModel& model : verify_models()) {
        TransitionSet set = transition_matrices(model);
        if (corrupt_transitions) set.matrices[0](0, 0) += 0.001;
        report.check(log, "shift unitarity " + model.name(), shift_unitarity_residual(set),
                     1e-12);
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const auto kappa = random_kappa(rng);
            worst = std::max(worst, (reconstruct_unitary(set, kappa) - walk_unitary(kappa, model))
                                        .cwiseAbs()
                                        .maxCoeff());
        }
        report.check(log, "reconstruction " + model.name(), worst, 1e-12);
    }

    // Engine equivalence on small grids.
    {
        struct Case {
            WalkModel model;
            GridSpec grid;
            std::int64_t t;
        };
        const std::vector<Case> cases = {
            {WalkModel::dirac(1, 0.3), GridSpec::cubic({32}), 10},
            {WalkModel::weyl(2), GridSpec::cubic({16, 16}), 6},
            {WalkModel::dirac(3, 0.2), GridSpec::bcc(4, 4, 4), 4},
        };
        for (const auto& c : cases) {
            const FieldState psi = random_state(c.grid, c.model, seed ^ 0x5eedf00du);
            const FieldState a = step_position(psi, c.t);
            const FieldState b = evolve_spectral(psi, c.t);
            const double diff = (a.amps - b.amps).cwiseAbs().maxCoeff();
            report.check(log, "engine equivalence " + c.model.name(), diff, 1e-10);
        }
    }

    // Transform round trips, Parseval, and the brute-force BCC oracle.
    {
        const std::vector<GridSpec> grids = {GridSpec::cubic({8}), GridSpec::cubic({8, 8}),
                                             GridSpec::bcc(4, 4, 4)};
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (const auto& grid : grids) {
            Eigen::VectorXcd f(grid.site_count());
            for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = cplx(gauss(rng), gauss(rng));
            const Eigen::VectorXcd fhat = grid_dft(grid, f);
            const Eigen::VectorXcd back = grid_idft(grid, fhat);
            const double rt = (back - f).cwiseAbs().maxCoeff();
            const double parseval = std::abs(fhat.squaredNorm() - f.squaredNorm());
            const std::string tag = (grid.kind == GridKind::Bcc ? "bcc" : "cubic") +
                                    std::string(" d=") + std::to_string(grid.dimension);
            report.check(log, "transform round trip " + tag, rt, 1e-12);
            report.check(log, "parseval " + tag, parseval, 1e-12);
        }
        const GridSpec tiny = GridSpec::bcc(2, 2, 2);
        Eigen::VectorXcd f(tiny.site_count());
        for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = cplx(gauss(rng), gauss(rng));
        const double oracle = (grid_dft(tiny, f) - brute_force_dft(tiny, f)).cwiseAbs().maxCoeff();
        report.check(log, "bcc transform vs brute force", oracle, 1e-12);
    }

    // Operator identities for the Dirac models.
    for (const WalkModel& model : {WalkModel::dirac(1, 0.15), WalkModel::dirac(3, 0.3)}) {
        double worst_anti = 0.0, worst_f = 0.0, worst_elem = 0.0;
        int done = 0;
        while (done < 20) {
            const auto kappa = random_kappa(rng);
            KinematicOperators ops;
            SpectrumSlot ev;
            try {
                ops = kinematic_operators(kappa, model, 0.0);
                ev = eigensystem(kappa, model);
            } catch (const DegenerateError&) {
                continue;
            }
            ++done;
            const Eigen::MatrixXcd h = interpolating_hamiltonian(kappa, model);
            for (int j = 0; j < model.dimension; ++j) {
                worst_anti = std::max(
                    worst_anti, (h * ops.A[j] + ops.A[j] * h).cwiseAbs().maxCoeff());
                const Eigen::Matrix3d& fj = ops.f[j];
                const BlochData b = weyl_bloch(model.dimension, kappa);
                std::array<double, 3> e = b.nt;
                if (model.coin_dim() == 2) {
                    e = {model.n() * b.nt[0] - model.mass, model.n() * b.nt[1],
                         model.n() * b.nt[2]};
                }
                worst_f = std::max(worst_f, std::abs(e[2] * fj(0, 1) - e[1] * fj(0, 2) +
                                                     e[0] * fj(1, 2)));
                const Eigen::Index s = ev.vectors.cols();
                for (Eigen::Index a = 0; a < s; ++a) {
                    for (Eigen::Index c = 0; c < s; ++c) {
                        const bool same = (a < s / 2) == (c < s / 2);
                        const cplx vel = ev.vectors.col(a).dot(ops.Vhat[j] * ev.vectors.col(c));
                        const cplx zx = ev.vectors.col(a).dot(ops.Zx[j] * ev.vectors.col(c));
                        if (!same) worst_elem = std::max(worst_elem, std::abs(vel));
                        if (same && a == c) worst_elem = std::max(worst_elem, std::abs(zx));
                    }
                }
            }
        }
        report.check(log, "anticommutation " + model.name(), worst_anti, 1e-12);
        report.check(log, "curvature identity " + model.name(), worst_f, 1e-12);
        report.check(log, "branch matrix elements " + model.name(), worst_elem, 1e-10);
    }

    log << (report.all_pass ? "verify: all checks passed\n" : "verify: FAILURES above\n");
    return report.all_pass ? 0 : 1;
}

void write_dispersion_csv(const std::string& path, const WalkModel& model, int resolution) {
    if (resolution < 1) throw std::invalid_argument("dispersion resolution must be positive");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);

    const int d = model.dimension;
    out << "k1";
    for (int i = 1; i < d; ++i) out << ",k" << (i + 1);
    out << ",omega,v1";
    for (int i = 1; i < d; ++i) out << ",v" << (i + 1);
    out << ",u\n";

    std::int64_t rows = 1;
    for (int i = 0; i < d; ++i) rows *= resolution;
    for (std::int64_t row = 0; row < rows; ++row) {
        std::array<double, 3> kappa{};
        std::int64_t rest = row;
        for (int i = d - 1; i >= 0; --i) {
            kappa[i] = -M_PI + 2.0 * M_PI * static_cast<double>(rest % resolution) /
                                   static_cast<double>(resolution);
            rest /= resolution;
        }
        const double omega = dispersion(kappa, model);
        std::array<double, 3> v{};
        try {
            v = group_velocity(kappa, model);
        } catch (const DegenerateError&) {
            v = {0.0, 0.0, 0.0};
        }
        for (int i = 0; i < d; ++i) out << (i ? "," : "") << format_double(kappa[i]);
        out << ',' << format_double(omega);
        for (int i = 0; i < d; ++i) out << ',' << format_double(v[i]);
        out << ',' << format_double(weyl_bloch(d, kappa).u) << '\n';
    }
}

}  // namespace qwalk
