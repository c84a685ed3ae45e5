#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "qwalk/state.hpp"

// Experiment configuration, compiled-in presets reproducing the reference
// figures, and the run/verify/dispersion entry points behind the CLI.

namespace qwalk {

struct StateConfig {
    std::string type = "gaussian";  // localized | gaussian | superposition | random
    std::array<double, 3> kprime{};
    std::array<double, 3> sigma{};
    int branch = +1;
    int parity = +1;
    std::complex<double> c_plus{1.0, 0.0};
    std::complex<double> c_minus{0.0, 0.0};
    bool x0_set = false;  // when false, localized states sit at the grid centre
    std::array<std::int64_t, 3> x0{};
    std::vector<std::complex<double>> zeta;  // empty: (1, 0, ...)
};

struct ExperimentConfig {
    WalkModel model = WalkModel::dirac(1, 0.15);
    std::vector<std::int64_t> sizes{64};
    StateConfig state;
    std::string engine = "spectral";  // position | spectral | truncated-1..3
    std::int64_t steps = 0;
    std::int64_t stride = 1;
    std::vector<std::string> observables{"mean"};  // mean | decomposition
    std::vector<std::int64_t> snapshots;
    std::vector<std::vector<int>> marginals;
    bool dump_states = false;
    std::string out_dir = ".";
    std::uint64_t seed = 12345;
};

// Lossless JSON round trip (config_from_json(config_to_json(c)) == c).
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

std::vector<std::string> preset_names();
std::string preset_summary(const std::string& name);
ExperimentConfig preset_config(const std::string& name);

// Builds the initial state described by the config.
FieldState initial_state(const ExperimentConfig& config);

// Runs the experiment, writing series.csv, optional dist_t<k>*.csv marginals,
// optional state_t<k>.qwlk dumps and run.json into out_dir. Returns 0 on
// success. Progress and diagnostics go to log.
int run_experiment(const ExperimentConfig& config, std::ostream& log);

// Invariant suite: unitarity and eigenphases, transition-matrix conditions,
// engine equivalence, transform round trips, operator identities. Prints one
// line per check with the measured residual; returns 0 only if all pass.
// corrupt_transitions perturbs one transition matrix entry first, which must
// make the shift-unitarity check fail (test hook).
int run_verify(std::uint64_t seed, bool corrupt_transitions, std::ostream& log);

// Samples the zone on a regular grid of resolution^d points, uniform in
// [-pi, pi)^d, and writes one row per point: kappa, omega, group velocity
// (zeros at degenerate points), and the massless scalar u.
void write_dispersion_csv(const std::string& path, const WalkModel& model, int resolution);

}  // namespace qwalk
