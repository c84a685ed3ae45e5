#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qwalk/experiment.hpp"
#include "qwalk/util.hpp"

namespace {

// Output root precedence: --out flag, then QWALK_OUT_DIR, then the config.
std::string resolve_out_dir(const std::string& flag_value, const std::string& config_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("QWALK_OUT_DIR"); env != nullptr && env[0] != '\0') {
        return env;
    }
    return config_value;
}

qwalk::ExperimentConfig load_config(const std::string& config_path, const std::string& preset) {
    if (config_path.empty() == preset.empty()) {
        throw std::invalid_argument("pass exactly one of --config and --preset");
    }
    if (!preset.empty()) return qwalk::preset_config(preset);
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config: " + config_path);
    nlohmann::json j;
    in >> j;
    return qwalk::config_from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete-time Weyl/Dirac quantum walk simulator"};
    app.require_subcommand(1);

    std::string config_path, preset, out_dir;
    int threads = 1;
    std::int64_t steps = -1, stride = -1;

    CLI::App* run = app.add_subcommand("run", "run an experiment from a config or preset");
    run->add_option("--config", config_path, "JSON config file");
    run->add_option("--preset", preset, "compiled-in preset name");
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--threads", threads, "worker thread cap");
    run->add_option("--steps", steps, "override total steps");
    run->add_option("--stride", stride, "override sampling stride");

    bool corrupt = false;
    std::uint64_t verify_seed = 12345;
    CLI::App* verify = app.add_subcommand("verify", "run the invariant suite");
    verify->add_option("--seed", verify_seed, "random seed for test states");
    verify->add_option("--threads", threads, "worker thread cap");
    verify->add_flag("--corrupt", corrupt,
                     "perturb a transition matrix first (must fail; test hook)");

    std::string family = "dirac";
    int dimension = 1;
    double mass = 0.0;
    int resolution = 64;
    CLI::App* dispersion = app.add_subcommand("dispersion", "dump dispersion data to CSV");
    dispersion->add_option("--family", family, "weyl or dirac");
    dispersion->add_option("--dimension", dimension, "lattice dimension (1-3)")
        ->check(CLI::Range(1, 3));
    dispersion->add_option("--mass", mass, "mass parameter in [0, 1]");
    dispersion->add_option("--resolution", resolution, "points per axis");
    dispersion->add_option("--out", out_dir, "output directory");

    CLI::App* presets = app.add_subcommand("presets", "list compiled-in presets");

    CLI11_PARSE(app, argc, argv);

    try {
        qwalk::set_max_threads(threads);
        if (app.got_subcommand(run)) {
            qwalk::ExperimentConfig config = load_config(config_path, preset);
            config.out_dir = resolve_out_dir(out_dir, config.out_dir);
            if (steps >= 0) config.steps = steps;
            if (stride >= 1) config.stride = stride;
            return qwalk::run_experiment(config, std::cout);
        }
        if (app.got_subcommand(verify)) {
            return qwalk::run_verify(verify_seed, corrupt, std::cout);
        }
        if (app.got_subcommand(dispersion)) {
            if (family != "weyl" && family != "dirac") {
                throw std::invalid_argument("unknown model family: " + family);
            }
            const qwalk::WalkModel model = (family == "weyl")
                                               ? qwalk::WalkModel::weyl(dimension)
                                               : qwalk::WalkModel::dirac(dimension, mass);
            const std::string dir = resolve_out_dir(out_dir, ".");
            std::filesystem::create_directories(dir);
            const std::string path = (std::filesystem::path(dir) / "dispersion.csv").string();
            qwalk::write_dispersion_csv(path, model, resolution);
            std::cout << path << '\n';
            return 0;
        }
        if (app.got_subcommand(presets)) {
            for (const std::string& name : qwalk::preset_names()) {
                std::cout << name << "  " << qwalk::preset_summary(name) << '\n';
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
