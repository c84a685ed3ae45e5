#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qwalk/evolve.hpp"
#include "qwalk/experiment.hpp"
#include "qwalk/observe.hpp"
#include "qwalk/state.hpp"
#include "qwalk/util.hpp"
#include "qwalk/walk.hpp"

namespace py = pybind11;

namespace {

qwalk::WalkModel make_model(const std::string& family, int dimension, double mass) {
    if (family == "weyl") return qwalk::WalkModel::weyl(dimension);
    if (family == "dirac") return qwalk::WalkModel::dirac(dimension, mass);
    throw std::invalid_argument("unknown model family: " + family);
}

std::array<double, 3> to_kappa(const std::vector<double>& k) {
    std::array<double, 3> kappa{};
    for (std::size_t i = 0; i < k.size() && i < 3; ++i) kappa[i] = k[i];
    return kappa;
}

}  // namespace

PYBIND11_MODULE(_qwalk, m) {
    m.doc() = "discrete-time Weyl/Dirac quantum walks on cubic and BCC lattices";

    m.def("set_max_threads", &qwalk::set_max_threads, py::arg("n"),
          "cap the worker threads used by the evolution engines");

    m.def(
        "dispersion",
        [](const std::string& family, int dimension, double mass, const std::vector<double>& k) {
            return qwalk::dispersion(to_kappa(k), make_model(family, dimension, mass));
        },
        py::arg("family"), py::arg("dimension"), py::arg("mass"), py::arg("kappa"),
        "eigenphase omega(kappa) = arccos(n u_kappa)");

    m.def(
        "group_velocity",
        [](const std::string& family, int dimension, double mass, const std::vector<double>& k) {
            const auto v = qwalk::group_velocity(to_kappa(k), make_model(family, dimension, mass));
            return std::vector<double>(v.begin(), v.begin() + dimension);
        },
        py::arg("family"), py::arg("dimension"), py::arg("mass"), py::arg("kappa"),
        "gradient of the dispersion at kappa");

    m.def(
        "walk_unitary",
        [](const std::string& family, int dimension, double mass, const std::vector<double>& k) {
            return qwalk::walk_unitary(to_kappa(k), make_model(family, dimension, mass));
        },
        py::arg("family"), py::arg("dimension"), py::arg("mass"), py::arg("kappa"),
        "the walk unitary U(kappa) as a complex matrix");

    m.def("preset_names", &qwalk::preset_names, "names of the compiled-in experiment presets");

    m.def(
        "preset_config",
        [](const std::string& name) { return qwalk::config_to_json(qwalk::preset_config(name)).dump(2); },
        py::arg("name"), "JSON text of a compiled-in preset configuration");

    m.def(
        "run_config",
        [](const std::string& config_json, const std::string& out_dir) {
            qwalk::ExperimentConfig config =
                qwalk::config_from_json(nlohmann::json::parse(config_json));
            if (!out_dir.empty()) config.out_dir = out_dir;
            std::ostringstream log;
            const int rc = qwalk::run_experiment(config, log);
            return py::make_tuple(rc, log.str());
        },
        py::arg("config_json"), py::arg("out_dir") = std::string(),
        "run an experiment from JSON text; returns (exit_code, log)");

    m.def(
        "mean_position_series",
        [](const std::string& config_json) {
            const qwalk::ExperimentConfig config =
                qwalk::config_from_json(nlohmann::json::parse(config_json));
            const qwalk::FieldState state0 = qwalk::initial_state(config);
            const qwalk::PositionSeries s =
                qwalk::position_series(state0, config.steps, config.stride);
            const int d = config.model.dimension;
            std::vector<std::vector<double>> rows;
            for (std::size_t r = 0; r < s.times.size(); ++r) {
                std::vector<double> row{static_cast<double>(s.times[r])};
                for (int i = 0; i < d; ++i) row.push_back(s.mean[r][i]);
                rows.push_back(std::move(row));
            }
            return rows;
        },
        py::arg("config_json"),
        "spectral-engine mean position samples [t, x_1..x_d] for a config");

    m.def(
        "verify",
        [](std::uint64_t seed) {
            std::ostringstream log;
            const int rc = qwalk::run_verify(seed, false, log);
            return py::make_tuple(rc, log.str());
        },
        py::arg("seed") = 12345, "run the invariant suite; returns (exit_code, log)");
}
