#include "qwalk/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "qwalk/util.hpp"

namespace qwalk {

namespace {

std::ofstream open_text(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: keep '\n' as-is
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

const char* kAxisNames[3] = {"x", "y", "z"};

void write_axis_block(std::ofstream& out, int dimension, const std::array<double, 3>& v) {
    for (int i = 0; i < dimension; ++i) out << ',' << format_double(v[i]);
}

struct DumpHeader {
    char magic[4];
    std::uint8_t version;
    std::uint8_t family;
    std::uint8_t dimension;
    std::uint8_t kind;
    std::uint8_t coin_dim;
    std::uint8_t domain;
    std::uint16_t pad;
};
static_assert(sizeof(DumpHeader) == 12);

}  // namespace

void write_position_series_csv(const std::string& path, const PositionSeries& series,
                               int dimension) {
    std::ofstream out = open_text(path);
    out << 't';
    for (int i = 0; i < dimension; ++i) out << ",x_mean_" << (i + 1);
    out << '\n';
    for (std::size_t r = 0; r < series.times.size(); ++r) {
        out << series.times[r];
        write_axis_block(out, dimension, series.mean[r]);
        out << '\n';
    }
}

void write_decomposition_series_csv(const std::string& path, const DecompositionSeries& series,
                                    int dimension) {
    std::ofstream out = open_text(path);
    out << 't';
    for (int i = 0; i < dimension; ++i) out << ",x_mean_" << (i + 1);
    for (int i = 0; i < dimension; ++i) out << ",xplus_" << (i + 1);
    for (int i = 0; i < dimension; ++i) out << ",xminus_" << (i + 1);
    for (int i = 0; i < dimension; ++i) out << ",xint_" << (i + 1);
    out << '\n';
    for (std::size_t r = 0; r < series.times.size(); ++r) {
        out << series.times[r];
        write_axis_block(out, dimension, series.mean[r]);
        write_axis_block(out, dimension, series.plus[r]);
        write_axis_block(out, dimension, series.minus[r]);
        write_axis_block(out, dimension, series.interference[r]);
        out << '\n';
    }
}

void write_marginal_csv(const std::string& path, const Eigen::VectorXd& values,
                        const GridSpec& grid, const std::vector<int>& axes) {
    std::vector<std::int64_t> extents;
    std::int64_t total = 1;
    for (int axis : axes) {
        if (axis < 0 || axis >= grid.dimension) {
            throw std::invalid_argument("write_marginal_csv: axis out of range");
        }
        extents.push_back(static_cast<std::int64_t>(grid.extent(axis)));
        total *= extents.back();
    }
    if (values.size() != total) {
        throw std::invalid_argument("write_marginal_csv: value count does not match axes");
    }

    std::ofstream out = open_text(path);
    for (std::size_t r = 0; r < axes.size(); ++r) out << kAxisNames[axes[r]] << ',';
    out << "p\n";
    std::vector<std::int64_t> coord(axes.size(), 0);
    for (std::int64_t idx = 0; idx < total; ++idx) {
        std::int64_t rest = idx;
        for (std::size_t r = axes.size(); r-- > 0;) {
            coord[r] = rest % extents[r];
            rest /= extents[r];
        }
        for (std::size_t r = 0; r < axes.size(); ++r) out << coord[r] << ',';
        out << format_double(values[idx]) << '\n';
    }
}

void dump_state(const std::string& path, const FieldState& state) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);

    DumpHeader h{};
    h.magic[0] = 'Q';
    h.magic[1] = 'W';
    h.magic[2] = 'L';
    h.magic[3] = 'K';
    h.version = 1;
    h.family = state.model.family == WalkFamily::Dirac ? 1 : 0;
    h.dimension = static_cast<std::uint8_t>(state.grid.dimension);
    h.kind = state.grid.kind == GridKind::Bcc ? 1 : 0;
    h.coin_dim = static_cast<std::uint8_t>(state.model.coin_dim());
    h.domain = state.domain == Domain::Momentum ? 1 : 0;
    out.write(reinterpret_cast<const char*>(&h), sizeof(h));

    const double mass = state.model.mass;
    const std::int64_t time = state.time;
    out.write(reinterpret_cast<const char*>(&mass), sizeof(mass));
    out.write(reinterpret_cast<const char*>(&time), sizeof(time));
    for (int i = 0; i < state.grid.dimension; ++i) {
        const std::uint64_t n = static_cast<std::uint64_t>(state.grid.sizes[i]);
        out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    }
    for (int i = 0; i < state.grid.dimension; ++i) {
        out.write(reinterpret_cast<const char*>(&state.origin[i]), sizeof(double));
    }
    for (Eigen::Index k = 0; k < state.amps.size(); ++k) {
        const double re = state.amps[k].real();
        const double im = state.amps[k].imag();
        out.write(reinterpret_cast<const char*>(&re), sizeof(re));
        out.write(reinterpret_cast<const char*>(&im), sizeof(im));
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

FieldState load_state(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);

    DumpHeader h{};
    in.read(reinterpret_cast<char*>(&h), sizeof(h));
    if (!in || h.magic[0] != 'Q' || h.magic[1] != 'W' || h.magic[2] != 'L' || h.magic[3] != 'K') {
        throw std::runtime_error("not a QWLK state dump: " + path);
    }
    if (h.version != 1) throw std::runtime_error("unsupported QWLK version");
    if (h.dimension < 1 || h.dimension > 3 || (h.kind == 1 && h.dimension != 3)) {
        throw std::runtime_error("corrupt QWLK header");
    }

    double mass = 0.0;
    std::int64_t time = 0;
    in.read(reinterpret_cast<char*>(&mass), sizeof(mass));
    in.read(reinterpret_cast<char*>(&time), sizeof(time));

    std::vector<std::int64_t> sizes(h.dimension);
    for (int i = 0; i < h.dimension; ++i) {
        std::uint64_t n = 0;
        in.read(reinterpret_cast<char*>(&n), sizeof(n));
        sizes[i] = static_cast<std::int64_t>(n);
    }
    std::array<double, 3> origin{};
    for (int i = 0; i < h.dimension; ++i) {
        in.read(reinterpret_cast<char*>(&origin[i]), sizeof(double));
    }
    if (!in) throw std::runtime_error("truncated QWLK dump: " + path);

    FieldState state;
    state.grid = (h.kind == 1) ? GridSpec::bcc(sizes[0], sizes[1], sizes[2])
                               : GridSpec::cubic(sizes);
    state.model = (h.family == 1) ? WalkModel::dirac(h.dimension, mass)
                                  : WalkModel::weyl(h.dimension);
    if (state.model.coin_dim() != h.coin_dim) {
        throw std::runtime_error("QWLK header coin dimension mismatch");
    }
    state.domain = (h.domain == 1) ? Domain::Momentum : Domain::Position;
    state.time = time;
    state.origin = origin;

    const std::int64_t count = state.grid.site_count() * state.model.coin_dim();
    state.amps.resize(count);
    for (std::int64_t k = 0; k < count; ++k) {
        double re = 0.0, im = 0.0;
        in.read(reinterpret_cast<char*>(&re), sizeof(re));
        in.read(reinterpret_cast<char*>(&im), sizeof(im));
        state.amps[k] = std::complex<double>(re, im);
    }
    if (!in) throw std::runtime_error("truncated QWLK dump: " + path);
    return state;
}

}  // namespace qwalk
