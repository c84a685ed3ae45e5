#include "qwalk/state.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "qwalk/spectral.hpp"
#include "qwalk/util.hpp"

namespace qwalk {

namespace {

using cplx = std::complex<double>;

void check_compatible(const GridSpec& grid, const WalkModel& model) {
    if (grid.kind != model.grid_kind())
        throw std::invalid_argument("grid kind does not match the walk model");
    if (grid.dimension != model.dimension)
        throw std::invalid_argument("grid dimension does not match the walk model");
}

FieldState transformed(const FieldState& state, Domain target) {
    if (state.domain == target) return state;
    const int s = state.model.coin_dim();
    const std::int64_t count = state.grid.site_count();
    FieldState out = state;
    out.domain = target;
    Eigen::VectorXcd buf(count);
    for (int c = 0; c < s; ++c) {
        for (std::int64_t i = 0; i < count; ++i) buf[i] = state.amps[i * s + c];
        Eigen::VectorXcd res =
            target == Domain::Momentum ? grid_dft(state.grid, buf) : grid_idft(state.grid, buf);
        for (std::int64_t i = 0; i < count; ++i) out.amps[i * s + c] = res[i];
    }
    return out;
}

// Branch column index in the eigenvector matrix: (+) before (-), and within
// a branch p = + before p = - for the 4-component models.
int branch_column(const WalkModel& model, int branch, int parity) {
    if (model.coin_dim() == 2) return branch > 0 ? 0 : 1;
    return (branch > 0 ? 0 : 2) + (parity > 0 ? 0 : 1);
}

FieldState build_packet(const ParticleStateSpec& spec, cplx weight_plus, cplx weight_minus) {
    check_compatible(spec.grid, spec.model);
    const int d = spec.model.dimension;
    for (int i = 0; i < d; ++i)
        if (!(spec.sigma[i] > 0.0)) throw std::invalid_argument("sigma must be positive");
    if (std::abs(spec.branch) != 1 || std::abs(spec.parity) != 1)
        throw std::invalid_argument("branch labels must be +1 or -1");

    const std::array<double, 3> kp = snapped_wavevector(spec.grid, spec.kprime);
    const std::array<std::int64_t, 3> x0 = centre_site(spec.grid);
    const std::int64_t slots = spec.grid.slot_count();
    const int s = spec.model.coin_dim();

    FieldState state;
    state.grid = spec.grid;
    state.model = spec.model;
    state.domain = Domain::Momentum;
    for (int i = 0; i < 3; ++i) state.origin[i] = static_cast<double>(x0[i]);
    state.amps = Eigen::VectorXcd::Zero(slots * s);

    for (std::int64_t slot = 0; slot < slots; ++slot) {
        const std::array<double, 3> kappa = spec.grid.wavevector(slot);
        double quad = 0.0;
        bool in_6sigma = true;
        for (int i = 0; i < d; ++i) {
            const double delta = wrap_angle(kappa[i] - kp[i]);
            quad += delta * delta / (4.0 * spec.sigma[i] * spec.sigma[i]);
            in_6sigma = in_6sigma && std::abs(delta) <= 6.0 * spec.sigma[i];
        }
        const SpectrumSlot ev = eigensystem(kappa, spec.model);
        if (in_6sigma && std::sin(ev.omega) < 1e-9)
            throw DegenerateError("degenerate branch within 6 sigma of k'");
        const double g = std::exp(-quad);
        if (g == 0.0) continue;
        double xphase = 0.0;
        for (int i = 0; i < d; ++i) xphase -= kappa[i] * static_cast<double>(x0[i]);
        const cplx f = g * cplx(std::cos(xphase), std::sin(xphase));
        Eigen::VectorXcd coin = Eigen::VectorXcd::Zero(s);
        if (weight_plus != 0.0)
            coin += weight_plus * ev.vectors.col(branch_column(spec.model, +1, spec.parity));
        if (weight_minus != 0.0)
            coin += weight_minus * ev.vectors.col(branch_column(spec.model, -1, spec.parity));
        state.amps.segment(slot * s, s) = f * coin;
    }

    state.amps /= state.amps.norm();
    return to_position(state);
}

}  // namespace

FieldState to_momentum(const FieldState& state) { return transformed(state, Domain::Momentum); }

FieldState to_position(const FieldState& state) { return transformed(state, Domain::Position); }

double norm(const FieldState& state) { return state.amps.norm(); }

std::complex<double> overlap(const FieldState& a, const FieldState& b) {
    if (a.grid != b.grid || a.model.coin_dim() != b.model.coin_dim())
        throw std::invalid_argument("overlap requires states on the same grid and coin space");
    if (a.domain != b.domain) return a.amps.dot(transformed(b, a.domain).amps);
    return a.amps.dot(b.amps);
}

std::array<std::int64_t, 3> centre_site(const GridSpec& grid) {
    std::array<std::int64_t, 3> c{};
    for (int i = 0; i < grid.dimension; ++i) {
        const std::int64_t mid = grid.extent(i) / 2;
        c[i] = grid.kind == GridKind::Bcc ? 2 * (mid / 2) : mid;
    }
    return c;
}

std::array<double, 3> snapped_wavevector(const GridSpec& grid,
                                         const std::array<double, 3>& kprime) {
    return grid.wavevector(grid.nearest_slot(kprime));
}

FieldState localized_state(const GridSpec& grid, const WalkModel& model,
                           const std::array<std::int64_t, 3>& x0,
                           const Eigen::VectorXcd& zeta) {
    check_compatible(grid, model);
    const int s = model.coin_dim();
    if (zeta.size() != s) throw std::invalid_argument("coin vector size does not match model");
    if (std::abs(zeta.norm() - 1.0) > 1e-10)
        throw std::invalid_argument("coin vector must have unit norm");
    for (int i = 0; i < grid.dimension; ++i)
        if (x0[i] < 0 || x0[i] >= grid.extent(i))
            throw std::invalid_argument("site coordinate outside the grid");

    FieldState state;
    state.grid = grid;
    state.model = model;
    state.domain = Domain::Position;
    for (int i = 0; i < 3; ++i) state.origin[i] = static_cast<double>(x0[i]);
    state.amps = Eigen::VectorXcd::Zero(grid.site_count() * s);
    state.amps.segment(grid.site_index(x0) * s, s) = zeta;
    return state;
}

FieldState gaussian_particle_state(const ParticleStateSpec& spec) {
    return build_packet(spec, spec.branch > 0 ? 1.0 : 0.0, spec.branch > 0 ? 0.0 : 1.0);
}

FieldState superposition_state(const ParticleStateSpec& spec, cplx c_plus, cplx c_minus) {
    const double total = std::norm(c_plus) + std::norm(c_minus);
    if (std::abs(total - 1.0) > 1e-10)
        throw std::invalid_argument("superposition weights must satisfy |c+|^2 + |c-|^2 = 1");
    return build_packet(spec, c_plus, c_minus);
}

FieldState random_state(const GridSpec& grid, const WalkModel& model, std::uint64_t seed) {
    check_compatible(grid, model);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    FieldState state;
    state.grid = grid;
    state.model = model;
    state.domain = Domain::Position;
    const auto c = centre_site(grid);
    for (int i = 0; i < 3; ++i) state.origin[i] = static_cast<double>(c[i]);
    state.amps.resize(grid.site_count() * model.coin_dim());
    for (Eigen::Index i = 0; i < state.amps.size(); ++i)
        state.amps[i] = cplx(gauss(rng), gauss(rng));
    state.amps /= state.amps.norm();
    return state;
}

double band_concentration(const FieldState& state, const std::array<double, 3>& kprime,
                          const std::array<double, 3>& half_width) {
    const FieldState mom = to_momentum(state);
    const int s = mom.model.coin_dim();
    const int d = mom.model.dimension;
    double mass = 0.0;
    for (std::int64_t slot = 0; slot < mom.grid.slot_count(); ++slot) {
        const std::array<double, 3> kappa = mom.grid.wavevector(slot);
        bool inside = true;
        for (int i = 0; i < d; ++i)
            inside = inside && std::abs(wrap_angle(kappa[i] - kprime[i])) <= half_width[i];
        if (inside) mass += mom.amps.segment(slot * s, s).squaredNorm();
    }
    return mass;
}

BranchDecomposition branch_decompose(const FieldState& state) {
    const FieldState mom = to_momentum(state);
    const int s = mom.model.coin_dim();

    BranchDecomposition out;
    out.plus = mom;
    out.minus = mom;
    out.plus.amps.setZero();
    out.minus.amps.setZero();

    cplx ma[4];
    for (std::int64_t slot = 0; slot < mom.grid.slot_count(); ++slot) {
        const std::array<double, 3> kappa = mom.grid.wavevector(slot);
        const cplx* a = mom.amps.data() + slot * s;
        cplx* plus = out.plus.amps.data() + slot * s;
        cplx* minus = out.minus.amps.data() + slot * s;
        const SlotAction act = slot_action(kappa, mom.model);
        if (act.sin_omega >= 1e-9) {
            apply_hermitian_part(act, mom.model, a, ma);
            for (int c = 0; c < s; ++c) {
                const cplx half_m = 0.5 * ma[c] / act.sin_omega;
                plus[c] = 0.5 * a[c] + half_m;
                minus[c] = 0.5 * a[c] - half_m;
            }
        } else {
            const SpectrumSlot ev = eigensystem(kappa, mom.model);
            for (int col = 0; col < s; ++col) {
                cplx amp = 0.0;
                for (int c = 0; c < s; ++c) amp += std::conj(ev.vectors(c, col)) * a[c];
                cplx* dst = col < s / 2 ? plus : minus;
                for (int c = 0; c < s; ++c) dst[c] += amp * ev.vectors(c, col);
            }
            double slot_mass = 0.0;
            for (int c = 0; c < s; ++c) slot_mass += std::norm(a[c]);
            out.degenerate_mass += slot_mass;
        }
    }

    if (state.domain == Domain::Position) {
        out.plus = to_position(out.plus);
        out.minus = to_position(out.minus);
    }
    return out;
}

}  // namespace qwalk
