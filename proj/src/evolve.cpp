#include "qwalk/evolve.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "qwalk/util.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

namespace {

using cplx = std::complex<double>;

// Per-shift table of source site indices: src[site] = index of site - shift.
std::vector<std::vector<std::int64_t>> source_tables(const GridSpec& grid,
                                                     const TransitionSet& trans) {
    const std::int64_t sites = grid.site_count();
    std::vector<std::vector<std::int64_t>> tables(trans.shifts.size());
    for (std::size_t h = 0; h < trans.shifts.size(); ++h) {
        tables[h].resize(sites);
        std::array<std::int64_t, 3> shift{};
        for (int i = 0; i < grid.dimension; ++i) shift[i] = trans.shifts[h][i];
        for (std::int64_t site = 0; site < sites; ++site) {
            auto coord = grid.site_coord(site);
            for (int i = 0; i < grid.dimension; ++i) coord[i] -= shift[i];
            tables[h][site] = grid.site_index(coord);
        }
    }
    return tables;
}

}  // namespace

FieldState step_position(const FieldState& state, std::int64_t steps) {
    if (state.domain != Domain::Position) {
        throw std::invalid_argument("step_position expects a position-domain state");
    }
    if (steps < 0) throw std::invalid_argument("step_position: negative step count");

    FieldState out = state;
    if (steps == 0) return out;

    const TransitionSet trans = transition_matrices(state.model);
    const auto tables = source_tables(state.grid, trans);
    const int s = state.model.coin_dim();
    const std::int64_t sites = state.grid.site_count();

    // Flatten the transition matrices once; the inner loop is the hot path.
    const std::size_t nshift = trans.shifts.size();
    std::vector<cplx> mats(nshift * static_cast<std::size_t>(s) * s);
    for (std::size_t h = 0; h < nshift; ++h) {
        for (int r = 0; r < s; ++r) {
            for (int c = 0; c < s; ++c) {
                mats[(h * s + static_cast<std::size_t>(r)) * s + c] = trans.matrices[h](r, c);
            }
        }
    }

    Eigen::VectorXcd next(out.amps.size());
    for (std::int64_t step = 0; step < steps; ++step) {
        const cplx* in = out.amps.data();
        cplx* dst = next.data();
        parallel_for(sites, [&](std::int64_t lo, std::int64_t hi) {
            for (std::int64_t site = lo; site < hi; ++site) {
                cplx acc[4] = {};
                for (std::size_t h = 0; h < nshift; ++h) {
                    const cplx* src = in + tables[h][site] * s;
                    const cplx* u = mats.data() + h * s * s;
                    for (int r = 0; r < s; ++r) {
                        cplx sum = 0.0;
                        for (int c = 0; c < s; ++c) sum += u[r * s + c] * src[c];
                        acc[r] += sum;
                    }
                }
                for (int r = 0; r < s; ++r) dst[site * s + r] = acc[r];
            }
        });
        out.amps.swap(next);
    }
    out.time += steps;
    return out;
}

SpectralPropagator::SpectralPropagator(const GridSpec& grid, const WalkModel& model)
    : grid_(grid), model_(model) {
    const std::int64_t slots = grid_.slot_count();
    slots_.reserve(static_cast<std::size_t>(slots));
    for (std::int64_t slot = 0; slot < slots; ++slot) {
        slots_.push_back(slot_action(grid_.wavevector(slot), model_));
    }
}

void SpectralPropagator::apply(Eigen::VectorXcd& momentum_amps, std::int64_t t) const {
    const int s = model_.coin_dim();
    const std::int64_t slots = grid_.slot_count();
    if (momentum_amps.size() != slots * s) {
        throw std::invalid_argument("SpectralPropagator: amplitude size mismatch");
    }
    cplx* amps = momentum_amps.data();
    const double tt = static_cast<double>(t);
    parallel_for(slots, [&](std::int64_t lo, std::int64_t hi) {
        cplx x[4];
        cplx mx[4];
        for (std::int64_t slot = lo; slot < hi; ++slot) {
            const SlotAction& act = slots_[static_cast<std::size_t>(slot)];
            cplx* a = amps + slot * s;
            const double c = std::cos(act.omega * tt);
            if (act.sin_omega == 0.0) {
                // M vanishes identically at these slots; U^t is the scalar
                // cos(omega t) = (+-1)^t.
                for (int r = 0; r < s; ++r) a[r] *= c;
                continue;
            }
            for (int r = 0; r < s; ++r) x[r] = a[r];
            apply_hermitian_part(act, model_, x, mx);
            const cplx w(0.0, -std::sin(act.omega * tt) / act.sin_omega);
            for (int r = 0; r < s; ++r) a[r] = c * x[r] + w * mx[r];
        }
    });
}

FieldState evolve_spectral(const FieldState& state, std::int64_t t) {
    SpectralPropagator prop(state.grid, state.model);
    FieldState work = to_momentum(state);
    prop.apply(work.amps, t);
    work.time += t;
    return state.domain == Domain::Position ? to_position(work) : work;
}

FieldState evolve_truncated(const FieldState& state, const ParticleStateSpec& spec, int order,
                            std::int64_t t) {
    if (order != kExactDispersion && (order < 1 || order > 3)) {
        throw std::invalid_argument("evolve_truncated: order must be 1..3 or kExactDispersion");
    }
    if (std::abs(spec.branch) != 1) {
        throw std::invalid_argument("evolve_truncated: branch must be +1 or -1");
    }
    const GridSpec& grid = state.grid;
    const WalkModel& model = state.model;
    const auto kp = snapped_wavevector(grid, spec.kprime);

    OmegaJet jet{};
    if (order != kExactDispersion) jet = omega_jet(kp, model, order);

    FieldState work = to_momentum(state);
    const int s = model.coin_dim();
    const int d = grid.dimension;
    const double sign = static_cast<double>(spec.branch);
    const double tt = static_cast<double>(t);
    const std::int64_t slots = grid.slot_count();
    cplx* amps = work.amps.data();

    parallel_for(slots, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t slot = lo; slot < hi; ++slot) {
            const auto kappa = grid.wavevector(slot);
            double omega = 0.0;
            if (order == kExactDispersion) {
                omega = dispersion(kappa, model);
            } else {
                // Taylor expansion in differences wrapped into (-pi, pi].
                double delta[3] = {};
                for (int i = 0; i < d; ++i) {
                    double r = std::remainder(kappa[i] - kp[i], 2.0 * M_PI);
                    if (r <= -M_PI) r += 2.0 * M_PI;
                    delta[i] = r;
                }
                omega = jet.omega;
                for (int i = 0; i < d; ++i) omega += jet.grad[i] * delta[i];
                if (order >= 2) {
                    for (int i = 0; i < d; ++i) {
                        for (int j = 0; j < d; ++j) {
                            omega += 0.5 * jet.hess(i, j) * delta[i] * delta[j];
                        }
                    }
                }
                if (order >= 3) {
                    for (int i = 0; i < d; ++i) {
                        for (int j = 0; j < d; ++j) {
                            for (int l = 0; l < d; ++l) {
                                omega += jet.third[i][j][l] * delta[i] * delta[j] * delta[l] / 6.0;
                            }
                        }
                    }
                }
            }
            const cplx phase = std::exp(cplx(0.0, -sign * omega * tt));
            for (int r = 0; r < s; ++r) amps[slot * s + r] *= phase;
        }
    });

    work.time += t;
    return state.domain == Domain::Position ? to_position(work) : work;
}

ApproximationBound approximation_bound(const FieldState& state,
                                       const std::array<double, 3>& kprime,
                                       const std::array<double, 3>& sigma, double epsilon,
                                       int order, double t) {
    if (order != 1 && order != 2) {
        throw std::invalid_argument("approximation_bound: order must be 1 or 2");
    }
    const int d = state.grid.dimension;
    const auto kp = snapped_wavevector(state.grid, kprime);
    const OmegaJet jet = omega_jet(kp, state.model, order + 1);

    // sum_{|alpha| = order+1} |omega^(alpha)(k')| / alpha!
    double deriv_sum = 0.0;
    if (order == 1) {
        for (int a = 0; a < d; ++a) {
            for (int b = a; b < d; ++b) {
                const double fact = (a == b) ? 2.0 : 1.0;
                deriv_sum += std::abs(jet.hess(a, b)) / fact;
            }
        }
    } else {
        for (int a = 0; a < d; ++a) {
            for (int b = a; b < d; ++b) {
                for (int c = b; c < d; ++c) {
                    double fact = 1.0;
                    if (a == b && b == c) {
                        fact = 6.0;
                    } else if (a == b || b == c) {
                        fact = 2.0;
                    }
                    deriv_sum += std::abs(jet.third[a][b][c]) / fact;
                }
            }
        }
    }

    const double mass = band_concentration(state, kp, sigma);
    double big_sigma = 0.0;
    for (int i = 0; i < d; ++i) big_sigma = std::max(big_sigma, sigma[i]);

    ApproximationBound result;
    result.gamma = (order + 1) * deriv_sum * mass;
    result.bound = 1.0 - epsilon - result.gamma * std::pow(big_sigma, order + 1) * t;
    result.remainder_scale = std::pow(big_sigma, order + 3) * t;
    return result;
}

}  // namespace qwalk
