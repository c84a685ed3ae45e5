#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>

#include "qwalk/lattice.hpp"
#include "qwalk/walk.hpp"

// Walker states and the standard state families.
//
// Amplitudes are stored entry-major with the coin index fastest: component c
// of site (or slot) i lives at amps[i * coin_dim + c], sites and slots in the
// orders fixed by GridSpec. The origin field anchors unwrapped coordinates
// for mean-position reporting on the torus; it is set by the constructors to
// the packet centre and carried through evolution unchanged.

namespace qwalk {

enum class Domain { Position, Momentum };

struct FieldState {
    GridSpec grid;
    WalkModel model;
    Domain domain = Domain::Position;
    std::int64_t time = 0;
    std::array<double, 3> origin{};
    Eigen::VectorXcd amps;
};

FieldState to_momentum(const FieldState& state);
FieldState to_position(const FieldState& state);

double norm(const FieldState& state);
std::complex<double> overlap(const FieldState& a, const FieldState& b);

// Grid midpoint, rounded to an even site on BCC grids; the default packet
// centre, leaving maximal room before the wrap seam.
std::array<std::int64_t, 3> centre_site(const GridSpec& grid);

// Gaussian wave packet on one eigenbranch. kprime is snapped to the nearest
// slot; sigma is the wavevector-space standard deviation of |g|^2, so the
// envelope is g ~ exp(-sum (kappa_i - k'_i)^2 / (4 sigma_i^2)) with wrapped
// differences, normalized on the discrete grid.
struct ParticleStateSpec {
    WalkModel model;
    GridSpec grid;
    std::array<double, 3> kprime{};
    std::array<double, 3> sigma{};
    int branch = +1;  // s = +1 or -1
    int parity = +1;  // p label for the 4-component models
};

std::array<double, 3> snapped_wavevector(const GridSpec& grid,
                                         const std::array<double, 3>& kprime);

FieldState localized_state(const GridSpec& grid, const WalkModel& model,
                           const std::array<std::int64_t, 3>& x0,
                           const Eigen::VectorXcd& zeta);

FieldState gaussian_particle_state(const ParticleStateSpec& spec);

// Same envelope on the (+,p) and (-,p) branches with the given weights,
// |c_plus|^2 + |c_minus|^2 = 1. The branch field of the spec is ignored.
FieldState superposition_state(const ParticleStateSpec& spec, std::complex<double> c_plus,
                               std::complex<double> c_minus);

FieldState random_state(const GridSpec& grid, const WalkModel& model, std::uint64_t seed);

// Probability mass in the wrapped box |kappa_i - k'_i| <= half_width_i.
double band_concentration(const FieldState& state, const std::array<double, 3>& kprime,
                          const std::array<double, 3>& half_width);

// Positive/negative frequency components. Slots with sin(omega) below the
// degeneracy threshold are split by the fallback eigenbasis; the probability
// carried by such slots is reported so callers can flag it.
struct BranchDecomposition {
    FieldState plus;
    FieldState minus;
    double degenerate_mass = 0.0;
};

BranchDecomposition branch_decompose(const FieldState& state);

}  // namespace qwalk
