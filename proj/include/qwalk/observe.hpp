#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "qwalk/state.hpp"

// Position observables, the kinematic operator algebra and its derived
// quantities (ballistic decomposition, Newton-Wigner coordinate, commutator).
//
// Mean positions are reported in unwrapped coordinates: the packet centre is
// located by a circular mean, site displacements are wrapped about it, and
// the result is mapped into the window of half an extent around the state's
// origin anchor. A wrap warning is raised when more than 20% of the mass
// sits outside the central 80% of an axis, in which case the torus has no
// trustworthy mean.

namespace qwalk {

// Site probabilities, coin traced out. Position domain only.
Eigen::VectorXd probability_distribution(const FieldState& state);

// Sums the distribution over the axes not listed; the result is row-major
// over the kept axes' coordinate ranges [0, extent) in the order given.
Eigen::VectorXd marginal(const Eigen::VectorXd& dist, const GridSpec& grid,
                         const std::vector<int>& axes);

struct MeanPosition {
    std::array<double, 3> value{};
    bool wrap_warning = false;
};

MeanPosition mean_position(const FieldState& state);

// Standard deviation of position about the circular centre, per axis.
std::array<double, 3> position_std(const FieldState& state);

struct ObservableSeries {
    std::vector<std::int64_t> times;
    std::vector<std::array<double, 3>> values;
};

struct PositionSeries {
    std::vector<std::int64_t> times;
    std::vector<std::array<double, 3>> mean;
    std::vector<std::array<double, 3>> spread;
    std::vector<std::uint8_t> wrap_warnings;
};

// Evolves spectrally from state0 and samples every stride steps up to the
// horizon (sample times 0, stride, 2 stride, ... <= horizon).
PositionSeries position_series(const FieldState& state0, std::int64_t horizon,
                               std::int64_t stride);

// Kinematic operator algebra of one wavevector, Dirac models only. With
// H = (omega / sin omega) M and the velocity V_j = dH/dkappa_j,
//   A_j       = i [H, V_j]           (anticommutes with H),
//   A_j(t)    = exp(2iHt) A_j,
//   Z^V_j(t)  = (1/2i) H^-1 A_j(t),
//   Vhat_j    = V_j - Z^V_j(0)       (the branch-diagonal part of V_j),
//   Z^X_j(t)  = -(1/4) H^-2 A_j(t),
// so that X_j(t) = X_j(0) + Vhat_j t + Z^X_j(t) - Z^X_j(0). The A, Zv, Zx
// fields are evaluated at the given time. f[j](mu, nu) and w[j] hold the
// curvature data f^(j)_{mu nu} = n_nu d_j n_mu - n_mu d_j n_nu and its dual
// combination, built from the massless Bloch vector for the 4-component
// models and from the effective Bloch vector for the decoupled 1D walk.
// Throws DegenerateError where sin(omega) < 1e-9.
struct KinematicOperators {
    double omega = 0.0;
    std::array<Eigen::MatrixXcd, 3> V;
    std::array<Eigen::MatrixXcd, 3> A;
    std::array<Eigen::MatrixXcd, 3> Vhat;
    std::array<Eigen::MatrixXcd, 3> Zv;
    std::array<Eigen::MatrixXcd, 3> Zx;
    std::array<Eigen::Matrix3d, 3> f;
    std::array<std::array<double, 3>, 3> w{};
};

KinematicOperators kinematic_operators(const std::array<double, 3>& kappa,
                                       const WalkModel& model, double t);

// Ballistic/interference split of the mean position at elapsed time t from
// the given (initial) state:
//   plus_j  = <psi+| X_j(0) |psi+> + t <psi+| Vhat_j |psi+>,     same for minus,
//   int_j   = 2 Re <psi+| X_j(0) - Z^X_j(0) + Z^X_j(t) |psi->,
// with unnormalized branch components, so plus + minus + interference equals
// the mean position of the evolved state. Slots degenerate under the 1e-9
// threshold are excluded from the operator sums and their mass reported.
struct MeanPositionDecomposition {
    std::array<double, 3> plus{};
    std::array<double, 3> minus{};
    std::array<double, 3> interference{};
    double degenerate_mass = 0.0;
};

MeanPositionDecomposition mean_position_decomposition(const FieldState& state, std::int64_t t);

struct DecompositionSeries {
    std::vector<std::int64_t> times;
    std::vector<std::array<double, 3>> mean;
    std::vector<std::array<double, 3>> spread;
    std::vector<std::array<double, 3>> plus;
    std::vector<std::array<double, 3>> minus;
    std::vector<std::array<double, 3>> interference;
    std::vector<std::uint8_t> wrap_warnings;
    double degenerate_mass = 0.0;
};

// position_series plus the decomposition closed forms on the same samples.
DecompositionSeries decomposition_series(const FieldState& state0, std::int64_t horizon,
                                         std::int64_t stride);

// Mean of the Newton-Wigner position at elapsed time t: amplitudes are
// rotated into the eigenbasis slot by slot, phased by exp(-i s_r omega t),
// and the mean position of the resulting field is returned. Exactly linear
// in t for any state.
std::array<double, 3> newton_wigner_mean(const FieldState& state, std::int64_t t);

// Expectation of [X_i, P_j]. Off-diagonal pairs vanish identically; on the
// diagonal the value is i (1 - b_i), where the boundary term b_i is half the
// extent times the kappa_i-marginal probability on the slot columns nearest
// kappa_i = -pi and +pi.
std::complex<double> commutator_expectation(const FieldState& state, int i, int j);

// Least-squares line y = intercept + slope x.
struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double max_abs_residual = 0.0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Dominant oscillation of a uniformly sampled series (spacing dt): the series
// is detrended by its least-squares line, Fourier transformed directly, and
// the magnitude peak refined by quadratic interpolation of the neighboring
// bins. Returns angular frequency in radians per unit time.
struct SpectralPeak {
    double angular_frequency = 0.0;
    double amplitude = 0.0;
};

SpectralPeak dominant_frequency(const std::vector<double>& values, double dt);

}  // namespace qwalk
