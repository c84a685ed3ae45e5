#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qwalk/lattice.hpp"

// Walk constructors and spectral data.
//
// Every model here is a 2x2 or 4x4 unitary of the shape
//
//     U(kappa) = cos(omega) I - i M(kappa),
//
// with M Hermitian and M^2 = sin^2(omega) I, where cos(omega) = n * u(kappa),
// u is the massless scalar below and n = sqrt(1 - m^2) (n = 1 for Weyl).
// Concretely:
//
//     Weyl, any d:    M = sigma . nt                      (s = 2)
//     Dirac, d = 1:   M = sigma . (n*nt + (-m, 0, 0))     (s = 2, decoupled)
//     Dirac, d = 2,3: M = [ n sigma.nt   -m I           ]
//                         [ -m I         -n sigma.nt    ] (s = 4)
//
// The s = 4 form equals n*g0*g.nt - m*g0 in the spinorial representation
// with g0 = offdiag(I, I) and g_i = (0, -sigma_i; sigma_i, 0).
//
// Wavevector components are always the phases conjugate to the grid axes.
// For d = 2 this means the closed forms below are the degree-one expressions
// u = (c1+c2)/2, nt = ((s1+s2)/2, (s1-s2)/2, (c2-c1)/2); the usual product
// forms are recovered by the half-sum / half-difference change of variables.

namespace qwalk {

enum class WalkFamily { Weyl, Dirac };

struct WalkModel {
    WalkFamily family = WalkFamily::Weyl;
    int dimension = 1;
    double mass = 0.0;

    static WalkModel weyl(int dimension);
    static WalkModel dirac(int dimension, double mass);

    // n = sqrt(1 - m^2); the coupling satisfies n^2 + m^2 = 1.
    double n() const;
    // 2 for Weyl and the decoupled 1D Dirac walk, 4 for Dirac in d = 2, 3.
    int coin_dim() const;
    GridKind grid_kind() const;
    std::string name() const;

    bool operator==(const WalkModel&) const = default;
};

// Massless closed-form scalars at a wavevector, with first derivatives.
// dnt[j][c] is the derivative of nt[c] along kappa_j; entries with j or c
// at or beyond the model dimension are zero.
struct BlochData {
    double u = 0.0;
    std::array<double, 3> nt{};
    std::array<double, 3> du{};
    std::array<std::array<double, 3>, 3> dnt{};
};

BlochData weyl_bloch(int dimension, const std::array<double, 3>& kappa);

// sin(omega) evaluated from the Bloch vector rather than as sqrt(1 - (n u)^2),
// which cancels catastrophically near u = +-1. On the dispersion surface
// 1 - n^2 u^2 = n^2 |nt|^2 + m^2 holds identically, and the right-hand side is a
// sum of squares. It also keeps |nt_3| <= sin(omega) exact, so the closed-form
// eigenvectors vanish exactly where they should.
double bloch_sin_omega(const BlochData& b, const WalkModel& model);

Eigen::Matrix2cd pauli(int i);
Eigen::Matrix4cd gamma0();
Eigen::Matrix4cd gamma_spatial(int i);

Eigen::MatrixXcd weyl_unitary(const std::array<double, 3>& kappa, const WalkModel& model);
Eigen::MatrixXcd dirac_unitary(const std::array<double, 3>& kappa, const WalkModel& model);
Eigen::MatrixXcd walk_unitary(const std::array<double, 3>& kappa, const WalkModel& model);

// The Hermitian part M of U = cos(omega) I - i M.
Eigen::MatrixXcd hermitian_part(const std::array<double, 3>& kappa, const WalkModel& model);

double dispersion(const std::array<double, 3>& kappa, const WalkModel& model);

// Gradient of omega; throws DegenerateError when sin(omega) < 1e-9.
std::array<double, 3> group_velocity(const std::array<double, 3>& kappa, const WalkModel& model);

// Hessian of omega, by central differences of the analytic gradient.
Eigen::Matrix3d diffusion_tensor(const std::array<double, 3>& kappa, const WalkModel& model);

// Taylor data of omega about kappa up to the requested order (1, 2 or 3).
// third[j][l][m] is symmetrized over index permutations.
struct OmegaJet {
    double omega = 0.0;
    std::array<double, 3> grad{};
    Eigen::Matrix3d hess = Eigen::Matrix3d::Zero();
    std::array<std::array<std::array<double, 3>, 3>, 3> third{};
};

OmegaJet omega_jet(const std::array<double, 3>& kappa, const WalkModel& model, int order);

// H = (omega / sin omega) M, so that exp(-iH) = U.
Eigen::MatrixXcd interpolating_hamiltonian(const std::array<double, 3>& kappa,
                                           const WalkModel& model);

// Spectral data of one wavevector. Eigenvector columns are ordered by branch:
// (+), (-) for s = 2 and (+,+), (+,-), (-,+), (-,-) for s = 4, normalized so
// that U * col = exp(-i s omega) * col. Columns come from the closed forms
// (phase fixed: first component with modulus > 1e-9 made real positive);
// at degenerate points the flag is set and a dense solve is used instead.
struct SpectrumSlot {
    std::array<double, 3> kappa{};
    double omega = 0.0;
    double u = 0.0;                  // massless scalar
    std::array<double, 3> nt{};      // massless vector part
    std::complex<double> z{};        // 2x2 block parameters: W = (z, -w*; w, z*)
    std::complex<double> w{};
    double phi = 0.0;                // Arg(w) - pi/2
    double vW = 0.0;
    double vD = 0.0;                 // zero for s = 2 models
    bool fallback = false;
    Eigen::MatrixXcd vectors;
};

SpectrumSlot eigensystem(const std::array<double, 3>& kappa, const WalkModel& model);

// Scalar data enabling fast per-wavevector application of M and of functions
// of U without building matrices. nt is the effective Bloch vector for s = 2
// models and the massless vector for s = 4.
struct SlotAction {
    double omega = 0.0;
    double sin_omega = 0.0;
    std::array<double, 3> nt{};
};

SlotAction slot_action(const std::array<double, 3>& kappa, const WalkModel& model);

// y = M x on one coin vector (x and y must not alias).
void apply_hermitian_part(const SlotAction& act, const WalkModel& model,
                          const std::complex<double>* x, std::complex<double>* y);

// Position-space transition matrices: U(kappa) = sum_h exp(-i kappa.h) U_h.
// Shifts are sorted lexicographically; only nonzero matrices are kept.
struct TransitionSet {
    WalkModel model;
    std::vector<std::array<int, 3>> shifts;
    std::vector<Eigen::MatrixXcd> matrices;
};

TransitionSet transition_matrices(const WalkModel& model);

// Evaluates sum_h exp(-i kappa.h) U_h, for reconstruction checks.
Eigen::MatrixXcd reconstruct_unitary(const TransitionSet& set,
                                     const std::array<double, 3>& kappa);

// Largest violation of the shift-orthogonality unitarity conditions: over
// every lattice difference delta, sum over h of U_h^dagger U_{h+delta} must
// equal the identity at delta = 0 and vanish otherwise.
double shift_unitarity_residual(const TransitionSet& set);

}  // namespace qwalk
