#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "qwalk/util.hpp"
#include "qwalk/walk.hpp"

using namespace qwalk;
using cplx = std::complex<double>;

namespace {

std::vector<std::array<double, 3>> kappa_sweep(int dimension, std::uint64_t seed) {
    std::vector<std::array<double, 3>> out = {
        {0.3, 0.0, 0.0},   {-1.2, 0.7, 0.0},  {2.9, -2.1, 0.4},
        {M_PI / 2, 0.0, 0.0}, {M_PI - 1e-3, 1.0, -1.0}, {0.05, -0.08, 0.11}};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-M_PI, M_PI);
    for (int i = 0; i < 6; ++i) out.push_back({dist(rng), dist(rng), dist(rng)});
    for (auto& k : out)
        for (int i = dimension; i < 3; ++i) k[i] = 0.0;
    return out;
}

std::vector<WalkModel> all_models() {
    return {WalkModel::weyl(1),        WalkModel::weyl(2),       WalkModel::weyl(3),
            WalkModel::dirac(1, 0.15), WalkModel::dirac(1, 1.0), WalkModel::dirac(2, 0.2),
            WalkModel::dirac(3, 0.3)};
}

Eigen::MatrixXcd exp_minus_i(const Eigen::MatrixXcd& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    Eigen::VectorXcd phases(h.rows());
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        phases[i] = std::exp(cplx(0.0, -solver.eigenvalues()[i]));
    return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

}  // namespace

TEST_CASE("walk_model_metadata") {
    CHECK(WalkModel::weyl(1).coin_dim() == 2);
    CHECK(WalkModel::weyl(3).coin_dim() == 2);
    CHECK(WalkModel::dirac(1, 0.5).coin_dim() == 2);
    CHECK(WalkModel::dirac(2, 0.5).coin_dim() == 4);
    CHECK(WalkModel::dirac(3, 0.5).coin_dim() == 4);

    CHECK(WalkModel::weyl(2).grid_kind() == GridKind::Cubic);
    CHECK(WalkModel::weyl(3).grid_kind() == GridKind::Bcc);
    CHECK(WalkModel::dirac(3, 0.1).grid_kind() == GridKind::Bcc);

    CHECK(WalkModel::dirac(1, 0.6).n() == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(WalkModel::weyl(2).n() == 1.0);
    CHECK(WalkModel::dirac(2, 0.3).name() == "dirac2d");

    CHECK_THROWS(WalkModel::weyl(0));
    CHECK_THROWS(WalkModel::weyl(4));
    CHECK_THROWS(WalkModel::dirac(1, -0.1));
    CHECK_THROWS(WalkModel::dirac(1, 1.1));
}

TEST_CASE("walk_bloch_vector_is_unit") {
    for (int d = 1; d <= 3; ++d) {
        for (const auto& k : kappa_sweep(d, 10 + d)) {
            const BlochData b = weyl_bloch(d, k);
            const double len2 =
                b.u * b.u + b.nt[0] * b.nt[0] + b.nt[1] * b.nt[1] + b.nt[2] * b.nt[2];
            CHECK(std::abs(len2 - 1.0) < 1e-14);
            for (int i = d; i < 3; ++i) CHECK(b.du[i] == 0.0);
        }
    }
}

TEST_CASE("walk_bloch_derivatives_match_finite_differences") {
    const double h = 1e-6;
    for (int d = 1; d <= 3; ++d) {
        for (const auto& k : kappa_sweep(d, 20 + d)) {
            const BlochData b = weyl_bloch(d, k);
            for (int j = 0; j < d; ++j) {
                auto kp = k, km = k;
                kp[j] += h;
                km[j] -= h;
                const BlochData bp = weyl_bloch(d, kp), bm = weyl_bloch(d, km);
                CHECK(std::abs(b.du[j] - (bp.u - bm.u) / (2 * h)) < 1e-8);
                for (int c = 0; c < 3; ++c) {
                    CHECK(std::abs(b.dnt[j][c] - (bp.nt[c] - bm.nt[c]) / (2 * h)) < 1e-8);
                }
            }
        }
    }
}

TEST_CASE("walk_gamma_matrices_satisfy_clifford_algebra") {
    const Eigen::Matrix4cd id = Eigen::Matrix4cd::Identity();
    CHECK((gamma0() * gamma0() - id).cwiseAbs().maxCoeff() == 0.0);
    CHECK((gamma0() - gamma0().adjoint()).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < 3; ++i) {
        const Eigen::Matrix4cd gi = gamma_spatial(i);
        CHECK((gi * gi + id).cwiseAbs().maxCoeff() == 0.0);
        CHECK((gamma0() * gi + gi * gamma0()).cwiseAbs().maxCoeff() == 0.0);
        for (int j = i + 1; j < 3; ++j) {
            const Eigen::Matrix4cd gj = gamma_spatial(j);
            CHECK((gi * gj + gj * gi).cwiseAbs().maxCoeff() == 0.0);
        }
    }
}

TEST_CASE("walk_unitary_agrees_with_explicit_forms") {
    for (const WalkModel& model : all_models()) {
        for (const auto& k : kappa_sweep(model.dimension, 30)) {
            const Eigen::MatrixXcd u = walk_unitary(k, model);
            const Eigen::Index s = u.rows();
            CHECK(s == model.coin_dim());
            CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(s, s)).cwiseAbs().maxCoeff() <
                  1e-14);

            const BlochData b = weyl_bloch(model.dimension, k);
            Eigen::MatrixXcd expected;
            if (model.family == WalkFamily::Weyl) {
                expected = b.u * Eigen::Matrix2cd::Identity();
                for (int i = 0; i < 3; ++i) expected -= cplx(0, 1) * b.nt[i] * pauli(i);
            } else if (model.coin_dim() == 2) {
                // 1D Dirac: diag(n e^{-ik}, n e^{ik}) coupled by i m off-diagonal.
                const double n = model.n();
                expected.resize(2, 2);
                expected << n * std::exp(cplx(0, -k[0])), cplx(0, model.mass),
                    cplx(0, model.mass), n * std::exp(cplx(0, k[0]));
            } else {
                Eigen::Matrix4cd m = -model.mass * gamma0();
                for (int i = 0; i < 3; ++i)
                    m += model.n() * b.nt[i] * gamma0() * gamma_spatial(i);
                expected = model.n() * b.u * Eigen::Matrix4cd::Identity() - cplx(0, 1) * m;
            }
            CHECK((u - expected).cwiseAbs().maxCoeff() < 1e-14);

            // U = cos(omega) I - i M, so M = i (U - cos(omega) I).
            const Eigen::MatrixXcd recovered =
                cplx(0, 1) * (u - std::cos(dispersion(k, model)) *
                                      Eigen::MatrixXcd::Identity(s, s));
            CHECK((hermitian_part(k, model) - recovered).cwiseAbs().maxCoeff() < 1e-13);
        }
    }
}

TEST_CASE("walk_dispersion_values") {
    // Massless 1D: omega = |k|.
    const WalkModel w1 = WalkModel::weyl(1);
    for (double k : {0.2, 1.5, -2.4, 3.0}) {
        CHECK(dispersion({k, 0, 0}, w1) == doctest::Approx(std::abs(k)).epsilon(1e-14));
    }
    // Unit mass: flat band at pi/2.
    const WalkModel dm1 = WalkModel::dirac(1, 1.0);
    for (double k : {0.0, 0.7, -2.0}) {
        CHECK(dispersion({k, 0, 0}, dm1) == doctest::Approx(M_PI / 2).epsilon(1e-15));
    }
    // Small-mass gap at k = 0: omega = arccos(n).
    const WalkModel d015 = WalkModel::dirac(1, 0.15);
    CHECK(dispersion({0, 0, 0}, d015) == doctest::Approx(0.150568).epsilon(1e-5));
    CHECK(dispersion({0, 0, 0}, d015) ==
          doctest::Approx(std::acos(std::sqrt(1.0 - 0.15 * 0.15))).epsilon(1e-15));
    // 3D massless at small kappa: omega ~ |kappa|.
    const WalkModel w3 = WalkModel::weyl(3);
    const double eps = 1e-4;
    CHECK(dispersion({eps, eps, eps}, w3) ==
          doctest::Approx(std::sqrt(3.0) * eps).epsilon(1e-6));
}

TEST_CASE("walk_group_velocity_matches_finite_differences") {
    const double h = 1e-6;
    for (const WalkModel& model : all_models()) {
        if (model.mass == 1.0) continue;  // flat band, gradient is zero
        for (const auto& k : kappa_sweep(model.dimension, 40)) {
            std::array<double, 3> v{};
            try {
                v = group_velocity(k, model);
            } catch (const DegenerateError&) {
                continue;
            }
            for (int j = 0; j < model.dimension; ++j) {
                auto kp = k, km = k;
                kp[j] += h;
                km[j] -= h;
                const double fd = (dispersion(kp, model) - dispersion(km, model)) / (2 * h);
                CHECK(std::abs(v[j] - fd) < 1e-6);
            }
        }
    }
    CHECK_THROWS_AS(group_velocity({0, 0, 0}, WalkModel::weyl(1)), DegenerateError);
    // Massless 1D away from the cone tip: |v| = 1.
    CHECK(group_velocity({1.3, 0, 0}, WalkModel::weyl(1))[0] == doctest::Approx(1.0));
    CHECK(group_velocity({-1.3, 0, 0}, WalkModel::weyl(1))[0] == doctest::Approx(-1.0));
}

TEST_CASE("walk_omega_jet_derivatives") {
    const WalkModel model = WalkModel::dirac(1, 0.4);
    const std::array<double, 3> k{0.6, 0, 0};
    CHECK_THROWS(omega_jet(k, model, 0));
    CHECK_THROWS(omega_jet(k, model, 4));

    const OmegaJet jet = omega_jet(k, model, 3);
    CHECK(jet.omega == doctest::Approx(dispersion(k, model)).epsilon(1e-15));
    CHECK(jet.grad[0] == doctest::Approx(group_velocity(k, model)[0]).epsilon(1e-12));

    // Second and third derivatives against direct differences of omega.
    const double h = 1e-2;
    auto om = [&](double dk) { return dispersion({k[0] + dk, 0, 0}, model); };
    const double d2 = (om(h) - 2 * om(0) + om(-h)) / (h * h);
    CHECK(std::abs(jet.hess(0, 0) - d2) < 1e-3);
    const double d3 = (om(2 * h) - 2 * om(h) + 2 * om(-h) - om(-2 * h)) / (2 * h * h * h);
    CHECK(std::abs(jet.third[0][0][0] - d3) < 1e-3);

    // Symmetry of the mixed third derivatives in 3D.
    const WalkModel m3 = WalkModel::dirac(3, 0.3);
    const OmegaJet j3 = omega_jet({0.4, -0.7, 1.1}, m3, 3);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c) {
                CHECK(j3.third[a][b][c] == j3.third[b][a][c]);
                CHECK(j3.third[a][b][c] == j3.third[a][c][b]);
            }
}

TEST_CASE("walk_hamiltonian_generates_the_unitary") {
    for (const WalkModel& model : all_models()) {
        for (const auto& k : kappa_sweep(model.dimension, 50)) {
            Eigen::MatrixXcd ham;
            try {
                ham = interpolating_hamiltonian(k, model);
            } catch (const DegenerateError&) {
                continue;
            }
            CHECK((ham - ham.adjoint()).cwiseAbs().maxCoeff() < 1e-13);

            // Eigenvalues are +-omega.
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(ham);
            const double omega = dispersion(k, model);
            const Eigen::Index s = ham.rows();
            for (Eigen::Index i = 0; i < s; ++i) {
                const double expect = i < s / 2 ? -omega : omega;
                CHECK(std::abs(solver.eigenvalues()[i] - expect) < 1e-12);
            }

            CHECK((exp_minus_i(ham) - walk_unitary(k, model)).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("walk_eigensystem_closed_forms") {
    for (const WalkModel& model : all_models()) {
        for (const auto& k : kappa_sweep(model.dimension, 60)) {
            const SpectrumSlot ev = eigensystem(k, model);
            const Eigen::Index s = model.coin_dim();
            REQUIRE(ev.vectors.rows() == s);
            CHECK((ev.vectors.adjoint() * ev.vectors - Eigen::MatrixXcd::Identity(s, s))
                      .cwiseAbs()
                      .maxCoeff() < 1e-12);

            const Eigen::MatrixXcd u = walk_unitary(k, model);
            for (Eigen::Index c = 0; c < s; ++c) {
                const double sign = c < s / 2 ? 1.0 : -1.0;
                const cplx lambda = std::exp(cplx(0.0, -sign * ev.omega));
                CHECK((u * ev.vectors.col(c) - lambda * ev.vectors.col(c))
                          .cwiseAbs()
                          .maxCoeff() < 1e-10);
            }
            CHECK(std::abs(ev.vW) <= 1.0 + 1e-12);
            CHECK(std::abs(ev.vD) <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("walk_eigensystem_fallback_at_degeneracies") {
    // Massless models are branch-degenerate at kappa = 0; 4-component models
    // also fall back where the massless dispersion is singular.
    const SpectrumSlot w0 = eigensystem({0, 0, 0}, WalkModel::weyl(1));
    CHECK(w0.fallback);
    CHECK((w0.vectors.adjoint() * w0.vectors - Eigen::Matrix2cd::Identity())
              .cwiseAbs()
              .maxCoeff() < 1e-12);

    const WalkModel d3 = WalkModel::dirac(3, 0.3);
    const SpectrumSlot s0 = eigensystem({0, 0, 0}, d3);
    CHECK(s0.fallback);
    const Eigen::MatrixXcd u = walk_unitary({0, 0, 0}, d3);
    for (int c = 0; c < 4; ++c) {
        const double sign = c < 2 ? 1.0 : -1.0;
        const cplx lambda = std::exp(cplx(0.0, -sign * s0.omega));
        CHECK((u * s0.vectors.col(c) - lambda * s0.vectors.col(c)).cwiseAbs().maxCoeff() <
              1e-10);
    }

    CHECK_FALSE(eigensystem({0.8, 0.2, -0.5}, d3).fallback);
}

TEST_CASE("walk_eigensystem_phase_convention") {
    for (const WalkModel& model : all_models()) {
        for (const auto& k : kappa_sweep(model.dimension, 70)) {
            const SpectrumSlot ev = eigensystem(k, model);
            for (Eigen::Index c = 0; c < ev.vectors.cols(); ++c) {
                for (Eigen::Index r = 0; r < ev.vectors.rows(); ++r) {
                    const cplx v = ev.vectors(r, c);
                    if (std::abs(v) <= 1e-9) continue;
                    CHECK(v.imag() == doctest::Approx(0.0).epsilon(1e-12));
                    CHECK(v.real() > 0.0);
                    break;
                }
            }
        }
    }
}

TEST_CASE("walk_slot_action_applies_hermitian_part") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> dist;
    for (const WalkModel& model : all_models()) {
        for (const auto& k : kappa_sweep(model.dimension, 80)) {
            const SlotAction act = slot_action(k, model);
            const Eigen::MatrixXcd m = hermitian_part(k, model);
            const int s = model.coin_dim();
            Eigen::VectorXcd x(s), y(s);
            for (int i = 0; i < s; ++i) x[i] = cplx(dist(rng), dist(rng));
            apply_hermitian_part(act, model, x.data(), y.data());
            CHECK((y - m * x).cwiseAbs().maxCoeff() < 1e-13);
            CHECK(act.omega == doctest::Approx(dispersion(k, model)).epsilon(1e-15));
        }
    }
}

TEST_CASE("walk_transition_matrices_1d_dirac_forms") {
    const WalkModel model = WalkModel::dirac(1, 0.35);
    const double n = model.n();
    const TransitionSet set = transition_matrices(model);
    REQUIRE(set.shifts.size() == 3);
    REQUIRE(set.matrices.size() == 3);

    // Shifts sorted lexicographically: -1, 0, +1.
    CHECK(set.shifts[0] == std::array<int, 3>{-1, 0, 0});
    CHECK(set.shifts[1] == std::array<int, 3>{0, 0, 0});
    CHECK(set.shifts[2] == std::array<int, 3>{1, 0, 0});

    Eigen::Matrix2cd left, rest, right;
    left << 0, 0, 0, n;
    rest << 0, cplx(0, model.mass), cplx(0, model.mass), 0;
    right << n, 0, 0, 0;
    CHECK((set.matrices[0] - left).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((set.matrices[1] - rest).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((set.matrices[2] - right).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("walk_transition_matrices_reconstruct_the_unitary") {
    const std::vector<std::size_t> expected_counts = {2, 4, 8, 3, 1, 5, 9};
    const auto models = all_models();
    for (std::size_t i = 0; i < models.size(); ++i) {
        const TransitionSet set = transition_matrices(models[i]);
        CHECK(set.shifts.size() == expected_counts[i]);
        CHECK(shift_unitarity_residual(set) < 1e-14);
        for (const auto& k : kappa_sweep(models[i].dimension, 90)) {
            CHECK((reconstruct_unitary(set, k) - walk_unitary(k, models[i]))
                      .cwiseAbs()
                      .maxCoeff() < 1e-12);
        }
        TransitionSet corrupted = set;
        corrupted.matrices[0](0, 0) += 0.001;
        CHECK(shift_unitarity_residual(corrupted) > 1e-4);
    }
}

TEST_CASE("walk_unit_mass_walk_is_a_pure_coin_flip") {
    const WalkModel model = WalkModel::dirac(1, 1.0);
    const Eigen::MatrixXcd u = walk_unitary({0.9, 0, 0}, model);
    Eigen::Matrix2cd expected;
    expected << 0, cplx(0, 1), cplx(0, 1), 0;
    CHECK((u - expected).cwiseAbs().maxCoeff() < 1e-15);
    const TransitionSet set = transition_matrices(model);
    REQUIRE(set.shifts.size() == 1);
    CHECK(set.shifts[0] == std::array<int, 3>{0, 0, 0});
}

TEST_CASE("walk_weyl_and_dirac_unitary_dispatch") {
    const std::array<double, 3> k{0.4, -0.9, 0.3};
    CHECK((weyl_unitary(k, WalkModel::weyl(3)) - walk_unitary(k, WalkModel::weyl(3)))
              .cwiseAbs()
              .maxCoeff() == 0.0);
    const WalkModel d2 = WalkModel::dirac(2, 0.25);
    CHECK((dirac_unitary(k, d2) - walk_unitary(k, d2)).cwiseAbs().maxCoeff() == 0.0);
}
