#include "qwalk/walk.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "qwalk/util.hpp"

namespace qwalk {

namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};
constexpr double kDegenerateTol = 1e-9;

void check_dimension(int d) {
    if (d < 1 || d > 3) throw std::invalid_argument("walk dimension must be 1, 2 or 3");
}

// Effective (u, nt) of the 2x2 models, satisfying U = u I - i sigma.nt.
struct TwoByTwoData {
    double u;
    std::array<double, 3> nt;
};

TwoByTwoData effective_2x2(const BlochData& b, const WalkModel& model) {
    if (model.family == WalkFamily::Weyl) return {b.u, b.nt};
    // The 1D Dirac walk decouples into 2x2 blocks (n e^{-ik}, im; im, n e^{ik}).
    const double n = model.n();
    return {n * b.u, {-model.mass, 0.0, n * b.nt[2]}};
}

Eigen::Matrix2cd two_by_two(double u, const std::array<double, 3>& nt) {
    Eigen::Matrix2cd m;
    m << cplx(u, -nt[2]), cplx(-nt[1], -nt[0]), cplx(nt[1], -nt[0]), cplx(u, nt[2]);
    return m;
}

double bloch_norm(const std::array<double, 3>& nt) {
    return std::sqrt(nt[0] * nt[0] + nt[1] * nt[1] + nt[2] * nt[2]);
}

void fix_column_phase(Eigen::MatrixXcd& mat, int col) {
    for (int i = 0; i < mat.rows(); ++i) {
        const cplx c = mat(i, col);
        if (std::abs(c) <= 1e-9) continue;
        // Already real positive: leave the column bit-exact.
        if (c.imag() == 0.0 && c.real() > 0.0) return;
        mat.col(col) *= std::conj(c) / std::abs(c);
        return;
    }
}

double safe_sqrt(double x) { return std::sqrt(std::max(0.0, x)); }

}  // namespace

WalkModel WalkModel::weyl(int dimension) {
    check_dimension(dimension);
    return {WalkFamily::Weyl, dimension, 0.0};
}

WalkModel WalkModel::dirac(int dimension, double mass) {
    check_dimension(dimension);
    if (!(mass >= 0.0 && mass <= 1.0))
        throw std::invalid_argument("dirac mass must lie in [0, 1]");
    return {WalkFamily::Dirac, dimension, mass};
}

double WalkModel::n() const { return std::sqrt(1.0 - mass * mass); }

int WalkModel::coin_dim() const {
    if (family == WalkFamily::Weyl || dimension == 1) return 2;
    return 4;
}

GridKind WalkModel::grid_kind() const {
    return dimension == 3 ? GridKind::Bcc : GridKind::Cubic;
}

std::string WalkModel::name() const {
    return (family == WalkFamily::Weyl ? "weyl" : "dirac") + std::to_string(dimension) + "d";
}

BlochData weyl_bloch(int dimension, const std::array<double, 3>& kappa) {
    check_dimension(dimension);
    BlochData b;
    if (dimension == 1) {
        const double c = std::cos(kappa[0]), s = std::sin(kappa[0]);
        b.u = c;
        b.nt = {0.0, 0.0, s};
        b.du = {-s, 0.0, 0.0};
        b.dnt[0] = {0.0, 0.0, c};
        return b;
    }
    if (dimension == 2) {
        const double c1 = std::cos(kappa[0]), s1 = std::sin(kappa[0]);
        const double c2 = std::cos(kappa[1]), s2 = std::sin(kappa[1]);
        b.u = 0.5 * (c1 + c2);
        b.nt = {0.5 * (s1 + s2), 0.5 * (s1 - s2), 0.5 * (c2 - c1)};
        b.du = {-0.5 * s1, -0.5 * s2, 0.0};
        b.dnt[0] = {0.5 * c1, 0.5 * c1, 0.5 * s1};
        b.dnt[1] = {0.5 * c2, -0.5 * c2, -0.5 * s2};
        return b;
    }
    const double c1 = std::cos(kappa[0]), s1 = std::sin(kappa[0]);
    const double c2 = std::cos(kappa[1]), s2 = std::sin(kappa[1]);
    const double c3 = std::cos(kappa[2]), s3 = std::sin(kappa[2]);
    b.u = c1 * c2 * c3 + s1 * s2 * s3;
    b.nt = {s1 * c2 * c3 - c1 * s2 * s3, c1 * s2 * c3 + s1 * c2 * s3,
            c1 * c2 * s3 - s1 * s2 * c3};
    b.du = {-s1 * c2 * c3 + c1 * s2 * s3, -c1 * s2 * c3 + s1 * c2 * s3,
            -c1 * c2 * s3 + s1 * s2 * c3};
    b.dnt[0] = {c1 * c2 * c3 + s1 * s2 * s3, -s1 * s2 * c3 + c1 * c2 * s3,
                -s1 * c2 * s3 - c1 * s2 * c3};
    b.dnt[1] = {-s1 * s2 * c3 - c1 * c2 * s3, c1 * c2 * c3 - s1 * s2 * s3,
                -c1 * s2 * s3 - s1 * c2 * c3};
    b.dnt[2] = {-s1 * c2 * s3 - c1 * s2 * c3, -c1 * s2 * s3 + s1 * c2 * c3,
                c1 * c2 * c3 + s1 * s2 * s3};
    return b;
}

double bloch_sin_omega(const BlochData& b, const WalkModel& model) {
    const double n = model.n();
    const double nn = b.nt[0] * b.nt[0] + b.nt[1] * b.nt[1] + b.nt[2] * b.nt[2];
    return std::sqrt(n * n * nn + model.mass * model.mass);
}

Eigen::Matrix2cd pauli(int i) {
    Eigen::Matrix2cd m;
    switch (i) {
        case 0: m << 0, 1, 1, 0; break;
        case 1: m << 0, -kI, kI, 0; break;
        case 2: m << 1, 0, 0, -1; break;
        default: throw std::invalid_argument("pauli index must be 0, 1 or 2");
    }
    return m;
}

Eigen::Matrix4cd gamma0() {
    Eigen::Matrix4cd g = Eigen::Matrix4cd::Zero();
    g.block<2, 2>(0, 2) = Eigen::Matrix2cd::Identity();
    g.block<2, 2>(2, 0) = Eigen::Matrix2cd::Identity();
    return g;
}

Eigen::Matrix4cd gamma_spatial(int i) {
    Eigen::Matrix4cd g = Eigen::Matrix4cd::Zero();
    g.block<2, 2>(0, 2) = -pauli(i);
    g.block<2, 2>(2, 0) = pauli(i);
    return g;
}

Eigen::MatrixXcd weyl_unitary(const std::array<double, 3>& kappa, const WalkModel& model) {
    if (model.family != WalkFamily::Weyl)
        throw std::invalid_argument("weyl_unitary requires a Weyl model");
    const BlochData b = weyl_bloch(model.dimension, kappa);
    return two_by_two(b.u, b.nt);
}

Eigen::MatrixXcd dirac_unitary(const std::array<double, 3>& kappa, const WalkModel& model) {
    if (model.family != WalkFamily::Dirac)
        throw std::invalid_argument("dirac_unitary requires a Dirac model");
    const BlochData b = weyl_bloch(model.dimension, kappa);
    if (model.dimension == 1) {
        const TwoByTwoData eff = effective_2x2(b, model);
        return two_by_two(eff.u, eff.nt);
    }
    const Eigen::Matrix2cd w = two_by_two(b.u, b.nt);
    Eigen::Matrix4cd d = Eigen::Matrix4cd::Zero();
    d.block<2, 2>(0, 0) = model.n() * w;
    d.block<2, 2>(2, 2) = model.n() * w.adjoint();
    d.block<2, 2>(0, 2) = kI * model.mass * Eigen::Matrix2cd::Identity();
    d.block<2, 2>(2, 0) = kI * model.mass * Eigen::Matrix2cd::Identity();
    return d;
}

Eigen::MatrixXcd walk_unitary(const std::array<double, 3>& kappa, const WalkModel& model) {
    return model.family == WalkFamily::Weyl ? weyl_unitary(kappa, model)
                                            : dirac_unitary(kappa, model);
}

Eigen::MatrixXcd hermitian_part(const std::array<double, 3>& kappa, const WalkModel& model) {
    const BlochData b = weyl_bloch(model.dimension, kappa);
    if (model.coin_dim() == 2) {
        const TwoByTwoData eff = effective_2x2(b, model);
        Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
        for (int i = 0; i < 3; ++i) m += eff.nt[i] * pauli(i);
        return m;
    }
    const double n = model.n();
    Eigen::Matrix2cd sn = Eigen::Matrix2cd::Zero();
    for (int i = 0; i < 3; ++i) sn += b.nt[i] * pauli(i);
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m.block<2, 2>(0, 0) = n * sn;
    m.block<2, 2>(2, 2) = -n * sn;
    m.block<2, 2>(0, 2) = -model.mass * Eigen::Matrix2cd::Identity();
    m.block<2, 2>(2, 0) = -model.mass * Eigen::Matrix2cd::Identity();
    return m;
}

double dispersion(const std::array<double, 3>& kappa, const WalkModel& model) {
    const BlochData b = weyl_bloch(model.dimension, kappa);
    return std::acos(std::clamp(model.n() * b.u, -1.0, 1.0));
}

std::array<double, 3> group_velocity(const std::array<double, 3>& kappa,
                                     const WalkModel& model) {
    const BlochData b = weyl_bloch(model.dimension, kappa);
    const double sw = bloch_sin_omega(b, model);
    if (sw < kDegenerateTol)
        throw DegenerateError("group velocity undefined at a dispersion degeneracy");
    std::array<double, 3> v{};
    for (int j = 0; j < model.dimension; ++j) v[j] = -model.n() * b.du[j] / sw;
    return v;
}

Eigen::Matrix3d diffusion_tensor(const std::array<double, 3>& kappa, const WalkModel& model) {
    const double h = 1e-4;
    Eigen::Matrix3d out = Eigen::Matrix3d::Zero();
    for (int j = 0; j < model.dimension; ++j) {
        std::array<double, 3> plus = kappa, minus = kappa;
        plus[j] += h;
        minus[j] -= h;
        const auto vp = group_velocity(plus, model);
        const auto vm = group_velocity(minus, model);
        for (int l = 0; l < model.dimension; ++l) out(j, l) = (vp[l] - vm[l]) / (2.0 * h);
    }
    out = 0.5 * (out + out.transpose()).eval();
    return out;
}

OmegaJet omega_jet(const std::array<double, 3>& kappa, const WalkModel& model, int order) {
    if (order < 1 || order > 3) throw std::invalid_argument("omega_jet order must be 1, 2 or 3");
    OmegaJet jet;
    jet.omega = dispersion(kappa, model);
    jet.grad = group_velocity(kappa, model);
    if (order >= 2) jet.hess = diffusion_tensor(kappa, model);
    if (order < 3) return jet;

    // Third derivatives as second differences of the analytic gradient.
    const double h = 1e-3;
    const int d = model.dimension;
    double raw[3][3][3] = {};
    for (int j = 0; j < d; ++j) {
        for (int l = j; l < d; ++l) {
            std::array<double, 3> vjl{};
            if (j == l) {
                std::array<double, 3> plus = kappa, minus = kappa;
                plus[j] += h;
                minus[j] -= h;
                const auto vp = group_velocity(plus, model);
                const auto v0 = group_velocity(kappa, model);
                const auto vm = group_velocity(minus, model);
                for (int m = 0; m < d; ++m) vjl[m] = (vp[m] - 2.0 * v0[m] + vm[m]) / (h * h);
            } else {
                std::array<double, 3> pp = kappa, pm = kappa, mp = kappa, mm = kappa;
                pp[j] += h; pp[l] += h;
                pm[j] += h; pm[l] -= h;
                mp[j] -= h; mp[l] += h;
                mm[j] -= h; mm[l] -= h;
                const auto vpp = group_velocity(pp, model);
                const auto vpm = group_velocity(pm, model);
                const auto vmp = group_velocity(mp, model);
                const auto vmm = group_velocity(mm, model);
                for (int m = 0; m < d; ++m)
                    vjl[m] = (vpp[m] - vpm[m] - vmp[m] + vmm[m]) / (4.0 * h * h);
            }
            for (int m = 0; m < d; ++m) raw[j][l][m] = raw[l][j][m] = vjl[m];
        }
    }
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                jet.third[a][b][c] = (raw[a][b][c] + raw[a][c][b] + raw[b][a][c] +
                                      raw[b][c][a] + raw[c][a][b] + raw[c][b][a]) / 6.0;
    return jet;
}

Eigen::MatrixXcd interpolating_hamiltonian(const std::array<double, 3>& kappa,
                                           const WalkModel& model) {
    const BlochData b = weyl_bloch(model.dimension, kappa);
    const double sw = bloch_sin_omega(b, model);
    if (sw < kDegenerateTol)
        throw DegenerateError("interpolating Hamiltonian undefined at sin omega = 0");
    const double omega = std::acos(std::clamp(model.n() * b.u, -1.0, 1.0));
    return (omega / sw) * hermitian_part(kappa, model);
}

SpectrumSlot eigensystem(const std::array<double, 3>& kappa, const WalkModel& model) {
    const int s = model.coin_dim();
    SpectrumSlot slot;
    slot.kappa = kappa;
    const BlochData b = weyl_bloch(model.dimension, kappa);
    slot.u = b.u;
    slot.nt = b.nt;
    const double nu = model.n() * b.u;
    slot.omega = std::acos(std::clamp(nu, -1.0, 1.0));
    const double sw = bloch_sin_omega(b, model);

    if (s == 2) {
        const TwoByTwoData eff = effective_2x2(b, model);
        slot.z = cplx(eff.u, -eff.nt[2]);
        slot.w = cplx(eff.nt[1], -eff.nt[0]);
    } else {
        slot.z = cplx(b.u, -b.nt[2]);
        slot.w = cplx(b.nt[1], -b.nt[0]);
    }
    slot.phi = std::arg(slot.w) - M_PI / 2.0;

    const double weyl_sin = bloch_norm(b.nt);
    const bool degenerate = sw < kDegenerateTol || (s == 4 && weyl_sin < kDegenerateTol);

    if (degenerate) {
        slot.fallback = true;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hermitian_part(kappa, model));
        const Eigen::MatrixXcd& vecs = solver.eigenvectors();  // ascending eigenvalues
        slot.vectors.resize(s, s);
        if (s == 2) {
            slot.vectors.col(0) = vecs.col(1);
            slot.vectors.col(1) = vecs.col(0);
        } else {
            slot.vectors.col(0) = vecs.col(2);
            slot.vectors.col(1) = vecs.col(3);
            slot.vectors.col(2) = vecs.col(0);
            slot.vectors.col(3) = vecs.col(1);
        }
        for (int c = 0; c < s; ++c) fix_column_phase(slot.vectors, c);
        return slot;
    }

    const cplx eip(std::cos(slot.phi), std::sin(slot.phi));
    if (s == 2) {
        slot.vW = slot.z.imag() / sw;
        slot.vectors.resize(2, 2);
        for (int c = 0; c < 2; ++c) {
            const double sgn = c == 0 ? 1.0 : -1.0;
            slot.vectors(0, c) = safe_sqrt(1.0 - sgn * slot.vW) / std::sqrt(2.0);
            slot.vectors(1, c) = -sgn * eip * safe_sqrt(1.0 + sgn * slot.vW) / std::sqrt(2.0);
        }
    } else {
        slot.vW = slot.z.imag() / weyl_sin;
        slot.vD = model.n() * weyl_sin / sw;
        slot.vectors.resize(4, 4);
        const double branch[4] = {1.0, 1.0, -1.0, -1.0};
        const double parity[4] = {1.0, -1.0, 1.0, -1.0};
        for (int c = 0; c < 4; ++c) {
            const double sg = branch[c], p = parity[c];
            const double aw = safe_sqrt(1.0 - p * slot.vW), bw = safe_sqrt(1.0 + p * slot.vW);
            const double ad = safe_sqrt(1.0 + sg * p * slot.vD);
            const double bd = safe_sqrt(1.0 - sg * p * slot.vD);
            slot.vectors(0, c) = 0.5 * aw * ad;
            slot.vectors(1, c) = -0.5 * p * eip * bw * ad;
            slot.vectors(2, c) = -0.5 * sg * aw * bd;
            slot.vectors(3, c) = 0.5 * sg * p * eip * bw * bd;
        }
    }
    for (int c = 0; c < s; ++c) fix_column_phase(slot.vectors, c);
    return slot;
}

SlotAction slot_action(const std::array<double, 3>& kappa, const WalkModel& model) {
    const BlochData b = weyl_bloch(model.dimension, kappa);
    SlotAction act;
    act.omega = std::acos(std::clamp(model.n() * b.u, -1.0, 1.0));
    act.sin_omega = bloch_sin_omega(b, model);
    act.nt = model.coin_dim() == 2 ? effective_2x2(b, model).nt : b.nt;
    return act;
}

void apply_hermitian_part(const SlotAction& act, const WalkModel& model,
                          const std::complex<double>* x, std::complex<double>* y) {
    const auto& nt = act.nt;
    const auto sigma_dot = [&nt](cplx a0, cplx a1, cplx& r0, cplx& r1) {
        r0 = nt[2] * a0 + cplx(nt[0], -nt[1]) * a1;
        r1 = cplx(nt[0], nt[1]) * a0 - nt[2] * a1;
    };
    if (model.coin_dim() == 2) {
        sigma_dot(x[0], x[1], y[0], y[1]);
        return;
    }
    const double n = model.n(), m = model.mass;
    cplx s0, s1, s2, s3;
    sigma_dot(x[0], x[1], s0, s1);
    sigma_dot(x[2], x[3], s2, s3);
    y[0] = n * s0 - m * x[2];
    y[1] = n * s1 - m * x[3];
    y[2] = -m * x[0] - n * s2;
    y[3] = -m * x[1] - n * s3;
}

TransitionSet transition_matrices(const WalkModel& model) {
    const int d = model.dimension;
    const int s = model.coin_dim();

    // U(kappa) is a trigonometric polynomial with per-axis frequencies in
    // {-1, 0, 1}, so sampling four equispaced phases per axis separates the
    // exponentials exactly: U_h = 4^{-d} sum_kappa exp(+i kappa.h) U(kappa).
    std::int64_t pts = 1;
    for (int i = 0; i < d; ++i) pts *= 4;
    std::vector<std::array<double, 3>> grid(pts);
    std::vector<Eigen::MatrixXcd> samples(pts);
    for (std::int64_t g = 0; g < pts; ++g) {
        std::array<double, 3> kappa{};
        std::int64_t rest = g;
        for (int i = d - 1; i >= 0; --i) {
            kappa[i] = (M_PI / 2.0) * static_cast<double>(rest % 4);
            rest /= 4;
        }
        grid[g] = kappa;
        samples[g] = walk_unitary(kappa, model);
    }

    TransitionSet set;
    set.model = model;
    std::int64_t candidates = 1;
    for (int i = 0; i < d; ++i) candidates *= 3;
    for (std::int64_t c = 0; c < candidates; ++c) {
        std::array<int, 3> h{};
        std::int64_t rest = c;
        for (int i = d - 1; i >= 0; --i) {
            h[i] = static_cast<int>(rest % 3) - 1;
            rest /= 3;
        }
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(s, s);
        for (std::int64_t g = 0; g < pts; ++g) {
            double phase = 0.0;
            for (int i = 0; i < d; ++i) phase += grid[g][i] * h[i];
            acc += cplx(std::cos(phase), std::sin(phase)) * samples[g];
        }
        acc /= static_cast<double>(pts);
        if (acc.cwiseAbs().maxCoeff() > 1e-13) {
            set.shifts.push_back(h);
            set.matrices.push_back(std::move(acc));
        }
    }
    return set;
}

Eigen::MatrixXcd reconstruct_unitary(const TransitionSet& set,
                                     const std::array<double, 3>& kappa) {
    const int s = set.model.coin_dim();
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(s, s);
    for (std::size_t i = 0; i < set.shifts.size(); ++i) {
        double phase = 0.0;
        for (int j = 0; j < set.model.dimension; ++j) phase += kappa[j] * set.shifts[i][j];
        acc += cplx(std::cos(-phase), std::sin(-phase)) * set.matrices[i];
    }
    return acc;
}

double shift_unitarity_residual(const TransitionSet& set) {
    if (set.matrices.empty()) return 1.0;
    const Eigen::Index s = set.matrices[0].rows();
    std::map<std::array<int, 3>, Eigen::MatrixXcd> sums;
    for (std::size_t i = 0; i < set.shifts.size(); ++i) {
        for (std::size_t j = 0; j < set.shifts.size(); ++j) {
            std::array<int, 3> delta{};
            for (int a = 0; a < 3; ++a) delta[a] = set.shifts[j][a] - set.shifts[i][a];
            auto it = sums.try_emplace(delta, Eigen::MatrixXcd::Zero(s, s)).first;
            it->second += set.matrices[i].adjoint() * set.matrices[j];
        }
    }
    double residual = 0.0;
    for (const auto& [delta, sum] : sums) {
        Eigen::MatrixXcd target = Eigen::MatrixXcd::Zero(s, s);
        if (delta == std::array<int, 3>{0, 0, 0}) target = Eigen::MatrixXcd::Identity(s, s);
        residual = std::max(residual, (sum - target).cwiseAbs().maxCoeff());
    }
    return residual;
}

}  // namespace qwalk
