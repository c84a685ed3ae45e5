#include "qwalk/observe.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qwalk/evolve.hpp"
#include "qwalk/util.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

namespace {

using cplx = std::complex<double>;

constexpr double kDegenerateTol = 1e-9;

Eigen::Matrix2cd sigma_dot(const std::array<double, 3>& v) {
    Eigen::Matrix2cd r;
    r << cplx(v[2], 0.0), cplx(v[0], -v[1]), cplx(v[0], v[1]), cplx(-v[2], 0.0);
    return r;
}

// The Bloch vector whose curvature drives the Zitterbewegung amplitude: the
// effective vector for the decoupled 1D walk, the massless one otherwise.
struct CurvatureVector {
    std::array<double, 3> e{};
    std::array<std::array<double, 3>, 3> de{};
};

CurvatureVector curvature_vector(const BlochData& b, const WalkModel& model) {
    CurvatureVector cv;
    if (model.coin_dim() == 2) {
        const double n = model.n();
        cv.e = {n * b.nt[0] - model.mass, n * b.nt[1], n * b.nt[2]};
        for (int j = 0; j < 3; ++j) {
            for (int c = 0; c < 3; ++c) cv.de[j][c] = n * b.dnt[j][c];
        }
    } else {
        cv.e = b.nt;
        cv.de = b.dnt;
    }
    return cv;
}

// Time-independent operator data of one wavevector, fixed coin dimension.
template <int S>
struct SlotOps {
    double omega = 0.0;
    double sw = 0.0;
    Eigen::Matrix<cplx, S, S> H;
    Eigen::Matrix<cplx, S, S> Mhat;
    std::array<Eigen::Matrix<cplx, S, S>, 3> V;
    std::array<Eigen::Matrix<cplx, S, S>, 3> A0;
    std::array<Eigen::Matrix<cplx, S, S>, 3> Vhat;
};

template <int S>
SlotOps<S> build_slot_ops(const std::array<double, 3>& kappa, const WalkModel& model) {
    const BlochData b = weyl_bloch(model.dimension, kappa);
    const double n = model.n();
    const double cw = n * b.u;
    const double sw = bloch_sin_omega(b, model);
    if (sw < kDegenerateTol) {
        throw DegenerateError("kinematic operators at a degenerate wavevector");
    }
    const double omega = std::acos(std::clamp(cw, -1.0, 1.0));

    SlotOps<S> ops;
    ops.omega = omega;
    ops.sw = sw;
    const Eigen::Matrix<cplx, S, S> M = hermitian_part(kappa, model);
    ops.Mhat = M / sw;
    ops.H = (omega / sw) * M;

    for (int j = 0; j < 3; ++j) {
        if (j >= model.dimension) {
            ops.V[j].setZero();
            ops.A0[j].setZero();
            ops.Vhat[j].setZero();
            continue;
        }
        Eigen::Matrix<cplx, S, S> Sj;
        if constexpr (S == 2) {
            const std::array<double, 3> dv{n * b.dnt[j][0], n * b.dnt[j][1], n * b.dnt[j][2]};
            Sj = sigma_dot(dv);
        } else {
            const Eigen::Matrix2cd sd = sigma_dot(b.dnt[j]);
            Sj.setZero();
            Sj.template block<2, 2>(0, 0) = n * sd;
            Sj.template block<2, 2>(2, 2) = -n * sd;
        }
        const double vj = -n * b.du[j] / sw;
        ops.V[j] = ((sw - omega * cw) / (omega * sw)) * vj * ops.H + (omega / sw) * Sj;
        ops.A0[j] = cplx(0.0, 1.0) * (ops.H * ops.V[j] - ops.V[j] * ops.H);
        ops.Vhat[j] = ops.V[j] - cplx(0.0, -0.5) * (ops.H * ops.A0[j]) / (omega * omega);
    }
    return ops;
}

void require_position(const FieldState& state, const char* who) {
    if (state.domain != Domain::Position) {
        throw std::invalid_argument(std::string(who) + " expects a position-domain state");
    }
}

struct Moments {
    std::array<double, 3> mean{};
    std::array<double, 3> spread{};
    bool warning = false;
};

Moments position_moments(const FieldState& state) {
    require_position(state, "position moments");
    const GridSpec& grid = state.grid;
    const int d = grid.dimension;
    const int s = state.model.coin_dim();
    const std::int64_t sites = grid.site_count();

    Eigen::VectorXd prob(sites);
    std::array<cplx, 3> circ{};
    double total = 0.0;
    for (std::int64_t site = 0; site < sites; ++site) {
        double p = 0.0;
        for (int c = 0; c < s; ++c) p += std::norm(state.amps[site * s + c]);
        prob[site] = p;
        total += p;
        const auto coord = grid.site_coord(site);
        for (int i = 0; i < d; ++i) {
            const double theta = 2.0 * M_PI * static_cast<double>(coord[i]) / grid.extent(i);
            circ[i] += p * std::exp(cplx(0.0, theta));
        }
    }

    std::array<double, 3> centre{};
    for (int i = 0; i < d; ++i) {
        const double L = grid.extent(i);
        if (std::abs(circ[i]) < 1e-12) {
            centre[i] = state.origin[i];
        } else {
            double c = std::arg(circ[i]) * L / (2.0 * M_PI);
            if (c < 0.0) c += L;
            centre[i] = c;
        }
    }

    std::array<double, 3> m1{};
    std::array<double, 3> m2{};
    std::array<double, 3> far{};
    for (std::int64_t site = 0; site < sites; ++site) {
        const double p = prob[site];
        if (p == 0.0) continue;
        const auto coord = grid.site_coord(site);
        for (int i = 0; i < d; ++i) {
            const double L = grid.extent(i);
            const double delta = wrap_delta(static_cast<double>(coord[i]), centre[i], L);
            m1[i] += p * delta;
            m2[i] += p * delta * delta;
            if (std::abs(delta) > 0.4 * L) far[i] += p;
        }
    }

    Moments out;
    for (int i = 0; i < d; ++i) {
        const double L = grid.extent(i);
        const double raw = centre[i] + m1[i];
        out.mean[i] = state.origin[i] + wrap_delta(raw, state.origin[i], L);
        out.spread[i] = std::sqrt(std::max(0.0, m2[i] - m1[i] * m1[i]));
        if (total > 0.0 && far[i] > 0.2 * total) out.warning = true;
    }
    return out;
}

// Precomputed decomposition data: branch components, their static moments,
// and the per-slot oscillation coefficients of the interference term.
class DecompEngine {
  public:
    explicit DecompEngine(const FieldState& state);

    MeanPositionDecomposition eval(double t) const;
    const FieldState& momentum() const { return mom_; }
    double degenerate_mass() const { return degenerate_mass_; }

  private:
    template <int S>
    void build();

    FieldState mom_;
    int d_ = 0;
    std::array<double, 3> x0_plus_{}, x0_minus_{}, v_plus_{}, v_minus_{};
    std::array<cplx, 3> cross_{}, z0_{};
    std::vector<double> omegas_;
    std::vector<std::array<cplx, 3>> s0_, s1_;
    double degenerate_mass_ = 0.0;
};

DecompEngine::DecompEngine(const FieldState& state) : mom_(to_momentum(state)) {
    if (state.model.family != WalkFamily::Dirac) {
        throw std::invalid_argument("mean position decomposition is defined for the Dirac models");
    }
    d_ = state.grid.dimension;
    if (state.model.coin_dim() == 2) {
        build<2>();
    } else {
        build<4>();
    }
}

template <int S>
void DecompEngine::build() {
    const GridSpec& grid = mom_.grid;
    const WalkModel& model = mom_.model;
    const std::int64_t slots = grid.slot_count();

    FieldState plus = mom_;
    FieldState minus = mom_;
    plus.amps.setZero();
    minus.amps.setZero();

    for (std::int64_t slot = 0; slot < slots; ++slot) {
        const Eigen::Matrix<cplx, S, 1> a = mom_.amps.segment<S>(slot * S);
        if (a.squaredNorm() == 0.0) continue;
        const auto kappa = grid.wavevector(slot);
        const SlotAction act = slot_action(kappa, model);

        if (act.sin_omega < kDegenerateTol) {
            // Split by the fallback eigenbasis; no operator contributions.
            const SpectrumSlot ev = eigensystem(kappa, model);
            const Eigen::Matrix<cplx, S, 1> chi = ev.vectors.adjoint() * a;
            plus.amps.segment<S>(slot * S) =
                ev.vectors.leftCols(S / 2) * chi.template head<S / 2>();
            minus.amps.segment<S>(slot * S) =
                ev.vectors.rightCols(S / 2) * chi.template tail<S / 2>();
            degenerate_mass_ += a.squaredNorm();
            continue;
        }

        const SlotOps<S> ops = build_slot_ops<S>(kappa, model);
        const Eigen::Matrix<cplx, S, 1> ma = ops.Mhat * a;
        const Eigen::Matrix<cplx, S, 1> ap = 0.5 * (a + ma);
        const Eigen::Matrix<cplx, S, 1> am = 0.5 * (a - ma);
        plus.amps.segment<S>(slot * S) = ap;
        minus.amps.segment<S>(slot * S) = am;

        std::array<cplx, 3> s0{}, s1{};
        const double wz = -0.25 / (ops.omega * ops.omega);
        for (int j = 0; j < d_; ++j) {
            v_plus_[j] += std::real(ap.dot(ops.Vhat[j] * ap));
            v_minus_[j] += std::real(am.dot(ops.Vhat[j] * am));
            const Eigen::Matrix<cplx, S, 1> aam = ops.A0[j] * am;
            s0[j] = ap.dot(aam);
            s1[j] = ap.dot(ops.Mhat * aam);
            z0_[j] += wz * s0[j];
        }
        omegas_.push_back(ops.omega);
        s0_.push_back(s0);
        s1_.push_back(s1);
    }

    const FieldState plus_pos = to_position(plus);
    const FieldState minus_pos = to_position(minus);
    const std::int64_t sites = grid.site_count();
    for (std::int64_t site = 0; site < sites; ++site) {
        const auto coord = grid.site_coord(site);
        double pp = 0.0, pm = 0.0;
        cplx cx = 0.0;
        for (int c = 0; c < S; ++c) {
            const cplx vplus = plus_pos.amps[site * S + c];
            const cplx vminus = minus_pos.amps[site * S + c];
            pp += std::norm(vplus);
            pm += std::norm(vminus);
            cx += std::conj(vplus) * vminus;
        }
        for (int j = 0; j < d_; ++j) {
            const double L = grid.extent(j);
            const double x = mom_.origin[j] +
                             wrap_delta(static_cast<double>(coord[j]), mom_.origin[j], L);
            x0_plus_[j] += x * pp;
            x0_minus_[j] += x * pm;
            cross_[j] += x * cx;
        }
    }
}

MeanPositionDecomposition DecompEngine::eval(double t) const {
    MeanPositionDecomposition out;
    out.degenerate_mass = degenerate_mass_;
    std::array<cplx, 3> acc{};
    for (int j = 0; j < d_; ++j) {
        out.plus[j] = x0_plus_[j] + t * v_plus_[j];
        out.minus[j] = x0_minus_[j] + t * v_minus_[j];
        acc[j] = cross_[j] - z0_[j];
    }
    for (std::size_t i = 0; i < omegas_.size(); ++i) {
        const double c2 = std::cos(2.0 * omegas_[i] * t);
        const double s2 = std::sin(2.0 * omegas_[i] * t);
        const double wz = -0.25 / (omegas_[i] * omegas_[i]);
        for (int j = 0; j < d_; ++j) {
            acc[j] += wz * (c2 * s0_[i][j] + cplx(0.0, s2) * s1_[i][j]);
        }
    }
    for (int j = 0; j < d_; ++j) out.interference[j] = 2.0 * std::real(acc[j]);
    return out;
}

}  // namespace

Eigen::VectorXd probability_distribution(const FieldState& state) {
    require_position(state, "probability_distribution");
    const int s = state.model.coin_dim();
    const std::int64_t sites = state.grid.site_count();
    Eigen::VectorXd prob(sites);
    for (std::int64_t site = 0; site < sites; ++site) {
        double p = 0.0;
        for (int c = 0; c < s; ++c) p += std::norm(state.amps[site * s + c]);
        prob[site] = p;
    }
    return prob;
}

Eigen::VectorXd marginal(const Eigen::VectorXd& dist, const GridSpec& grid,
                         const std::vector<int>& axes) {
    if (dist.size() != grid.site_count()) {
        throw std::invalid_argument("marginal: distribution size does not match the grid");
    }
    if (axes.empty()) throw std::invalid_argument("marginal: no axes kept");
    for (std::size_t r = 0; r < axes.size(); ++r) {
        if (axes[r] < 0 || axes[r] >= grid.dimension) {
            throw std::invalid_argument("marginal: axis out of range");
        }
        for (std::size_t q = r + 1; q < axes.size(); ++q) {
            if (axes[q] == axes[r]) throw std::invalid_argument("marginal: duplicate axis");
        }
    }

    std::vector<std::int64_t> extents(axes.size());
    std::int64_t total = 1;
    for (std::size_t r = 0; r < axes.size(); ++r) {
        extents[r] = static_cast<std::int64_t>(grid.extent(axes[r]));
        total *= extents[r];
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(total);
    for (std::int64_t site = 0; site < dist.size(); ++site) {
        const auto coord = grid.site_coord(site);
        std::int64_t idx = 0;
        for (std::size_t r = 0; r < axes.size(); ++r) idx = idx * extents[r] + coord[axes[r]];
        out[idx] += dist[site];
    }
    return out;
}

MeanPosition mean_position(const FieldState& state) {
    const Moments m = position_moments(state);
    return MeanPosition{m.mean, m.warning};
}

std::array<double, 3> position_std(const FieldState& state) {
    return position_moments(state).spread;
}

PositionSeries position_series(const FieldState& state0, std::int64_t horizon,
                               std::int64_t stride) {
    if (horizon < 0 || stride < 1) {
        throw std::invalid_argument("position_series: horizon must be >= 0 and stride >= 1");
    }
    const FieldState mom = to_momentum(state0);
    const SpectralPropagator prop(state0.grid, state0.model);
    PositionSeries out;
    for (std::int64_t t = 0; t <= horizon; t += stride) {
        FieldState work = mom;
        prop.apply(work.amps, t);
        work.time += t;
        const Moments m = position_moments(to_position(work));
        out.times.push_back(mom.time + t);
        out.mean.push_back(m.mean);
        out.spread.push_back(m.spread);
        out.wrap_warnings.push_back(m.warning ? 1 : 0);
    }
    return out;
}

KinematicOperators kinematic_operators(const std::array<double, 3>& kappa,
                                       const WalkModel& model, double t) {
    if (model.family != WalkFamily::Dirac) {
        throw std::invalid_argument("kinematic operators are defined for the Dirac models");
    }
    KinematicOperators out;
    const auto fill = [&](auto ops) {
        constexpr int S = decltype(ops.H)::RowsAtCompileTime;
        out.omega = ops.omega;
        const double c2 = std::cos(2.0 * ops.omega * t);
        const double s2 = std::sin(2.0 * ops.omega * t);
        const Eigen::Matrix<cplx, S, S> e2iht =
            c2 * Eigen::Matrix<cplx, S, S>::Identity() + cplx(0.0, s2) * ops.Mhat;
        const double w2 = ops.omega * ops.omega;
        for (int j = 0; j < 3; ++j) {
            const Eigen::Matrix<cplx, S, S> at = e2iht * ops.A0[j];
            out.V[j] = ops.V[j];
            out.A[j] = at;
            out.Vhat[j] = ops.Vhat[j];
            out.Zv[j] = cplx(0.0, -0.5) * (ops.H * at) / w2;
            out.Zx[j] = -at / (4.0 * w2);
        }
    };
    if (model.coin_dim() == 2) {
        fill(build_slot_ops<2>(kappa, model));
    } else {
        fill(build_slot_ops<4>(kappa, model));
    }

    const BlochData b = weyl_bloch(model.dimension, kappa);
    const CurvatureVector cv = curvature_vector(b, model);
    for (int j = 0; j < 3; ++j) {
        out.f[j].setZero();
        if (j >= model.dimension) continue;
        for (int mu = 0; mu < 3; ++mu) {
            for (int nu = 0; nu < 3; ++nu) {
                out.f[j](mu, nu) = cv.e[nu] * cv.de[j][mu] - cv.e[mu] * cv.de[j][nu];
            }
        }
        const Eigen::Matrix3d& f = out.f[j];
        out.w[j][0] = cv.e[2] * f(0, 2) + cv.e[1] * f(0, 1);
        out.w[j][1] = -cv.e[0] * f(0, 1) + cv.e[2] * f(1, 2);
        out.w[j][2] = -cv.e[0] * f(0, 2) + cv.e[1] * f(1, 2);
    }
    return out;
}

MeanPositionDecomposition mean_position_decomposition(const FieldState& state, std::int64_t t) {
    const DecompEngine engine(state);
    return engine.eval(static_cast<double>(t));
}

DecompositionSeries decomposition_series(const FieldState& state0, std::int64_t horizon,
                                         std::int64_t stride) {
    if (horizon < 0 || stride < 1) {
        throw std::invalid_argument("decomposition_series: horizon must be >= 0 and stride >= 1");
    }
    const DecompEngine engine(state0);
    const SpectralPropagator prop(state0.grid, state0.model);
    DecompositionSeries out;
    out.degenerate_mass = engine.degenerate_mass();
    for (std::int64_t t = 0; t <= horizon; t += stride) {
        FieldState work = engine.momentum();
        prop.apply(work.amps, t);
        work.time += t;
        const Moments m = position_moments(to_position(work));
        const MeanPositionDecomposition dec = engine.eval(static_cast<double>(t));
        out.times.push_back(state0.time + t);
        out.mean.push_back(m.mean);
        out.spread.push_back(m.spread);
        out.plus.push_back(dec.plus);
        out.minus.push_back(dec.minus);
        out.interference.push_back(dec.interference);
        out.wrap_warnings.push_back(m.warning ? 1 : 0);
    }
    return out;
}

std::array<double, 3> newton_wigner_mean(const FieldState& state, std::int64_t t) {
    FieldState chi = to_momentum(state);
    const GridSpec& grid = chi.grid;
    const WalkModel& model = chi.model;
    const int s = model.coin_dim();
    const std::int64_t slots = grid.slot_count();
    const double tt = static_cast<double>(t);

    for (std::int64_t slot = 0; slot < slots; ++slot) {
        const SpectrumSlot ev = eigensystem(grid.wavevector(slot), model);
        Eigen::VectorXcd c = ev.vectors.adjoint() * chi.amps.segment(slot * s, s);
        for (int r = 0; r < s; ++r) {
            const double sign = (r < s / 2) ? 1.0 : -1.0;
            c[r] *= std::exp(cplx(0.0, -sign * ev.omega * tt));
        }
        chi.amps.segment(slot * s, s) = c;
    }
    chi.time += t;
    return position_moments(to_position(chi)).mean;
}

std::complex<double> commutator_expectation(const FieldState& state, int i, int j) {
    const int d = state.grid.dimension;
    if (i < 0 || i >= d || j < 0 || j >= d) {
        throw std::invalid_argument("commutator_expectation: axis out of range");
    }
    if (i != j) return cplx(0.0, 0.0);

    const FieldState mom = to_momentum(state);
    const GridSpec& grid = mom.grid;
    const int s = mom.model.coin_dim();
    const std::int64_t slots = grid.slot_count();

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::int64_t slot = 0; slot < slots; ++slot) {
        const double k = grid.wavevector(slot)[i];
        lo = std::min(lo, k);
        hi = std::max(hi, k);
    }

    double mass_lo = 0.0, mass_hi = 0.0;
    for (std::int64_t slot = 0; slot < slots; ++slot) {
        const double k = grid.wavevector(slot)[i];
        const bool at_lo = std::abs(k - lo) < 1e-12;
        const bool at_hi = std::abs(k - hi) < 1e-12;
        if (!at_lo && !at_hi) continue;
        double p = 0.0;
        for (int c = 0; c < s; ++c) p += std::norm(mom.amps[slot * s + c]);
        if (at_lo) mass_lo += p;
        if (at_hi) mass_hi += p;
    }

    const double b = 0.5 * grid.extent(i) * (mass_lo + mass_hi);
    return cplx(0.0, 1.0 - b);
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("linear_fit: need two or more matched samples");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
    }
    LinearFit fit;
    fit.slope = (sxx > 0.0) ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    for (std::size_t k = 0; k < x.size(); ++k) {
        fit.max_abs_residual =
            std::max(fit.max_abs_residual, std::abs(y[k] - fit.intercept - fit.slope * x[k]));
    }
    return fit;
}

SpectralPeak dominant_frequency(const std::vector<double>& values, double dt) {
    const std::size_t n = values.size();
    if (n < 4) throw std::invalid_argument("dominant_frequency: series too short");
    if (dt <= 0.0) throw std::invalid_argument("dominant_frequency: dt must be positive");

    std::vector<double> idx(n);
    for (std::size_t k = 0; k < n; ++k) idx[k] = static_cast<double>(k);
    const LinearFit fit = linear_fit(idx, values);
    std::vector<double> resid(n);
    for (std::size_t k = 0; k < n; ++k) {
        resid[k] = values[k] - fit.intercept - fit.slope * idx[k];
    }

    const std::size_t kmax = n / 2;
    std::vector<double> mag(kmax + 1, 0.0);
    for (std::size_t k = 1; k <= kmax; ++k) {
        cplx sum = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            const double angle = -2.0 * M_PI * static_cast<double>(k) * static_cast<double>(m) /
                                 static_cast<double>(n);
            sum += resid[m] * std::exp(cplx(0.0, angle));
        }
        mag[k] = std::abs(sum);
    }

    std::size_t peak = 1;
    for (std::size_t k = 2; k <= kmax; ++k) {
        if (mag[k] > mag[peak]) peak = k;
    }

    double refined = static_cast<double>(peak);
    if (peak > 1 && peak < kmax) {
        const double a = mag[peak - 1], b = mag[peak], c = mag[peak + 1];
        const double denom = a - 2.0 * b + c;
        if (std::abs(denom) > 1e-300) {
            const double delta = 0.5 * (a - c) / denom;
            if (std::abs(delta) <= 0.5) refined += delta;
        }
    }

    SpectralPeak out;
    out.angular_frequency = 2.0 * M_PI * refined / (static_cast<double>(n) * dt);
    out.amplitude = 2.0 * mag[peak] / static_cast<double>(n);
    return out;
}

}  // namespace qwalk
