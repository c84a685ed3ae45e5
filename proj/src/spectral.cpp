#include "qwalk/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace qwalk {

namespace {

using cplx = std::complex<double>;

// The FFTW planner is not thread-safe; execution on distinct plans is.
std::mutex g_planner_mutex;

void run_fft(const GridSpec& grid, Eigen::VectorXcd& buf, int sign) {
    int dims[3];
    for (int i = 0; i < grid.dimension; ++i) dims[i] = static_cast<int>(grid.sizes[i]);
    fftw_complex* data = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(g_planner_mutex);
        // FFTW_ESTIMATE keeps planning deterministic and leaves the input
        // buffer untouched; these sizes gain little from measured plans.
        plan = fftw_plan_dft(grid.dimension, dims, data, data, sign, FFTW_ESTIMATE);
    }
    if (plan == nullptr) throw std::runtime_error("fftw_plan_dft failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(g_planner_mutex);
        fftw_destroy_plan(plan);
    }
}

// Per-axis modulation exp(sign * 2 pi i p_i n_i / N_i) collapsing the centred
// ladder onto FFTW's 0-based one.
std::vector<Eigen::VectorXcd> centre_phases(const GridSpec& grid, int sign) {
    std::vector<Eigen::VectorXcd> ph(grid.dimension);
    for (int i = 0; i < grid.dimension; ++i) {
        const std::int64_t n = grid.sizes[i];
        const double p = static_cast<double>(n / 2);
        ph[i].resize(n);
        for (std::int64_t j = 0; j < n; ++j) {
            const double a = sign * 2.0 * M_PI * p * static_cast<double>(j) / static_cast<double>(n);
            ph[i][j] = cplx(std::cos(a), std::sin(a));
        }
    }
    return ph;
}

void apply_phases(const GridSpec& grid, const std::vector<Eigen::VectorXcd>& ph,
                  Eigen::VectorXcd& buf) {
    const std::int64_t total = grid.family_sites();
    for (std::int64_t idx = 0; idx < total; ++idx) {
        std::int64_t m = idx;
        cplx w = 1.0;
        for (int i = grid.dimension - 1; i >= 0; --i) {
            w *= ph[i][m % grid.sizes[i]];
            m /= grid.sizes[i];
        }
        buf[idx] *= w;
    }
}

void check_cubic(const GridSpec& grid, const Eigen::VectorXcd& f, const char* op) {
    if (grid.kind != GridKind::Cubic)
        throw std::invalid_argument(std::string(op) + " requires a cubic grid");
    if (f.size() != grid.site_count())
        throw std::invalid_argument(std::string(op) + ": field size does not match grid");
}

// Rectangular transform over the generating region of a BCC grid.
GridSpec generating_region(const GridSpec& grid) {
    return GridSpec::cubic({grid.sizes[0], grid.sizes[1], grid.sizes[2]});
}

// Family phase a(k) = exp(-i kappa(k).t) on the plain ladder, in slot order.
Eigen::VectorXcd family_phase(const GridSpec& grid) {
    const std::int64_t n = grid.family_sites();
    Eigen::VectorXcd a(n);
    for (std::int64_t idx = 0; idx < n; ++idx) {
        std::int64_t m = idx;
        double angle = 0.0;
        for (int i = 2; i >= 0; --i) {
            const std::int64_t k = m % grid.sizes[i];
            m /= grid.sizes[i];
            const double p = static_cast<double>(grid.sizes[i] / 2);
            angle -= M_PI * (static_cast<double>(k) - p) / static_cast<double>(grid.sizes[i]);
        }
        a[idx] = cplx(std::cos(angle), std::sin(angle));
    }
    return a;
}

}  // namespace

Eigen::VectorXcd dft_rect(const GridSpec& grid, const Eigen::VectorXcd& f) {
    check_cubic(grid, f, "dft_rect");
    Eigen::VectorXcd buf = f;
    const auto ph = centre_phases(grid, +1);
    apply_phases(grid, ph, buf);
    run_fft(grid, buf, FFTW_FORWARD);
    buf *= 1.0 / std::sqrt(static_cast<double>(grid.site_count()));
    return buf;
}

Eigen::VectorXcd idft_rect(const GridSpec& grid, const Eigen::VectorXcd& fhat) {
    check_cubic(grid, fhat, "idft_rect");
    Eigen::VectorXcd buf = fhat;
    run_fft(grid, buf, FFTW_BACKWARD);
    const auto ph = centre_phases(grid, -1);
    apply_phases(grid, ph, buf);
    buf *= 1.0 / std::sqrt(static_cast<double>(grid.site_count()));
    return buf;
}

std::pair<Eigen::VectorXcd, Eigen::VectorXcd> bcc_dft(const GridSpec& grid,
                                                      const Eigen::VectorXcd& f) {
    if (grid.kind != GridKind::Bcc) throw std::invalid_argument("bcc_dft requires a BCC grid");
    if (f.size() != grid.site_count())
        throw std::invalid_argument("bcc_dft: field size does not match grid");
    const GridSpec region = generating_region(grid);
    const std::int64_t n = grid.family_sites();
    const Eigen::VectorXcd g0 = dft_rect(region, f.head(n));
    const Eigen::VectorXcd g1 = dft_rect(region, f.tail(n));
    const Eigen::VectorXcd a = family_phase(grid);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Eigen::VectorXcd fhat0 = (g0 - a.cwiseProduct(g1)) * inv_sqrt2;
    Eigen::VectorXcd fhat1 = (g0 + a.cwiseProduct(g1)) * inv_sqrt2;
    return {std::move(fhat0), std::move(fhat1)};
}

Eigen::VectorXcd bcc_idft(const GridSpec& grid, const Eigen::VectorXcd& fhat0,
                          const Eigen::VectorXcd& fhat1) {
    if (grid.kind != GridKind::Bcc) throw std::invalid_argument("bcc_idft requires a BCC grid");
    const std::int64_t n = grid.family_sites();
    if (fhat0.size() != n || fhat1.size() != n)
        throw std::invalid_argument("bcc_idft: sequence sizes do not match grid");
    const GridSpec region = generating_region(grid);
    const Eigen::VectorXcd a = family_phase(grid);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Eigen::VectorXcd f(2 * n);
    f.head(n) = idft_rect(region, (fhat0 + fhat1) * inv_sqrt2);
    f.tail(n) = idft_rect(region, a.conjugate().cwiseProduct(fhat1 - fhat0) * inv_sqrt2);
    return f;
}

Eigen::VectorXcd grid_dft(const GridSpec& grid, const Eigen::VectorXcd& f) {
    if (grid.kind == GridKind::Cubic) return dft_rect(grid, f);
    auto [h0, h1] = bcc_dft(grid, f);
    Eigen::VectorXcd out(grid.slot_count());
    out.head(h0.size()) = h0;
    out.tail(h1.size()) = h1;
    return out;
}

Eigen::VectorXcd grid_idft(const GridSpec& grid, const Eigen::VectorXcd& fhat) {
    if (grid.kind == GridKind::Cubic) return idft_rect(grid, fhat);
    const std::int64_t n = grid.family_sites();
    if (fhat.size() != 2 * n)
        throw std::invalid_argument("grid_idft: field size does not match grid");
    return bcc_idft(grid, fhat.head(n), fhat.tail(n));
}

}  // namespace qwalk
