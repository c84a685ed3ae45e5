#include "qwalk/lattice.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qwalk/util.hpp"

namespace qwalk {

namespace {

std::int64_t wrap_coord(std::int64_t c, std::int64_t extent) {
    std::int64_t r = c % extent;
    return r < 0 ? r + extent : r;
}

void check_axis(const GridSpec& g, int axis) {
    if (axis < 0 || axis >= g.dimension)
        throw std::invalid_argument("axis " + std::to_string(axis) + " out of range");
}

}  // namespace

GridSpec GridSpec::cubic(const std::vector<std::int64_t>& sizes) {
    if (sizes.empty() || sizes.size() > 3)
        throw std::invalid_argument("cubic grid needs 1..3 sizes");
    GridSpec g;
    g.kind = GridKind::Cubic;
    g.dimension = static_cast<int>(sizes.size());
    for (int i = 0; i < g.dimension; ++i) {
        if (sizes[i] < 1) throw std::invalid_argument("grid sizes must be positive");
        g.sizes[i] = sizes[i];
    }
    return g;
}

GridSpec GridSpec::bcc(std::int64_t n1, std::int64_t n2, std::int64_t n3) {
    if (n1 < 1 || n2 < 1 || n3 < 1)
        throw std::invalid_argument("grid sizes must be positive");
    GridSpec g;
    g.kind = GridKind::Bcc;
    g.dimension = 3;
    g.sizes = {n1, n2, n3};
    return g;
}

std::int64_t GridSpec::family_sites() const {
    std::int64_t n = 1;
    for (int i = 0; i < dimension; ++i) n *= sizes[i];
    return n;
}

std::int64_t GridSpec::site_count() const {
    return kind == GridKind::Bcc ? 2 * family_sites() : family_sites();
}

std::int64_t GridSpec::extent(int axis) const {
    check_axis(*this, axis);
    return kind == GridKind::Bcc ? 2 * sizes[axis] : sizes[axis];
}

std::array<std::int64_t, 3> GridSpec::site_coord(std::int64_t index) const {
    if (index < 0 || index >= site_count())
        throw std::out_of_range("site index out of range");
    const std::int64_t fam = family_sites();
    const std::int64_t odd = (kind == GridKind::Bcc && index >= fam) ? 1 : 0;
    std::int64_t m = odd ? index - fam : index;
    std::array<std::int64_t, 3> c{0, 0, 0};
    for (int i = dimension - 1; i >= 0; --i) {
        c[i] = m % sizes[i];
        m /= sizes[i];
    }
    if (kind == GridKind::Bcc)
        for (int i = 0; i < 3; ++i) c[i] = 2 * c[i] + odd;
    return c;
}

std::int64_t GridSpec::site_index(const std::array<std::int64_t, 3>& coord) const {
    std::array<std::int64_t, 3> c{0, 0, 0};
    for (int i = 0; i < dimension; ++i) c[i] = wrap_coord(coord[i], extent(i));
    std::int64_t odd = 0;
    if (kind == GridKind::Bcc) {
        odd = c[0] & 1;
        for (int i = 0; i < 3; ++i) {
            if ((c[i] & 1) != odd)
                throw std::invalid_argument("BCC coordinate has mixed parity");
            c[i] = (c[i] - odd) / 2;
        }
    }
    std::int64_t idx = 0;
    for (int i = 0; i < dimension; ++i) idx = idx * sizes[i] + c[i];
    return idx + odd * family_sites();
}

std::array<double, 3> GridSpec::wavevector(std::int64_t slot) const {
    if (slot < 0 || slot >= slot_count())
        throw std::out_of_range("slot index out of range");
    const std::int64_t fam = family_sites();
    // Block 0 of a BCC grid holds the offset family; block 1 the plain ladder.
    const bool offset = (kind == GridKind::Bcc && slot < fam);
    std::int64_t m = (kind == GridKind::Bcc && slot >= fam) ? slot - fam : slot;
    std::array<std::int64_t, 3> k{0, 0, 0};
    for (int i = dimension - 1; i >= 0; --i) {
        k[i] = m % sizes[i];
        m /= sizes[i];
    }
    std::array<double, 3> kappa{0.0, 0.0, 0.0};
    for (int i = 0; i < dimension; ++i) {
        const double p = static_cast<double>(sizes[i] / 2);
        const double step = (kind == GridKind::Bcc ? M_PI : 2.0 * M_PI) / static_cast<double>(sizes[i]);
        double v = step * (static_cast<double>(k[i]) - p);
        if (offset) v = wrap_angle(v + M_PI);
        kappa[i] = v;
    }
    return kappa;
}

std::int64_t GridSpec::nearest_slot(const std::array<double, 3>& kappa) const {
    // Full scan; only used in state preparation, never in evolution loops.
    std::int64_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    const std::int64_t n = slot_count();
    for (std::int64_t s = 0; s < n; ++s) {
        const auto kv = wavevector(s);
        double d = 0.0;
        for (int i = 0; i < dimension; ++i) {
            const double delta = wrap_angle(kv[i] - kappa[i]);
            d += delta * delta;
        }
        if (d < best_d) {
            best_d = d;
            best = s;
        }
    }
    return best;
}

}  // namespace qwalk
