#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace qwalk {

// Finite periodic sampling grids.
//
// Conventions:
//   - Cubic: sites are n with 0 <= n_i < N_i, stored row-major (last axis
//     fastest). Coordinates equal site positions.
//   - BCC: two interleaved cubic families over the same generating region
//     N_1 x N_2 x N_3; even sites sit at 2n, odd sites at 2n + (1,1,1).
//     Storage is the even family first (row-major in n), then the odd family.
//     The physical extent per axis is 2 N_i.
//   - Momentum slots mirror the site layout one-to-one. Cubic slot k carries
//     kappa_i = 2 pi (k_i - p_i) / N_i with p_i = floor(N_i / 2), so slot 0 is
//     kappa = -pi and slot p is kappa = 0. BCC slots carry the half ladder
//     kappa_i = pi (k_i - p_i) / N_i; the first block (paired with the "minus"
//     reduced sequence) is offset by pi (1,1,1) and wrapped back to [-pi, pi),
//     the second block is unshifted. The offset was fixed once by a
//     brute-force plane-wave scan (see tests) and is asserted there.
enum class GridKind { Cubic, Bcc };

struct GridSpec {
    GridKind kind = GridKind::Cubic;
    int dimension = 1;
    std::array<std::int64_t, 3> sizes{1, 1, 1};  // N_i; unused axes stay 1

    static GridSpec cubic(const std::vector<std::int64_t>& sizes);
    static GridSpec bcc(std::int64_t n1, std::int64_t n2, std::int64_t n3);

    bool operator==(const GridSpec&) const = default;

    // Number of sites of one cubic family, prod N_i.
    std::int64_t family_sites() const;
    // Total sites: prod N_i for cubic, twice that for BCC.
    std::int64_t site_count() const;
    std::int64_t slot_count() const { return site_count(); }
    // Physical length of the periodic cell along an axis: N_i or 2 N_i.
    std::int64_t extent(int axis) const;

    // Lattice coordinates of a storage index (BCC: actual 2n or 2n + t).
    std::array<std::int64_t, 3> site_coord(std::int64_t index) const;
    // Storage index of a coordinate; coordinates are wrapped periodically.
    // For BCC the (wrapped) coordinate must have all components of one parity.
    std::int64_t site_index(const std::array<std::int64_t, 3>& coord) const;

    // Wave-vector carried by a momentum slot, components in [-pi, pi).
    std::array<double, 3> wavevector(std::int64_t slot) const;
    // Slot whose wave-vector is closest to kappa (wrapped Euclidean metric).
    std::int64_t nearest_slot(const std::array<double, 3>& kappa) const;
};

}  // namespace qwalk
