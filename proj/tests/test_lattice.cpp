#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "qwalk/lattice.hpp"

using qwalk::GridKind;
using qwalk::GridSpec;

TEST_CASE("lattice_site_counts_and_extents") {
    const GridSpec line = GridSpec::cubic({64});
    CHECK(line.dimension == 1);
    CHECK(line.site_count() == 64);
    CHECK(line.extent(0) == 64);

    const GridSpec plane = GridSpec::cubic({32, 32});
    CHECK(plane.site_count() == 1024);

    const GridSpec box = GridSpec::cubic({32, 32, 32});
    CHECK(box.site_count() == 32768);

    const GridSpec bcc = GridSpec::bcc(16, 16, 16);
    CHECK(bcc.family_sites() == 4096);
    CHECK(bcc.site_count() == 8192);
    CHECK(bcc.slot_count() == 8192);
    CHECK(bcc.extent(0) == 32);
    CHECK(bcc.extent(2) == 32);
}

TEST_CASE("lattice_cubic_row_major_layout") {
    const GridSpec g = GridSpec::cubic({3, 4});
    // Last axis fastest: index = n1 * 4 + n2.
    CHECK(g.site_coord(0) == std::array<std::int64_t, 3>{0, 0, 0});
    CHECK(g.site_coord(5) == std::array<std::int64_t, 3>{1, 1, 0});
    CHECK(g.site_coord(11) == std::array<std::int64_t, 3>{2, 3, 0});
    CHECK(g.site_index({2, 3, 0}) == 11);

    for (std::int64_t i = 0; i < g.site_count(); ++i) {
        CHECK(g.site_index(g.site_coord(i)) == i);
    }
}

TEST_CASE("lattice_cubic_periodic_wrapping") {
    const GridSpec g = GridSpec::cubic({4});
    CHECK(g.site_index({7, 0, 0}) == 3);
    CHECK(g.site_index({-1, 0, 0}) == 3);
    CHECK(g.site_index({-9, 0, 0}) == 3);
}

TEST_CASE("lattice_bcc_two_family_layout") {
    const GridSpec g = GridSpec::bcc(1, 1, 1);
    CHECK(g.site_count() == 2);
    CHECK(g.site_coord(0) == std::array<std::int64_t, 3>{0, 0, 0});
    CHECK(g.site_coord(1) == std::array<std::int64_t, 3>{1, 1, 1});

    const GridSpec g2 = GridSpec::bcc(2, 3, 4);
    // Even family first (row-major in the generating index), then odd.
    CHECK(g2.site_coord(0) == std::array<std::int64_t, 3>{0, 0, 0});
    CHECK(g2.site_coord(1) == std::array<std::int64_t, 3>{0, 0, 2});
    CHECK(g2.site_coord(g2.family_sites()) == std::array<std::int64_t, 3>{1, 1, 1});
    CHECK(g2.site_coord(g2.family_sites() + 1) == std::array<std::int64_t, 3>{1, 1, 3});

    std::set<std::array<std::int64_t, 3>> seen;
    for (std::int64_t i = 0; i < g2.site_count(); ++i) {
        const auto c = g2.site_coord(i);
        CHECK(seen.insert(c).second);
        CHECK((c[0] + c[1]) % 2 == 0);
        CHECK((c[0] + c[2]) % 2 == 0);
        CHECK(g2.site_index(c) == i);
    }

    // Wrapping happens on the physical extent 2 N_i.
    CHECK(g2.site_index({4, 6, 8}) == g2.site_index({0, 0, 0}));
    CHECK(g2.site_index({-3, 5, 7}) == g2.site_index({1, 5, 7}));
    CHECK_THROWS(g2.site_index({1, 0, 0}));
}

TEST_CASE("lattice_cubic_wavevectors") {
    const GridSpec g = GridSpec::cubic({4});
    // p = 2: slots carry -pi, -pi/2, 0, pi/2.
    CHECK(g.wavevector(0)[0] == doctest::Approx(-M_PI).epsilon(1e-15));
    CHECK(g.wavevector(1)[0] == doctest::Approx(-M_PI / 2).epsilon(1e-15));
    CHECK(g.wavevector(2)[0] == 0.0);
    CHECK(g.wavevector(3)[0] == doctest::Approx(M_PI / 2).epsilon(1e-15));

    const GridSpec odd = GridSpec::cubic({3});
    CHECK(odd.wavevector(0)[0] == doctest::Approx(-2 * M_PI / 3).epsilon(1e-15));
    CHECK(odd.wavevector(1)[0] == 0.0);
    CHECK(odd.wavevector(2)[0] == doctest::Approx(2 * M_PI / 3).epsilon(1e-15));

    const GridSpec g2 = GridSpec::cubic({4, 6});
    for (std::int64_t s = 0; s < g2.slot_count(); ++s) {
        const auto k = g2.wavevector(s);
        CHECK(k[0] >= -M_PI);
        CHECK(k[0] < M_PI);
        CHECK(k[1] >= -M_PI);
        CHECK(k[1] < M_PI);
    }
}

TEST_CASE("lattice_bcc_wavevectors") {
    const GridSpec g = GridSpec::bcc(2, 2, 2);
    const std::int64_t n = g.family_sites();

    // Second block carries the plain half ladder pi (k - p) / N.
    for (std::int64_t s = 0; s < n; ++s) {
        const auto kplain = g.wavevector(n + s);
        const auto koff = g.wavevector(s);
        for (int i = 0; i < 3; ++i) {
            CHECK(std::abs(kplain[i]) <= M_PI / 2 + 1e-12);
            // Offset block differs by pi per component, wrapped to [-pi, pi).
            double diff = std::remainder(koff[i] - kplain[i] - M_PI, 2 * M_PI);
            CHECK(std::abs(diff) < 1e-12);
            CHECK(koff[i] >= -M_PI);
            CHECK(koff[i] < M_PI);
        }
    }

    // The slot whose generating index equals p carries kappa = 0 in the plain
    // block and (-pi,-pi,-pi) in the offset block.
    const GridSpec c = GridSpec::cubic({2, 2, 2});
    const std::int64_t p_index = c.site_index({1, 1, 1});
    CHECK(g.wavevector(n + p_index)[0] == 0.0);
    CHECK(g.wavevector(p_index)[0] == doctest::Approx(-M_PI).epsilon(1e-15));
}

TEST_CASE("lattice_nearest_slot_round_trip") {
    for (const GridSpec& g : {GridSpec::cubic({5}), GridSpec::cubic({4, 6}),
                              GridSpec::bcc(2, 3, 2)}) {
        for (std::int64_t s = 0; s < g.slot_count(); ++s) {
            CHECK(g.nearest_slot(g.wavevector(s)) == s);
        }
    }

    const GridSpec g = GridSpec::cubic({8});
    const double step = 2 * M_PI / 8;
    const auto k3 = g.wavevector(3);
    CHECK(g.nearest_slot({k3[0] + 0.3 * step, 0, 0}) == 3);
    CHECK(g.nearest_slot({k3[0] + 0.7 * step, 0, 0}) == 4);
}

TEST_CASE("lattice_validation") {
    CHECK_THROWS(GridSpec::cubic({}));
    CHECK_THROWS(GridSpec::cubic({4, 4, 4, 4}));
    CHECK_THROWS(GridSpec::cubic({0}));
    CHECK_THROWS(GridSpec::bcc(2, 0, 2));
}
