#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <piezocell/errors.hpp>
#include <piezocell/geometry.hpp>

#include "fixtures.hpp"

using namespace piezocell;

TEST_CASE("full cell: theta is exactly one and everything is connected") {
    CellGeometry g = build_cell(4, {});
    CHECK(g.n == 4);
    CHECK(g.theta == 1.0);
    CHECK(g.connected);
    CHECK_FALSE(hole_touches_cell_boundary(g));
    for (auto v : g.mask) CHECK(v == 1);
}

TEST_CASE("resolution below two is rejected") {
    CHECK_THROWS_AS(build_cell(1, {}), ConfigError);
    CHECK_THROWS_AS(build_cell(0, {}), ConfigError);
}

TEST_CASE("centered sphere r=0.25 at n=8: exact voxel count") {
    CellGeometry g = pzt::sphere_cell(8);
    // Voxel centers live at (2i+1)/16; the center offsets are odd/16, so the
    // sphere contains centers with a^2+b^2+c^2 <= 16 over odd a,b,c:
    // (1,1,1) gives 8 voxels, (1,1,3) gives 24 - 32 voids total.
    std::size_t voids = 0;
    for (auto v : g.mask) voids += v ? 0 : 1;
    CHECK(voids == 32);
    CHECK(g.theta == doctest::Approx(1.0 - 32.0 / 512.0).epsilon(1e-15));
    CHECK(g.connected);
    CHECK_FALSE(hole_touches_cell_boundary(g));
}

TEST_CASE("sphere mask agrees with direct center classification") {
    const int n = 7; // non-power-of-two resolution
    CellGeometry g = pzt::sphere_cell(n, 0.3);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double dx = (i + 0.5) / n - 0.5;
                const double dy = (j + 0.5) / n - 0.5;
                const double dz = (k + 0.5) / n - 0.5;
                const bool inside = dx * dx + dy * dy + dz * dz <= 0.3 * 0.3;
                CHECK(g.material(i, j, k) == !inside);
            }
}

TEST_CASE("corner sphere wraps periodically across all eight corners") {
    const int n = 8;
    CellGeometry g = build_cell(n, {HolePrimitive::sphere({0, 0, 0}, 0.2)});
    // The corner voxel is void in every corner of the cube.
    CHECK_FALSE(g.material(0, 0, 0));
    CHECK_FALSE(g.material(n - 1, 0, 0));
    CHECK_FALSE(g.material(0, n - 1, 0));
    CHECK_FALSE(g.material(n - 1, n - 1, n - 1));
    CHECK(g.material(n / 2, n / 2, n / 2));
    CHECK(g.connected);
    CHECK(hole_touches_cell_boundary(g));
}

TEST_CASE("cylinder hole is translation invariant along its axis") {
    const int n = 8;
    CellGeometry g =
        build_cell(n, {HolePrimitive::cylinder(2, {0.5, 0.5}, 0.2)});
    for (int k = 1; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                CHECK(g.material(i, j, k) == g.material(i, j, 0));
    CHECK(g.theta < 1.0);
    CHECK(hole_touches_cell_boundary(g)); // the tube pierces the k-faces
}

TEST_CASE("box hole removes the exact center block") {
    const int n = 8;
    CellGeometry g = build_cell(
        n, {HolePrimitive::box({0.25, 0.25, 0.25}, {0.75, 0.75, 0.75})});
    std::size_t voids = 0;
    for (auto v : g.mask) voids += v ? 0 : 1;
    CHECK(voids == 64); // 4^3 voxel centers inside at n=8
    CHECK(g.theta == doctest::Approx(1.0 - 64.0 / 512.0).epsilon(1e-15));
}

TEST_CASE("removing everything is rejected") {
    CHECK_THROWS_AS(build_cell(4, {HolePrimitive::box({0, 0, 0}, {1, 1, 1})}),
                    AllVoid);
}

TEST_CASE("mask import validates the length and normalizes values") {
    std::vector<std::uint8_t> mask(27, 2); // any nonzero counts as material
    CellGeometry g = build_cell_from_mask(3, mask);
    CHECK(g.theta == 1.0);
    for (auto v : g.mask) CHECK(v == 1);
    CHECK_THROWS_AS(build_cell_from_mask(4, mask), ShapeMismatch);
}

TEST_CASE("periodic wrap connects opposite faces") {
    // Two material voxels at (0,0,0) and (n-1,0,0) are periodic neighbors.
    const int n = 4;
    std::vector<std::uint8_t> mask(n * n * n, 0);
    mask[0] = 1;
    mask[n - 1] = 1;
    CellGeometry g = build_cell_from_mask(n, mask);
    CHECK(g.connected);
}

TEST_CASE("separated voxels are reported disconnected") {
    const int n = 4;
    std::vector<std::uint8_t> mask(n * n * n, 0);
    CellGeometry probe = build_cell(n, {}); // for index arithmetic only
    mask[probe.index(0, 0, 0)] = 1;
    mask[probe.index(2, 2, 2)] = 1;
    CellGeometry g = build_cell_from_mask(n, mask);
    CHECK_FALSE(g.connected);
}

TEST_CASE("chi reduces coordinates modulo one") {
    CellGeometry g = pzt::sphere_cell(8);
    CHECK_FALSE(chi_at(g, {0.5, 0.5, 0.5}));  // hole center
    CHECK(chi_at(g, {0.05, 0.05, 0.05}));     // material corner
    CHECK(chi_at(g, {1.05, -0.95, 2.05}));    // same point shifted by periods
    CHECK(chi_at(g, {0.05, 0.05, 0.05}) == chi_at(g, {1.05, 1.05, 1.05}));
}

TEST_CASE("primitive containment handles the shortest periodic image") {
    HolePrimitive s = HolePrimitive::sphere({0.95, 0.5, 0.5}, 0.1);
    CHECK(s.contains({0.03, 0.5, 0.5})); // wraps across the x face
    CHECK_FALSE(s.contains({0.2, 0.5, 0.5}));

    HolePrimitive b = HolePrimitive::box({0.9, 0.4, 0.4}, {1.1, 0.6, 0.6});
    CHECK(b.contains({0.05, 0.5, 0.5}));
    CHECK(b.contains({0.95, 0.5, 0.5}));
    CHECK_FALSE(b.contains({0.5, 0.5, 0.5}));
}
