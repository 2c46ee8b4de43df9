#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "piezocell/errors.hpp"

namespace piezocell {

// One perforation, removed from the material region of the periodic unit
// cell (0,1)^3. Shapes are evaluated periodically: a primitive sticking out
// across a face re-enters on the opposite side.
struct HolePrimitive {
    enum class Kind { Sphere, Cylinder, Box };
    Kind kind = Kind::Sphere;

    // Sphere: center[0..2], radius.
    // Cylinder: axis in {0,1,2}; center holds the two cross-axis coordinates
    //   (in the cyclic order of the remaining axes); radius.
    // Box: lo[0..2], hi[0..2] (axis-aligned, in cell coordinates).
    std::array<double, 3> center{0.5, 0.5, 0.5};
    double radius = 0.0;
    int axis = 2;
    std::array<double, 3> lo{0.0, 0.0, 0.0};
    std::array<double, 3> hi{0.0, 0.0, 0.0};

    static HolePrimitive sphere(std::array<double, 3> c, double r);
    static HolePrimitive cylinder(int axis, std::array<double, 2> c, double r);
    static HolePrimitive box(std::array<double, 3> lo, std::array<double, 3> hi);

    // True if the cell point y (each coordinate in [0,1)) lies inside the
    // primitive, taking the shortest periodic image.
    bool contains(const std::array<double, 3>& y) const;
};

// Voxelized periodic unit cell: resolution n >= 2, n^3 voxels, x-fastest
// ordering. mask[v] == 1 means material, 0 means void. Voxels are classified
// by their center point.
struct CellGeometry {
    int n = 0;
    std::vector<std::uint8_t> mask;
    double theta = 0.0;   // material volume fraction |Y*| (|Y| = 1)
    bool connected = false;

    std::size_t voxel_count() const { return mask.size(); }
    int index(int i, int j, int k) const { return (k * n + j) * n + i; }
    bool material(int i, int j, int k) const { return mask[index(i, j, k)] != 0; }
};

// Builds the voxel mask from hole primitives. Throws AllVoid if nothing is
// left; computes theta exactly as (#material voxels)/n^3 and runs the
// periodic connectivity check. A disconnected geometry is returned with
// connected == false (downstream assembly rejects it).
CellGeometry build_cell(int n, const std::vector<HolePrimitive>& holes);

// Builds directly from a mask (x-fastest, n^3 entries of 0/1).
CellGeometry build_cell_from_mask(int n, std::vector<std::uint8_t> mask);

// True if the material voxels form a single connected component under
// periodic 6-adjacency (faces wrap around the cell).
bool connectivity_check(const CellGeometry& g);

// Characteristic function of the material region at an arbitrary point:
// coordinates are reduced mod 1 and the containing voxel looked up.
bool chi_at(const CellGeometry& g, const std::array<double, 3>& y);

// True if some void voxel touches a face of the cell cube (relevant for the
// full-domain problem, where perforations must stay interior).
bool hole_touches_cell_boundary(const CellGeometry& g);

} // namespace piezocell
