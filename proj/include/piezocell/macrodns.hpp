#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "piezocell/cellfem.hpp"
#include "piezocell/effective.hpp"
#include "piezocell/geometry.hpp"
#include "piezocell/solver.hpp"

namespace piezocell {

// Dirichlet box grid on Omega = (0,1)^3: N voxels per axis, (N+1)^3 nodes
// (x fastest), homogeneous boundary conditions by dof elimination. Interior
// nodes touching at least one material voxel carry 4 dofs; void-only and
// boundary nodes carry none.
struct BoxGrid {
    int N = 0;
    std::vector<std::uint8_t> voxel_mask;   // N^3, 1 = material
    std::vector<std::int32_t> node_rank;    // (N+1)^3, -1 if no dofs
    std::vector<std::int32_t> active_nodes; // node lin ids with dofs
    std::int64_t n_active = 0;

    int nodes_per_axis() const { return N + 1; }
    int node_index(int i, int j, int k) const {
        return (k * (N + 1) + j) * (N + 1) + i;
    }
    std::size_t voxel_index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * N + j) * N + i;
    }
    std::array<int, 8> voxel_corners(int i, int j, int k) const;

    static BoxGrid build(int N, std::vector<std::uint8_t> mask);
};

struct MacroProblem {
    EffectiveTensors tensors; // used via symmetrized views
    double theta = 1.0;
    Eigen::Vector3d f = Eigen::Vector3d(0, 0, -1);
    int N = 16;
};

struct DnsProblem {
    CellGeometry cell;
    MaterialField material; // per cell voxel
    int m = 2;              // epsilon = 1/m
    Eigen::Vector3d f = Eigen::Vector3d(0, 0, -1);

    int grid_N() const { return m * cell.n; }
};

// Full nodal fields (zeros on boundary and void nodes), with solver and
// energy-balance diagnostics.
struct FieldSolution {
    int N = 0;
    std::vector<std::uint8_t> voxel_mask;
    Eigen::VectorXd u;   // 3 * (N+1)^3, components interleaved per node
    Eigen::VectorXd phi; // (N+1)^3
    SolveStats stats;
    double energy_lhs = 0.0; // A(u,u) + D(phi,phi)
    double energy_rhs = 0.0; // load . u

    double u_at(int node, int comp) const { return u[3 * node + comp]; }
};

// Assembled box system, exposed for the system-level equivalence tests.
struct BoxAssembly {
    BoxGrid grid;
    CsrMatrix K;
    Eigen::VectorXd rhs;
    std::vector<DofKind> kinds;
};

// mat is indexed by box voxel (use MaterialField::uniform for the macro
// path); load_scale multiplies the body force (the volume fraction theta for
// the homogenized problem).
BoxAssembly assemble_box_system(int N, std::vector<std::uint8_t> mask,
                                const MaterialField& mat,
                                const Eigen::Vector3d& f, double load_scale);

// Homogenized macroscopic problem with constitutive law
//   sigma_ij = cH_ijmh s_mh(u) + eH_nij d(phi)/dx_n
//   D_i      = -eH_imh s_mh(u) + dH_in d(phi)/dx_n
// and body load theta*f. Positivity certificates checked before the solve.
FieldSolution solve_macro(const MacroProblem& p, const SolveOptions& opts);

// Direct numerical simulation on the perforated domain: cell mask tiled m^3
// times, traction-free hole boundaries by omission of void elements.
// Throws HoleTouchesBoundary if a void voxel meets the cell boundary.
FieldSolution solve_dns(const DnsProblem& p, const SolveOptions& opts);

// Material field for the whole DNS box (tiled periodic phases); exposed for
// tests and the corrector harness.
MaterialField tile_material(const CellGeometry& cell, const MaterialField& mat,
                            int m);
std::vector<std::uint8_t> tile_mask(const CellGeometry& cell, int m);

// Strain / potential-gradient evaluation of a FieldSolution at an arbitrary
// point of (0,1)^3 (clamped to the closed cube), via trilinear interpolation
// inside the containing voxel.
struct MacroGradients {
    Eigen::Matrix3d strain;
    Eigen::Vector3d grad_phi;
};
MacroGradients field_gradients_at(const FieldSolution& s,
                                  const std::array<double, 3>& x);
Eigen::Vector3d field_value_at(const FieldSolution& s,
                               const std::array<double, 3>& x);

// Exact volume integrals of the trilinear nodal fields: over all voxels
// (full domain) or material voxels only (zero extension).
Eigen::Vector3d average_u(const FieldSolution& s, bool material_only);

} // namespace piezocell
