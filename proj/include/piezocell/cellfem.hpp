#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "piezocell/fem.hpp"
#include "piezocell/geometry.hpp"
#include "piezocell/solver.hpp"
#include "piezocell/sparse.hpp"
#include "piezocell/tensors.hpp"

namespace piezocell {

// Piecewise-constant material assignment over the cell voxels: a table of
// distinct phases plus a per-voxel index (empty index means phase 0
// everywhere). Continuous-in-y coefficients are represented by sampling at
// voxel centers before construction.
struct MaterialField {
    std::vector<MaterialTensors> table;
    std::vector<std::int32_t> voxel_index;

    static MaterialField uniform(MaterialTensors m) {
        MaterialField f;
        f.table.push_back(std::move(m));
        return f;
    }
    static MaterialField from_table(std::vector<MaterialTensors> table,
                                    std::vector<std::int32_t> index) {
        MaterialField f;
        f.table = std::move(table);
        f.voxel_index = std::move(index);
        return f;
    }

    int phase(std::size_t voxel) const {
        return voxel_index.empty() ? 0 : voxel_index[voxel];
    }
    const MaterialTensors& at(std::size_t voxel) const {
        return table[phase(voxel)];
    }
    // Throws ShapeMismatch unless the per-voxel index (when present) covers
    // exactly `voxels` entries with valid phase ids.
    void check_compatible(std::size_t voxels) const;

    MaterialField scaled(double s) const {
        MaterialField f = *this;
        for (auto& m : f.table) m = m.scaled(s);
        return f;
    }
};

// Node numbering of the periodic grid: node (i,j,k), 0 <= i,j,k < n, with
// periodic identification. Active nodes touch at least one material voxel and
// carry 4 dofs (u1,u2,u3,phi); void-only nodes carry none (discrete zero
// extension). Four Lagrange rows append the zero-mean constraints.
struct PeriodicGrid {
    int n = 0;
    std::vector<std::int32_t> node_rank; // n^3 entries, -1 for inactive
    std::vector<std::int32_t> active_nodes; // lin ids in increasing order
    std::int64_t n_active = 0;

    int node_index(int i, int j, int k) const {
        return (k * n + j) * n + i;
    }
    // The 8 corner node lin ids of voxel (i,j,k), periodic wrap, in local
    // corner order.
    std::array<int, 8> voxel_corners(int i, int j, int k) const;

    std::int64_t dof_count() const { return 4 * n_active + 4; }
    int dof(std::int32_t rank, int comp) const { return 4 * rank + comp; }
    int multiplier_dof(int comp) const {
        return static_cast<int>(4 * n_active) + comp;
    }

    static PeriodicGrid build(const CellGeometry& g);
};

// The nine constant driving cases of the cell problems, in a fixed order:
// six symmetric unit prestrains (Voigt order 11,22,33,23,13,12), then three
// unit electric field directions.
struct LoadCase {
    enum class Kind { Elastic, Electric };
    Kind kind;
    int m = 0, h = 0; // elastic: prestrain indices (m <= h)
    int n = 0;        // electric: field direction
    std::string name;

    static std::array<LoadCase, 9> all();
    static int elastic_case(int m, int h) { return voigt_index(m, h); }
    static int electric_case(int n) { return 6 + n; }
};

struct CellSystem {
    PeriodicGrid grid;
    CsrMatrix K;                      // symmetric indefinite, with constraints
    Eigen::MatrixXd rhs;              // dof_count x 9, one column per case
    std::vector<DofKind> dof_kinds;   // per dof
    double diagonal_scale = 0.0;      // max |diag|, probe reference
};

// Assembles the symmetrized block system [[A,B],[B^T,-D]] plus 4 zero-mean
// Lagrange rows over the material region, and the nine load columns.
// Throws DisconnectedGeometry, NonPositiveBlock, ShapeMismatch.
CellSystem assemble_cell_system(const CellGeometry& g, const MaterialField& mat);

// All nine corrector fields as full dof vectors (Lagrange entries included at
// the tail), plus the geometry/grid they live on.
struct CellSolutionSet {
    CellGeometry geometry;
    PeriodicGrid grid;
    std::array<Eigen::VectorXd, 9> x;
    std::array<SolveStats, 9> stats;
    std::array<double, 9> energy_lhs{};  // A(w,w) + D(phi,phi)
    std::array<double, 9> energy_rhs{};  // driving-term action on the solution

    // Displacement component of case `c` at an active node rank.
    double u(int c, std::int32_t rank, int comp) const {
        return x[c][4 * rank + comp];
    }
    double phi(int c, std::int32_t rank) const { return x[c][4 * rank + 3]; }
};

// Factors (or preconditions) once and runs the nine solves. Residual and
// zero-mean certificates enforced; throws SolverBreakdown / CertificateFailure.
CellSolutionSet solve_cell_problems(const CellGeometry& g,
                                    const MaterialField& mat,
                                    const CellSystem& system,
                                    const SolveOptions& opts);

// Convenience: assemble + solve.
CellSolutionSet solve_cell_problems(const CellGeometry& g,
                                    const MaterialField& mat,
                                    const SolveOptions& opts);

// Strain of the vector field and gradient of the scalar field of case `c`
// at a cell point (reduced mod 1). Throws VoidPoint inside holes.
struct CellPointGradients {
    Eigen::Matrix3d strain;    // s_y(w) or s_y(q)
    Eigen::Vector3d grad_phi;  // grad phi or grad psi
};
CellPointGradients field_gradient_at(const CellSolutionSet& sol, int c,
                                     const std::array<double, 3>& y);

// Gathers the 24 displacement dofs and 8 potential dofs of one voxel's
// corners for case `c` (zeros on inactive corners never occur for material
// voxels; void voxels are the caller's responsibility).
void gather_element_vectors(const CellSolutionSet& sol, int c,
                            const std::array<int, 8>& corners,
                            Eigen::Matrix<double, 24, 1>& ue,
                            Eigen::Matrix<double, 8, 1>& pe);

// Component means over active nodes (certificate helper).
std::array<double, 4> solution_means(const PeriodicGrid& grid,
                                     const Eigen::VectorXd& x);

} // namespace piezocell
