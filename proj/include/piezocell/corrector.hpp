#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "piezocell/cellfem.hpp"
#include "piezocell/effective.hpp"
#include "piezocell/geometry.hpp"
#include "piezocell/macrodns.hpp"

namespace piezocell {

// Centroid values of the strain / potential gradient of all nine cell
// corrector fields on every cell voxel (zeros on void voxels). Precomputed
// once so the fine-scale reconstruction is a table lookup per point.
struct CorrectorTables {
    int n = 0;
    std::array<std::vector<Eigen::Matrix3d>, 9> strain;    // s_y per case
    std::array<std::vector<Eigen::Vector3d>, 9> grad_phi;  // grad_y per case

    static CorrectorTables build(const CellSolutionSet& cells);
};

// First-order two-scale reconstruction at one point: with macroscopic strain
// S = s_x(u0) and potential gradient g = grad_x(phi0), the fine-scale
// correction fields are
//   s_y(u1)      = sum_{m,h} S_mh s_y(w^{mh})  + sum_n g_n s_y(q^n)
//   grad_y(phi1) = sum_{m,h} S_mh grad(phi^{mh}) + sum_n g_n grad(psi^n)
// (ordered index pairs; the mixed corrector cases enter twice).
struct CorrectorPoint {
    Eigen::Matrix3d strain;
    Eigen::Vector3d grad_phi;
};
CorrectorPoint corrector_at(const CorrectorTables& tables,
                            const MacroGradients& macro, std::size_t cell_voxel);

// L2 distances (voxel-centroid quadrature over the material voxels of the
// fine grid) between the fine solution and its two-scale reconstruction:
//   strain_residual^2 = sum h^3 |s(u_eps) - s_x(u0) - s_y(u1)|_F^2
//   efield_residual^2 = sum h^3 |grad(phi_eps) - grad_x(phi0) - grad_y(phi1)|^2
// weak_gap is the relative two-norm gap between the volume average of the
// zero-extended fine displacement and theta times the macro average.
// Throws GridMismatch unless fine.N == m * cells.geometry.n.
struct CorrectorResiduals {
    double strain_residual = 0.0;
    double efield_residual = 0.0;
    double weak_gap = 0.0;
};
CorrectorResiduals corrector_residuals(const FieldSolution& fine,
                                       const FieldSolution& macro,
                                       const CellSolutionSet& cells, int m);

// Macro-grid policy of the sweep: one shared macro solve on the finest fine
// grid (default; keeps the macro discretization error fixed across epsilon),
// or one macro solve per epsilon on the matching grid.
enum class MacroPolicy { Finest, PerEps };

struct SweepPoint {
    int m = 0;
    double epsilon = 0.0;
    int macro_N = 0;
    CorrectorResiduals residuals;
    SolveStats dns_stats;
};

struct SweepReport {
    HomogenizationResult homogenization;
    MacroPolicy policy = MacroPolicy::Finest;
    std::vector<SweepPoint> points; // sorted by decreasing epsilon
    bool strain_decreasing = false;
    bool efield_decreasing = false;
    bool weak_gap_decreasing = false;
};

// Full epsilon-convergence study: homogenize once, then for each period
// count m in m_list solve the fine problem at resolution m * cell.n and
// measure the corrector residuals against the homogenized solution.
SweepReport epsilon_sweep(const CellGeometry& cell, const MaterialField& mat,
                          const Eigen::Vector3d& f,
                          const std::vector<int>& m_list, MacroPolicy policy,
                          const HomogenizeOptions& opts);

} // namespace piezocell
