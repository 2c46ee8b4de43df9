#pragma once

#include <array>

#include <Eigen/Dense>

#include "piezocell/cellfem.hpp"
#include "piezocell/geometry.hpp"
#include "piezocell/tensors.hpp"

namespace piezocell {

// Tensor contraction helpers shared by the coefficient integrals and the
// constitutive evaluations: (c:M)_ij, (e:M)_i, (e^T g)_ij, (d g)_i.
Eigen::Matrix3d apply_c(const ElasticTensor& c, const Eigen::Matrix3d& M);
Eigen::Vector3d contract_e(const PiezoTensor& e, const Eigen::Matrix3d& M);
Eigen::Matrix3d apply_e_gradient(const PiezoTensor& e, const Eigen::Vector3d& g);
Eigen::Vector3d apply_d(const DielectricTensor& d, const Eigen::Vector3d& g);

// Direct volume-integral formulas for the homogenized coefficients: the cell
// average over the material region of the total flux produced by each unit
// driving case (plain integral with |Y| = 1, no division by the volume
// fraction). Quadrature identical to assembly. Throws ShapeMismatch /
// GridMismatch on incompatible inputs.
EffectiveTensors effective_cH_eH_fH_dH(const CellSolutionSet& cells,
                                       const MaterialField& mat,
                                       const CellGeometry& g);

// Individual accessors with the same contract (each recomputes from the
// shared single-pass integral).
std::array<double, 81> effective_cH(const CellSolutionSet& cells,
                                    const MaterialField& mat,
                                    const CellGeometry& g);
std::array<double, 27> effective_eH(const CellSolutionSet& cells,
                                    const MaterialField& mat,
                                    const CellGeometry& g);
std::array<double, 27> effective_fH(const CellSolutionSet& cells,
                                    const MaterialField& mat,
                                    const CellGeometry& g);
std::array<double, 9> effective_dH(const CellSolutionSet& cells,
                                   const MaterialField& mat,
                                   const CellGeometry& g);

// Independent symmetric energy reformulations (no extra solves, evaluation
// only):
//   cH_energy(I,J) = int_{Y*} c (tau^I + s(w^I)) : (tau^J + s(w^J))
//                  + int_{Y*} d grad(phi^I) . grad(phi^J)
//   dH_energy(i,n) = int_{Y*} d (delta_i + grad psi^i) . (delta_n + grad psi^n)
//                  + int_{Y*} c s(q^i) : s(q^n)
// Both agree with the direct formulas up to solver residual.
struct EnergyForms {
    Matrix6d cH;          // Voigt-pair slots
    Eigen::Matrix3d dH;
};
EnergyForms energy_forms(const CellSolutionSet& cells, const MaterialField& mat,
                         const CellGeometry& g);

struct CrossCheck {
    double cH_direct_vs_energy_defect = 0.0;
    double dH_direct_vs_energy_defect = 0.0;
};

struct HomogenizeOptions {
    SolveOptions solve;
    double certificate_tol = 1e-8;  // structural identity threshold
    bool enforce_certificates = true;
    double alpha_c = 0.0;           // material ellipticity thresholds used
    double alpha_d = 0.0;           // for the recorded certificate only
};

struct HomogenizationResult {
    EffectiveTensors tensors;
    EffectiveDiagnostics diagnostics;
    EnergyForms energy;
    CrossCheck cross_check;
    double theta = 0.0;
    int resolution = 0;
    MaterialCertificate material_certificate;
    std::array<SolveStats, 9> solver_stats;
    std::array<double, 9> worst_mean_defect{}; // zero-mean certificate values
};

// Full pipeline: assemble, nine solves, coefficient integrals, energy-form
// cross-checks, structural-identity certificates. With
// enforce_certificates, throws CertificateFailure if any defect exceeds
// certificate_tol or a min eigenvalue falls below the definiteness margin.
HomogenizationResult homogenize(const CellGeometry& g, const MaterialField& mat,
                                const HomogenizeOptions& opts);

// Variant reusing already-solved cell fields.
HomogenizationResult homogenize(const CellGeometry& g, const MaterialField& mat,
                                const CellSolutionSet& cells,
                                const HomogenizeOptions& opts);

} // namespace piezocell
