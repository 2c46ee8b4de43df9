#include "piezocell/effective.hpp"

#include <cmath>

namespace piezocell {

Eigen::Matrix3d apply_c(const ElasticTensor& c, const Eigen::Matrix3d& M) {
    Eigen::Matrix3d r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) s += c(i, j, k, l) * M(k, l);
            r(i, j) = s;
        }
    return r;
}

Eigen::Vector3d contract_e(const PiezoTensor& e, const Eigen::Matrix3d& M) {
    Eigen::Vector3d r;
    for (int i = 0; i < 3; ++i) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) s += e(i, k, l) * M(k, l);
        r(i) = s;
    }
    return r;
}

Eigen::Matrix3d apply_e_gradient(const PiezoTensor& e,
                                 const Eigen::Vector3d& g) {
    Eigen::Matrix3d r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += e(k, i, j) * g(k);
            r(i, j) = s;
        }
    return r;
}

Eigen::Vector3d apply_d(const DielectricTensor& d, const Eigen::Vector3d& g) {
    Eigen::Vector3d r;
    for (int i = 0; i < 3; ++i) {
        double s = 0.0;
        for (int j = 0; j < 3; ++j) s += d(i, j) * g(j);
        r(i) = s;
    }
    return r;
}

namespace {

struct Integrals {
    // Direct coefficient integrals, Voigt-pair slots for the elastic pair.
    std::array<Eigen::Matrix3d, 6> cH_cols;  // [(m,h) pair] -> (i,j) matrix
    std::array<Eigen::Matrix3d, 3> eH_rows;  // [n] -> (i,j) matrix
    std::array<Eigen::Vector3d, 6> fH_cols;  // [(m,h) pair] -> i vector
    Eigen::Matrix3d dH;
    Matrix6d cH_energy;
    Eigen::Matrix3d dH_energy;
};

Integrals integrate(const CellSolutionSet& cells, const MaterialField& mat,
                    const CellGeometry& g) {
    if (cells.geometry.n != g.n)
        throw GridMismatch(
            "effective: cell solutions and geometry resolution differ");
    mat.check_compatible(g.voxel_count());

    Integrals acc;
    for (auto& m : acc.cH_cols) m.setZero();
    for (auto& m : acc.eH_rows) m.setZero();
    for (auto& v : acc.fH_cols) v.setZero();
    acc.dH.setZero();
    acc.cH_energy.setZero();
    acc.dH_energy.setZero();

    const int n = g.n;
    const HexQuadrature quad = HexQuadrature::make(1.0 / n);
    std::array<Eigen::Matrix3d, 6> tau;
    for (int L = 0; L < 6; ++L) tau[L] = unit_prestrain(L);

    Eigen::Matrix<double, 24, 1> ue[9];
    Eigen::Matrix<double, 8, 1> pe[9];

    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                std::size_t voxel = (static_cast<std::size_t>(k) * n + j) * n + i;
                if (!g.mask[voxel]) continue;
                const MaterialTensors& m = mat.at(voxel);
                auto corners = cells.grid.voxel_corners(i, j, k);
                for (int c = 0; c < 9; ++c)
                    gather_element_vectors(cells, c, corners, ue[c], pe[c]);

                for (int gp = 0; gp < 8; ++gp) {
                    const double w = quad.weight;
                    // Elastic cases: total driving strain and potential grad.
                    Eigen::Matrix3d E[6];
                    Eigen::Vector3d Gph[6];
                    for (int L = 0; L < 6; ++L) {
                        E[L] = tau[L] + element_strain(quad, gp, ue[L]);
                        Gph[L] = element_gradient(quad, gp, pe[L]);
                    }
                    // Electric cases: fluctuation strain and total field.
                    Eigen::Matrix3d S[3];
                    Eigen::Vector3d P[3];
                    for (int nn = 0; nn < 3; ++nn) {
                        S[nn] = element_strain(quad, gp, ue[6 + nn]);
                        P[nn] = element_gradient(quad, gp, pe[6 + nn]);
                        P[nn](nn) += 1.0;
                    }

                    for (int L = 0; L < 6; ++L) {
                        acc.cH_cols[L] +=
                            w * (apply_c(m.c, E[L]) +
                                 apply_e_gradient(m.e, Gph[L]));
                        acc.fH_cols[L] +=
                            w * (contract_e(m.e, E[L]) - apply_d(m.d, Gph[L]));
                    }
                    for (int nn = 0; nn < 3; ++nn) {
                        acc.eH_rows[nn] +=
                            w * (apply_c(m.c, S[nn]) +
                                 apply_e_gradient(m.e, P[nn]));
                        for (int ii = 0; ii < 3; ++ii)
                            acc.dH(ii, nn) +=
                                w * (-contract_e(m.e, S[nn])(ii) +
                                     apply_d(m.d, P[nn])(ii));
                    }

                    // Symmetric energy reformulations.
                    Eigen::Matrix3d cE[6];
                    for (int L = 0; L < 6; ++L) cE[L] = apply_c(m.c, E[L]);
                    for (int I = 0; I < 6; ++I)
                        for (int J = 0; J < 6; ++J)
                            acc.cH_energy(I, J) +=
                                w * ((cE[J].array() * E[I].array()).sum() +
                                     Gph[I].dot(apply_d(m.d, Gph[J])));
                    Eigen::Matrix3d cS[3];
                    for (int nn = 0; nn < 3; ++nn) cS[nn] = apply_c(m.c, S[nn]);
                    for (int I = 0; I < 3; ++I)
                        for (int J = 0; J < 3; ++J)
                            acc.dH_energy(I, J) +=
                                w * (P[I].dot(apply_d(m.d, P[J])) +
                                     (cS[J].array() * S[I].array()).sum());
                }
            }
    return acc;
}

EffectiveTensors pack(const Integrals& acc) {
    EffectiveTensors t;
    for (int m = 0; m < 3; ++m)
        for (int h = 0; h < 3; ++h) {
            int L = voigt_index(m, h);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) t.c(i, j, m, h) = acc.cH_cols[L](i, j);
            for (int i = 0; i < 3; ++i) t.f(i, m, h) = acc.fH_cols[L](i);
        }
    for (int n = 0; n < 3; ++n)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) t.e(n, i, j) = acc.eH_rows[n](i, j);
    for (int i = 0; i < 3; ++i)
        for (int n = 0; n < 3; ++n) t.d(i, n) = acc.dH(i, n);
    return t;
}

} // namespace

EffectiveTensors effective_cH_eH_fH_dH(const CellSolutionSet& cells,
                                       const MaterialField& mat,
                                       const CellGeometry& g) {
    return pack(integrate(cells, mat, g));
}

std::array<double, 81> effective_cH(const CellSolutionSet& cells,
                                    const MaterialField& mat,
                                    const CellGeometry& g) {
    return effective_cH_eH_fH_dH(cells, mat, g).cH;
}
std::array<double, 27> effective_eH(const CellSolutionSet& cells,
                                    const MaterialField& mat,
                                    const CellGeometry& g) {
    return effective_cH_eH_fH_dH(cells, mat, g).eH;
}
std::array<double, 27> effective_fH(const CellSolutionSet& cells,
                                    const MaterialField& mat,
                                    const CellGeometry& g) {
    return effective_cH_eH_fH_dH(cells, mat, g).fH;
}
std::array<double, 9> effective_dH(const CellSolutionSet& cells,
                                   const MaterialField& mat,
                                   const CellGeometry& g) {
    return effective_cH_eH_fH_dH(cells, mat, g).dH;
}

EnergyForms energy_forms(const CellSolutionSet& cells, const MaterialField& mat,
                         const CellGeometry& g) {
    Integrals acc = integrate(cells, mat, g);
    return EnergyForms{acc.cH_energy, acc.dH_energy};
}

namespace {

Matrix6d voigt_pairs_of(const EffectiveTensors& t) {
    Matrix6d v;
    for (int I = 0; I < 6; ++I)
        for (int J = 0; J < 6; ++J) {
            auto [i, j] = voigt_pair(I);
            auto [m, h] = voigt_pair(J);
            v(I, J) = t.c(i, j, m, h);
        }
    return v;
}

} // namespace

HomogenizationResult homogenize(const CellGeometry& g, const MaterialField& mat,
                                const CellSolutionSet& cells,
                                const HomogenizeOptions& opts) {
    HomogenizationResult res;
    res.theta = g.theta;
    res.resolution = g.n;
    res.solver_stats = cells.stats;

    Integrals acc = integrate(cells, mat, g);
    res.tensors = pack(acc);
    res.energy = EnergyForms{acc.cH_energy, acc.dH_energy};
    res.diagnostics = tensor_defects(res.tensors);

    Matrix6d direct_v = voigt_pairs_of(res.tensors);
    double cn = direct_v.norm();
    res.cross_check.cH_direct_vs_energy_defect =
        cn > 0.0 ? (direct_v - acc.cH_energy).norm() / cn : 0.0;
    Eigen::Matrix3d dd;
    for (int i = 0; i < 3; ++i)
        for (int n = 0; n < 3; ++n) dd(i, n) = res.tensors.d(i, n);
    double dn = dd.norm();
    res.cross_check.dH_direct_vs_energy_defect =
        dn > 0.0 ? (dd - acc.dH_energy).norm() / dn : 0.0;

    // Worst zero-mean defect per case (informational; solve enforced it).
    for (int c = 0; c < 9; ++c) {
        auto means = solution_means(cells.grid, cells.x[c]);
        double worst = 0.0;
        for (int q = 0; q < 4; ++q) worst = std::max(worst, std::abs(means[q]));
        res.worst_mean_defect[c] = worst;
    }

    // Material admissibility certificate (recorded; thresholds from options).
    // For a multi-phase field the weakest phase governs.
    res.material_certificate.ok = true;
    res.material_certificate.min_eig_c = std::numeric_limits<double>::infinity();
    res.material_certificate.min_eig_d = std::numeric_limits<double>::infinity();
    for (const auto& phase : mat.table) {
        auto cert = validate_material(phase, opts.alpha_c, opts.alpha_d);
        res.material_certificate.min_eig_c =
            std::min(res.material_certificate.min_eig_c, cert.min_eig_c);
        res.material_certificate.min_eig_d =
            std::min(res.material_certificate.min_eig_d, cert.min_eig_d);
        res.material_certificate.ok &= cert.ok;
    }

    if (opts.enforce_certificates) {
        const auto& dg = res.diagnostics;
        auto fail = [&](const std::string& what, double value) {
            throw CertificateFailure("homogenize: " + what + " = " +
                                     std::to_string(value) +
                                     " exceeds tolerance");
        };
        if (dg.cH_major_symmetry_defect > opts.certificate_tol)
            fail("cH major-symmetry defect", dg.cH_major_symmetry_defect);
        if (dg.eH_pair_symmetry_defect > opts.certificate_tol)
            fail("eH index-pair symmetry defect", dg.eH_pair_symmetry_defect);
        if (dg.eH_fH_defect > opts.certificate_tol)
            fail("eH vs fH defect", dg.eH_fH_defect);
        if (dg.dH_symmetry_defect > opts.certificate_tol)
            fail("dH symmetry defect", dg.dH_symmetry_defect);
        if (res.cross_check.cH_direct_vs_energy_defect > opts.certificate_tol)
            fail("cH direct-vs-energy defect",
                 res.cross_check.cH_direct_vs_energy_defect);
        if (res.cross_check.dH_direct_vs_energy_defect > opts.certificate_tol)
            fail("dH direct-vs-energy defect",
                 res.cross_check.dH_direct_vs_energy_defect);
        double c_margin =
            definiteness_margin(voigt_pack(res.tensors.c_symmetrized()).trace());
        double d_margin =
            definiteness_margin(res.tensors.d_symmetrized().matrix().trace());
        if (dg.cH_min_eigenvalue <= c_margin)
            fail("cH minimum eigenvalue", dg.cH_min_eigenvalue);
        if (dg.dH_min_eigenvalue <= d_margin)
            fail("dH minimum eigenvalue", dg.dH_min_eigenvalue);
    }
    return res;
}

HomogenizationResult homogenize(const CellGeometry& g, const MaterialField& mat,
                                const HomogenizeOptions& opts) {
    CellSolutionSet cells = solve_cell_problems(g, mat, opts.solve);
    return homogenize(g, mat, cells, opts);
}

} // namespace piezocell
