#include "piezocell/tensors.hpp"

#include <algorithm>
#include <cmath>

namespace piezocell {

ElasticTensor ElasticTensor::isotropic(double lambda, double mu) {
    ElasticTensor c;
    auto kron = [](int a, int b) { return a == b ? 1.0 : 0.0; };
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    double v = lambda * kron(i, j) * kron(k, l) +
                               mu * (kron(i, k) * kron(j, l) +
                                     kron(i, l) * kron(j, k));
                    // Direct slot write: the formula is already fully
                    // symmetric, identical values land in mirrored slots.
                    c.set(i, j, k, l, v);
                }
    return c;
}

Matrix6d voigt_pack(const ElasticTensor& c) {
    Matrix6d V;
    for (int I = 0; I < 6; ++I)
        for (int J = 0; J < 6; ++J) {
            auto [i, j] = voigt_pair(I);
            auto [k, l] = voigt_pair(J);
            V(I, J) = c(i, j, k, l);
        }
    return V;
}

ElasticTensor voigt_unpack(const Matrix6d& V) {
    double scale = V.cwiseAbs().maxCoeff();
    double asym = (V - V.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale)
        throw NonSymmetricInput(
            "voigt_unpack: 6x6 input is not symmetric (defect " +
            std::to_string(asym) + " vs scale " + std::to_string(scale) + ")");
    ElasticTensor c;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    // Symmetric slots read the identical matrix entry, so the
                    // reconstructed tensor is exactly symmetric. The major
                    // symmetry uses the (I,J)/(J,I) average to be robust to
                    // tiny admissible asymmetry in the input.
                    int I = voigt_index(i, j), J = voigt_index(k, l);
                    double v = 0.5 * (V(I, J) + V(J, I));
                    c.set(i, j, k, l, v);
                }
    return c;
}

Matrix36d voigt_pack(const PiezoTensor& e) {
    Matrix36d E;
    for (int k = 0; k < 3; ++k)
        for (int J = 0; J < 6; ++J) {
            auto [i, j] = voigt_pair(J);
            E(k, J) = e(k, i, j);
        }
    return E;
}

PiezoTensor voigt_unpack_piezo(const Matrix36d& E) {
    PiezoTensor e;
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) e.set(k, i, j, E(k, voigt_index(i, j)));
    return e;
}

MaterialCertificate validate_material(const MaterialTensors& m,
                                      double alpha_c, double alpha_d) {
    MaterialCertificate cert;
    Eigen::SelfAdjointEigenSolver<Matrix6d> es_c(voigt_pack(m.c));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es_d(m.d.matrix());
    cert.min_eig_c = es_c.eigenvalues().minCoeff();
    cert.min_eig_d = es_d.eigenvalues().minCoeff();
    cert.ok = cert.min_eig_c >= alpha_c && cert.min_eig_d >= alpha_d;
    return cert;
}

ElasticTensor EffectiveTensors::c_symmetrized() const {
    ElasticTensor r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int m = 0; m < 3; ++m)
                for (int h = 0; h < 3; ++h) {
                    double v = 0.5 * (c(i, j, m, h) + c(m, h, i, j));
                    // set() mirrors into minor-symmetric slots; the stored cH
                    // is already exactly minor-symmetric (the integrand is
                    // built from a minor-symmetric c), so this only averages
                    // the major pairing.
                    r.set(i, j, m, h, v);
                }
    return r;
}

DielectricTensor EffectiveTensors::d_symmetrized() const {
    DielectricTensor r;
    for (int i = 0; i < 3; ++i)
        for (int n = i; n < 3; ++n) r.set(i, n, 0.5 * (d(i, n) + d(n, i)));
    return r;
}

PiezoTensor EffectiveTensors::e_as_tensor() const {
    PiezoTensor r;
    for (int n = 0; n < 3; ++n)
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j)
                r.set(n, i, j, 0.5 * (e(n, i, j) + e(n, j, i)));
    return r;
}

namespace {
double frob(const double* p, int nn) {
    double s = 0.0;
    for (int t = 0; t < nn; ++t) s += p[t] * p[t];
    return std::sqrt(s);
}
} // namespace

EffectiveDiagnostics tensor_defects(const EffectiveTensors& t) {
    EffectiveDiagnostics g;

    double c_norm = frob(t.cH.data(), 81);
    double c_def = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int m = 0; m < 3; ++m)
                for (int h = 0; h < 3; ++h) {
                    double dlt = t.c(i, j, m, h) - t.c(m, h, i, j);
                    c_def += dlt * dlt;
                }
    g.cH_major_symmetry_defect = c_norm > 0.0 ? std::sqrt(c_def) / c_norm : 0.0;

    double e_norm = frob(t.eH.data(), 27);
    double f_norm = frob(t.fH.data(), 27);
    double pair_def = 0.0, ef_def = 0.0;
    for (int n = 0; n < 3; ++n)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double dp = t.e(n, i, j) - t.e(n, j, i);
                pair_def += dp * dp;
                double df = t.e(n, i, j) - t.f(n, i, j);
                ef_def += df * df;
            }
    double ef_scale = std::max(e_norm, f_norm);
    g.eH_pair_symmetry_defect = e_norm > 0.0 ? std::sqrt(pair_def) / e_norm : 0.0;
    g.eH_fH_defect = ef_scale > 0.0 ? std::sqrt(ef_def) / ef_scale : 0.0;

    double d_norm = frob(t.dH.data(), 9);
    double d_def = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int n = 0; n < 3; ++n) {
            double dd = t.d(i, n) - t.d(n, i);
            d_def += dd * dd;
        }
    g.dH_symmetry_defect = d_norm > 0.0 ? std::sqrt(d_def) / d_norm : 0.0;

    Eigen::SelfAdjointEigenSolver<Matrix6d> es_c(voigt_pack(t.c_symmetrized()));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es_d(
        t.d_symmetrized().matrix());
    g.cH_min_eigenvalue = es_c.eigenvalues().minCoeff();
    g.dH_min_eigenvalue = es_d.eigenvalues().minCoeff();
    return g;
}

} // namespace piezocell
