#pragma once

#include <array>
#include <cstddef>

#include <Eigen/Dense>

#include "piezocell/errors.hpp"

namespace piezocell {

using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Matrix36d = Eigen::Matrix<double, 3, 6>;

// Voigt pair ordering used throughout: 11, 22, 33, 23, 13, 12.
// voigt_index(i,j) maps an unordered index pair to its slot; voigt_pair(I)
// returns the canonical (i,j) with i <= j.
inline constexpr int voigt_index(int i, int j) {
    constexpr int table[3][3] = {{0, 5, 4}, {5, 1, 3}, {4, 3, 2}};
    return table[i][j];
}

inline constexpr std::array<int, 2> voigt_pair(int I) {
    constexpr std::array<std::array<int, 2>, 6> table = {
        {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}}};
    return table[I];
}

// Rank-4 elasticity tensor c_{ijkl}, stored with all 81 entries so that the
// minor symmetries (ij), (kl) and the major symmetry hold *by construction*:
// every write mirrors the value into all equivalent slots. No Voigt scaling
// factors ever enter the stored values.
class ElasticTensor {
  public:
    ElasticTensor() { data_.fill(0.0); }

    double operator()(int i, int j, int k, int l) const {
        return data_[idx(i, j, k, l)];
    }

    // Writes c_{ijkl} and all seven symmetry images of it.
    void set(int i, int j, int k, int l, double v) {
        data_[idx(i, j, k, l)] = v;
        data_[idx(j, i, k, l)] = v;
        data_[idx(i, j, l, k)] = v;
        data_[idx(j, i, l, k)] = v;
        data_[idx(k, l, i, j)] = v;
        data_[idx(l, k, i, j)] = v;
        data_[idx(k, l, j, i)] = v;
        data_[idx(l, k, j, i)] = v;
    }

    // Isotropic tensor lambda*I(x)I + 2 mu * sym.
    static ElasticTensor isotropic(double lambda, double mu);

    ElasticTensor scaled(double s) const {
        ElasticTensor r;
        for (std::size_t t = 0; t < data_.size(); ++t) r.data_[t] = s * data_[t];
        return r;
    }

    const std::array<double, 81>& raw() const { return data_; }

  private:
    static int idx(int i, int j, int k, int l) {
        return ((i * 3 + j) * 3 + k) * 3 + l;
    }
    std::array<double, 81> data_;
};

// Rank-3 piezoelectric coupling tensor e_{kij}, symmetric in its last two
// indices by construction.
class PiezoTensor {
  public:
    PiezoTensor() { data_.fill(0.0); }

    double operator()(int k, int i, int j) const { return data_[idx(k, i, j)]; }

    void set(int k, int i, int j, double v) {
        data_[idx(k, i, j)] = v;
        data_[idx(k, j, i)] = v;
    }

    PiezoTensor scaled(double s) const {
        PiezoTensor r;
        for (std::size_t t = 0; t < data_.size(); ++t) r.data_[t] = s * data_[t];
        return r;
    }

    const std::array<double, 27>& raw() const { return data_; }

  private:
    static int idx(int k, int i, int j) { return (k * 3 + i) * 3 + j; }
    std::array<double, 27> data_;
};

// Symmetric rank-2 dielectric tensor d_{ij}.
class DielectricTensor {
  public:
    DielectricTensor() { data_.fill(0.0); }

    double operator()(int i, int j) const { return data_[i * 3 + j]; }

    void set(int i, int j, double v) {
        data_[i * 3 + j] = v;
        data_[j * 3 + i] = v;
    }

    static DielectricTensor identity_scaled(double s) {
        DielectricTensor d;
        for (int i = 0; i < 3; ++i) d.set(i, i, s);
        return d;
    }

    DielectricTensor scaled(double s) const {
        DielectricTensor r;
        for (std::size_t t = 0; t < data_.size(); ++t) r.data_[t] = s * data_[t];
        return r;
    }

    Eigen::Matrix3d matrix() const {
        Eigen::Matrix3d m;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = (*this)(i, j);
        return m;
    }

  private:
    std::array<double, 9> data_;
};

// Bundle of the three phase tensors.
struct MaterialTensors {
    ElasticTensor c;
    PiezoTensor e;
    DielectricTensor d;

    MaterialTensors scaled(double s) const {
        return MaterialTensors{c.scaled(s), e.scaled(s), d.scaled(s)};
    }
};

// ---------------------------------------------------------------------------
// Voigt pack / unpack. Plain convention: entries are copied verbatim, no
// factors of 2 anywhere; factors of 2 belong to engineering *strain vectors*
// only, which this library never stores.

Matrix6d voigt_pack(const ElasticTensor& c);

// Rejects a 6x6 whose asymmetry exceeds 1e-12 relative to its largest entry.
ElasticTensor voigt_unpack(const Matrix6d& V);

Matrix36d voigt_pack(const PiezoTensor& e);
PiezoTensor voigt_unpack_piezo(const Matrix36d& E);

// ---------------------------------------------------------------------------
// Material admissibility certificate. min_eig_c is the smallest eigenvalue of
// the plain Voigt 6x6 (a conservative lower bound for the quadratic form on
// symmetric matrices), min_eig_d of the 3x3.
struct MaterialCertificate {
    bool ok = false;
    double min_eig_c = 0.0;
    double min_eig_d = 0.0;
};

MaterialCertificate validate_material(const MaterialTensors& m,
                                      double alpha_c, double alpha_d);

// ---------------------------------------------------------------------------
// Homogenized coefficient bundle. cH/eH/fH/dH are stored full-index exactly
// as the volume integrals produce them (no symmetrization applied), so that
// structural identities can be *measured* instead of imposed.
struct EffectiveDiagnostics {
    double cH_major_symmetry_defect = 0.0;
    double eH_pair_symmetry_defect = 0.0;
    double eH_fH_defect = 0.0;
    double dH_symmetry_defect = 0.0;
    double cH_min_eigenvalue = 0.0;
    double dH_min_eigenvalue = 0.0;
};

class EffectiveTensors {
  public:
    EffectiveTensors() {
        cH.fill(0.0);
        eH.fill(0.0);
        fH.fill(0.0);
        dH.fill(0.0);
    }

    // cH_{ijmh}, eH_{nij}, fH_{imh}, dH_{in}; raw storage, row-major.
    std::array<double, 81> cH;
    std::array<double, 27> eH;
    std::array<double, 27> fH;
    std::array<double, 9> dH;

    double c(int i, int j, int m, int h) const {
        return cH[((i * 3 + j) * 3 + m) * 3 + h];
    }
    double& c(int i, int j, int m, int h) {
        return cH[((i * 3 + j) * 3 + m) * 3 + h];
    }
    double e(int n, int i, int j) const { return eH[(n * 3 + i) * 3 + j]; }
    double& e(int n, int i, int j) { return eH[(n * 3 + i) * 3 + j]; }
    double f(int i, int m, int h) const { return fH[(i * 3 + m) * 3 + h]; }
    double& f(int i, int m, int h) { return fH[(i * 3 + m) * 3 + h]; }
    double d(int i, int n) const { return dH[i * 3 + n]; }
    double& d(int i, int n) { return dH[i * 3 + n]; }

    // Symmetrized copies used by downstream solvers: cH gets its major
    // symmetry averaged, dH is symmetrized, eH is used as stored.
    ElasticTensor c_symmetrized() const;
    DielectricTensor d_symmetrized() const;
    PiezoTensor e_as_tensor() const;
};

// Relative defect measures of the structural identities (Frobenius norms over
// all index combinations; relative to the norm of the tensor itself, zero
// tensors give zero defect). Also reports min eigenvalues of the Voigt pack
// of the symmetrized cH and of the symmetrized dH.
EffectiveDiagnostics tensor_defects(const EffectiveTensors& t);

// Margin used when reporting positive definiteness: eigenvalues must exceed
// 1e-10 * trace of the packed matrix.
inline double definiteness_margin(double trace) { return 1e-10 * trace; }

} // namespace piezocell
