#pragma once

// Dense reference assembly of the periodic cell system, written independently
// with straight loops over the constitutive tensors. Only the dof layout
// (4 * node + component, four multiplier dofs at the tail) is shared with the
// library, so entrywise comparisons are meaningful. Valid for cells whose
// nodes are all active in natural order (every n = 2 geometry with at least
// one material voxel adjacent to each node).

#include <array>
#include <cmath>

#include <Eigen/Dense>

#include <piezocell/geometry.hpp>
#include <piezocell/sparse.hpp>
#include <piezocell/tensors.hpp>

namespace pzt {

struct DenseSystem {
    Eigen::MatrixXd K;
    Eigen::MatrixXd rhs; // one column per driving case
};

inline double ref_shape(int A, const std::array<double, 3>& xi) {
    double v = 1.0;
    for (int d = 0; d < 3; ++d) {
        int bit = (A >> d) & 1;
        v *= bit ? xi[d] : 1.0 - xi[d];
    }
    return v;
}

inline std::array<double, 3> ref_grad(int A, const std::array<double, 3>& xi,
                                      double h) {
    std::array<double, 3> g;
    for (int d = 0; d < 3; ++d) {
        double v = 1.0;
        for (int e = 0; e < 3; ++e) {
            int bit = (A >> e) & 1;
            if (e == d)
                v *= bit ? 1.0 : -1.0;
            else
                v *= bit ? xi[e] : 1.0 - xi[e];
        }
        g[d] = v / h;
    }
    return g;
}

inline Eigen::Matrix3d ref_prestrain(int L) {
    static const int mm[6] = {0, 1, 2, 1, 0, 0};
    static const int hh[6] = {0, 1, 2, 2, 2, 1};
    Eigen::Matrix3d t = Eigen::Matrix3d::Zero();
    if (mm[L] == hh[L])
        t(mm[L], hh[L]) = 1.0;
    else {
        t(mm[L], hh[L]) = 0.5;
        t(hh[L], mm[L]) = 0.5;
    }
    return t;
}

inline DenseSystem dense_cell_system(const piezocell::CellGeometry& g,
                                     const piezocell::MaterialTensors& m) {
    const int n = g.n;
    const int nodes = n * n * n;
    const int ndof = 4 * nodes + 4;
    DenseSystem sys;
    sys.K = Eigen::MatrixXd::Zero(ndof, ndof);
    sys.rhs = Eigen::MatrixXd::Zero(ndof, 9);

    const double h = 1.0 / n;
    const double gp = 0.5 / std::sqrt(3.0);
    const double w = (h * h * h) / 8.0;

    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                if (!g.material(i, j, k)) continue;
                std::array<int, 8> node;
                for (int A = 0; A < 8; ++A) {
                    int ii = (i + (A & 1)) % n;
                    int jj = (j + ((A >> 1) & 1)) % n;
                    int kk = (k + ((A >> 2) & 1)) % n;
                    node[A] = (kk * n + jj) * n + ii;
                }
                for (int gx = 0; gx < 2; ++gx)
                    for (int gy = 0; gy < 2; ++gy)
                        for (int gz = 0; gz < 2; ++gz) {
                            std::array<double, 3> xi{0.5 + (gx ? gp : -gp),
                                                     0.5 + (gy ? gp : -gp),
                                                     0.5 + (gz ? gp : -gp)};
                            std::array<std::array<double, 3>, 8> gr;
                            for (int A = 0; A < 8; ++A)
                                gr[A] = ref_grad(A, xi, h);

                            // Symmetric strain of every displacement basis
                            // function at this point.
                            Eigen::Matrix3d S[8][3];
                            for (int A = 0; A < 8; ++A)
                                for (int a = 0; a < 3; ++a) {
                                    Eigen::Matrix3d s =
                                        Eigen::Matrix3d::Zero();
                                    for (int d = 0; d < 3; ++d) {
                                        s(d, a) += 0.5 * gr[A][d];
                                        s(a, d) += 0.5 * gr[A][d];
                                    }
                                    S[A][a] = s;
                                }

                            for (int A = 0; A < 8; ++A)
                                for (int B = 0; B < 8; ++B) {
                                    for (int a = 0; a < 3; ++a)
                                        for (int b = 0; b < 3; ++b) {
                                            double v = 0.0;
                                            for (int p = 0; p < 3; ++p)
                                                for (int q = 0; q < 3; ++q)
                                                    for (int r = 0; r < 3; ++r)
                                                        for (int s = 0; s < 3;
                                                             ++s)
                                                            v += m.c(p, q, r,
                                                                     s) *
                                                                 S[A][a](p, q) *
                                                                 S[B][b](r, s);
                                            sys.K(4 * node[A] + a,
                                                  4 * node[B] + b) += w * v;
                                        }
                                    for (int a = 0; a < 3; ++a) {
                                        double v = 0.0;
                                        for (int kd = 0; kd < 3; ++kd)
                                            for (int p = 0; p < 3; ++p)
                                                for (int q = 0; q < 3; ++q)
                                                    v += m.e(kd, p, q) *
                                                         gr[B][kd] *
                                                         S[A][a](p, q);
                                        sys.K(4 * node[A] + a,
                                              4 * node[B] + 3) += w * v;
                                        sys.K(4 * node[B] + 3,
                                              4 * node[A] + a) += w * v;
                                    }
                                    double v = 0.0;
                                    for (int p = 0; p < 3; ++p)
                                        for (int q = 0; q < 3; ++q)
                                            v += m.d(p, q) * gr[A][p] *
                                                 gr[B][q];
                                    sys.K(4 * node[A] + 3, 4 * node[B] + 3) -=
                                        w * v;
                                }

                            for (int L = 0; L < 6; ++L) {
                                Eigen::Matrix3d tau = ref_prestrain(L);
                                for (int A = 0; A < 8; ++A) {
                                    for (int a = 0; a < 3; ++a) {
                                        double v = 0.0;
                                        for (int p = 0; p < 3; ++p)
                                            for (int r = 0; r < 3; ++r)
                                                for (int s = 0; s < 3; ++s)
                                                    v += m.c(p, a, r, s) *
                                                         tau(r, s) * gr[A][p];
                                        sys.rhs(4 * node[A] + a, L) -= w * v;
                                    }
                                    double v = 0.0;
                                    for (int p = 0; p < 3; ++p)
                                        for (int r = 0; r < 3; ++r)
                                            for (int s = 0; s < 3; ++s)
                                                v += m.e(p, r, s) * tau(r, s) *
                                                     gr[A][p];
                                    sys.rhs(4 * node[A] + 3, L) -= w * v;
                                }
                            }
                            for (int nn = 0; nn < 3; ++nn) {
                                for (int A = 0; A < 8; ++A) {
                                    for (int a = 0; a < 3; ++a) {
                                        double v = 0.0;
                                        for (int p = 0; p < 3; ++p)
                                            v += m.e(nn, p, a) * gr[A][p];
                                        sys.rhs(4 * node[A] + a, 6 + nn) -=
                                            w * v;
                                    }
                                    double v = 0.0;
                                    for (int p = 0; p < 3; ++p)
                                        v += m.d(p, nn) * gr[A][p];
                                    sys.rhs(4 * node[A] + 3, 6 + nn) += w * v;
                                }
                            }
                        }
            }

    for (int t = 0; t < nodes; ++t)
        for (int c = 0; c < 4; ++c) {
            sys.K(4 * t + c, 4 * nodes + c) = 1.0;
            sys.K(4 * nodes + c, 4 * t + c) = 1.0;
        }
    return sys;
}

inline Eigen::MatrixXd csr_to_dense(const piezocell::CsrMatrix& K) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(K.rows(), K.cols());
    const auto& rp = K.row_ptr();
    const auto& ci = K.col_idx();
    const auto& vv = K.values();
    for (int r = 0; r < K.rows(); ++r)
        for (int t = rp[r]; t < rp[r + 1]; ++t) out(r, ci[t]) += vv[t];
    return out;
}

} // namespace pzt
