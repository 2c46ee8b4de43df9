#include "piezocell/fem.hpp"

#include <cmath>

namespace piezocell {

double hex_shape(int A, const std::array<double, 3>& xi) {
    auto o = corner_offset(A);
    double v = 1.0;
    for (int a = 0; a < 3; ++a) v *= o[a] ? xi[a] : (1.0 - xi[a]);
    return v;
}

std::array<double, 3> hex_shape_grad(int A, const std::array<double, 3>& xi,
                                     double h) {
    auto o = corner_offset(A);
    std::array<double, 3> f, df;
    for (int a = 0; a < 3; ++a) {
        f[a] = o[a] ? xi[a] : (1.0 - xi[a]);
        df[a] = o[a] ? 1.0 : -1.0;
    }
    // d/dx = (1/h) d/dxi
    return {df[0] * f[1] * f[2] / h, f[0] * df[1] * f[2] / h,
            f[0] * f[1] * df[2] / h};
}

HexQuadrature HexQuadrature::make(double h) {
    HexQuadrature q;
    q.h = h;
    q.weight = h * h * h / 8.0;
    const double s = 1.0 / std::sqrt(3.0);
    const double lo = 0.5 * (1.0 - s), hi = 0.5 * (1.0 + s);
    for (int g = 0; g < 8; ++g) {
        auto o = corner_offset(g);
        q.xi[g] = {o[0] ? hi : lo, o[1] ? hi : lo, o[2] ? hi : lo};
        for (int A = 0; A < 8; ++A) {
            q.shape[g][A] = hex_shape(A, q.xi[g]);
            q.grad[g][A] = hex_shape_grad(A, q.xi[g], h);
        }
    }
    return q;
}

Eigen::Matrix3d unit_prestrain(int L) {
    auto [m, h] = voigt_pair(L);
    Eigen::Matrix3d t = Eigen::Matrix3d::Zero();
    if (m == h) {
        t(m, m) = 1.0;
    } else {
        t(m, h) = 0.5;
        t(h, m) = 0.5;
    }
    return t;
}

ElementMatrices make_element_matrices(const MaterialTensors& m,
                                      const HexQuadrature& q) {
    ElementMatrices em;
    em.Kuu.setZero();
    em.Kup.setZero();
    em.Kpp.setZero();
    em.Fu.setZero();
    em.Fp.setZero();

    const double w = q.weight;
    for (int g = 0; g < 8; ++g) {
        const auto& G = q.grad[g];
        // Stiffness blocks. The minor symmetries of c and e let the strain
        // bilinear forms be written with plain gradients:
        //   a(u,v)   = int c_{ijkl} du_j/dy_i dv_l/dy_k
        //   b(phi,v) = int e_{kij} dphi/dy_k dv_j/dy_i
        //   d(phi,p) = int d_{ij} dphi/dy_j dp/dy_i
        for (int A = 0; A < 8; ++A)
            for (int B = 0; B < 8; ++B) {
                for (int jj = 0; jj < 3; ++jj)
                    for (int ll = 0; ll < 3; ++ll) {
                        double s = 0.0;
                        for (int i = 0; i < 3; ++i)
                            for (int k = 0; k < 3; ++k)
                                s += m.c(i, jj, k, ll) * G[A][i] * G[B][k];
                        em.Kuu(A * 3 + jj, B * 3 + ll) += w * s;
                    }
                // Row: displacement test dof (A, j); column: potential dof B.
                for (int jj = 0; jj < 3; ++jj) {
                    double s = 0.0;
                    for (int i = 0; i < 3; ++i)
                        for (int k = 0; k < 3; ++k)
                            s += m.e(k, i, jj) * G[B][k] * G[A][i];
                    em.Kup(A * 3 + jj, B) += w * s;
                }
                double s = 0.0;
                for (int i = 0; i < 3; ++i)
                    for (int jj = 0; jj < 3; ++jj)
                        s += m.d(i, jj) * G[B][jj] * G[A][i];
                em.Kpp(A, B) += w * s;
            }

        // Load columns. Elastic case L (prestrain tau = unit_prestrain(L)):
        //   Fu[(A,j)] = -int (c tau)_{ij} dv_j/dy_i  = -int c_{ij m h} g_{A,i}
        //   Fp[A]     = -int e_{imh} dpsi/dy_i
        // Electric case n:
        //   Fu[(A,j)] = -int e_{nij} dv_j/dy_i
        //   Fp[A]     = +int d_{in} dpsi/dy_i
        // (signs follow from moving the constant driving terms to the right
        // after negating the scalar test equation to make the system
        // symmetric).
        for (int A = 0; A < 8; ++A) {
            for (int L = 0; L < 6; ++L) {
                auto [mm, hh] = voigt_pair(L);
                for (int jj = 0; jj < 3; ++jj) {
                    double s = 0.0;
                    for (int i = 0; i < 3; ++i) s += m.c(i, jj, mm, hh) * G[A][i];
                    em.Fu(A * 3 + jj, L) -= w * s;
                }
                double s = 0.0;
                for (int i = 0; i < 3; ++i) s += m.e(i, mm, hh) * G[A][i];
                em.Fp(A, L) -= w * s;
            }
            for (int n = 0; n < 3; ++n) {
                for (int jj = 0; jj < 3; ++jj) {
                    double s = 0.0;
                    for (int i = 0; i < 3; ++i) s += m.e(n, i, jj) * G[A][i];
                    em.Fu(A * 3 + jj, 6 + n) -= w * s;
                }
                double s = 0.0;
                for (int i = 0; i < 3; ++i) s += m.d(i, n) * G[A][i];
                em.Fp(A, 6 + n) += w * s;
            }
        }
    }
    // The continuous forms behind Kuu and Kpp are symmetric; force the
    // matrices to be bitwise symmetric too (summation order otherwise leaves
    // last-ulp asymmetries), so the assembled system is exactly symmetric and
    // the factorization/preconditioner can rely on it.
    em.Kuu = (0.5 * (em.Kuu + em.Kuu.transpose())).eval();
    em.Kpp = (0.5 * (em.Kpp + em.Kpp.transpose())).eval();
    return em;
}

Eigen::Matrix3d element_strain(const HexQuadrature& q, int g,
                               const Eigen::Matrix<double, 24, 1>& u) {
    Eigen::Matrix3d grad_u = Eigen::Matrix3d::Zero(); // grad_u(i,j) = du_j/dy_i
    for (int A = 0; A < 8; ++A)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                grad_u(i, j) += q.grad[g][A][i] * u(A * 3 + j);
    return 0.5 * (grad_u + grad_u.transpose());
}

Eigen::Vector3d element_gradient(const HexQuadrature& q, int g,
                                 const Eigen::Matrix<double, 8, 1>& p) {
    Eigen::Vector3d gr = Eigen::Vector3d::Zero();
    for (int A = 0; A < 8; ++A)
        for (int i = 0; i < 3; ++i) gr(i) += q.grad[g][A][i] * p(A);
    return gr;
}

Eigen::Matrix3d strain_at(const std::array<double, 3>& xi, double h,
                          const Eigen::Matrix<double, 24, 1>& u) {
    Eigen::Matrix3d grad_u = Eigen::Matrix3d::Zero();
    for (int A = 0; A < 8; ++A) {
        auto g = hex_shape_grad(A, xi, h);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) grad_u(i, j) += g[i] * u(A * 3 + j);
    }
    return 0.5 * (grad_u + grad_u.transpose());
}

Eigen::Vector3d gradient_at(const std::array<double, 3>& xi, double h,
                            const Eigen::Matrix<double, 8, 1>& p) {
    Eigen::Vector3d gr = Eigen::Vector3d::Zero();
    for (int A = 0; A < 8; ++A) {
        auto g = hex_shape_grad(A, xi, h);
        for (int i = 0; i < 3; ++i) gr(i) += g[i] * p(A);
    }
    return gr;
}

Eigen::Vector3d vector_value_at(const std::array<double, 3>& xi,
                                const Eigen::Matrix<double, 24, 1>& u) {
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
    for (int A = 0; A < 8; ++A) {
        double s = hex_shape(A, xi);
        for (int j = 0; j < 3; ++j) v(j) += s * u(A * 3 + j);
    }
    return v;
}

} // namespace piezocell
