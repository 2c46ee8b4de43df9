#pragma once

#include <array>

#include <Eigen/Dense>

#include "piezocell/tensors.hpp"

namespace piezocell {

// Trilinear 8-node hexahedral element on an axis-aligned voxel of edge h.
// Local corner A in 0..7 carries the offset bits (ax, ay, az) =
// (A & 1, (A >> 1) & 1, (A >> 2) & 1); corner A of voxel (i,j,k) is the grid
// node (i+ax, j+ay, k+az).
inline constexpr std::array<int, 3> corner_offset(int A) {
    return {A & 1, (A >> 1) & 1, (A >> 2) & 1};
}

// Shape function value / gradient at local coordinates xi in [0,1]^3 for a
// voxel of edge h (gradient in physical coordinates).
double hex_shape(int A, const std::array<double, 3>& xi);
std::array<double, 3> hex_shape_grad(int A, const std::array<double, 3>& xi,
                                     double h);

// Tensor-product 2-point Gauss rule on the voxel, tabulated shape values and
// physical gradients at each of the 8 quadrature points. All points share the
// weight h^3/8.
struct HexQuadrature {
    double h = 0.0;
    double weight = 0.0;                              // per-point weight
    std::array<std::array<double, 3>, 8> xi;          // local coordinates
    std::array<std::array<double, 8>, 8> shape;       // [g][A]
    std::array<std::array<std::array<double, 3>, 8>, 8> grad; // [g][A][dim]

    static HexQuadrature make(double h);
};

// Element blocks of the coupled system in the symmetric convention
//   [ Kuu   Kup ] [u  ]   [Fu]
//   [ Kup^T -Kpp] [phi] = [Fp]    (sign applied during assembly)
// together with the nine constant-driving load columns (six symmetric unit
// prestrains in Voigt order 11,22,33,23,13,12, then three unit field
// directions). Element displacement dofs are ordered (A*3 + component),
// potential dofs are the plain corner index.
struct ElementMatrices {
    Eigen::Matrix<double, 24, 24> Kuu;
    Eigen::Matrix<double, 24, 8> Kup;
    Eigen::Matrix<double, 8, 8> Kpp;
    Eigen::Matrix<double, 24, 9> Fu;
    Eigen::Matrix<double, 8, 9> Fp;
};

ElementMatrices make_element_matrices(const MaterialTensors& m,
                                      const HexQuadrature& q);

// Symmetric strain of a displacement element vector (24) at quadrature point
// g, and gradient of a scalar element vector (8).
Eigen::Matrix3d element_strain(const HexQuadrature& q, int g,
                               const Eigen::Matrix<double, 24, 1>& u);
Eigen::Vector3d element_gradient(const HexQuadrature& q, int g,
                                 const Eigen::Matrix<double, 8, 1>& p);

// Same evaluations at an arbitrary local point (used for centroid sampling
// and point queries).
Eigen::Matrix3d strain_at(const std::array<double, 3>& xi, double h,
                          const Eigen::Matrix<double, 24, 1>& u);
Eigen::Vector3d gradient_at(const std::array<double, 3>& xi, double h,
                            const Eigen::Matrix<double, 8, 1>& p);
Eigen::Vector3d vector_value_at(const std::array<double, 3>& xi,
                                const Eigen::Matrix<double, 24, 1>& u);

// The unit symmetric prestrain tau^{mh} for load case L in 0..5 (Voigt
// order); entry (k,l) of tau is 1 on the diagonal cases and 1/2 on the mixed
// ones.
Eigen::Matrix3d unit_prestrain(int L);

} // namespace piezocell
