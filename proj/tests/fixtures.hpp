#pragma once

// Shared material/geometry builders used across the test suites.

#include <array>

#include <piezocell/cellfem.hpp>
#include <piezocell/geometry.hpp>
#include <piezocell/tensors.hpp>

namespace pzt {

// Isotropic elasticity (lambda = mu = 1), unit dielectric, and a transversely
// isotropic coupling pattern (poled along axis 3) with nonzero 31/33/15
// entries - a fully coupled but well-conditioned fixture.
inline piezocell::MaterialTensors coupled_material() {
    piezocell::MaterialTensors m;
    m.c = piezocell::ElasticTensor::isotropic(1.0, 1.0);
    m.d = piezocell::DielectricTensor::identity_scaled(1.0);
    const double e31 = 0.4, e33 = 0.9, e15 = 0.55;
    // e_{kij}: k is the electric index; (ij) the strain pair.
    m.e.set(2, 0, 0, e31);
    m.e.set(2, 1, 1, e31);
    m.e.set(2, 2, 2, e33);
    m.e.set(0, 0, 2, e15); // pair 13
    m.e.set(1, 1, 2, e15); // pair 23
    return m;
}

inline piezocell::MaterialTensors decoupled_material() {
    piezocell::MaterialTensors m = coupled_material();
    m.e = piezocell::PiezoTensor{};
    return m;
}

// Generic anisotropic-but-admissible material: SPD perturbations of the
// isotropic/identity baseline, exercising every tensor slot.
inline piezocell::MaterialTensors skewed_material() {
    piezocell::MaterialTensors m;
    m.c = piezocell::ElasticTensor::isotropic(1.3, 0.8);
    m.c.set(0, 0, 1, 1, 1.3 + 0.15); // perturb c_1122 keeping symmetry
    m.c.set(0, 1, 0, 1, 0.8 + 0.1);  // perturb c_1212
    m.d = piezocell::DielectricTensor::identity_scaled(2.0);
    m.d.set(0, 1, 0.3);
    m.d.set(1, 2, -0.2);
    m.e.set(0, 0, 0, 0.2);
    m.e.set(1, 0, 1, -0.15);
    m.e.set(2, 2, 2, 0.45);
    m.e.set(0, 1, 2, 0.1);
    return m;
}

// Centered-sphere perforation, the workhorse perforated geometry.
inline piezocell::CellGeometry sphere_cell(int n, double r = 0.25) {
    return piezocell::build_cell(
        n, {piezocell::HolePrimitive::sphere({0.5, 0.5, 0.5}, r)});
}

// Two-phase laminate in y1: phase 0 on [0, cut), phase 1 on [cut, 1), no
// holes. cut must be voxel-aligned for exactness.
inline piezocell::MaterialField
laminate_field(const piezocell::CellGeometry& g,
               const piezocell::MaterialTensors& a,
               const piezocell::MaterialTensors& b, double cut = 0.5) {
    std::vector<std::int32_t> index(g.voxel_count(), 0);
    for (int k = 0; k < g.n; ++k)
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i) {
                const double y1 = (i + 0.5) / g.n;
                index[g.index(i, j, k)] = y1 >= cut ? 1 : 0;
            }
    return piezocell::MaterialField::from_table({a, b}, std::move(index));
}

} // namespace pzt
