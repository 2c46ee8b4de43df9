#include "piezocell/corrector.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "piezocell/errors.hpp"

namespace piezocell {

CorrectorTables CorrectorTables::build(const CellSolutionSet& cells) {
    const CellGeometry& g = cells.geometry;
    CorrectorTables t;
    t.n = g.n;
    const std::size_t nvox = g.mask.size();
    for (int c = 0; c < 9; ++c) {
        t.strain[c].assign(nvox, Eigen::Matrix3d::Zero());
        t.grad_phi[c].assign(nvox, Eigen::Vector3d::Zero());
    }
    const double h = 1.0 / g.n;
    const std::array<double, 3> centroid{0.5, 0.5, 0.5};
    Eigen::Matrix<double, 24, 1> ue;
    Eigen::Matrix<double, 8, 1> pe;
    for (int k = 0; k < g.n; ++k)
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i) {
                const std::size_t vox = g.index(i, j, k);
                if (!g.mask[vox]) continue;
                const auto corners = cells.grid.voxel_corners(i, j, k);
                for (int c = 0; c < 9; ++c) {
                    gather_element_vectors(cells, c, corners, ue, pe);
                    t.strain[c][vox] = strain_at(centroid, h, ue);
                    t.grad_phi[c][vox] = gradient_at(centroid, h, pe);
                }
            }
    return t;
}

CorrectorPoint corrector_at(const CorrectorTables& tables,
                            const MacroGradients& macro,
                            std::size_t cell_voxel) {
    CorrectorPoint out;
    out.strain.setZero();
    out.grad_phi.setZero();
    for (int mm = 0; mm < 3; ++mm)
        for (int hh = 0; hh < 3; ++hh) {
            const int c = voigt_index(mm, hh);
            const double coef = macro.strain(mm, hh);
            out.strain += coef * tables.strain[c][cell_voxel];
            out.grad_phi += coef * tables.grad_phi[c][cell_voxel];
        }
    for (int n = 0; n < 3; ++n) {
        const int c = 6 + n;
        const double coef = macro.grad_phi[n];
        out.strain += coef * tables.strain[c][cell_voxel];
        out.grad_phi += coef * tables.grad_phi[c][cell_voxel];
    }
    return out;
}

CorrectorResiduals corrector_residuals(const FieldSolution& fine,
                                       const FieldSolution& macro,
                                       const CellSolutionSet& cells, int m) {
    const CellGeometry& g = cells.geometry;
    if (m < 1 || fine.N != m * g.n)
        throw GridMismatch(
            "fine grid is not the cell resolution times the period count");

    const CorrectorTables tables = CorrectorTables::build(cells);
    const int N = fine.N;
    const double h = 1.0 / N;
    const double vol = h * h * h;

    double acc_s = 0.0, acc_e = 0.0;
    for (int K = 0; K < N; ++K)
        for (int J = 0; J < N; ++J)
            for (int I = 0; I < N; ++I) {
                const std::size_t vox =
                    (static_cast<std::size_t>(K) * N + J) * N + I;
                if (!fine.voxel_mask[vox]) continue;
                const std::array<double, 3> xc{(I + 0.5) * h, (J + 0.5) * h,
                                               (K + 0.5) * h};
                const MacroGradients mg = field_gradients_at(macro, xc);
                const MacroGradients dg = field_gradients_at(fine, xc);
                const std::size_t cvox =
                    g.index(I % g.n, J % g.n, K % g.n);
                const CorrectorPoint cp = corrector_at(tables, mg, cvox);

                const Eigen::Matrix3d ds = dg.strain - mg.strain - cp.strain;
                const Eigen::Vector3d de =
                    dg.grad_phi - mg.grad_phi - cp.grad_phi;
                acc_s += vol * ds.squaredNorm();
                acc_e += vol * de.squaredNorm();
            }

    CorrectorResiduals r;
    r.strain_residual = std::sqrt(acc_s);
    r.efield_residual = std::sqrt(acc_e);

    const Eigen::Vector3d fine_avg = average_u(fine, /*material_only=*/true);
    const Eigen::Vector3d macro_avg =
        g.theta * average_u(macro, /*material_only=*/false);
    const double denom = macro_avg.norm();
    const double gap = (fine_avg - macro_avg).norm();
    r.weak_gap = denom > 0.0 ? gap / denom : gap;
    return r;
}

SweepReport epsilon_sweep(const CellGeometry& cell, const MaterialField& mat,
                          const Eigen::Vector3d& f,
                          const std::vector<int>& m_list, MacroPolicy policy,
                          const HomogenizeOptions& opts) {
    if (m_list.empty())
        throw ConfigError("epsilon sweep needs at least one period count");
    std::set<int> ms;
    for (int m : m_list) {
        if (m < 1) throw ConfigError("period counts must be positive");
        ms.insert(m);
    }

    SweepReport rep;
    rep.policy = policy;

    CellSolutionSet cells = solve_cell_problems(cell, mat, opts.solve);
    rep.homogenization = homogenize(cell, mat, cells, opts);

    const int m_max = *ms.rbegin();
    FieldSolution shared_macro;
    if (policy == MacroPolicy::Finest) {
        MacroProblem mp;
        mp.tensors = rep.homogenization.tensors;
        mp.theta = rep.homogenization.theta;
        mp.f = f;
        mp.N = m_max * cell.n;
        shared_macro = solve_macro(mp, opts.solve);
    }

    for (int m : ms) { // ascending m = descending epsilon
        DnsProblem dp;
        dp.cell = cell;
        dp.material = mat;
        dp.m = m;
        dp.f = f;
        FieldSolution fine = solve_dns(dp, opts.solve);

        const FieldSolution* macro = &shared_macro;
        FieldSolution per_eps_macro;
        if (policy == MacroPolicy::PerEps) {
            MacroProblem mp;
            mp.tensors = rep.homogenization.tensors;
            mp.theta = rep.homogenization.theta;
            mp.f = f;
            mp.N = m * cell.n;
            per_eps_macro = solve_macro(mp, opts.solve);
            macro = &per_eps_macro;
        }

        SweepPoint pt;
        pt.m = m;
        pt.epsilon = 1.0 / m;
        pt.macro_N = macro->N;
        pt.dns_stats = fine.stats;
        pt.residuals = corrector_residuals(fine, *macro, cells, m);
        rep.points.push_back(std::move(pt));
    }

    auto strictly_decreasing = [&](auto proj) {
        for (std::size_t i = 1; i < rep.points.size(); ++i)
            if (!(proj(rep.points[i]) < proj(rep.points[i - 1]))) return false;
        return !rep.points.empty();
    };
    rep.strain_decreasing = strictly_decreasing(
        [](const SweepPoint& p) { return p.residuals.strain_residual; });
    rep.efield_decreasing = strictly_decreasing(
        [](const SweepPoint& p) { return p.residuals.efield_residual; });
    rep.weak_gap_decreasing = strictly_decreasing(
        [](const SweepPoint& p) { return p.residuals.weak_gap; });
    return rep;
}

} // namespace piezocell
