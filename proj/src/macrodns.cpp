#include "piezocell/macrodns.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "piezocell/errors.hpp"

namespace piezocell {

// ---------------------------------------------------------------------------
// Grid

std::array<int, 8> BoxGrid::voxel_corners(int i, int j, int k) const {
    std::array<int, 8> c{};
    for (int A = 0; A < 8; ++A) {
        auto o = corner_offset(A);
        c[A] = node_index(i + o[0], j + o[1], k + o[2]);
    }
    return c;
}

BoxGrid BoxGrid::build(int N, std::vector<std::uint8_t> mask) {
    if (N < 1) throw ConfigError("box grid needs at least one voxel per axis");
    const std::size_t nvox = static_cast<std::size_t>(N) * N * N;
    if (mask.size() != nvox)
        throw ShapeMismatch("box mask has wrong length for its resolution");
    for (auto& v : mask) v = v ? 1 : 0;

    BoxGrid g;
    g.N = N;
    g.voxel_mask = std::move(mask);

    const int P = N + 1;
    std::vector<std::uint8_t> touched(static_cast<std::size_t>(P) * P * P, 0);
    for (int k = 0; k < N; ++k)
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < N; ++i) {
                if (!g.voxel_mask[g.voxel_index(i, j, k)]) continue;
                for (int n : g.voxel_corners(i, j, k)) touched[n] = 1;
            }

    g.node_rank.assign(static_cast<std::size_t>(P) * P * P, -1);
    for (int k = 0; k < P; ++k)
        for (int j = 0; j < P; ++j)
            for (int i = 0; i < P; ++i) {
                const int lin = g.node_index(i, j, k);
                const bool interior = i > 0 && i < N && j > 0 && j < N &&
                                      k > 0 && k < N;
                if (!interior || !touched[lin]) continue;
                g.node_rank[lin] = static_cast<std::int32_t>(g.n_active++);
                g.active_nodes.push_back(lin);
            }
    if (g.n_active == 0)
        throw ConfigError(
            "box grid has no interior node touching material; refine the grid");
    return g;
}

// ---------------------------------------------------------------------------
// Assembly

namespace {

const ElementMatrices& cached_element(std::map<int, ElementMatrices>& cache,
                                      const MaterialField& mat,
                                      std::size_t voxel,
                                      const HexQuadrature& q) {
    const int ph = mat.phase(voxel);
    auto it = cache.find(ph);
    if (it == cache.end())
        it = cache.emplace(ph, make_element_matrices(mat.table[ph], q)).first;
    return it->second;
}

} // namespace

BoxAssembly assemble_box_system(int N, std::vector<std::uint8_t> mask,
                                const MaterialField& mat,
                                const Eigen::Vector3d& f, double load_scale) {
    BoxAssembly out;
    out.grid = BoxGrid::build(N, std::move(mask));
    const BoxGrid& g = out.grid;
    mat.check_compatible(static_cast<std::size_t>(N) * N * N);

    // Neighbor ranks (including self) of every active node via shared
    // material voxels.
    std::vector<std::vector<std::int32_t>> nbr(g.n_active);
    for (int k = 0; k < N; ++k)
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < N; ++i) {
                if (!g.voxel_mask[g.voxel_index(i, j, k)]) continue;
                const auto corners = g.voxel_corners(i, j, k);
                std::array<std::int32_t, 8> rk{};
                for (int A = 0; A < 8; ++A) rk[A] = g.node_rank[corners[A]];
                for (int A = 0; A < 8; ++A) {
                    if (rk[A] < 0) continue;
                    auto& lst = nbr[rk[A]];
                    for (int B = 0; B < 8; ++B)
                        if (rk[B] >= 0) lst.push_back(rk[B]);
                }
            }
    std::int64_t nnz = 0;
    for (auto& lst : nbr) {
        std::sort(lst.begin(), lst.end());
        lst.erase(std::unique(lst.begin(), lst.end()), lst.end());
        nnz += 16 * static_cast<std::int64_t>(lst.size());
    }

    const std::int64_t ndof = 4 * g.n_active;
    out.K.begin_pattern(ndof, ndof, nnz);
    std::vector<std::int32_t> cols;
    for (std::int64_t r = 0; r < g.n_active; ++r) {
        cols.clear();
        for (std::int32_t s : nbr[r])
            for (int c = 0; c < 4; ++c) cols.push_back(4 * s + c);
        for (int c = 0; c < 4; ++c)
            out.K.push_row(cols.data(), static_cast<int>(cols.size()));
    }
    out.K.finalize_pattern();
    nbr.clear();
    nbr.shrink_to_fit();

    out.kinds.assign(ndof, DofKind::Displacement);
    for (std::int64_t r = 0; r < g.n_active; ++r)
        out.kinds[4 * r + 3] = DofKind::Potential;

    out.rhs = Eigen::VectorXd::Zero(ndof);
    const double h = 1.0 / N;
    const HexQuadrature q = HexQuadrature::make(h);
    const double corner_weight = h * h * h / 8.0; // exact for trilinear shapes
    std::map<int, ElementMatrices> cache;

    for (int k = 0; k < N; ++k)
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < N; ++i) {
                const std::size_t vox = g.voxel_index(i, j, k);
                if (!g.voxel_mask[vox]) continue;
                const ElementMatrices& em = cached_element(cache, mat, vox, q);
                const auto corners = g.voxel_corners(i, j, k);
                std::array<std::int32_t, 8> rk{};
                for (int A = 0; A < 8; ++A) rk[A] = g.node_rank[corners[A]];

                for (int A = 0; A < 8; ++A) {
                    if (rk[A] < 0) continue;
                    for (int B = 0; B < 8; ++B) {
                        if (rk[B] < 0) continue;
                        for (int a = 0; a < 3; ++a)
                            for (int b = 0; b < 3; ++b)
                                out.K.add(4 * rk[A] + a, 4 * rk[B] + b,
                                          em.Kuu(A * 3 + a, B * 3 + b));
                        for (int a = 0; a < 3; ++a) {
                            const double v = em.Kup(A * 3 + a, B);
                            out.K.add(4 * rk[A] + a, 4 * rk[B] + 3, v);
                            out.K.add(4 * rk[B] + 3, 4 * rk[A] + a, v);
                        }
                        out.K.add(4 * rk[A] + 3, 4 * rk[B] + 3, -em.Kpp(A, B));
                    }
                    for (int a = 0; a < 3; ++a)
                        out.rhs[4 * rk[A] + a] +=
                            load_scale * f[a] * corner_weight;
                }
            }
    return out;
}

// ---------------------------------------------------------------------------
// Shared solve path

namespace {

FieldSolution solve_box(const BoxAssembly& asm_, const MaterialField& mat,
                        const SolveOptions& opts, const std::string& label) {
    const BoxGrid& g = asm_.grid;
    SolveOptions o = opts;
    o.prefer_direct = false; // iterative primary, direct kept as fallback

    SymmetricSolver solver(asm_.K, asm_.kinds, o);
    Eigen::VectorXd x;
    FieldSolution sol;
    sol.stats = solver.solve(asm_.rhs, x, label);
    sol.N = g.N;
    sol.voxel_mask = g.voxel_mask;

    const int P = g.N + 1;
    sol.u = Eigen::VectorXd::Zero(3 * static_cast<std::int64_t>(P) * P * P);
    sol.phi = Eigen::VectorXd::Zero(static_cast<std::int64_t>(P) * P * P);
    for (std::int64_t r = 0; r < g.n_active; ++r) {
        const int node = g.active_nodes[r];
        for (int c = 0; c < 3; ++c) sol.u[3 * node + c] = x[4 * r + c];
        sol.phi[node] = x[4 * r + 3];
    }

    // Energy balance: testing the solved equations with the solution itself
    // gives  A(u,u) + D(phi,phi) = load . u  exactly at the discrete level.
    // Recompute the left side element-by-element as an independent check on
    // assembly and solver.
    const double h = 1.0 / g.N;
    const HexQuadrature q = HexQuadrature::make(h);
    std::map<int, ElementMatrices> cache;
    double lhs = 0.0;
    Eigen::Matrix<double, 24, 1> ue;
    Eigen::Matrix<double, 8, 1> pe;
    for (int k = 0; k < g.N; ++k)
        for (int j = 0; j < g.N; ++j)
            for (int i = 0; i < g.N; ++i) {
                const std::size_t vox = g.voxel_index(i, j, k);
                if (!g.voxel_mask[vox]) continue;
                const ElementMatrices& em = cached_element(cache, mat, vox, q);
                const auto corners = g.voxel_corners(i, j, k);
                for (int A = 0; A < 8; ++A) {
                    const int n = corners[A];
                    for (int c = 0; c < 3; ++c) ue[A * 3 + c] = sol.u[3 * n + c];
                    pe[A] = sol.phi[n];
                }
                lhs += ue.dot(em.Kuu * ue) + pe.dot(em.Kpp * pe);
            }
    sol.energy_lhs = lhs;
    sol.energy_rhs = asm_.rhs.dot(x);
    const double denom =
        std::max(std::abs(sol.energy_lhs), std::abs(sol.energy_rhs));
    if (denom > 0.0 &&
        std::abs(sol.energy_lhs - sol.energy_rhs) > 1e-8 * denom)
        throw CertificateFailure(
            "energy balance violated in box solve " + label + ": " +
            std::to_string(sol.energy_lhs) + " vs " +
            std::to_string(sol.energy_rhs));
    return sol;
}

} // namespace

// ---------------------------------------------------------------------------
// Macro path

FieldSolution solve_macro(const MacroProblem& p, const SolveOptions& opts) {
    if (!(p.theta > 0.0 && p.theta <= 1.0))
        throw ConfigError("volume fraction must lie in (0,1]");

    MaterialTensors mt;
    mt.c = p.tensors.c_symmetrized();
    mt.e = p.tensors.e_as_tensor();
    mt.d = p.tensors.d_symmetrized();

    // Positivity gate on the symmetrized tensors before any solve.
    Eigen::Matrix<double, 6, 6> cv = voigt_pack(mt.c);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> ec(cv);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> ed(mt.d.matrix());
    if (ec.eigenvalues().minCoeff() <= definiteness_margin(cv.trace()))
        throw CertificateFailure(
            "effective elasticity tensor fails the positivity certificate");
    if (ed.eigenvalues().minCoeff() <=
        definiteness_margin(mt.d.matrix().trace()))
        throw CertificateFailure(
            "effective dielectric tensor fails the positivity certificate");

    std::vector<std::uint8_t> mask(
        static_cast<std::size_t>(p.N) * p.N * p.N, 1);
    BoxAssembly asm_ = assemble_box_system(
        p.N, std::move(mask), MaterialField::uniform(mt), p.f, p.theta);
    return solve_box(asm_, MaterialField::uniform(mt), opts, "macro");
}

// ---------------------------------------------------------------------------
// DNS path

std::vector<std::uint8_t> tile_mask(const CellGeometry& cell, int m) {
    const int N = m * cell.n;
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(N) * N * N);
    for (int k = 0; k < N; ++k)
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < N; ++i)
                mask[(static_cast<std::size_t>(k) * N + j) * N + i] =
                    cell.mask[cell.index(i % cell.n, j % cell.n, k % cell.n)];
    return mask;
}

MaterialField tile_material(const CellGeometry& cell, const MaterialField& mat,
                            int m) {
    MaterialField out;
    out.table = mat.table;
    if (mat.voxel_index.empty()) return out; // uniform stays uniform
    const int N = m * cell.n;
    out.voxel_index.resize(static_cast<std::size_t>(N) * N * N);
    for (int k = 0; k < N; ++k)
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < N; ++i)
                out.voxel_index[(static_cast<std::size_t>(k) * N + j) * N + i] =
                    static_cast<std::int32_t>(mat.phase(
                        cell.index(i % cell.n, j % cell.n, k % cell.n)));
    return out;
}

FieldSolution solve_dns(const DnsProblem& p, const SolveOptions& opts) {
    if (p.m < 1) throw ConfigError("period count must be at least 1");
    p.material.check_compatible(
        static_cast<std::size_t>(p.cell.n) * p.cell.n * p.cell.n);
    if (hole_touches_cell_boundary(p.cell))
        throw HoleTouchesBoundary(
            "void voxels meet the cell boundary; the tiled domain would "
            "perforate the outer boundary");

    const int N = p.grid_N();
    MaterialField tiled = tile_material(p.cell, p.material, p.m);
    BoxAssembly asm_ =
        assemble_box_system(N, tile_mask(p.cell, p.m), tiled, p.f, 1.0);
    return solve_box(asm_, tiled, opts, "dns_m" + std::to_string(p.m));
}

// ---------------------------------------------------------------------------
// Point evaluation and averages

namespace {

struct LocatedVoxel {
    int i, j, k;
    std::array<double, 3> xi;
};

LocatedVoxel locate(int N, const std::array<double, 3>& x) {
    LocatedVoxel lv{};
    int* idx[3] = {&lv.i, &lv.j, &lv.k};
    for (int a = 0; a < 3; ++a) {
        double t = x[a] * N;
        int c = static_cast<int>(std::floor(t));
        c = std::min(std::max(c, 0), N - 1);
        *idx[a] = c;
        lv.xi[a] = t - c;
    }
    return lv;
}

void gather_box(const FieldSolution& s, int i, int j, int k,
                Eigen::Matrix<double, 24, 1>& ue,
                Eigen::Matrix<double, 8, 1>& pe) {
    const int P = s.N + 1;
    for (int A = 0; A < 8; ++A) {
        auto o = corner_offset(A);
        const int n = ((k + o[2]) * P + (j + o[1])) * P + (i + o[0]);
        for (int c = 0; c < 3; ++c) ue[A * 3 + c] = s.u[3 * n + c];
        pe[A] = s.phi[n];
    }
}

} // namespace

MacroGradients field_gradients_at(const FieldSolution& s,
                                  const std::array<double, 3>& x) {
    const auto lv = locate(s.N, x);
    Eigen::Matrix<double, 24, 1> ue;
    Eigen::Matrix<double, 8, 1> pe;
    gather_box(s, lv.i, lv.j, lv.k, ue, pe);
    MacroGradients out;
    const double h = 1.0 / s.N;
    out.strain = strain_at(lv.xi, h, ue);
    out.grad_phi = gradient_at(lv.xi, h, pe);
    return out;
}

Eigen::Vector3d field_value_at(const FieldSolution& s,
                               const std::array<double, 3>& x) {
    const auto lv = locate(s.N, x);
    Eigen::Matrix<double, 24, 1> ue;
    Eigen::Matrix<double, 8, 1> pe;
    gather_box(s, lv.i, lv.j, lv.k, ue, pe);
    return vector_value_at(lv.xi, ue);
}

Eigen::Vector3d average_u(const FieldSolution& s, bool material_only) {
    // The integral of a trilinear field over one voxel is h^3/8 times the sum
    // of its corner values, so the volume integral below is exact.
    const int N = s.N;
    const int P = N + 1;
    const double w = 1.0 / (8.0 * N * N * N);
    Eigen::Vector3d acc = Eigen::Vector3d::Zero();
    for (int k = 0; k < N; ++k)
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < N; ++i) {
                if (material_only &&
                    !s.voxel_mask[(static_cast<std::size_t>(k) * N + j) * N + i])
                    continue;
                for (int A = 0; A < 8; ++A) {
                    auto o = corner_offset(A);
                    const int n =
                        ((k + o[2]) * P + (j + o[1])) * P + (i + o[0]);
                    for (int c = 0; c < 3; ++c) acc[c] += w * s.u[3 * n + c];
                }
            }
    return acc;
}

} // namespace piezocell
