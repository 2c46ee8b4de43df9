// Acceptance harness: nine end-to-end correctness criteria with pinned
// tolerances, one verdict line each. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <piezocell/corrector.hpp>
#include <piezocell/effective.hpp>
#include <piezocell/errors.hpp>
#include <piezocell/io.hpp>
#include <piezocell/macrodns.hpp>
#include <piezocell/runner.hpp>

#include "dense_oracle.hpp"
#include "fixtures.hpp"

using namespace piezocell;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void verdict(int k, bool pass, const std::string& text) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", k,
                text.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

HomogenizeOptions quiet_opts() {
    HomogenizeOptions o;
    o.solve.log = false;
    return o;
}

// --------------------------------------------------------------------------
// 1. A hole-free homogeneous cell is its own effective medium.

void criterion_identity() {
    const double kTol = 1e-10;      // relative coefficient recovery
    const double kTimeLimit = 10.0; // seconds
    auto t0 = std::chrono::steady_clock::now();
    try {
        CellGeometry g = build_cell(8, {});
        MaterialTensors m = pzt::coupled_material();
        HomogenizationResult r =
            homogenize(g, MaterialField::uniform(m), quiet_opts());

        double defect = 0.0, scale = 0.0;
        for (int t = 0; t < 81; ++t) {
            defect = std::max(defect, std::abs(r.tensors.cH[t] - m.c.raw()[t]));
            scale = std::max(scale, std::abs(m.c.raw()[t]));
        }
        for (int t = 0; t < 27; ++t) {
            defect = std::max(defect, std::abs(r.tensors.eH[t] - m.e.raw()[t]));
            defect = std::max(defect, std::abs(r.tensors.fH[t] - m.e.raw()[t]));
            scale = std::max(scale, std::abs(m.e.raw()[t]));
        }
        for (int i = 0; i < 3; ++i)
            for (int n = 0; n < 3; ++n) {
                defect =
                    std::max(defect, std::abs(r.tensors.d(i, n) - m.d(i, n)));
                scale = std::max(scale, std::abs(m.d(i, n)));
            }
        double rel = defect / scale;
        double dt = seconds_since(t0);
        bool pass = rel <= kTol && r.theta == 1.0 && dt < kTimeLimit;
        verdict(1, pass,
                fmt("homogeneous full cell at n=8 reproduces its "
                    "constituents (defect %.3e <= %.0e, theta %s, %.1f s < "
                    "%.0f s)",
                    rel, kTol, r.theta == 1.0 ? "exact" : "WRONG", dt,
                    kTimeLimit));
    } catch (const std::exception& e) {
        verdict(1, false, fmt("exception: %s", e.what()));
    }
}

// --------------------------------------------------------------------------
// 2 and 3. Structural identities and the energy reformulation on a genuinely
// perforated, fully coupled cell.

void criterion_sphere_certificates() {
    const double kDefectTol = 1e-8;
    const double kTimeLimit = 120.0;
    auto t0 = std::chrono::steady_clock::now();
    try {
        CellGeometry g = pzt::sphere_cell(16, 0.25);
        MaterialField mat = MaterialField::uniform(pzt::coupled_material());
        HomogenizationResult r = homogenize(g, mat, quiet_opts());
        double dt = seconds_since(t0);

        double worst = std::max({r.diagnostics.cH_major_symmetry_defect,
                                 r.diagnostics.eH_pair_symmetry_defect,
                                 r.diagnostics.eH_fH_defect,
                                 r.diagnostics.dH_symmetry_defect});
        const Matrix6d cv = voigt_pack(r.tensors.c_symmetrized());
        const Eigen::Matrix3d dv = r.tensors.d_symmetrized().matrix();
        bool positive =
            r.diagnostics.cH_min_eigenvalue > definiteness_margin(cv.trace()) &&
            r.diagnostics.dH_min_eigenvalue > definiteness_margin(dv.trace());

        bool pass2 = worst <= kDefectTol && positive && dt < kTimeLimit;
        verdict(2, pass2,
                fmt("perforated cell (sphere r=0.25, n=16): symmetry and "
                    "coupling defects %.3e <= %.0e, min eigenvalues %.4g / "
                    "%.4g positive, %.1f s < %.0f s",
                    worst, kDefectTol, r.diagnostics.cH_min_eigenvalue,
                    r.diagnostics.dH_min_eigenvalue, dt, kTimeLimit));

        double energy_worst =
            std::max(r.cross_check.cH_direct_vs_energy_defect,
                     r.cross_check.dH_direct_vs_energy_defect);
        verdict(3, energy_worst <= kDefectTol,
                fmt("independent energy-form evaluation agrees with the "
                    "direct integrals (defect %.3e <= %.0e)",
                    energy_worst, kDefectTol));
    } catch (const std::exception& e) {
        verdict(2, false, fmt("exception: %s", e.what()));
        verdict(3, false, "skipped: criterion 2 threw");
    }
}

// --------------------------------------------------------------------------
// 4. Entrywise agreement with an independently coded dense reference at n=2.

void criterion_dense_oracle() {
    const double kSystemTol = 1e-9;
    const double kSolutionTol = 1e-9;
    try {
        double worst_system = 0.0, worst_solution = 0.0;
        for (bool with_void : {false, true}) {
            std::vector<std::uint8_t> mask(8, 1);
            if (with_void) mask[0] = 0;
            CellGeometry g = build_cell_from_mask(2, std::move(mask));
            MaterialTensors m = pzt::skewed_material();
            MaterialField mat = MaterialField::uniform(m);

            CellSystem sys = assemble_cell_system(g, mat);
            if (sys.grid.n_active != 8)
                throw Error("unexpected active-node count at n=2");
            pzt::DenseSystem ref = pzt::dense_cell_system(g, m);

            Eigen::MatrixXd lib = pzt::csr_to_dense(sys.K);
            double kscale = ref.K.cwiseAbs().maxCoeff();
            worst_system = std::max(
                worst_system,
                (lib - ref.K).cwiseAbs().maxCoeff() / kscale);
            worst_system = std::max(
                worst_system,
                (sys.rhs - ref.rhs).cwiseAbs().maxCoeff() / kscale);

            SolveOptions so;
            so.log = false;
            CellSolutionSet sol = solve_cell_problems(g, mat, sys, so);
            Eigen::FullPivLU<Eigen::MatrixXd> lu(ref.K);
            for (int c = 0; c < 9; ++c) {
                Eigen::VectorXd xref = lu.solve(ref.rhs.col(c));
                double scale = xref.cwiseAbs().maxCoeff();
                double gap = (sol.x[c] - xref).cwiseAbs().maxCoeff();
                worst_solution = std::max(
                    worst_solution, scale > 1e-12 ? gap / scale : gap);
            }
        }
        bool pass = worst_system <= kSystemTol &&
                    worst_solution <= kSolutionTol;
        verdict(4, pass,
                fmt("assembled system and all nine solutions match the dense "
                    "straight-loop reference at n=2 with and without a void "
                    "voxel (system %.3e <= %.0e, solutions %.3e <= %.0e)",
                    worst_system, kSystemTol, worst_solution, kSolutionTol));
    } catch (const std::exception& e) {
        verdict(4, false, fmt("exception: %s", e.what()));
    }
}

// --------------------------------------------------------------------------
// 5. Laminate closed forms: series/parallel dielectric and the
// one-dimensional elastic cell ODE.

void criterion_laminate() {
    const double kDielectricTol = 1e-9;
    const double kElasticTol = 1e-6;
    try {
        CellGeometry g = build_cell(4, {});

        MaterialTensors a = pzt::decoupled_material();
        MaterialTensors b = a;
        b.d = DielectricTensor::identity_scaled(3.0);
        HomogenizationResult rd =
            homogenize(g, pzt::laminate_field(g, a, b), quiet_opts());
        double d_defect = std::max(
            {std::abs(rd.tensors.d(0, 0) - 1.5) / 1.5,
             std::abs(rd.tensors.d(1, 1) - 2.0) / 2.0,
             std::abs(rd.tensors.d(2, 2) - 2.0) / 2.0});

        MaterialTensors ea, eb;
        ea.c = ElasticTensor::isotropic(1.0, 1.0); // lambda + 2 mu = 3
        ea.d = DielectricTensor::identity_scaled(1.0);
        eb.c = ElasticTensor::isotropic(2.0, 3.0); // lambda + 2 mu = 8
        eb.d = DielectricTensor::identity_scaled(1.0);
        HomogenizationResult re =
            homogenize(g, pzt::laminate_field(g, ea, eb), quiet_opts());
        // One-dimensional cell ODE along the laminate normal: constant flux
        // sigma = M(y) (1 + w'(y)) with unit mean strain gives
        // sigma = <1/M>^-1, the harmonic mean (here 2/(1/3 + 1/8) = 48/11).
        const double harmonic = 2.0 / (1.0 / 3.0 + 1.0 / 8.0);
        double c_defect =
            std::abs(re.tensors.c(0, 0, 0, 0) - harmonic) / harmonic;

        bool pass = d_defect <= kDielectricTol && c_defect <= kElasticTol;
        verdict(5, pass,
                fmt("two-phase laminate: dielectric series/parallel values "
                    "1.5 / 2.0 / 2.0 (defect %.3e <= %.0e), elastic normal "
                    "stiffness 48/11 from the cell ODE (defect %.3e <= %.0e)",
                    d_defect, kDielectricTol, c_defect, kElasticTol));
    } catch (const std::exception& e) {
        verdict(5, false, fmt("exception: %s", e.what()));
    }
}

// --------------------------------------------------------------------------
// 6. Without piezoelectric coupling the elastic and electric cell problems
// must not leak into each other.

void criterion_decoupled() {
    const double kTol = 1e-10;
    try {
        CellGeometry g = pzt::sphere_cell(8, 0.25);
        MaterialField mat = MaterialField::uniform(pzt::decoupled_material());
        SolveOptions so;
        so.log = false;
        CellSolutionSet sol = solve_cell_problems(g, mat, so);

        double worst = 0.0;
        for (int c = 0; c < 9; ++c) {
            double umax = 0.0, pmax = 0.0;
            for (std::int64_t r = 0; r < sol.grid.n_active; ++r) {
                for (int axis = 0; axis < 3; ++axis)
                    umax = std::max(umax, std::abs(sol.x[c][4 * r + axis]));
                pmax = std::max(pmax, std::abs(sol.x[c][4 * r + 3]));
            }
            if (c < 6) {
                if (umax <= 0.0) throw Error("degenerate elastic response");
                worst = std::max(worst, pmax / umax);
            } else {
                if (pmax <= 0.0) throw Error("degenerate electric response");
                worst = std::max(worst, umax / pmax);
            }
        }
        verdict(6, worst <= kTol,
                fmt("uncoupled material: potentials of the elastic cases and "
                    "displacements of the electric cases vanish (leak %.3e "
                    "<= %.0e of the active response)",
                    worst, kTol));
    } catch (const std::exception& e) {
        verdict(6, false, fmt("exception: %s", e.what()));
    }
}

// --------------------------------------------------------------------------
// 7. Two-scale convergence study: the corrector residuals shrink with
// epsilon.

void criterion_sweep() {
    const double kTimeLimit = 1800.0;
    auto t0 = std::chrono::steady_clock::now();
    try {
        CellGeometry cell = pzt::sphere_cell(8, 0.25);
        MaterialField mat = MaterialField::uniform(pzt::coupled_material());
        SweepReport rep =
            epsilon_sweep(cell, mat, Eigen::Vector3d(0, 0, -1), {2, 4, 8},
                          MacroPolicy::Finest, quiet_opts());

        std::printf("    epsilon      strain_residual  efield_residual  "
                    "weak_gap\n");
        for (const SweepPoint& p : rep.points)
            std::printf("    1/%-10d %-16.9e %-16.9e %.9e\n", p.m,
                        p.residuals.strain_residual,
                        p.residuals.efield_residual, p.residuals.weak_gap);

        double dt = seconds_since(t0);
        bool pass = rep.points.size() == 3 && rep.strain_decreasing &&
                    rep.efield_decreasing && rep.weak_gap_decreasing &&
                    dt < kTimeLimit;
        verdict(7, pass,
                fmt("epsilon sweep 1/2, 1/4, 1/8 at cell resolution 8 with "
                    "the shared finest macro grid: strain %s, field %s, weak "
                    "gap %s decreasing (%.0f s < %.0f s)",
                    rep.strain_decreasing ? "strictly" : "NOT",
                    rep.efield_decreasing ? "strictly" : "NOT",
                    rep.weak_gap_decreasing ? "" : "NOT", dt, kTimeLimit));
    } catch (const std::exception& e) {
        verdict(7, false, fmt("exception: %s", e.what()));
    }
}

// --------------------------------------------------------------------------
// 8. Covariance under a global material scaling.

void criterion_scaling() {
    const double kTol = 1e-10;
    try {
        CellGeometry g = pzt::sphere_cell(8, 0.25);
        MaterialField mat = MaterialField::uniform(pzt::coupled_material());
        MaterialField mat7 = mat.scaled(7.0);
        SolveOptions so;
        so.log = false;

        CellSolutionSet s1 = solve_cell_problems(g, mat, so);
        CellSolutionSet s7 = solve_cell_problems(g, mat7, so);
        double field_defect = 0.0;
        for (int c = 0; c < 9; ++c) {
            double scale = s1.x[c].cwiseAbs().maxCoeff();
            field_defect = std::max(
                field_defect,
                (s1.x[c].head(4 * s1.grid.n_active) -
                 s7.x[c].head(4 * s7.grid.n_active))
                        .cwiseAbs()
                        .maxCoeff() /
                    scale);
        }

        EffectiveTensors t1 = effective_cH_eH_fH_dH(s1, mat, g);
        EffectiveTensors t7 = effective_cH_eH_fH_dH(s7, mat7, g);
        double tensor_defect = 0.0, tensor_scale = 0.0;
        auto acc = [&](const double* a, const double* b, std::size_t n) {
            for (std::size_t t = 0; t < n; ++t) {
                tensor_defect =
                    std::max(tensor_defect, std::abs(7.0 * a[t] - b[t]));
                tensor_scale = std::max(tensor_scale, std::abs(b[t]));
            }
        };
        acc(t1.cH.data(), t7.cH.data(), 81);
        acc(t1.eH.data(), t7.eH.data(), 27);
        acc(t1.fH.data(), t7.fH.data(), 27);
        acc(t1.dH.data(), t7.dH.data(), 9);
        tensor_defect /= tensor_scale;

        bool pass = tensor_defect <= kTol && field_defect <= kTol;
        verdict(8, pass,
                fmt("scaling every constituent tensor by 7 scales the "
                    "effective tensors by 7 (defect %.3e <= %.0e) and leaves "
                    "the corrector fields unchanged (defect %.3e <= %.0e)",
                    tensor_defect, kTol, field_defect, kTol));
    } catch (const std::exception& e) {
        verdict(8, false, fmt("exception: %s", e.what()));
    }
}

// --------------------------------------------------------------------------
// 9. Determinism of the full validation pipeline through the CLI.

void criterion_determinism() {
    try {
        const char* bin = std::getenv("PIEZOCELL_BIN");
#ifdef PIEZOCELL_BIN
        if (!bin) bin = PIEZOCELL_BIN;
#endif
        if (!bin) throw Error("PIEZOCELL_BIN is not set");

        fs::path dir = fs::temp_directory_path() / "piezocell_acceptance";
        fs::remove_all(dir);
        fs::create_directories(dir / "run1");
        fs::create_directories(dir / "run2");

        Json cfg = Json::object();
        cfg["mode"] = "validate";
        Json geo = Json::object();
        geo["resolution"] = 8;
        Json hole = Json::object();
        hole["type"] = "sphere";
        hole["center"] = Json::array({0.5, 0.5, 0.5});
        hole["radius"] = 0.25;
        geo["holes"] = Json::array({hole});
        cfg["geometry"] = std::move(geo);
        cfg["material"] = material_to_json(pzt::coupled_material());
        fs::path cfg_path = dir / "config.json";
        write_text_file(cfg_path.string(), dump_json(cfg));

        auto run = [&](const std::string& out) {
            std::string cmd = std::string(bin) + " validate --config " +
                              cfg_path.string() + " --out " + out + " > " +
                              out + "/log.txt 2>&1";
            return std::system(cmd.c_str());
        };
        int rc1 = run((dir / "run1").string());
        int rc2 = run((dir / "run2").string());
        std::string a = read_text_file((dir / "run1" / "validate.json").string());
        std::string b = read_text_file((dir / "run2" / "validate.json").string());

        bool pass = rc1 == 0 && rc2 == 0 && !a.empty() && a == b;
        verdict(9, pass,
                fmt("two identical validation runs exit cleanly and their "
                    "reports are byte-identical (%zu bytes%s)",
                    a.size(), a == b ? "" : ", DIFFER"));
    } catch (const std::exception& e) {
        verdict(9, false, fmt("exception: %s", e.what()));
    }
}

} // namespace

int main() {
    std::printf("acceptance criteria\n===================\n");
    criterion_identity();
    criterion_sphere_certificates(); // also emits criterion 3
    criterion_dense_oracle();
    criterion_laminate();
    criterion_decoupled();
    criterion_sweep();
    criterion_scaling();
    criterion_determinism();
    if (g_failures == 0) {
        std::printf("all 9 acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria FAILED\n", g_failures);
    return 1;
}
