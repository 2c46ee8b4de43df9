#include "piezocell/runner.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "piezocell/corrector.hpp"
#include "piezocell/effective.hpp"
#include "piezocell/errors.hpp"
#include "piezocell/io.hpp"
#include "piezocell/macrodns.hpp"

namespace piezocell {

namespace {

namespace fs = std::filesystem;

struct RunContext {
    Json config;
    std::string base_dir; // directory of the config file
    std::string out_dir;
};

std::string join_out(const RunContext& ctx, const std::string& name) {
    return (fs::path(ctx.out_dir) / name).string();
}

std::string resolve_input(const RunContext& ctx, const std::string& rel) {
    if (!rel.empty() && rel.front() == '/') return rel;
    return (fs::path(ctx.base_dir) / rel).string();
}

// --------------------------------------------------------------------------
// Config pieces

CellGeometry parse_geometry(const RunContext& ctx) {
    if (!ctx.config.contains("geometry"))
        throw ConfigError("config misses \"geometry\"");
    return geometry_from_json(ctx.config.at("geometry"), ctx.base_dir);
}

MaterialTensors parse_one_material(const RunContext& ctx, const Json& entry) {
    if (entry.is_string())
        return load_material(resolve_input(ctx, entry.get<std::string>()));
    if (entry.is_object()) return material_from_json(entry);
    throw ConfigError("material entries must be file paths or inline records");
}

MaterialField parse_material(const RunContext& ctx, const CellGeometry& g) {
    if (!ctx.config.contains("material"))
        throw ConfigError("config misses \"material\"");
    const Json& m = ctx.config.at("material");
    if (m.is_object() && m.contains("phases")) {
        const Json& ph = m.at("phases");
        if (!ph.is_array() || ph.empty())
            throw ConfigError("\"phases\" must be a non-empty array");
        std::vector<MaterialTensors> table;
        for (const Json& e : ph) table.push_back(parse_one_material(ctx, e));
        if (!m.contains("phase_file"))
            throw ConfigError("multi-phase material needs \"phase_file\"");
        const std::string bytes = read_text_file(
            resolve_input(ctx, m.at("phase_file").get<std::string>()));
        if (bytes.size() != g.voxel_count())
            throw ShapeMismatch("phase file must hold exactly n^3 bytes");
        std::vector<std::int32_t> index(bytes.size());
        for (std::size_t v = 0; v < bytes.size(); ++v) {
            index[v] = static_cast<unsigned char>(bytes[v]);
            if (index[v] >= static_cast<std::int32_t>(table.size()))
                throw ConfigError("phase file references a missing phase");
        }
        return MaterialField::from_table(std::move(table), std::move(index));
    }
    return MaterialField::uniform(parse_one_material(ctx, m));
}

Eigen::Vector3d parse_body_force(const RunContext& ctx) {
    if (!ctx.config.contains("body_force")) return {0.0, 0.0, -1.0};
    const Json& f = ctx.config.at("body_force");
    if (!f.is_array() || f.size() != 3)
        throw ConfigError("\"body_force\" must have 3 entries");
    Eigen::Vector3d v;
    for (int i = 0; i < 3; ++i) {
        if (!f[i].is_number())
            throw ConfigError("\"body_force\" entries must be numbers");
        v[i] = f[i].get<double>();
    }
    return v;
}

HomogenizeOptions parse_options(const RunContext& ctx) {
    HomogenizeOptions opts;
    if (ctx.config.contains("tolerances")) {
        const Json& t = ctx.config.at("tolerances");
        if (!t.is_object())
            throw ConfigError("\"tolerances\" must be an object");
        if (t.contains("solver_rel_tol"))
            opts.solve.rel_tol = t.at("solver_rel_tol").get<double>();
        if (t.contains("certificate_tol"))
            opts.certificate_tol = t.at("certificate_tol").get<double>();
        if (!(opts.solve.rel_tol > 0.0) || !(opts.certificate_tol > 0.0))
            throw ConfigError("tolerances must be positive");
    }
    return opts;
}

int parse_int(const RunContext& ctx, const char* key, int fallback,
              bool required) {
    if (!ctx.config.contains(key)) {
        if (required)
            throw ConfigError(std::string("config misses \"") + key + "\"");
        return fallback;
    }
    const Json& v = ctx.config.at(key);
    if (!v.is_number_integer())
        throw ConfigError(std::string("\"") + key + "\" must be an integer");
    return v.get<int>();
}

// --------------------------------------------------------------------------
// Effective tensors from a previous export (macro mode shortcut)

EffectiveTensors tensors_from_export(const Json& j, double& theta) {
    if (!j.contains("effective") || !j.contains("theta"))
        throw ConfigError("effective file misses \"effective\" or \"theta\"");
    theta = j.at("theta").get<double>();
    const Json& t = j.at("effective");

    auto mat6 = [&](const char* key) {
        Matrix6d m;
        const Json& rows = t.at(key);
        for (int r = 0; r < 6; ++r)
            for (int c = 0; c < 6; ++c) m(r, c) = rows[r][c].get<double>();
        return m;
    };
    auto mat36 = [&](const char* key) {
        Matrix36d m;
        const Json& rows = t.at(key);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 6; ++c) m(r, c) = rows[r][c].get<double>();
        return m;
    };

    EffectiveTensors out;
    out.cH = voigt_unpack(mat6("c_voigt")).raw();
    out.eH = voigt_unpack_piezo(mat36("e_voigt")).raw();
    out.fH = voigt_unpack_piezo(
                 t.contains("f_voigt") ? mat36("f_voigt") : mat36("e_voigt"))
                 .raw();
    const Json& drows = t.at("d");
    for (int i = 0; i < 3; ++i)
        for (int n = 0; n < 3; ++n) out.d(i, n) = drows[i][n].get<double>();
    return out;
}

// --------------------------------------------------------------------------
// Modes

int run_homogenize(const RunContext& ctx) {
    const CellGeometry g = parse_geometry(ctx);
    const MaterialField mat = parse_material(ctx, g);
    const HomogenizeOptions opts = parse_options(ctx);
    const HomogenizationResult res = homogenize(g, mat, opts);

    const std::string path = join_out(ctx, "effective.json");
    write_text_file(path, dump_json(homogenization_to_json(res)));
    std::printf("homogenize: n=%d theta=%.17g\n", res.resolution, res.theta);
    std::printf("  defects: cH_sym=%.3e eH_pair=%.3e eH_fH=%.3e dH_sym=%.3e\n",
                res.diagnostics.cH_major_symmetry_defect,
                res.diagnostics.eH_pair_symmetry_defect,
                res.diagnostics.eH_fH_defect,
                res.diagnostics.dH_symmetry_defect);
    std::printf("  energy-form defects: cH=%.3e dH=%.3e\n",
                res.cross_check.cH_direct_vs_energy_defect,
                res.cross_check.dH_direct_vs_energy_defect);
    std::printf("  min eigenvalues: cH=%.6g dH=%.6g\n",
                res.diagnostics.cH_min_eigenvalue,
                res.diagnostics.dH_min_eigenvalue);
    std::printf("wrote %s\n", path.c_str());
    return kExitOk;
}

int run_macro(const RunContext& ctx) {
    MacroProblem p;
    p.f = parse_body_force(ctx);
    p.N = parse_int(ctx, "macro_resolution", 16, false);
    const HomogenizeOptions opts = parse_options(ctx);

    if (ctx.config.contains("effective_file")) {
        const Json j = read_json_file(resolve_input(
            ctx, ctx.config.at("effective_file").get<std::string>()));
        p.tensors = tensors_from_export(j, p.theta);
    } else {
        const CellGeometry g = parse_geometry(ctx);
        const MaterialField mat = parse_material(ctx, g);
        const HomogenizationResult res = homogenize(g, mat, opts);
        p.tensors = res.tensors;
        p.theta = res.theta;
    }

    const FieldSolution sol = solve_macro(p, opts.solve);
    write_field(join_out(ctx, "macro_field.bin"), sol);
    write_text_file(join_out(ctx, "macro_summary.json"),
                    dump_json(field_summary_to_json(sol)));
    std::printf("macro: N=%d dofs solved, energy %.17g\n", sol.N,
                sol.energy_rhs);
    std::printf("wrote %s and %s\n", join_out(ctx, "macro_field.bin").c_str(),
                join_out(ctx, "macro_summary.json").c_str());
    return kExitOk;
}

int run_dns(const RunContext& ctx) {
    DnsProblem p;
    p.cell = parse_geometry(ctx);
    p.material = parse_material(ctx, p.cell);
    p.m = parse_int(ctx, "periods", 0, true);
    p.f = parse_body_force(ctx);
    const HomogenizeOptions opts = parse_options(ctx);

    const FieldSolution sol = solve_dns(p, opts.solve);
    write_field(join_out(ctx, "dns_field.bin"), sol);
    write_text_file(join_out(ctx, "dns_summary.json"),
                    dump_json(field_summary_to_json(sol)));
    std::printf("dns: N=%d (periods=%d), energy %.17g\n", sol.N, p.m,
                sol.energy_rhs);
    std::printf("wrote %s and %s\n", join_out(ctx, "dns_field.bin").c_str(),
                join_out(ctx, "dns_summary.json").c_str());
    return kExitOk;
}

std::vector<int> parse_period_counts(const RunContext& ctx) {
    if (ctx.config.contains("m_list")) {
        const Json& l = ctx.config.at("m_list");
        if (!l.is_array() || l.empty())
            throw ConfigError("\"m_list\" must be a non-empty array");
        std::vector<int> out;
        for (const Json& v : l) {
            if (!v.is_number_integer() || v.get<int>() < 1)
                throw ConfigError("\"m_list\" entries must be positive "
                                  "integers");
            out.push_back(v.get<int>());
        }
        return out;
    }
    if (ctx.config.contains("epsilon_list")) {
        const Json& l = ctx.config.at("epsilon_list");
        if (!l.is_array() || l.empty())
            throw ConfigError("\"epsilon_list\" must be a non-empty array");
        std::vector<int> out;
        for (const Json& v : l) {
            const double eps = v.get<double>();
            if (!(eps > 0.0) || eps > 1.0)
                throw ConfigError("epsilon values must lie in (0,1]");
            const double m = 1.0 / eps;
            const int mi = static_cast<int>(m + 0.5);
            if (std::abs(m - mi) > 1e-9 * m)
                throw ConfigError(
                    "epsilon values must be reciprocals of integers");
            out.push_back(mi);
        }
        return out;
    }
    throw ConfigError("sweep config needs \"m_list\" or \"epsilon_list\"");
}

int run_sweep(const RunContext& ctx) {
    const CellGeometry g = parse_geometry(ctx);
    const MaterialField mat = parse_material(ctx, g);
    const Eigen::Vector3d f = parse_body_force(ctx);
    const HomogenizeOptions opts = parse_options(ctx);
    const std::vector<int> m_list = parse_period_counts(ctx);

    MacroPolicy policy = MacroPolicy::Finest;
    if (ctx.config.contains("macro_grid")) {
        const std::string s = ctx.config.at("macro_grid").get<std::string>();
        if (s == "finest")
            policy = MacroPolicy::Finest;
        else if (s == "per_eps")
            policy = MacroPolicy::PerEps;
        else
            throw ConfigError("\"macro_grid\" must be finest or per_eps");
    }

    const SweepReport rep = epsilon_sweep(g, mat, f, m_list, policy, opts);
    write_text_file(join_out(ctx, "sweep.csv"), sweep_to_csv(rep));
    write_text_file(join_out(ctx, "sweep.json"),
                    dump_json(sweep_to_json(rep)));

    std::printf("epsilon      strain_residual  efield_residual  weak_gap\n");
    for (const auto& p : rep.points)
        std::printf("%-12.6g %-16.9e %-16.9e %-.9e\n", p.epsilon,
                    p.residuals.strain_residual, p.residuals.efield_residual,
                    p.residuals.weak_gap);
    std::printf("monotone decrease: strain=%s efield=%s weak_gap=%s\n",
                rep.strain_decreasing ? "yes" : "no",
                rep.efield_decreasing ? "yes" : "no",
                rep.weak_gap_decreasing ? "yes" : "no");
    std::printf("wrote %s and %s\n", join_out(ctx, "sweep.csv").c_str(),
                join_out(ctx, "sweep.json").c_str());
    return kExitOk;
}

// --------------------------------------------------------------------------
// validate: run every invariant the pipeline certifies and report them all.

struct Check {
    std::string name;
    double value;
    double tolerance;
    bool pass;
};

int run_validate(const RunContext& ctx) {
    const CellGeometry g = parse_geometry(ctx);
    const MaterialField mat = parse_material(ctx, g);
    HomogenizeOptions opts = parse_options(ctx);
    opts.enforce_certificates = false; // measure, then judge here
    const double tol = opts.certificate_tol;

    const HomogenizationResult res = homogenize(g, mat, opts);

    std::vector<Check> checks;
    auto add = [&](const std::string& name, double value, double tolerance,
                   bool pass) {
        checks.push_back({name, value, tolerance, pass});
    };
    auto add_upper = [&](const std::string& name, double value,
                         double tolerance) {
        add(name, value, tolerance, value <= tolerance);
    };

    add("material_positive_definite",
        std::min(res.material_certificate.min_eig_c,
                 res.material_certificate.min_eig_d),
        0.0, res.material_certificate.ok);
    add_upper("cH_major_symmetry_defect",
              res.diagnostics.cH_major_symmetry_defect, tol);
    add_upper("eH_pair_symmetry_defect",
              res.diagnostics.eH_pair_symmetry_defect, tol);
    add_upper("eH_equals_fH_defect", res.diagnostics.eH_fH_defect, tol);
    add_upper("dH_symmetry_defect", res.diagnostics.dH_symmetry_defect, tol);

    const Matrix6d cv = voigt_pack(res.tensors.c_symmetrized());
    const Eigen::Matrix3d dv = res.tensors.d_symmetrized().matrix();
    add("cH_min_eigenvalue", res.diagnostics.cH_min_eigenvalue,
        definiteness_margin(cv.trace()),
        res.diagnostics.cH_min_eigenvalue > definiteness_margin(cv.trace()));
    add("dH_min_eigenvalue", res.diagnostics.dH_min_eigenvalue,
        definiteness_margin(dv.trace()),
        res.diagnostics.dH_min_eigenvalue > definiteness_margin(dv.trace()));

    add_upper("cH_energy_form_defect",
              res.cross_check.cH_direct_vs_energy_defect, tol);
    add_upper("dH_energy_form_defect",
              res.cross_check.dH_direct_vs_energy_defect, tol);

    double worst_mean = 0.0;
    for (double v : res.worst_mean_defect)
        worst_mean = std::max(worst_mean, std::abs(v));
    add_upper("cell_zero_mean_defect", worst_mean, 1e-8);

    // Pipeline self-test: a hole-free cell with the first material phase is
    // its own homogenized medium, so the effective tensors must reproduce
    // the inputs to numerical precision.
    {
        CellGeometry full = build_cell(g.n, {});
        MaterialField uniform = MaterialField::uniform(mat.table.front());
        HomogenizeOptions id_opts = opts;
        id_opts.enforce_certificates = true;
        const HomogenizationResult ident = homogenize(full, uniform, id_opts);

        const MaterialTensors& m0 = uniform.table.front();
        double defect = 0.0, scale = 0.0;
        for (int t = 0; t < 81; ++t) {
            defect = std::max(defect,
                              std::abs(ident.tensors.cH[t] - m0.c.raw()[t]));
            scale = std::max(scale, std::abs(m0.c.raw()[t]));
        }
        for (int t = 0; t < 27; ++t) {
            defect = std::max(defect,
                              std::abs(ident.tensors.eH[t] - m0.e.raw()[t]));
            defect = std::max(defect,
                              std::abs(ident.tensors.fH[t] - m0.e.raw()[t]));
            scale = std::max(scale, std::abs(m0.e.raw()[t]));
        }
        for (int i = 0; i < 3; ++i)
            for (int n = 0; n < 3; ++n) {
                defect = std::max(
                    defect, std::abs(ident.tensors.d(i, n) - m0.d(i, n)));
                scale = std::max(scale, std::abs(m0.d(i, n)));
            }
        add_upper("no_hole_identity_defect", defect / scale, 1e-10);
    }

    bool all_pass = true;
    Json jchecks = Json::array();
    for (const auto& c : checks) {
        all_pass = all_pass && c.pass;
        std::printf("[%s] %s: %.17g (tolerance %.17g)\n",
                    c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                    c.tolerance);
        Json jc = Json::object();
        jc["name"] = c.name;
        jc["value"] = c.value;
        jc["tolerance"] = c.tolerance;
        jc["pass"] = c.pass;
        jchecks.push_back(std::move(jc));
    }

    // The export deliberately carries no timing data so identical runs are
    // byte-identical.
    Json out = Json::object();
    out["resolution"] = res.resolution;
    out["theta"] = res.theta;
    out["all_pass"] = all_pass;
    out["checks"] = std::move(jchecks);
    Json h = homogenization_to_json(res);
    h.erase("solves");
    out["homogenization"] = std::move(h);
    const std::string path = join_out(ctx, "validate.json");
    write_text_file(path, dump_json(out));
    std::printf("%s\nwrote %s\n", all_pass ? "validation passed"
                                           : "validation FAILED",
                path.c_str());
    return all_pass ? kExitOk : kExitValidationFailure;
}

} // namespace

int run_mode(const std::string& mode, const std::string& config_path,
             const std::string& out_dir, int threads) {
    try {
        if (threads < 0)
            throw ConfigError("thread count must be non-negative");
        // The numerical pipeline runs deterministically on a single thread;
        // the option is accepted for interface stability.

        RunContext ctx;
        ctx.config = read_json_file(config_path);
        fs::path cfg(config_path);
        ctx.base_dir = cfg.has_parent_path() ? cfg.parent_path().string() : ".";
        ctx.out_dir = out_dir.empty() ? "." : out_dir;
        std::error_code ec;
        fs::create_directories(ctx.out_dir, ec);
        if (ec)
            throw ConfigError("cannot create output directory: " +
                              ctx.out_dir);

        if (ctx.config.contains("mode") &&
            ctx.config.at("mode").get<std::string>() != mode)
            throw ConfigError("config \"mode\" disagrees with the requested "
                              "mode");

        if (mode == "homogenize") return run_homogenize(ctx);
        if (mode == "macro") return run_macro(ctx);
        if (mode == "dns") return run_dns(ctx);
        if (mode == "sweep") return run_sweep(ctx);
        if (mode == "validate") return run_validate(ctx);
        throw ConfigError("unknown mode: " + mode);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfigError;
    } catch (const CertificateFailure& e) {
        std::fprintf(stderr, "validation failure: %s\n", e.what());
        return kExitValidationFailure;
    } catch (const Json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfigError;
    } catch (const Error& e) {
        std::fprintf(stderr, "compute error: %s\n", e.what());
        return kExitComputeError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "compute error: %s\n", e.what());
        return kExitComputeError;
    }
}

} // namespace piezocell
