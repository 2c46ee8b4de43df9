#include "piezocell/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "piezocell/errors.hpp"

namespace piezocell {

// ---------------------------------------------------------------------------
// JSON serialization with fixed numeric formatting

namespace {

void format_double(std::string& out, double v) {
    if (!std::isfinite(v))
        throw Error("non-finite value cannot be serialized");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
    // Bare integral results like "42" must stay floating-point on re-parse.
    if (!std::strpbrk(buf, ".eEn")) out += ".0";
}

void dump_rec(std::string& out, const Json& j, int depth) {
    const std::string pad(2 * static_cast<std::size_t>(depth), ' ');
    const std::string pad_in(2 * static_cast<std::size_t>(depth + 1), ' ');
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += pad_in;
            out += Json(it.key()).dump(); // escaped key
            out += ": ";
            dump_rec(out, it.value(), depth + 1);
        }
        out += "\n" + pad + "}";
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        // Flat arrays of numbers stay on one line; nested ones break.
        bool scalar_only = true;
        for (const auto& v : j)
            if (v.is_structured()) scalar_only = false;
        if (scalar_only) {
            out += "[";
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ", ";
                first = false;
                dump_rec(out, v, depth + 1);
            }
            out += "]";
        } else {
            out += "[\n";
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in;
                dump_rec(out, v, depth + 1);
            }
            out += "\n" + pad + "]";
        }
        return;
    }
    case Json::value_t::number_float:
        format_double(out, j.get<double>());
        return;
    default:
        out += j.dump();
        return;
    }
}

} // namespace

std::string dump_json(const Json& j) {
    std::string out;
    dump_rec(out, j, 0);
    out += "\n";
    return out;
}

// ---------------------------------------------------------------------------
// File helpers

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path);
    Json j = Json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded())
        throw ConfigError("file is not valid structured text: " + path);
    return j;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open file for writing: " + path);
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("short write: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// Material

namespace {

double number_at(const Json& j, const char* what) {
    if (!j.is_number())
        throw ConfigError(std::string("expected a number for ") + what);
    return j.get<double>();
}

template <int R, int C>
Eigen::Matrix<double, R, C> matrix_from(const Json& j, const char* what) {
    if (!j.is_array() || j.size() != R)
        throw ConfigError(std::string(what) + " must be a " +
                          std::to_string(R) + "x" + std::to_string(C) +
                          " row array");
    Eigen::Matrix<double, R, C> m;
    for (int r = 0; r < R; ++r) {
        const Json& row = j[r];
        if (!row.is_array() || row.size() != C)
            throw ConfigError(std::string(what) + " row " + std::to_string(r) +
                              " must have " + std::to_string(C) + " entries");
        for (int c = 0; c < C; ++c) m(r, c) = number_at(row[c], what);
    }
    return m;
}

template <int R, int C>
Json matrix_to(const Eigen::Matrix<double, R, C>& m) {
    Json rows = Json::array();
    for (int r = 0; r < R; ++r) {
        Json row = Json::array();
        for (int c = 0; c < C; ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

MaterialTensors material_from_json(const Json& j) {
    if (!j.is_object())
        throw ConfigError("material record must be an object");
    for (const char* key : {"c_voigt", "e_voigt", "d"})
        if (!j.contains(key))
            throw ConfigError(std::string("material record misses \"") + key +
                              "\"");
    MaterialTensors m;
    m.c = voigt_unpack(matrix_from<6, 6>(j.at("c_voigt"), "c_voigt"));
    m.e = voigt_unpack_piezo(matrix_from<3, 6>(j.at("e_voigt"), "e_voigt"));
    Eigen::Matrix3d d = matrix_from<3, 3>(j.at("d"), "d");
    const double scale = d.cwiseAbs().maxCoeff();
    if ((d - d.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw NonSymmetricInput("dielectric matrix is not symmetric");
    for (int i = 0; i < 3; ++i)
        for (int jj = i; jj < 3; ++jj)
            m.d.set(i, jj, 0.5 * (d(i, jj) + d(jj, i)));
    return m;
}

Json material_to_json(const MaterialTensors& m) {
    Json j = Json::object();
    j["c_voigt"] = matrix_to<6, 6>(voigt_pack(m.c));
    j["e_voigt"] = matrix_to<3, 6>(voigt_pack(m.e));
    j["d"] = matrix_to<3, 3>(m.d.matrix());
    return j;
}

MaterialTensors load_material(const std::string& path) {
    return material_from_json(read_json_file(path));
}

// ---------------------------------------------------------------------------
// Geometry

namespace {

std::string join_path(const std::string& base, const std::string& rel) {
    if (rel.empty()) return base;
    if (rel.front() == '/' || base.empty()) return rel;
    return base + "/" + rel;
}

std::array<double, 3> triple_from(const Json& j, const char* what) {
    if (!j.is_array() || j.size() != 3)
        throw ConfigError(std::string(what) + " must have 3 entries");
    return {number_at(j[0], what), number_at(j[1], what),
            number_at(j[2], what)};
}

} // namespace

std::vector<HolePrimitive> holes_from_json(const Json& j) {
    if (!j.is_array()) throw ConfigError("\"holes\" must be an array");
    std::vector<HolePrimitive> holes;
    for (const Json& rec : j) {
        if (!rec.is_object() || !rec.contains("type"))
            throw ConfigError("every hole record needs a \"type\"");
        const std::string type = rec.at("type").get<std::string>();
        if (type == "sphere") {
            holes.push_back(HolePrimitive::sphere(
                triple_from(rec.at("center"), "sphere center"),
                number_at(rec.at("radius"), "sphere radius")));
        } else if (type == "cylinder") {
            const Json& c = rec.at("center");
            if (!c.is_array() || c.size() != 2)
                throw ConfigError("cylinder center must have 2 entries");
            int axis = rec.at("axis").get<int>();
            if (axis < 0 || axis > 2)
                throw ConfigError("cylinder axis must be 0, 1 or 2");
            holes.push_back(HolePrimitive::cylinder(
                axis,
                {number_at(c[0], "cylinder center"),
                 number_at(c[1], "cylinder center")},
                number_at(rec.at("radius"), "cylinder radius")));
        } else if (type == "box") {
            holes.push_back(
                HolePrimitive::box(triple_from(rec.at("min"), "box min"),
                                   triple_from(rec.at("max"), "box max")));
        } else {
            throw ConfigError("unknown hole type: " + type);
        }
    }
    return holes;
}

CellGeometry geometry_from_json(const Json& j, const std::string& base_dir) {
    if (!j.is_object()) throw ConfigError("geometry block must be an object");
    if (!j.contains("resolution"))
        throw ConfigError("geometry block misses \"resolution\"");
    const int n = j.at("resolution").get<int>();

    if (j.contains("mask_file")) {
        const std::string path =
            join_path(base_dir, j.at("mask_file").get<std::string>());
        const std::string bytes = read_text_file(path);
        const std::size_t expect =
            static_cast<std::size_t>(n) * n * n;
        if (n < 2 || bytes.size() != expect)
            throw ShapeMismatch("mask file must hold exactly n^3 bytes: " +
                                path);
        std::vector<std::uint8_t> mask(bytes.begin(), bytes.end());
        return build_cell_from_mask(n, std::move(mask));
    }
    std::vector<HolePrimitive> holes;
    if (j.contains("holes")) holes = holes_from_json(j.at("holes"));
    return build_cell(n, holes);
}

// ---------------------------------------------------------------------------
// Homogenization export

namespace {

Json stats_to_json(const SolveStats& s) {
    Json j = Json::object();
    j["case"] = s.label;
    j["method"] = s.method;
    j["iterations"] = s.iterations;
    j["rel_residual"] = s.rel_residual;
    j["seconds"] = s.seconds;
    return j;
}

} // namespace

Json homogenization_to_json(const HomogenizationResult& r) {
    Json j = Json::object();
    j["resolution"] = r.resolution;
    j["theta"] = r.theta;

    Json t = Json::object();
    t["c_voigt"] = matrix_to<6, 6>(voigt_pack(r.tensors.c_symmetrized()));
    t["e_voigt"] = matrix_to<3, 6>(voigt_pack(r.tensors.e_as_tensor()));
    Matrix36d fv;
    for (int i = 0; i < 3; ++i)
        for (int L = 0; L < 6; ++L) {
            auto [m, h] = voigt_pair(L);
            fv(i, L) = r.tensors.f(i, m, h);
        }
    t["f_voigt"] = matrix_to<3, 6>(fv);
    t["d"] = matrix_to<3, 3>(r.tensors.d_symmetrized().matrix());
    j["effective"] = std::move(t);

    Json diag = Json::object();
    diag["cH_major_symmetry_defect"] = r.diagnostics.cH_major_symmetry_defect;
    diag["eH_pair_symmetry_defect"] = r.diagnostics.eH_pair_symmetry_defect;
    diag["eH_fH_defect"] = r.diagnostics.eH_fH_defect;
    diag["dH_symmetry_defect"] = r.diagnostics.dH_symmetry_defect;
    diag["cH_min_eigenvalue"] = r.diagnostics.cH_min_eigenvalue;
    diag["dH_min_eigenvalue"] = r.diagnostics.dH_min_eigenvalue;
    diag["cH_energy_form_defect"] = r.cross_check.cH_direct_vs_energy_defect;
    diag["dH_energy_form_defect"] = r.cross_check.dH_direct_vs_energy_defect;
    Json means = Json::array();
    for (double v : r.worst_mean_defect) means.push_back(v);
    diag["zero_mean_defects"] = std::move(means);
    j["diagnostics"] = std::move(diag);

    Json cert = Json::object();
    cert["material_ok"] = r.material_certificate.ok;
    cert["material_min_eig_c"] = r.material_certificate.min_eig_c;
    cert["material_min_eig_d"] = r.material_certificate.min_eig_d;
    j["certificates"] = std::move(cert);

    Json st = Json::array();
    for (const auto& s : r.solver_stats) st.push_back(stats_to_json(s));
    j["solves"] = std::move(st);
    return j;
}

// ---------------------------------------------------------------------------
// Field binary round-trip

namespace {
constexpr char kFieldMagic[8] = {'P', 'Z', 'F', 'L', 'D', '0', '0', '1'};
}

void write_field(const std::string& path, const FieldSolution& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open file for writing: " + path);
    out.write(kFieldMagic, sizeof(kFieldMagic));
    const std::int64_t N = s.N;
    out.write(reinterpret_cast<const char*>(&N), sizeof(N));
    out.write(reinterpret_cast<const char*>(s.voxel_mask.data()),
              static_cast<std::streamsize>(s.voxel_mask.size()));
    out.write(reinterpret_cast<const char*>(s.u.data()),
              static_cast<std::streamsize>(sizeof(double) * s.u.size()));
    out.write(reinterpret_cast<const char*>(s.phi.data()),
              static_cast<std::streamsize>(sizeof(double) * s.phi.size()));
    if (!out) throw Error("short write: " + path);
}

FieldSolution read_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kFieldMagic, sizeof(magic)) != 0)
        throw ConfigError("not a field dump: " + path);
    std::int64_t N = 0;
    in.read(reinterpret_cast<char*>(&N), sizeof(N));
    if (!in || N < 1 || N > 4096)
        throw ConfigError("field dump has invalid resolution: " + path);
    FieldSolution s;
    s.N = static_cast<int>(N);
    const std::size_t nvox = static_cast<std::size_t>(N) * N * N;
    const std::int64_t nnode = (N + 1) * (N + 1) * (N + 1);
    s.voxel_mask.resize(nvox);
    in.read(reinterpret_cast<char*>(s.voxel_mask.data()),
            static_cast<std::streamsize>(nvox));
    s.u.resize(3 * nnode);
    in.read(reinterpret_cast<char*>(s.u.data()),
            static_cast<std::streamsize>(sizeof(double) * 3 * nnode));
    s.phi.resize(nnode);
    in.read(reinterpret_cast<char*>(s.phi.data()),
            static_cast<std::streamsize>(sizeof(double) * nnode));
    if (!in) throw ConfigError("field dump truncated: " + path);
    return s;
}

Json field_summary_to_json(const FieldSolution& s) {
    Json j = Json::object();
    j["resolution"] = s.N;
    std::size_t material = 0;
    for (auto v : s.voxel_mask) material += v ? 1 : 0;
    j["material_voxels"] = material;
    j["energy_lhs"] = s.energy_lhs;
    j["energy_rhs"] = s.energy_rhs;
    const Eigen::Vector3d avg_m = average_u(s, true);
    const Eigen::Vector3d avg_f = average_u(s, false);
    j["average_u_material"] = Json::array({avg_m[0], avg_m[1], avg_m[2]});
    j["average_u_domain"] = Json::array({avg_f[0], avg_f[1], avg_f[2]});
    j["solve"] = stats_to_json(s.stats);
    return j;
}

// ---------------------------------------------------------------------------
// Sweep export

std::string sweep_to_csv(const SweepReport& r) {
    std::string out = "epsilon,strain_residual,efield_residual,weak_gap\n";
    char buf[256];
    for (const auto& p : r.points) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", p.epsilon,
                      p.residuals.strain_residual, p.residuals.efield_residual,
                      p.residuals.weak_gap);
        out += buf;
    }
    return out;
}

Json sweep_to_json(const SweepReport& r) {
    Json j = Json::object();
    j["macro_policy"] =
        r.policy == MacroPolicy::Finest ? "finest" : "per_eps";
    Json rows = Json::array();
    for (const auto& p : r.points) {
        Json row = Json::object();
        row["epsilon"] = p.epsilon;
        row["periods"] = p.m;
        row["fine_resolution"] = p.m * r.homogenization.resolution;
        row["macro_resolution"] = p.macro_N;
        row["strain_residual"] = p.residuals.strain_residual;
        row["efield_residual"] = p.residuals.efield_residual;
        row["weak_gap"] = p.residuals.weak_gap;
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    j["strain_residual_decreasing"] = r.strain_decreasing;
    j["efield_residual_decreasing"] = r.efield_decreasing;
    j["weak_gap_decreasing"] = r.weak_gap_decreasing;
    j["homogenization"] = homogenization_to_json(r.homogenization);
    return j;
}

} // namespace piezocell
