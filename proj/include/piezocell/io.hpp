#pragma once

#include <string>

#include <json.hpp>

#include "piezocell/cellfem.hpp"
#include "piezocell/corrector.hpp"
#include "piezocell/effective.hpp"
#include "piezocell/geometry.hpp"
#include "piezocell/macrodns.hpp"
#include "piezocell/tensors.hpp"

namespace piezocell {

// All structured output preserves key insertion order so identical runs
// serialize identically.
using Json = nlohmann::ordered_json;

// Serializer with every floating-point number printed to 17 significant
// digits (binary64 round-trip), 2-space indentation, trailing newline.
std::string dump_json(const Json& j);

// Whole-file helpers; throw ConfigError on I/O or parse failure.
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Material file layout: {"c_voigt": 6x6, "e_voigt": 3x6, "d": 3x3}; the
// piezo Voigt columns follow the elastic pair order. Throws ConfigError /
// NonSymmetricInput.
MaterialTensors material_from_json(const Json& j);
Json material_to_json(const MaterialTensors& m);
MaterialTensors load_material(const std::string& path);

// Geometry block: {"resolution": n, "holes": [...]} with primitive records
//   {"type":"sphere","center":[x,y,z],"radius":r}
//   {"type":"cylinder","axis":a,"center":[p,q],"radius":r}
//   {"type":"box","min":[x,y,z],"max":[x,y,z]}
// or {"resolution": n, "mask_file": path} with n^3 raw bytes (0 = void,
// nonzero = material, x fastest). Relative mask paths resolve against
// base_dir.
CellGeometry geometry_from_json(const Json& j, const std::string& base_dir);
std::vector<HolePrimitive> holes_from_json(const Json& j);

// Effective-coefficient export: Voigt-packed tensors, volume fraction,
// certificates and diagnostics.
Json homogenization_to_json(const HomogenizationResult& r);

// Node fields on the Dirichlet box grid, binary round-trip format:
// 8-byte magic, int64 N, N^3 mask bytes, 3(N+1)^3 doubles u (components
// interleaved per node, nodes x fastest), (N+1)^3 doubles phi.
void write_field(const std::string& path, const FieldSolution& s);
FieldSolution read_field(const std::string& path);

Json field_summary_to_json(const FieldSolution& s);

// Sweep report: CSV rows sorted by decreasing epsilon under the fixed header,
// plus the JSON twin carrying the full homogenization record.
std::string sweep_to_csv(const SweepReport& r);
Json sweep_to_json(const SweepReport& r);

} // namespace piezocell
