#pragma once

// Scenario runner shared by the CLI and the acceptance runner. Not installed.

#include "wulffgrid/lattice_energy.hpp"
#include "wulffgrid/multigrid.hpp"
#include "wulffgrid/qc_energy.hpp"
#include "wulffgrid/wulff.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace wulffgrid::lab {

using Json = nlohmann::json;
namespace fs = std::filesystem;

inline constexpr int kDocumentVersion = 1;

Json read_json(const fs::path& file);
void write_text(const fs::path& file, const std::string& text);

// Documents may inline a sub-document or point at one with {"file": "..."}, relative to base.
struct Loader {
    fs::path base;

    Json resolve(const Json& node, const std::string& where) const;

    // Lattice potential when the document describes one; always a support function.
    struct LoadedPotential {
        std::optional<Potential> lattice;
        SupportFunction phi;
        std::string family;     // empty unless a named family
        std::string parameter;  // the family's parameter name
        double value = 0;
    };
    LoadedPotential potential(const Json& node, const std::string& where) const;
    MultigridSpec spec(const Json& node, const std::string& where) const;
    ConvexPolytope shape(const Json& node, const std::string& where) const;
    TileWeight tile_weight(const Json& node, const Multigrid& mg, const std::string& where) const;
};

// Named one-parameter families: fcc-minus-axes (c), pyritohedron (w), icosahedral (c).
struct NamedFamily {
    std::string name;
    std::string parameter;
    Family make;
    std::string claimed;  // interval quoted for comparison only
};
const NamedFamily& family_named(const std::string& name);

struct Check {
    std::string name;
    double value = 0;
    double tolerance = 0;
    bool pass = false;
    std::string detail;
};

std::string check_line(const Check& c);

struct RunResult {
    std::string kind;
    std::vector<Check> checks;
    std::vector<fs::path> artifacts;
    bool pass() const;
    Json summary() const;
};

struct ConvergenceRow {
    std::size_t N = 0;
    double energy = 0;
    double target = 0;
    double rel_err() const;
};

std::string convergence_csv(const std::vector<ConvergenceRow>& rows);
std::string tile_set_records(const Multigrid& mg, const TileSet& X);

// Validates the whole document before doing any work; ConfigError names the field path.
RunResult run_scenario(const Json& doc, const fs::path& base, const fs::path& out);

struct AuditOptions {
    double density_radius = 200;
    double distortion_radius = 100;
    double tiling_radius = 30;
    std::size_t tiling_samples = 10000;
    double density_tolerance = 0.02;
};

// checks from {densities, bd, tiling, cauchy-binet}
std::vector<Check> audit(const MultigridSpec& spec, const std::vector<std::string>& checks, const AuditOptions& opt);

struct ScanSpec {
    std::string name;
    double lo = 0, hi = 0, step = 0;
};
ScanSpec parse_scan(const std::string& text);  // name:lo:hi:step

}  // namespace wulffgrid::lab
