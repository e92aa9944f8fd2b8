#include <doctest.h>

#include "lab/lab.hpp"
#include "wulffgrid/errors.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

using namespace wulffgrid;
namespace lab = wulffgrid::lab;

namespace {

const lab::fs::path scenarios = WULFFGRID_SCENARIO_DIR;

lab::fs::path scratch(const std::string& name)
{
    const auto p = lab::fs::temp_directory_path() / ("wulffgrid_test_lab_" + name);
    lab::fs::remove_all(p);
    return p;
}

std::string slurp(const lab::fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

lab::RunResult run(const std::string& file, const lab::fs::path& out)
{
    return lab::run_scenario(lab::read_json(scenarios / file), scenarios, out);
}

lab::Json minimal(const std::string& kind)
{
    return {{"version", 1}, {"kind", kind}, {"seed", 1}};
}

}  // namespace

TEST_CASE("square law scenario")
{
    const auto out = scratch("square");
    const auto r = run("square_law.json", out);
    CHECK(r.pass());
    const auto csv = slurp(out / "convergence.csv");
    CHECK(csv.rfind("N,rescaled_energy,target,rel_err\n", 0) == 0);
    CHECK(csv.find("100,4.000000000,4.000000000,0.000000000\n") != std::string::npos);
    CHECK(csv.find("2500,4.000000000,4.000000000,0.000000000\n") != std::string::npos);
    CHECK(lab::fs::exists(out / "summary.json"));
}

TEST_CASE("reruns are byte-identical")
{
    for (const char* f : {"qc_square.json", "pentagrid_density.json", "pentagrid_tiles.json", "wulff_gallery.json"}) {
        const auto a = scratch(std::string("a_") + f), b = scratch(std::string("b_") + f);
        const auto ra = run(f, a);
        run(f, b);
        for (const auto& art : ra.artifacts) CHECK(slurp(art) == slurp(b / art.filename()));
        CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
    }
}

TEST_CASE("pathology scenario")
{
    const auto out = scratch("pathology");
    CHECK(run("pathology.json", out).pass());
    std::istringstream csv(slurp(out / "pathology.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "N,rescaled_energy,phi_min");
    double prev = 0;
    int rows = 0;
    while (std::getline(csv, line)) {
        const double e = std::stod(line.substr(line.find(',') + 1));
        CHECK(e < prev);
        prev = e;
        ++rows;
    }
    CHECK(rows == 2);
}

TEST_CASE("tile-render scenario")
{
    const auto out = scratch("tiles");
    CHECK(run("pentagrid_tiles.json", out).pass());
    const auto svg = slurp(out / "tiles.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
    std::set<std::string> classes;
    const std::regex cls("class=\"(J[0-9]-[0-9])\"");
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), cls); it != std::sregex_iterator(); ++it)
        classes.insert((*it)[1]);
    CHECK(classes.size() == 10);
    const auto records = slurp(out / "tiles.jsonl");
    const auto first = lab::Json::parse(records.substr(0, records.find('\n')));
    CHECK(first.contains("J"));
    CHECK(first.contains("k"));
    CHECK(first.contains("anchor"));
    CHECK(first.contains("generators"));
}

TEST_CASE("wulff gallery exports the octahedron")
{
    const auto out = scratch("gallery");
    const auto r = run("wulff_gallery.json", out);
    CHECK(r.pass());
    const auto off = slurp(out / "fcc_minus_axes.off");
    CHECK(off.rfind("OFF\n6 8 12\n", 0) == 0);
    CHECK(slurp(out / "fcc_minus_axes_scan.csv").rfind("c,n_vertices,n_facets,zonotope,positivity_min\n", 0) == 0);
}

TEST_CASE("qc scenario reports each tolerance")
{
    const auto out = scratch("qc");
    const auto r = run("qc_square.json", out);
    REQUIRE(r.checks.size() == 2);
    CHECK(r.checks[0].name == "final_rel_err");
    CHECK(r.checks[0].pass);
    CHECK(r.checks[1].name == "shrinking_gaps");
    const auto set = slurp(out / "tileset_250.jsonl");
    CHECK(std::count(set.begin(), set.end(), '\n') == 250);
    CHECK(lab::Json::parse(set.substr(0, set.find('\n'))).size() == 2);
}

TEST_CASE("config errors carry the field path")
{
    const auto out = scratch("errors");
    const auto fails_with = [&](const lab::Json& doc, const std::string& needle) {
        try {
            lab::run_scenario(doc, scenarios, out);
        } catch (const ConfigError& e) {
            return std::string(e.what()).find(needle) != std::string::npos;
        }
        return false;
    };
    auto doc = minimal("pathology");
    doc.erase("seed");
    CHECK(fails_with(doc, "$.seed"));

    doc = minimal("pathology");
    doc["version"] = 2;
    CHECK(fails_with(doc, "$.version"));

    doc = minimal("pathology");
    doc["c"] = 2;
    doc["N"] = {100, 100};
    CHECK(fails_with(doc, "$.N[1]"));

    doc["N"] = {100};
    doc["tolerances"] = {{"max_rescald", -0.5}};
    CHECK(fails_with(doc, "$.tolerances.max_rescald"));

    doc = minimal("crystal-converge");
    doc["potential"] = {{"preset", "nearest-neighbour"}};
    doc["shape"] = {{"type", "circle"}};
    doc["N"] = {100};
    CHECK(fails_with(doc, "$.shape.type"));

    doc = minimal("qc-converge");
    doc["spec"] = {{"preset", "pentagrid"}};
    CHECK(fails_with(doc, "$.spec.seed"));

    CHECK(fails_with(minimal("bogus"), "$.kind"));
    CHECK_THROWS_AS(lab::read_json(scenarios / "does_not_exist.json"), ConfigError);
}

TEST_CASE("spec documents")
{
    const lab::Loader L{scenarios};
    const auto pg = L.spec(lab::read_json(scenarios / "specs/pentagrid.json"), "spec");
    const auto ref = pentagrid(1);
    CHECK(pg.translations == ref.translations);

    // explicit normals with a seed draw the same translations as the presets
    lab::Json doc = {{"normals", {{1, 0}, {0, 1}}}, {"seed", 1}};
    const auto s = L.spec(doc, "spec");
    CHECK(s.translations.size() == 2);
    CHECK(s.translations[0] == ref.translations[0]);
    CHECK(s.edges[1] == s.normals[1]);

    lab::Json angled = {{"normals", {{0, 1}, {1, 0}}}, {"translations", {0.3, 0.7}}, {"ordering", "angle"}};
    const auto a = L.spec(angled, "spec");
    CHECK(a.normals[0](0) == 1);
    CHECK(a.translations[0] == 0.7);

    lab::Json bad = {{"normals", {{1, 0}, {0, 1}}}, {"translations", {0.3}}};
    CHECK_THROWS_AS(L.spec(bad, "spec"), ConfigError);

    const auto sheared = L.spec(lab::read_json(scenarios / "specs/sheared_quadgrid.json"), "spec");
    CHECK_NOTHROW(Multigrid{sheared});
}

TEST_CASE("potential documents")
{
    const lab::Loader L{scenarios};
    const auto fcc = L.potential(lab::read_json(scenarios / "potentials/fcc.json"), "p");
    REQUIRE(fcc.lattice);
    CHECK(fcc.lattice->atoms.size() == 12);
    const auto fam = L.potential(lab::Json{{"family", "fcc-minus-axes"}, {"c", 0.75}}, "p");
    CHECK(fam.family == "fcc-minus-axes");
    CHECK(fam.parameter == "c");
    CHECK_FALSE(fam.lattice);

    lab::Json real = {{"convention", "signed"}, {"mode", "absolute-value"},
                      {"atoms", {{{"v", {0.5, 0.25}}, {"w", 1.0}}}}};
    const auto r = L.potential(real, "p");
    CHECK_FALSE(r.lattice);
    CHECK(r.phi.atoms.size() == 1);
    CHECK_THROWS_AS(L.potential(lab::Json{{"family", "cube"}}, "p"), ConfigError);
}

TEST_CASE("audit checks and scan parsing")
{
    const auto checks = lab::audit(pentagrid(1), {"cauchy-binet", "bd", "tiling"}, lab::AuditOptions{200, 40, 15, 2000});
    REQUIRE(checks.size() == 3);
    for (const auto& c : checks) CHECK(c.pass);
    CHECK_THROWS_AS(lab::audit(pentagrid(1), {"nope"}, {}), ConfigError);

    const auto s = lab::parse_scan("c:0.3:1.2:0.05");
    CHECK(s.name == "c");
    CHECK(s.step == 0.05);
    CHECK_THROWS_AS(lab::parse_scan("c:0.3:1.2"), ConfigError);
    CHECK_THROWS_AS(lab::parse_scan("c:1:0:0.1"), ConfigError);
}
