#include "lab.hpp"

#include "wulffgrid/errors.hpp"
#include "wulffgrid/format.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace wulffgrid::lab {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what)
{
    throw ConfigError(where + ": " + what);
}

const Json& field(const Json& obj, const std::string& key, const std::string& where)
{
    if (!obj.is_object()) fail(where, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(where + "." + key, "missing");
    return *it;
}

double number(const Json& j, const std::string& where)
{
    if (!j.is_number()) fail(where, "expected a number");
    return j.get<double>();
}

long long integer(const Json& j, const std::string& where)
{
    if (!j.is_number_integer()) fail(where, "expected an integer");
    return j.get<long long>();
}

std::string text(const Json& j, const std::string& where)
{
    if (!j.is_string()) fail(where, "expected a string");
    return j.get<std::string>();
}

bool flag(const Json& j, const std::string& where)
{
    if (!j.is_boolean()) fail(where, "expected true or false");
    return j.get<bool>();
}

Vec vector_of(const Json& j, const std::string& where)
{
    if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of numbers");
    Vec v(static_cast<int>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = number(j[i], where + "[" + std::to_string(i) + "]");
    return v;
}

std::vector<Vec> vectors_of(const Json& j, const std::string& where)
{
    if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of vectors");
    std::vector<Vec> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(vector_of(j[i], where + "[" + std::to_string(i) + "]"));
        if (out.back().size() != out.front().size()) fail(where + "[" + std::to_string(i) + "]", "dimension differs");
    }
    return out;
}

std::uint64_t seed_of(const Json& obj, const std::string& where)
{
    const long long s = integer(field(obj, "seed", where), where + ".seed");
    if (s < 0) fail(where + ".seed", "must be non-negative");
    return static_cast<std::uint64_t>(s);
}

std::vector<std::size_t> n_list(const Json& obj, const std::string& where)
{
    const auto& j = field(obj, "N", where);
    if (!j.is_array() || j.empty()) fail(where + ".N", "expected a non-empty array");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string at = where + ".N[" + std::to_string(i) + "]";
        const long long n = integer(j[i], at);
        if (n < 1) fail(at, "must be positive");
        if (!out.empty() && static_cast<std::size_t>(n) <= out.back()) fail(at, "N-list must be strictly increasing");
        out.push_back(static_cast<std::size_t>(n));
    }
    return out;
}

// Tolerance object with a closed key set, so typos are caught.
class Tolerances {
public:
    Tolerances(const Json& doc, const std::string& where, std::set<std::string> allowed) : where_(where + ".tolerances")
    {
        const auto it = doc.find("tolerances");
        if (it == doc.end()) return;
        if (!it->is_object()) fail(where_, "expected an object");
        for (const auto& [k, v] : it->items()) {
            if (!allowed.count(k)) fail(where_ + "." + k, "unknown tolerance");
            values_[k] = v;
        }
    }
    std::optional<double> number_at(const std::string& k) const
    {
        const auto it = values_.find(k);
        if (it == values_.end()) return std::nullopt;
        return number(it->second, where_ + "." + k);
    }
    bool flag_at(const std::string& k) const
    {
        const auto it = values_.find(k);
        return it != values_.end() && flag(it->second, where_ + "." + k);
    }
    const Json* raw(const std::string& k) const
    {
        const auto it = values_.find(k);
        return it == values_.end() ? nullptr : &it->second;
    }

private:
    std::string where_;
    std::map<std::string, Json> values_;
};

Check bound_check(const std::string& name, double value, double tol)
{
    return {name, value, tol, value <= tol, ""};
}

void convergence_checks(const std::vector<ConvergenceRow>& rows, const Tolerances& tol, std::vector<Check>& out)
{
    if (auto t = tol.number_at("max_abs_err")) {
        double worst = 0;
        for (const auto& r : rows) worst = std::max(worst, std::abs(r.energy - r.target));
        out.push_back(bound_check("max_abs_err", worst, *t));
    }
    if (auto t = tol.number_at("final_abs_err"))
        out.push_back(bound_check("final_abs_err", std::abs(rows.back().energy - rows.back().target), *t));
    if (auto t = tol.number_at("final_rel_err")) out.push_back(bound_check("final_rel_err", rows.back().rel_err(), *t));
    if (tol.flag_at("shrinking_gaps")) {
        Check c{"shrinking_gaps", 0, 0, rows.size() >= 3, ""};
        std::ostringstream gaps;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const double g = std::abs(rows[i].energy - rows[i - 1].energy);
            gaps << (i > 1 ? " " : "gaps ") << fmt9(g);
            if (i >= 2 && !(g < std::abs(rows[i - 1].energy - rows[i - 2].energy))) c.pass = false;
            c.value = g;
        }
        c.detail = gaps.str();
        out.push_back(c);
    }
    if (tol.flag_at("decreasing_error")) {
        Check c{"decreasing_error", rows.back().rel_err(), 0, true, ""};
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (!(std::abs(rows[i].energy - rows[i].target) < std::abs(rows[i - 1].energy - rows[i - 1].target)))
                c.pass = false;
        out.push_back(c);
    }
}

std::string subset_text(const Subset& J)
{
    std::string s;
    for (std::size_t i = 0; i < J.size(); ++i) s += (i ? "-" : "") + std::to_string(J[i]);
    return s;
}

double edge_volume(const Multigrid& mg, const Subset& J)
{
    Mat m(mg.dim(), mg.dim());
    for (int i = 0; i < mg.dim(); ++i) m.col(i) = mg.spec().edges[J[i]];
    return std::abs(m.determinant());
}

// Tile shape classes keyed by volume at 9 decimals, largest first.
std::vector<std::pair<std::string, double>> class_fractions(const Multigrid& mg, const DensityAudit& a)
{
    std::map<double, double, std::greater<>> acc;
    for (const auto& row : a.rows) acc[std::round(edge_volume(mg, row.J) * 1e9) / 1e9] += row.area_fraction;
    std::vector<std::pair<std::string, double>> out;
    for (const auto& [vol, frac] : acc) out.emplace_back(fmt9(vol), frac);
    return out;
}

std::vector<ConvergenceRow> crystal_table(const Potential& V, const ConvexPolytope& E, const std::vector<std::size_t>& Ns,
                                          std::optional<double> target)
{
    const double t = target ? *target : perimeter_P_V(E, V);
    const int d = E.dim;
    std::vector<ConvergenceRow> rows;
    for (auto n : Ns) {
        const auto rec = recovery_configuration(E, static_cast<long long>(n));
        const double f = surface_energy(rec.config, V);
        rows.push_back({n, f / std::pow(static_cast<double>(n), (d - 1.0) / d), t});
    }
    return rows;
}

RunResult run_crystal(const Json& doc, const Loader& L, const fs::path& out)
{
    const std::string at = "$";
    const auto pot = L.potential(field(doc, "potential", at), at + ".potential");
    if (!pot.lattice) fail(at + ".potential", "crystal-converge needs a lattice potential");
    const auto E = L.shape(field(doc, "shape", at), at + ".shape");
    const auto Ns = n_list(doc, at);
    const Tolerances tol(doc, at, {"max_abs_err", "final_abs_err", "final_rel_err", "shrinking_gaps", "decreasing_error"});
    std::optional<double> target;
    if (doc.contains("target")) target = number(doc["target"], at + ".target");

    RunResult r;
    const auto rows = crystal_table(*pot.lattice, E, Ns, target);
    write_text(out / "convergence.csv", convergence_csv(rows));
    r.artifacts.push_back(out / "convergence.csv");
    convergence_checks(rows, tol, r.checks);
    return r;
}

RunResult run_qc(const Json& doc, const Loader& L, const fs::path& out)
{
    const std::string at = "$";
    const Multigrid mg(L.spec(field(doc, "spec", at), at + ".spec"));
    const auto w = L.tile_weight(doc.contains("tile_weight") ? doc["tile_weight"] : Json(), mg, at + ".tile_weight");
    const auto E = L.shape(field(doc, "shape", at), at + ".shape");
    const auto Ns = n_list(doc, at);
    const Tolerances tol(doc, at, {"max_abs_err", "final_abs_err", "final_rel_err", "shrinking_gaps", "decreasing_error"});
    const bool export_sets = doc.contains("export_tile_sets") ? flag(doc["export_tile_sets"], at + ".export_tile_sets") : true;

    const auto W = rail_weights(mg, w);
    const double target = doc.contains("target") ? number(doc["target"], at + ".target") : qc_limit_perimeter(E, mg, W);
    RunResult r;
    std::vector<ConvergenceRow> rows;
    for (auto n : Ns) {
        const auto rec = qc_recovery(E, n, mg);
        rows.push_back({n, rescaled_tile_energy(mg, rec.X, W), target});
        if (export_sets) {
            const auto file = out / ("tileset_" + std::to_string(n) + ".jsonl");
            write_text(file, tile_set_records(mg, rec.X));
            r.artifacts.push_back(file);
        }
    }
    write_text(out / "convergence.csv", convergence_csv(rows));
    r.artifacts.push_back(out / "convergence.csv");
    convergence_checks(rows, tol, r.checks);
    return r;
}

RunResult run_density(const Json& doc, const Loader& L, const fs::path& out)
{
    const std::string at = "$";
    const Multigrid mg(L.spec(field(doc, "spec", at), at + ".spec"));
    const double radius = number(field(doc, "dual_radius", at), at + ".dual_radius");
    if (!(radius > 0)) fail(at + ".dual_radius", "must be positive");
    const Vec centre = doc.contains("center") ? vector_of(doc["center"], at + ".center") : Vec(Vec::Zero(mg.dim()));
    const Tolerances tol(doc, at, {"area_fraction", "rho_sum", "cell_ratio", "class_fractions"});

    const auto a = density_audit(mg, Region::ball(centre, radius));
    std::ostringstream csv;
    csv << "J,rho,count,area_fraction,expected_count,cell_ratio\n";
    for (const auto& row : a.rows)
        csv << subset_text(row.J) << ',' << fmt9(row.rho) << ',' << row.count << ',' << fmt9(row.area_fraction) << ','
            << fmt9(row.expected_count) << ',' << fmt9(row.cell_ratio) << '\n';
    const auto classes = class_fractions(mg, a);
    std::ostringstream ccsv;
    ccsv << "tile_volume,area_fraction\n";
    for (const auto& [vol, frac] : classes) ccsv << vol << ',' << fmt9(frac) << '\n';

    RunResult r;
    write_text(out / "density.csv", csv.str());
    write_text(out / "classes.csv", ccsv.str());
    r.artifacts = {out / "density.csv", out / "classes.csv"};
    if (auto t = tol.number_at("area_fraction")) r.checks.push_back(bound_check("area_fraction", a.max_fraction_error, *t));
    if (auto t = tol.number_at("rho_sum")) r.checks.push_back(bound_check("rho_sum", std::abs(a.rho_sum - 1), *t));
    if (auto t = tol.number_at("cell_ratio")) r.checks.push_back(bound_check("cell_ratio", a.max_count_error, *t));
    if (const Json* cf = tol.raw("class_fractions")) {
        const std::string where = at + ".tolerances.class_fractions";
        const auto expected = vector_of(field(*cf, "values", where), where + ".values");
        const double rel = number(field(*cf, "rel", where), where + ".rel");
        if (static_cast<std::size_t>(expected.size()) != classes.size()) fail(where + ".values", "one value per tile class");
        double worst = 0;
        for (std::size_t i = 0; i < classes.size(); ++i)
            worst = std::max(worst, std::abs(classes[i].second / expected(static_cast<int>(i)) - 1));
        r.checks.push_back(bound_check("class_fractions", worst, rel));
    }
    return r;
}

RunResult run_gallery(const Json& doc, const Loader& L, const fs::path& out)
{
    const std::string at = "$";
    const auto& entries = field(doc, "entries", at);
    if (!entries.is_array() || entries.empty()) fail(at + ".entries", "expected a non-empty array");
    RunResult r;
    std::set<std::string> names;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const std::string where = at + ".entries[" + std::to_string(i) + "]";
        const auto& e = entries[i];
        const std::string name = text(field(e, "name", where), where + ".name");
        if (name.empty() || name.find_first_of("/\\.") != std::string::npos) fail(where + ".name", "must be a plain file stem");
        if (!names.insert(name).second) fail(where + ".name", "duplicate entry name");
        const auto pot = L.potential(field(e, "potential", where), where + ".potential");
        const auto w = signed_wulff(pot.phi);
        if (!w.degenerate) {
            const auto file = out / (name + (w.body.dim == 3 ? ".off" : ".svg"));
            write_text(file, w.body.dim == 3 ? to_off(w.body) : to_svg(w.body));
            r.artifacts.push_back(file);
        }
        if (e.contains("expect")) {
            const auto& x = e["expect"];
            const std::string xw = where + ".expect";
            const ShapeClass sc = w.degenerate ? ShapeClass{} : classify_shape(w);
            const auto count = [&](const char* key, int got) {
                if (!x.contains(key)) return;
                const long long want = integer(x[key], xw + "." + key);
                r.checks.push_back({name + "." + key, static_cast<double>(got), static_cast<double>(want), got == want, ""});
            };
            count("vertices", sc.vertices);
            count("facets", sc.facets);
            if (x.contains("zonotope")) {
                const bool want = flag(x["zonotope"], xw + ".zonotope");
                r.checks.push_back({name + ".zonotope", sc.zonotope ? 1.0 : 0.0, want ? 1.0 : 0.0, sc.zonotope == want, ""});
            }
            if (x.contains("label")) {
                const std::string want = text(x["label"], xw + ".label");
                const std::string got = w.empty ? "empty" : w.degenerate ? "degenerate" : sc.label;
                r.checks.push_back({name + ".label", 0, 0, got == want, got});
            }
        }
        if (e.contains("scan")) {
            const auto& s = e["scan"];
            const std::string sw = where + ".scan";
            if (pot.family.empty()) fail(sw, "scans need a named family potential");
            const auto& fam = family_named(pot.family);
            const auto grid = scan_grid(number(field(s, "lo", sw), sw + ".lo"), number(field(s, "hi", sw), sw + ".hi"),
                                        number(field(s, "step", sw), sw + ".step"));
            const auto res = parameter_scan(fam.make, grid, fam.claimed);
            const auto file = out / (name + "_scan.csv");
            write_text(file, scan_csv(res));
            r.artifacts.push_back(file);
            std::ostringstream iv;
            for (const auto& in : res.intervals) iv << in.label << " [" << fmt9(in.lo) << ", " << fmt9(in.hi) << "]; ";
            if (!res.claimed.empty()) iv << "quoted " << res.claimed;
            bool found = true;
            if (s.contains("expect_interval")) {
                const auto& ei = s["expect_interval"];
                const std::string label = text(field(ei, "label", sw + ".expect_interval"), sw + ".expect_interval.label");
                const double inside = number(field(ei, "contains", sw + ".expect_interval"), sw + ".expect_interval.contains");
                found = std::any_of(res.intervals.begin(), res.intervals.end(), [&](const ScanInterval& in) {
                    return in.label == label && in.lo <= inside && inside <= in.hi;
                });
            }
            r.checks.push_back({name + ".scan", static_cast<double>(res.intervals.size()), 0, found, iv.str()});
        }
    }
    return r;
}

RunResult run_pathology(const Json& doc, const fs::path& out)
{
    const std::string at = "$";
    const double c = number(field(doc, "c", at), at + ".c");
    const auto Ns = n_list(doc, at);
    const Tolerances tol(doc, at, {"max_rescaled", "strictly_negative", "decreasing", "phi_positive"});
    const auto V = pathology_potential(c);
    const double phi_min = positivity_check(support_function(V), 2).min;

    std::ostringstream csv;
    csv << "N,rescaled_energy,phi_min\n";
    std::vector<double> e;
    for (auto n : Ns) {
        const auto x = pathology_configuration(static_cast<long long>(n));
        const double count = static_cast<double>(x.points.size());
        e.push_back(surface_energy(x, V) / std::sqrt(count));
        csv << x.points.size() << ',' << fmt9(e.back()) << ',' << fmt9(phi_min) << '\n';
    }
    RunResult r;
    write_text(out / "pathology.csv", csv.str());
    r.artifacts.push_back(out / "pathology.csv");
    if (auto t = tol.number_at("max_rescaled"))
        r.checks.push_back(bound_check("max_rescaled", *std::max_element(e.begin(), e.end()), *t));
    if (tol.flag_at("strictly_negative")) {
        const double m = *std::max_element(e.begin(), e.end());
        r.checks.push_back({"strictly_negative", m, 0, m < 0, ""});
    }
    if (tol.flag_at("decreasing")) {
        bool ok = true;
        for (std::size_t i = 1; i < e.size(); ++i) ok = ok && e[i] < e[i - 1];
        r.checks.push_back({"decreasing", e.back(), 0, ok, ""});
    }
    if (tol.flag_at("phi_positive")) r.checks.push_back({"phi_positive", phi_min, 0, phi_min > 0, ""});
    return r;
}

RunResult run_tiles(const Json& doc, const Loader& L, const fs::path& out, std::uint64_t seed)
{
    const std::string at = "$";
    const Multigrid mg(L.spec(field(doc, "spec", at), at + ".spec"));
    const double radius = number(field(doc, "radius", at), at + ".radius");
    if (!(radius > 0)) fail(at + ".radius", "must be positive");
    const Tolerances tol(doc, at, {"tiling_samples", "shape_classes"});

    const Region region = Region::ball(Vec::Zero(mg.dim()), radius);
    const auto tiles = tiles_in_region(mg, region);
    RunResult r;
    std::string records;
    for (const auto& t : tiles) records += tile_record(t) + "\n";
    write_text(out / "tiles.jsonl", records);
    r.artifacts.push_back(out / "tiles.jsonl");
    if (mg.dim() == 2) {
        write_text(out / "tiles.svg", tiles_svg(tiles, mg.families()));
        r.artifacts.push_back(out / "tiles.svg");
    }
    if (auto n = tol.number_at("tiling_samples")) {
        Check c{"tiling", 0, 0, true, ""};
        try {
            const auto rep = check_tiling(tiles, region, mg.distortion().bd_bound + mg.max_tile_diameter(),
                                          static_cast<std::size_t>(*n), seed);
            c.value = static_cast<double>(rep.samples);
            c.detail = std::to_string(rep.tiles) + " tiles";
        } catch (const TilingError& e) {
            c.pass = false;
            c.detail = e.what();
        }
        r.checks.push_back(c);
    }
    if (auto n = tol.number_at("shape_classes")) {
        std::set<std::string> vols;
        for (const auto& t : tiles) vols.insert(fmt9(t.volume()));
        r.checks.push_back({"shape_classes", static_cast<double>(vols.size()), *n, vols.size() == static_cast<std::size_t>(*n), ""});
    }
    return r;
}

}  // namespace

Json read_json(const fs::path& file)
{
    std::ifstream in(file);
    if (!in) throw ConfigError(file.string() + ": cannot open");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError(file.string() + ": " + e.what());
    }
}

void write_text(const fs::path& file, const std::string& body)
{
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary);
    if (!out) throw ConfigError(file.string() + ": cannot write");
    out << body;
}

Json Loader::resolve(const Json& node, const std::string& where) const
{
    if (node.is_object() && node.contains("file")) {
        if (node.size() != 1) fail(where, "\"file\" excludes other fields");
        const fs::path p = base / text(node["file"], where + ".file");
        Loader inner{p.parent_path()};
        Json j = read_json(p);
        if (j.contains("version") && integer(j["version"], where + "(" + p.string() + ").version") != kDocumentVersion)
            fail(where + "(" + p.string() + ").version", "unsupported version");
        j.erase("version");
        return inner.resolve(j, where);
    }
    if (!node.is_object()) fail(where, "expected an object");
    return node;
}

const NamedFamily& family_named(const std::string& name)
{
    static const std::vector<NamedFamily> all = {
        {"fcc-minus-axes", "c", fcc_minus_axes, "(1/4, 1/2]"},
        {"pyritohedron", "w", pyritohedron_family, ""},
        {"icosahedral", "c", icosahedral_family, ""},
    };
    for (const auto& f : all)
        if (f.name == name) return f;
    throw ConfigError("unknown family '" + name + "' (fcc-minus-axes, pyritohedron, icosahedral)");
}

Loader::LoadedPotential Loader::potential(const Json& raw, const std::string& where) const
{
    const Json node = resolve(raw, where);
    LoadedPotential out;
    if (node.contains("preset")) {
        const std::string p = text(node["preset"], where + ".preset");
        if (p == "nearest-neighbour") {
            const long long d = node.contains("dimension") ? integer(node["dimension"], where + ".dimension") : 2;
            if (d < 1 || d > 3) fail(where + ".dimension", "must be 1, 2 or 3");
            out.lattice = nearest_neighbour(static_cast<int>(d));
        } else if (p == "pathology") {
            out.lattice = pathology_potential(number(field(node, "c", where), where + ".c"));
        } else {
            fail(where + ".preset", "unknown preset '" + p + "' (nearest-neighbour, pathology)");
        }
        out.phi = support_function(*out.lattice);
        return out;
    }
    if (node.contains("family")) {
        const std::string name = text(node["family"], where + ".family");
        const NamedFamily* fam = nullptr;
        try {
            fam = &family_named(name);
        } catch (const ConfigError& e) {
            fail(where + ".family", e.what());
        }
        out.family = fam->name;
        out.parameter = fam->parameter;
        out.value = number(field(node, fam->parameter, where), where + "." + fam->parameter);
        out.phi = fam->make(out.value);
        return out;
    }
    const std::string conv = node.contains("convention") ? text(node["convention"], where + ".convention") : "crystal";
    const std::string mode = node.contains("mode") ? text(node["mode"], where + ".mode") : "positive-part";
    if (conv != "crystal" && conv != "signed") fail(where + ".convention", "expected crystal or signed");
    if (mode != "positive-part" && mode != "absolute-value") fail(where + ".mode", "expected positive-part or absolute-value");
    const auto& atoms = field(node, "atoms", where);
    if (!atoms.is_array() || atoms.empty()) fail(where + ".atoms", "expected a non-empty array");
    std::vector<RealAtom> real;
    bool integral = true;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const std::string at = where + ".atoms[" + std::to_string(i) + "]";
        RealAtom a{vector_of(field(atoms[i], "v", at), at + ".v"), number(field(atoms[i], "w", at), at + ".w")};
        if (!real.empty() && a.v.size() != real[0].v.size()) fail(at + ".v", "dimension differs");
        for (const auto& x : atoms[i]["v"]) integral = integral && x.is_number_integer();
        real.push_back(std::move(a));
    }
    const EvalMode m = mode == "absolute-value" ? EvalMode::AbsoluteValue : EvalMode::PositivePart;
    if (integral) {
        std::vector<Atom> ia;
        for (const auto& a : real) ia.push_back({a.v.cast<long long>(), a.weight});
        out.lattice = make_potential(std::move(ia), conv == "crystal" ? Convention::Crystal : Convention::Signed, m);
        out.phi = support_function(*out.lattice);
    } else {
        // real directions: only the support function exists, weights are perimeter weights
        if (conv == "crystal")
            for (auto& a : real) a.weight = -a.weight;
        out.phi = SupportFunction{std::move(real), m};
    }
    return out;
}

MultigridSpec Loader::spec(const Json& raw, const std::string& where) const
{
    const Json node = resolve(raw, where);
    if (node.contains("preset")) {
        const std::string p = text(node["preset"], where + ".preset");
        if (p == "pentagrid") return pentagrid(seed_of(node, where));
        if (p == "icosahedral") return icosahedral_grid(seed_of(node, where));
        if (p == "square-bigrid") {
            if (!node.contains("translations")) return square_bigrid();
            const Vec g = vector_of(node["translations"], where + ".translations");
            if (g.size() != 2) fail(where + ".translations", "expected two values");
            return square_bigrid(g(0), g(1));
        }
        fail(where + ".preset", "unknown preset '" + p + "' (pentagrid, icosahedral, square-bigrid)");
    }
    MultigridSpec s;
    s.normals = vectors_of(field(node, "normals", where), where + ".normals");
    const int d = static_cast<int>(s.normals[0].size());
    if (node.contains("dimension") && integer(node["dimension"], where + ".dimension") != d)
        fail(where + ".dimension", "does not match the normals");
    s.edges = node.contains("primal_edges") ? vectors_of(node["primal_edges"], where + ".primal_edges") : s.normals;
    if (s.edges.size() != s.normals.size() || s.edges[0].size() != d)
        fail(where + ".primal_edges", "one edge of the normals' dimension per normal");
    if (node.contains("translations")) {
        const Vec g = vector_of(node["translations"], where + ".translations");
        if (g.size() != static_cast<int>(s.normals.size())) fail(where + ".translations", "one value per normal");
        s.translations.assign(g.data(), g.data() + g.size());
    } else {
        // same draw as the presets
        s.seed = seed_of(node, where);
        std::mt19937_64 rng(s.seed);
        for (std::size_t i = 0; i < s.normals.size(); ++i) s.translations.push_back(0.05 + 0.9 * unit_uniform(rng()));
    }
    const std::string order = node.contains("ordering") ? text(node["ordering"], where + ".ordering") : "given";
    if (order == "angle") {
        if (d != 2) fail(where + ".ordering", "angle ordering needs d = 2");
        std::vector<std::size_t> idx(s.normals.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        const auto angle = [&](std::size_t i) {
            const double a = std::atan2(s.normals[i](1), s.normals[i](0));
            return a < 0 ? a + 2 * M_PI : a;
        };
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return angle(a) < angle(b); });
        MultigridSpec t = s;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            t.normals[i] = s.normals[idx[i]];
            t.edges[i] = s.edges[idx[i]];
            t.translations[i] = s.translations[idx[i]];
        }
        s = std::move(t);
    } else if (order != "given") {
        fail(where + ".ordering", "expected given or angle");
    }
    return s;
}

ConvexPolytope Loader::shape(const Json& raw, const std::string& where) const
{
    const Json node = resolve(raw, where);
    const std::string type = text(field(node, "type", where), where + ".type");
    if (type == "box") {
        const Vec lo = vector_of(field(node, "lo", where), where + ".lo");
        const Vec hi = vector_of(field(node, "hi", where), where + ".hi");
        if (lo.size() != hi.size() || !(lo.array() < hi.array()).all()) fail(where, "box needs lo < hi componentwise");
        return box_polytope(lo, hi);
    }
    if (type == "regular-polygon") {
        const long long n = integer(field(node, "sides", where), where + ".sides");
        if (n < 3) fail(where + ".sides", "at least 3");
        const double area = node.contains("area") ? number(node["area"], where + ".area") : 1.0;
        if (!(area > 0)) fail(where + ".area", "must be positive");
        return regular_polygon(static_cast<int>(n), area);
    }
    if (type == "hull") return convex_hull(vectors_of(field(node, "vertices", where), where + ".vertices"));
    fail(where + ".type", "unknown shape '" + type + "' (box, regular-polygon, hull)");
}

TileWeight Loader::tile_weight(const Json& raw, const Multigrid& mg, const std::string& where) const
{
    if (raw.is_null()) return uniform_tile_weight(mg);
    const Json node = resolve(raw, where);
    if (node.contains("uniform")) return uniform_tile_weight(mg, number(node["uniform"], where + ".uniform"));
    TileWeight w;
    w.normals = vectors_of(field(node, "normals", where), where + ".normals");
    const Vec x = vector_of(field(node, "weights", where), where + ".weights");
    if (x.size() != static_cast<int>(w.normals.size())) fail(where + ".weights", "one weight per normal");
    w.weights.assign(x.data(), x.data() + x.size());
    return w;
}

std::string check_line(const Check& c)
{
    std::string s = std::string(c.pass ? "PASS " : "FAIL ") + c.name + " value=" + fmt9(c.value) + " tol=" + fmt9(c.tolerance);
    if (!c.detail.empty()) s += " " + c.detail;
    return s;
}

bool RunResult::pass() const
{
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

Json RunResult::summary() const
{
    Json j;
    j["version"] = kDocumentVersion;
    j["kind"] = kind;
    j["pass"] = pass();
    j["checks"] = Json::array();
    for (const auto& c : checks)
        j["checks"].push_back({{"name", c.name}, {"value", fmt9(c.value)}, {"tolerance", fmt9(c.tolerance)},
                               {"pass", c.pass}, {"detail", c.detail}});
    j["artifacts"] = Json::array();
    for (const auto& a : artifacts) j["artifacts"].push_back(a.filename().string());
    return j;
}

double ConvergenceRow::rel_err() const
{
    return target != 0 ? std::abs(energy - target) / std::abs(target) : std::abs(energy);
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows)
{
    std::ostringstream os;
    os << "N,rescaled_energy,target,rel_err\n";
    for (const auto& r : rows) os << r.N << ',' << fmt9(r.energy) << ',' << fmt9(r.target) << ',' << fmt9(r.rel_err()) << '\n';
    return os.str();
}

std::string tile_set_records(const Multigrid&, const TileSet& X)
{
    std::ostringstream os;
    for (const auto& p : X.points()) {
        os << "{\"J\":[";
        for (std::size_t i = 0; i < p.J.size(); ++i) os << (i ? "," : "") << p.J[i];
        os << "],\"k\":[";
        for (std::size_t i = 0; i < p.k.size(); ++i) os << (i ? "," : "") << p.k[i];
        os << "]}\n";
    }
    return os.str();
}

RunResult run_scenario(const Json& doc, const fs::path& base, const fs::path& out)
{
    if (!doc.is_object()) fail("$", "expected an object");
    if (integer(field(doc, "version", "$"), "$.version") != kDocumentVersion) fail("$.version", "unsupported version");
    const std::string kind = text(field(doc, "kind", "$"), "$.kind");
    const std::uint64_t seed = seed_of(doc, "$");
    const Loader L{base};
    RunResult r;
    if (kind == "crystal-converge")
        r = run_crystal(doc, L, out);
    else if (kind == "qc-converge")
        r = run_qc(doc, L, out);
    else if (kind == "density-audit")
        r = run_density(doc, L, out);
    else if (kind == "wulff-gallery")
        r = run_gallery(doc, L, out);
    else if (kind == "pathology")
        r = run_pathology(doc, out);
    else if (kind == "tile-render")
        r = run_tiles(doc, L, out, seed);
    else
        fail("$.kind", "unknown kind '" + kind +
                           "' (crystal-converge, qc-converge, density-audit, wulff-gallery, pathology, tile-render)");
    r.kind = kind;
    write_text(out / "summary.json", r.summary().dump(2) + "\n");
    return r;
}

std::vector<Check> audit(const MultigridSpec& spec, const std::vector<std::string>& checks, const AuditOptions& opt)
{
    const Multigrid mg(spec);
    const Vec origin = Vec::Zero(mg.dim());
    std::vector<Check> out;
    for (const auto& name : checks) {
        if (name == "cauchy-binet") {
            const auto r = cauchy_binet(spec);
            const double scale = std::max(1.0, std::abs(r.det_GGt));
            out.push_back({name, std::abs(r.det_GGt - r.cauchy_binet_sum), 1e-9 * scale,
                           std::abs(r.det_GGt - r.cauchy_binet_sum) <= 1e-9 * scale,
                           "det=" + fmt9(r.det_GGt) + " sum=" + fmt9(r.cauchy_binet_sum)});
        } else if (name == "bd") {
            const auto& D = mg.distortion();
            double worst = 0;
            mg.for_each_point(Region::ball(origin, opt.distortion_radius), [&](const DualPoint& p) {
                worst = std::max(worst, (mg.tile(p).center() - D.A(p.x)).norm());
            });
            out.push_back({name, worst, D.bd_bound, worst < D.bd_bound, "strict"});
        } else if (name == "tiling") {
            Check c{name, 0, 0, true, ""};
            try {
                const auto rep = verify_tiling(spec, Region::ball(origin, opt.tiling_radius), opt.tiling_samples);
                c.value = static_cast<double>(rep.samples);
                c.detail = std::to_string(rep.tiles) + " tiles, " + std::to_string(rep.resampled) + " resampled";
            } catch (const TilingError& e) {
                c.pass = false;
                c.detail = e.what();
            }
            out.push_back(c);
        } else if (name == "densities") {
            const auto a = density_audit(mg, Region::ball(origin, opt.density_radius));
            const bool ok = a.max_fraction_error <= opt.density_tolerance && std::abs(a.rho_sum - 1) <= 1e-12;
            std::string detail = "rho_sum=" + fmt9(a.rho_sum);
            for (const auto& [vol, frac] : class_fractions(mg, a)) detail += " class(" + vol + ")=" + fmt9(frac);
            out.push_back({name, a.max_fraction_error, opt.density_tolerance, ok, detail});
        } else {
            throw ConfigError("--checks: unknown check '" + name + "' (densities, bd, tiling, cauchy-binet)");
        }
    }
    return out;
}

ScanSpec parse_scan(const std::string& s)
{
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 4) throw ConfigError("--scan: expected name:lo:hi:step");
    ScanSpec out{parts[0]};
    try {
        out.lo = std::stod(parts[1]);
        out.hi = std::stod(parts[2]);
        out.step = std::stod(parts[3]);
    } catch (const std::exception&) {
        throw ConfigError("--scan: lo, hi and step must be numbers");
    }
    if (!(out.step > 0) || out.hi < out.lo) throw ConfigError("--scan: need lo <= hi and step > 0");
    return out;
}

}  // namespace wulffgrid::lab
