#include "lab/lab.hpp"

#include "wulffgrid/errors.hpp"
#include "wulffgrid/format.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace wulffgrid;
namespace lab = wulffgrid::lab;

namespace {

int report(const std::vector<lab::Check>& checks)
{
    bool ok = true;
    for (const auto& c : checks) {
        std::cout << lab::check_line(c) << '\n';
        ok = ok && c.pass;
    }
    return ok ? 0 : 1;
}

int cmd_run(const std::string& scenario, const std::string& out)
{
    const lab::fs::path file(scenario);
    const auto r = lab::run_scenario(lab::read_json(file), file.parent_path(), out);
    std::cout << r.kind << ": " << r.artifacts.size() << " artifacts in " << out << '\n';
    return report(r.checks);
}

int cmd_tile(const std::string& spec_file, double radius, const std::string& svg, const std::string& records)
{
    const lab::fs::path file(spec_file);
    const lab::Loader L{file.parent_path()};
    const Multigrid mg(L.spec(lab::read_json(file), file.string()));
    if (mg.dim() != 2) throw FormatMismatch("tile --svg needs a planar multigrid");
    const auto tiles = tiles_in_region(mg, Region::ball(Vec::Zero(2), radius));
    lab::write_text(svg, tiles_svg(tiles, mg.families()));
    if (!records.empty()) {
        std::string body;
        for (const auto& t : tiles) body += tile_record(t) + "\n";
        lab::write_text(records, body);
    }
    std::cout << tiles.size() << " tiles\n";
    return 0;
}

int cmd_wulff(const std::string& pot_file, const std::string& scan, const std::string& off, const std::string& csv)
{
    const lab::fs::path file(pot_file);
    const lab::Loader L{file.parent_path()};
    const auto pot = L.potential(lab::read_json(file), file.string());
    int status = 0;
    if (!scan.empty()) {
        const auto s = lab::parse_scan(scan);
        if (pot.family.empty()) throw ConfigError("--scan needs a named family potential");
        const auto& fam = lab::family_named(pot.family);
        if (s.name != fam.name && s.name != fam.parameter)
            throw ConfigError("--scan: '" + s.name + "' is neither " + fam.name + " nor its parameter " + fam.parameter);
        const auto res = parameter_scan(fam.make, scan_grid(s.lo, s.hi, s.step), fam.claimed);
        if (csv.empty())
            std::cout << scan_csv(res);
        else
            lab::write_text(csv, scan_csv(res));
        for (const auto& in : res.intervals)
            std::cerr << in.label << ": [" << fmt9(in.lo) << ", " << fmt9(in.hi) << "]\n";
        if (!res.claimed.empty()) std::cerr << "quoted interval: " << res.claimed << '\n';
    }
    if (!off.empty()) {
        const auto w = signed_wulff(pot.phi);
        if (w.empty || w.degenerate) {
            std::cerr << "Wulff shape is " << (w.empty ? "empty" : "degenerate") << ", nothing exported\n";
            status = 1;
        } else {
            lab::write_text(off, to_off(w.body));
            const auto sc = classify_shape(w);
            std::cerr << sc.label << ": " << sc.vertices << " vertices, " << sc.facets << " facets\n";
        }
    }
    return status;
}

std::vector<std::string> split_commas(const std::string& s)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"wulffgrid: lattice and quasicrystal perimeter experiments"};
    app.require_subcommand(1);

    std::string scenario, out;
    auto* run = app.add_subcommand("run", "Run a scenario document");
    run->add_option("--scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out, "Output directory")->required();

    std::string spec, svg, records;
    double radius = 30;
    auto* tile = app.add_subcommand("tile", "Render the dual tiling of a multigrid");
    tile->add_option("--spec", spec, "Multigrid spec JSON")->required()->check(CLI::ExistingFile);
    tile->add_option("--radius", radius, "Primal disk radius")->check(CLI::PositiveNumber);
    tile->add_option("--svg", svg, "SVG output")->required();
    tile->add_option("--records", records, "Line-delimited tile records");

    std::string potential, scan, off, csv;
    auto* wulff = app.add_subcommand("wulff", "Wulff shape of a potential, optionally a parameter scan");
    wulff->add_option("--potential", potential, "Potential JSON")->required()->check(CLI::ExistingFile);
    wulff->add_option("--scan", scan, "name:lo:hi:step");
    wulff->add_option("--off", off, "OFF output");
    wulff->add_option("--csv", csv, "Scan CSV output (default stdout)");

    std::string audit_spec, checks = "densities,bd,tiling,cauchy-binet";
    lab::AuditOptions opt;
    auto* audit = app.add_subcommand("audit", "Audit a multigrid spec");
    audit->add_option("--spec", audit_spec, "Multigrid spec JSON")->required()->check(CLI::ExistingFile);
    audit->add_option("--checks", checks, "Comma-separated: densities,bd,tiling,cauchy-binet");
    audit->add_option("--density-radius", opt.density_radius)->check(CLI::PositiveNumber);
    audit->add_option("--bd-radius", opt.distortion_radius)->check(CLI::PositiveNumber);
    audit->add_option("--tiling-radius", opt.tiling_radius)->check(CLI::PositiveNumber);
    audit->add_option("--samples", opt.tiling_samples);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(scenario, out);
        if (*tile) return cmd_tile(spec, radius, svg, records);
        if (*wulff) {
            if (off.empty() && scan.empty()) throw ConfigError("wulff: give --off, --scan or both");
            return cmd_wulff(potential, scan, off, csv);
        }
        if (*audit) {
            const lab::fs::path file(audit_spec);
            const lab::Loader L{file.parent_path()};
            return report(lab::audit(L.spec(lab::read_json(file), file.string()), split_commas(checks), opt));
        }
    } catch (const wulffgrid::Error& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
