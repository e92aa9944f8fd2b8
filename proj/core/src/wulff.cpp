#include "wulffgrid/wulff.hpp"

#include "wulffgrid/errors.hpp"
#include "wulffgrid/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace wulffgrid {

namespace {

constexpr double kDirTol = 1e-12;

double apply_mode(EvalMode m, double t) { return m == EvalMode::PositivePart ? std::max(t, 0.0) : std::abs(t); }

bool lex_negative(const Vec& v)
{
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v(i) > kDirTol) return false;
        if (v(i) < -kDirTol) return true;
    }
    return false;
}

bool lex_greater(const Vec& a, const Vec& b)
{
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i) > b(i)) return true;
        if (a(i) < b(i)) return false;
    }
    return false;
}

// Unit direction with a fixed sign, so ±v land on the same key.
Vec canonical_direction(const Vec& v)
{
    Vec u = v / v.norm();
    return lex_negative(u) ? Vec(-u) : u;
}

struct Zone {
    Vec dir;
    double half = 0.0;  // the zone is [-half, half]·dir
};

struct Generators {
    Vec center;
    std::vector<Zone> zones;
};

// Segments of a one-signed atom list, parallel ones merged.  Positive part: |w|[0,v];
// absolute value: |w|[-v,v].
Generators generators(const std::vector<RealAtom>& atoms, EvalMode mode, int d)
{
    Generators g{Vec::Zero(d), {}};
    for (const auto& a : atoms) {
        const double len = std::abs(a.weight) * a.v.norm();
        if (len == 0.0) continue;
        const Vec u = canonical_direction(a.v);
        double half = len;
        if (mode == EvalMode::PositivePart) {
            g.center += 0.5 * std::abs(a.weight) * a.v;
            half = 0.5 * len;
        }
        auto it = std::find_if(g.zones.begin(), g.zones.end(),
                               [&](const Zone& z) { return (z.dir - u).cwiseAbs().maxCoeff() <= 1e-12; });
        if (it == g.zones.end())
            g.zones.push_back({u, half});
        else
            it->half += half;
    }
    std::sort(g.zones.begin(), g.zones.end(), [](const Zone& a, const Zone& b) { return lex_greater(a.dir, b.dir); });
    return g;
}

ConvexPolytope zonotope_body(const Generators& g)
{
    ConvexPolytope z = point_polytope(g.center);
    for (const auto& zone : g.zones) z = minkowski_sum(z, segment_polytope(-zone.half * zone.dir, zone.half * zone.dir));
    return z;
}

int resolve_dim(const SupportFunction& phi, int dim)
{
    const int d = dim ? dim : phi.dim();
    if (d != 2 && d != 3) throw DimensionMismatch("Wulff shapes need d in {2,3}");
    return d;
}

std::vector<Vec> distinct_directions(const SupportFunction& phi)
{
    std::vector<Vec> dirs;
    for (const auto& a : phi.atoms) {
        if (a.weight == 0.0 || a.v.norm() == 0.0) continue;
        const Vec u = canonical_direction(a.v);
        if (std::none_of(dirs.begin(), dirs.end(), [&](const Vec& x) { return (x - u).cwiseAbs().maxCoeff() <= 1e-12; }))
            dirs.push_back(u);
    }
    return dirs;
}

void push_unique(std::vector<Vec>& out, const Vec& u)
{
    if (std::none_of(out.begin(), out.end(), [&](const Vec& x) { return (x - u).cwiseAbs().maxCoeff() <= 1e-12; }))
        out.push_back(u);
}

// Rays of the common refinement of the hyperplanes v^⊥, both orientations.
std::vector<Vec> fan_rays(const std::vector<Vec>& dirs, int d)
{
    std::vector<Vec> rays;
    if (d == 2) {
        for (const auto& v : dirs) {
            Vec p(2);
            p << -v(1), v(0);
            push_unique(rays, p);
            push_unique(rays, -p);
        }
        return rays;
    }
    for (std::size_t i = 0; i < dirs.size(); ++i)
        for (std::size_t j = i + 1; j < dirs.size(); ++j) {
            const Eigen::Vector3d c = Eigen::Vector3d(dirs[i]).cross(Eigen::Vector3d(dirs[j]));
            if (c.norm() < 1e-12) continue;
            push_unique(rays, Vec(c.normalized()));
            push_unique(rays, Vec(-c.normalized()));
        }
    return rays;
}

// Gradient of phi on the cell entered from ray r in direction t.
Vec cell_gradient(const SupportFunction& phi, const Vec& r, const Vec& t)
{
    Vec g = Vec::Zero(r.size());
    for (const auto& a : phi.atoms) {
        double s = a.v.dot(r);
        if (std::abs(s) <= 1e-12 * a.v.norm()) s = a.v.dot(t);
        if (phi.mode == EvalMode::PositivePart)
            g += (s > 0 ? a.weight : 0.0) * a.v;
        else
            g += (s > 0 ? a.weight : -a.weight) * a.v;
    }
    return g;
}

std::string label_of(const ShapeClass& s, int dim)
{
    if (dim == 2) return "polygon-" + std::to_string(s.vertices);
    auto only = [&](int k) { return s.facet_sizes.size() == 1 && s.facet_sizes.begin()->first == k; };
    if (s.vertices == 6 && s.facets == 8 && only(3)) return "octahedron";
    if (s.vertices == 8 && s.facets == 6 && only(4)) return "hexahedron";
    if (s.facets == 12 && only(5)) return "pentagonal-dodecahedron";
    if (s.facets == 14 && s.facet_sizes.count(6) && s.facet_sizes.at(6) == 8 && s.facet_sizes.count(4) &&
        s.facet_sizes.at(4) == 6)
        return "truncated-octahedron";
    return "polyhedron-" + std::to_string(s.vertices) + "-" + std::to_string(s.edges) + "-" + std::to_string(s.facets);
}

}  // namespace

double SupportFunction::operator()(const Vec& nu) const
{
    double s = 0;
    for (const auto& a : atoms) s += a.weight * apply_mode(mode, a.v.dot(nu));
    return s;
}

SupportFunction SupportFunction::positive_part() const
{
    SupportFunction out{{}, mode};
    for (const auto& a : atoms)
        if (a.weight > 0) out.atoms.push_back(a);
    return out;
}

SupportFunction SupportFunction::negative_part() const
{
    SupportFunction out{{}, mode};
    for (const auto& a : atoms)
        if (a.weight < 0) out.atoms.push_back({a.v, -a.weight});
    return out;
}

SupportFunction support_function(const Potential& V, const IMat& lattice)
{
    double det = 1.0;
    if (lattice.size() != 0) det = std::abs(static_cast<double>(exact_det(lattice)));
    SupportFunction phi{{}, V.mode};
    for (const auto& a : V.atoms) phi.atoms.push_back({to_real(a.v), V.perimeter_weight(a) / det});
    return phi;
}

SupportFunction operator+(const SupportFunction& a, const SupportFunction& b)
{
    if (a.mode != b.mode && !a.atoms.empty() && !b.atoms.empty())
        throw InvalidPotential("cannot add support functions with different evaluation modes");
    SupportFunction out{a.atoms, a.atoms.empty() ? b.mode : a.mode};
    out.atoms.insert(out.atoms.end(), b.atoms.begin(), b.atoms.end());
    return out;
}

SupportFunction operator*(double s, const SupportFunction& a)
{
    SupportFunction out = a;
    for (auto& x : out.atoms) x.weight *= s;
    return out;
}

WulffShape zonotope_of(const SupportFunction& phi, int dim)
{
    const int d = resolve_dim(phi, dim);
    bool pos = false, neg = false;
    for (const auto& a : phi.atoms) {
        pos = pos || a.weight > 0;
        neg = neg || a.weight < 0;
    }
    if (pos && neg) throw MixedSigns("zonotope_of needs weights of one sign");
    WulffShape w;
    w.body = zonotope_body(generators(phi.atoms, phi.mode, d));
    w.provenance = Provenance::Zonotope;
    w.degenerate = !w.body.full_dimensional();
    return w;
}

WulffShape wulff_halfspace(const SupportFunction& phi, const std::vector<Vec>& extra)
{
    const int d = phi.dim() ? phi.dim() : (extra.empty() ? 0 : static_cast<int>(extra.front().size()));
    auto normals = fan_rays(distinct_directions(phi), d);
    for (int i = 0; i < d; ++i) {
        push_unique(normals, Vec::Unit(d, i));
        push_unique(normals, -Vec::Unit(d, i));
    }
    for (const auto& n : extra) push_unique(normals, n / n.norm());
    std::sort(normals.begin(), normals.end(), [](const Vec& a, const Vec& b) { return lex_greater(a, b); });
    std::vector<Hyperplane> hs;
    for (const auto& n : normals) hs.push_back({n, phi(n)});
    WulffShape w;
    w.provenance = Provenance::Halfspace;
    try {
        w.body = halfspace_intersection(hs);
    } catch (const Empty&) {
        w.body = ConvexPolytope{d, -1, {}, {}, {}, {}};
        w.empty = true;
    }
    w.degenerate = !w.body.full_dimensional();
    return w;
}

WulffShape signed_wulff(const SupportFunction& phi, int dim)
{
    const int d = resolve_dim(phi, dim);
    const auto plus = phi.positive_part();
    const auto minus = phi.negative_part();
    const auto gp = generators(plus.atoms, phi.mode, d);
    const auto gm = generators(minus.atoms, phi.mode, d);

    WulffShape w;
    w.provenance = gm.zones.empty() ? Provenance::Zonotope : Provenance::SignedDifference;
    const ConvexPolytope zp = zonotope_body(gp);
    ConvexPolytope body = translated(zp, -gm.center);
    for (const auto& zone : gm.zones) {
        const auto r = minkowski_diff_segment(body, zone.half * zone.dir);
        if (r.empty) {
            w.body = ConvexPolytope{d, -1, {}, {}, {}, {}};
            w.empty = w.degenerate = true;
            return w;
        }
        body = r.body;
    }
    w.body = body;
    w.degenerate = !body.full_dimensional();

    if (!w.degenerate && !gm.zones.empty()) {
        std::vector<Vec> normals;
        for (const auto& z : {zp, zonotope_body(gm)})
            for (const auto& f : z.facets) normals.push_back(f.normal);
        const auto oracle = wulff_halfspace(phi, normals);
        if (!oracle.degenerate) w.oracle_distance = hausdorff(w.body, oracle.body);
    }
    return w;
}

Positivity positivity_check(const SupportFunction& phi, int dim)
{
    const int d = resolve_dim(phi, dim);
    const auto dirs = distinct_directions(phi);
    const auto rays = fan_rays(dirs, d);

    std::vector<Vec> grads;
    auto add_grad = [&](const Vec& g) { push_unique(grads, g); };
    if (d == 2) {
        std::vector<double> ang;
        for (const auto& r : rays) ang.push_back(std::atan2(r(1), r(0)));
        std::sort(ang.begin(), ang.end());
        for (std::size_t i = 0; i < ang.size(); ++i) {
            const double a = ang[i], b = i + 1 < ang.size() ? ang[i + 1] : ang[0] + 2 * M_PI;
            Vec m(2);
            m << std::cos(0.5 * (a + b)), std::sin(0.5 * (a + b));
            add_grad(cell_gradient(phi, m, m));
        }
    } else {
        for (const auto& r : rays) {
            // tangent directions of the circles through r split its neighbourhood into sectors
            const Eigen::Vector3d r3(r);
            Eigen::Vector3d u = std::abs(r3.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
            u = (u - r3 * r3.dot(u)).normalized();
            const Eigen::Vector3d w = r3.cross(u);
            std::vector<double> ang;
            for (const auto& v : dirs) {
                if (std::abs(v.dot(r)) > 1e-12) continue;
                const Eigen::Vector3d t = Eigen::Vector3d(v).cross(r3);
                const double a = std::atan2(t.dot(w), t.dot(u));
                ang.push_back(a);
                ang.push_back(a > 0 ? a - M_PI : a + M_PI);
            }
            std::sort(ang.begin(), ang.end());
            for (std::size_t i = 0; i < ang.size(); ++i) {
                const double a = ang[i], b = i + 1 < ang.size() ? ang[i + 1] : ang[0] + 2 * M_PI;
                const double m = 0.5 * (a + b);
                add_grad(cell_gradient(phi, r, Vec(std::cos(m) * u + std::sin(m) * w)));
            }
        }
        if (rays.empty()) {
            // at most one great circle
            if (dirs.empty()) {
                add_grad(Vec::Zero(3));
            } else {
                add_grad(cell_gradient(phi, dirs[0], dirs[0]));
                add_grad(cell_gradient(phi, -dirs[0], -dirs[0]));
            }
        }
    }

    std::vector<Vec> cand = rays;
    for (int i = 0; i < d; ++i) {
        cand.push_back(Vec::Unit(d, i));
        cand.push_back(-Vec::Unit(d, i));
    }
    for (const auto& g : grads) {
        if (g.norm() > 1e-15) cand.push_back(-g / g.norm());
        if (d == 3)
            for (const auto& c : dirs) {
                const Vec p = -g + c * c.dot(g);
                if (p.norm() > 1e-15) cand.push_back(p / p.norm());
            }
    }

    Positivity out;
    out.min = std::numeric_limits<double>::infinity();
    double scale = 0;
    for (const auto& a : phi.atoms) scale += std::abs(a.weight) * a.v.norm();
    const double tie = 1e-12 * std::max(1.0, scale);
    for (const auto& y : cand) {
        const double v = phi(y);
        if (v < out.min - tie) {
            out.min = v;
            out.argmin = y;
        } else if (v <= out.min + tie && lex_greater(y, out.argmin)) {
            out.min = std::min(out.min, v);
            out.argmin = y;
        }
    }
    return out;
}

ShapeClass classify_shape(const WulffShape& w)
{
    const auto& p = w.body;
    if (w.empty || !p.full_dimensional()) throw Degenerate("classify_shape needs a full-dimensional body");
    ShapeClass s;
    s.vertices = static_cast<int>(p.vertices.size());
    s.edges = static_cast<int>(p.edges.size());
    s.facets = static_cast<int>(p.facets.size());
    double scale = 1.0;
    for (const auto& v : p.vertices) scale = std::max(scale, v.cwiseAbs().maxCoeff());
    const double tol = 1e-9 * scale;

    const Vec c = vertex_centroid(p);
    s.centrally_symmetric = std::all_of(p.vertices.begin(), p.vertices.end(), [&](const Vec& v) {
        const Vec m = 2 * c - v;
        return std::any_of(p.vertices.begin(), p.vertices.end(), [&](const Vec& x) { return (x - m).norm() <= tol; });
    });
    if (p.dim == 2) {
        s.zonotope = s.centrally_symmetric;
    } else {
        s.zonotope = true;
        for (const auto& f : p.facets) {
            const int k = static_cast<int>(f.loop.size());
            ++s.facet_sizes[k];
            if (k % 2) {
                s.zonotope = false;
                continue;
            }
            const Vec mid = p.vertices[f.loop[0]] + p.vertices[f.loop[k / 2]];
            for (int i = 1; i < k / 2; ++i)
                if ((p.vertices[f.loop[i]] + p.vertices[f.loop[i + k / 2]] - mid).norm() > tol) s.zonotope = false;
        }
    }
    s.label = label_of(s, p.dim);
    return s;
}

std::vector<double> scan_grid(double lo, double hi, double step)
{
    std::vector<double> g;
    const long long n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
    for (long long i = 0; i <= n; ++i) g.push_back(std::round((lo + i * step) * 1e12) / 1e12);
    return g;
}

ScanResult parameter_scan(const Family& family, const std::vector<double>& grid, const std::string& claimed)
{
    ScanResult r;
    r.claimed = claimed;
    for (double c : grid) {
        const auto phi = family(c);
        ScanRow row;
        row.c = c;
        row.positivity_min = positivity_check(phi).min;
        const auto w = signed_wulff(phi);
        row.empty = w.empty;
        row.degenerate = w.degenerate;
        if (w.empty)
            row.label = "empty";
        else if (w.degenerate)
            row.label = "degenerate";
        else {
            row.shape = classify_shape(w);
            row.label = row.shape.label;
        }
        if (!r.intervals.empty() && r.intervals.back().label == row.label)
            r.intervals.back().hi = c;
        else
            r.intervals.push_back({row.label, c, c});
        r.rows.push_back(std::move(row));
    }
    return r;
}

std::string scan_csv(const ScanResult& r)
{
    std::ostringstream os;
    os << "c,n_vertices,n_facets,zonotope,positivity_min\n";
    for (const auto& row : r.rows)
        os << fmt9(row.c) << ',' << row.shape.vertices << ',' << row.shape.facets << ','
           << (row.shape.zonotope ? "true" : "false") << ',' << fmt9(row.positivity_min) << '\n';
    return os.str();
}

SupportFunction fcc_minus_axes(double c)
{
    SupportFunction phi{{}, EvalMode::AbsoluteValue};
    for (int i = 0; i < 3; ++i)
        for (double a : {-1.0, 1.0})
            for (double b : {-1.0, 1.0}) {
                Vec v = Vec::Zero(3);
                v((i + 1) % 3) = a;
                v((i + 2) % 3) = b;
                phi.atoms.push_back({v, c});
            }
    for (int i = 0; i < 3; ++i) {
        phi.atoms.push_back({Vec::Unit(3, i), -1.0});
        phi.atoms.push_back({-Vec::Unit(3, i), -1.0});
    }
    return phi;
}

SupportFunction pyritohedron_family(double w)
{
    SupportFunction phi{{}, EvalMode::AbsoluteValue};
    auto cyclic = [](double x, double y, double z, int shift) {
        Vec v(3);
        const double c[3] = {x, y, z};
        for (int i = 0; i < 3; ++i) v((i + shift) % 3) = c[i];
        return v;
    };
    for (int i = 0; i < 3; ++i) {
        phi.atoms.push_back({Vec::Unit(3, i), 2.0 / 3.0});
        phi.atoms.push_back({-Vec::Unit(3, i), 2.0 / 3.0});
    }
    for (int s = 0; s < 3; ++s)
        for (double a : {-1.0, 1.0})
            for (double b : {-1.0, 1.0}) {
                for (double c : {-1.0, 1.0}) phi.atoms.push_back({cyclic(4 * a, 2 * b, c, s), 4.0 / 21.0});
                phi.atoms.push_back({cyclic(0, 2 * a, 4 * b, s), -w});
            }
    return phi;
}

SupportFunction icosahedral_family(double c)
{
    const double g = 0.5 * (1 + std::sqrt(5.0));
    std::vector<Vec> verts;
    for (int s = 0; s < 3; ++s)
        for (double a : {-1.0, 1.0})
            for (double b : {-1.0, 1.0}) {
                Vec v = Vec::Zero(3);
                v((s + 1) % 3) = a;
                v((s + 2) % 3) = b * g;
                verts.push_back(v);
            }
    SupportFunction phi{{}, EvalMode::AbsoluteValue};
    for (std::size_t i = 0; i < verts.size(); ++i)
        for (std::size_t j = i + 1; j < verts.size(); ++j)
            if (std::abs((verts[i] - verts[j]).norm() - 2.0) < 1e-9) {
                const Vec m = verts[i] + verts[j];
                phi.atoms.push_back({m / m.norm(), c});
            }
    for (const auto& v : verts) phi.atoms.push_back({v / v.norm(), -1.0});
    return phi;
}

}  // namespace wulffgrid
