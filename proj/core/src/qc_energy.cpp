#include "wulffgrid/qc_energy.hpp"

#include "wulffgrid/errors.hpp"
#include "wulffgrid/format.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

namespace wulffgrid {

namespace {

double edge_det(const Multigrid& mg, const Subset& J)
{
    const int d = mg.dim();
    Mat m(d, d);
    for (int i = 0; i < d; ++i) m.col(i) = mg.spec().edges[J[i]];
    return std::abs(m.determinant());
}

double ball_volume(int d, double r)
{
    return std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1) * std::pow(r, d);
}

using Poly2 = std::vector<Eigen::Vector2d>;

double signed_area(const Poly2& p)
{
    double a = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& u = p[i];
        const auto& w = p[(i + 1) % p.size()];
        a += u.x() * w.y() - u.y() * w.x();
    }
    return 0.5 * a;
}

// Sutherland-Hodgman; both polygons convex and ccw.
Poly2 clip(Poly2 subject, const Poly2& window)
{
    for (std::size_t e = 0; e < window.size() && !subject.empty(); ++e) {
        const auto& a = window[e];
        const auto& b = window[(e + 1) % window.size()];
        const auto side = [&](const Eigen::Vector2d& p) {
            return (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
        };
        Poly2 out;
        for (std::size_t i = 0; i < subject.size(); ++i) {
            const auto& p = subject[i];
            const auto& q = subject[(i + 1) % subject.size()];
            const double sp = side(p), sq = side(q);
            if (sp >= 0) out.push_back(p);
            if ((sp >= 0) != (sq >= 0)) out.push_back(p + (q - p) * (sp / (sp - sq)));
        }
        subject = std::move(out);
    }
    return subject;
}

bool key_less(const DualPoint& a, const DualPoint& b)
{
    return IVecLess{}(point_key(a), point_key(b));
}

}  // namespace

double TileWeight::operator()(const Vec& n) const
{
    const Vec u = n.normalized();
    for (std::size_t i = 0; i < normals.size(); ++i) {
        const Vec e = normals[i].normalized();
        if ((u - e).norm() < 1e-9 || (u + e).norm() < 1e-9) return weights[i];
    }
    throw MissingNormal("no weight for the facet normal class");
}

TileWeight uniform_tile_weight(const Multigrid& mg, double w)
{
    TileWeight t;
    for (const auto& r : mg.rails()) {
        t.normals.push_back(r.v_tilde);
        t.weights.push_back(w);
    }
    return t;
}

RailPotential rail_weights(const Multigrid& mg, const TileWeight& w)
{
    RailPotential W;
    for (const auto& r : mg.rails()) {
        const double x = w(r.v_tilde);
        if (!(x >= 0)) throw InvalidPotential("tile weights must be nonnegative");
        W.W.push_back(x * r.facet_area);
    }
    return W;
}

TileSet::TileSet(std::vector<DualPoint> points)
{
    std::sort(points.begin(), points.end(), key_less);
    for (auto& p : points)
        if (keys_.insert(point_key(p)).second) points_.push_back(std::move(p));
}

TileEnergy tile_energy(const Multigrid& mg, const TileSet& X, const RailPotential& W)
{
    const int d = mg.dim(), n = mg.families();
    const std::size_t nr = mg.rails().size();
    TileEnergy e;
    e.primal_facets.assign(nr, 0);
    e.dual_pairs.assign(nr, 0);

    // Primal: facets keyed by (rail, integer label of the base corner); boundary facets occur once.
    std::unordered_map<IVec, int, IVecHash> facets;
    IVec key(n + 1);
    for (const auto& p : X.points()) {
        const Tile t = mg.tile(p);
        const auto& L = mg.lattice(p.j);
        for (int h = 0; h < d; ++h) {
            key(0) = L.rails[h];
            for (int g = 0; g < n; ++g) key(g + 1) = t.lift[g];
            ++facets[key];
            ++key(p.J[h] + 1);
            ++facets[key];
        }
    }
    for (const auto& [k, c] : facets) {
        if (c > 2) throw OverlapDetected("facet shared by " + std::to_string(c) + " tiles", {});
        if (c == 1) ++e.primal_facets[k(0)];
    }

    // Dual: consecutive vertices on rail lines, one endpoint in X.
    for (const auto& p : X.points()) {
        const auto& L = mg.lattice(p.j);
        for (int h = 0; h < d; ++h)
            for (int dir : {1, -1})
                if (!X.contains(mg.neighbour(p, L.rails[h], dir))) ++e.dual_pairs[L.rails[h]];
    }
    for (std::size_t r = 0; r < nr; ++r) {
        e.primal += W.W[r] * static_cast<double>(e.primal_facets[r]);
        e.dual += W.W[r] * static_cast<double>(e.dual_pairs[r]);
    }
    return e;
}

long long ep_count(const Multigrid& mg, const TileSet& X, int rail)
{
    long long c = 0;
    for (const auto& p : X.points()) {
        const auto& L = mg.lattice(p.j);
        for (int h = 0; h < mg.dim(); ++h) {
            if (L.rails[h] != rail) continue;
            for (int dir : {1, -1})
                if (!X.contains(mg.neighbour(p, rail, dir))) ++c;
        }
    }
    return c;
}

long long ep_count(const Multigrid& mg, const TileSet& X, int rail, const Subset& J)
{
    const int j = mg.subset_index(J);
    const auto& L = mg.lattice(j);
    const auto it = std::find(L.rails.begin(), L.rails.end(), rail);
    if (it == L.rails.end()) throw InvalidSubset("J does not contain J'_v");
    const int h = L.rail_member[it - L.rails.begin()];
    long long c = 0;
    for (const auto& p : X.points()) {
        if (p.j != j) continue;
        IVec key = point_key(p);
        for (int dir : {1, -1}) {
            key(h + 1) += dir;
            if (!X.contains(key)) ++c;
            key(h + 1) -= dir;
        }
    }
    return c;
}

BondCount bond_count_check(const Multigrid& mg, const TileSet& X, int rail)
{
    const int d = mg.dim();
    BondCount b;
    b.surjective = true;
    const Vec& v = mg.rails()[rail].v;
    for (std::size_t j = 0; j < mg.subsets().size(); ++j) {
        const auto& L = mg.lattice(j);
        const auto it = std::find(L.rails.begin(), L.rails.end(), rail);
        if (it == L.rails.end()) continue;
        b.sublattice_sum += ep_count(mg, X, rail, mg.subsets()[j]);
        const int h = L.rail_member[it - L.rails.begin()];
        const int toward = L.basis.col(h).dot(v) > 0 ? 1 : -1;
        for (const auto& p : X.points()) {
            if (p.j != static_cast<int>(j)) continue;
            for (int step : {1, -1}) {
                IVec target = point_key(p);
                target(h + 1) += step;
                if (X.contains(target)) continue;
                // walk the line from p to its Lambda_J neighbour; some consecutive pair must be cut
                DualPoint cur = p;
                bool cut = false, reached = false;
                for (int guard = 0; guard < 1000 && !reached; ++guard) {
                    DualPoint nxt = mg.neighbour(cur, rail, step * toward);
                    cut = cut || X.contains(cur) != X.contains(nxt);
                    reached = point_key(nxt) == target;
                    cur = std::move(nxt);
                }
                if (!(cut && reached)) b.surjective = false;
            }
        }
    }
    b.bound = static_cast<long long>(mg.families() - d + 1) * ep_count(mg, X, rail);
    b.holds = b.sublattice_sum <= b.bound;
    return b;
}

double phi_W(const Vec& nu, const Multigrid& mg, const RailPotential& W)
{
    if (nu.norm() == 0) throw ZeroDirection("phi_W at 0");
    const auto& A = mg.distortion().A.linear;
    double s = 0;
    for (std::size_t r = 0; r < mg.rails().size(); ++r) {
        const auto& R = mg.rails()[r];
        s += W.W[r] / R.cell_measure * std::max(0.0, nu.dot(A * R.v));
    }
    return s / A.determinant();
}

double perimeter_P_W(const ConvexPolytope& E, const Multigrid& mg, const RailPotential& W)
{
    if (E.dim != mg.dim()) throw DimensionMismatch("body and multigrid dimensions differ");
    double p = 0;
    for (const auto& f : polytope_measure(E).facets) p += f.area * phi_W(f.normal, mg, W);
    return p;
}

double qc_limit_perimeter(const ConvexPolytope& E, const Multigrid& mg, const RailPotential& W)
{
    const ConvexPolytope F = mapped(E, mg.distortion().A.linear);
    const double vol = polytope_measure(F).volume;
    return perimeter_P_W(scaled(F, std::pow(vol, -1.0 / mg.dim())), mg, W);
}

double union_measure(const Multigrid& mg, const TileSet& X)
{
    std::vector<double> vol(mg.subsets().size());
    for (std::size_t j = 0; j < vol.size(); ++j) vol[j] = edge_det(mg, mg.subsets()[j]);
    double s = 0;
    for (const auto& p : X.points()) s += vol[p.j];
    return s;
}

double rescaled_tile_energy(const Multigrid& mg, const TileSet& X, const RailPotential& W)
{
    const double area = union_measure(mg, X);
    if (area == 0) return 0;
    const int d = mg.dim();
    return 0.5 * tile_energy(mg, X, W).primal / std::pow(area, (d - 1.0) / d);
}

QcRecovery qc_recovery(const ConvexPolytope& E, std::size_t N, const Multigrid& mg)
{
    const int d = mg.dim();
    if (E.dim != d || !E.full_dimensional()) throw DimensionMismatch("recovery needs a full-dimensional body");
    const auto meas = polytope_measure(E);
    if (std::abs(meas.volume - 1) > 1e-9) throw DimensionMismatch("recovery target must have unit volume");
    const double rho = mg.density();
    QcRecovery r;
    r.threshold = static_cast<std::size_t>(std::ceil(rho * ball_volume(d, mg.max_tile_diameter())));
    if (N < r.threshold)
        throw InfeasibleCount("N = " + std::to_string(N) + " is below the tile-diameter threshold " +
                              std::to_string(r.threshold));
    r.scale = std::pow(static_cast<double>(N) / rho, 1.0 / d);
    const ConvexPolytope sE = scaled(E, r.scale);
    const Vec c = vertex_centroid(sE);
    double rad = 0;
    for (const auto& v : sE.vertices) rad = std::max(rad, (v - c).norm());

    // Gauge of x for the homotheties c + t (sE - c): the smallest t with x inside.
    const auto hs = sE.halfspaces();
    const auto gauge = [&](const Vec& x) {
        double t = 0;
        for (const auto& h : hs) {
            const double room = h.offset - h.normal.dot(c);  // > 0, c is interior
            t = std::max(t, h.normal.dot(x - c) / room);
        }
        return t;
    };
    struct Ranked {
        double t, rank;
        DualPoint p;
    };
    std::vector<Ranked> ranked;
    double reach = 1.0;
    while (true) {
        ranked.clear();
        mg.for_each_point(Region::ball(c, rad * (reach + 0.05)), [&](const DualPoint& p) {
            const double t = gauge(p.x);
            // A facet parallel to a grid family ties a whole line of points; the strictly convex
            // term keeps every line's selection contiguous.
            if (t <= reach) ranked.push_back({t, t + 1e-9 * (p.x - c).squaredNorm() / (rad * rad), p});
        });
        r.base_count = 0;
        for (const auto& q : ranked) r.base_count += q.t <= 1.0;
        if (ranked.size() >= N) break;
        reach += 0.25;
    }
    r.correction = static_cast<long long>(N) - static_cast<long long>(r.base_count);
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        return a.rank != b.rank ? a.rank < b.rank : key_less(a.p, b.p);
    });
    r.homothety = ranked[N - 1].t;
    std::vector<DualPoint> Y;
    Y.reserve(N);
    for (std::size_t i = 0; i < N; ++i) Y.push_back(std::move(ranked[i].p));
    double boundary = 0;
    for (const auto& f : meas.facets) boundary += f.area;
    r.correction_constant = std::abs(static_cast<double>(r.correction)) /
                            (boundary * std::pow(static_cast<double>(N), (d - 1.0) / d));
    r.X = TileSet(std::move(Y));
    return r;
}

double recovery_volume_error(const Multigrid& mg, const QcRecovery& r, const ConvexPolytope& E)
{
    if (mg.dim() != 2 || E.dim != 2 || !E.full_dimensional()) throw DimensionMismatch("volume error is 2D only");
    const auto& A = mg.distortion().A;
    const Mat inv = A.linear.inverse();
    Poly2 window;
    for (int i : E.loop) window.push_back(E.vertices[i]);
    if (signed_area(window) < 0) std::reverse(window.begin(), window.end());
    const double areaE = signed_area(window);

    double tiles = 0, inter = 0;
    for (const auto& p : r.X.points()) {
        const Tile t = mg.tile(p);
        const Vec corners[4] = {t.anchor, t.anchor + t.generators[0], t.anchor + t.generators[0] + t.generators[1],
                                t.anchor + t.generators[1]};
        Poly2 q;
        for (const auto& c : corners) q.push_back(inv * (c - A.offset) / r.scale);
        if (signed_area(q) < 0) std::reverse(q.begin(), q.end());
        tiles += signed_area(q);
        const Poly2 cut = clip(q, window);
        if (cut.size() >= 3) inter += signed_area(cut);
    }
    return tiles + areaE - 2 * inter;
}

TileSet random_tile_union(const Multigrid& mg, std::size_t max_size, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const int d = mg.dim();
    const std::size_t target = 1 + rng() % std::max<std::size_t>(1, max_size);

    std::vector<DualPoint> start;
    double reach = 2 * std::pow(mg.density(), -1.0 / d) + 1;
    while (start.empty()) {
        mg.for_each_point(Region::ball(Vec::Zero(d), reach), [&](const DualPoint& p) { start.push_back(p); });
        reach *= 2;
    }
    std::vector<DualPoint> members{start[rng() % start.size()]};
    std::unordered_set<IVec, IVecHash> seen{point_key(members[0])};
    while (members.size() < target) {
        const auto& p = members[rng() % members.size()];
        const int h = static_cast<int>(rng() % d);
        DualPoint q = mg.neighbour(p, mg.lattice(p.j).rails[h], rng() % 2 ? 1 : -1);
        if (seen.insert(point_key(q)).second) members.push_back(std::move(q));
    }
    // punch holes so the boundary is not just the outer rim
    for (std::size_t i = 0; i < members.size() / 10 && members.size() > 1; ++i)
        members.erase(members.begin() + static_cast<std::ptrdiff_t>(rng() % members.size()));
    return TileSet(std::move(members));
}

DensityAudit density_audit(const Multigrid& mg, const Region& dual_region)
{
    DensityAudit a;
    const std::size_t m = mg.subsets().size();
    std::vector<std::size_t> count(m, 0);
    mg.for_each_point(dual_region, [&](const DualPoint& p) { ++count[p.j]; });
    double area = 0;
    for (std::size_t j = 0; j < m; ++j) area += count[j] * edge_det(mg, mg.subsets()[j]);
    const double meas = dual_region.measure();
    for (std::size_t j = 0; j < m; ++j) {
        DensityAuditRow row;
        row.J = mg.subsets()[j];
        row.rho = mg.lattice(j).rho;
        row.count = count[j];
        row.area_fraction = area > 0 ? count[j] * edge_det(mg, row.J) / area : 0;
        row.expected_count = meas / mg.lattice(j).covolume;
        row.cell_ratio = count[j] * mg.lattice(j).covolume / meas;
        a.rho_sum += row.rho;
        a.max_fraction_error = std::max(a.max_fraction_error, std::abs(row.area_fraction / row.rho - 1));
        a.max_count_error = std::max(a.max_count_error, std::abs(row.cell_ratio - 1));
        a.rows.push_back(std::move(row));
    }
    return a;
}

}  // namespace wulffgrid
