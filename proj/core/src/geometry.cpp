#include "wulffgrid/geometry.hpp"

#include "lp.hpp"
#include "wulffgrid/errors.hpp"
#include "wulffgrid/format.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace wulffgrid {

namespace {

using V2 = Eigen::Vector2d;
using V3 = Eigen::Vector3d;

bool lex_less(const Vec& a, const Vec& b)
{
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i) < b(i)) return true;
        if (a(i) > b(i)) return false;
    }
    return false;
}

double data_scale(const std::vector<Vec>& pts)
{
    double s = 1.0;
    for (const auto& p : pts) s = std::max(s, p.cwiseAbs().maxCoeff());
    return s;
}

// Sorted, with near-duplicates (within tol in every coordinate) collapsed.
std::vector<Vec> dedupe(std::vector<Vec> pts, double tol)
{
    std::sort(pts.begin(), pts.end(), lex_less);
    std::vector<Vec> out;
    out.reserve(pts.size());
    for (auto& p : pts) {
        bool dup = false;
        for (auto it = out.rbegin(); it != out.rend(); ++it) {
            if (p(0) - (*it)(0) > tol) break;
            if ((p - *it).cwiseAbs().maxCoeff() <= tol) {
                dup = true;
                break;
            }
        }
        if (!dup) out.push_back(std::move(p));
    }
    return out;
}

double cross2(const V2& o, const V2& a, const V2& b)
{
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Andrew's monotone chain.  Returns indices into p, ccw, collinear points dropped.
std::vector<int> hull2d(const std::vector<V2>& p, double tol)
{
    const int n = static_cast<int>(p.size());
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (p[a].x() != p[b].x()) return p[a].x() < p[b].x();
        return p[a].y() < p[b].y();
    });
    if (n <= 1) return idx;
    auto left = [&](int o, int a, int b) {
        return cross2(p[o], p[a], p[b]) > tol * (p[b] - p[o]).norm();
    };
    std::vector<int> h;
    for (int i : idx) {
        while (h.size() >= 2 && !left(h[h.size() - 2], h.back(), i)) h.pop_back();
        h.push_back(i);
    }
    const std::size_t lower = h.size() + 1;
    for (auto it = idx.rbegin() + 1; it != idx.rend(); ++it) {
        while (h.size() >= lower && !left(h[h.size() - 2], h.back(), *it)) h.pop_back();
        h.push_back(*it);
    }
    h.pop_back();
    if (h.size() == 2 && (p[h[0]] - p[h[1]]).norm() <= tol) h.pop_back();
    return h;
}

struct Plane3 {
    V3 n;
    double off;
};

// Incremental hull; only the supporting planes are returned; facets are rebuilt from them.
std::vector<Plane3> hull_planes_3d(const std::vector<V3>& p, double tol)
{
    const int n = static_cast<int>(p.size());
    int i0 = 0;
    int i1 = -1, i2 = -1, i3 = -1;
    double best = -1;
    for (int i = 0; i < n; ++i)
        if (double d = (p[i] - p[i0]).norm(); d > best) best = d, i1 = i;
    best = -1;
    for (int i = 0; i < n; ++i)
        if (double d = (p[i] - p[i0]).cross(p[i1] - p[i0]).norm(); d > best) best = d, i2 = i;
    const V3 n012 = (p[i1] - p[i0]).cross(p[i2] - p[i0]).normalized();
    best = -1;
    for (int i = 0; i < n; ++i)
        if (double d = std::abs(n012.dot(p[i] - p[i0])); d > best) best = d, i3 = i;

    const V3 inner = (p[i0] + p[i1] + p[i2] + p[i3]) / 4.0;

    struct Tri {
        int v[3];
        V3 n;
        double off;
        bool alive;
    };
    std::vector<Tri> tris;
    std::unordered_map<long long, int> edge_owner;
    auto ekey = [n](int a, int b) { return static_cast<long long>(a) * n + b; };

    auto add_tri = [&](int a, int b, int c, const V3* fallback) {
        V3 nn = (p[b] - p[a]).cross(p[c] - p[a]);
        const double len = nn.norm();
        if (len > 1e-14 * (p[b] - p[a]).squaredNorm() + 1e-300)
            nn /= len;
        else if (fallback)
            nn = *fallback;
        Tri t{{a, b, c}, nn, nn.dot(p[a]), true};
        tris.push_back(t);
        const int id = static_cast<int>(tris.size()) - 1;
        edge_owner[ekey(a, b)] = id;
        edge_owner[ekey(b, c)] = id;
        edge_owner[ekey(c, a)] = id;
    };
    auto oriented = [&](int a, int b, int c) {
        V3 nn = (p[b] - p[a]).cross(p[c] - p[a]);
        if (nn.dot(inner - p[a]) > 0) std::swap(b, c);
        add_tri(a, b, c, nullptr);
    };
    oriented(i0, i1, i2);
    oriented(i0, i1, i3);
    oriented(i0, i2, i3);
    oriented(i1, i2, i3);

    std::vector<int> order;
    for (int i = 0; i < n; ++i)
        if (i != i0 && i != i1 && i != i2 && i != i3) order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return (p[a] - inner).squaredNorm() > (p[b] - inner).squaredNorm();
    });

    std::vector<char> visible;
    for (int pi : order) {
        visible.assign(tris.size(), 0);
        bool any = false;
        for (std::size_t t = 0; t < tris.size(); ++t) {
            if (!tris[t].alive) continue;
            if (tris[t].n.dot(p[pi]) - tris[t].off > tol) {
                visible[t] = 1;
                any = true;
            }
        }
        if (!any) continue;
        struct Horizon {
            int a, b;
            V3 n;
        };
        std::vector<Horizon> horizon;
        for (std::size_t t = 0; t < tris.size(); ++t) {
            if (!visible[t]) continue;
            for (int e = 0; e < 3; ++e) {
                const int a = tris[t].v[e], b = tris[t].v[(e + 1) % 3];
                auto it = edge_owner.find(ekey(b, a));
                if (it == edge_owner.end() || !visible[it->second]) horizon.push_back({a, b, tris[t].n});
            }
        }
        for (std::size_t t = 0; t < visible.size(); ++t) {
            if (!visible[t]) continue;
            tris[t].alive = false;
            for (int e = 0; e < 3; ++e) {
                auto it = edge_owner.find(ekey(tris[t].v[e], tris[t].v[(e + 1) % 3]));
                if (it != edge_owner.end() && it->second == static_cast<int>(t)) edge_owner.erase(it);
            }
        }
        for (const auto& h : horizon) add_tri(h.a, h.b, pi, &h.n);
    }

    std::vector<Plane3> out;
    for (const auto& t : tris)
        if (t.alive) out.push_back({t.n, t.off});
    return out;
}

V3 newell_normal(const std::vector<V3>& poly)
{
    V3 nn = V3::Zero();
    for (std::size_t i = 0; i < poly.size(); ++i) nn += poly[i].cross(poly[(i + 1) % poly.size()]);
    return nn;
}

void rotate_to_min(std::vector<int>& loop)
{
    if (loop.empty()) return;
    auto it = std::min_element(loop.begin(), loop.end());
    std::rotate(loop.begin(), it, loop.end());
}

// Orthonormal basis of the affine span (columns) and its dimension.
struct AffineFrame {
    Vec origin;
    Mat basis;  // d x k
};

AffineFrame affine_frame(const std::vector<Vec>& pts, double tol)
{
    const int d = static_cast<int>(pts[0].size());
    Vec c = Vec::Zero(d);
    for (const auto& p : pts) c += p;
    c /= static_cast<double>(pts.size());
    Mat m(d, pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) m.col(i) = pts[i] - c;
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    int k = 0;
    const double thr = tol * std::sqrt(static_cast<double>(pts.size()));
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > thr) ++k;
    return {c, svd.matrixU().leftCols(k)};
}

void collect_edges_from_loop(const std::vector<int>& loop, std::vector<std::array<int, 2>>& edges)
{
    for (std::size_t i = 0; i < loop.size(); ++i) {
        int a = loop[i], b = loop[(i + 1) % loop.size()];
        if (a > b) std::swap(a, b);
        edges.push_back({a, b});
    }
}

void finalize_edges(std::vector<std::array<int, 2>>& edges)
{
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

// Renumber so vertices keep only the used points, in lexicographic order.
ConvexPolytope compact(ConvexPolytope poly, const std::vector<Vec>& pts)
{
    std::vector<int> used;
    for (const auto& f : poly.facets) used.insert(used.end(), f.loop.begin(), f.loop.end());
    used.insert(used.end(), poly.loop.begin(), poly.loop.end());
    for (const auto& e : poly.edges) used.insert(used.end(), e.begin(), e.end());
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    std::unordered_map<int, int> remap;
    poly.vertices.clear();
    for (int u : used) {
        remap[u] = static_cast<int>(poly.vertices.size());
        poly.vertices.push_back(pts[u]);
    }
    for (auto& f : poly.facets) {
        for (auto& i : f.loop) i = remap[i];
        if (poly.dim == 3) rotate_to_min(f.loop);
    }
    for (auto& i : poly.loop) i = remap[i];
    rotate_to_min(poly.loop);
    for (auto& e : poly.edges) {
        e = {remap[e[0]], remap[e[1]]};
        if (e[0] > e[1]) std::swap(e[0], e[1]);
    }
    finalize_edges(poly.edges);
    std::sort(poly.facets.begin(), poly.facets.end(),
              [](const Facet& a, const Facet& b) { return lex_less(a.normal, b.normal); });
    return poly;
}

ConvexPolytope full_hull_2d(const std::vector<Vec>& pts, double tol)
{
    std::vector<V2> p2;
    for (const auto& p : pts) p2.emplace_back(p(0), p(1));
    const auto loop = hull2d(p2, tol);
    ConvexPolytope poly;
    poly.dim = 2;
    poly.affine_dim = 2;
    poly.loop = loop;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const int a = loop[i], b = loop[(i + 1) % loop.size()];
        const V2 e = p2[b] - p2[a];
        Vec nn(2);
        nn << e.y(), -e.x();
        nn.normalize();
        Facet f;
        f.normal = nn;
        f.offset = 0.5 * (nn.dot(pts[a]) + nn.dot(pts[b]));
        f.loop = {a, b};
        poly.facets.push_back(std::move(f));
    }
    collect_edges_from_loop(loop, poly.edges);
    return compact(std::move(poly), pts);
}

ConvexPolytope full_hull_3d(const std::vector<Vec>& pts, double tol)
{
    std::vector<V3> p3;
    for (const auto& p : pts) p3.emplace_back(p(0), p(1), p(2));
    auto planes = hull_planes_3d(p3, tol);

    // merge coplanar triangles
    std::vector<Plane3> merged;
    for (const auto& pl : planes) {
        bool found = false;
        for (auto& m : merged) {
            if (m.n.dot(pl.n) > 1.0 - 1e-9 && std::abs(m.off - pl.off) <= 10 * tol) {
                found = true;
                break;
            }
        }
        if (!found) merged.push_back(pl);
    }

    ConvexPolytope poly;
    poly.dim = 3;
    poly.affine_dim = 3;
    for (const auto& pl : merged) {
        double off = -std::numeric_limits<double>::infinity();
        for (const auto& q : p3) off = std::max(off, pl.n.dot(q));
        std::vector<int> on;
        for (int i = 0; i < static_cast<int>(p3.size()); ++i)
            if (off - pl.n.dot(p3[i]) <= 10 * tol) on.push_back(i);
        if (on.size() < 3) continue;
        V3 u = std::abs(pl.n.x()) < 0.9 ? V3::UnitX() : V3::UnitY();
        u = (u - pl.n * pl.n.dot(u)).normalized();
        const V3 w = pl.n.cross(u);
        std::vector<V2> q2;
        for (int i : on) q2.emplace_back(u.dot(p3[i]), w.dot(p3[i]));
        const auto loc = hull2d(q2, tol);
        if (loc.size() < 3) continue;
        Facet f;
        std::vector<V3> poly3;
        for (int li : loc) {
            f.loop.push_back(on[li]);
            poly3.push_back(p3[on[li]]);
        }
        V3 nn = newell_normal(poly3);
        if (nn.norm() <= 0) continue;
        nn.normalize();
        double o = 0;
        for (const auto& q : poly3) o += nn.dot(q);
        f.normal = Vec(nn);
        f.offset = o / static_cast<double>(poly3.size());
        collect_edges_from_loop(f.loop, poly.edges);
        poly.facets.push_back(std::move(f));
    }
    // The same plane can survive twice when triangles disagree slightly; keep the first.
    std::vector<Facet> uniq;
    for (auto& f : poly.facets) {
        bool dup = false;
        for (const auto& g : uniq)
            if (g.normal.dot(f.normal) > 1.0 - 1e-9 && std::abs(g.offset - f.offset) <= 10 * tol) dup = true;
        if (!dup) uniq.push_back(std::move(f));
    }
    poly.facets = std::move(uniq);
    poly.edges.clear();
    for (const auto& f : poly.facets) collect_edges_from_loop(f.loop, poly.edges);
    return compact(std::move(poly), pts);
}

double seg_dist(const Vec& x, const Vec& a, const Vec& b)
{
    const Vec ab = b - a;
    const double l2 = ab.squaredNorm();
    double t = l2 > 0 ? (x - a).dot(ab) / l2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (x - (a + t * ab)).norm();
}

// Distance from x to a planar convex polygon in R^3 given by its ccw loop about n.
double polygon_dist_3d(const Vec& x, const std::vector<Vec>& poly, const V3& n)
{
    const V3 x3(x(0), x(1), x(2));
    const V3 a0(poly[0](0), poly[0](1), poly[0](2));
    const double h = n.dot(x3 - a0);
    const V3 xp = x3 - h * n;
    bool inside = true;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec& a = poly[i];
        const Vec& b = poly[(i + 1) % poly.size()];
        const V3 a3(a(0), a(1), a(2)), b3(b(0), b(1), b(2));
        if ((b3 - a3).cross(xp - a3).dot(n) < -1e-14 * (b3 - a3).norm()) {
            inside = false;
            break;
        }
    }
    if (inside) return std::abs(h);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) best = std::min(best, seg_dist(x, poly[i], poly[(i + 1) % poly.size()]));
    return best;
}

std::vector<Vec> loop_points(const ConvexPolytope& p, const std::vector<int>& loop)
{
    std::vector<Vec> out;
    for (int i : loop) out.push_back(p.vertices[i]);
    return out;
}

ConvexPolytope empty_polytope(int dim)
{
    ConvexPolytope p;
    p.dim = dim;
    p.affine_dim = -1;
    return p;
}

Vec chebyshev_center(const std::vector<Hyperplane>& hs, int d, double scale, double& radius, bool& feasible)
{
    const int m = static_cast<int>(hs.size());
    Mat a = Mat::Zero(m + 1, 2 * d + 1);
    Vec b(m + 1), c = Vec::Zero(2 * d + 1);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < d; ++j) {
            a(i, j) = hs[i].normal(j);
            a(i, d + j) = -hs[i].normal(j);
        }
        a(i, 2 * d) = 1.0;
        b(i) = hs[i].offset / scale;
    }
    a(m, 2 * d) = 1.0;
    b(m) = 1.0;
    c(2 * d) = 1.0;
    const auto res = detail::solve_lp(a, b, c);
    feasible = res.status == detail::LpStatus::Optimal;
    if (!feasible) return Vec::Zero(d);
    radius = res.x(2 * d) * scale;
    return (res.x.head(d) - res.x.segment(d, d)) * scale;
}

bool positively_spanning(const std::vector<Hyperplane>& hs, int d)
{
    std::vector<Vec> normals;
    for (const auto& h : hs) normals.push_back(h.normal);
    normals.push_back(Vec::Zero(d));
    const auto hull = hull_of(normals, d);
    if (!hull.full_dimensional()) return false;
    for (const auto& f : hull.facets)
        if (f.offset <= 1e-9) return false;
    return true;
}

}  // namespace

std::vector<Hyperplane> ConvexPolytope::halfspaces() const
{
    std::vector<Hyperplane> out;
    for (const auto& f : facets) out.push_back({f.normal, f.offset});
    return out;
}

ConvexPolytope hull_of(const std::vector<Vec>& points, int dim)
{
    if (dim != 2 && dim != 3) throw DimensionMismatch("hulls are implemented for d in {2,3}");
    if (points.empty()) return empty_polytope(dim);
    for (const auto& p : points)
        if (p.size() != dim) throw DimensionMismatch("point dimension differs from hull dimension");
    const double scale = data_scale(points);
    const double tol = kRelTol * scale;
    const auto pts = dedupe(points, tol);

    const auto frame = affine_frame(pts, tol);
    const int k = static_cast<int>(frame.basis.cols());
    if (k == dim) return dim == 2 ? full_hull_2d(pts, tol) : full_hull_3d(pts, tol);

    ConvexPolytope poly;
    poly.dim = dim;
    poly.affine_dim = k;
    if (k == 0) {
        poly.vertices = {pts.front()};
        return poly;
    }
    std::vector<double> t;
    for (const auto& p : pts) t.push_back(frame.basis.col(0).dot(p - frame.origin));
    if (k == 1) {
        const auto [lo, hi] = std::minmax_element(t.begin(), t.end());
        poly.edges = {{static_cast<int>(lo - t.begin()), static_cast<int>(hi - t.begin())}};
        return compact(std::move(poly), pts);
    }
    std::vector<V2> q;
    for (const auto& p : pts) {
        const Vec c = frame.basis.transpose() * (p - frame.origin);
        q.emplace_back(c(0), c(1));
    }
    poly.loop = hull2d(q, tol);
    collect_edges_from_loop(poly.loop, poly.edges);
    return compact(std::move(poly), pts);
}

ConvexPolytope convex_hull(const std::vector<Vec>& points)
{
    if (points.empty()) throw DegenerateHull("no points");
    const int d = static_cast<int>(points[0].size());
    auto poly = hull_of(points, d);
    if (!poly.full_dimensional())
        throw DegenerateHull("points span an affine subspace of dimension " + std::to_string(poly.affine_dim));
    return poly;
}

ConvexPolytope halfspace_intersection(const std::vector<Hyperplane>& input, const std::optional<Box>& bbox)
{
    if (input.empty() && !bbox) throw Unbounded("no halfspaces");
    const int d = static_cast<int>(!input.empty() ? input[0].normal.size() : bbox->lo.size());
    std::vector<Hyperplane> hs;
    for (const auto& h : input) {
        if (h.normal.size() != d) throw DimensionMismatch("halfspace normals differ in dimension");
        const double len = h.normal.norm();
        if (len == 0) {
            if (h.offset < 0) throw Empty("0 <= negative offset");
            continue;
        }
        hs.push_back({h.normal / len, h.offset / len});
    }
    if (bbox) {
        for (int i = 0; i < d; ++i) {
            Vec e = Vec::Zero(d);
            e(i) = 1;
            hs.push_back({e, bbox->hi(i)});
            hs.push_back({-e, -bbox->lo(i)});
        }
    }
    double scale = 1.0;
    for (const auto& h : hs) scale = std::max(scale, std::abs(h.offset));
    const double tol = kRelTol * scale;

    double radius = 0;
    bool feasible = false;
    const Vec c = chebyshev_center(hs, d, scale, radius, feasible);
    if (!feasible) throw Empty("halfspaces have no common point");

    if (radius > tol) {
        std::vector<Vec> dual;
        for (const auto& h : hs) dual.push_back(h.normal / (h.offset - h.normal.dot(c)));
        const auto dh = hull_of(dual, d);
        if (!dh.full_dimensional()) throw Unbounded("normals do not positively span");
        std::vector<Vec> verts;
        for (const auto& f : dh.facets) {
            if (f.offset <= 1e-12 * dh.vertices.front().norm()) throw Unbounded("recession direction found");
            Vec v = c + f.normal / f.offset;
            // polish against the constraints active at this vertex
            std::vector<int> act;
            for (std::size_t i = 0; i < hs.size(); ++i)
                if (std::abs(hs[i].normal.dot(v) - hs[i].offset) <= 1e3 * tol) act.push_back(static_cast<int>(i));
            if (static_cast<int>(act.size()) >= d) {
                Mat a(act.size(), d);
                Vec b(act.size());
                for (std::size_t r = 0; r < act.size(); ++r) {
                    a.row(r) = hs[act[r]].normal.transpose();
                    b(r) = hs[act[r]].offset;
                }
                const Vec w = a.colPivHouseholderQr().solve(b);
                if ((w - v).norm() <= 1e3 * tol) v = w;
            }
            verts.push_back(v);
        }
        return hull_of(verts, d);
    }

    if (!positively_spanning(hs, d)) throw Unbounded("normals do not positively span");
    // Lower-dimensional intersection: enumerate vertices of the arrangement.
    std::vector<Vec> verts;
    const int m = static_cast<int>(hs.size());
    std::vector<int> pick(d);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == d) {
            Mat a(d, d);
            Vec b(d);
            for (int r = 0; r < d; ++r) {
                a.row(r) = hs[pick[r]].normal.transpose();
                b(r) = hs[pick[r]].offset;
            }
            Eigen::FullPivLU<Mat> lu(a);
            if (!lu.isInvertible()) return;
            const Vec x = lu.solve(b);
            for (const auto& h : hs)
                if (h.normal.dot(x) > h.offset + 10 * tol) return;
            verts.push_back(x);
            return;
        }
        for (int i = start; i < m; ++i) {
            pick[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    if (verts.empty()) throw Empty("degenerate intersection without vertices");
    return hull_of(verts, d);
}

ConvexPolytope minkowski_sum(const ConvexPolytope& p, const ConvexPolytope& q)
{
    if (p.dim != q.dim) throw DimensionMismatch("minkowski_sum of different dimensions");
    if (p.is_empty() || q.is_empty()) return empty_polytope(p.dim);
    std::vector<Vec> sums;
    sums.reserve(p.vertices.size() * q.vertices.size());
    for (const auto& a : p.vertices)
        for (const auto& b : q.vertices) sums.push_back(a + b);
    return hull_of(sums, p.dim);
}

DiffResult minkowski_diff_segment(const ConvexPolytope& p, const Vec& v)
{
    if (v.size() != p.dim) throw DimensionMismatch("segment dimension differs from body");
    if (p.is_empty()) return {p, true};
    const double scale = std::max(1.0, data_scale(p.vertices));
    const double tol = kRelTol * scale;
    if (v.norm() <= tol) return {p, false};

    if (p.full_dimensional()) {
        std::vector<Hyperplane> hs;
        for (const auto& f : p.facets) hs.push_back({f.normal, f.offset - std::abs(f.normal.dot(v))});
        try {
            return {halfspace_intersection(hs), false};
        } catch (const Empty&) {
            return {empty_polytope(p.dim), true};
        }
    }

    const auto frame = affine_frame(p.vertices, tol);
    const int k = static_cast<int>(frame.basis.cols());
    const Vec w = frame.basis.transpose() * v;
    if ((v - frame.basis * w).norm() > tol || k == 0) return {empty_polytope(p.dim), true};
    if (k == 1) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& x : p.vertices) {
            const double t = frame.basis.col(0).dot(x - frame.origin);
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
        const double s = std::abs(w(0));
        if (lo + s > hi + tol) return {empty_polytope(p.dim), true};
        const double a = lo + s, b = std::max(a, hi - s);
        return {hull_of({frame.origin + a * frame.basis.col(0), frame.origin + b * frame.basis.col(0)}, p.dim), false};
    }
    // flat polygon inside R^3: work in its plane
    std::vector<Vec> q;
    for (const auto& x : p.vertices) q.push_back(frame.basis.transpose() * (x - frame.origin));
    const auto flat = hull_of(q, 2);
    const auto r = minkowski_diff_segment(flat, w);
    if (r.empty) return {empty_polytope(p.dim), true};
    std::vector<Vec> lifted;
    for (const auto& y : r.body.vertices) lifted.push_back(frame.origin + frame.basis * y);
    return {hull_of(lifted, p.dim), false};
}

Measure polytope_measure(const ConvexPolytope& p)
{
    Measure m;
    if (!p.full_dimensional()) return m;
    for (const auto& f : p.facets) {
        double area = 0;
        if (p.dim == 2) {
            area = (p.vertices[f.loop[1]] - p.vertices[f.loop[0]]).norm();
        } else {
            std::vector<V3> poly;
            for (int i : f.loop) poly.emplace_back(p.vertices[i](0), p.vertices[i](1), p.vertices[i](2));
            area = 0.5 * newell_normal(poly).norm();
        }
        m.facets.push_back({f.normal, area});
        m.volume += f.offset * area / p.dim;
    }
    return m;
}

double support(const ConvexPolytope& p, const Vec& u)
{
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : p.vertices) best = std::max(best, v.dot(u));
    return best;
}

bool contains(const ConvexPolytope& p, const Vec& x, double tol)
{
    if (p.is_empty()) return false;
    return distance_to(p, x) <= tol;
}

double distance_to(const ConvexPolytope& p, const Vec& x)
{
    if (p.is_empty()) return std::numeric_limits<double>::infinity();
    switch (p.affine_dim) {
    case 0: return (x - p.vertices[0]).norm();
    case 1: return seg_dist(x, p.vertices[0], p.vertices[1]);
    default: break;
    }
    if (p.dim == 2) {
        bool inside = true;
        for (const auto& f : p.facets)
            if (f.normal.dot(x) > f.offset) inside = false;
        if (inside) return 0.0;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& f : p.facets) best = std::min(best, seg_dist(x, p.vertices[f.loop[0]], p.vertices[f.loop[1]]));
        return best;
    }
    if (p.affine_dim == 2) {
        const auto poly = loop_points(p, p.loop);
        std::vector<V3> p3;
        for (const auto& q : poly) p3.emplace_back(q(0), q(1), q(2));
        return polygon_dist_3d(x, poly, newell_normal(p3).normalized());
    }
    bool inside = true;
    for (const auto& f : p.facets)
        if (f.normal.dot(x) > f.offset) inside = false;
    if (inside) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : p.facets) {
        const V3 n(f.normal(0), f.normal(1), f.normal(2));
        best = std::min(best, polygon_dist_3d(x, loop_points(p, f.loop), n));
    }
    return best;
}

double hausdorff(const ConvexPolytope& p, const ConvexPolytope& q)
{
    if (p.is_empty() && q.is_empty()) return 0.0;
    if (p.is_empty() || q.is_empty()) return std::numeric_limits<double>::infinity();
    double h = 0;
    for (const auto& v : p.vertices) h = std::max(h, distance_to(q, v));
    for (const auto& v : q.vertices) h = std::max(h, distance_to(p, v));
    return h;
}

double diameter(const ConvexPolytope& p)
{
    double best = 0;
    for (std::size_t i = 0; i < p.vertices.size(); ++i)
        for (std::size_t j = i + 1; j < p.vertices.size(); ++j) best = std::max(best, (p.vertices[i] - p.vertices[j]).norm());
    return best;
}

Vec vertex_centroid(const ConvexPolytope& p)
{
    Vec c = Vec::Zero(p.dim);
    for (const auto& v : p.vertices) c += v;
    if (!p.vertices.empty()) c /= static_cast<double>(p.vertices.size());
    return c;
}

ConvexPolytope translated(const ConvexPolytope& p, const Vec& t)
{
    ConvexPolytope out = p;
    for (auto& v : out.vertices) v += t;
    for (auto& f : out.facets) f.offset += f.normal.dot(t);
    return out;
}

ConvexPolytope scaled(const ConvexPolytope& p, double s)
{
    if (s <= 0) {
        std::vector<Vec> pts;
        for (const auto& v : p.vertices) pts.push_back(s * v);
        return hull_of(pts, p.dim);
    }
    ConvexPolytope out = p;
    for (auto& v : out.vertices) v *= s;
    for (auto& f : out.facets) f.offset *= s;
    return out;
}

ConvexPolytope mapped(const ConvexPolytope& p, const Mat& m)
{
    std::vector<Vec> pts;
    for (const auto& v : p.vertices) pts.push_back(m * v);
    return hull_of(pts, static_cast<int>(m.rows()));
}

ConvexPolytope point_polytope(const Vec& x) { return hull_of({x}, static_cast<int>(x.size())); }

ConvexPolytope segment_polytope(const Vec& a, const Vec& b) { return hull_of({a, b}, static_cast<int>(a.size())); }

ConvexPolytope box_polytope(const Vec& lo, const Vec& hi)
{
    const int d = static_cast<int>(lo.size());
    std::vector<Vec> pts;
    for (int mask = 0; mask < (1 << d); ++mask) {
        Vec v(d);
        for (int i = 0; i < d; ++i) v(i) = (mask >> i) & 1 ? hi(i) : lo(i);
        pts.push_back(v);
    }
    return hull_of(pts, d);
}

ConvexPolytope regular_polygon(int n, double area)
{
    const double r = std::sqrt(2.0 * area / (n * std::sin(2.0 * M_PI / n)));
    std::vector<Vec> pts;
    for (int j = 0; j < n; ++j) {
        Vec v(2);
        v << r * std::cos(2.0 * M_PI * j / n), r * std::sin(2.0 * M_PI * j / n);
        pts.push_back(v);
    }
    return convex_hull(pts);
}

std::string to_off(const ConvexPolytope& p)
{
    if (p.dim != 3 || !p.full_dimensional()) throw FormatMismatch("OFF export needs a full-dimensional body in d=3");
    std::ostringstream os;
    os << "OFF\n" << p.vertices.size() << ' ' << p.facets.size() << ' ' << p.edges.size() << '\n';
    for (const auto& v : p.vertices) os << fmt9(v(0)) << ' ' << fmt9(v(1)) << ' ' << fmt9(v(2)) << '\n';
    for (const auto& f : p.facets) {
        os << f.loop.size();
        for (int i : f.loop) os << ' ' << i;
        os << '\n';
    }
    return os.str();
}

std::string to_svg(const ConvexPolytope& p, double ppu)
{
    if (p.dim != 2 || p.affine_dim < 1) throw FormatMismatch("SVG export needs a body in d=2");
    double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
    for (const auto& v : p.vertices) {
        x0 = std::min(x0, v(0));
        x1 = std::max(x1, v(0));
        y0 = std::min(y0, v(1));
        y1 = std::max(y1, v(1));
    }
    const double pad = 0.05 * std::max(x1 - x0, y1 - y0) + 1e-9;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt9((x0 - pad) * ppu) << ' '
       << fmt9((-y1 - pad) * ppu) << ' ' << fmt9((x1 - x0 + 2 * pad) * ppu) << ' ' << fmt9((y1 - y0 + 2 * pad) * ppu)
       << "\">\n";
    os << "<path d=\"";
    const std::vector<int> order = p.affine_dim == 2 ? p.loop : std::vector<int>{0, 1};
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& v = p.vertices[order[i]];
        os << (i == 0 ? "M " : " L ") << fmt9(v(0) * ppu) << ' ' << fmt9(-v(1) * ppu);
    }
    os << " Z\" fill=\"#c8d8f0\" stroke=\"#203050\" stroke-width=\"1\"/>\n</svg>\n";
    return os.str();
}

}  // namespace wulffgrid
