#include "wulffgrid/lattice_energy.hpp"

#include "point_set.hpp"
#include "wulffgrid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

namespace wulffgrid {

namespace {

double lattice_det(const IMat& lattice, int d)
{
    if (lattice.size() == 0) return 1.0;
    if (lattice.rows() != d || lattice.cols() != d) throw DimensionMismatch("lattice basis must be d x d");
    const long long det = exact_det(lattice);
    if (det == 0) throw SingularMap("lattice basis is singular");
    return std::abs(static_cast<double>(det));
}

double evaluate(EvalMode mode, double t) { return mode == EvalMode::PositivePart ? std::max(t, 0.0) : std::abs(t); }

long long chebyshev(const IVec& a, const IVec& b) { return (a - b).cwiseAbs().maxCoeff(); }

bool lex_positive(const Vec& n)
{
    for (Eigen::Index i = 0; i < n.size(); ++i) {
        if (n(i) > 1e-12) return true;
        if (n(i) < -1e-12) return false;
    }
    return false;
}

// Integer points of a full-dimensional body; points on facets whose normal is
// lexicographically positive are left out, so translates of a cell do not overlap.
std::vector<IVec> half_open_points(const ConvexPolytope& body)
{
    const int d = body.dim;
    const double tol = kRelTol * std::max(1.0, body.vertices.empty() ? 1.0 : diameter(body));
    Vec lo = body.vertices.front(), hi = lo;
    for (const auto& v : body.vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    IVec ilo(d), ihi(d);
    for (int i = 0; i < d; ++i) {
        ilo(i) = static_cast<long long>(std::floor(lo(i))) - 1;
        ihi(i) = static_cast<long long>(std::ceil(hi(i))) + 1;
    }
    struct Cut {
        Vec n;
        double off;
    };
    std::vector<Cut> cuts;
    for (const auto& f : body.facets) cuts.push_back({f.normal, lex_positive(f.normal) ? f.offset - tol : f.offset + tol});

    std::vector<IVec> out;
    IVec x = ilo;
    for (;;) {
        // interval in coordinate 0 for the current values of the others
        double a = -std::numeric_limits<double>::infinity(), b = -a;
        bool ok = true;
        for (const auto& c : cuts) {
            double rhs = c.off;
            for (int i = 1; i < d; ++i) rhs -= c.n(i) * static_cast<double>(x(i));
            if (c.n(0) > 1e-12)
                b = std::min(b, rhs / c.n(0));
            else if (c.n(0) < -1e-12)
                a = std::max(a, rhs / c.n(0));
            else if (rhs < 0)
                ok = false;
        }
        if (ok) {
            for (long long t = static_cast<long long>(std::ceil(a)); t <= static_cast<long long>(std::floor(b)); ++t) {
                IVec p = x;
                p(0) = t;
                out.push_back(std::move(p));
            }
        }
        int i = d - 1;
        while (i >= 1 && x(i) == ihi(i)) x(i) = ilo(i), --i;
        if (i < 1) break;
        ++x(i);
    }
    return out;
}

}  // namespace

std::optional<double> Potential::weight_of(const IVec& v) const
{
    auto it = std::lower_bound(atoms.begin(), atoms.end(), v,
                               [](const Atom& a, const IVec& key) { return IVecLess{}(a.v, key); });
    if (it != atoms.end() && it->v == v) return it->weight;
    return std::nullopt;
}

std::vector<IVec> Potential::support() const
{
    std::vector<IVec> out;
    for (const auto& a : atoms) out.push_back(a.v);
    return out;
}

Potential make_potential(std::vector<Atom> atoms, Convention c, EvalMode m)
{
    Potential V;
    V.convention = c;
    V.mode = m;
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return IVecLess{}(a.v, b.v); });
    for (auto& a : atoms) {
        if (!std::isfinite(a.weight)) throw InvalidPotential("non-finite weight");
        if ((a.v.array() == 0).all()) throw InvalidPotential("0 cannot be in the support");
        if (!V.atoms.empty() && a.v.size() != V.atoms.front().v.size()) throw InvalidPotential("mixed dimensions");
        if (!V.atoms.empty() && V.atoms.back().v == a.v) throw InvalidPotential("duplicate vector in potential");
        if (a.weight == 0.0) continue;
        if (c == Convention::Crystal && a.weight > 0) throw InvalidPotential("crystal weights must be <= 0");
        V.atoms.push_back(std::move(a));
    }
    if (c == Convention::Crystal && V.atoms.empty()) throw InvalidPotential("crystal potential needs a negative weight");
    return V;
}

Potential nearest_neighbour(int d)
{
    std::vector<Atom> atoms;
    for (int i = 0; i < d; ++i) {
        IVec e = IVec::Zero(d);
        e(i) = 1;
        atoms.push_back({e, -1.0});
        atoms.push_back({-e, -1.0});
    }
    return make_potential(std::move(atoms), Convention::Crystal, EvalMode::PositivePart);
}

double bulk_constant(const Potential& V)
{
    double s = 0;
    for (const auto& a : V.atoms) s -= V.perimeter_weight(a);
    return s;
}

// Per-atom terms summed in sorted order, so relabelling the support (as a change of
// lattice does) cannot change the floating-point result.
namespace {

double ordered_sum(std::vector<double> terms)
{
    std::sort(terms.begin(), terms.end());
    double s = 0;
    for (double t : terms) s += t;
    return s;
}

}  // namespace

double total_energy(const Configuration& x, const Potential& V)
{
    const detail::PointSet set(x.points);
    std::vector<double> terms;
    for (const auto& a : V.atoms) {
        long long bonds = 0;
        for (const auto& p : x.points)
            if (set.contains(p + a.v)) ++bonds;
        terms.push_back(-V.perimeter_weight(a) * static_cast<double>(bonds));
    }
    return ordered_sum(std::move(terms));
}

double surface_energy(const Configuration& x, const Potential& V)
{
    const detail::PointSet set(x.points);
    std::vector<double> terms;
    for (const auto& a : V.atoms) {
        long long missing = 0;
        for (const auto& p : x.points)
            if (!set.contains(p + a.v)) ++missing;
        terms.push_back(V.perimeter_weight(a) * static_cast<double>(missing));
    }
    return ordered_sum(std::move(terms));
}

double split_surface_energy(const Configuration& x, const Potential& V, const Channel& ch)
{
    const auto w = V.weight_of(ch.v);
    if (!w) throw ChannelNotInSupport("direction is not in the support of V");
    const ChannelCosets cosets(ch.v);
    const IVec tau = cosets.representative(ch.tau);
    const detail::PointSet set(x.points);
    long long count = 0;
    for (const auto& p : x.points)
        if (cosets.representative(p) == tau && !set.contains(p + ch.v)) ++count;
    return V.perimeter_weight({ch.v, *w}) * static_cast<double>(count);
}

double split_total(const Configuration& x, const Potential& V)
{
    double f = 0;
    for (const auto& a : V.atoms) {
        const ChannelCosets cosets(a.v);
        for (const auto& tau : cosets.representatives()) f += split_surface_energy(x, V, {a.v, tau});
    }
    return f;
}

double phi_V(const Vec& nu, const Potential& V, const IMat& lattice)
{
    if (nu.norm() == 0.0) throw ZeroDirection("phi_V needs nu != 0");
    const double det = lattice_det(lattice, static_cast<int>(nu.size()));
    double s = 0;
    for (const auto& a : V.atoms) s += V.perimeter_weight(a) * evaluate(V.mode, to_real(a.v).dot(nu));
    return s / det;
}

double perimeter_P_V(const ConvexPolytope& e, const Potential& V, const IMat& lattice)
{
    double p = 0;
    for (const auto& f : polytope_measure(e).facets) p += phi_V(f.normal, V, lattice) * f.area;
    return p;
}

Potential symmetrize(const Potential& V)
{
    std::map<IVec, double, IVecLess> w;
    for (const auto& a : V.atoms) {
        w[a.v] += 0.5 * a.weight;
        w[IVec(-a.v)] += 0.5 * a.weight;
    }
    std::vector<Atom> atoms;
    for (const auto& [v, x] : w) atoms.push_back({v, x});
    return make_potential(std::move(atoms), V.convention, V.mode);
}

namespace {

IVec apply_inverse(const IMat& adj, long long det, const IVec& v)
{
    const IVec num = adj * v;
    for (Eigen::Index i = 0; i < num.size(); ++i)
        if (num(i) % det != 0) throw NotInLattice("M^{-1} maps a point off the integer lattice");
    return num / det;
}

}  // namespace

Potential transform_potential(const Potential& V, const IMat& m)
{
    if (m.rows() != m.cols() || m.rows() != V.dim()) throw DimensionMismatch("map and potential dimensions differ");
    const long long det = exact_det(m);
    if (det == 0) throw SingularMap("det M = 0");
    const IMat adj = adjugate(m);
    std::vector<Atom> atoms;
    for (const auto& a : V.atoms) atoms.push_back({apply_inverse(adj, det, a.v), a.weight});
    return make_potential(std::move(atoms), V.convention, V.mode);
}

Transformed transform_by_map(const Potential& V, const Configuration& x, const IMat& m)
{
    Transformed t{transform_potential(V, m), {}};
    const long long det = exact_det(m);
    const IMat adj = adjugate(m);
    for (const auto& p : x.points) t.config.points.push_back(apply_inverse(adj, det, p));
    if (x.lattice.size() != 0) {
        t.config.lattice = IMat(x.lattice.rows(), x.lattice.cols());
        for (Eigen::Index c = 0; c < x.lattice.cols(); ++c)
            t.config.lattice.col(c) = apply_inverse(adj, det, x.lattice.col(c));
    }
    return t;
}

Recovery recovery_configuration(const ConvexPolytope& e, long long n)
{
    if (!e.full_dimensional()) throw DegenerateHull("recovery needs a full-dimensional body");
    if (n < 1) throw InfeasibleCount("N must be positive");
    const int d = e.dim;
    Vec lo = e.vertices.front();
    for (const auto& v : e.vertices) lo = lo.cwiseMin(v);
    const double s = std::pow(static_cast<double>(n), 1.0 / d);
    const auto body = scaled(translated(e, -lo), s);

    Recovery r;
    auto y = half_open_points(body);
    std::sort(y.begin(), y.end(), IVecLess{});
    r.base_count = static_cast<long long>(y.size());
    r.correction = n - r.base_count;
    double perim = 0;
    for (const auto& f : polytope_measure(e).facets) perim += f.area;
    r.threshold = std::ceil(std::pow(perim, d));
    r.correction_constant = std::abs(static_cast<double>(r.correction)) / (perim * std::pow(static_cast<double>(n), (d - 1.0) / d));

    const IVec p = y.empty() ? IVec(IVec::Unit(d, 0)) : y.front();
    auto key = [](const IVec& c) {
        return [c](const IVec& a, const IVec& b) {
            const long long da = chebyshev(a, c), db = chebyshev(b, c);
            if (da != db) return da < db;
            return IVecLess{}(a, b);
        };
    };

    if (r.correction > 0) {
        const long long k = r.correction;
        const IVec c = p - IVec::Unit(d, 0);
        long long rad = 0;
        auto capacity = [&](long long q) {
            long long cap = q + 1;
            for (int i = 1; i < d; ++i) cap *= 2 * q + 1;
            return cap;
        };
        while (capacity(rad) < k) ++rad;
        std::vector<IVec> cand;
        IVec z = c - IVec::Constant(d, rad);
        for (;;) {
            if (z(0) <= c(0)) cand.push_back(z);
            int i = d - 1;
            while (i >= 0 && z(i) == c(i) + rad) z(i) = c(i) - rad, --i;
            if (i < 0) break;
            ++z(i);
        }
        std::partial_sort(cand.begin(), cand.begin() + k, cand.end(), key(c));
        y.insert(y.end(), cand.begin(), cand.begin() + k);
    } else if (r.correction < 0) {
        const long long k = -r.correction;
        if (k >= static_cast<long long>(y.size())) throw InfeasibleCount("removal larger than the discretised body");
        std::partial_sort(y.begin(), y.begin() + k, y.end(), key(p));
        y.erase(y.begin(), y.begin() + k);
    }
    std::sort(y.begin(), y.end(), IVecLess{});
    r.config.points = std::move(y);
    return r;
}

PerimeterBound perimeter_bound(const Configuration& x, const Potential& V)
{
    if (V.convention != Convention::Crystal) throw InvalidPotential("perimeter_bound needs the crystal convention");
    const int d = V.dim();
    const auto support = V.support();
    const auto red = lattice_reduce(support);
    if (red.rank < d || std::llround(red.det) != 1) throw SpanDeficient("span_Z N is not Z^d");

    PerimeterBound out;
    // lexicographically first unimodular d-subset
    std::vector<int> pick(d);
    bool found = false;
    const int n = static_cast<int>(support.size());
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (found) return;
        if (depth == d) {
            IMat b(d, d);
            for (int j = 0; j < d; ++j) b.col(j) = support[pick[j]];
            if (std::abs(exact_det(b)) == 1) found = true;
            return;
        }
        for (int i = start; i < n && !found; ++i) {
            pick[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);

    std::vector<IVec> used;
    std::vector<IVec> coeffs;  // coeffs[i] expresses e_i over `used`
    if (found) {
        for (int j : pick) used.push_back(support[j]);
    } else {
        used = support;
        out.basis_found = false;
    }
    for (int i = 0; i < d; ++i) {
        auto a = integer_combination(used, IVec::Unit(d, i));
        if (a.size() == 0) throw SpanDeficient("e_i is not an integer combination of N");
        coeffs.push_back(a);
    }
    out.basis = used;
    out.A = 0;
    for (const auto& a : coeffs) out.A = std::max(out.A, static_cast<double>(a.cwiseAbs().maxCoeff()));
    out.c = std::numeric_limits<double>::infinity();
    for (const auto& u : used) out.c = std::min(out.c, -*V.weight_of(u));
    out.K = 2.0 * d * out.A / out.c;

    out.perimeter = surface_energy(x, nearest_neighbour(d));
    out.surface = surface_energy(x, V);
    out.holds = out.perimeter <= out.K * out.surface + 1e-9;
    return out;
}

StructureReport potential_structure(const Potential& V, const std::vector<Configuration>& probes, double eps)
{
    StructureReport r;
    const int d = V.dim();
    const auto red = lattice_reduce(V.support());
    r.span_rank = red.rank;
    r.span_det = red.det;
    r.spans = red.rank == d && std::llround(red.det) == 1;

    std::vector<IVec> pos, neg;
    r.inf_positive = std::numeric_limits<double>::infinity();
    for (const auto& a : V.atoms) {
        const double w = V.perimeter_weight(a);
        if (w > 0) {
            pos.push_back(a.v);
            r.inf_positive = std::min(r.inf_positive, w);
        } else {
            neg.push_back(a.v);
        }
    }
    if (pos.empty()) r.inf_positive = 0;

    long long reach = 1;
    for (const auto& a : V.atoms) reach = std::max(reach, a.v.cwiseAbs().maxCoeff());
    const long long box = 3 * reach + 2;

    auto bfs = [&](bool within) {
        std::unordered_map<IVec, int, IVecHash> dist;
        std::unordered_map<IVec, int, IVecHash> allowed;
        if (within) {
            allowed[IVec::Zero(d)] = 1;
            for (const auto& u : neg) allowed[u] = 1;
        }
        std::deque<IVec> q;
        dist[IVec::Zero(d)] = 0;
        q.push_back(IVec::Zero(d));
        while (!q.empty()) {
            const IVec cur = q.front();
            q.pop_front();
            for (const auto& s : pos) {
                IVec nx = cur + s;
                if (within ? !allowed.count(nx) : nx.cwiseAbs().maxCoeff() > box) continue;
                if (dist.count(nx)) continue;
                dist[nx] = dist[cur] + 1;
                q.push_back(nx);
            }
        }
        return dist;
    };

    const auto inside = bfs(true);
    r.connected_within = std::all_of(neg.begin(), neg.end(), [&](const IVec& u) { return inside.count(u) > 0; });
    const auto free = bfs(false);
    r.reachable = true;
    for (const auto& u : neg) {
        for (const IVec& t : {u, IVec(-u)}) {
            auto it = free.find(t);
            if (it == free.end())
                r.reachable = false;
            else
                r.c1 = std::max(r.c1, it->second);
        }
    }
    if (neg.empty()) {
        r.c1 = 1;
        r.eps_trivial = r.inf_positive;
    }
    if (r.reachable) r.c_v = r.c1 * r.inf_positive;

    std::vector<Atom> ind;
    for (const auto& a : V.atoms) ind.push_back({a.v, 1.0});
    const auto indicator = make_potential(std::move(ind), Convention::Signed, V.mode);
    for (const auto& x : probes) {
        ProbeResult p;
        p.f_v = surface_energy(x, V);
        p.f_indicator = surface_energy(x, indicator);
        p.holds = p.f_v >= eps * p.f_indicator - 1e-12;
        r.probes.push_back(p);
    }
    return r;
}

Potential pathology_potential(double c)
{
    std::vector<Atom> atoms;
    for (long long a : {-1, 1})
        for (long long b : {-1, 1}) atoms.push_back({ivec({a, b}), c});
    for (int i = 0; i < 2; ++i) {
        atoms.push_back({IVec(IVec::Unit(2, i)), -1.0});
        atoms.push_back({IVec(-IVec::Unit(2, i)), -1.0});
    }
    return make_potential(std::move(atoms), Convention::Signed, EvalMode::PositivePart);
}

Configuration pathology_configuration(long long n)
{
    const long long m = std::llround(std::sqrt(static_cast<double>(n)));
    Configuration x;
    for (long long a = 0; a < 2 * m; a += 2)
        for (long long b = 0; b < 2 * m; b += 2) x.points.push_back(ivec({(a + b) / 2, (a - b) / 2}));
    std::sort(x.points.begin(), x.points.end(), IVecLess{});
    return x;
}

std::string configuration_text(const Configuration& x)
{
    std::ostringstream os;
    for (const auto& p : x.points) {
        for (Eigen::Index i = 0; i < p.size(); ++i) os << (i ? " " : "") << p(i);
        os << '\n';
    }
    return os.str();
}

}  // namespace wulffgrid
