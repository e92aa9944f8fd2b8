#include "wulffgrid/multigrid.hpp"

#include "wulffgrid/errors.hpp"
#include "wulffgrid/format.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <unordered_map>

namespace wulffgrid {

namespace {

constexpr double kIncidence = 1e-9;   // guard band on fractional parts
constexpr double kProbeGap = 1e-7;    // validate_spec rejects closer hyperplanes

std::string subset_text(const Subset& J)
{
    std::string s = "{";
    for (std::size_t i = 0; i < J.size(); ++i) s += (i ? "," : "") + std::to_string(J[i]);
    return s + "}";
}

Mat columns(const std::vector<Vec>& vs, const Subset& J, bool unit)
{
    const int d = static_cast<int>(vs[0].size());
    Mat m(d, J.size());
    for (std::size_t i = 0; i < J.size(); ++i) m.col(i) = unit ? Vec(vs[J[i]].normalized()) : vs[J[i]];
    return m;
}

// w with <w, y> = det(a_1, ..., a_{d-1}, y); |w| is the (d-1)-volume of the a's.
Vec cross(const Mat& a)
{
    const int d = static_cast<int>(a.rows());
    Vec w(d);
    Mat m(d, d);
    m.leftCols(d - 1) = a;
    for (int i = 0; i < d; ++i) {
        m.col(d - 1) = Vec::Unit(d, i);
        w(i) = m.determinant();
    }
    return w;
}

void check_shape(const MultigridSpec& s)
{
    const int d = s.dim(), n = s.families();
    if (d < 1) throw DimensionMismatch("multigrid needs at least one normal");
    if (n < d) throw DimensionMismatch("fewer normals than dimensions");
    if (static_cast<int>(s.translations.size()) != n || static_cast<int>(s.edges.size()) != n)
        throw DimensionMismatch("normals, translations and edges differ in length");
    for (int i = 0; i < n; ++i) {
        if (s.normals[i].size() != d || s.edges[i].size() != d) throw DimensionMismatch("mixed dimensions");
        if (s.normals[i].norm() == 0 || s.edges[i].norm() == 0) throw ZeroVector("normal or edge " + std::to_string(i));
    }
}

double ball_volume(int d, double r)
{
    return std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1) * std::pow(r, d);
}

}  // namespace

std::vector<Subset> subsets_of_size(int n, int k)
{
    std::vector<Subset> out;
    if (k < 0 || k > n) return out;
    Subset s(k);
    for (int i = 0; i < k; ++i) s[i] = i;
    while (true) {
        out.push_back(s);
        int i = k - 1;
        while (i >= 0 && s[i] == n - k + i) --i;
        if (i < 0) break;
        ++s[i];
        for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
    }
    return out;
}

double unit_uniform(std::uint64_t bits)
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

SpecReport cauchy_binet(const MultigridSpec& spec)
{
    check_shape(spec);
    const int d = spec.dim(), n = spec.families();
    Mat G(d, n), Gt(d, n);
    for (int i = 0; i < n; ++i) {
        const double len = spec.normals[i].norm();
        G.col(i) = spec.normals[i] / len;
        Gt.col(i) = spec.edges[i] / len;
    }
    SpecReport r;
    r.det_GGt = (G * Gt.transpose()).determinant();
    r.min_det_product = std::numeric_limits<double>::infinity();
    for (const auto& J : subsets_of_size(n, d)) {
        Mat a(d, d), b(d, d);
        for (int i = 0; i < d; ++i) {
            a.col(i) = G.col(J[i]);
            b.col(i) = Gt.col(J[i]);
        }
        const double t = a.determinant() * b.determinant();
        r.cauchy_binet_sum += t;
        r.min_det_product = std::min(r.min_det_product, t);
    }
    return r;
}

SpecReport validate_spec(const MultigridSpec& spec, int probes)
{
    SpecReport r = cauchy_binet(spec);
    const int d = spec.dim(), n = spec.families();
    for (const auto& J : subsets_of_size(n, d)) {
        const double t = columns(spec.normals, J, true).determinant() * columns(spec.edges, J, true).determinant();
        if (!(t > 1e-12)) throw DetConditionViolated("det(G_J) det(G~_J) = " + fmt9(t) + " for J = " + subset_text(J));
    }

    // Genericity probe: no further hyperplane through sampled vertices. k_J = 0 first for every J.
    Multigrid mg(spec, false);
    std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
    r.min_hyperplane_gap = std::numeric_limits<double>::infinity();
    const auto& subs = mg.subsets();
    for (int p = 0; p < std::max<int>(probes, subs.size()); ++p) {
        const int j = p < static_cast<int>(subs.size()) ? p : static_cast<int>(rng() % subs.size());
        const auto& J = subs[j];
        std::vector<long long> kJ(d, 0);
        if (p >= static_cast<int>(subs.size()))
            for (auto& k : kJ) k = static_cast<long long>(rng() % 11) - 5;
        const auto& L = mg.lattice(j);
        Vec kd(d);
        for (int i = 0; i < d; ++i) kd(i) = static_cast<double>(kJ[i]);
        const Vec x = L.base + L.basis * kd;
        for (int g = 0; g < n; ++g) {
            if (std::binary_search(J.begin(), J.end(), g)) continue;
            const double t = mg.coordinate(x, g);
            const double gap = std::abs(t - std::round(t)) * spec.normals[g].norm();
            r.min_hyperplane_gap = std::min(r.min_hyperplane_gap, gap);
            if (gap < kProbeGap)
                throw DegenerateTranslations("family " + std::to_string(g) + " passes within " + fmt9(gap) +
                                             " of the vertex of J = " + subset_text(J));
        }
        ++r.probes;
    }
    return r;
}

MultigridSpec perturb(const MultigridSpec& spec, std::uint64_t seed)
{
    MultigridSpec out = spec;
    std::mt19937_64 rng(seed);
    for (auto& g : out.translations) {
        double u;
        do u = unit_uniform(rng());
        while (u == 0.0);
        g += 1e-3 * u;
    }
    out.seed = seed;
    validate_spec(out);
    return out;
}

MultigridSpec pentagrid_with(const std::vector<double>& gamma)
{
    if (gamma.size() != 5) throw DimensionMismatch("pentagrid needs 5 translations");
    MultigridSpec s;
    for (int j = 0; j < 5; ++j) {
        Vec g(2);
        g << std::cos(2 * M_PI * j / 5), std::sin(2 * M_PI * j / 5);
        s.normals.push_back(g);
        s.edges.push_back(g);
    }
    s.translations = gamma;
    return s;
}

MultigridSpec pentagrid(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<double> gamma(5);
    for (auto& g : gamma) g = 0.05 + 0.9 * unit_uniform(rng());
    auto s = pentagrid_with(gamma);
    s.seed = seed;
    return s;
}

MultigridSpec square_bigrid(double gamma0, double gamma1)
{
    MultigridSpec s;
    s.normals = {Vec::Unit(2, 0), Vec::Unit(2, 1)};
    s.edges = s.normals;
    s.translations = {gamma0, gamma1};
    return s;
}

MultigridSpec icosahedral_grid(std::uint64_t seed)
{
    const double phi = (1 + std::sqrt(5.0)) / 2;
    const double axes[6][3] = {{0, 1, phi}, {0, -1, phi}, {1, phi, 0}, {-1, phi, 0}, {phi, 0, 1}, {-phi, 0, 1}};
    MultigridSpec s;
    std::mt19937_64 rng(seed);
    for (const auto& a : axes) {
        Vec g(3);
        g << a[0], a[1], a[2];
        g.normalize();
        s.normals.push_back(g);
        s.edges.push_back(g);
        s.translations.push_back(0.05 + 0.9 * unit_uniform(rng()));
    }
    s.seed = seed;
    return s;
}

Distortion affine_map_and_bound(const MultigridSpec& spec)
{
    check_shape(spec);
    const int d = spec.dim(), n = spec.families();
    Distortion out;
    out.A.linear = Mat::Zero(d, d);
    out.A.offset = Vec::Zero(d);
    for (int g = 0; g < n; ++g) {
        const double len = spec.normals[g].norm();
        out.A.linear += spec.edges[g] * spec.normals[g].transpose() / (len * len);
        out.A.offset -= spec.translations[g] / len * spec.edges[g];
    }
    // max |sum_{J'} g~ + 1/2 sum_J g~| over J' disjoint from J
    for (const auto& J : subsets_of_size(n, d)) {
        Vec half = Vec::Zero(d);
        std::vector<int> rest;
        for (int g = 0; g < n; ++g) {
            if (std::binary_search(J.begin(), J.end(), g)) half += 0.5 * spec.edges[g];
            else rest.push_back(g);
        }
        const std::size_t m = rest.size();
        for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
            Vec s = half;
            for (std::size_t i = 0; i < m; ++i)
                if (mask >> i & 1) s += spec.edges[rest[i]];
            out.bd_bound = std::max(out.bd_bound, s.norm());
        }
    }
    return out;
}

std::vector<RailFamily> rail_families(const MultigridSpec& spec)
{
    check_shape(spec);
    const int d = spec.dim(), n = spec.families();
    const Mat Alin = affine_map_and_bound(spec).A.linear;
    std::vector<RailFamily> out;
    for (const auto& Jp : subsets_of_size(n, d - 1)) {
        RailFamily r;
        r.J_prime = Jp;
        const Vec w = cross(columns(spec.normals, Jp, false));
        const Vec wt = cross(columns(spec.edges, Jp, false));
        if (w.norm() == 0 || wt.norm() == 0) throw SingularSubset("J' = " + subset_text(Jp));
        r.v = w.normalized();
        r.v_tilde = wt.normalized();
        r.facet_area = wt.norm();
        double prod = 1;
        for (int g : Jp) prod *= spec.normals[g].squaredNorm();
        r.cell_measure = prod / w.norm();
        r.primal_direction = Alin * r.v;
        out.push_back(std::move(r));
    }
    return out;
}

DualLatticeInfo dual_lattice_info(const MultigridSpec& spec, const Subset& J)
{
    check_shape(spec);
    const int d = spec.dim();
    if (static_cast<int>(J.size()) != d || !std::is_sorted(J.begin(), J.end()) ||
        std::adjacent_find(J.begin(), J.end()) != J.end() || J.front() < 0 || J.back() >= spec.families())
        throw InvalidSubset("J = " + subset_text(J));
    Mat N(d, d), D = Mat::Zero(d, d);
    Vec gamma(d);
    for (int i = 0; i < d; ++i) {
        N.row(i) = spec.normals[J[i]].normalized().transpose();
        D(i, i) = spec.normals[J[i]].norm();
        gamma(i) = spec.translations[J[i]];
    }
    const double detN = N.determinant();
    if (std::abs(detN) < 1e-12) throw SingularSubset("J = " + subset_text(J));
    DualLatticeInfo L;
    L.J = J;
    const Mat Ninv = N.inverse();
    L.basis = Ninv * D;
    L.base = Ninv * gamma;
    L.covolume = std::abs(L.basis.determinant());
    const auto cb = cauchy_binet(spec);
    L.rho = columns(spec.normals, J, true).determinant() *
            (columns(spec.edges, J, false) * D.inverse()).determinant() / cb.det_GGt;

    const auto rails = subsets_of_size(spec.families(), d - 1);
    for (int m = 0; m < d; ++m) {
        Subset Jp;
        for (int i = 0; i < d; ++i)
            if (i != m) Jp.push_back(J[i]);
        const int r = static_cast<int>(std::lower_bound(rails.begin(), rails.end(), Jp) - rails.begin());
        L.rails.push_back(r);
        L.lambda.push_back(L.basis.col(m).norm());
        L.rail_member.push_back(m);
    }
    return L;
}

Vec Tile::center() const
{
    Vec c = anchor;
    for (const auto& g : generators) c += 0.5 * g;
    return c;
}

double Tile::volume() const
{
    Mat m(anchor.size(), generators.size());
    for (std::size_t i = 0; i < generators.size(); ++i) m.col(i) = generators[i];
    return std::abs(m.determinant());
}

ConvexPolytope Tile::polytope() const
{
    std::vector<Vec> pts;
    const std::size_t m = generators.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
        Vec p = anchor;
        for (std::size_t i = 0; i < m; ++i)
            if (mask >> i & 1) p += generators[i];
        pts.push_back(p);
    }
    return convex_hull(pts);
}

Region Region::ball(const Vec& c, double r)
{
    Region g;
    g.kind = Kind::Ball;
    g.center = c;
    g.radius = r;
    return g;
}

Region Region::box(const Vec& lo, const Vec& hi)
{
    Region g;
    g.kind = Kind::Box;
    g.lo = lo;
    g.hi = hi;
    g.center = 0.5 * (lo + hi);
    return g;
}

bool Region::contains(const Vec& x) const
{
    if (kind == Kind::Ball) return (x - center).squaredNorm() <= radius * radius;
    return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
}

double Region::measure() const
{
    if (kind == Kind::Ball) return radius > 0 ? ball_volume(static_cast<int>(center.size()), radius) : 0.0;
    return (hi - lo).cwiseMax(0.0).prod();
}

Region Region::grown(double by) const
{
    if (kind == Kind::Ball) return ball(center, std::max(0.0, radius + by));
    const Vec e = Vec::Constant(lo.size(), by);
    return box(lo - e, hi + e);
}

Multigrid::Multigrid(MultigridSpec spec, bool validate) : spec_(std::move(spec))
{
    if (validate) validate_spec(spec_);
    else check_shape(spec_);
    d_ = spec_.dim();
    n_ = spec_.families();
    subsets_ = subsets_of_size(n_, d_);
    rails_ = rail_families(spec_);
    distortion_ = affine_map_and_bound(spec_);
    for (const auto& J : subsets_) {
        lattices_.push_back(dual_lattice_info(spec_, J));
        basis_inverse_.push_back(lattices_.back().basis.inverse());
        const Mat E = columns(spec_.edges, J, false);
        for (std::size_t mask = 0; mask < (std::size_t{1} << d_); ++mask) {
            Vec s = Vec::Zero(d_);
            for (int i = 0; i < d_; ++i) s += (mask >> i & 1 ? 1.0 : -1.0) * E.col(i);
            max_diameter_ = std::max(max_diameter_, s.norm());
        }
    }
}

int Multigrid::subset_index(const Subset& J) const
{
    const auto it = std::lower_bound(subsets_.begin(), subsets_.end(), J);
    if (it == subsets_.end() || *it != J) throw InvalidSubset("J = " + subset_text(J));
    return static_cast<int>(it - subsets_.begin());
}

int Multigrid::rail_index(const Subset& Jp) const
{
    for (std::size_t r = 0; r < rails_.size(); ++r)
        if (rails_[r].J_prime == Jp) return static_cast<int>(r);
    throw InvalidSubset("J' = " + subset_text(Jp));
}

double Multigrid::density() const
{
    double rho = 0;
    for (const auto& L : lattices_) rho += 1.0 / L.covolume;
    return rho;
}

double Multigrid::coordinate(const Vec& x, int g) const
{
    const double len = spec_.normals[g].norm();
    return (x.dot(spec_.normals[g]) / len - spec_.translations[g]) / len;
}

DualPoint Multigrid::point(int j, const std::vector<long long>& kJ) const
{
    DualPoint p;
    p.j = j;
    p.J = subsets_[j];
    const auto& L = lattices_[j];
    Vec kd(d_);
    for (int i = 0; i < d_; ++i) kd(i) = static_cast<double>(kJ[i]);
    p.x = L.base + L.basis * kd;
    p.k.assign(n_, 0);
    for (int i = 0; i < d_; ++i) p.k[p.J[i]] = kJ[i];
    for (int g = 0, i = 0; g < n_; ++g) {
        if (i < d_ && p.J[i] == g) {
            ++i;
            continue;
        }
        const double t = coordinate(p.x, g);
        const double f = t - std::floor(t);
        if (f < kIncidence || f > 1 - kIncidence)
            throw GenericityViolation("vertex of J = " + subset_text(p.J) + " lies on family " + std::to_string(g));
        p.k[g] = static_cast<long long>(std::floor(t));
    }
    return p;
}

DualPoint Multigrid::neighbour(const DualPoint& p, int rail, int dir) const
{
    const auto& R = rails_[rail];
    if (!std::includes(p.J.begin(), p.J.end(), R.J_prime.begin(), R.J_prime.end()))
        throw InvalidSubset("rail " + subset_text(R.J_prime) + " does not pass through J = " + subset_text(p.J));
    const Vec v = dir * R.v;
    int best = -1;
    double best_dt = std::numeric_limits<double>::infinity(), second = best_dt;
    long long best_k = 0;
    for (int g = 0; g < n_; ++g) {
        if (std::binary_search(R.J_prime.begin(), R.J_prime.end(), g)) continue;
        const double len = spec_.normals[g].norm();
        const double s = v.dot(spec_.normals[g]) / (len * len);
        if (std::abs(s) < 1e-14) continue;
        const bool on = std::binary_search(p.J.begin(), p.J.end(), g);
        const double t = on ? static_cast<double>(p.k[g]) : coordinate(p.x, g);
        const long long target = s > 0 ? p.k[g] + 1 : (on ? p.k[g] - 1 : p.k[g]);
        const double dt = (static_cast<double>(target) - t) / s;
        if (dt < best_dt) {
            second = best_dt;
            best_dt = dt;
            best = g;
            best_k = target;
        } else {
            second = std::min(second, dt);
        }
    }
    if (best < 0) throw GenericityViolation("rail line meets no other family");
    if (second - best_dt <= kIncidence * std::max(1.0, best_dt))
        throw GenericityViolation("two families cross a rail line at the same parameter");
    Subset J = R.J_prime;
    J.insert(std::lower_bound(J.begin(), J.end(), best), best);
    std::vector<long long> kJ;
    for (int g : J) kJ.push_back(g == best ? best_k : p.k[g]);
    return point(subset_index(J), kJ);
}

Tile Multigrid::tile(const DualPoint& p) const
{
    Tile t;
    t.J = p.J;
    t.k = p.k;
    t.anchor = Vec::Zero(d_);
    t.lift.resize(n_);
    for (int g = 0; g < n_; ++g) {
        // ceiling labels off J; see notes on the anchor convention
        const bool on = std::binary_search(p.J.begin(), p.J.end(), g);
        t.lift[g] = on ? p.k[g] : p.k[g] + 1;
        t.anchor += static_cast<double>(t.lift[g]) * spec_.edges[g];
    }
    for (int g : p.J) t.generators.push_back(spec_.edges[g]);
    return t;
}

void Multigrid::for_each_point(const Region& region, const std::function<void(const DualPoint&)>& fn) const
{
    if (region.center.size() != d_) throw DimensionMismatch("region dimension");
    DualPoint p;
    Vec kd(d_), x(d_);
    for (std::size_t j = 0; j < subsets_.size(); ++j) {
        const auto& J = subsets_[j];
        const auto& L = lattices_[j];
        std::vector<long long> lo(d_), hi(d_), k(d_);
        for (int i = 0; i < d_; ++i) {
            const Vec u = spec_.normals[J[i]].normalized();
            double a, b;
            if (region.kind == Region::Kind::Ball) {
                a = u.dot(region.center) - region.radius;
                b = u.dot(region.center) + region.radius;
            } else {
                a = b = 0;
                for (int c = 0; c < d_; ++c) {
                    a += u(c) * (u(c) > 0 ? region.lo(c) : region.hi(c));
                    b += u(c) * (u(c) > 0 ? region.hi(c) : region.lo(c));
                }
            }
            const double len = spec_.normals[J[i]].norm(), gam = spec_.translations[J[i]];
            lo[i] = static_cast<long long>(std::ceil((a - gam) / len));
            hi[i] = static_cast<long long>(std::floor((b - gam) / len));
            if (lo[i] > hi[i]) goto next_subset;
        }
        k = lo;
        while (true) {
            for (int i = 0; i < d_; ++i) kd(i) = static_cast<double>(k[i]);
            x.noalias() = L.basis * kd;
            x += L.base;
            if (region.contains(x)) {
                p = point(static_cast<int>(j), k);
                fn(p);
            }
            int i = d_ - 1;
            while (i >= 0 && k[i] == hi[i]) k[i] = lo[i], --i;
            if (i < 0) break;
            ++k[i];
        }
    next_subset:;
    }
}

IVec point_key(const DualPoint& p)
{
    IVec key(p.J.size() + 1);
    key(0) = p.j;
    for (std::size_t i = 0; i < p.J.size(); ++i) key(i + 1) = p.k[p.J[i]];
    return key;
}

std::vector<DualPoint> dual_points_in_region(const MultigridSpec& spec, const Region& region)
{
    Multigrid mg(spec);
    std::vector<DualPoint> out;
    mg.for_each_point(region, [&](const DualPoint& p) { out.push_back(p); });
    return out;
}

Tile tile_of(const MultigridSpec& spec, const DualPoint& p)
{
    return Multigrid(spec, false).tile(p);
}

TilingReport check_tiling(const std::vector<Tile>& tiles, const Region& region, double pad,
                          std::size_t n_samples, std::uint64_t seed)
{
    TilingReport rep;
    rep.tiles = tiles.size();
    rep.region_measure = region.measure();
    const int d = static_cast<int>(region.center.size());
    if (tiles.empty()) throw GapDetected("no tiles", std::vector<double>(region.center.data(), region.center.data() + d));

    struct Local {
        Vec anchor;
        Mat inv;
    };
    std::vector<Local> loc;
    double cell = 0;
    for (const auto& t : tiles) {
        Mat m(d, d);
        for (int i = 0; i < d; ++i) m.col(i) = t.generators[i];
        loc.push_back({t.anchor, m.inverse()});
        cell = std::max(cell, m.cwiseAbs().rowwise().sum().maxCoeff());
        rep.tile_measure += t.volume();
    }
    // spatial hash: each tile goes into every cell its bounding box meets
    std::unordered_map<IVec, std::vector<int>, IVecHash> grid;
    for (std::size_t i = 0; i < tiles.size(); ++i) {
        Vec lo = tiles[i].anchor, hi = tiles[i].anchor;
        for (const auto& g : tiles[i].generators) {
            lo += g.cwiseMin(0.0);
            hi += g.cwiseMax(0.0);
        }
        IVec a(d), b(d);
        for (int c = 0; c < d; ++c) {
            a(c) = static_cast<long long>(std::floor(lo(c) / cell));
            b(c) = static_cast<long long>(std::floor(hi(c) / cell));
        }
        IVec c = a;
        while (true) {
            grid[c].push_back(static_cast<int>(i));
            int q = d - 1;
            while (q >= 0 && c(q) == b(q)) c(q) = a(q), --q;
            if (q < 0) break;
            ++c(q);
        }
    }

    const Region inner = region.grown(-pad);
    if (inner.measure() <= 0) throw DimensionMismatch("region smaller than the padding band");
    std::mt19937_64 rng(seed);
    Vec lo(d), hi(d);
    if (inner.kind == Region::Kind::Ball) {
        lo = inner.center.array() - inner.radius;
        hi = inner.center.array() + inner.radius;
    } else {
        lo = inner.lo;
        hi = inner.hi;
    }
    Vec p(d);
    const double tol = 1e-9;
    while (rep.samples < n_samples) {
        for (int c = 0; c < d; ++c) p(c) = lo(c) + (hi(c) - lo(c)) * unit_uniform(rng());
        if (!inner.contains(p)) continue;
        IVec key(d);
        for (int c = 0; c < d; ++c) key(c) = static_cast<long long>(std::floor(p(c) / cell));
        int inside = 0;
        bool boundary = false;
        const auto it = grid.find(key);
        if (it != grid.end()) {
            for (int i : it->second) {
                const Vec u = loc[i].inv * (p - loc[i].anchor);
                if ((u.array() > tol).all() && (u.array() < 1 - tol).all()) ++inside;
                else if ((u.array() >= -tol).all() && (u.array() <= 1 + tol).all()) boundary = true;
            }
        }
        if (boundary) {
            ++rep.resampled;
            continue;
        }
        const std::vector<double> w(p.data(), p.data() + d);
        if (inside == 0) throw GapDetected("sample covered by no tile", w);
        if (inside > 1) throw OverlapDetected("sample covered by " + std::to_string(inside) + " tiles", w);
        ++rep.samples;
    }

    rep.band_measure = region.grown(pad).measure() - inner.measure();
    const std::vector<double> c(region.center.data(), region.center.data() + d);
    if (rep.tile_measure < rep.region_measure - rep.band_measure)
        throw GapDetected("tile measure " + fmt9(rep.tile_measure) + " short of region", c);
    if (rep.tile_measure > rep.region_measure + rep.band_measure)
        throw OverlapDetected("tile measure " + fmt9(rep.tile_measure) + " exceeds region", c);
    return rep;
}

std::vector<Tile> tiles_in_region(const Multigrid& mg, const Region& region, double* max_distortion)
{
    const auto& D = mg.distortion();
    // dual ball covering A^{-1}(region)
    const double outer = region.kind == Region::Kind::Ball ? region.radius : 0.5 * (region.hi - region.lo).norm();
    Eigen::JacobiSVD<Mat> svd(D.A.linear);
    const double smin = svd.singularValues().minCoeff();
    const Vec c = D.A.linear.inverse() * (region.center - D.A.offset);
    std::vector<Tile> tiles;
    double worst = 0;
    mg.for_each_point(Region::ball(c, outer / smin * (1 + 1e-9)), [&](const DualPoint& p) {
        const Vec ax = D.A(p.x);
        if (!region.contains(ax)) return;
        tiles.push_back(mg.tile(p));
        worst = std::max(worst, (tiles.back().center() - ax).norm());
    });
    if (max_distortion) *max_distortion = worst;
    return tiles;
}

TilingReport verify_tiling(const MultigridSpec& spec, const Region& region, std::size_t n_samples, std::uint64_t seed)
{
    Multigrid mg(spec);
    const auto& D = mg.distortion();
    double worst = 0;
    const auto tiles = tiles_in_region(mg, region, &worst);
    auto rep = check_tiling(tiles, region, D.bd_bound + mg.max_tile_diameter(), n_samples, seed);
    rep.max_distortion = worst;
    rep.bd_bound = D.bd_bound;
    return rep;
}

std::string tile_record(const Tile& t)
{
    std::ostringstream os;
    const auto vec = [&](const Vec& v) {
        os << '[';
        for (int i = 0; i < v.size(); ++i) os << (i ? "," : "") << fmt9(v(i));
        os << ']';
    };
    os << "{\"J\":[";
    for (std::size_t i = 0; i < t.J.size(); ++i) os << (i ? "," : "") << t.J[i];
    os << "],\"k\":[";
    for (std::size_t i = 0; i < t.k.size(); ++i) os << (i ? "," : "") << t.k[i];
    os << "],\"anchor\":";
    vec(t.anchor);
    os << ",\"generators\":[";
    for (std::size_t i = 0; i < t.generators.size(); ++i) {
        if (i) os << ',';
        vec(t.generators[i]);
    }
    os << "]}";
    return os.str();
}

std::string tiles_svg(const std::vector<Tile>& tiles, int n_classes, double ppu)
{
    if (tiles.empty() || tiles[0].anchor.size() != 2) throw FormatMismatch("tiling SVG needs d=2 tiles");
    double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
    for (const auto& t : tiles)
        for (const Vec& v : {t.anchor, Vec(t.anchor + t.generators[0] + t.generators[1]),
                             Vec(t.anchor + t.generators[0]), Vec(t.anchor + t.generators[1])}) {
            x0 = std::min(x0, v(0));
            x1 = std::max(x1, v(0));
            y0 = std::min(y0, v(1));
            y1 = std::max(y1, v(1));
        }
    const auto classes = subsets_of_size(n_classes, 2);
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt9(x0 * ppu) << ' ' << fmt9(-y1 * ppu) << ' '
       << fmt9((x1 - x0) * ppu) << ' ' << fmt9((y1 - y0) * ppu) << "\">\n";
    for (const auto& t : tiles) {
        const int j = static_cast<int>(std::lower_bound(classes.begin(), classes.end(), t.J) - classes.begin());
        // hue walks the subset list; fat and thin pentagrid rhombi alternate
        const int hue = static_cast<int>(std::lround(360.0 * j / std::max<std::size_t>(1, classes.size())));
        const Vec a = t.anchor, b = a + t.generators[0], c = b + t.generators[1], e = a + t.generators[1];
        os << "<path class=\"J" << t.J[0] << '-' << t.J[1] << "\" d=\"";
        const Vec* loop[4] = {&a, &b, &c, &e};
        for (int i = 0; i < 4; ++i)
            os << (i ? " L " : "M ") << fmt9((*loop[i])(0) * ppu) << ' ' << fmt9(-(*loop[i])(1) * ppu);
        os << " Z\" fill=\"hsl(" << hue << ",60%,70%)\" stroke=\"#203050\" stroke-width=\"0.5\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace wulffgrid
