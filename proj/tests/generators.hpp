#pragma once

// Hand-rolled generators shared by the property tests.

#include "wulffgrid/geometry.hpp"
#include "wulffgrid/lattice_energy.hpp"
#include "wulffgrid/multigrid.hpp"
#include "wulffgrid/wulff.hpp"

#include <random>
#include <set>

namespace gen {

using namespace wulffgrid;

inline IVec int_vector(std::mt19937_64& rng, int d, long long bound)
{
    std::uniform_int_distribution<long long> u(-bound, bound);
    IVec v(d);
    do {
        for (int i = 0; i < d; ++i) v(i) = u(rng);
    } while ((v.array() == 0).all());
    return v;
}

inline Configuration configuration(std::mt19937_64& rng, int d, int n, long long box)
{
    std::uniform_int_distribution<long long> u(-box, box);
    std::set<IVec, IVecLess> pts;
    while (static_cast<int>(pts.size()) < n) {
        IVec v(d);
        for (int i = 0; i < d; ++i) v(i) = u(rng);
        pts.insert(v);
    }
    return {{pts.begin(), pts.end()}, {}};
}

inline Potential potential(std::mt19937_64& rng, int d, int atoms, long long bound, Convention c)
{
    std::uniform_real_distribution<double> w(0.1, 2.0);
    std::set<IVec, IVecLess> seen;
    std::vector<Atom> out;
    while (static_cast<int>(out.size()) < atoms) {
        IVec v = int_vector(rng, d, bound);
        if (!seen.insert(v).second) continue;
        double x = w(rng);
        if (c == Convention::Crystal) x = -x;
        else if (rng() % 3 == 0) x = -x;
        out.push_back({v, x});
    }
    return make_potential(std::move(out), c, EvalMode::PositivePart);
}

inline ConvexPolytope polygon(std::mt19937_64& rng, int n, double scale = 1.0)
{
    std::normal_distribution<double> g(0, scale);
    std::vector<Vec> pts;
    for (int i = 0; i < n; ++i) {
        Vec v(2);
        v << g(rng), g(rng);
        pts.push_back(v);
    }
    return convex_hull(pts);
}

inline Vec direction(std::mt19937_64& rng, int d)
{
    std::normal_distribution<double> g;
    Vec v(d);
    do {
        for (int i = 0; i < d; ++i) v(i) = g(rng);
    } while (v.norm() < 1e-6);
    return v / v.norm();
}

// g~ = M g with det M > 0, so every subset determinant product is det M det(G_J)^2 > 0.
inline MultigridSpec multigrid_spec(std::mt19937_64& rng, int d, int n)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Mat M;
    do M = Mat::Identity(d, d) + 0.3 * Mat::NullaryExpr(d, d, [&] { return 2 * u(rng) - 1; });
    while (M.determinant() < 0.2);
    MultigridSpec s;
    s.seed = rng();
    for (int i = 0; i < n; ++i) {
        Vec g;
        bool ok;
        do {
            g = direction(rng, d) * (0.5 + 1.5 * u(rng));
            ok = true;
            // keep every d-subset comfortably independent
            s.normals.push_back(g);
            for (const auto& J : subsets_of_size(static_cast<int>(s.normals.size()), d)) {
                if (J.back() != static_cast<int>(s.normals.size()) - 1) continue;
                Mat a(d, d);
                for (int c = 0; c < d; ++c) a.col(c) = s.normals[J[c]].normalized();
                if (std::abs(a.determinant()) < 0.05) ok = false;
            }
            s.normals.pop_back();
        } while (!ok);
        s.normals.push_back(g);
        s.edges.push_back(M * g);
        s.translations.push_back(u(rng));
    }
    return s;
}

// Mode is a coin flip; without positive, every third weight is a small negative.
inline SupportFunction support_function(std::mt19937_64& rng, int d, int n, bool positive)
{
    std::uniform_real_distribution<double> w(0.2, 1.5);
    SupportFunction phi{{}, rng() % 2 ? EvalMode::PositivePart : EvalMode::AbsoluteValue};
    for (int i = 0; i < n; ++i) {
        double x = w(rng);
        if (!positive && i % 3 == 2) x *= -0.3;
        phi.atoms.push_back({direction(rng, d) * (0.5 + w(rng)), x});
    }
    return phi;
}

}  // namespace gen
