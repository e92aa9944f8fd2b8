#include <doctest.h>

#include "generators.hpp"
#include "wulffgrid/errors.hpp"
#include "wulffgrid/wulff.hpp"

#include <cmath>
#include <random>

using namespace wulffgrid;

namespace {

Vec v3(double x, double y, double z)
{
    Vec v(3);
    v << x, y, z;
    return v;
}

bool has_vertex(const ConvexPolytope& p, const Vec& x, double tol = 1e-9)
{
    for (const auto& v : p.vertices)
        if ((v - x).norm() <= tol) return true;
    return false;
}

// Fibonacci sphere; the oracle below only ever over-approximates W.
std::vector<Vec> sphere_grid(int n)
{
    std::vector<Vec> out;
    const double ga = M_PI * (3 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        const double z = 1 - 2 * (i + 0.5) / n, r = std::sqrt(1 - z * z);
        out.push_back(v3(r * std::cos(ga * i), r * std::sin(ga * i), z));
    }
    return out;
}

}  // namespace

TEST_CASE("zonotope_of examples")
{
    const auto sq = zonotope_of(support_function(make_potential(
        {{ivec({1, 0}), 1}, {ivec({-1, 0}), 1}, {ivec({0, 1}), 1}, {ivec({0, -1}), 1}}, Convention::Signed, EvalMode::PositivePart)));
    CHECK_FALSE(sq.degenerate);
    Vec lo(2), hi(2);
    lo << -1, -1;
    hi << 1, 1;
    // [0,v]+[0,-v] = [-v,v] per axis
    CHECK(hausdorff(sq.body, box_polytope(lo, hi)) < 1e-12);

    SupportFunction one{{{Vec::Unit(2, 0), 1.0}}, EvalMode::PositivePart};
    const auto seg = zonotope_of(one);
    CHECK(seg.degenerate);
    CHECK(seg.body.affine_dim == 1);
    CHECK(has_vertex(seg.body, Vec::Zero(2)));
    CHECK(has_vertex(seg.body, Vec::Unit(2, 0)));

    const auto fcc = fcc_minus_axes(1.0).positive_part();
    SupportFunction fcc_pp{fcc.atoms, EvalMode::PositivePart};
    double oracle = 0;
    for (const auto& a : fcc_pp.atoms) oracle += std::max(0.0, a.v(0));
    CHECK(oracle == 4.0);
    CHECK(support(zonotope_of(fcc_pp).body, Vec::Unit(3, 0)) == doctest::Approx(oracle));

    CHECK_THROWS_AS(zonotope_of(fcc_minus_axes(1.0)), MixedSigns);
}

TEST_CASE("property: zonotope support equals phi")
{
    std::mt19937_64 rng(51);
    for (int t = 0; t < 20; ++t) {
        const int d = 2 + t % 2;
        const auto phi = gen::support_function(rng, d, 3 + t % 4, true);
        const auto z = zonotope_of(phi);
        for (int s = 0; s < 50; ++s) {
            const Vec nu = gen::direction(rng, d);
            CHECK(std::abs(support(z.body, nu) - phi(nu)) <= 1e-9);
        }
    }
}

TEST_CASE("signed_wulff: octahedral example")
{
    const auto w = signed_wulff(fcc_minus_axes(0.75));
    REQUIRE_FALSE(w.degenerate);
    CHECK(w.provenance == Provenance::SignedDifference);
    CHECK(w.body.vertices.size() == 6);
    for (int i = 0; i < 3; ++i) {
        CHECK(has_vertex(w.body, 3 * Vec::Unit(3, i)));
        CHECK(has_vertex(w.body, -3 * Vec::Unit(3, i)));
    }
    REQUIRE(w.oracle_distance);
    CHECK(*w.oracle_distance < 1e-9);

    // fine-grid halfspace oracle: contains W and converges to it
    const auto phi = fcc_minus_axes(0.75);
    double prev = 1e9;
    for (int n : {500, 2000, 8000}) {
        std::vector<Hyperplane> hs;
        for (const auto& u : sphere_grid(n)) hs.push_back({u, phi(u)});
        const auto approx = halfspace_intersection(hs);
        for (const auto& v : w.body.vertices) CHECK(distance_to(approx, v) < 1e-9);
        const double h = hausdorff(approx, w.body);
        CHECK(h < prev);
        prev = h;
    }
    CHECK(prev < 0.15);

    const auto none = signed_wulff(fcc_minus_axes(0.4));
    CHECK(none.empty);
    CHECK(fcc_minus_axes(0.4)(v3(1, 1, 1)) == doctest::Approx(12 * 0.4 - 6));

    const auto plain = fcc_minus_axes(0.75).positive_part();
    CHECK(hausdorff(signed_wulff(plain).body, zonotope_of(plain).body) < 1e-12);
}

TEST_CASE("positivity_check examples")
{
    SupportFunction l1{{{Vec::Unit(2, 0), 1.0}, {Vec::Unit(2, 1), 1.0}}, EvalMode::AbsoluteValue};
    const auto p = positivity_check(l1);
    CHECK(p.min == doctest::Approx(1.0));
    CHECK(std::abs(p.argmin.cwiseAbs().maxCoeff() - 1.0) < 1e-12);

    const auto q = positivity_check(fcc_minus_axes(0.5));
    CHECK(std::abs(q.min) < 1e-12);
    CHECK((q.argmin.cwiseAbs() - Vec::Constant(3, 1 / std::sqrt(3.0))).norm() < 1e-9);

    std::mt19937_64 rng(5);
    for (int t = 0; t < 10; ++t) {
        // |.| mode with 4 spanning atoms is a norm; positive part need not be
        auto phi = gen::support_function(rng, 3, 4, true);
        phi.mode = EvalMode::AbsoluteValue;
        CHECK(positivity_check(phi).min > 0);
    }
    SupportFunction flat{{{Vec::Unit(3, 0), 1.0}, {Vec::Unit(3, 1), 2.0}}, EvalMode::AbsoluteValue};
    CHECK(std::abs(positivity_check(flat).min) < 1e-12);
}

TEST_CASE("property: positivity_check is not beaten by sampling")
{
    std::mt19937_64 rng(77);
    for (int t = 0; t < 20; ++t) {
        const int d = 2 + t % 2;
        const auto phi = gen::support_function(rng, d, 5, false);
        const auto p = positivity_check(phi);
        CHECK(phi(p.argmin) == doctest::Approx(p.min));
        for (int s = 0; s < 2000; ++s) CHECK(phi(gen::direction(rng, d)) >= p.min - 1e-12);
    }
}

TEST_CASE("classify_shape examples")
{
    const auto cube = classify_shape({box_polytope(-Vec::Ones(3), Vec::Ones(3))});
    CHECK(cube.vertices == 8);
    CHECK(cube.edges == 12);
    CHECK(cube.facets == 6);
    CHECK(cube.centrally_symmetric);
    CHECK(cube.zonotope);

    const auto oct = classify_shape(signed_wulff(fcc_minus_axes(0.75)));
    CHECK(oct.vertices == 6);
    CHECK(oct.edges == 12);
    CHECK(oct.facets == 8);
    CHECK(oct.centrally_symmetric);
    CHECK_FALSE(oct.zonotope);
    CHECK(oct.label == "octahedron");

    SupportFunction three{{{Vec::Unit(2, 0), 1.0}, {Vec::Unit(2, 1), 1.0}, {Vec::Ones(2), 1.0}}, EvalMode::AbsoluteValue};
    const auto hex = classify_shape(zonotope_of(three));
    CHECK(hex.vertices == 6);
    CHECK(hex.zonotope);

    CHECK_THROWS_AS(classify_shape(signed_wulff(fcc_minus_axes(0.4))), Degenerate);
}

TEST_CASE("parameter scans")
{
    const auto fcc = parameter_scan(fcc_minus_axes, scan_grid(0.30, 1.20, 0.05), "(1/4, 1/2]");
    CHECK(fcc.rows.size() == 19);
    bool found = false;
    for (const auto& iv : fcc.intervals)
        if (iv.label == "octahedron" && iv.lo <= 0.75 && 0.75 <= iv.hi) found = true;
    CHECK(found);
    CHECK(scan_csv(fcc).rfind("c,n_vertices,n_facets,zonotope,positivity_min\n", 0) == 0);

    const auto pyr = parameter_scan(pyritohedron_family, {0.0, 0.3});
    CHECK(pyr.rows[0].shape.zonotope);
    CHECK(pyr.rows[1].shape.facets == 12);
    CHECK(pyr.rows[1].shape.facet_sizes.at(5) == 12);

    const auto ico = parameter_scan(icosahedral_family, {5.0 / 6.0});
    CHECK(ico.rows[0].label == "pentagonal-dodecahedron");
}

TEST_CASE("property: sum law")
{
    std::mt19937_64 rng(61);
    for (int t = 0; t < 30; ++t) {
        const int d = 2 + t % 2;
        const auto a = gen::support_function(rng, d, 3, true);
        auto b = gen::support_function(rng, d, 3, true);
        b.mode = a.mode;
        const auto sum = zonotope_of(a + b);
        const auto ms = minkowski_sum(zonotope_of(a).body, zonotope_of(b).body);
        CHECK(hausdorff(sum.body, ms) < 1e-9);
    }
}

TEST_CASE("property: difference consistency and support bound")
{
    std::mt19937_64 rng(63);
    int compared = 0;
    for (int t = 0; t < 40; ++t) {
        const int d = 2 + t % 2;
        const auto phi = gen::support_function(rng, d, 6, false);
        const auto w = signed_wulff(phi);
        if (w.degenerate) continue;
        ++compared;
        REQUIRE(w.oracle_distance);
        CHECK(*w.oracle_distance < 1e-9);
        for (const auto& a : phi.atoms) CHECK(support(w.body, a.v / a.v.norm()) <= phi(a.v / a.v.norm()) + 1e-9);
        for (const auto& f : w.body.facets) CHECK(f.offset == doctest::Approx(phi(f.normal)).epsilon(1e-9));
    }
    CHECK(compared > 10);
}

TEST_CASE("property: scale equivariance")
{
    std::mt19937_64 rng(67);
    for (int t = 0; t < 20; ++t) {
        const int d = 2 + t % 2;
        const auto phi = gen::support_function(rng, d, 5, t % 2);
        const double s = 0.5 + (t % 5);
        const auto w = signed_wulff(phi), ws = signed_wulff(s * phi);
        CHECK(w.empty == ws.empty);
        if (w.empty) continue;
        REQUIRE(w.body.vertices.size() == ws.body.vertices.size());
        for (std::size_t i = 0; i < w.body.vertices.size(); ++i)
            CHECK((s * w.body.vertices[i] - ws.body.vertices[i]).norm() < 1e-9 * s);
    }
}
