#include <doctest.h>

#include "generators.hpp"
#include "wulffgrid/errors.hpp"
#include "wulffgrid/multigrid.hpp"

#include <cmath>
#include <map>
#include <random>

using namespace wulffgrid;

namespace {

Vec v2(double x, double y)
{
    Vec v(2);
    v << x, y;
    return v;
}

const double s72 = std::sin(2 * M_PI / 5), s144 = std::sin(4 * M_PI / 5);

}  // namespace

TEST_CASE("validate_spec examples")
{
    const auto sq = validate_spec(square_bigrid());
    CHECK(sq.det_GGt == doctest::Approx(1.0));

    const auto pg = validate_spec(pentagrid(1));
    CHECK(std::abs(pg.det_GGt - 6.25) < 1e-12);
    CHECK(std::abs(pg.cauchy_binet_sum - 5 * (s72 * s72 + s144 * s144)) < 1e-12);
    CHECK(std::abs(pg.cauchy_binet_sum - 6.25) < 1e-12);

    auto flipped = pentagrid(1);
    flipped.edges[0] = -flipped.edges[0];
    CHECK_THROWS_AS(validate_spec(flipped), DetConditionViolated);

    CHECK_THROWS_AS(validate_spec(pentagrid_with({0, 0, 0, 0, 0})), DegenerateTranslations);
    CHECK_THROWS_AS(verify_tiling(pentagrid_with({0, 0, 0, 0, 0}), Region::ball(Vec::Zero(2), 5), 10), DegenerateTranslations);
    const auto fixed = perturb(pentagrid_with({0, 0, 0, 0, 0}), 3);
    for (double g : fixed.translations) {
        CHECK(g > 0);
        CHECK(g < 1e-3);
    }
}

TEST_CASE("property: Cauchy-Binet on random specs")
{
    std::mt19937_64 rng(11);
    for (int t = 0; t < 100; ++t) {
        const int d = 2 + t % 2, n = d + static_cast<int>(rng() % (9 - d));
        const auto s = gen::multigrid_spec(rng, d, n);
        // oracle: direct determinant of G G~^T and explicit minors
        Mat G(d, n), Gt(d, n);
        for (int i = 0; i < n; ++i) {
            G.col(i) = s.normals[i] / s.normals[i].norm();
            Gt.col(i) = s.edges[i] / s.normals[i].norm();
        }
        const double det = (G * Gt.transpose()).determinant();
        double sum = 0, scale = 0;
        for (const auto& J : subsets_of_size(n, d)) {
            Mat a(d, d), b(d, d);
            for (int c = 0; c < d; ++c) a.col(c) = G.col(J[c]), b.col(c) = Gt.col(J[c]);
            sum += a.determinant() * b.determinant();
            scale += std::abs(a.determinant() * b.determinant());
        }
        CHECK(std::abs(det - sum) <= 1e-9 * scale);
        const auto r = validate_spec(s, 200);
        CHECK(std::abs(r.det_GGt - det) <= 1e-12 * scale);
        CHECK(std::abs(r.cauchy_binet_sum - sum) <= 1e-12 * scale);
        CHECK(r.min_det_product > 0);
    }
}

TEST_CASE("affine_map_and_bound examples")
{
    const auto sq = affine_map_and_bound(square_bigrid(0, 0));
    CHECK(sq.A.linear.isApprox(Mat::Identity(2, 2)));
    CHECK(sq.A.offset.norm() == 0);
    CHECK(sq.bd_bound == doctest::Approx(std::sqrt(2.0) / 2));

    const auto pg = affine_map_and_bound(pentagrid(1));
    CHECK((pg.A.linear - 2.5 * Mat::Identity(2, 2)).norm() < 1e-12);
    CHECK(pg.bd_bound == doctest::Approx(0.5 + std::cos(M_PI / 5)).epsilon(1e-12));  // 1.309
}

TEST_CASE("rail_families examples")
{
    const auto pg = rail_families(pentagrid(1));
    REQUIRE(pg.size() == 5);
    CHECK((pg[0].v - v2(0, 1)).norm() < 1e-12);
    CHECK(pg[0].cell_measure == doctest::Approx(1.0));
    for (const auto& r : pg) CHECK(r.facet_area == doctest::Approx(1.0));

    const auto sq = rail_families(square_bigrid());
    REQUIRE(sq.size() == 2);
    CHECK((sq[0].v - v2(0, 1)).norm() < 1e-12);
    CHECK((sq[1].v - v2(-1, 0)).norm() < 1e-12);

    MultigridSpec s3;
    for (int i = 0; i < 3; ++i) s3.normals.push_back(Vec::Unit(3, i));
    s3.normals.push_back(Vec::Ones(3) / std::sqrt(3.0));
    s3.edges = s3.normals;
    s3.translations = {0.1, 0.2, 0.3, 0.4};
    CHECK(rail_families(s3).size() == 6);
}

TEST_CASE("property: rail orientation and orthogonality")
{
    std::mt19937_64 rng(12);
    for (int t = 0; t < 40; ++t) {
        const int d = 2 + t % 2;
        const auto s = gen::multigrid_spec(rng, d, d + 1 + t % 4);
        for (const auto& r : rail_families(s)) {
            Mat a(d, d), b(d, d);
            for (int c = 0; c + 1 < d; ++c) {
                CHECK(std::abs(r.v.dot(s.normals[r.J_prime[c]])) < 1e-12);
                CHECK(std::abs(r.v_tilde.dot(s.edges[r.J_prime[c]])) < 1e-12);
                a.col(c) = s.normals[r.J_prime[c]];
                b.col(c) = s.edges[r.J_prime[c]];
            }
            a.col(d - 1) = r.v;
            b.col(d - 1) = r.v_tilde;
            CHECK(a.determinant() > 0);
            CHECK(b.determinant() > 0);
            CHECK(r.v.norm() == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("dual_lattice_info examples")
{
    const auto sq = dual_lattice_info(square_bigrid(), {0, 1});
    CHECK(sq.covolume == doctest::Approx(1.0));
    CHECK(sq.rho == doctest::Approx(1.0));
    CHECK((sq.base - v2(0.25, 0.25)).norm() < 1e-12);

    const auto spec = pentagrid(1);
    const auto adj = dual_lattice_info(spec, {0, 1});
    CHECK(adj.covolume == doctest::Approx(1 / s72).epsilon(1e-12));
    CHECK(adj.rho == doctest::Approx(4.0 / 25 * s72 * s72).epsilon(1e-12));
    CHECK(adj.rho == doctest::Approx(0.14472).epsilon(1e-4));
    double total = 0;
    for (const auto& J : subsets_of_size(5, 2)) total += dual_lattice_info(spec, J).rho;
    CHECK(std::abs(total - 1) < 1e-12);
    CHECK_THROWS_AS(dual_lattice_info(spec, {0, 0}), InvalidSubset);
}

TEST_CASE("property: lambda consistency and unit sum of densities")
{
    std::mt19937_64 rng(13);
    for (int t = 0; t < 40; ++t) {
        const int d = 2 + t % 2;
        const auto s = gen::multigrid_spec(rng, d, d + 1 + t % 4);
        const auto rails = rail_families(s);
        double total = 0;
        for (const auto& J : subsets_of_size(s.families(), d)) {
            const auto L = dual_lattice_info(s, J);
            total += L.rho;
            double prod = 1;
            for (int g : J) prod *= s.normals[g].squaredNorm();
            Mat a(d, d);
            for (int c = 0; c < d; ++c) a.col(c) = s.normals[J[c]];
            CHECK(L.covolume == doctest::Approx(prod / std::abs(a.determinant())).epsilon(1e-9));
            for (std::size_t i = 0; i < L.rails.size(); ++i) {
                const auto& R = rails[L.rails[i]];
                CHECK(std::abs(L.covolume / L.lambda[i] - R.cell_measure) <= 1e-9 * R.cell_measure);
                // the generator really is parallel to v
                const Vec gen = L.basis.col(L.rail_member[i]);
                CHECK(std::abs(std::abs(gen.normalized().dot(R.v)) - 1) < 1e-12);
            }
        }
        CHECK(std::abs(total - 1) < 1e-12);
    }
}

TEST_CASE("dual_points_in_region examples")
{
    const auto one = dual_points_in_region(square_bigrid(), Region::box(Vec::Zero(2), Vec::Ones(2)));
    REQUIRE(one.size() == 1);
    CHECK((one[0].x - v2(0.25, 0.25)).norm() < 1e-15);
    CHECK(one[0].k == std::vector<long long>{0, 0});

    Multigrid mg(pentagrid_with({0.2, 0.2, 0.2, 0.2, 0.2}));
    const auto p = mg.point(0, {0, 0});
    CHECK(p.x(0) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(p.x(1) == doctest::Approx(0.2 * (1 - std::cos(2 * M_PI / 5)) / s72).epsilon(1e-12));
    CHECK(std::abs(p.x(1) - 0.1453) < 5e-5);
    CHECK(p.k == std::vector<long long>{0, 0, -1, -1, -1});

    // rho_X pi R^2 within 3% at R = 50
    Multigrid pg(pentagrid(1));
    CHECK(pg.density() == doctest::Approx(5 * (s72 + s144)).epsilon(1e-12));
    std::size_t n = 0;
    pg.for_each_point(Region::ball(Vec::Zero(2), 50), [&](const DualPoint&) { ++n; });
    CHECK(std::abs(n / (pg.density() * M_PI * 2500) - 1) < 0.03);
}

TEST_CASE("property: admissible indices and per-J density")
{
    Multigrid mg(pentagrid(2));
    std::vector<std::size_t> count(mg.subsets().size(), 0);
    std::size_t checked = 0;
    const double R = 200;
    mg.for_each_point(Region::ball(Vec::Zero(2), R), [&](const DualPoint& p) {
        ++count[p.j];
        if (++checked % 997) return;
        // slabs of every family: k_g <= t_g < k_g + 1, equality exactly on J
        for (int g = 0; g < 5; ++g) {
            const double t = mg.coordinate(p.x, g);
            if (std::binary_search(p.J.begin(), p.J.end(), g)) CHECK(std::abs(t - p.k[g]) < 1e-9);
            else CHECK((t > p.k[g] && t < p.k[g] + 1));
        }
    });
    for (std::size_t j = 0; j < count.size(); ++j)
        CHECK(std::abs(count[j] * mg.lattice(j).covolume / (M_PI * R * R) - 1) < 0.03);
}

TEST_CASE("tile_of examples")
{
    const auto sq = square_bigrid();
    const auto p = dual_points_in_region(sq, Region::box(Vec::Zero(2), Vec::Ones(2)))[0];
    const auto t = tile_of(sq, p);
    CHECK(t.anchor.norm() == 0);
    CHECK((t.center() - v2(0.5, 0.5)).norm() < 1e-15);
    CHECK(t.volume() == doctest::Approx(1.0));

    // sum of the unit pentagrid vectors vanishes, so the ceiling anchor of this point is 0
    const auto pg = pentagrid_with({0.2, 0.2, 0.2, 0.2, 0.2});
    Multigrid mg(pg);
    const auto q = mg.point(0, {0, 0});
    const auto tq = mg.tile(q);
    CHECK(tq.anchor.norm() < 1e-12);
    CHECK(tq.lift == std::vector<long long>{0, 0, 0, 0, 0});
    CHECK(tile_record(tq) ==
          "{\"J\":[0,1],\"k\":[0,0,-1,-1,-1],\"anchor\":[0.000000000,0.000000000],"
          "\"generators\":[[1.000000000,0.000000000],[0.309016994,0.951056516]]}");

    // every pentagrid tile is the 72 or 36 degree rhombus
    const auto D = mg.distortion();
    mg.for_each_point(Region::ball(Vec::Zero(2), 10), [&](const DualPoint& p) {
        const auto tile = mg.tile(p);
        const double a = std::acos(std::abs(tile.generators[0].dot(tile.generators[1]))) * 180 / M_PI;
        const bool fat = std::abs(a - 72) < 1e-9, thin = std::abs(a - 36) < 1e-9;
        CHECK((fat || thin));
        CHECK(tile.volume() == doctest::Approx(fat ? s72 : s144));
        CHECK((tile.center() - D.A(p.x)).norm() <= D.bd_bound);
    });
}

TEST_CASE("property: neighbours are consecutive on the rail line")
{
    Multigrid mg(pentagrid(3));
    std::vector<DualPoint> pts;
    mg.for_each_point(Region::ball(Vec::Zero(2), 6), [&](const DualPoint& p) { pts.push_back(p); });
    std::mt19937_64 rng(14);
    for (int t = 0; t < 60; ++t) {
        const auto& p = pts[rng() % pts.size()];
        if (p.x.norm() > 3) continue;
        for (int m = 0; m < 2; ++m) {
            const int r = mg.rail_index({p.J[1 - m]});
            const Vec v = mg.rails()[r].v;
            for (int dir : {1, -1}) {
                const auto q = mg.neighbour(p, r, dir);
                CHECK(point_key(mg.neighbour(q, r, -dir)) == point_key(p));
                const double len = (q.x - p.x).dot(dir * v);
                CHECK(len > 0);
                CHECK(((q.x - p.x) - dir * len * v).norm() < 1e-9);
                // oracle: brute force over nearby vertices, none strictly between
                for (const auto& z : pts) {
                    const double s = (z.x - p.x).dot(dir * v);
                    const double off = ((z.x - p.x) - dir * s * v).norm();
                    if (off < 1e-9) CHECK_FALSE((s > 1e-9 && s < len - 1e-9));
                }
            }
        }
    }
}

TEST_CASE("verify_tiling examples")
{
    const auto sq = verify_tiling(square_bigrid(), Region::ball(Vec::Zero(2), 8), 2000);
    CHECK(sq.samples == 2000);
    CHECK(sq.max_distortion <= sq.bd_bound);

    const auto pg = verify_tiling(pentagrid(1), Region::ball(Vec::Zero(2), 30), 10000);
    CHECK(pg.samples == 10000);
    CHECK(pg.max_distortion < pg.bd_bound);
    CHECK(std::abs(pg.tile_measure - pg.region_measure) <= pg.band_measure);

    const auto ico = verify_tiling(icosahedral_grid(1), Region::ball(Vec::Zero(3), 7), 2000);
    CHECK(ico.samples == 2000);
}

TEST_CASE("check_tiling rejects the uncorrected anchor")
{
    // anchor sum_g k_g g~ with floor indices everywhere shifts tiles by a J-dependent vector
    const auto spec = pentagrid(1);
    Multigrid mg(spec);
    std::vector<Tile> tiles;
    const auto D = mg.distortion();
    const Region region = Region::ball(Vec::Zero(2), 15);
    mg.for_each_point(Region::ball(D.A.linear.inverse() * -D.A.offset, 8), [&](const DualPoint& p) {
        if (!region.contains(D.A(p.x))) return;
        auto t = mg.tile(p);
        t.anchor.setZero();
        for (int g = 0; g < 5; ++g) t.anchor += static_cast<double>(p.k[g]) * spec.edges[g];
        tiles.push_back(t);
    });
    const double pad = D.bd_bound + mg.max_tile_diameter();
    CHECK_THROWS_AS(check_tiling(tiles, region, pad, 2000, 1), TilingError);
}

TEST_CASE("property: bounded distortion on random specs")
{
    std::mt19937_64 rng(15);
    for (int t = 0; t < 10; ++t) {
        const auto s = gen::multigrid_spec(rng, 2, 3 + t % 4);
        Multigrid mg(s);
        const auto& D = mg.distortion();
        double worst = 0;
        mg.for_each_point(Region::ball(Vec::Zero(2), 20), [&](const DualPoint& p) {
            worst = std::max(worst, (mg.tile(p).center() - D.A(p.x)).norm());
        });
        CHECK(worst <= D.bd_bound);
        CHECK_NOTHROW(verify_tiling(s, Region::ball(D.A(Vec::Zero(2)), 10 + D.bd_bound + mg.max_tile_diameter()), 500));
    }
}
