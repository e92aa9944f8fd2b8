#include <doctest.h>

#include "generators.hpp"
#include "wulffgrid/errors.hpp"
#include "wulffgrid/qc_energy.hpp"

#include <cmath>
#include <random>

using namespace wulffgrid;

namespace {

Vec v2(double x, double y)
{
    Vec v(2);
    v << x, y;
    return v;
}

ConvexPolytope unit_square() { return box_polytope(Vec::Zero(2), Vec::Ones(2)); }

// (2/5) sum over the pentagrid rails of |cos| + |sin|, rails perpendicular to the normals
double pentagrid_square_oracle()
{
    double s = 0;
    for (int j = 0; j < 5; ++j) {
        const double a = 2 * M_PI * j / 5 + M_PI / 2;
        s += std::abs(std::cos(a)) + std::abs(std::sin(a));
    }
    return 0.4 * s;
}

RailPotential random_weights(std::mt19937_64& rng, const Multigrid& mg)
{
    std::uniform_real_distribution<double> u(0.1, 2.0);
    TileWeight w;
    for (const auto& r : mg.rails()) {
        w.normals.push_back(r.v_tilde);
        w.weights.push_back(u(rng));
    }
    return rail_weights(mg, w);
}

}  // namespace

TEST_CASE("rail_weights examples")
{
    const Multigrid pg(pentagrid(1));
    const auto W = rail_weights(pg, uniform_tile_weight(pg));
    REQUIRE(W.W.size() == 5);
    for (double x : W.W) CHECK(x == doctest::Approx(1.0).epsilon(1e-12));

    // facets of the icosahedral rhombohedra are rhombi between two 5-fold axes, area 2/sqrt(5)
    const Multigrid ico(icosahedral_grid(1));
    const auto Wi = rail_weights(ico, uniform_tile_weight(ico, 2.0));
    CHECK(Wi.W.size() == 15);
    for (double x : Wi.W) CHECK(x == doctest::Approx(4 / std::sqrt(5.0)).epsilon(1e-12));

    CHECK_THROWS_AS(rail_weights(pg, TileWeight{}), MissingNormal);
    CHECK_THROWS_AS(rail_weights(pg, uniform_tile_weight(pg, -1)), InvalidPotential);
}

TEST_CASE("tile_energy examples")
{
    const Multigrid mg(pentagrid(1));
    const auto W = rail_weights(mg, uniform_tile_weight(mg));
    CHECK(tile_energy(mg, TileSet{}, W).primal == 0);

    const DualPoint p = mg.point(0, {0, 0});
    const TileSet one({p});
    const auto e1 = tile_energy(mg, one, W);
    CHECK(e1.primal == 4);
    CHECK(e1.dual == 4);

    const TileSet two({p, mg.neighbour(p, mg.lattice(p.j).rails[0], 1)});
    const auto e2 = tile_energy(mg, two, W);
    CHECK(e2.primal == 6);
    CHECK(e2.dual == 6);

    // duplicates are dropped
    CHECK(TileSet({p, p}).size() == 1);

    const Multigrid ico(icosahedral_grid(1));
    const auto Wi = rail_weights(ico, uniform_tile_weight(ico));
    const DualPoint q = ico.point(0, {0, 0, 0});
    const auto e3 = tile_energy(ico, TileSet({q}), Wi);
    CHECK(e3.primal == doctest::Approx(6 * 2 / std::sqrt(5.0)));
    CHECK(e3.dual == doctest::Approx(e3.primal));
}

TEST_CASE("ep_count of a single point")
{
    for (const auto& spec : {pentagrid(2), icosahedral_grid(1)}) {
        const Multigrid mg(spec);
        const DualPoint p = mg.point(static_cast<int>(mg.subsets().size()) - 1,
                                     std::vector<long long>(mg.dim(), 1));
        const TileSet X({p});
        long long total = 0;
        for (std::size_t r = 0; r < mg.rails().size(); ++r) total += ep_count(mg, X, static_cast<int>(r));
        CHECK(total == 2 * mg.dim());
        for (int r : mg.lattice(p.j).rails) CHECK(ep_count(mg, X, r, p.J) == 2);
    }
}

TEST_CASE("phi_W and P_W examples")
{
    const Multigrid mg(pentagrid(1));
    const auto W = rail_weights(mg, uniform_tile_weight(mg));
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int t = 0; t < 20; ++t) {
        const Vec nu = v2(g(rng), g(rng));
        double s = 0;
        for (const auto& r : mg.rails()) s += std::max(0.0, nu.dot(r.v));
        CHECK(phi_W(nu, mg, W) == doctest::Approx(0.4 * s).epsilon(1e-12));
    }
    CHECK(perimeter_P_W(unit_square(), mg, W) == doctest::Approx(pentagrid_square_oracle()).epsilon(1e-12));
    CHECK(pentagrid_square_oracle() == doctest::Approx(2.5256).epsilon(1e-4));
    CHECK(qc_limit_perimeter(unit_square(), mg, W) == doctest::Approx(pentagrid_square_oracle()).epsilon(1e-12));

    RailPotential zero{std::vector<double>(5, 0.0)};
    CHECK(perimeter_P_W(unit_square(), mg, zero) == 0);
    CHECK_THROWS_AS(phi_W(Vec::Zero(2), mg, W), ZeroDirection);
}

TEST_CASE("property: phi_W is a sublinear function")
{
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.1, 5.0);
    for (int t = 0; t < 50; ++t) {
        const Multigrid mg(gen::multigrid_spec(rng, 2, 3 + t % 4));
        const auto W = random_weights(rng, mg);
        const Vec a = v2(g(rng), g(rng)), b = v2(g(rng), g(rng));
        const double lam = u(rng);
        CHECK(phi_W(lam * a, mg, W) == doctest::Approx(lam * phi_W(a, mg, W)).epsilon(1e-12));
        CHECK(phi_W(a + b, mg, W) <= phi_W(a, mg, W) + phi_W(b, mg, W) + 1e-12);
        const auto E = gen::polygon(rng, 8);
        CHECK(perimeter_P_W(scaled(E, lam), mg, W) == doctest::Approx(lam * perimeter_P_W(E, mg, W)).epsilon(1e-9));
    }
}

TEST_CASE("property: primal and dual energies agree on tile unions")
{
    std::mt19937_64 rng(23);
    for (int t = 0; t < 100; ++t) {
        const auto spec = t % 4 == 3 ? gen::multigrid_spec(rng, 2, 4) : pentagrid(1 + t);
        const Multigrid mg(spec);
        const auto W = random_weights(rng, mg);
        const TileSet X = random_tile_union(mg, 150, rng());
        const auto e = tile_energy(mg, X, W);
        CHECK(std::abs(e.primal - e.dual) <= 1e-12 * std::max(1.0, e.primal));
        double via_ep = 0;
        for (std::size_t r = 0; r < mg.rails().size(); ++r) {
            CHECK(e.primal_facets[r] == e.dual_pairs[r]);
            via_ep += W.W[r] * static_cast<double>(ep_count(mg, X, static_cast<int>(r)));
        }
        CHECK(via_ep == doctest::Approx(e.dual).epsilon(1e-12));
    }
}

TEST_CASE("property: bond count on tile unions")
{
    std::mt19937_64 rng(29);
    for (int t = 0; t < 100; ++t) {
        const Multigrid mg(t % 2 ? pentagrid(t) : gen::multigrid_spec(rng, 2, 3 + t % 3));
        const TileSet X = random_tile_union(mg, 80, rng());
        const int rail = static_cast<int>(rng() % mg.rails().size());
        const auto b = bond_count_check(mg, X, rail);
        CHECK(b.holds);
        CHECK(b.surjective);
        CHECK(b.sublattice_sum <= b.bound);
    }
}

TEST_CASE("qc_recovery examples")
{
    const Multigrid mg(pentagrid(1));
    const auto E = unit_square();
    const auto r = qc_recovery(E, 1000, mg);
    CHECK(r.X.size() == 1000);
    CHECK(r.correction == 1000 - static_cast<long long>(r.base_count));
    CHECK(std::abs(r.homothety - 1) < 0.05);
    CHECK(r.scale == doctest::Approx(std::sqrt(1000 / mg.density())));

    CHECK_THROWS_AS(qc_recovery(E, r.threshold - 1, mg), InfeasibleCount);
    CHECK_THROWS_AS(qc_recovery(scaled(E, 2), 1000, mg), DimensionMismatch);

    // same inputs, same set
    CHECK(qc_recovery(E, 1000, mg).X.points().back().k == r.X.points().back().k);

    const double err3 = recovery_volume_error(mg, r, E);
    const double err4 = recovery_volume_error(mg, qc_recovery(E, 10000, mg), E);
    CHECK(err4 < err3);
    CHECK(err4 < 0.1);

    const auto W = rail_weights(mg, uniform_tile_weight(mg));
    const double e = rescaled_tile_energy(mg, qc_recovery(E, 4000, mg).X, W);
    CHECK(std::abs(e - pentagrid_square_oracle()) < 0.03 * pentagrid_square_oracle());
}

TEST_CASE("density_audit examples")
{
    const Multigrid mg(pentagrid(1));
    const auto a = density_audit(mg, Region::ball(Vec::Zero(2), 200));
    CHECK(std::abs(a.rho_sum - 1) < 1e-12);
    double fat = 0, thin = 0;
    for (const auto& row : a.rows) {
        const int gap = row.J[1] - row.J[0];
        (gap == 1 || gap == 4 ? fat : thin) += row.area_fraction;
        CHECK(std::abs(row.area_fraction / row.rho - 1) < 0.02);
    }
    CHECK(std::abs(fat - 0.7236) < 0.02 * 0.7236);
    CHECK(std::abs(thin - 0.2764) < 0.02 * 0.2764);
    CHECK(a.max_count_error < 0.02);

    const Multigrid sq(square_bigrid());
    const auto b = density_audit(sq, Region::box(v2(0, 0), v2(10, 10)));
    REQUIRE(b.rows.size() == 1);
    CHECK(b.rows[0].area_fraction == 1);
    CHECK(b.rows[0].count == 100);
}
