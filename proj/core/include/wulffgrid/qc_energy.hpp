#pragma once

#include "wulffgrid/geometry.hpp"
#include "wulffgrid/multigrid.hpp"

#include <cstdint>
#include <unordered_set>
#include <vector>

namespace wulffgrid {

// w on facet normal classes; w(n) and w(-n) are the same entry.
struct TileWeight {
    std::vector<Vec> normals;
    std::vector<double> weights;

    double operator()(const Vec& n) const;  // MissingNormal if absent
};

TileWeight uniform_tile_weight(const Multigrid& mg, double w = 1.0);

// W(v) per rail index of mg.rails().
struct RailPotential {
    std::vector<double> W;
};

RailPotential rail_weights(const Multigrid& mg, const TileWeight& w);

class TileSet {
public:
    TileSet() = default;
    explicit TileSet(std::vector<DualPoint> points);  // duplicates dropped, sorted by key

    const std::vector<DualPoint>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    bool contains(const IVec& key) const { return keys_.count(key) > 0; }
    bool contains(const DualPoint& p) const { return contains(point_key(p)); }

private:
    std::vector<DualPoint> points_;
    std::unordered_set<IVec, IVecHash> keys_;
};

struct TileEnergy {
    double primal = 0;
    double dual = 0;
    std::vector<long long> primal_facets;  // boundary facets per rail, both orientations
    std::vector<long long> dual_pairs;     // cut consecutive pairs per rail
};

TileEnergy tile_energy(const Multigrid& mg, const TileSet& X, const RailPotential& W);

// EP_v: consecutive pairs on a rail line with one endpoint in X.
long long ep_count(const Multigrid& mg, const TileSet& X, int rail);
// EP_{J,v}: pairs x, x + lambda_{v,J} v in Lambda_J with one endpoint in X.
long long ep_count(const Multigrid& mg, const TileSet& X, int rail, const Subset& J);

struct BondCount {
    long long sublattice_sum = 0;  // sum over J containing J'_v of EP_{J,v}
    long long bound = 0;           // (#G - d + 1) EP_v
    bool holds = false;
    bool surjective = false;  // every EP_{J,v} pair contains a cut EP_v pair on its segment
};

BondCount bond_count_check(const Multigrid& mg, const TileSet& X, int rail);

double phi_W(const Vec& nu, const Multigrid& mg, const RailPotential& W);
double perimeter_P_W(const ConvexPolytope& E, const Multigrid& mg, const RailPotential& W);
// P_W of A(E) scaled to unit volume: the limit of the rescaled primal energies for dual shape E.
double qc_limit_perimeter(const ConvexPolytope& E, const Multigrid& mg, const RailPotential& W);

double union_measure(const Multigrid& mg, const TileSet& X);
// One-orientation energy over |T|^{(d-1)/d}; tends to qc_limit_perimeter along recoveries.
double rescaled_tile_energy(const Multigrid& mg, const TileSet& X, const RailPotential& W);

struct QcRecovery {
    TileSet X;
    double scale = 0;  // (N / rho_X)^{1/d}
    std::size_t base_count = 0;  // points of X in sE
    long long correction = 0;    // N - base_count, absorbed by the homothety
    double homothety = 1;        // final set: X inside c + t (sE - c), c the vertex centroid
    double correction_constant = 0;  // |correction| / (H^{d-1}(dE) N^{(d-1)/d})
    std::size_t threshold = 0;
};

QcRecovery qc_recovery(const ConvexPolytope& E, std::size_t N, const Multigrid& mg);
// d = 2: |s^{-1} A^{-1}(T_N) symmetric-difference E|.
double recovery_volume_error(const Multigrid& mg, const QcRecovery& r, const ConvexPolytope& E);

// Grown cluster with random holes, deterministic in seed.
TileSet random_tile_union(const Multigrid& mg, std::size_t max_size, std::uint64_t seed);

struct DensityAuditRow {
    Subset J;
    double rho = 0;
    std::size_t count = 0;
    double area_fraction = 0;
    double expected_count = 0;  // region measure / det Lambda_J
    double cell_ratio = 0;      // count det Lambda_J / region measure
};

struct DensityAudit {
    std::vector<DensityAuditRow> rows;
    double rho_sum = 0;
    double max_fraction_error = 0;  // relative, over J
    double max_count_error = 0;
};

DensityAudit density_audit(const Multigrid& mg, const Region& dual_region);

}  // namespace wulffgrid
