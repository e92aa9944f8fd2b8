#pragma once

#include "wulffgrid/geometry.hpp"
#include "wulffgrid/lattice.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace wulffgrid {

// Hyperplanes {x : <x, g/|g|> - gamma_g = k|g|}, k in Z, one family per normal.
struct MultigridSpec {
    std::vector<Vec> normals;
    std::vector<double> translations;
    std::vector<Vec> edges;  // g~ per normal
    std::uint64_t seed = 0;

    int dim() const { return normals.empty() ? 0 : static_cast<int>(normals[0].size()); }
    int families() const { return static_cast<int>(normals.size()); }
};

// Sorted indices into the normals; the global order induces the subset order.
using Subset = std::vector<int>;

std::vector<Subset> subsets_of_size(int n, int k);

struct SpecReport {
    double det_GGt = 0;          // det(G G~^T)
    double cauchy_binet_sum = 0;  // sum_J det(G_J) det(G~_J)
    double min_det_product = 0;   // smallest det(G_J) det(G~_J)
    double min_hyperplane_gap = 0;
    int probes = 0;
};

// Cauchy-Binet terms only, no validation.
SpecReport cauchy_binet(const MultigridSpec& spec);
SpecReport validate_spec(const MultigridSpec& spec, int probes = 1000);

// Uniform offsets in (0, 1e-3) added to gamma, then re-validated.
MultigridSpec perturb(const MultigridSpec& spec, std::uint64_t seed);

// Uniform in [0,1) from the top 53 bits; identical on every platform.
double unit_uniform(std::uint64_t bits);

MultigridSpec pentagrid(std::uint64_t seed = 1);
MultigridSpec pentagrid_with(const std::vector<double>& gamma);
MultigridSpec square_bigrid(double gamma0 = 0.25, double gamma1 = 0.25);
// Six 5-fold axes of the icosahedron, g~ = g.
MultigridSpec icosahedral_grid(std::uint64_t seed = 1);

struct AffineMap {
    Mat linear;
    Vec offset;
    Vec operator()(const Vec& x) const { return linear * x + offset; }
};

struct Distortion {
    AffineMap A;
    double bd_bound = 0;
};

Distortion affine_map_and_bound(const MultigridSpec& spec);

struct RailFamily {
    Vec v;
    Subset J_prime;
    Vec v_tilde;
    double cell_measure = 0;  // H^{d-1} of the cell of Lambda_{J'}
    double facet_area = 0;    // |det(g~ : g in J')|
    Vec primal_direction;     // A's linear part applied to v
};

std::vector<RailFamily> rail_families(const MultigridSpec& spec);

struct DualLatticeInfo {
    Subset J;
    Mat basis;  // columns
    Vec base;
    double covolume = 0;
    double rho = 0;
    std::vector<int> rails;        // rails contained in J
    std::vector<double> lambda;    // lambda_{v,J} per entry of rails
    std::vector<int> rail_member;  // index in J of the family not in J'_v
};

DualLatticeInfo dual_lattice_info(const MultigridSpec& spec, const Subset& J);

struct DualPoint {
    int j = 0;  // index into the subset list
    Subset J;
    std::vector<long long> k;  // full admissible index
    Vec x;
};

struct Tile {
    Subset J;
    std::vector<long long> k;
    Vec anchor;
    std::vector<Vec> generators;
    // Integer label of the anchor in Z^G; vertices of the tiling are unique labels.
    std::vector<long long> lift;

    Vec center() const;
    double volume() const;
    ConvexPolytope polytope() const;
};

struct Region {
    enum class Kind { Ball, Box };
    Kind kind = Kind::Ball;
    Vec center;
    double radius = 0;
    Vec lo, hi;

    static Region ball(const Vec& c, double r);
    static Region box(const Vec& lo, const Vec& hi);
    bool contains(const Vec& x) const;
    double measure() const;
    Region grown(double by) const;  // negative erodes
};

// Precomputed view of a validated spec.
class Multigrid {
public:
    explicit Multigrid(MultigridSpec spec, bool validate = true);

    const MultigridSpec& spec() const { return spec_; }
    int dim() const { return d_; }
    int families() const { return n_; }
    const std::vector<Subset>& subsets() const { return subsets_; }
    int subset_index(const Subset& J) const;
    const std::vector<RailFamily>& rails() const { return rails_; }
    int rail_index(const Subset& J_prime) const;
    const DualLatticeInfo& lattice(int j) const { return lattices_[j]; }
    const Distortion& distortion() const { return distortion_; }
    double max_tile_diameter() const { return max_diameter_; }
    double density() const;  // sum_J 1/det Lambda_J

    // Hyperplane coordinate (<x,g/|g|> - gamma_g)/|g|.
    double coordinate(const Vec& x, int g) const;
    DualPoint point(int j, const std::vector<long long>& kJ) const;
    // Next multigrid vertex along the rail line through p; dir = +1 or -1.
    DualPoint neighbour(const DualPoint& p, int rail, int dir) const;
    Tile tile(const DualPoint& p) const;

    // Row-major over each subset's k box, subsets in order. The point is reused between calls.
    void for_each_point(const Region& region, const std::function<void(const DualPoint&)>& fn) const;

private:
    MultigridSpec spec_;
    int d_ = 0, n_ = 0;
    std::vector<Subset> subsets_;
    std::vector<RailFamily> rails_;
    std::vector<DualLatticeInfo> lattices_;
    std::vector<Mat> basis_inverse_;
    Distortion distortion_;
    double max_diameter_ = 0;
};

// Hashable (j, k_J) key of a dual point.
IVec point_key(const DualPoint& p);

std::vector<DualPoint> dual_points_in_region(const MultigridSpec& spec, const Region& region);
Tile tile_of(const MultigridSpec& spec, const DualPoint& p);

struct TilingReport {
    std::size_t tiles = 0;
    std::size_t samples = 0;
    std::size_t resampled = 0;
    double region_measure = 0;
    double tile_measure = 0;
    double band_measure = 0;  // allowed discrepancy
    double max_distortion = 0;
    double bd_bound = 0;
};

// Tiles whose dual point x has A x in the region.
std::vector<Tile> tiles_in_region(const Multigrid& mg, const Region& region, double* max_distortion = nullptr);

// Each sample of the eroded region must lie in exactly one tile.
TilingReport check_tiling(const std::vector<Tile>& tiles, const Region& region, double pad,
                          std::size_t n_samples, std::uint64_t seed);
TilingReport verify_tiling(const MultigridSpec& spec, const Region& region, std::size_t n_samples,
                           std::uint64_t seed = 1);

// Line-delimited {J, k, anchor, generators}.
std::string tile_record(const Tile& t);
// d = 2, tiles filled by subset class.
std::string tiles_svg(const std::vector<Tile>& tiles, int n_classes, double pixels_per_unit = 20.0);

}  // namespace wulffgrid
