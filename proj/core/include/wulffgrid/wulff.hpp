#pragma once

#include "wulffgrid/geometry.hpp"
#include "wulffgrid/lattice_energy.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wulffgrid {

struct RealAtom {
    Vec v;
    double weight = 0.0;
};

// phi(nu) = sum_i w_i f(<v_i, nu>), f the positive part or the absolute value.
struct SupportFunction {
    std::vector<RealAtom> atoms;
    EvalMode mode = EvalMode::PositivePart;

    int dim() const { return atoms.empty() ? 0 : static_cast<int>(atoms.front().v.size()); }
    double operator()(const Vec& nu) const;
    SupportFunction positive_part() const;
    SupportFunction negative_part() const;  // returned with positive weights
};

// Perimeter weights of V, divided by det L when a lattice is given.
SupportFunction support_function(const Potential& V, const IMat& lattice = {});
SupportFunction operator+(const SupportFunction& a, const SupportFunction& b);
SupportFunction operator*(double s, const SupportFunction& a);

enum class Provenance { Zonotope, SignedDifference, Halfspace };

struct WulffShape {
    ConvexPolytope body;
    Provenance provenance = Provenance::Zonotope;
    bool degenerate = false;  // lower-dimensional or empty
    bool empty = false;
    // signed_wulff: Hausdorff distance to the halfspace construction, when both are full-dimensional
    std::optional<double> oracle_distance;
};

WulffShape zonotope_of(const SupportFunction& phi, int dim = 0);
WulffShape signed_wulff(const SupportFunction& phi, int dim = 0);
// {x : <x,n> <= phi(n)} over the rays of the fan of phi and the extra normals given.
WulffShape wulff_halfspace(const SupportFunction& phi, const std::vector<Vec>& extra_normals = {});

struct Positivity {
    double min = 0.0;
    Vec argmin;
};

Positivity positivity_check(const SupportFunction& phi, int dim = 0);

struct ShapeClass {
    int vertices = 0;
    int edges = 0;
    int facets = 0;
    bool centrally_symmetric = false;
    bool zonotope = false;
    std::map<int, int> facet_sizes;  // d = 3: corners per facet -> count
    std::string label;
};

ShapeClass classify_shape(const WulffShape& w);

struct ScanRow {
    double c = 0.0;
    bool degenerate = false;
    bool empty = false;
    ShapeClass shape;
    double positivity_min = 0.0;
    std::string label;  // shape label or "empty" / "degenerate"
};

struct ScanInterval {
    std::string label;
    double lo = 0.0;
    double hi = 0.0;
};

struct ScanResult {
    std::vector<ScanRow> rows;
    std::vector<ScanInterval> intervals;  // maximal runs of equal label, in scan order
    std::string claimed;  // interval quoted for comparison, never asserted
};

using Family = std::function<SupportFunction(double)>;

ScanResult parameter_scan(const Family& family, const std::vector<double>& grid, const std::string& claimed = "");
std::vector<double> scan_grid(double lo, double hi, double step);
std::string scan_csv(const ScanResult& r);

// Signed FCC-minus-axes family: c on the 12 vectors (0,±1,±1) cyclic, -1 on ±e_i, absolute value.
SupportFunction fcc_minus_axes(double c);
// 2/3 on ±e_j, 4/21 on (±4,±2,±1) cyclic, -w on (0,±2,±4) cyclic, absolute value.
SupportFunction pyritohedron_family(double w);
// c on the unit vectors to the 30 edge midpoints of an icosahedron, -1 on its 12 vertex directions.
SupportFunction icosahedral_family(double c);

}  // namespace wulffgrid
