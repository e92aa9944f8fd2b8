#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace wulffgrid {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Predicates use this relative to the scale of the data at hand.
inline constexpr double kRelTol = 1e-9;

// {x : <normal, x> <= offset}, normal of unit length.
struct Hyperplane {
    Vec normal;
    double offset = 0.0;
};

struct Facet {
    Vec normal;  // outward, unit
    double offset = 0.0;
    // d=3: ccw seen from outside.  d=2: the edge as (tail, head) of the ccw boundary.
    std::vector<int> loop;
};

struct ConvexPolytope {
    int dim = 0;
    int affine_dim = -1;  // -1 is the empty set
    std::vector<Vec> vertices;  // lexicographic order
    std::vector<Facet> facets;  // only for full-dimensional bodies
    std::vector<std::array<int, 2>> edges;
    // Boundary cycle when affine_dim == 2 (a polygon in the plane or flat in space).
    std::vector<int> loop;

    bool is_empty() const { return affine_dim < 0; }
    bool full_dimensional() const { return affine_dim == dim; }
    std::vector<Hyperplane> halfspaces() const;
};

struct Box {
    Vec lo;
    Vec hi;
};

struct FacetMeasure {
    Vec normal;
    double area = 0.0;
};

struct Measure {
    double volume = 0.0;
    std::vector<FacetMeasure> facets;
};

struct DiffResult {
    ConvexPolytope body;
    bool empty = false;
};

// Hull of any affine dimension; d in {2,3}.
ConvexPolytope hull_of(const std::vector<Vec>& points, int dim);
// Throws DegenerateHull unless the points are full-dimensional.
ConvexPolytope convex_hull(const std::vector<Vec>& points);

ConvexPolytope halfspace_intersection(const std::vector<Hyperplane>& halfspaces,
                                      const std::optional<Box>& bbox = std::nullopt);

ConvexPolytope minkowski_sum(const ConvexPolytope& p, const ConvexPolytope& q);
// (P + v) ∩ (P - v), i.e. P minus the segment [-v, v].
DiffResult minkowski_diff_segment(const ConvexPolytope& p, const Vec& v);

Measure polytope_measure(const ConvexPolytope& p);

double support(const ConvexPolytope& p, const Vec& u);
bool contains(const ConvexPolytope& p, const Vec& x, double tol);
double distance_to(const ConvexPolytope& p, const Vec& x);
double hausdorff(const ConvexPolytope& p, const ConvexPolytope& q);
double diameter(const ConvexPolytope& p);
Vec vertex_centroid(const ConvexPolytope& p);

ConvexPolytope translated(const ConvexPolytope& p, const Vec& t);
ConvexPolytope scaled(const ConvexPolytope& p, double s);
ConvexPolytope mapped(const ConvexPolytope& p, const Mat& m);

ConvexPolytope point_polytope(const Vec& x);
ConvexPolytope segment_polytope(const Vec& a, const Vec& b);
ConvexPolytope box_polytope(const Vec& lo, const Vec& hi);
// Regular n-gon centred at the origin with the given area, first vertex on +x.
ConvexPolytope regular_polygon(int n, double area);

std::string to_off(const ConvexPolytope& p);
std::string to_svg(const ConvexPolytope& p, double pixels_per_unit = 40.0);

}  // namespace wulffgrid
