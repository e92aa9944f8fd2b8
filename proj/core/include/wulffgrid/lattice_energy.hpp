#pragma once

#include "wulffgrid/geometry.hpp"
#include "wulffgrid/lattice.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wulffgrid {

enum class Convention { Crystal, Signed };
enum class EvalMode { PositivePart, AbsoluteValue };

struct Atom {
    IVec v;
    double weight = 0.0;
};

// Crystal: weights are V(v) <= 0.  Signed: weights are the coefficients of phi directly,
// positive ones penalise broken bonds, negative ones reward them.
struct Potential {
    std::vector<Atom> atoms;  // lexicographic in v, no duplicates
    Convention convention = Convention::Crystal;
    EvalMode mode = EvalMode::PositivePart;

    int dim() const { return atoms.empty() ? 0 : static_cast<int>(atoms.front().v.size()); }
    // Contribution of a broken v-bond to the surface energy.
    double perimeter_weight(const Atom& a) const { return convention == Convention::Crystal ? -a.weight : a.weight; }
    std::optional<double> weight_of(const IVec& v) const;
    std::vector<IVec> support() const;
};

// Sorts, merges duplicates, checks the convention invariants.
Potential make_potential(std::vector<Atom> atoms, Convention c, EvalMode m);

// Crystal nearest-neighbour potential V = -1 on {±e_i}.
Potential nearest_neighbour(int d);

struct Configuration {
    std::vector<IVec> points;
    IMat lattice;  // basis of the ambient lattice; empty means Z^d
};

struct Channel {
    IVec v;
    IVec tau;
};

double total_energy(const Configuration& x, const Potential& V);
double surface_energy(const Configuration& x, const Potential& V);
double split_surface_energy(const Configuration& x, const Potential& V, const Channel& ch);
// Sum over every channel of the support; equals surface_energy.
double split_total(const Configuration& x, const Potential& V);
// C_E, the bond sum per point.
double bulk_constant(const Potential& V);

double phi_V(const Vec& nu, const Potential& V, const IMat& lattice = {});
double perimeter_P_V(const ConvexPolytope& e, const Potential& V, const IMat& lattice = {});

Potential symmetrize(const Potential& V);

struct Transformed {
    Potential potential;
    Configuration config;
};
// V∘M and M^{-1}X; M integral and invertible.
Transformed transform_by_map(const Potential& V, const Configuration& x, const IMat& m);
Potential transform_potential(const Potential& V, const IMat& m);

struct Recovery {
    Configuration config;
    long long base_count = 0;   // #Y_N before correction
    long long correction = 0;   // N - #Y_N
    double threshold = 0.0;     // N_E
    double correction_constant = 0.0;  // |correction| / (H^{d-1}(∂E) N^{(d-1)/d})
};

Recovery recovery_configuration(const ConvexPolytope& e, long long n);

struct PerimeterBound {
    double K = 0.0;
    double A = 0.0;
    double c = 0.0;
    double perimeter = 0.0;  // P(E_1(X))
    double surface = 0.0;    // F(X)
    bool holds = false;
    bool basis_found = true;  // false when the all-of-N fallback expression was used
    std::vector<IVec> basis;
};

PerimeterBound perimeter_bound(const Configuration& x, const Potential& V);

struct ProbeResult {
    double f_v = 0.0;
    double f_indicator = 0.0;
    bool holds = false;
};

struct StructureReport {
    int span_rank = 0;
    double span_det = 0.0;
    bool spans = false;
    // every u in N₋ joined to 0 by N₊ steps that stay inside N₋ ∪ {0}
    bool connected_within = false;
    // every ±u in N₋ reachable from 0 by N₊ steps anywhere in the lattice
    bool reachable = false;
    int c1 = 0;
    std::optional<double> c_v;
    std::optional<double> eps_trivial;
    double inf_positive = 0.0;
    std::vector<ProbeResult> probes;
};

StructureReport potential_structure(const Potential& V, const std::vector<Configuration>& probes, double eps);

// The pathology: N₊ = {(±1,±1)} weight c, N₋ = {±e_i} weight -1, signed, positive-part.
Potential pathology_potential(double c);
// m² points of the even-sum sublattice filling a diamond; m = round(sqrt(n)).
Configuration pathology_configuration(long long n);

std::string configuration_text(const Configuration& x);

}  // namespace wulffgrid
