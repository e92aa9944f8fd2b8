#pragma once

#include "wulffgrid/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <vector>

namespace wulffgrid {

using IVec = Eigen::Matrix<long long, Eigen::Dynamic, 1>;
using IMat = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

struct IVecHash {
    std::size_t operator()(const IVec& v) const noexcept
    {
        std::size_t h = static_cast<std::size_t>(v.size());
        for (Eigen::Index i = 0; i < v.size(); ++i)
            h ^= std::hash<long long>{}(v(i)) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }
};

struct IVecLess {
    bool operator()(const IVec& a, const IVec& b) const
    {
        return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
    }
};

struct LatticeReduction {
    IMat basis;  // d x rank, Hermite normal form (columns)
    int rank = 0;
    double det = 0.0;  // covolume inside the span
};

// Integer span of the inputs, canonicalised.
LatticeReduction lattice_reduce(const std::vector<IVec>& vectors);

// Row-style Hermite normal form of the rows of m; zero rows dropped.
IMat hermite_rows(const IMat& m);

// Solves sum_j a_j n_j = target over the integers; empty optional-like result (size 0) if impossible.
IVec integer_combination(const std::vector<IVec>& generators, const IVec& target);

long long exact_det(const IMat& m);
// adj(m) with m * adj(m) = det(m) I.
IMat adjugate(const IMat& m);

struct KernelSublattice {
    IMat basis;  // d x (d-1), integral, orthogonal to v
    double cell_measure = 0.0;
    long long coset_count = 0;
};

KernelSublattice kernel_sublattice(const IVec& v);

// Cosets of Λ_v = Λ_{v⊥} ⊕ Zv in Z^d, with representatives in the half-open cell U_v.
class ChannelCosets {
public:
    explicit ChannelCosets(const IVec& v);

    IVec representative(const IVec& x) const;
    // All representatives in lexicographic order.
    std::vector<IVec> representatives() const;
    long long count() const { return count_; }
    const IVec& direction() const { return v_; }

private:
    IVec v_;
    IMat cell_;  // columns: kernel basis then v
    IMat adj_;
    long long det_ = 0;
    long long count_ = 0;
};

IVec ivec(std::initializer_list<long long> c);
Vec to_real(const IVec& v);

}  // namespace wulffgrid
