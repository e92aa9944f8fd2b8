#pragma once

#include "wulffgrid/lattice.hpp"

#include <cstdint>
#include <unordered_set>
#include <vector>

namespace wulffgrid::detail {

// Membership for integer points.  Packs d <= 3 coordinates of modest size into one word,
// which keeps million-point recoveries fast; otherwise falls back to hashing vectors.
class PointSet {
public:
    explicit PointSet(const std::vector<IVec>& pts)
    {
        dim_ = pts.empty() ? 0 : static_cast<int>(pts[0].size());
        packed_ = dim_ <= 3;
        for (const auto& p : pts)
            for (Eigen::Index i = 0; i < p.size(); ++i)
                if (p(i) >= kHalf || p(i) < -kHalf) packed_ = false;
        if (packed_) {
            fast_.reserve(pts.size() * 2);
            for (const auto& p : pts) fast_.insert(pack(p));
        } else {
            slow_.reserve(pts.size() * 2);
            for (const auto& p : pts) slow_.insert(p);
        }
        size_ = packed_ ? fast_.size() : slow_.size();
    }

    bool contains(const IVec& x) const
    {
        if (!packed_) return slow_.count(x) > 0;
        for (Eigen::Index i = 0; i < x.size(); ++i)
            if (x(i) >= kHalf || x(i) < -kHalf) return false;
        return fast_.count(pack(x)) > 0;
    }

    std::size_t size() const { return size_; }

private:
    static constexpr long long kHalf = 1LL << 20;

    static std::uint64_t pack(const IVec& x)
    {
        std::uint64_t k = 0;
        for (Eigen::Index i = 0; i < x.size(); ++i) k = (k << 21) | static_cast<std::uint64_t>(x(i) + kHalf);
        return k;
    }

    int dim_ = 0;
    bool packed_ = true;
    std::size_t size_ = 0;
    std::unordered_set<std::uint64_t> fast_;
    std::unordered_set<IVec, IVecHash> slow_;
};

}  // namespace wulffgrid::detail
