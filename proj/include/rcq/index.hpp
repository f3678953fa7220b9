#pragma once

#include "rcq/octree.hpp"
#include "rcq/range_index.hpp"

namespace rcq {

// The prebuilt engine state for one dataset: quantized points, the compressed
// octree with its centroid decomposition, orthogonal range services, and the
// approximation ladder. Members hold pointers into each other, so the bundle
// is pinned in place once built.
template <int D>
class Index {
public:
    Index(PointSet<D> points, int universe_bits, std::uint64_t ladder_seed)
        : universe_bits_(universe_bits), points_(std::move(points)) {
        RCQ_REQUIRE(universe_bits >= 1 && universe_bits <= kMaxUniverseBits, "universe_bits out of range");
        const coord_t limit = coord_t(1) << universe_bits;
        for (auto& p : points_.pts)
            for (int d = 0; d < D; ++d)
                RCQ_REQUIRE(p[d] >= 0 && p[d] < limit, "point outside universe");
        tree_ = CompressedOctree<D>(points_);
        cd_ = CentroidDecomposition<D>(tree_);
        rindex_ = RangeIndex<D>(points_);
        ladder_ = ApproxLadder<D>(points_, rindex_, ladder_seed);
    }

    Index(const Index&) = delete;
    Index& operator=(const Index&) = delete;

    int universe_bits() const { return universe_bits_; }
    const PointSet<D>& points() const { return points_; }
    const CompressedOctree<D>& tree() const { return tree_; }
    const CentroidDecomposition<D>& cd() const { return cd_; }
    const RangeIndex<D>& rindex() const { return rindex_; }
    const ApproxLadder<D>& ladder() const { return ladder_; }
    AxisBox<D> universe() const { return universe_box<D>(universe_bits_); }

private:
    int universe_bits_;
    PointSet<D> points_;
    CompressedOctree<D> tree_;
    CentroidDecomposition<D> cd_;
    RangeIndex<D> rindex_;
    ApproxLadder<D> ladder_;
};

}  // namespace rcq
