#pragma once

#include <optional>
#include <random>

#include "rcq/geometry.hpp"

namespace rcq {

enum class Extreme { Min, Max };

// Orthogonal range services over a point set (optionally a subset of it):
// extreme points, bounding boxes, counting, reporting. Backed by a kd-tree
// with tight per-node boxes; answers are defined to equal linear scans.
template <int D>
class RangeIndex {
public:
    RangeIndex() = default;

    explicit RangeIndex(const PointSet<D>& ps) : RangeIndex(ps, all_ids(ps.size())) {}

    RangeIndex(const PointSet<D>& ps, std::vector<std::uint32_t> subset) : ps_(&ps), ids_(std::move(subset)) {
        if (ids_.empty()) return;
        nodes_.reserve(2 * ids_.size() / kLeaf + 2);
        root_ = build(0, std::uint32_t(ids_.size()));
    }

    std::size_t size() const { return ids_.size(); }

    std::optional<std::uint32_t> extreme_point(const AxisBox<D>& z, int dim, Extreme dir) const {
        RCQ_REQUIRE(dim >= 0 && dim < D, "extreme_point: bad dimension");
        std::optional<std::uint32_t> best;
        if (root_ >= 0) extreme_rec(root_, z, dim, dir, best);
        return best;
    }

    std::optional<AxisBox<D>> bounding_box(const AxisBox<D>& z) const {
        AxisBox<D> out;
        for (int d = 0; d < D; ++d) {
            auto lo = extreme_point(z, d, Extreme::Min);
            if (!lo) return std::nullopt;
            auto hi = extreme_point(z, d, Extreme::Max);
            out.lo[d] = (*ps_)[*lo][d];
            out.hi[d] = (*ps_)[*hi][d];
        }
        return out;
    }

    std::size_t range_count(const AxisBox<D>& z) const {
        return root_ >= 0 ? count_rec(root_, z) : 0;
    }

    std::vector<std::uint32_t> range_report(const AxisBox<D>& z) const {
        std::vector<std::uint32_t> out;
        if (root_ >= 0) report_rec(root_, z, out);
        return out;
    }

private:
    static constexpr std::uint32_t kLeaf = 12;

    struct Node {
        AxisBox<D> bbox;
        std::uint32_t begin, end;
        std::int32_t left = -1, right = -1;
        std::array<std::uint32_t, D> ext_min{};  // lowest-id extreme point per dim
        std::array<std::uint32_t, D> ext_max{};
    };

    static std::vector<std::uint32_t> all_ids(std::size_t n) {
        std::vector<std::uint32_t> v(n);
        std::iota(v.begin(), v.end(), 0u);
        return v;
    }

    // (coordinate, id) comparison used for extremes; ties go to the lowest id.
    bool better(std::uint32_t a, std::uint32_t b, int dim, Extreme dir) const {
        coord_t ca = (*ps_)[a][dim], cb = (*ps_)[b][dim];
        if (ca != cb) return dir == Extreme::Min ? ca < cb : ca > cb;
        return a < b;
    }

    std::int32_t build(std::uint32_t lo, std::uint32_t hi) {
        Node n;
        n.begin = lo;
        n.end = hi;
        n.bbox.lo = n.bbox.hi = (*ps_)[ids_[lo]];
        for (std::uint32_t i = lo; i < hi; ++i) {
            const auto& p = (*ps_)[ids_[i]];
            for (int d = 0; d < D; ++d) {
                n.bbox.lo[d] = std::min(n.bbox.lo[d], p[d]);
                n.bbox.hi[d] = std::max(n.bbox.hi[d], p[d]);
            }
        }
        std::int32_t me = std::int32_t(nodes_.size());
        nodes_.push_back(n);
        if (hi - lo <= kLeaf) {
            finish_extremes(me);
            return me;
        }
        int dim = 0;
        coord_t widest = -1;
        for (int d = 0; d < D; ++d) {
            coord_t w = n.bbox.hi[d] - n.bbox.lo[d];
            if (w > widest) {
                widest = w;
                dim = d;
            }
        }
        if (widest == 0) {  // all coincident
            finish_extremes(me);
            return me;
        }
        std::uint32_t mid = (lo + hi) / 2;
        std::nth_element(ids_.begin() + lo, ids_.begin() + mid, ids_.begin() + hi,
                         [&](std::uint32_t a, std::uint32_t b) {
                             coord_t ca = (*ps_)[a][dim], cb = (*ps_)[b][dim];
                             return ca != cb ? ca < cb : a < b;
                         });
        std::int32_t l = build(lo, mid);
        std::int32_t r = build(mid, hi);
        nodes_[me].left = l;
        nodes_[me].right = r;
        for (int d = 0; d < D; ++d) {
            nodes_[me].ext_min[d] = better(nodes_[l].ext_min[d], nodes_[r].ext_min[d], d, Extreme::Min)
                                        ? nodes_[l].ext_min[d]
                                        : nodes_[r].ext_min[d];
            nodes_[me].ext_max[d] = better(nodes_[l].ext_max[d], nodes_[r].ext_max[d], d, Extreme::Max)
                                        ? nodes_[l].ext_max[d]
                                        : nodes_[r].ext_max[d];
        }
        return me;
    }

    void finish_extremes(std::int32_t me) {
        Node& n = nodes_[me];
        for (int d = 0; d < D; ++d) {
            std::uint32_t bmin = ids_[n.begin], bmax = ids_[n.begin];
            for (std::uint32_t i = n.begin + 1; i < n.end; ++i) {
                if (better(ids_[i], bmin, d, Extreme::Min)) bmin = ids_[i];
                if (better(ids_[i], bmax, d, Extreme::Max)) bmax = ids_[i];
            }
            n.ext_min[d] = bmin;
            n.ext_max[d] = bmax;
        }
    }

    static bool disjoint(const AxisBox<D>& a, const AxisBox<D>& z) {
        for (int d = 0; d < D; ++d)
            if (a.hi[d] < z.lo[d] || a.lo[d] > z.hi[d]) return true;
        return false;
    }

    void extreme_rec(std::int32_t i, const AxisBox<D>& z, int dim, Extreme dir,
                     std::optional<std::uint32_t>& best) const {
        const Node& n = nodes_[i];
        if (disjoint(n.bbox, z)) return;
        // prune: the node cannot beat the current best
        if (best) {
            coord_t bound = dir == Extreme::Min ? n.bbox.lo[dim] : n.bbox.hi[dim];
            coord_t cur = (*ps_)[*best][dim];
            if (dir == Extreme::Min ? bound > cur : bound < cur) return;
        }
        if (z.contains_box(n.bbox)) {
            std::uint32_t cand = dir == Extreme::Min ? n.ext_min[dim] : n.ext_max[dim];
            if (!best || better(cand, *best, dim, dir)) best = cand;
            return;
        }
        if (n.left < 0) {
            for (std::uint32_t k = n.begin; k < n.end; ++k) {
                std::uint32_t id = ids_[k];
                if (z.contains((*ps_)[id]) && (!best || better(id, *best, dim, dir))) best = id;
            }
            return;
        }
        // visit the more promising child first
        std::int32_t a = n.left, b = n.right;
        coord_t ba = dir == Extreme::Min ? nodes_[a].bbox.lo[dim] : nodes_[a].bbox.hi[dim];
        coord_t bb = dir == Extreme::Min ? nodes_[b].bbox.lo[dim] : nodes_[b].bbox.hi[dim];
        if (dir == Extreme::Min ? bb < ba : bb > ba) std::swap(a, b);
        extreme_rec(a, z, dim, dir, best);
        extreme_rec(b, z, dim, dir, best);
    }

    std::size_t count_rec(std::int32_t i, const AxisBox<D>& z) const {
        const Node& n = nodes_[i];
        if (disjoint(n.bbox, z)) return 0;
        if (z.contains_box(n.bbox)) return n.end - n.begin;
        if (n.left < 0) {
            std::size_t c = 0;
            for (std::uint32_t k = n.begin; k < n.end; ++k) c += z.contains((*ps_)[ids_[k]]);
            return c;
        }
        return count_rec(n.left, z) + count_rec(n.right, z);
    }

    void report_rec(std::int32_t i, const AxisBox<D>& z, std::vector<std::uint32_t>& out) const {
        const Node& n = nodes_[i];
        if (disjoint(n.bbox, z)) return;
        if (z.contains_box(n.bbox)) {
            out.insert(out.end(), ids_.begin() + n.begin, ids_.begin() + n.end);
            return;
        }
        if (n.left < 0) {
            for (std::uint32_t k = n.begin; k < n.end; ++k)
                if (z.contains((*ps_)[ids_[k]])) out.push_back(ids_[k]);
            return;
        }
        report_rec(n.left, z, out);
        report_rec(n.right, z, out);
    }

    const PointSet<D>* ps_ = nullptr;
    std::vector<std::uint32_t> ids_;
    std::vector<Node> nodes_;
    std::int32_t root_ = -1;
};

// Sample size for a delta-approximation w.r.t. axis-aligned rectangles,
// m(delta) = ceil(C * (1/delta^2) * (ln(1/delta) + ln(1/fail))).
inline std::size_t delta_sample_size(double delta, double fail_prob = 1e-6, double c = 1.0) {
    delta = std::min(delta, 1.0);
    double m = c * (1.0 / (delta * delta)) * (std::log(1.0 / delta) + std::log(1.0 / fail_prob));
    return std::size_t(std::ceil(std::max(m, 1.0)));
}

// Precomputed ladder A_1..A_ceil(log2 n): A_i is a (1/2^i)-approximation of P,
// built by seeded uniform sampling without replacement. Levels whose sample
// size reaches n alias the full point set.
template <int D>
class ApproxLadder {
public:
    struct Level {
        double delta = 1.0;
        bool full = false;
        std::vector<std::uint32_t> ids;  // sorted; empty when full
        RangeIndex<D> index;             // over ids when partial
    };

    ApproxLadder() = default;

    ApproxLadder(const PointSet<D>& ps, const RangeIndex<D>& full_index, std::uint64_t seed)
        : ps_(&ps), full_index_(&full_index), seed_(seed) {
        RCQ_REQUIRE(!ps.empty(), "build_ladder: empty point set");
        const std::size_t n = ps.size();
        int top = std::max(1, bit_width64(n - 1));  // ceil(log2 n), at least 1
        levels_.resize(top + 1);                    // level 0 unused
        for (int i = 1; i <= top; ++i) {
            Level& lv = levels_[i];
            lv.delta = std::ldexp(1.0, -i);
            std::size_t m = std::min<std::size_t>(n, delta_sample_size(lv.delta));
            if (m >= n) {
                lv.full = true;
                continue;
            }
            lv.ids = sample_ids(n, m, seed ^ (0x100 + std::uint64_t(i)));
            lv.index = RangeIndex<D>(ps, lv.ids);
        }
    }

    int top_level() const { return int(levels_.size()) - 1; }
    const Level& level(int i) const { return levels_[i]; }
    std::uint64_t seed() const { return seed_; }

    // Points of A_i inside the box.
    std::vector<std::uint32_t> level_report(int i, const AxisBox<D>& z) const {
        i = std::clamp(i, 1, top_level());
        const Level& lv = levels_[i];
        auto out = lv.full ? full_index_->range_report(z) : lv.index.range_report(z);
        std::sort(out.begin(), out.end());
        return out;
    }

    const std::vector<std::uint32_t>& level_ids(int i, std::vector<std::uint32_t>& scratch) const {
        i = std::clamp(i, 1, top_level());
        const Level& lv = levels_[i];
        if (!lv.full) return lv.ids;
        scratch.resize(ps_->size());
        std::iota(scratch.begin(), scratch.end(), 0u);
        return scratch;
    }

    static std::vector<std::uint32_t> sample_ids(std::size_t n, std::size_t m, std::uint64_t seed) {
        std::vector<std::uint32_t> a(n);
        std::iota(a.begin(), a.end(), 0u);
        std::mt19937_64 rng(seed);
        for (std::size_t j = 0; j < m; ++j) {
            std::uniform_int_distribution<std::size_t> pick(j, n - 1);
            std::swap(a[j], a[pick(rng)]);
        }
        a.resize(m);
        std::sort(a.begin(), a.end());
        return a;
    }

private:
    const PointSet<D>* ps_ = nullptr;
    const RangeIndex<D>* full_index_ = nullptr;
    std::uint64_t seed_ = 0;
    std::vector<Level> levels_;
};

}  // namespace rcq
