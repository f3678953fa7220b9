#pragma once

#include <queue>

#include "rcq/index.hpp"
#include "rcq/single_shot.hpp"

namespace rcq {

template <int D>
struct QuerySpec {
    AxisBox<D> box;
    int k = 2;
    double eps = 0.1;
    CostModel<D> model = cost_model<D>(CostModelId::LinfKCenter);
};

template <int D>
struct PackingResult {
    double lb = 0.0;   // lower bound on Opt_k(S_Q); 0 in exact mode
    double r = 0.0;    // eps * lb / f(k)
    std::vector<std::uint32_t> packing;  // R, one id per final cube
    bool exact = false;                  // R hits every occupied coordinate of S_Q
    // work counters (octree cubes handled by the two phases)
    std::uint32_t nodes_visited = 0;
    std::uint32_t phase1_cubes = 0;
    std::uint32_t cd_nodes_touched = 0;
};

namespace detail {

template <int D>
class PackingRun {
public:
    PackingRun(const Index<D>& ix, const QuerySpec<D>& spec) : ix_(ix), spec_(spec) {}

    PackingResult<D> run() {
        const auto& tree = ix_.tree();
        push(tree.root());
        const std::size_t threshold = std::size_t(spec_.k) << (2 * D);  // k * 2^(2d)

        // Phase 1: collect a cube cover until it certifies a lower bound.
        while (!inner_.empty() && inner_.size() + leaf_.size() <= threshold) {
            std::uint32_t v = pop_largest();
            handle(v, false);
        }
        res_.phase1_cubes = std::uint32_t(inner_.size() + leaf_.size());

        if (inner_.empty()) {
            // Every cube holds one coordinate: the representatives are S_Q itself.
            res_.exact = true;
            res_.lb = 0.0;
            res_.r = 0.0;
        } else {
            const auto& top = tree.node(heap_top());
            RCQ_INVARIANT(top.cube.level >= 1, "lower bound must be positive");
            res_.lb = spec_.model.c * double(top.cube.size());
            res_.r = spec_.eps * res_.lb / spec_.model.f(spec_.k);
            // Phase 2: refine to cubes of size <= r/sqrt(d).
            while (!inner_.empty()) {
                std::uint32_t v = pop_largest();
                handle(v, true);
            }
        }

        res_.packing.reserve(leaf_.size());
        for (auto v : leaf_) res_.packing.push_back(pick_point(v));
        return std::move(res_);
    }

private:
    using HeapEntry = std::pair<int, std::uint32_t>;  // (level, node id)
    struct HeapCmp {
        // max-heap on cube size, ties broken toward the lowest node id
        bool operator()(const HeapEntry& a, const HeapEntry& b) const {
            if (a.first != b.first) return a.first < b.first;
            return a.second > b.second;
        }
    };

    void push(std::uint32_t v) {
        ++res_.nodes_visited;
        if (ix_.tree().node(v).is_leaf())
            leaf_.push_back(v);
        else
            inner_.push(HeapEntry{ix_.tree().node(v).cube.level, v});
    }

    void push_leaf(std::uint32_t v) {
        ++res_.nodes_visited;
        leaf_.push_back(v);
    }

    std::uint32_t heap_top() const { return inner_.top().second; }

    std::uint32_t pop_largest() {
        auto [lvl, v] = inner_.top();
        inner_.pop();
        ++res_.nodes_visited;
        return v;
    }

    bool small_enough(int level) const {
        // size * sqrt(d) <= r  <=>  d * 4^level <= r^2
        return (long double)(D)*std::exp2l(2.0L * level) <= (long double)res_.r * (long double)res_.r;
    }

    // Lines split-start..split-end of the cover algorithm: shrink to the
    // deepest node above bb(S_Q ∩ B_v) when B_v sticks out of Q, then insert
    // the children that still meet S_Q.
    void handle(std::uint32_t v, bool refine) {
        const auto& tree = ix_.tree();
        if (!tree.node(v).cube.inside_box(spec_.box)) {
            AxisBox<D> clip = tree.node(v).cube.as_box().intersect(spec_.box);
            RCQ_INVARIANT(clip.valid(), "cube in cover must meet the query box");
            auto bb = ix_.rindex().bounding_box(clip);
            RCQ_INVARIANT(bb.has_value(), "cube in cover must contain query points");
            typename CentroidDecomposition<D>::SearchStats st;
            std::uint32_t u = ix_.cd().deepest_containing(*bb, &st);
            res_.cd_nodes_touched += st.centroid_nodes_touched;
            v = u;
            if (tree.node(v).is_leaf()) {
                // all remaining points share one coordinate
                push_leaf(v);
                return;
            }
        }
        for (std::uint32_t w : tree.children(v)) {
            const auto& cw = tree.node(w).cube;
            bool nonempty = cw.inside_box(spec_.box);
            if (!nonempty) {
                AxisBox<D> clip = cw.as_box().intersect(spec_.box);
                nonempty = clip.valid() && ix_.rindex().range_count(clip) > 0;
            }
            if (!nonempty) continue;
            if (refine && small_enough(cw.level))
                push_leaf(w);
            else
                push(w);
        }
    }

    std::uint32_t pick_point(std::uint32_t v) const {
        const auto& node = ix_.tree().node(v);
        if (node.cube.inside_box(spec_.box)) return node.representative;
        AxisBox<D> clip = node.cube.as_box().intersect(spec_.box);
        auto p = ix_.rindex().extreme_point(clip, 0, Extreme::Min);
        RCQ_INVARIANT(p.has_value(), "leaf cube must contain a query point");
        return *p;
    }

    const Index<D>& ix_;
    const QuerySpec<D>& spec_;
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapCmp> inner_;
    std::vector<std::uint32_t> leaf_;
    PackingResult<D> res_;
};

}  // namespace detail

// Phase 1 + Phase 2 of the query pipeline: a certified lower bound on
// Opt_k(S_Q) and a weak r-packing R of S_Q with r = eps * LB / f(k).
template <int D>
inline PackingResult<D> lower_bound_and_packing(const Index<D>& ix, const QuerySpec<D>& spec) {
    RCQ_REQUIRE(spec.k >= 2, "lower_bound_and_packing: k >= 2");
    RCQ_REQUIRE(spec.eps > 0, "lower_bound_and_packing: eps > 0");
    RCQ_REQUIRE(ix.rindex().range_count(spec.box) >= 2,
                "lower_bound_and_packing: |S_Q| <= 1 is handled by the caller");
    return detail::PackingRun<D>(ix, spec).run();
}

// Expand a clustering of a weak r-packing to all points: covers grow by r and
// every point joins the cluster of its closest packing point.
template <int D>
inline Clustering<D> expand_clustering(const PointSet<D>& ps, const Clustering<D>& packed, double r,
                                       const CostModel<D>& model, std::span<const std::uint32_t> all_ids) {
    Clustering<D> out;
    out.clusters.assign(packed.clusters.size(), {});
    std::vector<std::uint32_t> packing_ids;
    std::vector<std::uint32_t> cluster_of;
    for (std::size_t c = 0; c < packed.clusters.size(); ++c)
        for (auto id : packed.clusters[c]) {
            packing_ids.push_back(id);
            cluster_of.push_back(std::uint32_t(c));
        }
    for (auto id : all_ids) {
        std::size_t best = 0;
        std::int64_t bd = dist2_sq<D>(ps[id], ps[packing_ids[0]]);
        for (std::size_t j = 1; j < packing_ids.size(); ++j) {
            std::int64_t v = dist2_sq<D>(ps[id], ps[packing_ids[j]]);
            if (v < bd || (v == bd && packing_ids[j] == id)) {
                bd = v;
                best = j;
            }
        }
        out.clusters[cluster_of[best]].push_back(id);
    }
    for (std::size_t c = 0; c < packed.clusters.size(); ++c)
        out.covers.push_back(model.expand_cover(packed.covers[c], r));
    // drop clusters that attracted no points
    for (std::size_t c = out.clusters.size(); c-- > 0;) {
        if (out.clusters[c].empty()) {
            out.clusters.erase(out.clusters.begin() + c);
            out.covers.erase(out.covers.begin() + c);
        }
    }
    for (std::size_t c = 0; c < out.clusters.size(); ++c) {
        std::sort(out.clusters[c].begin(), out.clusters[c].end());
        for (auto id : out.clusters[c])
            RCQ_INVARIANT(out.covers[c].contains(ps[id], 1e-9 * std::max(1.0, out.covers[c].radius + out.covers[c].offset) + 1e-9),
                          "expanded cover must contain every assigned point");
    }
    out.cost = model.clustering_cost(ps, out.clusters);
    return out;
}

template <int D>
struct ClusterQueryResult {
    Clustering<D> clustering;
    PackingResult<D> packing;
    bool exact_solver = true;   // single-shot ran in exact mode
    bool members = true;        // clusters carry full membership
    const char* method = "";
    std::size_t sq_count = 0;
};

// ClusterQuery(k, Q, eps): lower bound, weak r-packing, single-shot solve on
// the packing, then expansion back to S_Q.
template <int D>
inline ClusterQueryResult<D> cluster_query(const Index<D>& ix, const QuerySpec<D>& spec,
                                           const SingleShotOptions& opt = {}, bool with_members = true) {
    RCQ_REQUIRE(spec.k >= 2, "cluster_query: k >= 2");
    RCQ_REQUIRE(spec.eps > 0, "cluster_query: eps > 0");
    ClusterQueryResult<D> res;
    const auto& ps = ix.points();
    res.sq_count = ix.rindex().range_count(spec.box);
    if (res.sq_count == 0) {
        res.method = "empty";
        return res;
    }
    if (res.sq_count <= std::size_t(spec.k)) {
        auto ids = ix.rindex().range_report(spec.box);
        std::sort(ids.begin(), ids.end());
        std::vector<std::vector<std::uint32_t>> parts;
        for (auto id : ids) parts.push_back({id});
        res.clustering = spec.model.finish(ps, std::move(parts));
        res.packing.packing = ids;
        res.packing.exact = true;
        res.method = "singletons";
        return res;
    }

    res.packing = lower_bound_and_packing(ix, spec);
    auto solved = single_shot_solve<D>(ps, res.packing.packing, spec.k, spec.model, opt);
    res.exact_solver = solved.exact;
    res.method = solved.method;

    if (with_members) {
        auto all_ids = ix.rindex().range_report(spec.box);
        std::sort(all_ids.begin(), all_ids.end());
        res.clustering = expand_clustering<D>(ps, solved.clustering, res.packing.r, spec.model, all_ids);
    } else {
        res.members = false;
        res.clustering = std::move(solved.clustering);
        for (auto& cov : res.clustering.covers) cov = spec.model.expand_cover(cov, res.packing.r);
        // cover-based upper bound; still within [Opt, (1+eps) Opt] for exact solves
        res.clustering.cost += res.packing.r * spec.model.f(spec.k);
    }
    return res;
}

}  // namespace rcq
