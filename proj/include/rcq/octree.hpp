#pragma once

#include <algorithm>
#include <numeric>

#include "rcq/geometry.hpp"

namespace rcq {

// Compressed octree over quantized points. Empty regions and degree-1 chains
// are never materialized: a child whose level is more than one below its
// parent records the compression implicitly. Coincident points share a leaf.
template <int D>
class CompressedOctree {
public:
    struct Node {
        CanonicalCube<D> cube;
        std::int32_t parent = -1;
        std::uint32_t first_child = 0;     // index into child_arena
        std::uint8_t n_children = 0;       // 0 for leaves
        std::uint32_t representative = 0;  // a point id inside cube
        std::uint32_t subtree_count = 0;   // |P ∩ cube|
        bool is_leaf() const { return n_children == 0; }
    };

    CompressedOctree() = default;

    explicit CompressedOctree(const PointSet<D>& ps) {
        RCQ_REQUIRE(!ps.empty(), "build_octree: empty point set");
        zorder_.resize(ps.size());
        std::iota(zorder_.begin(), zorder_.end(), 0u);
        std::sort(zorder_.begin(), zorder_.end(), [&](std::uint32_t a, std::uint32_t b) {
            int best = -1;
            coord_t best_xor = 0;
            for (int d = 0; d < D; ++d) {
                coord_t x = ps[a][d] ^ ps[b][d];
                if (less_msb(best_xor, x)) {
                    best_xor = x;
                    best = d;
                }
            }
            if (best < 0) return a < b;
            return ps[a][best] < ps[b][best];
        });
        nodes_.reserve(2 * ps.size());
        root_ = build(ps, 0, std::uint32_t(ps.size()), -1);
    }

    const Node& node(std::uint32_t i) const { return nodes_[i]; }
    std::uint32_t root() const { return root_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::span<const std::uint32_t> children(std::uint32_t i) const {
        const Node& n = nodes_[i];
        return {child_arena_.data() + n.first_child, std::size_t(n.n_children)};
    }
    // Point ids of the node's subtree (contiguous in z-order).
    std::span<const std::uint32_t> points_of(std::uint32_t i) const {
        return {zorder_.data() + span_start_[i], std::size_t(nodes_[i].subtree_count)};
    }
    std::span<const std::uint32_t> zorder() const { return zorder_; }

    static bool less_msb(coord_t x, coord_t y) { return x < y && x < (x ^ y); }

private:
    std::uint32_t build(const PointSet<D>& ps, std::uint32_t lo, std::uint32_t hi, std::int32_t parent) {
        const std::uint32_t first = zorder_[lo];
        const std::uint32_t last = zorder_[hi - 1];
        CanonicalCube<D> cube = smallest_canonical_cube<D>(ps[first], ps[last]);
        std::uint32_t me = std::uint32_t(nodes_.size());
        nodes_.push_back(Node{cube, parent, 0, 0, first, hi - lo});
        span_start_.push_back(lo);
        if (ps[first] == ps[last]) return me;  // leaf (single or coincident points)

        // Split the z-contiguous span into runs by child cell of G_{level-1}.
        const int s = cube.level - 1;
        auto cell_key = [&](std::uint32_t idx) {
            std::uint64_t key = 0;
            for (int d = 0; d < D; ++d) key = (key << 1) | ((ps[zorder_[idx]][d] >> s) & 1);
            return key;
        };
        std::vector<std::pair<std::uint32_t, std::uint32_t>> runs;
        std::uint32_t run_start = lo;
        std::uint64_t cur = cell_key(lo);
        for (std::uint32_t i = lo + 1; i < hi; ++i) {
            std::uint64_t k = cell_key(i);
            if (k != cur) {
                runs.emplace_back(run_start, i);
                run_start = i;
                cur = k;
            }
        }
        runs.emplace_back(run_start, hi);
        RCQ_INVARIANT(runs.size() >= 2, "octree: smallest cube must split points");

        std::vector<std::uint32_t> kids;
        kids.reserve(runs.size());
        for (auto [a, b] : runs) kids.push_back(build(ps, a, b, std::int32_t(me)));
        nodes_[me].first_child = std::uint32_t(child_arena_.size());
        nodes_[me].n_children = std::uint8_t(kids.size());
        child_arena_.insert(child_arena_.end(), kids.begin(), kids.end());
        return me;
    }

    std::vector<Node> nodes_;
    std::vector<std::uint32_t> child_arena_;
    std::vector<std::uint32_t> span_start_;
    std::vector<std::uint32_t> zorder_;
    std::uint32_t root_ = 0;
};

// Centroid decomposition of the octree (viewed as an acyclic graph of degree
// <= 2^D + 1). Each level splits a component at a centroid into subgraphs of
// at most half the nodes.
template <int D>
class CentroidDecomposition {
public:
    struct CdNode {
        std::uint32_t octree_node;
        std::int32_t outside = -1;  // cd child for the component holding the parent
        // (octree child id, cd child id) pairs for child-subtree components
        std::vector<std::pair<std::uint32_t, std::int32_t>> down;
        std::uint32_t comp_size = 1;
    };

    struct SearchStats {
        std::uint32_t centroid_nodes_touched = 0;
    };

    CentroidDecomposition() = default;

    explicit CentroidDecomposition(const CompressedOctree<D>& tree) : tree_(&tree) {
        const std::size_t n = tree.node_count();
        token_.assign(n, 0);
        sz_.assign(n, 0);
        parent_.assign(n, UINT32_MAX);
        cd_nodes_.reserve(n);
        std::vector<std::uint32_t> all(n);
        std::iota(all.begin(), all.end(), 0u);
        root_ = decompose(all);
    }

    const CdNode& cd_node(std::int32_t i) const { return cd_nodes_[i]; }
    std::int32_t cd_root() const { return root_; }
    std::size_t cd_size() const { return cd_nodes_.size(); }

    std::uint32_t depth() const {
        std::uint32_t best = 0;
        std::vector<std::pair<std::int32_t, std::uint32_t>> stack{{root_, 1}};
        while (!stack.empty()) {
            auto [i, d] = stack.back();
            stack.pop_back();
            best = std::max(best, d);
            const CdNode& cn = cd_nodes_[i];
            if (cn.outside >= 0) stack.emplace_back(cn.outside, d + 1);
            for (auto [w, c] : cn.down) stack.emplace_back(c, d + 1);
        }
        return best;
    }

    // Deepest octree node whose cube contains Z; the octree root when no node
    // does (the collapsed chain above the root contains any box in universe).
    std::uint32_t deepest_containing(const AxisBox<D>& z, SearchStats* stats = nullptr) const {
        const CompressedOctree<D>& t = *tree_;
        std::int32_t cur = root_;
        std::uint32_t best = t.root();
        bool have_best = false;
        while (cur >= 0) {
            const CdNode& cn = cd_nodes_[cur];
            const std::uint32_t v = cn.octree_node;
            if (stats) ++stats->centroid_nodes_touched;
            if (t.node(v).cube.contains_box(z)) {
                if (!have_best || t.node(v).cube.level < t.node(best).cube.level) best = v;
                have_best = true;
                std::int32_t next = -1;
                for (std::uint32_t w : t.children(v)) {
                    if (stats) ++stats->centroid_nodes_touched;
                    if (t.node(w).cube.contains_box(z)) {
                        for (auto [ow, c] : cn.down)
                            if (ow == w) {
                                next = c;
                                break;
                            }
                        break;  // children are disjoint: at most one contains Z
                    }
                }
                cur = next;
            } else {
                cur = cn.outside;
            }
        }
        return best;
    }

private:
    std::int32_t decompose(std::vector<std::uint32_t>& comp) {
        const std::uint64_t tok = ++stamp_;
        for (auto v : comp) token_[v] = tok;

        std::uint32_t centroid = comp[0];
        if (comp.size() > 1) {
            // DFS order + parents within the component
            std::vector<std::uint32_t> order;
            order.reserve(comp.size());
            std::vector<std::uint32_t> stack{comp[0]};
            parent_[comp[0]] = UINT32_MAX;
            const std::uint64_t seen = ++stamp_;
            seen_token_.resize(token_.size(), 0);
            seen_token_[comp[0]] = seen;
            while (!stack.empty()) {
                auto v = stack.back();
                stack.pop_back();
                order.push_back(v);
                for_each_neighbor(v, [&](std::uint32_t u) {
                    if (token_[u] == tok && seen_token_[u] != seen) {
                        seen_token_[u] = seen;
                        parent_[u] = v;
                        stack.push_back(u);
                    }
                });
            }
            for (auto v : order) sz_[v] = 1;
            for (auto it = order.rbegin(); it != order.rend(); ++it)
                if (parent_[*it] != UINT32_MAX) sz_[parent_[*it]] += sz_[*it];

            const std::uint32_t total = std::uint32_t(comp.size());
            std::uint32_t best_max = total + 1;
            for (auto v : order) {
                std::uint32_t worst = total - sz_[v];
                for_each_neighbor(v, [&](std::uint32_t u) {
                    if (token_[u] == tok && parent_[u] == v) worst = std::max(worst, sz_[u]);
                });
                // ties broken by lowest node id, for determinism
                if (worst < best_max || (worst == best_max && v < centroid)) {
                    best_max = worst;
                    centroid = v;
                }
            }
        }

        std::int32_t me = std::int32_t(cd_nodes_.size());
        cd_nodes_.push_back(CdNode{centroid, -1, {}, std::uint32_t(comp.size())});
        token_[centroid] = 0;  // removed

        for_each_neighbor(centroid, [&](std::uint32_t nb) {
            if (token_[nb] != tok) return;
            std::vector<std::uint32_t> sub;
            std::vector<std::uint32_t> stack{nb};
            const std::uint64_t sub_tok = ++stamp_;
            token_[nb] = sub_tok;
            while (!stack.empty()) {
                auto v = stack.back();
                stack.pop_back();
                sub.push_back(v);
                for_each_neighbor(v, [&](std::uint32_t u) {
                    if (token_[u] == tok) {
                        token_[u] = sub_tok;
                        stack.push_back(u);
                    }
                });
            }
            std::int32_t child = decompose(sub);
            if (tree_->node(centroid).parent >= 0 &&
                nb == std::uint32_t(tree_->node(centroid).parent))
                cd_nodes_[me].outside = child;
            else
                cd_nodes_[me].down.emplace_back(nb, child);
        });
        return me;
    }

    template <typename F>
    void for_each_neighbor(std::uint32_t v, F&& f) const {
        const auto& t = *tree_;
        if (t.node(v).parent >= 0) f(std::uint32_t(t.node(v).parent));
        for (auto w : t.children(v)) f(w);
    }

    const CompressedOctree<D>* tree_ = nullptr;
    std::vector<CdNode> cd_nodes_;
    std::int32_t root_ = -1;
    std::vector<std::uint64_t> token_;
    std::vector<std::uint64_t> seen_token_;
    std::vector<std::uint32_t> sz_;
    std::vector<std::uint32_t> parent_;
    std::uint64_t stamp_ = 0;
};

}  // namespace rcq
